use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest supported number of decimal places.
pub const MAX_SCALE: u32 = 12;

/// Default number of decimal places carried by a graph's weights.
pub const DEFAULT_SCALE: u32 = 3;

/// Dense colour (mode) index, `0..k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ColourId(pub u16);

impl ColourId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for ColourId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// A non-negative fixed-point weight, stored as an integer count of `10^-scale` units.
///
/// The scale is not carried by the value; it belongs to the graph the weight came from.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Weight(pub u64);

impl Weight {
    pub const ZERO: Weight = Weight(0);

    #[inline]
    pub fn units(self) -> u64 {
        self.0
    }

    #[inline]
    pub fn checked_add(self, other: Weight) -> Result<Weight> {
        self.0.checked_add(other.0).map(Weight).ok_or(Error::Overflow)
    }

    pub fn parse(text: &str, scale: u32) -> Result<Weight> {
        parse_decimal(text, scale).map(Weight)
    }

    pub fn to_decimal(self, scale: u32) -> String {
        format_decimal(self.0, scale)
    }
}

/// Outcome of comparing two weight vectors under the componentwise order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Dominance {
    Less,
    Greater,
    Equal,
    Incomparable,
}

/// One accumulated weight per colour.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct WeightVector(Vec<Weight>);

impl WeightVector {
    pub fn zeros(k: usize) -> Self {
        WeightVector(vec![Weight::ZERO; k])
    }

    pub fn from_units(units: &[u64]) -> Self {
        WeightVector(units.iter().copied().map(Weight).collect())
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.0.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    #[inline]
    pub fn get(&self, colour: ColourId) -> Weight {
        self.0[colour.index()]
    }

    #[inline]
    pub fn components(&self) -> &[Weight] {
        &self.0
    }

    pub fn units(&self) -> Vec<u64> {
        self.0.iter().map(|w| w.0).collect()
    }

    /// Sum of all components; the primary key of the solver's queue.
    #[inline]
    pub fn total(&self) -> u128 {
        self.0.iter().map(|w| w.0 as u128).sum()
    }

    /// Componentwise sum.
    pub fn add(&self, other: &WeightVector) -> Result<WeightVector> {
        check_len(self, other)?;
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| a.checked_add(*b))
            .collect::<Result<Vec<_>>>()
            .map(WeightVector)
    }

    /// Adds `weight` to the single component `colour`.
    pub fn add_to_colour(&self, colour: ColourId, weight: Weight) -> Result<WeightVector> {
        if colour.index() >= self.len() {
            return Err(Error::usage(format!(
                "colour {colour} out of range for {} colours",
                self.len()
            )));
        }
        let mut out = self.clone();
        out.0[colour.index()] = out.0[colour.index()].checked_add(weight)?;
        Ok(out)
    }

    /// Componentwise comparison without a length check; callers guarantee equal length.
    #[inline]
    pub fn dominance(&self, other: &WeightVector) -> Dominance {
        debug_assert_eq!(self.len(), other.len());
        let mut le = true;
        let mut ge = true;
        for (a, b) in self.0.iter().zip(&other.0) {
            if a < b {
                ge = false;
            } else if a > b {
                le = false;
            }
            if !le && !ge {
                return Dominance::Incomparable;
            }
        }
        match (le, ge) {
            (true, true) => Dominance::Equal,
            (true, false) => Dominance::Less,
            (false, true) => Dominance::Greater,
            (false, false) => Dominance::Incomparable,
        }
    }

    /// True when `self <= other` in every component (Less or Equal).
    #[inline]
    pub fn weakly_dominates(&self, other: &WeightVector) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    pub fn to_decimal_strings(&self, scale: u32) -> Vec<String> {
        self.0.iter().map(|w| w.to_decimal(scale)).collect()
    }
}

impl From<Vec<Weight>> for WeightVector {
    fn from(v: Vec<Weight>) -> Self {
        WeightVector(v)
    }
}

fn check_len(a: &WeightVector, b: &WeightVector) -> Result<()> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch {
            expected: a.len(),
            found: b.len(),
        });
    }
    Ok(())
}

/// Compares two weight vectors under the componentwise partial order.
pub fn compare(a: &WeightVector, b: &WeightVector) -> Result<Dominance> {
    check_len(a, b)?;
    Ok(a.dominance(b))
}

/// Componentwise sum of two weight vectors.
pub fn add(a: &WeightVector, b: &WeightVector) -> Result<WeightVector> {
    a.add(b)
}

pub(crate) fn pow10(scale: u32) -> u64 {
    10u64.pow(scale)
}

pub(crate) fn check_scale(scale: u32) -> Result<()> {
    if scale > MAX_SCALE {
        return Err(Error::usage(format!(
            "scale {scale} exceeds the maximum of {MAX_SCALE}"
        )));
    }
    Ok(())
}

fn split_decimal(text: &str) -> Result<(&str, &str)> {
    let text = text.trim();
    let (int, frac) = match text.split_once('.') {
        Some((i, f)) => (i, f),
        None => (text, ""),
    };
    let valid = |s: &str| s.bytes().all(|b| b.is_ascii_digit());
    if (int.is_empty() && frac.is_empty()) || !valid(int) || !valid(frac) {
        return Err(Error::usage(format!("invalid decimal `{text}`")));
    }
    Ok((int, frac))
}

fn units_of(int: &str, frac_digits: &str, scale: u32) -> Result<u64> {
    let int_val: u64 = if int.is_empty() {
        0
    } else {
        int.parse().map_err(|_| Error::Overflow)?
    };
    let mut frac_val = 0u64;
    for i in 0..scale as usize {
        let digit = frac_digits.as_bytes().get(i).map_or(0, |b| (b - b'0') as u64);
        frac_val = frac_val * 10 + digit;
    }
    int_val
        .checked_mul(pow10(scale))
        .and_then(|v| v.checked_add(frac_val))
        .ok_or(Error::Overflow)
}

/// Parses a non-negative decimal into `10^-scale` units. Digits beyond the scale
/// must be zero; anything else cannot be represented exactly and is rejected.
pub fn parse_decimal(text: &str, scale: u32) -> Result<u64> {
    check_scale(scale)?;
    let (int, frac) = split_decimal(text)?;
    if frac.len() > scale as usize && frac[scale as usize..].bytes().any(|b| b != b'0') {
        return Err(Error::usage(format!(
            "`{}` has more than {scale} decimal places",
            text.trim()
        )));
    }
    units_of(int, frac, scale)
}

/// Parses a non-negative decimal, rounding half-up to the nearest `10^-scale` unit.
pub fn parse_decimal_rounded(text: &str, scale: u32) -> Result<u64> {
    check_scale(scale)?;
    let (int, frac) = split_decimal(text)?;
    let units = units_of(int, frac, scale)?;
    let round_up = frac
        .as_bytes()
        .get(scale as usize)
        .is_some_and(|b| *b >= b'5');
    if round_up {
        units.checked_add(1).ok_or(Error::Overflow)
    } else {
        Ok(units)
    }
}

/// Formats units as a decimal with trailing fractional zeros removed.
pub fn format_decimal(units: u64, scale: u32) -> String {
    let base = pow10(scale);
    let int = units / base;
    let frac = units % base;
    if frac == 0 {
        return int.to_string();
    }
    let digits = format!("{:0width$}", frac, width = scale as usize);
    format!("{int}.{}", digits.trim_end_matches('0'))
}
