//! Post-optimal analysis of Pareto sets and the scaling-experiment harness.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::sync::atomic::{AtomicBool, Ordering as AtomicOrdering};
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::generator::{complete_multigraph, WeightRange};
use crate::graph::{pow10, ColourId, WeightVector, DEFAULT_SCALE};
use crate::solver::{solve, SolveOptions, Solution};

/// Per-colour positive price factors; the aggregate cost of a weight vector
/// is the factor-weighted sum of its components.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CostModel {
    factors: Vec<BigRational>,
}

impl CostModel {
    pub fn unit(k: usize) -> Self {
        CostModel {
            factors: vec![BigRational::from_integer(1.into()); k],
        }
    }

    pub fn new(factors: Vec<BigRational>) -> Result<Self> {
        if factors.iter().any(|f| !f.is_positive()) {
            return Err(Error::usage("cost factors must be positive"));
        }
        Ok(CostModel { factors })
    }

    pub fn factors(&self) -> &[BigRational] {
        &self.factors
    }

    pub fn with_factor(&self, colour: ColourId, factor: BigRational) -> Result<Self> {
        if colour.index() >= self.factors.len() {
            return Err(Error::usage(format!("colour {colour} out of range")));
        }
        let mut f = self.factors.clone();
        f[colour.index()] = factor;
        CostModel::new(f)
    }

    /// Aggregate in the weight's own units (divide by `10^scale` for graph units).
    pub fn aggregate_units(&self, w: &WeightVector) -> BigRational {
        self.factors
            .iter()
            .zip(w.components())
            .map(|(f, c)| f * BigRational::from_integer(BigInt::from(c.units())))
            .fold(BigRational::zero(), |acc, x| acc + x)
    }

    fn check(&self, k: usize) -> Result<()> {
        if self.factors.len() != k {
            return Err(Error::LengthMismatch {
                expected: k,
                found: self.factors.len(),
            });
        }
        Ok(())
    }
}

/// Parses a non-negative decimal such as `1.25` into an exact rational.
pub fn parse_factor(text: &str) -> Result<BigRational> {
    let text = text.trim();
    let (int, frac) = text.split_once('.').unwrap_or((text, ""));
    let digits = format!("{int}{frac}");
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return Err(Error::usage(format!("invalid factor `{text}`")));
    }
    let numer: BigInt = digits.parse().expect("digits");
    let denom = BigInt::from(10u32).pow(frac.len() as u32);
    Ok(BigRational::new(numer, denom))
}

/// Exact decimal rendering when the denominator allows it, else `p/q`.
pub fn format_rational(r: &BigRational) -> String {
    if r.is_integer() {
        return r.numer().to_string();
    }
    let mut d = r.denom().clone();
    let (two, five) = (BigInt::from(2), BigInt::from(5));
    let mut places = 0u32;
    let (mut twos, mut fives) = (0u32, 0u32);
    while (&d % &two).is_zero() {
        d /= &two;
        twos += 1;
    }
    while (&d % &five).is_zero() {
        d /= &five;
        fives += 1;
    }
    if d != BigInt::from(1) || twos.max(fives) > 30 {
        return format!("{}/{}", r.numer(), r.denom());
    }
    places += twos.max(fives);
    let scaled = r * BigRational::from_integer(BigInt::from(10).pow(places));
    let n = scaled.to_integer();
    let sign = if n.is_negative() { "-" } else { "" };
    let s = n.abs().to_string();
    let s = format!("{:0>width$}", s, width = places as usize + 1);
    let (i, f) = s.split_at(s.len() - places as usize);
    format!("{sign}{i}.{}", f.trim_end_matches('0'))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CostChoice {
    /// Index into the evaluated set.
    pub index: usize,
    /// Aggregate cost in graph units.
    pub cost: BigRational,
}

fn to_graph_units(units: BigRational, scale: u32) -> BigRational {
    units / BigRational::from_integer(BigInt::from(pow10(scale)))
}

/// Cheapest member of `set` under `model`; ties go to the lexicographically
/// smaller weight vector. `None` for an empty set.
pub fn evaluate_cost(set: &[WeightVector], model: &CostModel, scale: u32) -> Result<Option<CostChoice>> {
    let Some(first) = set.first() else {
        return Ok(None);
    };
    model.check(first.len())?;
    let mut best: Option<(BigRational, usize)> = None;
    for (i, w) in set.iter().enumerate() {
        model.check(w.len())?;
        let c = model.aggregate_units(w);
        let better = match &best {
            None => true,
            Some((bc, bi)) => c < *bc || (c == *bc && w < &set[*bi]),
        };
        if better {
            best = Some((c, i));
        }
    }
    Ok(best.map(|(c, index)| CostChoice {
        index,
        cost: to_graph_units(c, scale),
    }))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Breakpoint {
    /// Factor of the swept colour at which the optimum changes.
    pub factor: BigRational,
    /// Index of the optimum just above `factor`.
    pub best: usize,
}

/// Breakpoints of the cheapest member as `colour`'s factor sweeps `(0, inf)`
/// with every other factor held at `base`.
///
/// Each member's cost is the line `fixed + s * w[colour]`; the result lists the
/// corners of the lower envelope in increasing `s`, with exact rational `s`.
pub fn crossover_threshold(
    set: &[WeightVector],
    colour: ColourId,
    base: &CostModel,
) -> Result<Vec<Breakpoint>> {
    if set.is_empty() {
        return Ok(Vec::new());
    }
    base.check(set[0].len())?;
    if colour.index() >= set[0].len() {
        return Err(Error::usage(format!("colour {colour} out of range")));
    }
    let lines: Vec<(BigRational, BigRational)> = set
        .iter()
        .map(|w| {
            base.check(w.len())?;
            let slope = BigRational::from_integer(BigInt::from(w.get(colour).units()));
            let total = base.aggregate_units(w);
            let fixed = total - &base.factors[colour.index()] * &slope;
            Ok((fixed, slope))
        })
        .collect::<Result<_>>()?;

    // Best line at position `s`, preferring the smaller slope then vector among ties.
    let best_at = |s: &BigRational| -> usize {
        let value = |i: usize| &lines[i].0 + s * &lines[i].1;
        (0..lines.len())
            .min_by(|&a, &b| {
                value(a)
                    .cmp(&value(b))
                    .then_with(|| lines[a].1.cmp(&lines[b].1))
                    .then_with(|| set[a].cmp(&set[b]))
            })
            .expect("non-empty")
    };

    let mut current = best_at(&BigRational::zero());
    let mut out = Vec::new();
    loop {
        let (a_j, b_j) = &lines[current];
        let next = lines
            .iter()
            .filter(|(_, b)| b < b_j)
            .map(|(a, b)| (a - a_j) / (b_j - b))
            .min();
        let Some(s) = next else { break };
        let winner = best_at(&s);
        // a crossing always hands the optimum to a line of smaller slope
        debug_assert!(lines[winner].1 < *b_j);
        if winner == current {
            break;
        }
        out.push(Breakpoint {
            factor: s,
            best: winner,
        });
        current = winner;
    }
    Ok(out)
}

/// First breakpoint strictly above `factor`: how far the factor can rise before the optimum changes.
pub fn next_breakpoint_above<'a>(bps: &'a [Breakpoint], factor: &BigRational) -> Option<&'a Breakpoint> {
    bps.iter().find(|b| &b.factor > factor)
}

/// Last breakpoint strictly below `factor`: how far it can fall.
pub fn next_breakpoint_below<'a>(bps: &'a [Breakpoint], factor: &BigRational) -> Option<&'a Breakpoint> {
    bps.iter().rev().find(|b| &b.factor < factor)
}

/// Mean and max Pareto-set size over vertices other than the source that are reachable.
pub fn cardinality_summary(sol: &Solution) -> (f64, usize) {
    let sizes: Vec<usize> = sol
        .sets
        .iter()
        .enumerate()
        .filter(|(v, s)| *v != sol.source && !s.is_empty())
        .map(|(_, s)| s.len())
        .collect();
    if sizes.is_empty() {
        return (0.0, 0);
    }
    let mean = sizes.iter().sum::<usize>() as f64 / sizes.len() as f64;
    (mean, sizes.into_iter().max().unwrap_or(0))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentRecord {
    pub n: usize,
    pub k: usize,
    pub seed: u64,
    pub source: usize,
    pub mean_cardinality: f64,
    pub max_cardinality: usize,
    pub processed: u64,
    pub ms: f64,
}

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub range: WeightRange,
    pub scale: u32,
    /// Per-solve limits.
    pub max_labels: Option<u64>,
    pub solve_budget: Option<Duration>,
    /// Whole-run wall-time budget; jobs not started before it expires are skipped.
    pub total_budget: Option<Duration>,
    pub parallel: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            range: WeightRange::default(),
            scale: DEFAULT_SCALE,
            max_labels: Some(50_000_000),
            solve_budget: None,
            total_budget: None,
            parallel: true,
        }
    }
}

#[derive(Debug, Clone)]
pub struct ExperimentOutcome {
    pub records: Vec<ExperimentRecord>,
    /// Set when a resource limit cut the run short; `records` holds what finished.
    pub truncated: bool,
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// Seed of repetition `rep` at size `n` derived from the run's base seed.
pub fn instance_seed(base: u64, k: usize, n: usize, rep: usize) -> u64 {
    splitmix64(splitmix64(splitmix64(base) ^ k as u64) ^ ((n as u64) << 32 | rep as u64))
}

/// Generates `reps` complete multigraphs per `n`, solves each from vertex 0 and
/// records Pareto-set sizes and processed-label counts. Records come back in
/// `(n, rep)` order regardless of how they were scheduled.
pub fn run_experiment(
    n_values: &[usize],
    k: usize,
    reps: usize,
    seed: u64,
    cfg: &ExperimentConfig,
) -> Result<ExperimentOutcome> {
    if k < 1 || n_values.iter().any(|&n| n < 2) {
        return Err(Error::usage("experiments need k >= 1 and every n >= 2"));
    }
    let jobs: Vec<(usize, usize)> = n_values
        .iter()
        .flat_map(|&n| (0..reps).map(move |r| (n, r)))
        .collect();
    let start = Instant::now();
    let truncated = AtomicBool::new(false);

    let run = |&(n, rep): &(usize, usize)| -> Result<Option<ExperimentRecord>> {
        if let Some(total) = cfg.total_budget {
            if start.elapsed() > total {
                truncated.store(true, AtomicOrdering::Relaxed);
                return Ok(None);
            }
        }
        let s = instance_seed(seed, k, n, rep);
        let g = complete_multigraph(n, k, s, cfg.range, cfg.scale)?;
        let opts = SolveOptions {
            max_labels: cfg.max_labels,
            time_budget: cfg.solve_budget,
            ..Default::default()
        };
        let sol = match solve(&g, 0, &opts) {
            Ok(sol) => sol,
            Err(e) if e.is_ceiling() => {
                truncated.store(true, AtomicOrdering::Relaxed);
                return Ok(None);
            }
            Err(e) => return Err(e),
        };
        let (mean, max) = cardinality_summary(&sol);
        Ok(Some(ExperimentRecord {
            n,
            k,
            seed: s,
            source: 0,
            mean_cardinality: mean,
            max_cardinality: max,
            processed: sol.stats.processed,
            ms: sol.stats.elapsed.as_secs_f64() * 1e3,
        }))
    };

    let results: Vec<Result<Option<ExperimentRecord>>> = if cfg.parallel {
        jobs.par_iter().map(run).collect()
    } else {
        jobs.iter().map(run).collect()
    };
    let mut records = Vec::with_capacity(jobs.len());
    for r in results {
        if let Some(rec) = r? {
            records.push(rec);
        }
    }
    Ok(ExperimentOutcome {
        records,
        truncated: truncated.into_inner(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FitField {
    MeanCardinality,
    Processed,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PowerLawFit {
    pub exponent: f64,
    pub intercept: f64,
    pub r2: f64,
}

/// Least-squares line through `(ln n, ln y)`, where `y` is the field averaged per `n`.
pub fn fit_power_law(records: &[ExperimentRecord], field: FitField) -> Result<PowerLawFit> {
    let mut by_n: BTreeMap<usize, (f64, usize)> = BTreeMap::new();
    for r in records {
        let y = match field {
            FitField::MeanCardinality => r.mean_cardinality,
            FitField::Processed => r.processed as f64,
        };
        if !(y > 0.0) {
            return Err(Error::usage(format!(
                "power-law fit needs positive values; n={} has {y}",
                r.n
            )));
        }
        let e = by_n.entry(r.n).or_insert((0.0, 0));
        e.0 += y;
        e.1 += 1;
    }
    if by_n.len() < 3 {
        return Err(Error::usage("power-law fit needs at least 3 distinct n values"));
    }
    let pts: Vec<(f64, f64)> = by_n
        .iter()
        .map(|(&n, &(sum, c))| ((n as f64).ln(), (sum / c as f64).ln()))
        .collect();
    let m = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = pts.iter().map(|p| (p.1 - my).powi(2)).sum();
    let exponent = sxy / sxx;
    let intercept = my - exponent * mx;
    let r2 = if syy == 0.0 { 1.0 } else { (sxy * sxy) / (sxx * syy) };
    Ok(PowerLawFit {
        exponent,
        intercept,
        r2,
    })
}

/// CSV with header `n,k,seed,mean,max,processed,ms`. Without timing the `ms`
/// column is left empty so that output is reproducible.
pub fn records_to_csv(records: &[ExperimentRecord], timing: bool) -> String {
    let mut out = String::from("n,k,seed,mean,max,processed,ms\n");
    for r in records {
        let ms = if timing { format!("{:.3}", r.ms) } else { String::new() };
        let _ = writeln!(
            out,
            "{},{},{},{:.6},{},{},{}",
            r.n, r.k, r.seed, r.mean_cardinality, r.max_cardinality, r.processed, ms
        );
    }
    out
}

/// Per-`n` averages as whitespace-separated columns for log-log plotting.
pub fn gnuplot_data(records: &[ExperimentRecord]) -> String {
    let mut by_k: BTreeMap<usize, BTreeMap<usize, Vec<&ExperimentRecord>>> = BTreeMap::new();
    for r in records {
        by_k.entry(r.k).or_default().entry(r.n).or_default().push(r);
    }
    let mut out = String::new();
    for (k, series) in by_k {
        let _ = writeln!(out, "# k={k}\n# n mean_cardinality max_cardinality processed");
        for (n, rs) in series {
            let c = rs.len() as f64;
            let mean = rs.iter().map(|r| r.mean_cardinality).sum::<f64>() / c;
            let max = rs.iter().map(|r| r.max_cardinality as f64).sum::<f64>() / c;
            let processed = rs.iter().map(|r| r.processed as f64).sum::<f64>() / c;
            let _ = writeln!(out, "{n} {mean:.6} {max:.6} {processed:.1}");
        }
        out.push_str("\n\n");
    }
    out
}

/// One row of a clustered-network run: size, running time and path statistics.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NetworkReport {
    pub cluster_distance: String,
    pub vertices: usize,
    pub edges: usize,
    pub minutes: f64,
    pub avg_paths: f64,
    pub max_paths: usize,
}

impl NetworkReport {
    pub fn from_solution(cluster_distance: &str, vertices: usize, edges: usize, sol: &Solution) -> Self {
        let (avg, max) = cardinality_summary(sol);
        NetworkReport {
            cluster_distance: cluster_distance.to_string(),
            vertices,
            edges,
            minutes: sol.stats.elapsed.as_secs_f64() / 60.0,
            avg_paths: avg,
            max_paths: max,
        }
    }

    pub fn header() -> &'static str {
        "Cluster  Vertices  Edges  Time(min)  AvgPaths  MaxPaths"
    }

    pub fn row(&self) -> String {
        format!(
            "{}  {}  {}  {:.4}  {:.4}  {}",
            self.cluster_distance, self.vertices, self.edges, self.minutes, self.avg_paths, self.max_paths
        )
    }
}

/// Lossy view of an exact rational, for display only.
pub fn rational_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}
