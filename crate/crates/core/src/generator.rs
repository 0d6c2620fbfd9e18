//! Seeded random instances.
//!
//! All randomness comes from ChaCha8 seeded with `seed_from_u64(seed)`, read
//! only through `next_u64`:
//!
//! * an index below `n` is `(x * n) >> 64` for a fresh 64-bit draw `x`;
//! * a uniform real in `[0, 1)` is `(x >> 11) * 2^-53`;
//! * a weight is `lo + u * (hi - lo)` rounded to the nearest fixed-point unit,
//!   then clamped into `[lo, hi]` and to at least one unit.
//!
//! The same `(sizes, seed, range, scale)` therefore rebuilds the same graph
//! on any platform.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::{check_scale, pow10, ColourId, ColouredGraph, GraphBuilder, Weight, DEFAULT_SCALE};
use crate::ingest::{JunctionLayer, Link};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightRange {
    pub lo: f64,
    pub hi: f64,
}

impl Default for WeightRange {
    fn default() -> Self {
        WeightRange { lo: 1.0, hi: 100.0 }
    }
}

impl WeightRange {
    fn validate(&self) -> Result<()> {
        if !(self.lo > 0.0 && self.lo < self.hi && self.hi.is_finite()) {
            return Err(Error::usage(format!(
                "weight range needs 0 < lo < hi, got [{}, {}]",
                self.lo, self.hi
            )));
        }
        Ok(())
    }
}

struct Draws {
    rng: ChaCha8Rng,
}

impl Draws {
    fn new(seed: u64) -> Self {
        Draws {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    fn index(&mut self, n: usize) -> usize {
        ((self.rng.next_u64() as u128 * n as u128) >> 64) as usize
    }

    fn unit(&mut self) -> f64 {
        (self.rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }
}

struct Quantizer {
    lo: f64,
    hi: f64,
    base: f64,
    min_units: u64,
    max_units: u64,
}

impl Quantizer {
    fn new(range: WeightRange, scale: u32) -> Result<Self> {
        range.validate()?;
        check_scale(scale)?;
        let base = pow10(scale) as f64;
        let min_units = ((range.lo * base).ceil() as u64).max(1);
        let max_units = (range.hi * base).floor() as u64;
        if max_units < min_units {
            return Err(Error::usage(format!(
                "weight range [{}, {}] holds no value at scale {scale}",
                range.lo, range.hi
            )));
        }
        Ok(Quantizer {
            lo: range.lo,
            hi: range.hi,
            base,
            min_units,
            max_units,
        })
    }

    fn draw(&self, d: &mut Draws) -> Weight {
        let x = self.lo + d.unit() * (self.hi - self.lo);
        let units = (x * self.base).round() as u64;
        Weight(units.clamp(self.min_units, self.max_units))
    }
}

/// Complete multigraph: one edge per ordered vertex pair per colour,
/// `k * n * (n - 1)` edges. Edges are emitted by source, then target, then colour.
pub fn complete_multigraph(
    n: usize,
    k: usize,
    seed: u64,
    range: WeightRange,
    scale: u32,
) -> Result<ColouredGraph> {
    if n < 2 || k < 1 {
        return Err(Error::usage("complete multigraph needs n >= 2 and k >= 1"));
    }
    let q = Quantizer::new(range, scale)?;
    let mut d = Draws::new(seed);
    let mut b = GraphBuilder::with_colours(n, k).scale(scale);
    for u in 0..n {
        for v in (0..n).filter(|&v| v != u) {
            for c in 0..k {
                b.add_edge(u, v, ColourId(c as u16), q.draw(&mut d))?;
            }
        }
    }
    b.build()
}

/// `m` edges with uniformly drawn endpoints, colour and weight. Self-loops are redrawn.
pub fn random_sparse(
    n: usize,
    k: usize,
    m: usize,
    seed: u64,
    range: WeightRange,
    scale: u32,
) -> Result<ColouredGraph> {
    if k < 1 {
        return Err(Error::usage("need at least one colour"));
    }
    if m > 0 && n < 2 {
        return Err(Error::usage("edges need at least two vertices"));
    }
    let q = Quantizer::new(range, scale)?;
    let mut d = Draws::new(seed);
    let mut b = GraphBuilder::with_colours(n, k).scale(scale);
    for _ in 0..m {
        let (from, to) = loop {
            let from = d.index(n);
            let to = d.index(n);
            if from != to {
                break (from, to);
            }
        };
        let colour = ColourId(d.index(k) as u16);
        b.add_edge(from, to, colour, q.draw(&mut d))?;
    }
    b.build()
}

/// Default-range complete multigraph at the default scale.
pub fn complete_default(n: usize, k: usize, seed: u64) -> Result<ColouredGraph> {
    complete_multigraph(n, k, seed, WeightRange::default(), DEFAULT_SCALE)
}

/// Synthetic per-mode networks for clustering experiments.
///
/// Layer `i` places `sizes[i]` junctions on a jittered square lattice covering
/// `[0, extent]^2` and links lattice neighbours (right and down) with
/// undirected links whose length is the Euclidean distance, written with six
/// decimals. Lattice spacing shrinks as the junction count grows.
pub fn synthetic_layers(sizes: &[usize], extent: f64, seed: u64) -> Result<Vec<JunctionLayer>> {
    if !(extent > 0.0) {
        return Err(Error::usage("extent must be positive"));
    }
    let mut d = Draws::new(seed);
    let mut layers = Vec::with_capacity(sizes.len());
    for (li, &count) in sizes.iter().enumerate() {
        let side = (count as f64).sqrt().ceil().max(1.0) as usize;
        let spacing = extent / side as f64;
        let mut layer = JunctionLayer::new(format!("mode{li}"));
        let mut coords = Vec::with_capacity(count);
        for id in 0..count {
            let (r, c) = (id / side, id % side);
            let x = (c as f64 + 0.5 + 0.4 * (d.unit() - 0.5)) * spacing;
            let y = (r as f64 + 0.5 + 0.4 * (d.unit() - 0.5)) * spacing;
            coords.push((x, y));
            layer.add_junction(id as u64, x, y)?;
        }
        for id in 0..count {
            let (r, c) = (id / side, id % side);
            let mut neighbours = Vec::with_capacity(2);
            if c + 1 < side && id + 1 < count {
                neighbours.push(id + 1);
            }
            if (r + 1) * side + c < count {
                neighbours.push(id + side);
            }
            for nb in neighbours {
                let (dx, dy) = (coords[nb].0 - coords[id].0, coords[nb].1 - coords[id].1);
                let length = format!("{:.6}", dx.hypot(dy));
                layer.links.push(Link {
                    from: id as u64,
                    to: nb as u64,
                    length,
                    directed: false,
                });
            }
        }
        layers.push(layer);
    }
    Ok(layers)
}
