//! Weighted coloured-edge graphs.
//!
//! A [`ColouredGraph`] is a directed multigraph in which every edge carries
//! one colour (a transport mode) and one strictly positive weight. The weight
//! of a path is the [`WeightVector`] of per-colour sums, and paths are compared
//! with the componentwise partial order ([`compare`]).

mod augment;
mod label;
mod weight;

pub use augment::{augment_with_count_colour, AugmentedGraph, CountMode};
pub use label::{extend, PathLabel};
pub use weight::{
    add, compare, format_decimal, parse_decimal, parse_decimal_rounded, ColourId, Dominance,
    Weight, WeightVector, DEFAULT_SCALE, MAX_SCALE,
};
pub(crate) use weight::{check_scale, pow10};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type VertexId = usize;
pub type EdgeId = usize;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Edge {
    pub id: EdgeId,
    pub from: VertexId,
    pub to: VertexId,
    pub colour: ColourId,
    pub weight: Weight,
}

/// Immutable coloured multigraph. Build one with [`GraphBuilder`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColouredGraph {
    n: usize,
    scale: u32,
    colour_names: Vec<String>,
    edges: Vec<Edge>,
    out: Vec<Vec<EdgeId>>,
}

impl ColouredGraph {
    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn colour_count(&self) -> usize {
        self.colour_names.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Decimal places of every weight in this graph.
    pub fn scale(&self) -> u32 {
        self.scale
    }

    pub fn colour_names(&self) -> &[String] {
        &self.colour_names
    }

    pub fn colour_by_name(&self, name: &str) -> Option<ColourId> {
        self.colour_names
            .iter()
            .position(|c| c == name)
            .map(|i| ColourId(i as u16))
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, id: EdgeId) -> &Edge {
        &self.edges[id]
    }

    /// Outgoing edges of `v` in edge-id order.
    pub fn out_edges(&self, v: VertexId) -> impl Iterator<Item = &Edge> + '_ {
        self.out[v].iter().map(move |&e| &self.edges[e])
    }

    pub fn out_degree(&self, v: VertexId) -> usize {
        self.out[v].len()
    }

    /// Weight vector of an edge sequence, each edge contributing to its own colour.
    pub fn path_weight(&self, path: &[EdgeId]) -> Result<WeightVector> {
        let mut w = WeightVector::zeros(self.colour_count());
        for &e in path {
            let edge = self
                .edges
                .get(e)
                .ok_or_else(|| Error::usage(format!("edge {e} out of range")))?;
            w = w.add_to_colour(edge.colour, edge.weight)?;
        }
        Ok(w)
    }

    /// Same graph with every weight of `colour` multiplied by `factor`.
    pub fn with_colour_scaled(&self, colour: ColourId, factor: u64) -> Result<ColouredGraph> {
        if factor == 0 {
            return Err(Error::usage("scaling factor must be positive"));
        }
        if colour.index() >= self.colour_count() {
            return Err(Error::usage(format!("colour {colour} out of range")));
        }
        let mut g = self.clone();
        for e in g.edges.iter_mut().filter(|e| e.colour == colour) {
            e.weight = Weight(e.weight.0.checked_mul(factor).ok_or(Error::Overflow)?);
        }
        Ok(g)
    }

    pub(crate) fn check_vertex(&self, v: VertexId) -> Result<()> {
        if v >= self.n {
            return Err(Error::usage(format!(
                "vertex {v} out of range for a graph with {} vertices",
                self.n
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct GraphBuilder {
    n: usize,
    scale: u32,
    colour_names: Vec<String>,
    edges: Vec<Edge>,
}

impl GraphBuilder {
    pub fn new(n: usize, colour_names: Vec<String>) -> Self {
        GraphBuilder {
            n,
            scale: DEFAULT_SCALE,
            colour_names,
            edges: Vec::new(),
        }
    }

    /// Builder with colours named `0`, `1`, ...
    pub fn with_colours(n: usize, k: usize) -> Self {
        Self::new(n, (0..k).map(|i| i.to_string()).collect())
    }

    pub fn scale(mut self, scale: u32) -> Self {
        self.scale = scale;
        self
    }

    pub fn scale_value(&self) -> u32 {
        self.scale
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    /// Adds an edge whose weight is given in fixed-point units. Returns its id.
    pub fn add_edge(
        &mut self,
        from: VertexId,
        to: VertexId,
        colour: ColourId,
        weight: Weight,
    ) -> Result<EdgeId> {
        if from >= self.n || to >= self.n {
            return Err(Error::usage(format!(
                "edge {from}->{to} has an endpoint outside 0..{}",
                self.n
            )));
        }
        if colour.index() >= self.colour_names.len() {
            return Err(Error::usage(format!(
                "edge colour {colour} outside 0..{}",
                self.colour_names.len()
            )));
        }
        if weight.0 == 0 {
            return Err(Error::usage(format!(
                "edge {from}->{to} has zero weight; edge weights must be positive"
            )));
        }
        let id = self.edges.len();
        self.edges.push(Edge {
            id,
            from,
            to,
            colour,
            weight,
        });
        Ok(id)
    }

    /// Adds an edge with a decimal weight such as `"12.5"`.
    pub fn add_edge_decimal(
        &mut self,
        from: VertexId,
        to: VertexId,
        colour: ColourId,
        weight: &str,
    ) -> Result<EdgeId> {
        let w = Weight::parse(weight, self.scale)?;
        self.add_edge(from, to, colour, w)
    }

    pub fn build(self) -> Result<ColouredGraph> {
        check_scale(self.scale)?;
        if self.colour_names.len() > u16::MAX as usize {
            return Err(Error::usage("too many colours"));
        }
        let mut out = vec![Vec::new(); self.n];
        for e in &self.edges {
            out[e.from].push(e.id);
        }
        Ok(ColouredGraph {
            n: self.n,
            scale: self.scale,
            colour_names: self.colour_names,
            edges: self.edges,
            out,
        })
    }
}
