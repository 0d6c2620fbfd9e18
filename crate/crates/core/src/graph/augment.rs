use std::collections::BTreeSet;

use super::{pow10, ColourId, ColouredGraph, EdgeId, GraphBuilder, VertexId, Weight};
use crate::error::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CountMode {
    /// One unit per edge traversed.
    Hops,
    /// One unit per change of colour at an intermediate vertex.
    Transfers,
}

/// A graph with an extra counting colour, plus the maps back to the original.
#[derive(Debug, Clone)]
pub struct AugmentedGraph {
    pub graph: ColouredGraph,
    pub mode: CountMode,
    /// For each original vertex, the expanded vertices that stand for it.
    /// The first entry is the vertex to start a search from.
    pub vertex_groups: Vec<Vec<VertexId>>,
    /// Original edge of each expanded edge; `None` for counting edges.
    pub edge_origin: Vec<Option<EdgeId>>,
}

impl AugmentedGraph {
    pub fn source_vertex(&self, original: VertexId) -> VertexId {
        self.vertex_groups[original][0]
    }

    /// Maps an expanded edge sequence back to original edge ids.
    pub fn original_edges(&self, path: &[EdgeId]) -> Vec<EdgeId> {
        path.iter().filter_map(|&e| self.edge_origin[e]).collect()
    }
}

/// Adds a colour `k` that counts hops or transfers, expressed structurally so
/// the unchanged solver accumulates it.
///
/// * `Hops`: each edge `u -> v` becomes `u -> x -> v` through a fresh vertex
///   `x`, the second leg carrying one unit of colour `k`.
/// * `Transfers`: every vertex `v` keeps its id as a departure-only port and
///   gains one sub-vertex per incident colour. Edges of colour `c` enter the
///   `c` sub-vertex of their head; a unit colour-`k` edge joins sub-vertices of
///   `v` whose colours differ. Arrivals at `v` are spread over its sub-vertices.
pub fn augment_with_count_colour(g: &ColouredGraph, mode: CountMode) -> Result<AugmentedGraph> {
    let mut names = g.colour_names().to_vec();
    names.push(
        match mode {
            CountMode::Hops => "hops",
            CountMode::Transfers => "transfers",
        }
        .to_string(),
    );
    let counter = ColourId(g.colour_count() as u16);
    let unit = Weight(pow10(g.scale()));
    let n = g.vertex_count();

    match mode {
        CountMode::Hops => {
            let mut b = GraphBuilder::new(n + g.edge_count(), names).scale(g.scale());
            let mut origin = Vec::with_capacity(2 * g.edge_count());
            for e in g.edges() {
                let mid = n + e.id;
                b.add_edge(e.from, mid, e.colour, e.weight)?;
                b.add_edge(mid, e.to, counter, unit)?;
                origin.push(Some(e.id));
                origin.push(None);
            }
            Ok(AugmentedGraph {
                graph: b.build()?,
                mode,
                vertex_groups: (0..n).map(|v| vec![v]).collect(),
                edge_origin: origin,
            })
        }
        CountMode::Transfers => {
            let mut in_colours = vec![BTreeSet::new(); n];
            let mut out_colours = vec![BTreeSet::new(); n];
            for e in g.edges() {
                in_colours[e.to].insert(e.colour);
                out_colours[e.from].insert(e.colour);
            }
            // sub-vertex ids, dense after the ports, ordered by (vertex, colour)
            let mut sub: Vec<Vec<(ColourId, VertexId)>> = vec![Vec::new(); n];
            let mut next = n;
            for v in 0..n {
                let colours: BTreeSet<ColourId> =
                    in_colours[v].union(&out_colours[v]).copied().collect();
                for c in colours {
                    sub[v].push((c, next));
                    next += 1;
                }
            }
            let sub_of = |v: VertexId, c: ColourId| -> VertexId {
                let s = &sub[v];
                s[s.binary_search_by_key(&c, |&(cc, _)| cc).expect("incident colour")].1
            };

            let mut b = GraphBuilder::new(next, names).scale(g.scale());
            let mut origin = Vec::new();
            for e in g.edges() {
                let head = sub_of(e.to, e.colour);
                b.add_edge(e.from, head, e.colour, e.weight)?;
                b.add_edge(sub_of(e.from, e.colour), head, e.colour, e.weight)?;
                origin.push(Some(e.id));
                origin.push(Some(e.id));
            }
            for v in 0..n {
                for &arrive in &in_colours[v] {
                    for &depart in &out_colours[v] {
                        if arrive != depart {
                            b.add_edge(sub_of(v, arrive), sub_of(v, depart), counter, unit)?;
                            origin.push(None);
                        }
                    }
                }
            }
            let vertex_groups = (0..n)
                .map(|v| {
                    std::iter::once(v)
                        .chain(sub[v].iter().map(|&(_, s)| s))
                        .collect()
                })
                .collect();
            Ok(AugmentedGraph {
                graph: b.build()?,
                mode,
                vertex_groups,
                edge_origin: origin,
            })
        }
    }
}
