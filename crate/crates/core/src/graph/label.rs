use std::sync::Arc;

use super::{Edge, EdgeId, VertexId, WeightVector};
use crate::error::{Error, Result};

/// A path from the source under construction.
///
/// Labels share their prefixes through parent links; the edge sequence is only
/// materialized by [`PathLabel::edges`].
#[derive(Debug)]
pub struct PathLabel {
    vertex: VertexId,
    weight: WeightVector,
    edge: Option<EdgeId>,
    parent: Option<Arc<PathLabel>>,
    hops: usize,
}

impl PathLabel {
    /// The empty path at `source` with the all-zero weight.
    pub fn empty(source: VertexId, colours: usize) -> Arc<PathLabel> {
        Arc::new(PathLabel {
            vertex: source,
            weight: WeightVector::zeros(colours),
            edge: None,
            parent: None,
            hops: 0,
        })
    }

    pub fn vertex(&self) -> VertexId {
        self.vertex
    }

    pub fn weight(&self) -> &WeightVector {
        &self.weight
    }

    pub fn last_edge(&self) -> Option<EdgeId> {
        self.edge
    }

    pub fn parent(&self) -> Option<&Arc<PathLabel>> {
        self.parent.as_ref()
    }

    /// Number of edges on the path.
    pub fn hop_count(&self) -> usize {
        self.hops
    }

    fn ancestors(&self) -> impl Iterator<Item = &PathLabel> {
        std::iter::successors(Some(self), |l| l.parent.as_deref())
    }

    pub fn source(&self) -> VertexId {
        self.ancestors().last().map_or(self.vertex, |l| l.vertex)
    }

    /// Whether `v` lies on the path. Walks the parent chain.
    pub fn visits(&self, v: VertexId) -> bool {
        self.ancestors().any(|l| l.vertex == v)
    }

    /// Edge ids from the source to this label's vertex.
    pub fn edges(&self) -> Vec<EdgeId> {
        let mut out: Vec<EdgeId> = self.ancestors().filter_map(|l| l.edge).collect();
        out.reverse();
        out
    }

    /// Vertices from the source to this label's vertex.
    pub fn vertices(&self) -> Vec<VertexId> {
        let mut out: Vec<VertexId> = self.ancestors().map(|l| l.vertex).collect();
        out.reverse();
        out
    }
}

impl Drop for PathLabel {
    // Unlink long parent chains iteratively so deep paths cannot overflow the stack.
    fn drop(&mut self) {
        let mut next = self.parent.take();
        while let Some(parent) = next {
            match Arc::try_unwrap(parent) {
                Ok(mut inner) => next = inner.parent.take(),
                Err(_) => break,
            }
        }
    }
}

/// Extends `label` by `edge`. The caller is responsible for keeping the path
/// simple (see [`PathLabel::visits`]).
pub fn extend(label: &Arc<PathLabel>, edge: &Edge) -> Result<Arc<PathLabel>> {
    if edge.from != label.vertex {
        return Err(Error::usage(format!(
            "edge {} starts at {} but the path ends at {}",
            edge.id, edge.from, label.vertex
        )));
    }
    let weight = label.weight.add_to_colour(edge.colour, edge.weight)?;
    Ok(Arc::new(PathLabel {
        vertex: edge.to,
        weight,
        edge: Some(edge.id),
        parent: Some(Arc::clone(label)),
        hops: label.hops + 1,
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{ColourId, GraphBuilder, Weight};

    #[test]
    fn extend_examples() {
        let names = ["bus", "metro", "private", "transfer"].map(String::from).to_vec();
        let mut b = GraphBuilder::new(4, names).scale(0);
        b.add_edge(0, 1, ColourId(0), Weight(15)).unwrap();
        b.add_edge(0, 3, ColourId(2), Weight(5)).unwrap();
        b.add_edge(1, 3, ColourId(3), Weight(4)).unwrap();
        let g = b.build().unwrap();

        let root = PathLabel::empty(0, 4);
        let p01 = extend(&root, g.edge(0)).unwrap();
        assert_eq!(p01.vertex(), 1);
        assert_eq!(p01.weight(), &WeightVector::from_units(&[15, 0, 0, 0]));
        let p03 = extend(&root, g.edge(1)).unwrap();
        assert_eq!(p03.weight(), &WeightVector::from_units(&[0, 0, 5, 0]));

        let p013 = extend(&p01, g.edge(2)).unwrap();
        assert_eq!(p013.edges(), vec![0, 2]);
        assert_eq!(p013.vertices(), vec![0, 1, 3]);
        assert_eq!(p013.hop_count(), 2);
        assert_eq!(p013.source(), 0);
        assert!(p013.visits(1));
        assert!(!p013.visits(2));
        assert_eq!(&g.path_weight(&p013.edges()).unwrap(), p013.weight());

        assert!(matches!(extend(&p03, g.edge(0)), Err(Error::Usage(_))));
    }

    #[test]
    fn deep_chain_drops() {
        let mut b = GraphBuilder::with_colours(2, 1);
        b.add_edge(0, 1, ColourId(0), Weight(1)).unwrap();
        b.add_edge(1, 0, ColourId(0), Weight(1)).unwrap();
        let g = b.build().unwrap();
        let mut l = PathLabel::empty(0, 1);
        for i in 0..200_000 {
            l = extend(&l, g.edge(i % 2)).unwrap();
        }
        assert_eq!(l.hop_count(), 200_000);
        drop(l);
    }
}
