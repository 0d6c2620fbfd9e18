//! Brute-force ground truth: exhaustive simple-path enumeration, Pareto
//! filtering and the closed-form path count of complete multigraphs.
//!
//! Nothing here prunes. Enumeration is depth-first from the source with
//! outgoing edges taken in edge-id order, and paths are reported in the order
//! the search first reaches their end vertex.

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::graph::{ColouredGraph, EdgeId, VertexId, WeightVector};

pub const DEFAULT_CEILING: u64 = 10_000_000;

pub type PathEntry = (Vec<EdgeId>, WeightVector);

/// `sum_{j=0}^{n-2} C(n-2, j) * k^(j+1) * j!`, the number of simple paths
/// between two distinct vertices of a complete multigraph.
pub fn complete_multigraph_path_count(n: u64, k: u64) -> Result<BigUint> {
    if n < 2 || k < 1 {
        return Err(Error::usage("path count needs n >= 2 and k >= 1"));
    }
    let m = n - 2;
    let k = BigUint::from(k);
    let mut total = BigUint::zero();
    let mut binom = BigUint::one(); // C(m, j)
    let mut fact = BigUint::one(); // j!
    let mut kpow = k.clone(); // k^(j+1)
    for j in 0..=m {
        if j > 0 {
            binom = binom * BigUint::from(m - j + 1) / BigUint::from(j);
            fact *= BigUint::from(j);
            kpow *= &k;
        }
        total += &binom * &kpow * &fact;
    }
    Ok(total)
}

/// Upper bound on simple paths between any two vertices of `g`: the complete
/// multigraph count with `k` = the largest number of parallel edges.
pub fn simple_path_bound(g: &ColouredGraph) -> BigUint {
    let n = g.vertex_count() as u64;
    if n < 2 {
        return BigUint::one();
    }
    let mut pairs = std::collections::HashMap::new();
    let mut mult = 1u64;
    for e in g.edges() {
        let c = pairs.entry((e.from, e.to)).or_insert(0u64);
        *c += 1;
        mult = mult.max(*c);
    }
    complete_multigraph_path_count(n, mult).expect("n >= 2")
}

fn check_ceiling(g: &ColouredGraph, ceiling: Option<u64>) -> Result<()> {
    if let Some(ceiling) = ceiling {
        let bound = simple_path_bound(g);
        if bound.to_u64().is_none_or(|b| b > ceiling) {
            return Err(Error::EnumerationCeiling { bound, ceiling });
        }
    }
    Ok(())
}

fn dfs(
    g: &ColouredGraph,
    v: VertexId,
    on_path: &mut [bool],
    edges: &mut Vec<EdgeId>,
    weight: &WeightVector,
    out: &mut Vec<Vec<PathEntry>>,
) -> Result<()> {
    out[v].push((edges.clone(), weight.clone()));
    for e in g.out_edges(v) {
        if on_path[e.to] {
            continue;
        }
        let w = weight.add_to_colour(e.colour, e.weight)?;
        on_path[e.to] = true;
        edges.push(e.id);
        dfs(g, e.to, on_path, edges, &w, out)?;
        edges.pop();
        on_path[e.to] = false;
    }
    Ok(())
}

/// Every simple path from `source` to every vertex, grouped by end vertex.
/// `ceiling = None` disables the size guard.
pub fn enumerate_all_simple_paths(
    g: &ColouredGraph,
    source: VertexId,
    ceiling: Option<u64>,
) -> Result<Vec<Vec<PathEntry>>> {
    g.check_vertex(source)?;
    check_ceiling(g, ceiling)?;
    let mut out = vec![Vec::new(); g.vertex_count()];
    let mut on_path = vec![false; g.vertex_count()];
    on_path[source] = true;
    dfs(
        g,
        source,
        &mut on_path,
        &mut Vec::new(),
        &WeightVector::zeros(g.colour_count()),
        &mut out,
    )?;
    Ok(out)
}

/// Every simple `u -> v` path with its weight vector.
pub fn enumerate_simple_paths(
    g: &ColouredGraph,
    u: VertexId,
    v: VertexId,
    ceiling: Option<u64>,
) -> Result<Vec<PathEntry>> {
    g.check_vertex(v)?;
    if u == v {
        g.check_vertex(u)?;
        return Ok(vec![(Vec::new(), WeightVector::zeros(g.colour_count()))]);
    }
    let mut all = enumerate_all_simple_paths(g, u, ceiling)?;
    Ok(std::mem::take(&mut all[v]))
}

/// Keeps entries whose vector no other distinct vector dominates. Without
/// `keep_ties` only the first entry of each surviving vector is kept. Input
/// order is preserved.
pub fn pareto_filter<P>(entries: Vec<(P, WeightVector)>, keep_ties: bool) -> Vec<(P, WeightVector)> {
    // A dominating vector has a strictly smaller total, so checking each entry
    // against the survivors before it in (total, lexicographic) order suffices.
    let mut order: Vec<usize> = (0..entries.len()).collect();
    order.sort_by(|&a, &b| {
        let (wa, wb) = (&entries[a].1, &entries[b].1);
        (wa.total(), wa).cmp(&(wb.total(), wb)).then(a.cmp(&b))
    });
    let mut survivors: Vec<usize> = Vec::new();
    let mut keep = vec![false; entries.len()];
    for i in order {
        let w = &entries[i].1;
        let mut reject = false;
        for &s in &survivors {
            let sw = &entries[s].1;
            if sw == w {
                reject = !keep_ties;
            } else if sw.weakly_dominates(w) {
                reject = true;
            }
            if reject {
                break;
            }
        }
        if !reject {
            survivors.push(i);
            keep[i] = true;
        }
    }
    entries
        .into_iter()
        .zip(keep)
        .filter_map(|(e, k)| k.then_some(e))
        .collect()
}

/// Brute-force Pareto sets from `source` to every vertex.
pub fn pareto_sets(
    g: &ColouredGraph,
    source: VertexId,
    keep_ties: bool,
    ceiling: Option<u64>,
) -> Result<Vec<Vec<PathEntry>>> {
    Ok(enumerate_all_simple_paths(g, source, ceiling)?
        .into_iter()
        .map(|paths| pareto_filter(paths, keep_ties))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{ColourId, Dominance, GraphBuilder, Weight};

    fn complete(n: usize, k: usize) -> ColouredGraph {
        let mut b = GraphBuilder::with_colours(n, k).scale(0);
        for u in 0..n {
            for v in 0..n {
                if u != v {
                    for c in 0..k {
                        b.add_edge(u, v, ColourId(c as u16), Weight(1 + (u * 7 + v * 3 + c) as u64 % 5))
                            .unwrap();
                    }
                }
            }
        }
        b.build().unwrap()
    }

    #[test]
    fn closed_form_values() {
        let c = |n, k| complete_multigraph_path_count(n, k).unwrap();
        assert_eq!(c(2, 3), BigUint::from(3u32));
        assert_eq!(c(3, 2), BigUint::from(6u32));
        assert_eq!(c(4, 2), BigUint::from(26u32));
        assert!(complete_multigraph_path_count(1, 2).is_err());
        assert!(complete_multigraph_path_count(3, 0).is_err());
        // grows past 64 bits
        assert!(c(25, 2).to_u64().is_none());
    }

    #[test]
    fn enumeration_counts() {
        assert_eq!(enumerate_simple_paths(&complete(3, 2), 0, 2, None).unwrap().len(), 6);
        assert_eq!(enumerate_simple_paths(&complete(4, 2), 1, 3, None).unwrap().len(), 26);
        let same = enumerate_simple_paths(&complete(4, 2), 2, 2, None).unwrap();
        assert_eq!(same, vec![(vec![], WeightVector::zeros(2))]);
    }

    #[test]
    fn ceiling_refuses() {
        let err = enumerate_simple_paths(&complete(6, 3), 0, 1, Some(1000)).unwrap_err();
        match err {
            Error::EnumerationCeiling { bound, ceiling } => {
                assert_eq!(ceiling, 1000);
                assert_eq!(bound, complete_multigraph_path_count(6, 3).unwrap());
            }
            e => panic!("unexpected {e}"),
        }
    }

    #[test]
    fn filter_examples() {
        let wv = |v: &[u64]| WeightVector::from_units(v);
        let out = pareto_filter(
            vec![("a", wv(&[1, 2])), ("b", wv(&[2, 1])), ("c", wv(&[2, 2]))],
            false,
        );
        assert_eq!(out, vec![("a", wv(&[1, 2])), ("b", wv(&[2, 1]))]);
        assert_eq!(pareto_filter(vec![("x", wv(&[4]))], false).len(), 1);

        let ties = vec![("p", wv(&[1, 1])), ("q", wv(&[1, 1])), ("r", wv(&[0, 3]))];
        assert_eq!(pareto_filter(ties.clone(), false).len(), 2);
        let kept = pareto_filter(ties, true);
        assert_eq!(kept.len(), 3);
        for (i, a) in kept.iter().enumerate() {
            for b in &kept[i + 1..] {
                let d = a.1.dominance(&b.1);
                assert!(d == Dominance::Incomparable || d == Dominance::Equal);
            }
        }
    }
}
