//! Single-source Pareto-optimal shortest paths (multimodal Dijkstra).
//!
//! Labels are dequeued in order of a linear extension of the componentwise
//! order: total weight, then lexicographic weight, then insertion sequence.
//! Because every edge weight is positive, a dequeued label can never be
//! dominated by a later one, so it is final.

use std::cmp::{Ordering, Reverse};
use std::collections::BinaryHeap;
use std::sync::Arc;
use std::time::{Duration, Instant};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{
    AugmentedGraph, ColouredGraph, EdgeId, PathLabel, VertexId, Weight, WeightVector,
};
use crate::oracle;

#[derive(Debug, Clone, Default)]
pub struct SolveOptions {
    /// Keep every path of a Pareto-optimal weight vector instead of one representative.
    pub keep_ties: bool,
    /// Selects the reported set; does not change the search.
    pub target: Option<VertexId>,
    /// Refuse once queued plus finalized labels exceed this many.
    pub max_labels: Option<u64>,
    /// Refuse once the search has run this long.
    pub time_budget: Option<Duration>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct SolveStats {
    /// Labels dequeued and finalized.
    pub processed: u64,
    /// Extended labels created, whether or not they were enqueued.
    pub relaxations: u64,
    /// Queued labels removed because a new label dominated them.
    pub evictions: u64,
    pub peak_queue: u64,
    #[serde(skip)]
    pub elapsed: Duration,
}

/// Finalized Pareto-optimal labels at one vertex, in finalization order.
#[derive(Debug, Clone, Default)]
pub struct ParetoSet {
    labels: Vec<Arc<PathLabel>>,
}

impl ParetoSet {
    pub fn labels(&self) -> &[Arc<PathLabel>] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn weights(&self) -> Vec<WeightVector> {
        self.labels.iter().map(|l| l.weight().clone()).collect()
    }
}

/// One reported Pareto entry.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ParetoRow {
    pub dest: VertexId,
    pub weight: WeightVector,
    pub path: Vec<EdgeId>,
}

#[derive(Debug)]
pub struct Solution {
    pub source: VertexId,
    pub target: Option<VertexId>,
    pub sets: Vec<ParetoSet>,
    pub stats: SolveStats,
}

impl Solution {
    pub fn set(&self, v: VertexId) -> &ParetoSet {
        &self.sets[v]
    }

    /// The target's set when a target was requested.
    pub fn target_set(&self) -> Option<&ParetoSet> {
        self.target.map(|t| &self.sets[t])
    }

    /// Rows for the target (or every vertex), sorted by destination then weight.
    pub fn rows(&self) -> Vec<ParetoRow> {
        let dests: Vec<VertexId> = match self.target {
            Some(t) => vec![t],
            None => (0..self.sets.len()).collect(),
        };
        let mut rows: Vec<ParetoRow> = dests
            .into_iter()
            .flat_map(|d| {
                self.sets[d].labels.iter().map(move |l| ParetoRow {
                    dest: d,
                    weight: l.weight().clone(),
                    path: l.edges(),
                })
            })
            .collect();
        sort_rows(&mut rows);
        rows
    }
}

pub fn sort_rows(rows: &mut [ParetoRow]) {
    rows.sort_by(|a, b| {
        (a.dest, &a.weight, &a.path).cmp(&(b.dest, &b.weight, &b.path))
    });
}

/// Edge sequence from the source to the label's vertex.
pub fn reconstruct(label: &PathLabel) -> Vec<EdgeId> {
    label.edges()
}

struct Queued {
    total: u128,
    label: Arc<PathLabel>,
    seq: u64,
    slot: usize,
}

impl PartialEq for Queued {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Queued {}

impl PartialOrd for Queued {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Queued {
    fn cmp(&self, other: &Self) -> Ordering {
        self.total
            .cmp(&other.total)
            .then_with(|| self.label.weight().cmp(other.label.weight()))
            .then_with(|| self.seq.cmp(&other.seq))
    }
}

struct Slot {
    seq: u64,
    label: Arc<PathLabel>,
    visited: Box<[u64]>,
}

/// Priority queue of path labels with O(labels at u) eviction.
///
/// Evicted labels stay in the heap and are skipped when they surface; the
/// slot table and per-vertex index hold only live labels.
struct FrontierQueue {
    heap: BinaryHeap<Reverse<Queued>>,
    slots: Vec<Option<Slot>>,
    free: Vec<usize>,
    at_vertex: Vec<Vec<usize>>,
    // weights of the labels in `at_vertex`, `k` components each, same order
    at_weights: Vec<Vec<Weight>>,
    k: usize,
    live: usize,
    next_seq: u64,
}

impl FrontierQueue {
    fn new(n: usize, k: usize) -> Self {
        FrontierQueue {
            heap: BinaryHeap::new(),
            slots: Vec::new(),
            free: Vec::new(),
            at_vertex: vec![Vec::new(); n],
            at_weights: vec![Vec::new(); n],
            k,
            live: 0,
            next_seq: 0,
        }
    }

    fn push(&mut self, label: Arc<PathLabel>, visited: Box<[u64]>) {
        let seq = self.next_seq;
        self.next_seq += 1;
        let entry = Slot {
            seq,
            label: Arc::clone(&label),
            visited,
        };
        let slot = match self.free.pop() {
            Some(s) => {
                self.slots[s] = Some(entry);
                s
            }
            None => {
                self.slots.push(Some(entry));
                self.slots.len() - 1
            }
        };
        self.at_vertex[label.vertex()].push(slot);
        self.at_weights[label.vertex()].extend_from_slice(label.weight().components());
        self.live += 1;
        self.heap.push(Reverse(Queued {
            total: label.weight().total(),
            label,
            seq,
            slot,
        }));
    }

    fn pop(&mut self) -> Option<Slot> {
        while let Some(Reverse(q)) = self.heap.pop() {
            let live = matches!(&self.slots[q.slot], Some(s) if s.seq == q.seq);
            if !live {
                continue;
            }
            let entry = self.slots[q.slot].take().expect("live slot");
            self.free.push(q.slot);
            let v = q.label.vertex();
            let pos = self.at_vertex[v].iter().position(|&s| s == q.slot).expect("indexed slot");
            self.remove_at(v, pos);
            self.live -= 1;
            return Some(entry);
        }
        None
    }

    /// Swap-removes entry `pos` of vertex `v`'s index.
    fn remove_at(&mut self, v: VertexId, pos: usize) {
        let k = self.k;
        let last = self.at_vertex[v].len() - 1;
        self.at_vertex[v].swap_remove(pos);
        let w = &mut self.at_weights[v];
        if pos != last {
            w.copy_within(last * k..(last + 1) * k, pos * k);
        }
        w.truncate(last * k);
    }

    fn weights_at(&self, v: VertexId) -> &[Weight] {
        &self.at_weights[v]
    }

    /// Removes queued labels at `v` whose weight is strictly greater than `w`.
    fn evict_dominated(&mut self, v: VertexId, w: &[Weight]) -> u64 {
        let k = self.k;
        let mut evicted = 0;
        for i in (0..self.at_vertex[v].len()).rev() {
            let other = &self.at_weights[v][i * k..(i + 1) * k];
            if strictly_less(w, other) {
                let s = self.at_vertex[v][i];
                self.slots[s] = None;
                self.free.push(s);
                self.remove_at(v, i);
                evicted += 1;
            }
        }
        self.live -= evicted as usize;
        evicted
    }
}

#[inline]
fn weakly_le(a: &[Weight], b: &[Weight]) -> bool {
    a.iter().zip(b).all(|(x, y)| x <= y)
}

#[inline]
fn strictly_less(a: &[Weight], b: &[Weight]) -> bool {
    weakly_le(a, b) && a != b
}

/// Does an existing label block `candidate` from entering the queue?
#[inline]
fn blocks(existing: &[Weight], candidate: &[Weight], keep_ties: bool) -> bool {
    if keep_ties {
        strictly_less(existing, candidate)
    } else {
        weakly_le(existing, candidate)
    }
}

/// True when some `k`-component chunk of `pool` blocks `candidate`.
#[inline]
fn any_blocks(pool: &[Weight], candidate: &[Weight], keep_ties: bool) -> bool {
    pool.chunks_exact(candidate.len())
        .any(|w| blocks(w, candidate, keep_ties))
}

/// Computes the Pareto set of simple paths from `source` to every vertex.
pub fn solve(g: &ColouredGraph, source: VertexId, opts: &SolveOptions) -> Result<Solution> {
    g.check_vertex(source)?;
    if let Some(t) = opts.target {
        g.check_vertex(t)?;
    }
    let start = Instant::now();
    let n = g.vertex_count();
    let words = n.div_ceil(64);
    let k = g.colour_count();
    let mut finalized: Vec<Vec<Arc<PathLabel>>> = vec![Vec::new(); n];
    let mut finalized_weights: Vec<Vec<Weight>> = vec![Vec::new(); n];
    let mut finalized_count: u64 = 0;
    let mut queue = FrontierQueue::new(n, k);
    let mut candidate: Vec<Weight> = Vec::with_capacity(k);
    let mut stats = SolveStats::default();

    let mut visited = vec![0u64; words].into_boxed_slice();
    visited[source / 64] |= 1 << (source % 64);
    queue.push(PathLabel::empty(source, g.colour_count()), visited);
    stats.peak_queue = 1;

    while let Some(Slot { label, visited, .. }) = queue.pop() {
        let v = label.vertex();
        finalized_weights[v].extend_from_slice(label.weight().components());
        finalized[v].push(Arc::clone(&label));
        finalized_count += 1;
        stats.processed += 1;

        if stats.processed % 1024 == 0 {
            if let Some(budget) = opts.time_budget {
                if start.elapsed() > budget {
                    return Err(Error::ResourceCeiling {
                        what: "solver wall-time budget (ms)",
                        limit: budget.as_millis() as u64,
                    });
                }
            }
        }

        for edge in g.out_edges(v) {
            let u = edge.to;
            if visited[u / 64] & (1 << (u % 64)) != 0 {
                continue;
            }
            stats.relaxations += 1;
            candidate.clear();
            candidate.extend_from_slice(label.weight().components());
            let c = edge.colour.index();
            candidate[c] = candidate[c].checked_add(edge.weight)?;
            if any_blocks(&finalized_weights[u], &candidate, opts.keep_ties)
                || any_blocks(queue.weights_at(u), &candidate, opts.keep_ties)
            {
                continue;
            }
            stats.evictions += queue.evict_dominated(u, &candidate);
            let extended = crate::graph::extend(&label, edge)?;
            debug_assert_eq!(extended.weight().components(), &candidate[..]);
            let mut next_visited = visited.clone();
            next_visited[u / 64] |= 1 << (u % 64);
            queue.push(extended, next_visited);
            stats.peak_queue = stats.peak_queue.max(queue.live as u64);

            if let Some(limit) = opts.max_labels {
                if queue.live as u64 + finalized_count > limit {
                    return Err(Error::ResourceCeiling {
                        what: "labels in flight",
                        limit,
                    });
                }
            }
        }
    }
    stats.elapsed = start.elapsed();

    Ok(Solution {
        source,
        target: opts.target,
        sets: finalized
            .into_iter()
            .map(|labels| ParetoSet { labels })
            .collect(),
        stats,
    })
}

/// Solution of an augmented graph projected back onto the original vertices.
#[derive(Debug)]
pub struct ProjectedSolution {
    pub source: VertexId,
    pub target: Option<VertexId>,
    /// Per original vertex, Pareto rows with original edge ids.
    pub sets: Vec<Vec<ParetoRow>>,
    pub stats: SolveStats,
}

impl ProjectedSolution {
    pub fn rows(&self) -> Vec<ParetoRow> {
        let mut rows: Vec<ParetoRow> = match self.target {
            Some(t) => self.sets[t].clone(),
            None => self.sets.iter().flatten().cloned().collect(),
        };
        sort_rows(&mut rows);
        rows
    }
}

/// Solves on an augmented graph and merges each original vertex's group of
/// expanded vertices into one Pareto set.
pub fn solve_augmented(
    aug: &AugmentedGraph,
    source: VertexId,
    opts: &SolveOptions,
) -> Result<ProjectedSolution> {
    let original_n = aug.vertex_groups.len();
    if source >= original_n {
        return Err(Error::usage(format!("vertex {source} out of range")));
    }
    if let Some(t) = opts.target {
        if t >= original_n {
            return Err(Error::usage(format!("vertex {t} out of range")));
        }
    }
    let inner = SolveOptions {
        target: None,
        ..opts.clone()
    };
    let sol = solve(&aug.graph, aug.source_vertex(source), &inner)?;
    let sets = aug
        .vertex_groups
        .iter()
        .enumerate()
        .map(|(dest, group)| {
            let entries: Vec<(Vec<EdgeId>, WeightVector)> = group
                .iter()
                .flat_map(|&x| sol.sets[x].labels.iter())
                .map(|l| (aug.original_edges(&l.edges()), l.weight().clone()))
                .collect();
            oracle::pareto_filter(entries, opts.keep_ties)
                .into_iter()
                .map(|(path, weight)| ParetoRow { dest, weight, path })
                .collect()
        })
        .collect();
    Ok(ProjectedSolution {
        source,
        target: opts.target,
        sets,
        stats: sol.stats,
    })
}
