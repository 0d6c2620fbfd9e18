//! Fusing per-mode junction networks into one coloured graph.
//!
//! Junctions of all modes are clustered by single linkage under planar
//! Euclidean distance on their raw coordinates: two junctions share a vertex
//! iff a chain of junctions, each within the threshold of the next, joins
//! them. Each layer's links then become edges of that layer's colour between
//! cluster vertices. Changing mode at a shared vertex costs nothing.
//!
//! Layer file format (`layer v1`):
//!
//! ```text
//! layer v1 mode=<name>
//! junction <id> <x> <y>
//! link <from> <to> <length> <directed:0|1>
//! ```

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::graph::{parse_decimal_rounded, ColourId, ColouredGraph, GraphBuilder, Weight};

#[derive(Debug, Clone, PartialEq)]
pub struct Junction {
    pub id: u64,
    pub x: f64,
    pub y: f64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Link {
    pub from: u64,
    pub to: u64,
    /// Decimal length, kept as text until it is fixed to a graph scale.
    pub length: String,
    pub directed: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct JunctionLayer {
    pub mode: String,
    pub junctions: Vec<Junction>,
    pub links: Vec<Link>,
}

impl JunctionLayer {
    pub fn new(mode: impl Into<String>) -> Self {
        JunctionLayer {
            mode: mode.into(),
            junctions: Vec::new(),
            links: Vec::new(),
        }
    }

    pub fn add_junction(&mut self, id: u64, x: f64, y: f64) -> Result<()> {
        if !(x.is_finite() && y.is_finite()) {
            return Err(Error::usage(format!("junction {id} has non-finite coordinates")));
        }
        self.junctions.push(Junction { id, x, y });
        Ok(())
    }

    pub fn add_link(&mut self, from: u64, to: u64, length: &str, directed: bool) {
        self.links.push(Link {
            from,
            to,
            length: length.to_string(),
            directed,
        });
    }

    fn index(&self) -> Result<HashMap<u64, usize>> {
        let mut idx = HashMap::with_capacity(self.junctions.len());
        for (i, j) in self.junctions.iter().enumerate() {
            if idx.insert(j.id, i).is_some() {
                return Err(Error::usage(format!(
                    "layer {}: duplicate junction id {}",
                    self.mode, j.id
                )));
            }
        }
        Ok(idx)
    }

    pub fn validate(&self) -> Result<()> {
        if self.mode.is_empty() || self.mode.contains(char::is_whitespace) {
            return Err(Error::usage(format!("invalid mode name `{}`", self.mode)));
        }
        let idx = self.index()?;
        for l in &self.links {
            for end in [l.from, l.to] {
                if !idx.contains_key(&end) {
                    return Err(Error::usage(format!(
                        "layer {}: link references unknown junction {end}",
                        self.mode
                    )));
                }
            }
            if parse_decimal_rounded(&l.length, crate::graph::MAX_SCALE)? == 0 {
                return Err(Error::usage(format!(
                    "layer {}: link {}->{} has non-positive length",
                    self.mode, l.from, l.to
                )));
            }
        }
        Ok(())
    }
}

pub fn parse_layer(text: &str) -> Result<JunctionLayer> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let (hline, header) = lines
        .next()
        .ok_or_else(|| Error::parse(1, "empty layer file"))?;
    let mut t = header.split_whitespace();
    if t.next() != Some("layer") || t.next() != Some("v1") {
        return Err(Error::parse(hline, "expected header `layer v1 mode=<name>`"));
    }
    let mode = t
        .next()
        .and_then(|m| m.strip_prefix("mode="))
        .filter(|m| !m.is_empty())
        .ok_or_else(|| Error::parse(hline, "expected `mode=<name>`"))?;
    let mut layer = JunctionLayer::new(mode);

    for (line, content) in lines {
        let tok: Vec<&str> = content.split_whitespace().collect();
        let bad = |what: &str| Error::parse(line, format!("invalid {what}"));
        match tok.as_slice() {
            ["junction", id, x, y] => {
                let id = id.parse().map_err(|_| bad("junction id"))?;
                let x: f64 = x.parse().map_err(|_| bad("x coordinate"))?;
                let y: f64 = y.parse().map_err(|_| bad("y coordinate"))?;
                layer
                    .add_junction(id, x, y)
                    .map_err(|e| Error::parse(line, e.to_string()))?;
            }
            ["link", from, to, length, directed] => {
                let from = from.parse().map_err(|_| bad("link source"))?;
                let to = to.parse().map_err(|_| bad("link target"))?;
                let directed = match *directed {
                    "0" => false,
                    "1" => true,
                    _ => return Err(bad("directed flag (0 or 1)")),
                };
                layer.add_link(from, to, length, directed);
            }
            _ => return Err(Error::parse(line, format!("unrecognized line `{content}`"))),
        }
    }
    layer.validate()?;
    Ok(layer)
}

pub fn write_layer(layer: &JunctionLayer) -> String {
    let mut out = format!("layer v1 mode={}\n", layer.mode);
    for j in &layer.junctions {
        let _ = writeln!(out, "junction {} {} {}", j.id, j.x, j.y);
    }
    for l in &layer.links {
        let _ = writeln!(
            out,
            "link {} {} {} {}",
            l.from,
            l.to,
            l.length,
            u8::from(l.directed)
        );
    }
    out
}

pub fn read_layer(path: impl AsRef<Path>) -> Result<JunctionLayer> {
    parse_layer(&std::fs::read_to_string(path)?)
}

/// Assignment of every junction to a cluster vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClusterMap {
    /// `assignment[layer][position]` for the junction at that position in the layer.
    assignment: Vec<Vec<usize>>,
    by_id: Vec<HashMap<u64, usize>>,
    count: usize,
}

impl ClusterMap {
    pub fn cluster_count(&self) -> usize {
        self.count
    }

    pub fn cluster_of(&self, layer: usize, junction: u64) -> Option<usize> {
        let pos = *self.by_id.get(layer)?.get(&junction)?;
        Some(self.assignment[layer][pos])
    }

    pub fn layer_assignment(&self, layer: usize) -> &[usize] {
        &self.assignment[layer]
    }
}

struct DisjointSets {
    parent: Vec<usize>,
}

impl DisjointSets {
    fn new(n: usize) -> Self {
        DisjointSets {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            let (lo, hi) = (ra.min(rb), ra.max(rb));
            self.parent[hi] = lo;
        }
    }
}

/// Single-linkage clustering of all junctions with threshold `distance`.
///
/// Cluster ids are numbered in order of each cluster's smallest
/// `(layer index, junction id)` member, so they do not depend on the order
/// junctions are listed in.
pub fn cluster_junctions(layers: &[JunctionLayer], distance: f64) -> Result<ClusterMap> {
    if layers.is_empty() {
        return Err(Error::usage("no layers to cluster"));
    }
    if !(distance > 0.0 && distance.is_finite()) {
        return Err(Error::usage("cluster distance must be positive"));
    }
    let by_id = layers
        .iter()
        .map(JunctionLayer::index)
        .collect::<Result<Vec<_>>>()?;

    let points: Vec<(usize, &Junction)> = layers
        .iter()
        .enumerate()
        .flat_map(|(li, l)| l.junctions.iter().map(move |j| (li, j)))
        .collect();
    let cell = |v: f64| (v / distance).floor() as i64;
    let mut grid: HashMap<(i64, i64), Vec<usize>> = HashMap::new();
    for (i, (_, j)) in points.iter().enumerate() {
        grid.entry((cell(j.x), cell(j.y))).or_default().push(i);
    }

    let d2 = distance * distance;
    let mut sets = DisjointSets::new(points.len());
    for (i, (_, p)) in points.iter().enumerate() {
        let (cx, cy) = (cell(p.x), cell(p.y));
        for gx in cx - 1..=cx + 1 {
            for gy in cy - 1..=cy + 1 {
                let Some(members) = grid.get(&(gx, gy)) else {
                    continue;
                };
                for &o in members.iter().filter(|&&o| o > i) {
                    let q = points[o].1;
                    let (dx, dy) = (p.x - q.x, p.y - q.y);
                    if dx * dx + dy * dy <= d2 {
                        sets.union(i, o);
                    }
                }
            }
        }
    }

    let mut root_key: HashMap<usize, (usize, u64)> = HashMap::new();
    for (i, (li, j)) in points.iter().enumerate() {
        let root = sets.find(i);
        let key = (*li, j.id);
        root_key
            .entry(root)
            .and_modify(|k| *k = (*k).min(key))
            .or_insert(key);
    }
    let mut roots: Vec<(usize, u64, usize)> =
        root_key.into_iter().map(|(r, (l, id))| (l, id, r)).collect();
    roots.sort_unstable();
    let cluster_of_root: HashMap<usize, usize> = roots
        .iter()
        .enumerate()
        .map(|(cid, &(_, _, r))| (r, cid))
        .collect();

    let mut assignment: Vec<Vec<usize>> = layers
        .iter()
        .map(|l| Vec::with_capacity(l.junctions.len()))
        .collect();
    for (i, (li, _)) in points.iter().enumerate() {
        assignment[*li].push(cluster_of_root[&sets.find(i)]);
    }
    Ok(ClusterMap {
        assignment,
        by_id,
        count: roots.len(),
    })
}

/// Builds the multimodal graph: colour `i` is layer `i`, vertices are clusters.
///
/// Undirected links yield two opposed edges. Links whose ends fall in the same
/// cluster are dropped. Lengths are rounded to `scale` decimals, with a floor
/// of one unit.
pub fn assemble(layers: &[JunctionLayer], map: &ClusterMap, scale: u32) -> Result<ColouredGraph> {
    if map.assignment.len() != layers.len() {
        return Err(Error::usage("cluster map was built for a different set of layers"));
    }
    let names = layers.iter().map(|l| l.mode.clone()).collect();
    let mut b = GraphBuilder::new(map.count, names).scale(scale);
    for (li, layer) in layers.iter().enumerate() {
        if map.assignment[li].len() != layer.junctions.len() {
            return Err(Error::usage(format!(
                "cluster map does not cover layer {}",
                layer.mode
            )));
        }
        let colour = ColourId(li as u16);
        for link in &layer.links {
            let end = |id: u64| {
                map.cluster_of(li, id).ok_or_else(|| {
                    Error::usage(format!(
                        "junction {id} of layer {} has no cluster",
                        layer.mode
                    ))
                })
            };
            let (a, z) = (end(link.from)?, end(link.to)?);
            if a == z {
                continue;
            }
            let w = Weight(parse_decimal_rounded(&link.length, scale)?.max(1));
            b.add_edge(a, z, colour, w)?;
            if !link.directed {
                b.add_edge(z, a, colour, w)?;
            }
        }
    }
    b.build()
}
