//! The `wceg v1` graph file format.
//!
//! ```text
//! wceg v1 n=<n> k=<k> scale=<s>
//! colour <id> <name>          (k lines, ids 0..k-1 in order)
//! edge <from> <to> <colour> <weight-decimal>
//! ```
//!
//! Blank lines and lines starting with `#` are ignored. Edge ids are assigned
//! in file order. A JSON document with the same fields is also accepted; see
//! [`GraphDocument`].

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{ColourId, ColouredGraph, GraphBuilder, Weight};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphDocument {
    pub format: String,
    pub version: u32,
    pub n: usize,
    pub k: usize,
    pub scale: u32,
    pub colours: Vec<ColourEntry>,
    pub edges: Vec<EdgeEntry>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ColourEntry {
    pub id: u16,
    pub name: String,
}

/// Weights are decimal strings so they survive JSON without rounding.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeEntry {
    pub from: usize,
    pub to: usize,
    pub colour: u16,
    pub weight: String,
}

pub fn write_text(g: &ColouredGraph) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "wceg v1 n={} k={} scale={}",
        g.vertex_count(),
        g.colour_count(),
        g.scale()
    );
    for (i, name) in g.colour_names().iter().enumerate() {
        let _ = writeln!(out, "colour {i} {name}");
    }
    for e in g.edges() {
        let _ = writeln!(
            out,
            "edge {} {} {} {}",
            e.from,
            e.to,
            e.colour,
            e.weight.to_decimal(g.scale())
        );
    }
    out
}

fn header_field<'a>(token: Option<&'a str>, key: &str) -> Result<&'a str> {
    token
        .and_then(|t| t.strip_prefix(key))
        .and_then(|t| t.strip_prefix('='))
        .ok_or_else(|| Error::parse(1, format!("expected `{key}=<value>` in header")))
}

fn num<T: std::str::FromStr>(line: usize, tok: Option<&str>, what: &str) -> Result<T> {
    tok.and_then(|t| t.parse().ok())
        .ok_or_else(|| Error::parse(line, format!("expected {what}")))
}

pub fn parse_text(text: &str) -> Result<ColouredGraph> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

    let (hline, header) = lines
        .next()
        .ok_or_else(|| Error::parse(1, "empty graph file"))?;
    let mut toks = header.split_whitespace();
    if toks.next() != Some("wceg") || toks.next() != Some("v1") {
        return Err(Error::parse(hline, "expected header `wceg v1 ...`"));
    }
    let bad_header = |e: Error| match e {
        Error::Parse { msg, .. } => Error::parse(hline, msg),
        e => e,
    };
    let n: usize = header_field(toks.next(), "n")
        .map_err(bad_header)?
        .parse()
        .map_err(|_| Error::parse(hline, "bad vertex count"))?;
    let k: usize = header_field(toks.next(), "k")
        .map_err(bad_header)?
        .parse()
        .map_err(|_| Error::parse(hline, "bad colour count"))?;
    let scale: u32 = header_field(toks.next(), "scale")
        .map_err(bad_header)?
        .parse()
        .map_err(|_| Error::parse(hline, "bad scale"))?;

    let mut names = Vec::with_capacity(k);
    let mut edges = Vec::new();
    for (line, content) in lines {
        let mut t = content.split_whitespace();
        match t.next() {
            Some("colour") => {
                if !edges.is_empty() {
                    return Err(Error::parse(line, "colour lines must precede edges"));
                }
                let id: usize = num(line, t.next(), "colour id")?;
                if id != names.len() {
                    return Err(Error::parse(
                        line,
                        format!("colour ids must be dense and ordered; expected {}", names.len()),
                    ));
                }
                let name = t
                    .next()
                    .ok_or_else(|| Error::parse(line, "missing colour name"))?;
                if t.next().is_some() {
                    return Err(Error::parse(line, "colour names cannot contain spaces"));
                }
                names.push(name.to_string());
            }
            Some("edge") => {
                let from: usize = num(line, t.next(), "edge source")?;
                let to: usize = num(line, t.next(), "edge target")?;
                let colour: u16 = num(line, t.next(), "edge colour")?;
                let w = t
                    .next()
                    .ok_or_else(|| Error::parse(line, "missing edge weight"))?;
                if t.next().is_some() {
                    return Err(Error::parse(line, "trailing tokens after edge"));
                }
                edges.push((line, from, to, colour, w.to_string()));
            }
            _ => return Err(Error::parse(line, format!("unrecognized line `{content}`"))),
        }
    }
    if names.len() != k {
        return Err(Error::parse(
            hline,
            format!("header declares k={k} but {} colours were listed", names.len()),
        ));
    }
    let mut b = GraphBuilder::new(n, names).scale(scale);
    for (line, from, to, colour, w) in edges {
        let weight = Weight::parse(&w, scale).map_err(|e| Error::parse(line, e.to_string()))?;
        b.add_edge(from, to, ColourId(colour), weight)
            .map_err(|e| Error::parse(line, e.to_string()))?;
    }
    b.build()
}

impl GraphDocument {
    pub fn from_graph(g: &ColouredGraph) -> Self {
        GraphDocument {
            format: "wceg".into(),
            version: 1,
            n: g.vertex_count(),
            k: g.colour_count(),
            scale: g.scale(),
            colours: g
                .colour_names()
                .iter()
                .enumerate()
                .map(|(i, name)| ColourEntry {
                    id: i as u16,
                    name: name.clone(),
                })
                .collect(),
            edges: g
                .edges()
                .iter()
                .map(|e| EdgeEntry {
                    from: e.from,
                    to: e.to,
                    colour: e.colour.0,
                    weight: e.weight.to_decimal(g.scale()),
                })
                .collect(),
        }
    }

    pub fn into_graph(self) -> Result<ColouredGraph> {
        if self.format != "wceg" || self.version != 1 {
            return Err(Error::parse(0, "expected format \"wceg\" version 1"));
        }
        if self.colours.len() != self.k {
            return Err(Error::parse(0, "colour list length differs from k"));
        }
        let mut colours = self.colours;
        colours.sort_by_key(|c| c.id);
        if colours.iter().enumerate().any(|(i, c)| c.id as usize != i) {
            return Err(Error::parse(0, "colour ids must be 0..k-1"));
        }
        let mut b = GraphBuilder::new(self.n, colours.into_iter().map(|c| c.name).collect())
            .scale(self.scale);
        for e in self.edges {
            let w = Weight::parse(&e.weight, self.scale)?;
            b.add_edge(e.from, e.to, ColourId(e.colour), w)?;
        }
        b.build()
    }
}

pub fn write_json(g: &ColouredGraph) -> String {
    serde_json::to_string_pretty(&GraphDocument::from_graph(g)).expect("serializable")
}

pub fn parse_json(text: &str) -> Result<ColouredGraph> {
    serde_json::from_str::<GraphDocument>(text)?.into_graph()
}

/// Parses either form, choosing JSON when the document starts with `{`.
pub fn parse_graph(text: &str) -> Result<ColouredGraph> {
    if text.trim_start().starts_with('{') {
        parse_json(text)
    } else {
        parse_text(text)
    }
}

pub fn read_graph(path: impl AsRef<Path>) -> Result<ColouredGraph> {
    parse_graph(&std::fs::read_to_string(path)?)
}

pub fn write_graph(path: impl AsRef<Path>, g: &ColouredGraph) -> Result<()> {
    std::fs::write(path, write_text(g))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = "\
# two modes
wceg v1 n=3 k=2 scale=3
colour 0 bus
colour 1 walk

edge 0 1 0 1.5
edge 1 2 1 0.25
edge 1 2 1 2
";

    #[test]
    fn parses_and_writes_canonical_text() {
        let g = parse_text(SAMPLE).unwrap();
        assert_eq!(g.vertex_count(), 3);
        assert_eq!(g.colour_names(), &["bus", "walk"]);
        assert_eq!(g.edge(0).weight, Weight(1500));
        let text = write_text(&g);
        assert_eq!(
            text,
            "wceg v1 n=3 k=2 scale=3\ncolour 0 bus\ncolour 1 walk\n\
             edge 0 1 0 1.5\nedge 1 2 1 0.25\nedge 1 2 1 2\n"
        );
        assert_eq!(parse_text(&text).unwrap(), g);
    }

    #[test]
    fn json_mirrors_text() {
        let g = parse_text(SAMPLE).unwrap();
        let json = write_json(&g);
        assert!(json.contains("\"weight\": \"0.25\""));
        assert_eq!(parse_graph(&json).unwrap(), g);
    }

    #[test]
    fn rejects_bad_input() {
        let cases = [
            "",
            "wceg v2 n=1 k=1 scale=3\ncolour 0 a\n",
            "wceg v1 n=1 k=2 scale=3\ncolour 0 a\n",
            "wceg v1 n=2 k=1 scale=3\ncolour 1 a\n",
            "wceg v1 n=2 k=1 scale=3\ncolour 0 a\nedge 0 2 0 1\n",
            "wceg v1 n=2 k=1 scale=3\ncolour 0 a\nedge 0 1 0 0\n",
            "wceg v1 n=2 k=1 scale=3\ncolour 0 a\nedge 0 1 0 1.0001\n",
            "wceg v1 n=2 k=1 scale=3\ncolour 0 a\nedge 0 1 1 1\n",
            "wceg v1 n=2 k=1 scale=3\ncolour 0 a\nvertex 0\n",
            "wceg v1 n=2 scale=3 k=1\ncolour 0 a\n",
        ];
        for c in cases {
            assert!(parse_text(c).is_err(), "accepted: {c:?}");
        }
        let err = parse_text("wceg v1 n=2 k=1 scale=3\ncolour 0 a\n\nedge 0 1 0 -1\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 4, .. }), "{err}");
    }
}
