//! Text formats: whitespace edge lists, JSON, and DOT export.

use std::fmt::Write as _;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{is_congested, Graph, LoadedGraph, SubgraphRef};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GraphFormat {
    EdgeList,
    Json,
}

impl FromStr for GraphFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "edges" | "edgelist" | "edge-list" => Ok(GraphFormat::EdgeList),
            "json" => Ok(GraphFormat::Json),
            other => Err(Error::InvalidParameter(format!("unknown graph format {other}"))),
        }
    }
}

impl GraphFormat {
    /// Guesses the format from a file name, defaulting to edge lists.
    pub fn from_path(path: &str) -> GraphFormat {
        if path.ends_with(".json") {
            GraphFormat::Json
        } else {
            GraphFormat::EdgeList
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct JsonGraph {
    #[serde(default)]
    nodes: Vec<String>,
    edges: Vec<JsonEdge>,
}

#[derive(Debug, Serialize, Deserialize)]
struct JsonEdge {
    u: String,
    v: String,
    load: f64,
}

pub fn parse_graph(input: &str, format: GraphFormat) -> Result<LoadedGraph> {
    match format {
        GraphFormat::EdgeList => parse_edge_list(input),
        GraphFormat::Json => parse_json(input),
    }
}

fn parse_edge_list(input: &str) -> Result<LoadedGraph> {
    let mut triples = Vec::new();
    for (lineno, raw) in input.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let location = format!("line {}", lineno + 1);
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 3 {
            return Err(Error::Parse { location, message: format!("expected `<u> <v> <load>`, found {} fields", fields.len()) });
        }
        let load: f64 = fields[2]
            .parse()
            .map_err(|_| Error::Parse { location: format!("{location}, field 3"), message: format!("invalid load {:?}", fields[2]) })?;
        if !load.is_finite() {
            return Err(Error::Parse {
                location: format!("{location}, field 3"),
                message: format!("load must be finite, found {}", fields[2]),
            });
        }
        triples.push((fields[0], fields[1], load));
    }
    LoadedGraph::from_labeled::<&str>(&[], &triples)
}

fn parse_json(input: &str) -> Result<LoadedGraph> {
    let doc: JsonGraph = serde_json::from_str(input)
        .map_err(|e| Error::Parse { location: format!("line {}, column {}", e.line(), e.column()), message: e.to_string() })?;
    let mut seen = std::collections::HashSet::new();
    for n in &doc.nodes {
        if !seen.insert(n.as_str()) {
            return Err(Error::Parse { location: "nodes".into(), message: format!("duplicate node label {n}") });
        }
    }
    let triples: Vec<(&str, &str, f64)> = doc.edges.iter().map(|e| (e.u.as_str(), e.v.as_str(), e.load)).collect();
    let nodes: Vec<&str> = doc.nodes.iter().map(String::as_str).collect();
    LoadedGraph::from_labeled(&nodes, &triples)
}

/// Edge-list text, one edge per line in edge order. Isolated nodes are not
/// representable in this format and are lost.
pub fn write_edge_list(g: &LoadedGraph) -> String {
    let mut out = String::new();
    for (&(u, v), load) in g.graph().edges().iter().zip(g.loads()) {
        let _ = writeln!(out, "{} {} {}", g.graph().label(u), g.graph().label(v), load);
    }
    out
}

pub fn write_json(g: &LoadedGraph) -> String {
    let graph = g.graph();
    let doc = JsonGraph {
        nodes: graph.labels().to_vec(),
        edges: graph
            .edges()
            .iter()
            .zip(g.loads())
            .map(|(&(u, v), &load)| JsonEdge { u: graph.label(u).to_string(), v: graph.label(v).to_string(), load })
            .collect(),
    };
    serde_json::to_string_pretty(&doc).expect("graph serializes")
}

/// Styling hints for DOT output.
#[derive(Debug, Clone, Default)]
pub struct DotStyle<'a> {
    /// Congestion threshold; edges above it get `congested=true`.
    pub threshold: Option<f64>,
    /// Nodes drawn filled (a dense cover).
    pub shaded: Option<&'a SubgraphRef>,
    /// Node sequence drawn bold.
    pub path: Option<&'a [crate::graph::NodeId]>,
}

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

/// DOT rendering of a plain graph (no loads).
pub fn to_dot(g: &Graph, style: &DotStyle<'_>) -> String {
    render_dot(g, None, style)
}

pub fn loaded_to_dot(g: &LoadedGraph, style: &DotStyle<'_>) -> String {
    render_dot(g.graph(), Some(g.loads()), style)
}

fn render_dot(g: &Graph, loads: Option<&[f64]>, style: &DotStyle<'_>) -> String {
    let mut out = String::from("graph G {\n");
    for v in g.nodes() {
        let mut attrs = Vec::new();
        if style.shaded.is_some_and(|s| s.contains(v)) {
            attrs.push("style=filled".to_string());
            attrs.push("fillcolor=gray".to_string());
        }
        if style.path.is_some_and(|p| p.contains(&v)) {
            attrs.push("penwidth=3".to_string());
        }
        if attrs.is_empty() {
            let _ = writeln!(out, "  {};", quote(g.label(v)));
        } else {
            let _ = writeln!(out, "  {} [{}];", quote(g.label(v)), attrs.join(", "));
        }
    }
    let on_path = |u, v| {
        style.path.is_some_and(|p: &[crate::graph::NodeId]| p.windows(2).any(|w| (w[0] == u && w[1] == v) || (w[0] == v && w[1] == u)))
    };
    for (i, &(u, v)) in g.edges().iter().enumerate() {
        let mut attrs = Vec::new();
        if let Some(loads) = loads {
            attrs.push(format!("load={}", loads[i]));
            if let Some(t) = style.threshold {
                if is_congested(loads[i], t) {
                    attrs.push("congested=true".to_string());
                    attrs.push("color=red".to_string());
                }
            }
        } else if style.threshold.is_some() {
            // a bare graph here is a congested core: every edge is congested
            attrs.push("congested=true".to_string());
            attrs.push("color=red".to_string());
        }
        if on_path(u, v) {
            attrs.push("style=bold".to_string());
            attrs.push("penwidth=3".to_string());
        }
        if attrs.is_empty() {
            let _ = writeln!(out, "  {} -- {};", quote(g.label(u)), quote(g.label(v)));
        } else {
            let _ = writeln!(out, "  {} -- {} [{}];", quote(g.label(u)), quote(g.label(v)), attrs.join(", "));
        }
    }
    out.push_str("}\n");
    out
}
