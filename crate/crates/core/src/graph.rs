//! Undirected simple graphs with per-link relative loads, and the
//! congested-core filter.
//!
//! Node identity is a dense index ([`NodeId`]) with a bidirectional map to
//! string labels. Subgraph operations renumber nodes but keep labels, and
//! return an origin map so callers can translate node sets between a host
//! graph and the graphs derived from it.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Congestion comparison mode. `true` means a link is congested only when
/// its load is strictly above the threshold.
pub const STRICT_THRESHOLD: bool = true;

/// Returns whether a link with `load` counts as congested at `threshold`.
#[inline]
pub fn is_congested(load: f64, threshold: f64) -> bool {
    if STRICT_THRESHOLD {
        load > threshold
    } else {
        load >= threshold
    }
}

/// Human-readable name of the comparison mode, embedded in results.
pub fn threshold_mode() -> &'static str {
    if STRICT_THRESHOLD {
        "strict"
    } else {
        "inclusive"
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct NodeId(pub usize);

impl NodeId {
    #[inline]
    pub fn index(self) -> usize {
        self.0
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

/// A set of nodes, identified with the subgraph it induces.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SubgraphRef {
    nodes: Vec<NodeId>,
}

impl SubgraphRef {
    pub fn new(nodes: impl IntoIterator<Item = NodeId>) -> Self {
        let mut nodes: Vec<NodeId> = nodes.into_iter().collect();
        nodes.sort_unstable();
        nodes.dedup();
        SubgraphRef { nodes }
    }

    pub fn empty() -> Self {
        SubgraphRef { nodes: Vec::new() }
    }

    pub fn from_mask(mask: &[bool]) -> Self {
        SubgraphRef { nodes: mask.iter().enumerate().filter(|(_, &keep)| keep).map(|(i, _)| NodeId(i)).collect() }
    }

    pub fn nodes(&self) -> &[NodeId] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn contains(&self, v: NodeId) -> bool {
        self.nodes.binary_search(&v).is_ok()
    }

    pub fn is_subset(&self, other: &SubgraphRef) -> bool {
        self.nodes.iter().all(|&v| other.contains(v))
    }

    pub fn intersects(&self, other: &SubgraphRef) -> bool {
        self.nodes.iter().any(|&v| other.contains(v))
    }

    pub fn union(&self, other: &SubgraphRef) -> SubgraphRef {
        SubgraphRef::new(self.nodes.iter().chain(other.nodes.iter()).copied())
    }

    pub fn intersection(&self, other: &SubgraphRef) -> SubgraphRef {
        SubgraphRef { nodes: self.nodes.iter().copied().filter(|&v| other.contains(v)).collect() }
    }

    pub fn difference(&self, other: &SubgraphRef) -> SubgraphRef {
        SubgraphRef { nodes: self.nodes.iter().copied().filter(|&v| !other.contains(v)).collect() }
    }

    /// Boolean membership vector over a host with `n` nodes.
    pub fn to_mask(&self, n: usize) -> Vec<bool> {
        let mut mask = vec![false; n];
        for &v in &self.nodes {
            if v.0 < n {
                mask[v.0] = true;
            }
        }
        mask
    }

    /// Translates every node through `origin` (derived index -> host index).
    pub fn map_through(&self, origin: &[NodeId]) -> SubgraphRef {
        SubgraphRef::new(self.nodes.iter().map(|v| origin[v.0]))
    }

    pub fn iter(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.nodes.iter().copied()
    }
}

impl FromIterator<NodeId> for SubgraphRef {
    fn from_iter<I: IntoIterator<Item = NodeId>>(iter: I) -> Self {
        SubgraphRef::new(iter)
    }
}

/// Undirected simple graph.
///
/// Adjacency lists are sorted by node index; the edge list holds pairs
/// `(u, v)` with `u < v`, sorted lexicographically, so an edge's position
/// in it is its stable `EdgeId`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    labels: Vec<String>,
    index: HashMap<String, NodeId>,
    adjacency: Vec<Vec<NodeId>>,
    edges: Vec<(NodeId, NodeId)>,
}

impl Default for Graph {
    fn default() -> Self {
        Graph::empty()
    }
}

impl Graph {
    pub fn empty() -> Self {
        Graph { labels: Vec::new(), index: HashMap::new(), adjacency: Vec::new(), edges: Vec::new() }
    }

    /// Builds a graph from labels and index pairs. Rejects self-loops and
    /// duplicate edges; labels must be unique.
    pub fn from_edges(labels: Vec<String>, edges: &[(usize, usize)]) -> Result<Self> {
        let n = labels.len();
        let mut index = HashMap::with_capacity(n);
        for (i, label) in labels.iter().enumerate() {
            if index.insert(label.clone(), NodeId(i)).is_some() {
                return Err(Error::Parse { location: "node list".into(), message: format!("duplicate node label {label}") });
            }
        }
        let mut pairs = Vec::with_capacity(edges.len());
        for &(u, v) in edges {
            if u >= n {
                return Err(Error::UnknownNode(format!("#{u}")));
            }
            if v >= n {
                return Err(Error::UnknownNode(format!("#{v}")));
            }
            if u == v {
                return Err(Error::SelfLoop(labels[u].clone()));
            }
            pairs.push(if u < v { (NodeId(u), NodeId(v)) } else { (NodeId(v), NodeId(u)) });
        }
        pairs.sort_unstable();
        for w in pairs.windows(2) {
            if w[0] == w[1] {
                return Err(Error::DuplicateEdge { u: labels[w[0].0 .0].clone(), v: labels[w[0].1 .0].clone() });
            }
        }
        let mut adjacency = vec![Vec::new(); n];
        for &(u, v) in &pairs {
            adjacency[u.0].push(v);
            adjacency[v.0].push(u);
        }
        for list in &mut adjacency {
            list.sort_unstable();
        }
        Ok(Graph { labels, index, adjacency, edges: pairs })
    }

    /// Graph with nodes labelled `0..n` by their index. Handy in tests and
    /// generators.
    pub fn with_numeric_labels(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        Graph::from_edges((0..n).map(|i| i.to_string()).collect(), edges)
    }

    pub fn node_count(&self) -> usize {
        self.labels.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn nodes(&self) -> impl Iterator<Item = NodeId> + '_ {
        (0..self.labels.len()).map(NodeId)
    }

    pub fn all_nodes(&self) -> SubgraphRef {
        SubgraphRef::new(self.nodes())
    }

    pub fn edges(&self) -> &[(NodeId, NodeId)] {
        &self.edges
    }

    pub fn neighbors(&self, v: NodeId) -> &[NodeId] {
        &self.adjacency[v.0]
    }

    pub fn degree(&self, v: NodeId) -> usize {
        self.adjacency[v.0].len()
    }

    pub fn has_edge(&self, u: NodeId, v: NodeId) -> bool {
        self.edge_id(u, v).is_some()
    }

    /// Position of the edge `{u, v}` in [`Graph::edges`].
    pub fn edge_id(&self, u: NodeId, v: NodeId) -> Option<usize> {
        let key = if u < v { (u, v) } else { (v, u) };
        self.edges.binary_search(&key).ok()
    }

    pub fn label(&self, v: NodeId) -> &str {
        &self.labels[v.0]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn node(&self, label: &str) -> Option<NodeId> {
        self.index.get(label).copied()
    }

    pub fn require_node(&self, label: &str) -> Result<NodeId> {
        self.node(label).ok_or_else(|| Error::UnknownNode(label.to_string()))
    }

    pub fn contains(&self, v: NodeId) -> bool {
        v.0 < self.labels.len()
    }

    /// Induced subgraph on the nodes marked in `keep`, with the origin map
    /// from new indices to indices of `self`.
    pub fn restrict(&self, keep: &[bool]) -> (Graph, Vec<NodeId>) {
        let n = self.node_count();
        let mut new_index = vec![usize::MAX; n];
        let mut origin = Vec::new();
        for (i, slot) in new_index.iter_mut().enumerate() {
            if keep.get(i).copied().unwrap_or(false) {
                *slot = origin.len();
                origin.push(NodeId(i));
            }
        }
        let labels: Vec<String> = origin.iter().map(|v| self.labels[v.0].clone()).collect();
        let index = labels.iter().enumerate().map(|(i, l)| (l.clone(), NodeId(i))).collect();
        let mut adjacency = vec![Vec::new(); origin.len()];
        let mut edges = Vec::new();
        for &(u, v) in &self.edges {
            let (nu, nv) = (new_index[u.0], new_index[v.0]);
            if nu != usize::MAX && nv != usize::MAX {
                edges.push((NodeId(nu), NodeId(nv)));
                adjacency[nu].push(NodeId(nv));
                adjacency[nv].push(NodeId(nu));
            }
        }
        // new indices preserve the old relative order, so both lists are
        // already sorted
        (Graph { labels, index, adjacency, edges }, origin)
    }

    /// Graph on exactly `nodes`, keeping every edge with both endpoints in it.
    pub fn induced_subgraph(&self, nodes: &SubgraphRef) -> Result<Graph> {
        Ok(self.induced_subgraph_with_origin(nodes)?.0)
    }

    pub fn induced_subgraph_with_origin(&self, nodes: &SubgraphRef) -> Result<(Graph, Vec<NodeId>)> {
        if let Some(v) = nodes.iter().find(|v| !self.contains(*v)) {
            return Err(Error::UnknownNode(v.to_string()));
        }
        Ok(self.restrict(&nodes.to_mask(self.node_count())))
    }

    /// Graph with `nodes` and all their incident edges deleted. Nodes that
    /// are not in the graph are ignored.
    pub fn remove_nodes(&self, nodes: &SubgraphRef) -> Graph {
        self.remove_nodes_with_origin(nodes).0
    }

    pub fn remove_nodes_with_origin(&self, nodes: &SubgraphRef) -> (Graph, Vec<NodeId>) {
        let keep: Vec<bool> = nodes.to_mask(self.node_count()).into_iter().map(|x| !x).collect();
        self.restrict(&keep)
    }

    /// Connected components as sorted node sets, ordered by smallest node.
    pub fn connected_components(&self) -> Vec<SubgraphRef> {
        let n = self.node_count();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            seen[start] = true;
            let mut stack = vec![NodeId(start)];
            let mut comp = Vec::new();
            while let Some(u) = stack.pop() {
                comp.push(u);
                for &w in self.neighbors(u) {
                    if !seen[w.0] {
                        seen[w.0] = true;
                        stack.push(w);
                    }
                }
            }
            out.push(SubgraphRef::new(comp));
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        self.node_count() <= 1 || self.connected_components().len() == 1
    }

    /// Returns a copy with the extra edge `{u, v}`.
    pub fn with_edge(&self, u: NodeId, v: NodeId) -> Result<Graph> {
        let mut pairs: Vec<(usize, usize)> = self.edges.iter().map(|&(a, b)| (a.0, b.0)).collect();
        pairs.push((u.0, v.0));
        Graph::from_edges(self.labels.clone(), &pairs)
    }
}

/// A graph with one non-negative relative load per edge, aligned with
/// [`Graph::edges`]. Loads above 1.0 mean overload and are legal.
#[derive(Debug, Clone, PartialEq)]
pub struct LoadedGraph {
    graph: Graph,
    loads: Vec<f64>,
}

impl LoadedGraph {
    pub fn new(graph: Graph, loads: Vec<f64>) -> Result<Self> {
        if loads.len() != graph.edge_count() {
            return Err(Error::InvalidParameter(format!("{} loads for {} edges", loads.len(), graph.edge_count())));
        }
        for (&(u, v), &load) in graph.edges().iter().zip(&loads) {
            if !load.is_finite() || load < 0.0 {
                return Err(Error::NegativeLoad { u: graph.label(u).to_string(), v: graph.label(v).to_string(), load });
            }
        }
        Ok(LoadedGraph { graph, loads })
    }

    /// Builds from labelled triples in any order. Labels are assigned
    /// indices in order of first appearance, after `extra_nodes`.
    pub fn from_labeled<S: AsRef<str>>(extra_nodes: &[S], edges: &[(S, S, f64)]) -> Result<Self> {
        let mut labels: Vec<String> = Vec::new();
        let mut index: HashMap<String, usize> = HashMap::new();
        let mut intern = |s: &str, labels: &mut Vec<String>| -> usize {
            if let Some(&i) = index.get(s) {
                return i;
            }
            labels.push(s.to_string());
            index.insert(s.to_string(), labels.len() - 1);
            labels.len() - 1
        };
        for n in extra_nodes {
            intern(n.as_ref(), &mut labels);
        }
        let mut pairs = Vec::with_capacity(edges.len());
        let mut raw_loads = Vec::with_capacity(edges.len());
        for (u, v, load) in edges {
            let (u, v) = (u.as_ref(), v.as_ref());
            if u == v {
                return Err(Error::SelfLoop(u.to_string()));
            }
            if !load.is_finite() || *load < 0.0 {
                return Err(Error::NegativeLoad { u: u.to_string(), v: v.to_string(), load: *load });
            }
            let iu = intern(u, &mut labels);
            let iv = intern(v, &mut labels);
            pairs.push((iu, iv));
            raw_loads.push(*load);
        }
        let graph = Graph::from_edges(labels, &pairs)?;
        let mut loads = vec![0.0; graph.edge_count()];
        for (&(u, v), &load) in pairs.iter().zip(&raw_loads) {
            let id = graph.edge_id(NodeId(u), NodeId(v)).expect("edge just inserted");
            loads[id] = load;
        }
        Ok(LoadedGraph { graph, loads })
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn loads(&self) -> &[f64] {
        &self.loads
    }

    pub fn load(&self, u: NodeId, v: NodeId) -> Option<f64> {
        self.graph.edge_id(u, v).map(|id| self.loads[id])
    }

    /// Loads of a graph derived from this one through `origin`.
    pub fn loads_for(&self, derived: &Graph, origin: &[NodeId]) -> Vec<f64> {
        derived
            .edges()
            .iter()
            .map(|&(u, v)| {
                let id = self.graph.edge_id(origin[u.0], origin[v.0]).expect("derived edge exists in host");
                self.loads[id]
            })
            .collect()
    }
}

/// The congested core: edges whose load passes the congestion predicate,
/// and the nodes incident to them.
#[derive(Debug, Clone, PartialEq)]
pub struct CongestedCore {
    pub core: Graph,
    pub threshold: f64,
    /// Core node index -> node of the original graph.
    pub origin: Vec<NodeId>,
}

impl CongestedCore {
    pub fn is_empty(&self) -> bool {
        self.core.is_empty()
    }

    /// Maps a node set of the core back to the original graph.
    pub fn to_original(&self, set: &SubgraphRef) -> SubgraphRef {
        set.map_through(&self.origin)
    }
}

/// Filters `g` down to its congested links. Isolated nodes are dropped.
pub fn congested_core(g: &LoadedGraph, threshold: f64) -> Result<CongestedCore> {
    if !threshold.is_finite() || threshold < 0.0 {
        return Err(Error::InvalidParameter(format!("threshold {threshold} must be a finite value >= 0")));
    }
    let graph = g.graph();
    let hot: Vec<usize> = (0..graph.edge_count()).filter(|&i| is_congested(g.loads[i], threshold)).collect();
    let mut keep = vec![false; graph.node_count()];
    for &i in &hot {
        let (u, v) = graph.edges()[i];
        keep[u.0] = true;
        keep[v.0] = true;
    }
    let mut new_index = vec![usize::MAX; graph.node_count()];
    let mut origin = Vec::new();
    for (i, &k) in keep.iter().enumerate() {
        if k {
            new_index[i] = origin.len();
            origin.push(NodeId(i));
        }
    }
    let labels = origin.iter().map(|&v| graph.label(v).to_string()).collect();
    let pairs: Vec<(usize, usize)> = hot
        .iter()
        .map(|&i| {
            let (u, v) = graph.edges()[i];
            (new_index[u.0], new_index[v.0])
        })
        .collect();
    Ok(CongestedCore { core: Graph::from_edges(labels, &pairs)?, threshold, origin })
}
