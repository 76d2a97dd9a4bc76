//! Shortest paths and congestion-avoiding routing.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::dense::{candidate_grid, check_coverable, dense_cover, max_density, DenseCover, Exactness};
use crate::density::{DensityValue, MeasureExpr};
use crate::error::{Error, Result};
use crate::graph::{congested_core, threshold_mode, CongestedCore, Graph, LoadedGraph, NodeId, SubgraphRef};

/// How edges are weighted in the shortest-path phase.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WeightPolicy {
    /// Hop count.
    #[default]
    Unit,
    /// The link's relative load.
    Load,
}

impl WeightPolicy {
    pub fn weights(self, g: &LoadedGraph) -> Vec<f64> {
        match self {
            WeightPolicy::Unit => vec![1.0; g.graph().edge_count()],
            WeightPolicy::Load => g.loads().to_vec(),
        }
    }
}

impl FromStr for WeightPolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "unit" => Ok(WeightPolicy::Unit),
            "load" => Ok(WeightPolicy::Load),
            other => Err(Error::InvalidParameter(format!("unknown weight policy {other}"))),
        }
    }
}

impl fmt::Display for WeightPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            WeightPolicy::Unit => "unit",
            WeightPolicy::Load => "load",
        })
    }
}

/// A simple path with its total weight.
#[derive(Debug, Clone, PartialEq)]
pub struct Path {
    pub nodes: Vec<NodeId>,
    pub weight: f64,
}

impl Path {
    pub fn hops(&self) -> usize {
        self.nodes.len().saturating_sub(1)
    }

    pub fn node_set(&self) -> SubgraphRef {
        self.nodes.iter().copied().collect()
    }

    pub fn labels(&self, g: &Graph) -> Vec<String> {
        self.nodes.iter().map(|&v| g.label(v).to_string()).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum NoPathReason {
    /// Source or target lies in the dense cover.
    EndpointRemoved,
    /// No path connects source and target once the cover is removed.
    Disconnected,
}

#[derive(Debug, Clone, PartialEq)]
pub enum RouteOutcome {
    Found(Path),
    NoPath { reason: NoPathReason, certified: bool },
}

impl RouteOutcome {
    pub fn path(&self) -> Option<&Path> {
        match self {
            RouteOutcome::Found(p) => Some(p),
            RouteOutcome::NoPath { .. } => None,
        }
    }

    pub fn is_found(&self) -> bool {
        matches!(self, RouteOutcome::Found(_))
    }
}

/// Checks that `nodes` is a simple path in `g`.
pub fn validate_path(g: &Graph, nodes: &[NodeId]) -> Result<()> {
    if nodes.is_empty() {
        return Err(Error::InvalidPath("empty path".into()));
    }
    let mut seen = vec![false; g.node_count()];
    for &v in nodes {
        if !g.contains(v) {
            return Err(Error::UnknownNode(v.to_string()));
        }
        if std::mem::replace(&mut seen[v.0], true) {
            return Err(Error::InvalidPath(format!("node {} repeats", g.label(v))));
        }
    }
    for w in nodes.windows(2) {
        if !g.has_edge(w[0], w[1]) {
            return Err(Error::InvalidPath(format!("{} and {} are not adjacent", g.label(w[0]), g.label(w[1]))));
        }
    }
    Ok(())
}

/// Distance label: total weight, then hop count.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Dist {
    weight: f64,
    hops: usize,
}

impl Dist {
    fn cmp(&self, other: &Dist) -> Ordering {
        self.weight.total_cmp(&other.weight).then(self.hops.cmp(&other.hops))
    }
}

struct Entry {
    dist: Dist,
    node: usize,
}

impl PartialEq for Entry {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Entry {}
impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Entry {
    fn cmp(&self, other: &Self) -> Ordering {
        // min-heap on (dist, node)
        other.dist.cmp(&self.dist).then(other.node.cmp(&self.node))
    }
}

/// Minimum-weight `s`-`t` path.
///
/// Among paths of equal weight the one with fewer hops wins, and among
/// those the lexicographically smallest node sequence. Distances to `t`
/// are computed first; the path is then walked greedily from `s` along
/// tight edges, taking the smallest-index neighbour each time.
pub fn dijkstra(g: &Graph, weights: &[f64], s: NodeId, t: NodeId) -> Result<RouteOutcome> {
    if !g.contains(s) {
        return Err(Error::UnknownNode(s.to_string()));
    }
    if !g.contains(t) {
        return Err(Error::UnknownNode(t.to_string()));
    }
    if s == t {
        return Err(Error::SameEndpoints);
    }
    if weights.len() != g.edge_count() {
        return Err(Error::InvalidParameter(format!("{} weights for {} edges", weights.len(), g.edge_count())));
    }
    if let Some(&w) = weights.iter().find(|w| !w.is_finite() || **w < 0.0) {
        return Err(Error::NegativeWeight(w));
    }
    let n = g.node_count();
    let mut dist: Vec<Option<Dist>> = vec![None; n];
    let mut done = vec![false; n];
    let mut heap = BinaryHeap::new();
    dist[t.0] = Some(Dist { weight: 0.0, hops: 0 });
    heap.push(Entry { dist: Dist { weight: 0.0, hops: 0 }, node: t.0 });
    while let Some(Entry { dist: d, node: u }) = heap.pop() {
        if done[u] {
            continue;
        }
        done[u] = true;
        for &v in g.neighbors(NodeId(u)) {
            let w = weights[g.edge_id(NodeId(u), v).expect("adjacent")];
            let cand = Dist { weight: d.weight + w, hops: d.hops + 1 };
            if dist[v.0].is_none_or(|old| cand.cmp(&old) == Ordering::Less) {
                dist[v.0] = Some(cand);
                heap.push(Entry { dist: cand, node: v.0 });
            }
        }
    }
    let Some(total) = dist[s.0] else {
        return Ok(RouteOutcome::NoPath { reason: NoPathReason::Disconnected, certified: true });
    };
    let mut nodes = vec![s];
    let mut cur = s;
    let mut weight = 0.0;
    while cur != t {
        let here = dist[cur.0].expect("on a shortest path");
        let next = g
            .neighbors(cur)
            .iter()
            .copied()
            .find(|&v| {
                dist[v.0].is_some_and(|dv| {
                    let w = weights[g.edge_id(cur, v).expect("adjacent")];
                    dv.hops + 1 == here.hops && dv.weight + w == here.weight
                })
            })
            .expect("a tight edge leaves every non-target node");
        weight += weights[g.edge_id(cur, next).expect("adjacent")];
        nodes.push(next);
        cur = next;
    }
    debug_assert!((weight - total.weight).abs() <= 1e-9 * (1.0 + total.weight));
    Ok(RouteOutcome::Found(Path { nodes, weight }))
}

/// A routing answer together with the context that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct RouteResult {
    pub outcome: RouteOutcome,
    /// Guard value whose cover was removed.
    pub rho0: DensityValue,
    /// Dense cover in the node space of the full graph.
    pub cover: DenseCover,
    pub threshold: f64,
    pub weights: WeightPolicy,
}

impl RouteResult {
    pub fn certified(&self) -> bool {
        match &self.outcome {
            RouteOutcome::Found(_) => true,
            RouteOutcome::NoPath { certified, .. } => *certified,
        }
    }

    pub fn to_json(&self, g: &Graph) -> serde_json::Value {
        let (status, reason, path, weight) = match &self.outcome {
            RouteOutcome::Found(p) => ("found", None, p.labels(g), Some(p.weight)),
            RouteOutcome::NoPath { reason, .. } => ("no_path", Some(*reason), Vec::new(), None),
        };
        serde_json::json!({
            "status": status,
            "reason": reason,
            "certified": self.certified(),
            "path": path,
            "weight": weight,
            "rho0_used": self.rho0,
            "cover_size": self.cover.cover.len(),
            "cover_exactness": self.cover.exactness,
            "measure": self.cover.measure,
            "threshold": self.threshold,
            "threshold_mode": threshold_mode(),
            "weight_policy": self.weights,
        })
    }
}

fn endpoints(g: &Graph, s: NodeId, t: NodeId) -> Result<()> {
    for v in [s, t] {
        if !g.contains(v) {
            return Err(Error::UnknownNode(v.to_string()));
        }
    }
    if s == t {
        return Err(Error::SameEndpoints);
    }
    Ok(())
}

/// Removes the cover from the full graph and routes around it.
fn route_around(
    g: &LoadedGraph,
    cover: &SubgraphRef,
    exactness: Exactness,
    s: NodeId,
    t: NodeId,
    policy: WeightPolicy,
) -> Result<RouteOutcome> {
    let certified = exactness.is_exact();
    if cover.contains(s) || cover.contains(t) {
        return Ok(RouteOutcome::NoPath { reason: NoPathReason::EndpointRemoved, certified });
    }
    let (rest, origin) = g.graph().remove_nodes_with_origin(cover);
    let weights = match policy {
        WeightPolicy::Unit => vec![1.0; rest.edge_count()],
        WeightPolicy::Load => g.loads_for(&rest, &origin),
    };
    let position = |v: NodeId| origin.binary_search(&v).map(NodeId).expect("endpoint kept");
    Ok(match dijkstra(&rest, &weights, position(s), position(t))? {
        RouteOutcome::Found(p) => RouteOutcome::Found(Path { nodes: p.nodes.iter().map(|v| origin[v.0]).collect(), weight: p.weight }),
        RouteOutcome::NoPath { reason, .. } => RouteOutcome::NoPath { reason, certified },
    })
}

/// Cover of the congested core, translated to the full graph.
pub fn core_cover(core: &CongestedCore, m: &MeasureExpr, rho0: DensityValue) -> Result<DenseCover> {
    Ok(dense_cover(&core.core, m, rho0)?.map_through(&core.origin))
}

/// Finds an `s`-`t` path whose density index is at least `rho0`: the
/// dense cover of the congested core at `rho0` is removed from the full
/// network and a shortest path is sought in what remains.
#[allow(clippy::too_many_arguments)]
pub fn route_with_density_index(
    g: &LoadedGraph,
    threshold: f64,
    m: &MeasureExpr,
    rho0: DensityValue,
    s: NodeId,
    t: NodeId,
    policy: WeightPolicy,
) -> Result<RouteResult> {
    endpoints(g.graph(), s, t)?;
    let core = congested_core(g, threshold)?;
    let cover = core_cover(&core, m, rho0)?;
    let outcome = route_around(g, &cover.cover, cover.exactness, s, t, policy)?;
    Ok(RouteResult { outcome, rho0, cover, threshold, weights: policy })
}

/// Congestion-avoiding path: avoids every densest subgraph of the
/// congested core, i.e. routes with `rho0` set to the core's maximum
/// density. An empty core leaves plain shortest-path routing.
pub fn cap_route(g: &LoadedGraph, threshold: f64, m: &MeasureExpr, s: NodeId, t: NodeId, policy: WeightPolicy) -> Result<RouteResult> {
    endpoints(g.graph(), s, t)?;
    check_coverable(m)?;
    let core = congested_core(g, threshold)?;
    let rho_star = max_density(&core.core, m)?;
    let cover = if core.is_empty() {
        DenseCover { components: Vec::new(), cover: SubgraphRef::empty(), exactness: Exactness::Exact, measure: m.clone(), rho0: rho_star }
    } else {
        core_cover(&core, m, rho_star)?
    };
    let outcome = route_around(g, &cover.cover, cover.exactness, s, t, policy)?;
    Ok(RouteResult { outcome, rho0: rho_star, cover, threshold, weights: policy })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DensityIndexResult {
    /// The density index: the smallest grid guard whose cover the path avoids.
    pub value: DensityValue,
    /// Guard values whose covers were evaluated, in ascending order.
    pub witness_rho0_grid: Vec<DensityValue>,
    pub exactness: Exactness,
}

/// Density index of a path: the smallest guard value on the candidate grid
/// such that the path avoids the dense cover of the congested core.
pub fn density_index(g: &LoadedGraph, threshold: f64, m: &MeasureExpr, path: &[NodeId]) -> Result<DensityIndexResult> {
    validate_path(g.graph(), path)?;
    check_coverable(m)?;
    let core = congested_core(g, threshold)?;
    let on_path: SubgraphRef = path.iter().copied().collect();
    let in_core: SubgraphRef = core.origin.iter().copied().filter(|v| on_path.contains(*v)).collect();
    if in_core.is_empty() {
        return Ok(DensityIndexResult {
            value: DensityValue::ZERO,
            witness_rho0_grid: vec![DensityValue::ZERO],
            exactness: Exactness::Exact,
        });
    }
    let rho_star = max_density(&core.core, m)?;
    let grid = candidate_grid(&core.core, m, rho_star);
    let mut examined = Vec::new();
    let mut exactness = Exactness::Exact;
    let mut avoids = |rho0: DensityValue| -> bool {
        let cover = dense_cover(&core.core, m, rho0).expect("measure checked").map_through(&core.origin);
        if !cover.exactness.is_exact() {
            exactness = Exactness::OverApproximate;
        }
        examined.push(rho0);
        !cover.cover.intersects(&in_core)
    };
    // the last grid value exceeds every attainable density
    let (mut lo, mut hi) = (0usize, grid.len() - 1);
    while lo < hi {
        let mid = (lo + hi) / 2;
        if avoids(grid[mid]) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    examined.sort();
    examined.dedup();
    Ok(DensityIndexResult { value: grid[lo], witness_rho0_grid: examined, exactness })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::density::Measure;

    fn node(g: &LoadedGraph, l: &str) -> NodeId {
        g.graph().node(l).unwrap()
    }

    #[test]
    fn dijkstra_examples() {
        let g = Graph::with_numeric_labels(3, &[(0, 1), (1, 2), (0, 2)]).unwrap();
        // edges sorted: (0,1) (0,2) (1,2)
        let out = dijkstra(&g, &[1.0, 3.0, 1.0], NodeId(0), NodeId(2)).unwrap();
        assert_eq!(out, RouteOutcome::Found(Path { nodes: vec![NodeId(0), NodeId(1), NodeId(2)], weight: 2.0 }));

        let iso = Graph::with_numeric_labels(2, &[]).unwrap();
        assert_eq!(
            dijkstra(&iso, &[], NodeId(0), NodeId(1)).unwrap(),
            RouteOutcome::NoPath { reason: NoPathReason::Disconnected, certified: true }
        );

        let single = Graph::with_numeric_labels(2, &[(0, 1)]).unwrap();
        assert_eq!(
            dijkstra(&single, &[0.4], NodeId(0), NodeId(1)).unwrap(),
            RouteOutcome::Found(Path { nodes: vec![NodeId(0), NodeId(1)], weight: 0.4 })
        );
    }

    #[test]
    fn dijkstra_errors() {
        let g = Graph::with_numeric_labels(2, &[(0, 1)]).unwrap();
        assert!(matches!(dijkstra(&g, &[-1.0], NodeId(0), NodeId(1)), Err(Error::NegativeWeight(_))));
        assert!(matches!(dijkstra(&g, &[1.0], NodeId(0), NodeId(5)), Err(Error::UnknownNode(_))));
        assert!(matches!(dijkstra(&g, &[1.0], NodeId(0), NodeId(0)), Err(Error::SameEndpoints)));
    }

    #[test]
    fn ties_prefer_smaller_indices() {
        // square 0-1-3 and 0-2-3, all unit
        let g = Graph::with_numeric_labels(4, &[(0, 2), (2, 3), (0, 1), (1, 3)]).unwrap();
        let out = dijkstra(&g, &[1.0; 4], NodeId(0), NodeId(3)).unwrap();
        assert_eq!(out.path().unwrap().nodes, vec![NodeId(0), NodeId(1), NodeId(3)]);
    }

    #[test]
    fn zero_weight_edges_terminate() {
        let g = Graph::with_numeric_labels(4, &[(0, 1), (1, 2), (0, 2), (2, 3)]).unwrap();
        let out = dijkstra(&g, &[0.0, 0.0, 0.0, 0.0], NodeId(0), NodeId(3)).unwrap();
        assert_eq!(out.path().unwrap().nodes, vec![NodeId(0), NodeId(2), NodeId(3)]);
    }

    /// s - a0 - a1 - t through a hot K4, and a four-hop cold detour.
    fn detour_instance() -> LoadedGraph {
        let mut e = vec![("s", "a0", 0.1), ("a1", "t", 0.1)];
        let a = ["a0", "a1", "a2", "a3"];
        let b = ["b0", "b1", "b2", "b3"];
        for blk in [a, b] {
            for i in 0..4 {
                for j in i + 1..4 {
                    e.push((blk[i], blk[j], 0.9));
                }
            }
        }
        e.push(("a2", "b0", 0.9));
        e.extend([("s", "d1", 0.1), ("d1", "d2", 0.1), ("d2", "d3", 0.1), ("d3", "t", 0.1)]);
        LoadedGraph::from_labeled::<&str>(&[], &e).unwrap()
    }

    #[test]
    fn detour_avoids_three_cores() {
        let g = detour_instance();
        let (s, t) = (node(&g, "s"), node(&g, "t"));
        let r = route_with_density_index(&g, 0.7, &Measure::MinDegree.into(), 3.into(), s, t, WeightPolicy::Unit).unwrap();
        assert_eq!(r.cover.cover.len(), 8);
        assert_eq!(r.outcome.path().unwrap().labels(g.graph()), vec!["s", "d1", "d2", "d3", "t"]);
        assert!(r.certified());

        let plain = dijkstra(g.graph(), &WeightPolicy::Unit.weights(&g), s, t).unwrap();
        assert_eq!(plain.path().unwrap().labels(g.graph()), vec!["s", "a0", "a1", "t"]);
    }

    #[test]
    fn large_rho0_is_plain_dijkstra() {
        let g = detour_instance();
        let (s, t) = (node(&g, "s"), node(&g, "t"));
        let r = route_with_density_index(&g, 0.7, &Measure::MinDegree.into(), 99.into(), s, t, WeightPolicy::Unit).unwrap();
        assert!(r.cover.cover.is_empty());
        let plain = dijkstra(g.graph(), &WeightPolicy::Unit.weights(&g), s, t).unwrap();
        assert_eq!(r.outcome, plain);
    }

    #[test]
    fn endpoint_in_cover() {
        let g = detour_instance();
        let r = route_with_density_index(&g, 0.7, &Measure::MinDegree.into(), 3.into(), node(&g, "a0"), node(&g, "t"), WeightPolicy::Unit)
            .unwrap();
        assert_eq!(r.outcome, RouteOutcome::NoPath { reason: NoPathReason::EndpointRemoved, certified: true });
    }

    fn triangle_pendant_net() -> LoadedGraph {
        // core: triangle x,y,z plus pendant p attached to z; s, t outside
        LoadedGraph::from_labeled::<&str>(
            &[],
            &[
                ("x", "y", 0.9),
                ("y", "z", 0.9),
                ("x", "z", 0.9),
                ("z", "p", 0.9),
                ("s", "p", 0.1),
                ("p", "t", 0.1),
                ("s", "x", 0.1),
                ("x", "t", 0.1),
                ("s", "q", 0.1),
                ("q", "t", 0.1),
            ],
        )
        .unwrap()
    }

    #[test]
    fn cap_route_avoids_two_core() {
        let g = triangle_pendant_net();
        let r = cap_route(&g, 0.7, &Measure::MinDegree.into(), node(&g, "s"), node(&g, "t"), WeightPolicy::Unit).unwrap();
        assert_eq!(r.rho0, 2.into());
        let cover: Vec<&str> = r.cover.cover.iter().map(|v| g.graph().label(v)).collect();
        assert_eq!(cover, vec!["x", "y", "z"]);
        assert_eq!(r.outcome.path().unwrap().labels(g.graph()), vec!["s", "p", "t"]);
    }

    #[test]
    fn cap_route_empty_core_is_dijkstra() {
        let g = triangle_pendant_net();
        let (s, t) = (node(&g, "s"), node(&g, "t"));
        let r = cap_route(&g, 5.0, &Measure::MinDegree.into(), s, t, WeightPolicy::Load).unwrap();
        assert_eq!(r.outcome, dijkstra(g.graph(), g.loads(), s, t).unwrap());
    }

    #[test]
    fn cap_route_single_edge_core() {
        let g = LoadedGraph::from_labeled::<&str>(
            &[],
            &[("s", "a", 0.1), ("a", "b", 0.9), ("b", "t", 0.1), ("s", "c", 0.1), ("c", "d", 0.1), ("d", "t", 0.1)],
        )
        .unwrap();
        let r = cap_route(&g, 0.7, &Measure::MinDegree.into(), node(&g, "s"), node(&g, "t"), WeightPolicy::Unit).unwrap();
        assert_eq!(r.rho0, 1.into());
        assert_eq!(r.cover.cover.len(), 2);
        assert_eq!(r.outcome.path().unwrap().labels(g.graph()), vec!["s", "c", "d", "t"]);
    }

    #[test]
    fn density_index_examples() {
        let g = triangle_pendant_net();
        let mindeg: MeasureExpr = Measure::MinDegree.into();
        let path = |ls: &[&str]| ls.iter().map(|l| node(&g, l)).collect::<Vec<_>>();
        assert_eq!(density_index(&g, 0.7, &mindeg, &path(&["s", "q", "t"])).unwrap().value, 0.into());
        assert_eq!(density_index(&g, 0.7, &mindeg, &path(&["s", "p", "t"])).unwrap().value, 2.into());
        assert_eq!(density_index(&g, 0.7, &mindeg, &path(&["s", "x", "t"])).unwrap().value, 3.into());
        assert!(matches!(density_index(&g, 0.7, &mindeg, &path(&["s", "t"])), Err(Error::InvalidPath(_))));
    }

    #[test]
    fn density_index_through_three_core() {
        let g = detour_instance();
        let p: Vec<NodeId> = ["s", "a0", "a1", "t"].iter().map(|l| node(&g, l)).collect();
        let idx = density_index(&g, 0.7, &Measure::MinDegree.into(), &p).unwrap();
        assert_eq!(idx.value, 4.into());
    }
}
