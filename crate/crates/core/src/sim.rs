//! Synthetic networks and a local-vs-global routing comparison.
//!
//! The local policy is a minimum-load path, which only sees individual
//! links. The global policy removes the dense cover of the congested core
//! before routing.

use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::density::{DensityValue, MeasureExpr};
use crate::error::{Error, Result};
use crate::graph::{Graph, LoadedGraph, NodeId, SubgraphRef};
use crate::routing::{core_cover, density_index, dijkstra, route_with_density_index, RouteOutcome, WeightPolicy};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Topology {
    /// G(n, p): `nodes` nodes, each pair joined with probability `edge_param`.
    Random,
    /// Preferential attachment: each new node links to `edge_param` existing
    /// nodes chosen proportionally to degree.
    Preferential,
    /// `nodes / edge_param` rows of `edge_param` columns.
    Grid,
    /// Two cliques of `nodes` nodes joined by a path of `edge_param` edges.
    Barbell,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum LoadModel {
    /// Every link load drawn uniformly from `[low, high]`.
    Uniform { low: f64, high: f64 },
    /// Links inside the hotspot region draw from `hot`, all others from
    /// `cold`. The region is the first clique of a barbell, otherwise the
    /// highest-degree node with its neighbours.
    Hotspot { hot: (f64, f64), cold: (f64, f64) },
}

fn default_weights() -> WeightPolicy {
    WeightPolicy::Load
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioConfig {
    pub topology: Topology,
    pub nodes: usize,
    pub edge_param: f64,
    pub load: LoadModel,
    pub threshold: f64,
    #[serde(with = "measure_text")]
    pub measure: MeasureExpr,
    #[serde(with = "density_text")]
    pub rho0: DensityValue,
    pub queries: usize,
    pub seed: u64,
    /// Weighting used by the global policy's shortest-path phase.
    #[serde(default = "default_weights")]
    pub weights: WeightPolicy,
    /// Explicit (source, target) labels; replaces random sampling.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pairs: Option<Vec<(String, String)>>,
}

mod measure_text {
    use super::MeasureExpr;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(m: &MeasureExpr, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(m)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<MeasureExpr, D::Error> {
        let text = String::deserialize(d)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}

mod density_text {
    use super::DensityValue;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &DensityValue, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(v)
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Raw {
        Int(u64),
        Float(f64),
        Text(String),
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<DensityValue, D::Error> {
        let text = match Raw::deserialize(d)? {
            Raw::Int(i) => i.to_string(),
            Raw::Float(f) => f.to_string(),
            Raw::Text(t) => t,
        };
        text.parse().map_err(serde::de::Error::custom)
    }
}

fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}

impl ScenarioConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.threshold >= 0.0 && self.threshold.is_finite()) {
            return Err(invalid("threshold must be finite and >= 0"));
        }
        let whole = |x: f64| x >= 1.0 && x.fract() == 0.0;
        match self.topology {
            Topology::Random => {
                if self.nodes < 2 || !(0.0..=1.0).contains(&self.edge_param) {
                    return Err(invalid("random topology needs nodes >= 2 and edge_param in [0, 1]"));
                }
            }
            Topology::Preferential => {
                if !whole(self.edge_param) || self.nodes <= self.edge_param as usize {
                    return Err(invalid("preferential topology needs an integer edge_param >= 1 below nodes"));
                }
            }
            Topology::Grid => {
                if !whole(self.edge_param) || self.nodes == 0 || !self.nodes.is_multiple_of(self.edge_param as usize) {
                    return Err(invalid("grid topology needs edge_param (columns) dividing nodes"));
                }
            }
            Topology::Barbell => {
                if self.nodes < 2 || !whole(self.edge_param) {
                    return Err(invalid("barbell topology needs block size >= 2 and bridge length >= 1"));
                }
            }
        }
        let range_ok = |(lo, hi): (f64, f64)| lo.is_finite() && hi.is_finite() && 0.0 <= lo && lo <= hi;
        match &self.load {
            LoadModel::Uniform { low, high } => {
                if !range_ok((*low, *high)) {
                    return Err(invalid("uniform load range must satisfy 0 <= low <= high"));
                }
            }
            LoadModel::Hotspot { hot, cold } => {
                if !range_ok(*hot) || !range_ok(*cold) {
                    return Err(invalid("hotspot load ranges must satisfy 0 <= low <= high"));
                }
                if !crate::graph::is_congested(hot.0, self.threshold) || crate::graph::is_congested(cold.1, self.threshold) {
                    return Err(invalid("hotspot bands must straddle the threshold (hot above, cold not above)"));
                }
            }
        }
        self.measure.validate()?;
        Ok(())
    }
}

fn topology_edges(cfg: &ScenarioConfig, rng: &mut ChaCha8Rng) -> (usize, Vec<(usize, usize)>, Option<Vec<usize>>) {
    let n = cfg.nodes;
    let mut edges = Vec::new();
    match cfg.topology {
        Topology::Random => {
            for i in 0..n {
                for j in i + 1..n {
                    if rng.gen_bool(cfg.edge_param) {
                        edges.push((i, j));
                    }
                }
            }
            (n, edges, None)
        }
        Topology::Preferential => {
            let m = cfg.edge_param as usize;
            // seed clique on m + 1 nodes
            let mut endpoints = Vec::new();
            for i in 0..=m {
                for j in i + 1..=m {
                    edges.push((i, j));
                    endpoints.extend([i, j]);
                }
            }
            for v in m + 1..n {
                let mut targets: Vec<usize> = Vec::with_capacity(m);
                while targets.len() < m {
                    let pick = *endpoints.choose(rng).expect("seed clique has edges");
                    if !targets.contains(&pick) {
                        targets.push(pick);
                    }
                }
                targets.sort_unstable();
                for u in targets {
                    edges.push((u, v));
                    endpoints.extend([u, v]);
                }
            }
            (n, edges, None)
        }
        Topology::Grid => {
            let cols = cfg.edge_param as usize;
            let rows = n / cols;
            for r in 0..rows {
                for c in 0..cols {
                    let v = r * cols + c;
                    if c + 1 < cols {
                        edges.push((v, v + 1));
                    }
                    if r + 1 < rows {
                        edges.push((v, v + cols));
                    }
                }
            }
            (n, edges, None)
        }
        Topology::Barbell => {
            let b = n;
            let bridge = cfg.edge_param as usize;
            for base in [0, b] {
                for i in 0..b {
                    for j in i + 1..b {
                        edges.push((base + i, base + j));
                    }
                }
            }
            // path 0 - 2b - 2b+1 - ... - b with `bridge` edges
            let mut prev = 0;
            for k in 0..bridge - 1 {
                let mid = 2 * b + k;
                edges.push((prev, mid));
                prev = mid;
            }
            edges.push((prev, b));
            (2 * b + bridge - 1, edges, Some((0..b).collect()))
        }
    }
}

fn sample(rng: &mut ChaCha8Rng, (lo, hi): (f64, f64)) -> f64 {
    if lo == hi {
        lo
    } else {
        rng.gen_range(lo..=hi)
    }
}

/// Builds the scenario's network. The same config always yields the same
/// graph.
pub fn generate_scenario(cfg: &ScenarioConfig) -> Result<LoadedGraph> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let (n, edges, block) = topology_edges(cfg, &mut rng);
    let graph = Graph::from_edges((0..n).map(|i| format!("n{i}")).collect(), &edges)?;
    let loads = match &cfg.load {
        LoadModel::Uniform { low, high } => graph.edges().iter().map(|_| sample(&mut rng, (*low, *high))).collect(),
        LoadModel::Hotspot { hot, cold } => {
            let region: SubgraphRef = match block {
                Some(nodes) => nodes.into_iter().map(NodeId).collect(),
                None => {
                    // the busiest node and its neighbours; ties go to the smaller index
                    let hub = graph.nodes().max_by_key(|&v| (graph.degree(v), std::cmp::Reverse(v))).expect("validated non-empty");
                    std::iter::once(hub).chain(graph.neighbors(hub).iter().copied()).collect()
                }
            };
            graph
                .edges()
                .iter()
                .map(|&(u, v)| if region.contains(u) && region.contains(v) { sample(&mut rng, *hot) } else { sample(&mut rng, *cold) })
                .collect()
        }
    };
    LoadedGraph::new(graph, loads)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PolicyRecord {
    pub status: &'static str,
    pub path: Vec<String>,
    pub hops: Option<usize>,
    pub weight: Option<f64>,
    pub density_index: Option<DensityValue>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QueryRecord {
    pub query: usize,
    pub source: String,
    pub target: String,
    pub local: PolicyRecord,
    pub global: PolicyRecord,
    pub global_reason: Option<crate::routing::NoPathReason>,
    pub global_certified: bool,
    pub local_hits_cover: bool,
    pub hop_stretch: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Aggregates {
    pub queries: usize,
    pub cover_size: usize,
    pub cover_exact: bool,
    /// Among queries with a local path: share whose path meets the cover.
    pub local_hits_cover_fraction: f64,
    /// Mean of global hops / local hops over queries where both found paths.
    pub mean_hop_stretch: Option<f64>,
    pub global_no_path_fraction: f64,
    /// Global paths meeting the cover; must be zero.
    pub global_cover_violations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonReport {
    pub measure: MeasureExpr,
    pub rho0: DensityValue,
    pub threshold: f64,
    pub global_weights: WeightPolicy,
    pub records: Vec<QueryRecord>,
    pub aggregates: Aggregates,
}

fn query_pairs(g: &LoadedGraph, cfg: &ScenarioConfig) -> Result<Vec<(NodeId, NodeId)>> {
    let graph = g.graph();
    if let Some(pairs) = &cfg.pairs {
        return pairs
            .iter()
            .map(|(s, t)| {
                let (s, t) = (graph.require_node(s)?, graph.require_node(t)?);
                if s == t {
                    return Err(Error::SameEndpoints);
                }
                Ok((s, t))
            })
            .collect();
    }
    if graph.node_count() < 2 {
        return Err(invalid("need at least two nodes to sample queries"));
    }
    // separate stream from generation so query choice does not shift loads
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x0005_eed0_f9e7);
    let n = graph.node_count();
    Ok((0..cfg.queries)
        .map(|_| {
            let s = rng.gen_range(0..n);
            let mut t = rng.gen_range(0..n - 1);
            if t >= s {
                t += 1;
            }
            (NodeId(s), NodeId(t))
        })
        .collect())
}

/// Runs both policies on every query and summarises the contrast.
pub fn compare_policies(g: &LoadedGraph, cfg: &ScenarioConfig) -> Result<ComparisonReport> {
    if cfg.threshold.is_nan() || cfg.threshold < 0.0 {
        return Err(invalid("threshold must be >= 0"));
    }
    crate::dense::check_coverable(&cfg.measure)?;
    let graph = g.graph();
    let core = crate::graph::congested_core(g, cfg.threshold)?;
    let cover = core_cover(&core, &cfg.measure, cfg.rho0)?;
    let pairs = query_pairs(g, cfg)?;

    let labels = |p: &[NodeId]| p.iter().map(|&v| graph.label(v).to_string()).collect::<Vec<_>>();
    let record_for = |outcome: &RouteOutcome| -> Result<PolicyRecord> {
        Ok(match outcome {
            RouteOutcome::Found(p) => PolicyRecord {
                status: "found",
                path: labels(&p.nodes),
                hops: Some(p.hops()),
                weight: Some(p.weight),
                density_index: Some(density_index(g, cfg.threshold, &cfg.measure, &p.nodes)?.value),
            },
            RouteOutcome::NoPath { .. } => PolicyRecord { status: "no_path", path: vec![], hops: None, weight: None, density_index: None },
        })
    };

    let mut records = Vec::with_capacity(pairs.len());
    for (i, &(s, t)) in pairs.iter().enumerate() {
        let local = dijkstra(graph, g.loads(), s, t)?;
        let global = route_with_density_index(g, cfg.threshold, &cfg.measure, cfg.rho0, s, t, cfg.weights)?;
        let local_hits_cover = local.path().is_some_and(|p| p.nodes.iter().any(|&v| cover.cover.contains(v)));
        let hop_stretch = match (local.path(), global.outcome.path()) {
            (Some(l), Some(gp)) if l.hops() > 0 => Some(gp.hops() as f64 / l.hops() as f64),
            _ => None,
        };
        let (global_reason, global_certified) = match &global.outcome {
            RouteOutcome::Found(_) => (None, true),
            RouteOutcome::NoPath { reason, certified } => (Some(*reason), *certified),
        };
        records.push(QueryRecord {
            query: i,
            source: graph.label(s).to_string(),
            target: graph.label(t).to_string(),
            local: record_for(&local)?,
            global: record_for(&global.outcome)?,
            global_reason,
            global_certified,
            local_hits_cover,
            hop_stretch,
        });
    }

    let found_local = records.iter().filter(|r| r.local.status == "found").count();
    let hits = records.iter().filter(|r| r.local_hits_cover).count();
    let stretches: Vec<f64> = records.iter().filter_map(|r| r.hop_stretch).collect();
    let no_path = records.iter().filter(|r| r.global.status == "no_path").count();
    let violations =
        records.iter().filter(|r| r.global.path.iter().any(|l| cover.cover.contains(graph.node(l).expect("label from graph")))).count();
    let ratio = |a: usize, b: usize| if b == 0 { 0.0 } else { a as f64 / b as f64 };
    let aggregates = Aggregates {
        queries: records.len(),
        cover_size: cover.cover.len(),
        cover_exact: cover.exactness.is_exact(),
        local_hits_cover_fraction: ratio(hits, found_local),
        mean_hop_stretch: if stretches.is_empty() { None } else { Some(stretches.iter().sum::<f64>() / stretches.len() as f64) },
        global_no_path_fraction: ratio(no_path, records.len()),
        global_cover_violations: violations,
    };
    Ok(ComparisonReport {
        measure: cfg.measure.clone(),
        rho0: cfg.rho0,
        threshold: cfg.threshold,
        global_weights: cfg.weights,
        records,
        aggregates,
    })
}

impl ComparisonReport {
    /// One row per query.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(
            "query,source,target,local_status,local_hops,local_weight,local_index,global_status,global_hops,global_weight,global_index,local_hits_cover,hop_stretch\n",
        );
        let opt = |v: Option<String>| v.unwrap_or_default();
        for r in &self.records {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{},{},{},{}",
                r.query,
                r.source,
                r.target,
                r.local.status,
                opt(r.local.hops.map(|h| h.to_string())),
                opt(r.local.weight.map(|w| w.to_string())),
                opt(r.local.density_index.map(|d| d.to_string())),
                r.global.status,
                opt(r.global.hops.map(|h| h.to_string())),
                opt(r.global.weight.map(|w| w.to_string())),
                opt(r.global.density_index.map(|d| d.to_string())),
                r.local_hits_cover,
                opt(r.hop_stretch.map(|s| s.to_string())),
            );
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::congested_core;

    fn base(topology: Topology, nodes: usize, edge_param: f64, load: LoadModel) -> ScenarioConfig {
        ScenarioConfig {
            topology,
            nodes,
            edge_param,
            load,
            threshold: 0.7,
            measure: "mindeg".parse().unwrap(),
            rho0: 3.into(),
            queries: 10,
            seed: 7,
            weights: WeightPolicy::Load,
            pairs: None,
        }
    }

    #[test]
    fn barbell_hotspot_core_is_the_block() {
        let cfg = base(Topology::Barbell, 4, 4.0, LoadModel::Hotspot { hot: (0.8, 1.0), cold: (0.0, 0.5) });
        let g = generate_scenario(&cfg).unwrap();
        assert_eq!(g.graph().node_count(), 11);
        let core = congested_core(&g, 0.7).unwrap();
        assert_eq!(core.core.labels(), &["n0", "n1", "n2", "n3"]);
        assert_eq!(core.core.edge_count(), 6);
    }

    #[test]
    fn generation_is_deterministic() {
        for topo in [Topology::Random, Topology::Preferential] {
            let cfg = base(topo, 20, if topo == Topology::Random { 0.3 } else { 2.0 }, LoadModel::Uniform { low: 0.0, high: 1.0 });
            assert_eq!(generate_scenario(&cfg).unwrap(), generate_scenario(&cfg).unwrap());
            let mut other = cfg.clone();
            other.seed += 1;
            assert_ne!(generate_scenario(&cfg).unwrap(), generate_scenario(&other).unwrap());
        }
    }

    #[test]
    fn cool_grid_has_empty_core() {
        let cfg = base(Topology::Grid, 16, 4.0, LoadModel::Uniform { low: 0.0, high: 0.5 });
        let g = generate_scenario(&cfg).unwrap();
        assert_eq!(g.graph().edge_count(), 24);
        assert!(congested_core(&g, 0.7).unwrap().is_empty());
    }

    #[test]
    fn preferential_attachment_edge_count() {
        let cfg = base(Topology::Preferential, 30, 2.0, LoadModel::Uniform { low: 0.0, high: 1.0 });
        let g = generate_scenario(&cfg).unwrap();
        assert_eq!(g.graph().edge_count(), 3 + 2 * 27);
    }

    #[test]
    fn invalid_parameters() {
        let bad = [
            base(Topology::Random, 10, 1.5, LoadModel::Uniform { low: 0.0, high: 1.0 }),
            base(Topology::Grid, 10, 4.0, LoadModel::Uniform { low: 0.0, high: 1.0 }),
            base(Topology::Preferential, 3, 3.0, LoadModel::Uniform { low: 0.0, high: 1.0 }),
            base(Topology::Barbell, 4, 0.0, LoadModel::Uniform { low: 0.0, high: 1.0 }),
            base(Topology::Barbell, 4, 2.0, LoadModel::Uniform { low: 0.6, high: 0.1 }),
            base(Topology::Barbell, 4, 2.0, LoadModel::Hotspot { hot: (0.6, 0.9), cold: (0.0, 0.5) }),
            base(Topology::Barbell, 4, 2.0, LoadModel::Hotspot { hot: (0.8, 0.9), cold: (0.0, 0.75) }),
        ];
        for cfg in bad {
            assert!(matches!(generate_scenario(&cfg), Err(Error::InvalidParameter(_))), "{cfg:?}");
        }
    }

    #[test]
    fn empty_core_policies_agree() {
        let cfg = base(Topology::Grid, 16, 4.0, LoadModel::Uniform { low: 0.0, high: 0.5 });
        let g = generate_scenario(&cfg).unwrap();
        let report = compare_policies(&g, &cfg).unwrap();
        assert_eq!(report.records.len(), 10);
        for r in &report.records {
            assert_eq!(r.local.path, r.global.path);
        }
        assert_eq!(report.aggregates.cover_size, 0);
    }

    #[test]
    fn config_round_trips_through_json() {
        let mut cfg = base(Topology::Barbell, 4, 4.0, LoadModel::Hotspot { hot: (0.8, 1.0), cold: (0.0, 0.5) });
        cfg.rho0 = DensityValue::new(3, 2);
        let text = serde_json::to_string(&cfg).unwrap();
        let back: ScenarioConfig = serde_json::from_str(&text).unwrap();
        assert_eq!(back, cfg);
        let numeric: ScenarioConfig = serde_json::from_str(&text.replace("\"3/2\"", "1.5")).unwrap();
        assert_eq!(numeric.rho0, DensityValue::new(3, 2));
    }
}
