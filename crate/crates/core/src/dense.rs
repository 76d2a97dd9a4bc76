//! Listing maximal dense subgraphs: k-cores, maximal k-edge-connected
//! subgraphs, densest edge-density subgraphs, and the dense cover that
//! routing removes from the network.

use serde::Serialize;

use crate::density::{DensityValue, Measure, MeasureExpr};
use crate::error::{Error, Result};
use crate::flow::FlowNetwork;
use crate::graph::{Graph, NodeId, SubgraphRef};
use crate::mincut::stoer_wagner;

/// Core number of every node, indexed by node.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CoreDecomposition {
    pub core: Vec<usize>,
}

impl CoreDecomposition {
    pub fn core_number(&self, v: NodeId) -> usize {
        self.core[v.0]
    }

    pub fn k_core(&self, k: usize) -> SubgraphRef {
        self.core.iter().enumerate().filter(|(_, &c)| c >= k).map(|(i, _)| NodeId(i)).collect()
    }

    /// Largest core number, or `None` for the empty graph.
    pub fn max_core(&self) -> Option<usize> {
        self.core.iter().copied().max()
    }
}

/// Peeling decomposition with degree buckets, O(n + m).
pub fn core_decomposition(g: &Graph) -> CoreDecomposition {
    let n = g.node_count();
    if n == 0 {
        return CoreDecomposition { core: Vec::new() };
    }
    let mut degree: Vec<usize> = g.nodes().map(|v| g.degree(v)).collect();
    let max_deg = degree.iter().copied().max().unwrap_or(0);

    // nodes sorted by degree, with bucket start offsets and positions
    let mut bin = vec![0usize; max_deg + 1];
    for &d in &degree {
        bin[d] += 1;
    }
    let mut start = 0;
    for b in bin.iter_mut() {
        let count = *b;
        *b = start;
        start += count;
    }
    let mut pos = vec![0usize; n];
    let mut order = vec![0usize; n];
    for v in 0..n {
        pos[v] = bin[degree[v]];
        order[pos[v]] = v;
        bin[degree[v]] += 1;
    }
    for d in (1..=max_deg).rev() {
        bin[d] = bin[d - 1];
    }
    bin[0] = 0;

    for i in 0..n {
        let v = order[i];
        for &w in g.neighbors(NodeId(v)) {
            let w = w.0;
            if degree[w] > degree[v] {
                // move w to the front of its bucket, then shrink its degree
                let dw = degree[w];
                let pw = pos[w];
                let ps = bin[dw];
                let u = order[ps];
                if u != w {
                    order[pw] = u;
                    order[ps] = w;
                    pos[u] = pw;
                    pos[w] = ps;
                }
                bin[dw] += 1;
                degree[w] -= 1;
            }
        }
    }
    CoreDecomposition { core: degree }
}

pub fn k_core(g: &Graph, k: usize) -> SubgraphRef {
    core_decomposition(g).k_core(k)
}

/// Largest k with a non-empty k-core.
pub fn degeneracy(g: &Graph) -> Result<usize> {
    core_decomposition(g).max_core().ok_or(Error::EmptyGraph)
}

/// All maximal node sets inducing k-edge-connected subgraphs (k >= 1),
/// pairwise disjoint, singletons excluded, sorted by smallest node.
///
/// Works on the k-core (a k-edge-connected subgraph has minimum degree at
/// least k) and splits components along global minimum cuts until every
/// piece has connectivity at least k.
pub fn maximal_k_edge_connected(g: &Graph, k: usize) -> Vec<SubgraphRef> {
    if k == 0 {
        // every connected component is 0-edge-connected; isolated nodes too
        return g.connected_components();
    }
    let mut out = Vec::new();
    let mut stack: Vec<SubgraphRef> = vec![k_core(g, k)];
    while let Some(set) = stack.pop() {
        if set.len() < 2 {
            continue;
        }
        let (sub, origin) = g.restrict(&set.to_mask(g.node_count()));
        let comps = sub.connected_components();
        if comps.len() > 1 {
            stack.extend(comps.into_iter().map(|c| c.map_through(&origin)));
            continue;
        }
        let cut = stoer_wagner(&sub).expect("at least two nodes");
        if cut.value as usize >= k {
            out.push(set);
            continue;
        }
        let a = cut.side.map_through(&origin);
        let b = set.difference(&a);
        // peel again: removing the cut can drop degrees below k
        for part in [a, b] {
            let (piece, porigin) = g.restrict(&part.to_mask(g.node_count()));
            stack.push(k_core(&piece, k).map_through(&porigin));
        }
    }
    out.sort();
    out
}

/// Outcome of maximising |E(S)| - rho|S| over node sets.
#[derive(Debug, Clone)]
struct ClosureOptimum {
    /// Optimal value scaled by rho's denominator.
    scaled_value: i64,
    /// The maximal optimal node set.
    nodes: SubgraphRef,
}

/// Maximises |E(S)| - rho|S| over S (with `forced` in S when given) as a
/// max-closure problem: one flow node per edge worth 1, one per vertex
/// costing rho, each edge requiring both endpoints.
fn max_closure(g: &Graph, rho: DensityValue, forced: Option<NodeId>) -> ClosureOptimum {
    let n = g.node_count();
    let m = g.edge_count();
    let (a, b) = (rho.numer(), rho.denom());
    let inf = b * m as i64 + a * n as i64 + 1;
    let (src, sink) = (0, 1);
    let vertex = |v: usize| 2 + v;
    let mut net = FlowNetwork::new(2 + n + m);
    for (i, &(u, v)) in g.edges().iter().enumerate() {
        let e = 2 + n + i;
        net.add_arc(src, e, b);
        net.add_arc(e, vertex(u.0), inf);
        net.add_arc(e, vertex(v.0), inf);
    }
    for v in 0..n {
        if a > 0 {
            net.add_arc(vertex(v), sink, a);
        }
    }
    if let Some(f) = forced {
        net.add_arc(src, vertex(f.0), inf);
    }
    let cut = net.max_flow(src, sink);
    let side = net.maximal_source_side(sink);
    ClosureOptimum { scaled_value: b * m as i64 - cut, nodes: (0..n).filter(|&v| side[vertex(v)]).map(NodeId).collect() }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DensestSubgraph {
    #[serde(skip)]
    pub nodes: SubgraphRef,
    pub density: DensityValue,
}

fn density_of(g: &Graph, set: &SubgraphRef) -> DensityValue {
    let e = g.edges().iter().filter(|&&(u, v)| set.contains(u) && set.contains(v)).count();
    DensityValue::new(e as i64, set.len() as i64)
}

/// The unique maximal node set of maximum edge density.
///
/// Dinkelbach iteration: starting from the whole graph's density, replace
/// the guess by the density of the best closure until no set beats it.
/// The maximal optimal set at the final guess is the union of all densest
/// subgraphs.
pub fn densest_edge_density_subgraph(g: &Graph) -> Result<DensestSubgraph> {
    if g.is_empty() {
        return Err(Error::EmptyGraph);
    }
    if g.edge_count() == 0 {
        return Err(Error::Edgeless);
    }
    let mut rho = density_of(g, &g.all_nodes());
    loop {
        let best = max_closure(g, rho, None);
        if best.scaled_value > 0 {
            rho = density_of(g, &best.nodes);
            continue;
        }
        return Ok(DensestSubgraph { nodes: best.nodes, density: rho });
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Exactness {
    /// Every cover node lies in some qualifying subgraph.
    Exact,
    /// Sound, but the cover may contain nodes of no qualifying subgraph.
    OverApproximate,
}

impl Exactness {
    pub fn is_exact(self) -> bool {
        self == Exactness::Exact
    }
}

/// Maximal subgraphs with density >= rho0 and their union.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseCover {
    pub components: Vec<SubgraphRef>,
    pub cover: SubgraphRef,
    pub exactness: Exactness,
    pub measure: MeasureExpr,
    pub rho0: DensityValue,
}

impl DenseCover {
    fn from_components(mut components: Vec<SubgraphRef>, exactness: Exactness, m: &MeasureExpr, rho0: DensityValue) -> Self {
        components.retain(|c| !c.is_empty());
        components.sort();
        components.dedup();
        let cover = components.iter().fold(SubgraphRef::empty(), |acc, c| acc.union(c));
        DenseCover { components, cover, exactness, measure: m.clone(), rho0 }
    }

    /// Translates components and cover into the node space of a host graph.
    pub fn map_through(&self, origin: &[NodeId]) -> DenseCover {
        let mut components: Vec<SubgraphRef> = self.components.iter().map(|c| c.map_through(origin)).collect();
        components.sort();
        DenseCover {
            components,
            cover: self.cover.map_through(origin),
            exactness: self.exactness,
            measure: self.measure.clone(),
            rho0: self.rho0,
        }
    }
}

/// Rejects leaves that have no listing algorithm.
pub fn check_coverable(m: &MeasureExpr) -> Result<()> {
    m.validate()?;
    for leaf in m.leaves() {
        if matches!(leaf, Measure::KCliqueDensity(_) | Measure::SquaredDegree) {
            return Err(Error::UnsupportedMeasure(leaf.to_string()));
        }
    }
    Ok(())
}

/// Node cover of every subgraph S of `g` with `m(S) >= rho0`.
///
/// Leaves and `max` nodes give exact covers. A `min` node intersects its
/// children by alternating restriction to a fixpoint, which is sound but
/// may keep nodes that qualify under each child separately and never
/// jointly; it is reported as over-approximate.
pub fn dense_cover(g: &Graph, m: &MeasureExpr, rho0: DensityValue) -> Result<DenseCover> {
    check_coverable(m)?;
    Ok(cover_unchecked(g, m, rho0))
}

fn cover_unchecked(g: &Graph, m: &MeasureExpr, rho0: DensityValue) -> DenseCover {
    if rho0.is_zero() {
        // every non-empty subgraph has density >= 0
        let all = if g.is_empty() { vec![] } else { vec![g.all_nodes()] };
        let exactness = if matches!(m, MeasureExpr::Min(_)) { Exactness::OverApproximate } else { Exactness::Exact };
        return DenseCover::from_components(all, exactness, m, rho0);
    }
    match m {
        MeasureExpr::Leaf(Measure::MinDegree) => {
            let k = rho0.ceil() as usize;
            DenseCover::from_components(vec![k_core(g, k)], Exactness::Exact, m, rho0)
        }
        MeasureExpr::Leaf(Measure::EdgeConnectivity) => {
            let k = rho0.ceil() as usize;
            DenseCover::from_components(maximal_k_edge_connected(g, k), Exactness::Exact, m, rho0)
        }
        MeasureExpr::Leaf(Measure::EdgeDensity) => DenseCover::from_components(edge_density_components(g, rho0), Exactness::Exact, m, rho0),
        MeasureExpr::Leaf(other) => unreachable!("{other} rejected by check_coverable"),
        MeasureExpr::Max(children) => {
            let mut components = Vec::new();
            let mut exact = true;
            for c in children {
                let sub = cover_unchecked(g, c, rho0);
                exact &= sub.exactness.is_exact();
                components.extend(sub.components);
            }
            let exactness = if exact { Exactness::Exact } else { Exactness::OverApproximate };
            DenseCover::from_components(components, exactness, m, rho0)
        }
        MeasureExpr::Min(children) => {
            let mut working = g.all_nodes();
            loop {
                let before = working.clone();
                for c in children {
                    if working.is_empty() {
                        break;
                    }
                    let (sub, origin) = g.restrict(&working.to_mask(g.node_count()));
                    working = cover_unchecked(&sub, c, rho0).cover.map_through(&origin);
                }
                if working == before || working.is_empty() {
                    break;
                }
            }
            DenseCover::from_components(vec![working], Exactness::OverApproximate, m, rho0)
        }
    }
}

/// Maximal qualifying sets for edge density at a positive guard: the
/// overall maximal optimum, then for each uncovered node the maximal
/// optimum forced to contain it, kept when its value is non-negative.
fn edge_density_components(g: &Graph, rho0: DensityValue) -> Vec<SubgraphRef> {
    if g.edge_count() == 0 {
        return Vec::new();
    }
    let mut components = Vec::new();
    let mut covered = SubgraphRef::empty();
    let overall = max_closure(g, rho0, None);
    if !overall.nodes.is_empty() {
        covered = overall.nodes.clone();
        components.push(overall.nodes);
    }
    for v in g.nodes() {
        if covered.contains(v) {
            continue;
        }
        let forced = max_closure(g, rho0, Some(v));
        if forced.scaled_value >= 0 {
            covered = covered.union(&forced.nodes);
            components.push(forced.nodes);
        }
    }
    components
}

/// Largest value of `m` over non-empty subgraphs of `g` (0 on the empty
/// graph). For `min` nodes this is the largest grid value whose
/// over-approximate cover is non-empty, an upper bound on the true maximum.
pub fn max_density(g: &Graph, m: &MeasureExpr) -> Result<DensityValue> {
    check_coverable(m)?;
    if g.is_empty() {
        return Ok(DensityValue::ZERO);
    }
    Ok(match m {
        MeasureExpr::Leaf(Measure::MinDegree) => DensityValue::integer(degeneracy(g)? as i64),
        MeasureExpr::Leaf(Measure::EdgeConnectivity) => {
            let top = degeneracy(g)?;
            let k = (1..=top).rev().find(|&k| !maximal_k_edge_connected(g, k).is_empty()).unwrap_or(0);
            DensityValue::integer(k as i64)
        }
        MeasureExpr::Leaf(Measure::EdgeDensity) => match densest_edge_density_subgraph(g) {
            Ok(d) => d.density,
            Err(Error::Edgeless) => DensityValue::ZERO,
            Err(e) => return Err(e),
        },
        MeasureExpr::Leaf(_) => unreachable!("rejected by check_coverable"),
        MeasureExpr::Max(children) => {
            let mut best = DensityValue::ZERO;
            for c in children {
                best = best.max(max_density(g, c)?);
            }
            best
        }
        MeasureExpr::Min(children) => {
            let mut upper = None::<DensityValue>;
            for c in children {
                let v = max_density(g, c)?;
                upper = Some(upper.map_or(v, |u| u.min(v)));
            }
            let upper = upper.unwrap_or(DensityValue::ZERO);
            let grid: Vec<DensityValue> = candidate_grid(g, m, upper).into_iter().filter(|v| *v <= upper).collect();
            // covers shrink as the guard grows; find the last non-empty one
            let (mut lo, mut hi) = (0usize, grid.len());
            while lo < hi {
                let mid = (lo + hi) / 2;
                if cover_unchecked(g, m, grid[mid]).cover.is_empty() {
                    hi = mid;
                } else {
                    lo = mid + 1;
                }
            }
            if lo == 0 {
                DensityValue::ZERO
            } else {
                grid[lo - 1]
            }
        }
    })
}

/// Finite set of guard values that distinguishes every possible density
/// of `m` on subgraphs of `g`, up to and including `top + 1`.
///
/// Integer-valued measures need only `0..=top+1`; edge density also needs
/// every fraction a/b with a <= |E| and 1 <= b <= |V|.
pub fn candidate_grid(g: &Graph, m: &MeasureExpr, top: DensityValue) -> Vec<DensityValue> {
    let ceiling = top.floor() + 1;
    let mut grid: Vec<DensityValue> = (0..=ceiling).map(DensityValue::integer).collect();
    if !m.is_integer_valued() {
        let limit = DensityValue::integer(ceiling);
        for b in 1..=g.node_count() as i64 {
            for a in 0..=g.edge_count() as i64 {
                let v = DensityValue::new(a, b);
                if v > limit {
                    break;
                }
                grid.push(v);
            }
        }
    }
    grid.sort();
    grid.dedup();
    grid
}

#[cfg(test)]
mod tests {
    use super::*;

    fn complete(n: usize) -> Graph {
        let mut e = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                e.push((i, j));
            }
        }
        Graph::with_numeric_labels(n, &e).unwrap()
    }

    fn triangle_plus_pendant() -> Graph {
        Graph::with_numeric_labels(4, &[(0, 1), (1, 2), (0, 2), (2, 3)]).unwrap()
    }

    fn two_triangles_bridge() -> Graph {
        Graph::with_numeric_labels(6, &[(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5), (2, 3)]).unwrap()
    }

    fn set(ids: &[usize]) -> SubgraphRef {
        ids.iter().map(|&i| NodeId(i)).collect()
    }

    #[test]
    fn core_decomposition_examples() {
        assert_eq!(core_decomposition(&complete(4)).core, vec![3, 3, 3, 3]);
        assert_eq!(core_decomposition(&triangle_plus_pendant()).core, vec![2, 2, 2, 1]);
        assert!(core_decomposition(&Graph::empty()).core.is_empty());
    }

    #[test]
    fn k_core_examples() {
        let path = Graph::with_numeric_labels(3, &[(0, 1), (1, 2)]).unwrap();
        assert!(k_core(&path, 2).is_empty());
        assert_eq!(k_core(&triangle_plus_pendant(), 2), set(&[0, 1, 2]));
        assert_eq!(k_core(&path, 0), path.all_nodes());
    }

    #[test]
    fn degeneracy_examples() {
        assert_eq!(degeneracy(&complete(5)).unwrap(), 4);
        let tree = Graph::with_numeric_labels(5, &[(0, 1), (0, 2), (2, 3), (2, 4)]).unwrap();
        assert_eq!(degeneracy(&tree).unwrap(), 1);
        let c6 = Graph::with_numeric_labels(6, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 0)]).unwrap();
        assert_eq!(degeneracy(&c6).unwrap(), 2);
        assert_eq!(degeneracy(&Graph::empty()), Err(Error::EmptyGraph));
    }

    #[test]
    fn maximal_k_edge_connected_examples() {
        assert_eq!(maximal_k_edge_connected(&two_triangles_bridge(), 2), vec![set(&[0, 1, 2]), set(&[3, 4, 5])]);
        assert_eq!(maximal_k_edge_connected(&complete(6), 5), vec![set(&[0, 1, 2, 3, 4, 5])]);
        assert!(maximal_k_edge_connected(&complete(6), 6).is_empty());
        assert_eq!(maximal_k_edge_connected(&two_triangles_bridge(), 1), vec![two_triangles_bridge().all_nodes()]);
    }

    #[test]
    fn splitting_needs_repeated_cuts() {
        // two K4s sharing no node, joined by two edges: lambda = 2 overall,
        // each K4 has lambda 3
        let mut e = Vec::new();
        for base in [0, 4] {
            for i in 0..4 {
                for j in i + 1..4 {
                    e.push((base + i, base + j));
                }
            }
        }
        e.push((0, 4));
        e.push((1, 5));
        let g = Graph::with_numeric_labels(8, &e).unwrap();
        assert_eq!(maximal_k_edge_connected(&g, 2), vec![g.all_nodes()]);
        assert_eq!(maximal_k_edge_connected(&g, 3), vec![set(&[0, 1, 2, 3]), set(&[4, 5, 6, 7])]);
    }

    #[test]
    fn densest_examples() {
        let mut e: Vec<(usize, usize)> = Vec::new();
        for i in 0..4 {
            for j in i + 1..4 {
                e.push((i, j));
            }
        }
        e.push((3, 4));
        let k4p = Graph::with_numeric_labels(5, &e).unwrap();
        let d = densest_edge_density_subgraph(&k4p).unwrap();
        assert_eq!(d.nodes, set(&[0, 1, 2, 3]));
        assert_eq!(d.density, DensityValue::new(3, 2));

        let d = densest_edge_density_subgraph(&complete(5)).unwrap();
        assert_eq!(d.nodes, complete(5).all_nodes());
        assert_eq!(d.density, DensityValue::integer(2));

        let d = densest_edge_density_subgraph(&complete(2)).unwrap();
        assert_eq!(d.nodes.len(), 2);
        assert_eq!(d.density, DensityValue::new(1, 2));

        assert_eq!(densest_edge_density_subgraph(&Graph::with_numeric_labels(2, &[]).unwrap()), Err(Error::Edgeless));
    }

    #[test]
    fn densest_takes_union_of_optima() {
        // two disjoint triangles both have density 1
        let g = Graph::with_numeric_labels(6, &[(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)]).unwrap();
        let d = densest_edge_density_subgraph(&g).unwrap();
        assert_eq!(d.nodes, g.all_nodes());
        assert_eq!(d.density, DensityValue::integer(1));
    }

    #[test]
    fn dense_cover_examples() {
        let c = dense_cover(&triangle_plus_pendant(), &Measure::MinDegree.into(), 2.into()).unwrap();
        assert_eq!(c.cover, set(&[0, 1, 2]));
        assert_eq!(c.components.len(), 1);
        assert!(c.exactness.is_exact());

        let m: MeasureExpr = "max(mindeg,conn)".parse().unwrap();
        let c = dense_cover(&two_triangles_bridge(), &m, 2.into()).unwrap();
        assert_eq!(c.cover, set(&[0, 1, 2, 3, 4, 5]));
        assert!(c.exactness.is_exact());

        for text in ["mindeg", "conn", "edge", "max(edge,conn)", "min(mindeg,edge)"] {
            let m: MeasureExpr = text.parse().unwrap();
            let c = dense_cover(&triangle_plus_pendant(), &m, DensityValue::ZERO).unwrap();
            assert_eq!(c.cover, triangle_plus_pendant().all_nodes(), "{text}");
            assert_eq!(c.components.len(), 1);
        }
    }

    #[test]
    fn edge_density_cover_includes_disjoint_sparse_parts() {
        // K5 plus a disjoint edge: at rho0 = 1 the union K5 + edge has
        // density 11/7 and qualifies
        let mut e = Vec::new();
        for i in 0..5 {
            for j in i + 1..5 {
                e.push((i, j));
            }
        }
        e.push((5, 6));
        let g = Graph::with_numeric_labels(7, &e).unwrap();
        let c = dense_cover(&g, &Measure::EdgeDensity.into(), 1.into()).unwrap();
        assert_eq!(c.cover, g.all_nodes());
        let c = dense_cover(&g, &Measure::EdgeDensity.into(), 2.into()).unwrap();
        assert_eq!(c.cover, set(&[0, 1, 2, 3, 4]));
        let c = dense_cover(&g, &Measure::EdgeDensity.into(), DensityValue::new(21, 10)).unwrap();
        assert!(c.cover.is_empty());
    }

    #[test]
    fn unsupported_leaves_are_rejected() {
        for text in ["sqdeg", "kclique:3", "max(mindeg,sqdeg)"] {
            let m: MeasureExpr = text.parse().unwrap();
            assert!(matches!(dense_cover(&complete(3), &m, 1.into()), Err(Error::UnsupportedMeasure(_))));
        }
    }

    #[test]
    fn min_cover_is_over_approximate() {
        let m: MeasureExpr = "min(mindeg,conn)".parse().unwrap();
        let c = dense_cover(&two_triangles_bridge(), &m, 2.into()).unwrap();
        assert_eq!(c.cover, set(&[0, 1, 2, 3, 4, 5]));
        assert_eq!(c.exactness, Exactness::OverApproximate);
    }

    #[test]
    fn max_density_per_measure() {
        let g = triangle_plus_pendant();
        assert_eq!(max_density(&g, &Measure::MinDegree.into()).unwrap(), 2.into());
        assert_eq!(max_density(&g, &Measure::EdgeConnectivity.into()).unwrap(), 2.into());
        assert_eq!(max_density(&g, &Measure::EdgeDensity.into()).unwrap(), 1.into());
        let m: MeasureExpr = "min(mindeg,edge)".parse().unwrap();
        assert_eq!(max_density(&g, &m).unwrap(), 1.into());
        assert_eq!(max_density(&Graph::empty(), &m).unwrap(), DensityValue::ZERO);
    }

    #[test]
    fn grid_contents() {
        let g = triangle_plus_pendant();
        let ints = candidate_grid(&g, &Measure::MinDegree.into(), 2.into());
        assert_eq!(ints, vec![0.into(), 1.into(), 2.into(), 3.into()]);
        let fr = candidate_grid(&g, &Measure::EdgeDensity.into(), 1.into());
        assert!(fr.contains(&DensityValue::new(3, 4)));
        assert_eq!(*fr.last().unwrap(), DensityValue::integer(2));
    }
}
