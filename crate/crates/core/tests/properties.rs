use std::collections::BTreeSet;

use gca_core::dense::{candidate_grid, max_density};
use gca_core::io::{write_edge_list, write_json};
use gca_core::oracle::{brute_force_lambda, brute_force_shortest_path, subset_values, MaskGraph};
use gca_core::{
    congested_core, degeneracy, dense_cover, densest_edge_density_subgraph, dijkstra, edge_connectivity, edge_density, k_clique_density,
    parse_graph, route_with_density_index, DensityValue, Graph, GraphFormat, LoadedGraph, Measure, MeasureExpr, NodeId, SubgraphRef,
    WeightPolicy,
};
use proptest::prelude::*;

fn graph_strategy(max_nodes: usize) -> impl Strategy<Value = Graph> {
    (1..=max_nodes).prop_flat_map(|n| {
        let pairs = n * (n - 1) / 2;
        proptest::collection::vec(any::<bool>(), pairs).prop_map(move |bits| {
            let mut edges = Vec::new();
            let mut k = 0;
            for i in 0..n {
                for j in i + 1..n {
                    if bits[k] {
                        edges.push((i, j));
                    }
                    k += 1;
                }
            }
            Graph::with_numeric_labels(n, &edges).unwrap()
        })
    })
}

fn loaded_strategy(max_nodes: usize) -> impl Strategy<Value = LoadedGraph> {
    graph_strategy(max_nodes).prop_flat_map(|g| {
        let m = g.edge_count();
        proptest::collection::vec(0u32..=100, m)
            .prop_map(move |loads| LoadedGraph::new(g.clone(), loads.iter().map(|&l| l as f64 / 100.0).collect()).unwrap())
    })
}

fn canonical(g: &LoadedGraph) -> (BTreeSet<String>, BTreeSet<(String, String, u64)>) {
    let graph = g.graph();
    let nodes = graph.labels().iter().cloned().collect();
    let edges = graph
        .edges()
        .iter()
        .zip(g.loads())
        .map(|(&(u, v), l)| {
            let (a, b) = (graph.label(u).to_string(), graph.label(v).to_string());
            let (a, b) = if a <= b { (a, b) } else { (b, a) };
            (a, b, l.to_bits())
        })
        .collect();
    (nodes, edges)
}

fn leaf(m: Measure) -> MeasureExpr {
    MeasureExpr::leaf(m)
}

fn measure_strategy() -> impl Strategy<Value = MeasureExpr> {
    let leaves = prop_oneof![
        Just(leaf(Measure::EdgeDensity)),
        Just(leaf(Measure::MinDegree)),
        (2usize..=6).prop_map(|k| leaf(Measure::KCliqueDensity(k))),
        Just(leaf(Measure::SquaredDegree)),
        Just(leaf(Measure::EdgeConnectivity)),
    ];
    leaves.prop_recursive(3, 12, 3, |inner| {
        prop_oneof![
            proptest::collection::vec(inner.clone(), 2..=3).prop_map(|c| MeasureExpr::min(c).unwrap()),
            proptest::collection::vec(inner, 2..=3).prop_map(|c| MeasureExpr::max(c).unwrap()),
        ]
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn json_round_trip_is_exact(g in loaded_strategy(9)) {
        let back = parse_graph(&write_json(&g), GraphFormat::Json).unwrap();
        prop_assert_eq!(back, g);
    }

    #[test]
    fn edge_list_round_trip_keeps_edges(g in loaded_strategy(9)) {
        let back = parse_graph(&write_edge_list(&g), GraphFormat::EdgeList).unwrap();
        prop_assert_eq!(canonical(&back).1, canonical(&g).1);
    }

    #[test]
    fn measure_text_round_trip(m in measure_strategy()) {
        let back: MeasureExpr = m.to_string().parse().unwrap();
        prop_assert_eq!(back, m);
    }

    #[test]
    fn density_value_text_round_trip(n in 0i64..500, d in 1i64..50) {
        let v = DensityValue::new(n, d);
        prop_assert_eq!(v.to_string().parse::<DensityValue>().unwrap(), v);
    }

    #[test]
    fn two_cliques_are_edges(g in graph_strategy(9)) {
        prop_assert_eq!(k_clique_density(&g, 2).unwrap(), edge_density(&g).unwrap());
    }

    #[test]
    fn stoer_wagner_matches_menger(g in graph_strategy(10)) {
        prop_assert_eq!(edge_connectivity(&g).unwrap(), DensityValue::integer(brute_force_lambda(&g) as i64));
    }

    #[test]
    fn core_keeps_exactly_the_hot_links(g in loaded_strategy(10), t in 0u32..=100) {
        let threshold = t as f64 / 100.0;
        let core = congested_core(&g, threshold).unwrap();
        let hot = g.graph().edges().iter().zip(g.loads()).filter(|(_, &l)| l > threshold).count();
        prop_assert_eq!(core.core.edge_count(), hot);
        for &(u, v) in core.core.edges() {
            prop_assert!(g.load(core.origin[u.0], core.origin[v.0]).unwrap() > threshold);
        }
        for v in core.core.nodes() {
            prop_assert!(core.core.degree(v) > 0);
        }
    }

    #[test]
    fn dijkstra_is_optimal(g in loaded_strategy(9), s in 0usize..9, t in 0usize..9) {
        let n = g.graph().node_count();
        prop_assume!(s < n && t < n && s != t);
        let fast = dijkstra(g.graph(), g.loads(), NodeId(s), NodeId(t)).unwrap();
        let brute = brute_force_shortest_path(g.graph(), g.loads(), NodeId(s), NodeId(t), &SubgraphRef::empty()).unwrap();
        match (fast.path(), brute) {
            (Some(a), Some(b)) => {
                prop_assert!((a.weight - b.weight).abs() < 1e-9);
                prop_assert_eq!(&a.nodes, &b.nodes);
            }
            (None, None) => {}
            (a, b) => prop_assert!(false, "fast {:?} vs brute {:?}", a, b),
        }
    }

    #[test]
    fn densest_subgraph_is_the_union_of_all_densest(g in graph_strategy(10)) {
        prop_assume!(g.edge_count() > 0);
        let values = subset_values(&g, &leaf(Measure::EdgeDensity)).unwrap();
        let best = *values.iter().max().unwrap();
        let union = values.iter().enumerate().filter(|(_, &v)| v == best).fold(0u32, |a, (m, _)| a | m as u32);
        prop_assert_eq!(values[union as usize], best);
        let fast = densest_edge_density_subgraph(&g).unwrap();
        prop_assert_eq!(fast.density, best);
        prop_assert_eq!(fast.nodes.iter().fold(0u32, |a, v| a | (1 << v.0)), union);
    }

    #[test]
    fn max_density_matches_oracle(g in graph_strategy(9)) {
        for text in ["edge", "mindeg", "conn", "max(mindeg,edge)", "min(edge,conn)"] {
            let m: MeasureExpr = text.parse().unwrap();
            let truth = *subset_values(&g, &m).unwrap().iter().skip(1).max().unwrap();
            prop_assert_eq!(max_density(&g, &m).unwrap(), truth, "{}", text);
        }
        prop_assert_eq!(max_density(&g, &leaf(Measure::MinDegree)).unwrap(), DensityValue::integer(degeneracy(&g).unwrap() as i64));
    }

    #[test]
    fn covers_shrink_as_rho0_grows(g in graph_strategy(10)) {
        for text in ["edge", "mindeg", "conn", "min(edge,mindeg)"] {
            let m: MeasureExpr = text.parse().unwrap();
            let top = max_density(&g, &m).unwrap();
            let grid = candidate_grid(&g, &m, top);
            let covers: Vec<SubgraphRef> = grid.iter().map(|&r| dense_cover(&g, &m, r).unwrap().cover).collect();
            for w in covers.windows(2) {
                prop_assert!(w[1].is_subset(&w[0]), "{}", text);
            }
            prop_assert!(covers.last().unwrap().is_empty(), "{}: grid top must clear the cover", text);
        }
    }

    #[test]
    fn raising_rho0_never_loses_a_route(g in loaded_strategy(10), s in 0usize..10, t in 0usize..10) {
        let n = g.graph().node_count();
        prop_assume!(s < n && t < n && s != t);
        let m: MeasureExpr = "mindeg".parse().unwrap();
        let mut found = false;
        for r in 0..=5 {
            let out = route_with_density_index(&g, 0.5, &m, DensityValue::integer(r), NodeId(s), NodeId(t), WeightPolicy::Unit).unwrap();
            prop_assert!(!(found && !out.outcome.is_found()), "route lost when rho0 rose to {}", r);
            found |= out.outcome.is_found();
        }
    }

    #[test]
    fn k_edge_connected_parts_are_maximal(g in graph_strategy(9), k in 1usize..4) {
        let parts = gca_core::maximal_k_edge_connected(&g, k);
        let mg = MaskGraph::new(&g);
        let n = g.node_count();
        let masks: Vec<u32> = parts.iter().map(|p| p.iter().fold(0u32, |a, v| a | (1 << v.0))).collect();
        // every k-edge-connected node set with >= 2 nodes sits inside one part
        for set in 1u32..(1 << n) {
            if set.count_ones() >= 2 && mg.lambda(set) >= k as u32 {
                prop_assert!(masks.iter().any(|m| set & !m == 0), "set {:b} not inside a part", set);
            }
        }
    }
}
