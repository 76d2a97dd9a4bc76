//! Deterministic global minimum edge cut (Stoer–Wagner).

use crate::graph::{Graph, NodeId, SubgraphRef};

/// A global minimum cut: its value and one side of the partition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MinCut {
    pub value: u64,
    pub side: SubgraphRef,
}

/// Minimum cut of an unweighted graph with at least two nodes. Returns
/// `None` for graphs with fewer than two nodes, which have no cut.
///
/// Runs in O(n^3) on a dense weight matrix; ties in the maximum-adjacency
/// order are broken by lowest index so the result is reproducible.
pub fn stoer_wagner(g: &Graph) -> Option<MinCut> {
    let n = g.node_count();
    if n < 2 {
        return None;
    }
    let mut w = vec![vec![0u64; n]; n];
    for &(u, v) in g.edges() {
        w[u.0][v.0] += 1;
        w[v.0][u.0] += 1;
    }
    // members[i]: original nodes merged into super-node i
    let mut members: Vec<Vec<usize>> = (0..n).map(|i| vec![i]).collect();
    let mut alive: Vec<usize> = (0..n).collect();
    let mut best: Option<(u64, Vec<usize>)> = None;

    while alive.len() > 1 {
        let m = alive.len();
        let mut in_a = vec![false; n];
        let mut key = vec![0u64; n];
        let mut prev = usize::MAX;
        let mut last = usize::MAX;
        for _ in 0..m {
            let mut pick = usize::MAX;
            for &v in &alive {
                if !in_a[v] && (pick == usize::MAX || key[v] > key[pick]) {
                    pick = v;
                }
            }
            in_a[pick] = true;
            prev = last;
            last = pick;
            for &v in &alive {
                if !in_a[v] {
                    key[v] += w[pick][v];
                }
            }
        }
        let cut_of_phase = key[last];
        if best.as_ref().is_none_or(|(b, _)| cut_of_phase < *b) {
            best = Some((cut_of_phase, members[last].clone()));
        }
        // merge `last` into `prev`
        let moved = std::mem::take(&mut members[last]);
        members[prev].extend(moved);
        for &v in &alive {
            if v != last && v != prev {
                w[prev][v] += w[last][v];
                w[v][prev] = w[prev][v];
            }
        }
        alive.retain(|&v| v != last);
    }
    best.map(|(value, side)| MinCut { value, side: SubgraphRef::new(side.into_iter().map(NodeId)) })
}

/// Edge connectivity: 0 for graphs with fewer than two nodes or that are
/// disconnected.
pub fn edge_connectivity_value(g: &Graph) -> u64 {
    stoer_wagner(g).map_or(0, |c| c.value)
}
