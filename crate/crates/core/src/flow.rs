//! Dinic max-flow on integer capacities, with access to the maximal
//! source side of a minimum cut.

use std::collections::VecDeque;

#[derive(Debug, Clone)]
struct Arc {
    to: usize,
    cap: i64,
}

#[derive(Debug, Clone)]
pub struct FlowNetwork {
    arcs: Vec<Arc>,
    head: Vec<Vec<usize>>,
    level: Vec<i32>,
    cursor: Vec<usize>,
}

impl FlowNetwork {
    pub fn new(n: usize) -> Self {
        FlowNetwork { arcs: Vec::new(), head: vec![Vec::new(); n], level: vec![0; n], cursor: vec![0; n] }
    }

    pub fn node_count(&self) -> usize {
        self.head.len()
    }

    pub fn add_arc(&mut self, from: usize, to: usize, cap: i64) {
        debug_assert!(cap >= 0);
        self.head[from].push(self.arcs.len());
        self.arcs.push(Arc { to, cap });
        self.head[to].push(self.arcs.len());
        self.arcs.push(Arc { to: from, cap: 0 });
    }

    /// Undirected edge of capacity `cap` in both directions.
    pub fn add_edge(&mut self, a: usize, b: usize, cap: i64) {
        self.head[a].push(self.arcs.len());
        self.arcs.push(Arc { to: b, cap });
        self.head[b].push(self.arcs.len());
        self.arcs.push(Arc { to: a, cap });
    }

    fn bfs(&mut self, s: usize, t: usize) -> bool {
        self.level.iter_mut().for_each(|l| *l = -1);
        self.level[s] = 0;
        let mut queue = VecDeque::from([s]);
        while let Some(u) = queue.pop_front() {
            for &id in &self.head[u] {
                let arc = &self.arcs[id];
                if arc.cap > 0 && self.level[arc.to] < 0 {
                    self.level[arc.to] = self.level[u] + 1;
                    queue.push_back(arc.to);
                }
            }
        }
        self.level[t] >= 0
    }

    fn dfs(&mut self, u: usize, t: usize, pushed: i64) -> i64 {
        if u == t {
            return pushed;
        }
        while self.cursor[u] < self.head[u].len() {
            let id = self.head[u][self.cursor[u]];
            let (to, cap) = (self.arcs[id].to, self.arcs[id].cap);
            if cap > 0 && self.level[to] == self.level[u] + 1 {
                let got = self.dfs(to, t, pushed.min(cap));
                if got > 0 {
                    self.arcs[id].cap -= got;
                    self.arcs[id ^ 1].cap += got;
                    return got;
                }
            }
            self.cursor[u] += 1;
        }
        0
    }

    /// Pushes a maximum flow from `s` to `t` and returns its value.
    pub fn max_flow(&mut self, s: usize, t: usize) -> i64 {
        let mut total = 0;
        while self.bfs(s, t) {
            self.cursor.iter_mut().for_each(|c| *c = 0);
            loop {
                let f = self.dfs(s, t, i64::MAX);
                if f == 0 {
                    break;
                }
                total += f;
            }
        }
        total
    }

    /// After `max_flow`, the maximal source side of a minimum cut: every
    /// node that cannot reach `t` in the residual network.
    pub fn maximal_source_side(&self, t: usize) -> Vec<bool> {
        let n = self.node_count();
        let mut reaches_sink = vec![false; n];
        reaches_sink[t] = true;
        let mut queue = VecDeque::from([t]);
        while let Some(v) = queue.pop_front() {
            // u reaches v if the residual arc u->v has capacity; that arc is
            // the reverse of one stored at v
            for &id in &self.head[v] {
                let u = self.arcs[id].to;
                if !reaches_sink[u] && self.arcs[id ^ 1].cap > 0 {
                    reaches_sink[u] = true;
                    queue.push_back(u);
                }
            }
        }
        reaches_sink.into_iter().map(|r| !r).collect()
    }
}
