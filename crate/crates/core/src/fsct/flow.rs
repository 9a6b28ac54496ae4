//! Dinic max-flow on integer capacities.

use std::collections::VecDeque;

pub const INF: i128 = i128::MAX / 4;

#[derive(Clone, Debug)]
struct Edge {
    to: usize,
    cap: i128,
}

#[derive(Clone, Debug)]
pub struct FlowNetwork {
    adj: Vec<Vec<usize>>,
    edges: Vec<Edge>,
    original: Vec<i128>,
}

impl FlowNetwork {
    pub fn new(nodes: usize) -> Self {
        FlowNetwork { adj: vec![Vec::new(); nodes], edges: Vec::new(), original: Vec::new() }
    }

    /// Returns the edge id.
    pub fn add_edge(&mut self, from: usize, to: usize, cap: i128) -> usize {
        let id = self.edges.len();
        self.edges.push(Edge { to, cap });
        self.edges.push(Edge { to: from, cap: 0 });
        self.original.push(cap);
        self.original.push(0);
        self.adj[from].push(id);
        self.adj[to].push(id + 1);
        id
    }

    pub fn flow_on(&self, edge: usize) -> i128 {
        self.original[edge] - self.edges[edge].cap
    }

    fn levels(&self, s: usize, t: usize) -> Option<Vec<i32>> {
        let mut level = vec![-1; self.adj.len()];
        level[s] = 0;
        let mut queue = VecDeque::from([s]);
        while let Some(u) = queue.pop_front() {
            for &e in &self.adj[u] {
                let Edge { to, cap } = self.edges[e];
                if cap > 0 && level[to] < 0 {
                    level[to] = level[u] + 1;
                    queue.push_back(to);
                }
            }
        }
        (level[t] >= 0).then_some(level)
    }

    fn augment(&mut self, u: usize, t: usize, pushed: i128, level: &[i32], next: &mut [usize]) -> i128 {
        if u == t {
            return pushed;
        }
        while next[u] < self.adj[u].len() {
            let e = self.adj[u][next[u]];
            let Edge { to, cap } = self.edges[e];
            if cap > 0 && level[to] == level[u] + 1 {
                let got = self.augment(to, t, pushed.min(cap), level, next);
                if got > 0 {
                    self.edges[e].cap -= got;
                    self.edges[e ^ 1].cap += got;
                    return got;
                }
            }
            next[u] += 1;
        }
        0
    }

    pub fn max_flow(&mut self, s: usize, t: usize) -> i128 {
        let mut total = 0;
        while let Some(level) = self.levels(s, t) {
            let mut next = vec![0; self.adj.len()];
            loop {
                let f = self.augment(s, t, INF, &level, &mut next);
                if f == 0 {
                    break;
                }
                total += f;
            }
        }
        total
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classic_network() {
        // CLRS figure: max flow 23
        let mut g = FlowNetwork::new(6);
        for (u, v, c) in [(0, 1, 16), (0, 2, 13), (1, 3, 12), (2, 1, 4), (2, 4, 14), (3, 2, 9), (3, 5, 20), (4, 3, 7), (4, 5, 4)] {
            g.add_edge(u, v, c);
        }
        assert_eq!(g.max_flow(0, 5), 23);
    }

    #[test]
    fn flows_respect_capacities() {
        let mut g = FlowNetwork::new(4);
        let a = g.add_edge(0, 1, 5);
        let b = g.add_edge(1, 3, INF);
        let c = g.add_edge(0, 2, 2);
        let d = g.add_edge(2, 3, 1);
        assert_eq!(g.max_flow(0, 3), 6);
        assert_eq!(g.flow_on(a), 5);
        assert_eq!(g.flow_on(b), 5);
        assert_eq!(g.flow_on(c), 1);
        assert_eq!(g.flow_on(d), 1);
    }
}
