//! Dinic's blocking-flow maximum flow on integer capacities.

use std::collections::VecDeque;

#[derive(Debug, Clone)]
struct Arc {
    to: usize,
    cap: i64,
    initial: i64,
    rev: usize,
}

/// Handle to an arc added with [`FlowNetwork::add_edge`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EdgeId {
    from: usize,
    idx: usize,
}

#[derive(Debug, Clone)]
pub struct FlowNetwork {
    adj: Vec<Vec<Arc>>,
}

impl FlowNetwork {
    pub fn new(nodes: usize) -> Self {
        Self {
            adj: vec![Vec::new(); nodes],
        }
    }

    pub fn node_count(&self) -> usize {
        self.adj.len()
    }

    pub fn add_edge(&mut self, from: usize, to: usize, cap: i64) -> EdgeId {
        assert!(cap >= 0, "capacities must be nonnegative");
        let (fi, ti) = (self.adj[from].len(), self.adj[to].len() + usize::from(from == to));
        self.adj[from].push(Arc { to, cap, initial: cap, rev: ti });
        self.adj[to].push(Arc { to: from, cap: 0, initial: 0, rev: fi });
        EdgeId { from, idx: fi }
    }

    /// Flow currently routed along `e`.
    pub fn flow(&self, e: EdgeId) -> i64 {
        let a = &self.adj[e.from][e.idx];
        a.initial - a.cap
    }

    fn levels(&self, s: usize, t: usize) -> Option<Vec<usize>> {
        let mut level = vec![usize::MAX; self.adj.len()];
        level[s] = 0;
        let mut queue = VecDeque::from([s]);
        while let Some(u) = queue.pop_front() {
            for a in &self.adj[u] {
                if a.cap > 0 && level[a.to] == usize::MAX {
                    level[a.to] = level[u] + 1;
                    queue.push_back(a.to);
                }
            }
        }
        (level[t] != usize::MAX).then_some(level)
    }

    fn augment(&mut self, u: usize, t: usize, pushed: i64, level: &[usize], next: &mut [usize]) -> i64 {
        if u == t {
            return pushed;
        }
        while next[u] < self.adj[u].len() {
            let Arc { to, cap, rev, .. } = self.adj[u][next[u]];
            if cap > 0 && level[to] == level[u] + 1 {
                let got = self.augment(to, t, pushed.min(cap), level, next);
                if got > 0 {
                    self.adj[u][next[u]].cap -= got;
                    self.adj[to][rev].cap += got;
                    return got;
                }
            }
            next[u] += 1;
        }
        0
    }

    /// Maximum `s`-`t` flow; the network keeps the resulting residual state.
    pub fn max_flow(&mut self, s: usize, t: usize) -> i64 {
        if s == t {
            return 0;
        }
        let mut total = 0;
        while let Some(level) = self.levels(s, t) {
            let mut next = vec![0; self.adj.len()];
            loop {
                let got = self.augment(s, t, i64::MAX, &level, &mut next);
                if got == 0 {
                    break;
                }
                total += got;
            }
        }
        total
    }
}
