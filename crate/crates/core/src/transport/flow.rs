//! Integer network-flow kernels. Capacities and costs are arbitrary-precision
//! integers so callers can clear rationals to a common denominator and get
//! exact optima back.

use std::collections::VecDeque;

use num_bigint::BigInt;
use num_traits::{One, Zero};

/// Max-flow network (level-graph augmentation). Edges are paired: edge `e`
/// and its reverse `e ^ 1`.
pub(crate) struct FlowNetwork {
    to: Vec<usize>,
    cap: Vec<BigInt>,
    adj: Vec<Vec<usize>>,
}

impl FlowNetwork {
    pub fn new(nodes: usize) -> Self {
        FlowNetwork {
            to: Vec::new(),
            cap: Vec::new(),
            adj: vec![Vec::new(); nodes],
        }
    }

    /// Returns the forward edge id; flow on it is read back as `cap[id ^ 1]`.
    pub fn add_edge(&mut self, u: usize, v: usize, cap: BigInt) -> usize {
        let id = self.to.len();
        self.to.push(v);
        self.cap.push(cap);
        self.adj[u].push(id);
        self.to.push(u);
        self.cap.push(BigInt::zero());
        self.adj[v].push(id + 1);
        id
    }

    pub fn flow_on(&self, edge: usize) -> &BigInt {
        &self.cap[edge ^ 1]
    }

    fn levels(&self, s: usize, t: usize) -> Option<Vec<i32>> {
        let mut level = vec![-1; self.adj.len()];
        level[s] = 0;
        let mut queue = VecDeque::from([s]);
        while let Some(u) = queue.pop_front() {
            for &e in &self.adj[u] {
                let v = self.to[e];
                if level[v] < 0 && self.cap[e] > BigInt::zero() {
                    level[v] = level[u] + 1;
                    queue.push_back(v);
                }
            }
        }
        (level[t] >= 0).then_some(level)
    }

    fn augment(
        &mut self,
        u: usize,
        t: usize,
        pushed: BigInt,
        level: &[i32],
        iter: &mut [usize],
    ) -> BigInt {
        if u == t {
            return pushed;
        }
        while iter[u] < self.adj[u].len() {
            let e = self.adj[u][iter[u]];
            let v = self.to[e];
            if self.cap[e] > BigInt::zero() && level[v] == level[u] + 1 {
                let next = if pushed < self.cap[e] {
                    pushed.clone()
                } else {
                    self.cap[e].clone()
                };
                let got = self.augment(v, t, next, level, iter);
                if !got.is_zero() {
                    self.cap[e] -= &got;
                    self.cap[e ^ 1] += &got;
                    return got;
                }
            }
            iter[u] += 1;
        }
        BigInt::zero()
    }

    pub fn max_flow(&mut self, s: usize, t: usize) -> BigInt {
        let infinity: BigInt = self.cap.iter().sum::<BigInt>() + BigInt::one();
        let mut total = BigInt::zero();
        while let Some(level) = self.levels(s, t) {
            let mut iter = vec![0usize; self.adj.len()];
            loop {
                let pushed = self.augment(s, t, infinity.clone(), &level, &mut iter);
                if pushed.is_zero() {
                    break;
                }
                total += pushed;
            }
        }
        total
    }

    /// Nodes reachable from `s` along positive-residual edges.
    pub fn reachable(&self, s: usize) -> Vec<bool> {
        let mut seen = vec![false; self.adj.len()];
        seen[s] = true;
        let mut queue = VecDeque::from([s]);
        while let Some(u) = queue.pop_front() {
            for &e in &self.adj[u] {
                let v = self.to[e];
                if !seen[v] && self.cap[e] > BigInt::zero() {
                    seen[v] = true;
                    queue.push_back(v);
                }
            }
        }
        seen
    }
}

/// Min-cost flow via successive shortest paths; label-correcting search
/// tolerates the negative reverse costs in residual graphs.
pub(crate) struct CostFlowNetwork {
    to: Vec<usize>,
    cap: Vec<BigInt>,
    cost: Vec<BigInt>,
    adj: Vec<Vec<usize>>,
}

impl CostFlowNetwork {
    pub fn new(nodes: usize) -> Self {
        CostFlowNetwork {
            to: Vec::new(),
            cap: Vec::new(),
            cost: Vec::new(),
            adj: vec![Vec::new(); nodes],
        }
    }

    pub fn add_edge(&mut self, u: usize, v: usize, cap: BigInt, cost: BigInt) -> usize {
        let id = self.to.len();
        self.to.push(v);
        self.cap.push(cap);
        self.cost.push(cost.clone());
        self.adj[u].push(id);
        self.to.push(u);
        self.cap.push(BigInt::zero());
        self.cost.push(-cost);
        self.adj[v].push(id + 1);
        id
    }

    pub fn flow_on(&self, edge: usize) -> &BigInt {
        &self.cap[edge ^ 1]
    }

    fn shortest_path(&self, s: usize) -> (Vec<Option<BigInt>>, Vec<usize>) {
        let n = self.adj.len();
        let mut dist: Vec<Option<BigInt>> = vec![None; n];
        let mut prev_edge = vec![usize::MAX; n];
        let mut in_queue = vec![false; n];
        dist[s] = Some(BigInt::zero());
        let mut queue = VecDeque::from([s]);
        in_queue[s] = true;
        while let Some(u) = queue.pop_front() {
            in_queue[u] = false;
            let du = dist[u].clone().expect("queued nodes have distances");
            for &e in &self.adj[u] {
                if self.cap[e].is_zero() {
                    continue;
                }
                let v = self.to[e];
                let cand = &du + &self.cost[e];
                if dist[v].as_ref().is_none_or(|dv| &cand < dv) {
                    dist[v] = Some(cand);
                    prev_edge[v] = e;
                    if !in_queue[v] {
                        in_queue[v] = true;
                        queue.push_back(v);
                    }
                }
            }
        }
        (dist, prev_edge)
    }

    /// Pushes as much flow as possible from `s` to `t`, cheapest paths first.
    /// Returns (flow, cost).
    pub fn min_cost_max_flow(&mut self, s: usize, t: usize) -> (BigInt, BigInt) {
        let mut flow = BigInt::zero();
        let mut cost = BigInt::zero();
        loop {
            let (dist, prev_edge) = self.shortest_path(s);
            if dist[t].is_none() {
                return (flow, cost);
            }
            let mut bottleneck: Option<BigInt> = None;
            let mut v = t;
            while v != s {
                let e = prev_edge[v];
                if bottleneck.as_ref().is_none_or(|b| &self.cap[e] < b) {
                    bottleneck = Some(self.cap[e].clone());
                }
                v = self.to[e ^ 1];
            }
            let push = bottleneck.expect("path has at least one edge");
            let mut v = t;
            while v != s {
                let e = prev_edge[v];
                self.cap[e] -= &push;
                self.cap[e ^ 1] += &push;
                cost += &push * &self.cost[e];
                v = self.to[e ^ 1];
            }
            flow += push;
        }
    }

    /// Shortest distances in the final residual graph from a virtual root
    /// joined to every node by a zero-cost arc. Finite everywhere; requires
    /// the solved (hence negative-cycle-free) residual.
    pub fn residual_distances(&self) -> Vec<BigInt> {
        let n = self.adj.len();
        let mut dist = vec![BigInt::zero(); n];
        let mut in_queue = vec![true; n];
        let mut queue: VecDeque<usize> = (0..n).collect();
        while let Some(u) = queue.pop_front() {
            in_queue[u] = false;
            for &e in &self.adj[u] {
                if self.cap[e].is_zero() {
                    continue;
                }
                let v = self.to[e];
                let cand = &dist[u] + &self.cost[e];
                if cand < dist[v] {
                    dist[v] = cand;
                    if !in_queue[v] {
                        in_queue[v] = true;
                        queue.push_back(v);
                    }
                }
            }
        }
        dist
    }
}
