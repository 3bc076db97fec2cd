//! Min-cost flow by successive shortest paths with Johnson potentials.
//!
//! Initial potentials come from Bellman-Ford (queue variant), so arcs may
//! carry negative costs as long as the residual graph has no negative cycle
//! at the start. The split networks are DAGs, which guarantees that.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, VecDeque};

const INF: i64 = i64::MAX / 4;

#[derive(Clone, Debug)]
struct Arc {
    to: usize,
    cap: i64,
    cost: i64,
}

#[derive(Clone, Debug, Default)]
pub struct MinCostFlow {
    adj: Vec<Vec<usize>>,
    arcs: Vec<Arc>,
    original_cap: Vec<i64>,
}

/// Result of a min-cost flow run.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FlowOutcome {
    pub flow: i64,
    pub cost: i64,
}

impl MinCostFlow {
    pub fn new(nodes: usize) -> MinCostFlow {
        MinCostFlow {
            adj: vec![Vec::new(); nodes],
            arcs: Vec::new(),
            original_cap: Vec::new(),
        }
    }

    pub fn add_node(&mut self) -> usize {
        self.adj.push(Vec::new());
        self.adj.len() - 1
    }

    pub fn node_count(&self) -> usize {
        self.adj.len()
    }

    /// Adds arc `u → v`; returns its id for [`MinCostFlow::flow_on`].
    pub fn add_arc(&mut self, u: usize, v: usize, cap: i64, cost: i64) -> usize {
        let id = self.arcs.len();
        self.arcs.push(Arc { to: v, cap, cost });
        self.arcs.push(Arc {
            to: u,
            cap: 0,
            cost: -cost,
        });
        self.original_cap.push(cap);
        self.original_cap.push(0);
        self.adj[u].push(id);
        self.adj[v].push(id + 1);
        id
    }

    pub fn flow_on(&self, id: usize) -> i64 {
        self.original_cap[id] - self.arcs[id].cap
    }

    fn initial_potentials(&self, s: usize) -> Vec<i64> {
        let n = self.adj.len();
        let mut dist = vec![INF; n];
        let mut queued = vec![false; n];
        let mut queue = VecDeque::new();
        dist[s] = 0;
        queue.push_back(s);
        queued[s] = true;
        while let Some(u) = queue.pop_front() {
            queued[u] = false;
            for &id in &self.adj[u] {
                let a = &self.arcs[id];
                if a.cap > 0 && dist[u] + a.cost < dist[a.to] {
                    dist[a.to] = dist[u] + a.cost;
                    if !queued[a.to] {
                        queued[a.to] = true;
                        queue.push_back(a.to);
                    }
                }
            }
        }
        dist
    }

    /// Sends up to `limit` units from `s` to `t` at minimum cost.
    pub fn solve(&mut self, s: usize, t: usize, limit: i64) -> FlowOutcome {
        let n = self.adj.len();
        let mut pot = self.initial_potentials(s);
        for p in pot.iter_mut() {
            if *p == INF {
                *p = 0;
            }
        }
        let mut flow = 0;
        let mut cost = 0;
        let mut dist = vec![INF; n];
        let mut prev = vec![usize::MAX; n];
        while flow < limit {
            dist.iter_mut().for_each(|d| *d = INF);
            prev.iter_mut().for_each(|p| *p = usize::MAX);
            dist[s] = 0;
            let mut heap = BinaryHeap::new();
            heap.push(Reverse((0i64, s)));
            while let Some(Reverse((d, u))) = heap.pop() {
                if d > dist[u] {
                    continue;
                }
                for &id in &self.adj[u] {
                    let a = &self.arcs[id];
                    if a.cap <= 0 {
                        continue;
                    }
                    let nd = d + a.cost + pot[u] - pot[a.to];
                    if nd < dist[a.to] {
                        dist[a.to] = nd;
                        prev[a.to] = id;
                        heap.push(Reverse((nd, a.to)));
                    }
                }
            }
            if dist[t] == INF {
                break;
            }
            for v in 0..n {
                if dist[v] < INF {
                    pot[v] += dist[v];
                }
            }
            let mut push = limit - flow;
            let mut v = t;
            while v != s {
                let id = prev[v];
                push = push.min(self.arcs[id].cap);
                v = self.arcs[id ^ 1].to;
            }
            let mut v = t;
            while v != s {
                let id = prev[v];
                self.arcs[id].cap -= push;
                self.arcs[id ^ 1].cap += push;
                cost += push * self.arcs[id].cost;
                v = self.arcs[id ^ 1].to;
            }
            flow += push;
        }
        FlowOutcome { flow, cost }
    }
}
