//! Feasible circulations with lower bounds, via Dinic max-flow.

use std::collections::VecDeque;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct BoundedArc {
    pub from: usize,
    pub to: usize,
    pub lower: i64,
    pub upper: i64,
}

/// Why no feasible circulation exists: the demand that could not be routed
/// and the node set on the source side of a minimum cut.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct Infeasible {
    pub deficit: i64,
    pub cut: Vec<usize>,
}

#[derive(Debug, Clone)]
struct Edge {
    to: usize,
    cap: i64,
}

#[derive(Debug, Clone)]
pub(crate) struct Dinic {
    edges: Vec<Edge>,
    adj: Vec<Vec<usize>>,
    level: Vec<i32>,
    iter: Vec<usize>,
}

impl Dinic {
    pub fn new(nodes: usize) -> Self {
        Dinic {
            edges: Vec::new(),
            adj: vec![Vec::new(); nodes],
            level: vec![0; nodes],
            iter: vec![0; nodes],
        }
    }

    /// Adds an arc and returns its edge id; the reverse edge is `id ^ 1`.
    pub fn add_edge(&mut self, from: usize, to: usize, cap: i64) -> usize {
        let id = self.edges.len();
        self.edges.push(Edge { to, cap });
        self.edges.push(Edge { to: from, cap: 0 });
        self.adj[from].push(id);
        self.adj[to].push(id + 1);
        id
    }

    /// Flow currently pushed along edge `id`.
    pub fn flow(&self, id: usize) -> i64 {
        self.edges[id ^ 1].cap
    }

    fn bfs(&mut self, s: usize) {
        self.level.iter_mut().for_each(|l| *l = -1);
        self.level[s] = 0;
        let mut queue = VecDeque::from([s]);
        while let Some(u) = queue.pop_front() {
            for &e in &self.adj[u] {
                let v = self.edges[e].to;
                if self.edges[e].cap > 0 && self.level[v] < 0 {
                    self.level[v] = self.level[u] + 1;
                    queue.push_back(v);
                }
            }
        }
    }

    fn dfs(&mut self, u: usize, t: usize, pushed: i64) -> i64 {
        if u == t {
            return pushed;
        }
        while self.iter[u] < self.adj[u].len() {
            let e = self.adj[u][self.iter[u]];
            let v = self.edges[e].to;
            if self.edges[e].cap > 0 && self.level[v] == self.level[u] + 1 {
                let d = self.dfs(v, t, pushed.min(self.edges[e].cap));
                if d > 0 {
                    self.edges[e].cap -= d;
                    self.edges[e ^ 1].cap += d;
                    return d;
                }
            }
            self.iter[u] += 1;
        }
        0
    }

    pub fn max_flow(&mut self, s: usize, t: usize) -> i64 {
        let mut total = 0;
        loop {
            self.bfs(s);
            if self.level[t] < 0 {
                return total;
            }
            self.iter.iter_mut().for_each(|i| *i = 0);
            loop {
                let f = self.dfs(s, t, i64::MAX);
                if f == 0 {
                    break;
                }
                total += f;
            }
        }
    }

    /// Nodes reachable from `s` in the residual graph.
    pub fn reachable(&self, s: usize) -> Vec<bool> {
        let mut seen = vec![false; self.adj.len()];
        seen[s] = true;
        let mut stack = vec![s];
        while let Some(u) = stack.pop() {
            for &e in &self.adj[u] {
                let v = self.edges[e].to;
                if self.edges[e].cap > 0 && !seen[v] {
                    seen[v] = true;
                    stack.push(v);
                }
            }
        }
        seen
    }
}

/// Finds integral arc flows `lower <= f <= upper` conserving flow at every
/// node. Arcs are explored in the order given, which makes the result
/// deterministic.
pub(crate) fn feasible_circulation(
    nodes: usize,
    arcs: &[BoundedArc],
) -> Result<Vec<i64>, Infeasible> {
    let ss = nodes;
    let tt = nodes + 1;
    let mut net = Dinic::new(nodes + 2);
    let mut excess = vec![0i64; nodes];
    let ids: Vec<usize> = arcs
        .iter()
        .map(|a| {
            debug_assert!(a.lower <= a.upper);
            excess[a.to] += a.lower;
            excess[a.from] -= a.lower;
            net.add_edge(a.from, a.to, a.upper - a.lower)
        })
        .collect();
    let mut demand = 0;
    for (v, &e) in excess.iter().enumerate() {
        if e > 0 {
            net.add_edge(ss, v, e);
            demand += e;
        } else if e < 0 {
            net.add_edge(v, tt, -e);
        }
    }
    let flow = net.max_flow(ss, tt);
    if flow < demand {
        let seen = net.reachable(ss);
        return Err(Infeasible {
            deficit: demand - flow,
            cut: (0..nodes).filter(|&v| seen[v]).collect(),
        });
    }
    Ok(arcs
        .iter()
        .zip(ids)
        .map(|(a, id)| a.lower + net.flow(id))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn arc(from: usize, to: usize, lower: i64, upper: i64) -> BoundedArc {
        BoundedArc {
            from,
            to,
            lower,
            upper,
        }
    }

    #[test]
    fn classic_max_flow() {
        let mut d = Dinic::new(4);
        d.add_edge(0, 1, 3);
        d.add_edge(0, 2, 2);
        d.add_edge(1, 2, 1);
        d.add_edge(1, 3, 2);
        d.add_edge(2, 3, 3);
        assert_eq!(d.max_flow(0, 3), 5);
    }

    #[test]
    fn circulation_respects_lower_bounds() {
        // 0 -> 1 -> 2 -> 0 with a forced unit on the middle arc.
        let arcs = [arc(0, 1, 0, 5), arc(1, 2, 1, 1), arc(2, 0, 0, 5)];
        let f = feasible_circulation(3, &arcs).unwrap();
        assert_eq!(f, vec![1, 1, 1]);
    }

    #[test]
    fn contradictory_bounds_yield_a_cut() {
        let arcs = [arc(0, 1, 2, 2), arc(1, 0, 0, 1)];
        let err = feasible_circulation(2, &arcs).unwrap_err();
        assert_eq!(err.deficit, 1);
        assert!(!err.cut.is_empty());
    }
}
