//! Highest-label push-relabel maximum flow with the gap heuristic.
//!
//! Only the preflow phase is run: it already determines the minimum cut,
//! which is all the callers need.

#[derive(Debug, Clone)]
pub struct FlowNetwork {
    adj: Vec<Vec<usize>>,
    to: Vec<usize>,
    cap: Vec<f64>,
    original: Vec<f64>,
}

impl FlowNetwork {
    pub fn new(nodes: usize) -> Self {
        FlowNetwork {
            adj: vec![Vec::new(); nodes],
            to: Vec::new(),
            cap: Vec::new(),
            original: Vec::new(),
        }
    }

    pub fn nodes(&self) -> usize {
        self.adj.len()
    }

    /// Arc `u → v` with capacity `c` and reverse capacity `rc`.
    pub fn add_edge(&mut self, u: usize, v: usize, c: f64, rc: f64) {
        debug_assert!(c >= 0.0 && rc >= 0.0);
        let e = self.to.len();
        self.to.extend([v, u]);
        self.cap.extend([c, rc]);
        self.original.extend([c, rc]);
        self.adj[u].push(e);
        self.adj[v].push(e + 1);
    }

    /// Value of the minimum `s`–`t` cut together with its maximal source
    /// side: every node that cannot reach `t` in the final residual graph.
    pub fn min_cut(&mut self, s: usize, t: usize) -> (f64, Vec<bool>) {
        self.preflow(s, t);
        let n = self.nodes();
        let eps = self.eps();
        let mut reaches_t = vec![false; n];
        reaches_t[t] = true;
        let mut stack = vec![t];
        while let Some(v) = stack.pop() {
            for &e in &self.adj[v] {
                // arc u → v is e ^ 1 seen from u
                let u = self.to[e];
                if !reaches_t[u] && self.cap[e ^ 1] > eps {
                    reaches_t[u] = true;
                    stack.push(u);
                }
            }
        }
        let source_side: Vec<bool> = reaches_t.iter().map(|&r| !r).collect();
        let mut value = 0.0;
        for u in 0..n {
            if source_side[u] {
                for &e in &self.adj[u] {
                    if !source_side[self.to[e]] {
                        value += self.original[e];
                    }
                }
            }
        }
        (value, source_side)
    }

    fn eps(&self) -> f64 {
        let total: f64 = self.original.iter().sum();
        1e-15 * total.max(f64::MIN_POSITIVE)
    }

    fn preflow(&mut self, s: usize, t: usize) {
        let n = self.nodes();
        let eps = self.eps();
        let mut height = vec![0usize; n];
        let mut excess = vec![0.0f64; n];
        let mut count = vec![0usize; 2 * n + 1];
        let mut buckets: Vec<Vec<usize>> = vec![Vec::new(); 2 * n + 1];
        let mut active = vec![false; n];
        let mut current = vec![0usize; n];

        height[s] = n;
        count[0] = n - 1;
        count[n] = 1;
        let source_arcs = self.adj[s].clone();
        for e in source_arcs {
            let c = self.cap[e];
            if c > 0.0 {
                let v = self.to[e];
                self.cap[e] = 0.0;
                self.cap[e ^ 1] += c;
                excess[v] += c;
                excess[s] -= c;
                if v != t && !active[v] && excess[v] > eps {
                    active[v] = true;
                    buckets[height[v]].push(v);
                }
            }
        }
        let mut top = 0usize;
        loop {
            while top > 0 && buckets[top].is_empty() {
                top -= 1;
            }
            let Some(u) = buckets[top].pop() else { break };
            active[u] = false;
            if height[u] >= n {
                // cannot reach the sink any more; the preflow cut is final
                continue;
            }
            // discharge
            while excess[u] > eps && height[u] < n {
                if current[u] == self.adj[u].len() {
                    let old = height[u];
                    let mut min_h = usize::MAX;
                    for &e in &self.adj[u] {
                        if self.cap[e] > eps {
                            min_h = min_h.min(height[self.to[e]]);
                        }
                    }
                    let new_h = if min_h == usize::MAX {
                        n
                    } else {
                        (min_h + 1).min(n)
                    };
                    count[old] -= 1;
                    height[u] = new_h;
                    count[new_h] += 1;
                    current[u] = 0;
                    if count[old] == 0 && old < n {
                        // gap: everything above `old` is cut off from the sink
                        for v in 0..n {
                            if v != s && height[v] > old && height[v] < n {
                                count[height[v]] -= 1;
                                height[v] = n;
                                count[n] += 1;
                            }
                        }
                    }
                    continue;
                }
                let e = self.adj[u][current[u]];
                let v = self.to[e];
                if self.cap[e] > eps && height[u] == height[v] + 1 {
                    let delta = excess[u].min(self.cap[e]);
                    self.cap[e] -= delta;
                    self.cap[e ^ 1] += delta;
                    excess[u] -= delta;
                    excess[v] += delta;
                    if v != s && v != t && !active[v] && excess[v] > eps {
                        active[v] = true;
                        buckets[height[v]].push(v);
                        top = top.max(height[v]);
                    }
                    if self.cap[e] <= eps {
                        current[u] += 1;
                    }
                } else {
                    current[u] += 1;
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn textbook_network() {
        // CLRS example, max flow 23
        let mut net = FlowNetwork::new(6);
        for (u, v, c) in [
            (0, 1, 16.0),
            (0, 2, 13.0),
            (1, 3, 12.0),
            (2, 1, 4.0),
            (2, 4, 14.0),
            (3, 2, 9.0),
            (3, 5, 20.0),
            (4, 3, 7.0),
            (4, 5, 4.0),
        ] {
            net.add_edge(u, v, c, 0.0);
        }
        let (value, side) = net.min_cut(0, 5);
        assert!((value - 23.0).abs() < 1e-12);
        assert!(side[0] && !side[5]);
    }

    #[test]
    fn undirected_path_cut_is_the_weakest_edge() {
        let mut net = FlowNetwork::new(4);
        net.add_edge(0, 1, 3.0, 3.0);
        net.add_edge(1, 2, 0.5, 0.5);
        net.add_edge(2, 3, 2.0, 2.0);
        let (value, side) = net.min_cut(0, 3);
        assert!((value - 0.5).abs() < 1e-15);
        assert_eq!(side, vec![true, true, false, false]);
    }

    #[test]
    fn maximal_source_side_on_ties() {
        // both {0} and {0,1} are minimum cuts of value 1
        let mut net = FlowNetwork::new(3);
        net.add_edge(0, 1, 1.0, 0.0);
        net.add_edge(1, 2, 1.0, 0.0);
        let (value, side) = net.min_cut(0, 2);
        assert_eq!(value, 1.0);
        assert_eq!(side, vec![true, true, false]);
    }
}
