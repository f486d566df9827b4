//! The canonical intrinsic metric, set distances, the decay function ζ_s and
//! the heat-kernel off-diagonal bound.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{VertexSubset, WeightedGraph};
use crate::operators::{inner, norm_p};
use crate::report::{CheckReport, Relation, DEFAULT_TOL};
use crate::semigroup::HeatKernel;

/// Intrinsic slack may dip this far below zero through rounding.
pub const SLACK_TOL: f64 = 1e-12;
/// Above this value of `rs/t` ζ switches to its asymptotic form.
pub const ZETA_ASYMPTOTIC: f64 = 1e8;

#[derive(Debug, Clone, Serialize)]
pub struct IntrinsicMetric {
    /// Edge lengths aligned with `offsets`/`targets` of the host graph.
    offsets: Vec<usize>,
    targets: Vec<usize>,
    lengths: Vec<f64>,
    /// `m(x) − Σ_y ω(x,y) ρ(x,y)²`
    pub slack: Vec<f64>,
    pub jump_size: f64,
}

#[derive(Debug, PartialEq)]
struct Entry(f64, usize);

impl Eq for Entry {}

impl Ord for Entry {
    // min-heap on distance, then on vertex index
    fn cmp(&self, other: &Self) -> Ordering {
        other.0.total_cmp(&self.0).then(other.1.cmp(&self.1))
    }
}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// `ρ₀(x, y) = min{√(m(x)/Deg(x)), √(m(y)/Deg(y))}` on edges, extended to
/// a path metric.
pub fn canonical_intrinsic_metric(g: &WeightedGraph) -> Result<IntrinsicMetric> {
    let n = g.num_vertices();
    let scale: Vec<f64> = (0..n).map(|x| (g.m(x) / g.deg(x)).sqrt()).collect();
    let mut offsets = vec![0];
    let mut targets = Vec::new();
    let mut lengths = Vec::new();
    let mut slack = Vec::with_capacity(n);
    let mut jump_size: f64 = 0.0;
    for x in 0..n {
        let mut used = 0.0;
        for (y, w) in g.neighbors(x) {
            let len = scale[x].min(scale[y]);
            targets.push(y);
            lengths.push(len);
            used += w * len * len;
            jump_size = jump_size.max(len);
        }
        offsets.push(targets.len());
        let s = g.m(x) - used;
        if s < -SLACK_TOL * g.m(x).max(1.0) {
            return Err(Error::IntrinsicViolation {
                vertex: x,
                slack: s,
            });
        }
        slack.push(s);
    }
    Ok(IntrinsicMetric {
        offsets,
        targets,
        lengths,
        slack,
        jump_size,
    })
}

impl IntrinsicMetric {
    pub fn num_vertices(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn edge_length(&self, x: usize, y: usize) -> Option<f64> {
        let range = self.offsets[x]..self.offsets[x + 1];
        self.targets[range.clone()]
            .binary_search(&y)
            .ok()
            .map(|i| self.lengths[range.start + i])
    }

    /// Shortest-path distances from a set of sources.
    pub fn distances_from(&self, sources: &[usize]) -> Vec<f64> {
        let n = self.num_vertices();
        let mut dist = vec![f64::INFINITY; n];
        let mut heap = BinaryHeap::new();
        for &s in sources {
            dist[s] = 0.0;
            heap.push(Entry(0.0, s));
        }
        while let Some(Entry(d, x)) = heap.pop() {
            if d > dist[x] {
                continue;
            }
            for k in self.offsets[x]..self.offsets[x + 1] {
                let y = self.targets[k];
                let nd = d + self.lengths[k];
                if nd < dist[y] {
                    dist[y] = nd;
                    heap.push(Entry(nd, y));
                }
            }
        }
        dist
    }

    pub fn distance(&self, x: usize, y: usize) -> f64 {
        self.distances_from(&[x])[y]
    }

    /// Full distance matrix, one Dijkstra per source.
    pub fn all_pairs(&self) -> Vec<Vec<f64>> {
        let n = self.num_vertices();
        #[cfg(feature = "parallel")]
        {
            use rayon::prelude::*;
            (0..n)
                .into_par_iter()
                .map(|x| self.distances_from(&[x]))
                .collect()
        }
        #[cfg(not(feature = "parallel"))]
        {
            (0..n).map(|x| self.distances_from(&[x])).collect()
        }
    }
}

/// `ρ(A, B) = min_{x∈A, y∈B} ρ(x, y)`.
pub fn distance_between_sets(
    metric: &IntrinsicMetric,
    a: &VertexSubset,
    b: &VertexSubset,
) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptySubset);
    }
    if a.host_size() != metric.num_vertices() || b.host_size() != metric.num_vertices() {
        return Err(Error::InvalidParameter(
            "subsets must belong to the metric's graph".into(),
        ));
    }
    if a.intersects(b) {
        return Ok(0.0);
    }
    let dist = metric.distances_from(a.members());
    Ok(b.members()
        .iter()
        .map(|&y| dist[y])
        .fold(f64::INFINITY, f64::min))
}

/// `ζ_s(t, r) = (1/s²)(rs·arcsinh(rs/t) − √(t² + r²s²) + t)`.
///
/// Evaluated as `(t/s²)(z·arcsinh z − z²/(1 + √(1 + z²)))` with `z = rs/t`,
/// and through `rs·ln(2rs/t) − rs + t` once `z` exceeds [`ZETA_ASYMPTOTIC`].
pub fn zeta(s: f64, t: f64, r: f64) -> Result<f64> {
    if !(s > 0.0 && s.is_finite()) || !(t > 0.0 && t.is_finite()) {
        return Err(Error::Domain(format!(
            "zeta needs s > 0 and t > 0, got s = {s}, t = {t}"
        )));
    }
    if !(r >= 0.0) {
        return Err(Error::Domain(format!("zeta needs r ≥ 0, got {r}")));
    }
    if r == 0.0 {
        return Ok(0.0);
    }
    let z = r * s / t;
    if z > ZETA_ASYMPTOTIC {
        return Ok(zeta_asymptotic(s, t, r));
    }
    Ok(t / (s * s) * (z * z.asinh() - z * z / (1.0 + (1.0 + z * z).sqrt())))
}

fn zeta_asymptotic(s: f64, t: f64, r: f64) -> f64 {
    let rs = r * s;
    (rs * (2.0 * rs / t).ln() - rs + t) / (s * s)
}

/// `⟨P_tf, h⟩ ≤ e^{−λt − ζ_s(t, ρ(A,B))} ‖f‖₂ ‖h‖₂` for `f` supported in `A`
/// and `h` in `B`. With a Dirichlet subset the restricted semigroup is used.
#[allow(clippy::too_many_arguments)]
pub fn dgg_check(
    g: &WeightedGraph,
    metric: &IntrinsicMetric,
    a: &VertexSubset,
    b: &VertexSubset,
    f: &[f64],
    h: &[f64],
    t: f64,
    lambda: f64,
    dirichlet: Option<&VertexSubset>,
) -> Result<CheckReport> {
    let kernel = HeatKernel::new(g, dirichlet)?;
    dgg_check_with(&kernel, g, metric, a, b, f, h, t, lambda)
}

#[allow(clippy::too_many_arguments)]
pub fn dgg_check_with(
    kernel: &HeatKernel,
    g: &WeightedGraph,
    metric: &IntrinsicMetric,
    a: &VertexSubset,
    b: &VertexSubset,
    f: &[f64],
    h: &[f64],
    t: f64,
    lambda: f64,
) -> Result<CheckReport> {
    let n = g.num_vertices();
    if f.len() != n || h.len() != n {
        return Err(Error::InvalidParameter(
            "function length does not match the graph".into(),
        ));
    }
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::Domain(format!("t must be positive, got {t}")));
    }
    let outside = |u: &[f64], set: &VertexSubset| (0..n).any(|x| u[x] != 0.0 && !set.contains(x));
    if outside(f, a) || outside(h, b) {
        return Err(Error::SupportViolation);
    }
    let rho = distance_between_sets(metric, a, b)?;
    let z = zeta(metric.jump_size, t, rho)?;
    let lhs = inner(g, &kernel.apply(f, t), h);
    let rhs = (-lambda * t - z).exp() * norm_p(g, f, 2.0) * norm_p(g, h, 2.0);
    Ok(CheckReport::new(
        "dgg",
        g,
        Relation::AtMost,
        lhs,
        rhs,
        DEFAULT_TOL,
        "⟨P_t f, h⟩ ≤ e^{-λt - ζ_s(t, ρ(A,B))} ‖f‖_2 ‖h‖_2",
    )
    .param("t", t)
    .param("lambda", lambda)
    .param("A", a.labels(g))
    .param("B", b.labels(g))
    .with_extra("rho", rho)
    .with_extra("zeta", z)
    .with_extra("jump_size", metric.jump_size))
}
