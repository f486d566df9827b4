//! Boundary volumes and Cheeger constants.
//!
//! Two different constants live here. The finite-graph constant
//! `h = min_U |∂U| / min(|U|, |V∖U|)` is computed exactly by enumeration
//! (small graphs) or bounded from above by a spectral sweep. The subset
//! constant `h(Ω) = inf_{∅≠U⊆Ω} |∂U| / |U|` is computed exactly by
//! Dinkelbach iteration over parametric minimum cuts.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{volume, VertexSubset, WeightedGraph};
use crate::maxflow::FlowNetwork;
use crate::spectral::lambda1_finite;

pub const ENUMERATION_CAP: usize = 20;
/// Relative tolerance under which two enumerated ratios count as tied.
pub const TIE_TOL: f64 = 1e-12;
pub const DINKELBACH_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Enumeration,
    Dinkelbach,
    Sweep,
}

#[derive(Debug, Clone, Serialize)]
pub struct IsoperimetricResult {
    pub value: f64,
    pub subset: VertexSubset,
    pub method: Method,
    /// Subsets visited (enumeration), cut computations (Dinkelbach) or
    /// prefixes evaluated (sweep).
    pub iterations: usize,
}

/// `|∂U| = Σ_{x∈U, y∉U} ω(x, y)`.
pub fn boundary_volume(g: &WeightedGraph, u: &VertexSubset) -> Result<f64> {
    u.check_host(g)
        .map_err(|_| Error::UnknownVertex(format!("subset of a {}-vertex graph", u.host_size())))?;
    Ok(boundary_of_mask(g, &u.mask()))
}

fn boundary_of_mask(g: &WeightedGraph, mask: &[bool]) -> f64 {
    let mut b = 0.0;
    for (x, &inside) in mask.iter().enumerate() {
        if inside {
            for (y, w) in g.neighbors(x) {
                if !mask[y] {
                    b += w;
                }
            }
        }
    }
    b
}

/// Finite-graph ratio of `U` (either side of the cut gives the same value).
pub fn finite_ratio(g: &WeightedGraph, u: &VertexSubset) -> Result<f64> {
    if u.is_empty() || u.is_full() {
        return Err(Error::InvalidParameter(
            "subset must be proper and nonempty".into(),
        ));
    }
    let b = boundary_volume(g, u)?;
    let vu = volume(g, u);
    let total: f64 = g.measure().iter().sum();
    Ok(b / vu.min(total - vu))
}

/// Subset ratio `|∂U| / |U|`.
pub fn subset_ratio(g: &WeightedGraph, u: &VertexSubset) -> Result<f64> {
    if u.is_empty() {
        return Err(Error::EmptySubset);
    }
    Ok(boundary_volume(g, u)? / volume(g, u))
}

#[derive(Debug, Clone)]
struct Candidate {
    value: f64,
    members: Vec<usize>,
}

impl Candidate {
    fn better_than(&self, other: &Candidate) -> bool {
        let scale = self
            .value
            .abs()
            .max(other.value.abs())
            .max(f64::MIN_POSITIVE);
        if (self.value - other.value).abs() <= TIE_TOL * scale {
            self.members < other.members
        } else {
            self.value < other.value
        }
    }
}

/// Exact finite-graph Cheeger constant by enumerating all cuts.
pub fn cheeger_finite_exact(g: &WeightedGraph) -> Result<IsoperimetricResult> {
    let n = g.num_vertices();
    if n > ENUMERATION_CAP {
        return Err(Error::EnumerationCapExceeded {
            size: n,
            cap: ENUMERATION_CAP,
        });
    }
    if n < 2 {
        return Err(Error::InvalidParameter("need at least two vertices".into()));
    }
    let total: f64 = g.measure().iter().sum();
    // vertex 0 always sits on the `mask` side; bits == 0 would be all of V
    let classes: u64 = (1u64 << (n - 1)) - 1;
    let evaluate = |bits: u64| -> Candidate {
        let mask: Vec<bool> = (0..n).map(|i| i == 0 || bits >> (i - 1) & 1 == 0).collect();
        let b = boundary_of_mask(g, &mask);
        let vol: f64 = (0..n).filter(|&i| mask[i]).map(|i| g.m(i)).sum();
        let other = total - vol;
        let take_mask = vol <= other;
        let members: Vec<usize> = (0..n).filter(|&i| mask[i] == take_mask).collect();
        Candidate {
            value: b / vol.min(other),
            members,
        }
    };
    let best = best_over(1..classes + 1, &evaluate);
    Ok(IsoperimetricResult {
        value: best.value,
        subset: VertexSubset::new(g, best.members)?,
        method: Method::Enumeration,
        iterations: classes as usize,
    })
}

#[cfg(feature = "parallel")]
fn best_over(
    range: std::ops::Range<u64>,
    evaluate: &(dyn Fn(u64) -> Candidate + Sync),
) -> Candidate {
    use rayon::prelude::*;
    const BLOCK: u64 = 1 << 12;
    let blocks = range.end.div_ceil(BLOCK);
    let per_block: Vec<Candidate> = (0..blocks)
        .into_par_iter()
        .map(|b| {
            best_sequential(
                (b * BLOCK).max(range.start)..((b + 1) * BLOCK).min(range.end),
                evaluate,
            )
        })
        .collect();
    per_block
        .into_iter()
        .reduce(|a, b| if b.better_than(&a) { b } else { a })
        .expect("at least one class")
}

#[cfg(not(feature = "parallel"))]
fn best_over(range: std::ops::Range<u64>, evaluate: &dyn Fn(u64) -> Candidate) -> Candidate {
    best_sequential(range, evaluate)
}

fn best_sequential(range: std::ops::Range<u64>, evaluate: &dyn Fn(u64) -> Candidate) -> Candidate {
    range
        .map(evaluate)
        .reduce(|a, b| if b.better_than(&a) { b } else { a })
        .expect("nonempty range")
}

/// Exact `h(Ω)` by Dinkelbach iteration. Each step solves
/// `min_{U⊆Ω} |∂U| − β|U|` as a minimum cut.
pub fn cheeger_subset(g: &WeightedGraph, omega: &VertexSubset) -> Result<IsoperimetricResult> {
    omega.check_host(g)?;
    if omega.is_empty() {
        return Err(Error::EmptySubset);
    }
    let members = omega.members();
    let k = members.len();
    let mut local = vec![usize::MAX; g.num_vertices()];
    for (i, &x) in members.iter().enumerate() {
        local[x] = i;
    }
    let vol_omega = volume(g, omega);
    let tol = DINKELBACH_TOL * vol_omega;

    let mut best = omega.clone();
    let mut beta = subset_ratio(g, &best)?;
    let mut iterations = 0;
    loop {
        iterations += 1;
        let (s, t) = (k, k + 1);
        let mut net = FlowNetwork::new(k + 2);
        for (i, &x) in members.iter().enumerate() {
            net.add_edge(s, i, beta * g.m(x), 0.0);
            let mut exterior = 0.0;
            for (y, w) in g.neighbors(x) {
                match local[y] {
                    usize::MAX => exterior += w,
                    j if j > i => net.add_edge(i, j, w, w),
                    _ => {}
                }
            }
            if exterior > 0.0 {
                net.add_edge(i, t, exterior, 0.0);
            }
        }
        let (_, side) = net.min_cut(s, t);
        let candidate: Vec<usize> = (0..k).filter(|&i| side[i]).map(|i| members[i]).collect();
        if candidate.is_empty() {
            break;
        }
        let u = VertexSubset::new(g, candidate)?;
        let objective = boundary_volume(g, &u)? - beta * volume(g, &u);
        if objective < -tol {
            beta = subset_ratio(g, &u)?;
            best = u;
        } else {
            break;
        }
    }
    Ok(IsoperimetricResult {
        value: beta,
        subset: best,
        method: Method::Dinkelbach,
        iterations,
    })
}

/// Upper bound on the finite-graph constant from sweeping the first
/// nontrivial eigenvector.
pub fn cheeger_sweep(g: &WeightedGraph) -> Result<IsoperimetricResult> {
    let n = g.num_vertices();
    let phi = lambda1_finite(g)?.eigenvector;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| phi[a].total_cmp(&phi[b]).then(a.cmp(&b)));
    let total: f64 = g.measure().iter().sum();
    let mut inside = vec![false; n];
    let (mut boundary, mut vol) = (0.0, 0.0);
    let mut best: Option<(f64, usize)> = None;
    for (k, &x) in order.iter().enumerate().take(n - 1) {
        for (y, w) in g.neighbors(x) {
            boundary += if inside[y] { -w } else { w };
        }
        inside[x] = true;
        vol += g.m(x);
        let value = boundary.max(0.0) / vol.min(total - vol);
        if best.is_none_or(|(b, _)| value < b) {
            best = Some((value, k + 1));
        }
    }
    let (_, len) = best.expect("at least two vertices");
    let prefix = VertexSubset::new(g, order[..len].iter().copied())?;
    let vp = volume(g, &prefix);
    let subset = if vp <= total - vp {
        prefix
    } else {
        prefix.complement()
    };
    // recompute from the subset so the reported value is exact
    let value = finite_ratio(g, &subset)?;
    Ok(IsoperimetricResult {
        value,
        subset,
        method: Method::Sweep,
        iterations: n - 1,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::{generate, Family};
    use crate::graph::MeasurePolicy;

    fn gen(f: Family, p: MeasurePolicy) -> WeightedGraph {
        generate(f, p).unwrap()
    }

    #[test]
    fn boundary_examples() {
        let g = gen(Family::Cycle { n: 4 }, MeasurePolicy::Normalized);
        assert_eq!(boundary_volume(&g, &VertexSubset::all(&g)).unwrap(), 0.0);
        let u = VertexSubset::new(&g, [0, 1]).unwrap();
        assert_eq!(boundary_volume(&g, &u).unwrap(), 2.0);
        assert_eq!(boundary_volume(&g, &u.complement()).unwrap(), 2.0);
        let g2 = gen(Family::Path { n: 2 }, MeasurePolicy::Normalized);
        assert_eq!(
            boundary_volume(&g2, &VertexSubset::new(&g2, [0]).unwrap()).unwrap(),
            1.0
        );
        assert!(matches!(
            boundary_volume(&g2, &u),
            Err(Error::UnknownVertex(_))
        ));
    }

    #[test]
    fn exact_examples() {
        let r =
            cheeger_finite_exact(&gen(Family::Path { n: 2 }, MeasurePolicy::Normalized)).unwrap();
        assert_eq!((r.value, r.subset.members()), (1.0, &[0usize][..]));
        let r =
            cheeger_finite_exact(&gen(Family::Cycle { n: 4 }, MeasurePolicy::Normalized)).unwrap();
        assert_eq!(r.value, 0.5);
        assert_eq!(r.iterations, 7);
        let r = cheeger_finite_exact(&gen(Family::Hypercube { d: 3 }, MeasurePolicy::Normalized))
            .unwrap();
        assert!((r.value - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(r.subset.len(), 4);
        let big = gen(Family::Path { n: 21 }, MeasurePolicy::Normalized);
        assert!(matches!(
            cheeger_finite_exact(&big),
            Err(Error::EnumerationCapExceeded { size: 21, cap: 20 })
        ));
    }

    #[test]
    fn subset_examples() {
        let g = gen(Family::Path { n: 7 }, MeasurePolicy::Combinatorial);
        let omega = VertexSubset::new(&g, 1..6).unwrap();
        let r = cheeger_subset(&g, &omega).unwrap();
        assert!((r.value - 0.4).abs() < 1e-15);
        assert_eq!(r.subset, omega);
        let single = VertexSubset::new(&g, [3]).unwrap();
        assert_eq!(cheeger_subset(&g, &single).unwrap().value, 2.0);
        assert!(matches!(
            cheeger_subset(&g, &VertexSubset::new(&g, []).unwrap()),
            Err(Error::EmptySubset)
        ));
        assert_eq!(
            cheeger_subset(&g, &VertexSubset::all(&g)).unwrap().value,
            0.0
        );
    }

    #[test]
    fn sweep_examples() {
        let r = cheeger_sweep(&gen(Family::Path { n: 2 }, MeasurePolicy::Normalized)).unwrap();
        assert_eq!(r.value, 1.0);
        let r = cheeger_sweep(&gen(Family::Cycle { n: 4 }, MeasurePolicy::Normalized)).unwrap();
        assert!((r.value - 0.5).abs() < 1e-15);
    }
}
