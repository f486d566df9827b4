//! Bakry–Émery curvature `K(x, n)`: the largest `K` with
//! `Γ₂(f)(x) ≥ (1/n)(Δf)²(x) + K Γ(f)(x)` for every `f`.
//!
//! The infimum over `f` is a generalized eigenvalue problem on the punctured
//! 2-ball. The 2-sphere coordinates only enter the `Γ₂` form, so they are
//! eliminated by minimizing over them (a Schur complement); what remains is
//! a definite pencil against the diagonal `Γ` form on the 1-sphere.

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::graph::{hop_distances, WeightedGraph};
use crate::operators::{
    gamma, gamma2, gamma2_bilinear, laplacian_apply, local_forms, VertexFunction,
};

/// Tolerance on the witness slack `Γ₂ − (Δf)²/n − KΓ` at `Γ(f)(x) = 1`.
pub const WITNESS_TOL: f64 = 1e-8;
/// `cd_check` passes when `K ≤ K(x, n) + CD_TOL` at every vertex.
pub const CD_TOL: f64 = 1e-10;
const PINV_RELATIVE_CUTOFF: f64 = 1e-12;
const INDEFINITE_THRESHOLD: f64 = -1e-10;

/// Dimension parameter `n ∈ (0, ∞]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Dimension(f64);

impl Dimension {
    pub const INFINITE: Dimension = Dimension(f64::INFINITY);

    pub fn new(n: f64) -> Result<Dimension> {
        if n > 0.0 && !n.is_nan() {
            Ok(Dimension(n))
        } else {
            Err(Error::InvalidParameter(format!(
                "dimension must be in (0, inf], got {n}"
            )))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn is_infinite(self) -> bool {
        self.0.is_infinite()
    }

    /// `1/n`, exactly zero for `n = ∞`.
    pub fn inverse(self) -> f64 {
        if self.is_infinite() {
            0.0
        } else {
            1.0 / self.0
        }
    }
}

impl fmt::Display for Dimension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_infinite() {
            f.write_str("inf")
        } else {
            write!(f, "{}", self.0)
        }
    }
}

impl FromStr for Dimension {
    type Err = Error;
    fn from_str(s: &str) -> Result<Dimension> {
        match s.trim() {
            "inf" | "infinity" | "∞" => Ok(Dimension::INFINITE),
            other => other
                .parse::<f64>()
                .map_err(|_| Error::InvalidParameter(format!("bad dimension `{other}`")))
                .and_then(Dimension::new),
        }
    }
}

impl Serialize for Dimension {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        if self.is_infinite() {
            s.serialize_str("inf")
        } else {
            s.serialize_f64(self.0)
        }
    }
}

impl<'de> Deserialize<'de> for Dimension {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(n) => Dimension::new(n).map_err(serde::de::Error::custom),
            Raw::Text(t) => t.parse().map_err(serde::de::Error::custom),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct VertexCurvature {
    pub vertex: usize,
    pub k: f64,
    /// Minimizing function on the whole graph, zero outside `B₂(x) \ {x}`,
    /// scaled to `Γ(f)(x) = 1`.
    pub witness: VertexFunction,
    pub s2_len: usize,
    /// Numerical rank of the eliminated 2-sphere block.
    pub schur_rank: usize,
    /// `Γ₂(f)(x) − (Δf)²(x)/n − K Γ(f)(x)` at the witness.
    pub witness_slack: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct CurvatureResult {
    pub n: Dimension,
    pub vertices: Vec<VertexCurvature>,
    pub global_k: f64,
    /// Vertex attaining the global minimum (smallest index on ties).
    pub argmin: usize,
}

impl CurvatureResult {
    pub fn per_vertex(&self) -> Vec<f64> {
        self.vertices.iter().map(|v| v.k).collect()
    }
}

/// `K(x, n)` with its minimizing witness.
pub fn curvature_at(g: &WeightedGraph, x: usize, n: Dimension) -> Result<VertexCurvature> {
    let lf = local_forms(g, x)?;
    let k1 = lf.s1_len;
    let k2 = lf.s2_len();

    let mut a = lf.a.clone();
    if !n.is_infinite() {
        a -= &lf.w * lf.w.transpose() * (2.0 * n.inverse());
    }
    let p = a.view((0, 0), (k1, k1)).into_owned();
    let q = a.view((0, k1), (k1, k2)).into_owned();
    let r = a.view((k1, k1), (k2, k2)).into_owned();

    let (r_pinv, schur_rank) = if k2 > 0 {
        let eig = SymmetricEigen::new(r);
        let scale = eig.eigenvalues.amax();
        let min = eig.eigenvalues.min();
        if min < INDEFINITE_THRESHOLD {
            return Err(Error::IndefiniteElimination {
                vertex: x,
                eigenvalue: min,
            });
        }
        let cutoff = PINV_RELATIVE_CUTOFF * scale;
        let mut pinv = DMatrix::zeros(k2, k2);
        let mut rank = 0;
        for (i, &lambda) in eig.eigenvalues.iter().enumerate() {
            if lambda > cutoff {
                let v = eig.eigenvectors.column(i);
                pinv += v * v.transpose() / lambda;
                rank += 1;
            }
        }
        (pinv, rank)
    } else {
        (DMatrix::zeros(0, 0), 0)
    };

    let schur = if k2 > 0 {
        &p - &q * &r_pinv * q.transpose()
    } else {
        p
    };
    let inv_sqrt_b: DVector<f64> = DVector::from_fn(k1, |i, _| 1.0 / lf.b[(i, i)].sqrt());
    let mut c = schur;
    for i in 0..k1 {
        for j in 0..k1 {
            c[(i, j)] *= inv_sqrt_b[i] * inv_sqrt_b[j];
        }
    }
    let c = (&c + c.transpose()) * 0.5;
    let (k, v) = smallest_eigenpair(c);

    let f1 = v.component_mul(&inv_sqrt_b);
    let f2 = if k2 > 0 {
        -(&r_pinv * q.transpose() * &f1)
    } else {
        DVector::zeros(0)
    };
    // vᵀv = 1 gives 2Γ(f)(x) = 1; rescale to Γ(f)(x) = 1
    let scale = std::f64::consts::SQRT_2;
    let local: Vec<f64> = f1.iter().chain(f2.iter()).map(|v| v * scale).collect();
    let witness = lf.lift(&local, g.num_vertices());
    let witness_slack = cd_slack(g, &witness, x, n, k);

    Ok(VertexCurvature {
        vertex: x,
        k,
        witness,
        s2_len: k2,
        schur_rank,
        witness_slack,
    })
}

/// Smallest eigenpair of a symmetric matrix. Ties keep the lowest index in
/// nalgebra's output order; the eigenvector sign is fixed so that its first
/// non-negligible entry is positive.
fn smallest_eigenpair(c: DMatrix<f64>) -> (f64, DVector<f64>) {
    let eig = SymmetricEigen::new(c);
    let mut best = 0;
    for i in 1..eig.eigenvalues.len() {
        if eig.eigenvalues[i] < eig.eigenvalues[best] {
            best = i;
        }
    }
    let mut v = eig.eigenvectors.column(best).into_owned();
    if let Some(lead) = v.iter().copied().find(|x| x.abs() > 1e-12) {
        if lead < 0.0 {
            v.neg_mut();
        }
    }
    (eig.eigenvalues[best], v)
}

/// `Γ₂(f)(x) − (Δf)²(x)/n − K Γ(f)(x)` through the global operators.
pub fn cd_slack(g: &WeightedGraph, f: &[f64], x: usize, n: Dimension, k: f64) -> f64 {
    let g2 = gamma2(g, f)[x];
    let lap = laplacian_apply(g, f)[x];
    let g1 = gamma(g, f, f)[x];
    g2 - n.inverse() * lap * lap - k * g1
}

/// Curvature at every vertex and the global infimum.
pub fn curvature_function(g: &WeightedGraph, n: Dimension) -> Result<CurvatureResult> {
    let vertices = per_vertex(g, n)?;
    let mut argmin = 0;
    for (i, v) in vertices.iter().enumerate() {
        if v.k < vertices[argmin].k {
            argmin = i;
        }
    }
    Ok(CurvatureResult {
        n,
        global_k: vertices[argmin].k,
        argmin,
        vertices,
    })
}

#[cfg(feature = "parallel")]
fn per_vertex(g: &WeightedGraph, n: Dimension) -> Result<Vec<VertexCurvature>> {
    use rayon::prelude::*;
    (0..g.num_vertices())
        .into_par_iter()
        .map(|x| curvature_at(g, x, n))
        .collect()
}

#[cfg(not(feature = "parallel"))]
fn per_vertex(g: &WeightedGraph, n: Dimension) -> Result<Vec<VertexCurvature>> {
    (0..g.num_vertices())
        .map(|x| curvature_at(g, x, n))
        .collect()
}

#[derive(Debug, Clone, Serialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum CdOutcome {
    Pass,
    Violation {
        vertex: usize,
        witness: VertexFunction,
        /// Negative: `Γ₂(f)(x) − (Δf)²(x)/n − K Γ(f)(x)` at the witness.
        slack: f64,
    },
}

impl CdOutcome {
    pub fn passed(&self) -> bool {
        matches!(self, CdOutcome::Pass)
    }
}

/// Decides `CD(n, K)`; on failure returns the worst vertex with an explicit
/// violating function.
pub fn cd_check(g: &WeightedGraph, n: Dimension, k: f64) -> Result<CdOutcome> {
    let result = curvature_function(g, n)?;
    let worst = &result.vertices[result.argmin];
    if k <= worst.k + CD_TOL {
        return Ok(CdOutcome::Pass);
    }
    let slack = cd_slack(g, &worst.witness, worst.vertex, n, k);
    Ok(CdOutcome::Violation {
        vertex: worst.vertex,
        witness: worst.witness.clone(),
        slack,
    })
}

/// Independent estimate of `K(x, n)`: the quadratic forms are probed through
/// the global `Γ₂`, `Γ`, `Δ` operators on basis functions of the punctured
/// 2-ball, and the ratio `(Γ₂ − (Δf)²/n) / Γ` is minimized by nonlinear
/// conjugate gradients with exact line search from `trials` random starts.
pub fn curvature_bruteforce(
    g: &WeightedGraph,
    x: usize,
    n: Dimension,
    trials: usize,
    seed: u64,
) -> Result<f64> {
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be >= 1".into()));
    }
    let probe = ProbedForms::new(g, x, n)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (x as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    let dim = probe.coords.len();
    let mut best = f64::INFINITY;
    for _ in 0..trials {
        let start = loop {
            let f = DVector::from_fn(dim, |_, _| rng.gen_range(-1.0..1.0));
            if probe.denominator(&f) > 1e-6 {
                break f;
            }
        };
        best = best.min(probe.minimize(start));
    }
    Ok(best)
}

/// Runs the oracle's descent from a single global starting function
/// (restricted to `B₂(x) \ {x}`).
pub fn curvature_bruteforce_from(
    g: &WeightedGraph,
    x: usize,
    n: Dimension,
    start: &[f64],
) -> Result<f64> {
    let probe = ProbedForms::new(g, x, n)?;
    let f = DVector::from_iterator(probe.coords.len(), probe.coords.iter().map(|&c| start[c]));
    if probe.denominator(&f) <= 0.0 {
        return Err(Error::ZeroFunction);
    }
    Ok(probe.minimize(f))
}

struct ProbedForms {
    coords: Vec<usize>,
    numerator: DMatrix<f64>,
    denominator: DMatrix<f64>,
}

impl ProbedForms {
    fn new(g: &WeightedGraph, x: usize, n: Dimension) -> Result<Self> {
        g.check_vertex(x)?;
        let dist = hop_distances(g, x);
        let coords: Vec<usize> = (0..g.num_vertices())
            .filter(|&v| matches!(dist[v], Some(1) | Some(2)))
            .collect();
        let nv = g.num_vertices();
        let basis: Vec<Vec<f64>> = coords
            .iter()
            .map(|&c| {
                let mut e = vec![0.0; nv];
                e[c] = 1.0;
                e
            })
            .collect();
        let lap_x: Vec<f64> = basis.iter().map(|e| laplacian_apply(g, e)[x]).collect();
        let k = coords.len();
        let mut numerator = DMatrix::zeros(k, k);
        let mut denominator = DMatrix::zeros(k, k);
        for i in 0..k {
            for j in i..k {
                let g2 = gamma2_bilinear(g, &basis[i], &basis[j])[x];
                let g1 = gamma(g, &basis[i], &basis[j])[x];
                let v = g2 - n.inverse() * lap_x[i] * lap_x[j];
                numerator[(i, j)] = v;
                numerator[(j, i)] = v;
                denominator[(i, j)] = g1;
                denominator[(j, i)] = g1;
            }
        }
        Ok(ProbedForms {
            coords,
            numerator,
            denominator,
        })
    }

    fn denominator(&self, f: &DVector<f64>) -> f64 {
        f.dot(&(&self.denominator * f))
    }

    fn ratio(&self, f: &DVector<f64>) -> f64 {
        f.dot(&(&self.numerator * f)) / self.denominator(f)
    }

    fn gradient(&self, f: &DVector<f64>) -> DVector<f64> {
        let den = self.denominator(f);
        let r = self.ratio(f);
        (&self.numerator * f - &self.denominator * f * r) * (2.0 / den)
    }

    /// Exact minimizer of the ratio along `f + α d`.
    fn line_search(&self, f: &DVector<f64>, d: &DVector<f64>) -> Option<f64> {
        let (af, bf) = (&self.numerator * f, &self.denominator * f);
        let (ad, bd) = (&self.numerator * d, &self.denominator * d);
        let (a, b, c) = (f.dot(&af), f.dot(&ad), d.dot(&ad));
        let (p, q, s) = (f.dot(&bf), f.dot(&bd), d.dot(&bd));
        // stationarity: (bp − aq) + (cp − as) α + (cq − bs) α² = 0
        let (c0, c1, c2) = (b * p - a * q, c * p - a * s, c * q - b * s);
        let mut roots = Vec::new();
        if c2.abs() > 1e-300 {
            let disc = c1 * c1 - 4.0 * c2 * c0;
            if disc >= 0.0 {
                let sq = disc.sqrt();
                // numerically stable pair
                let t = -0.5 * (c1 + c1.signum() * sq);
                if t != 0.0 {
                    roots.push(t / c2);
                    roots.push(c0 / t);
                } else {
                    roots.push(-c1 / (2.0 * c2));
                }
            }
        } else if c1.abs() > 1e-300 {
            roots.push(-c0 / c1);
        }
        let value = |alpha: f64| {
            let den = p + 2.0 * q * alpha + s * alpha * alpha;
            if den <= 1e-14 * p {
                f64::INFINITY
            } else {
                (a + 2.0 * b * alpha + c * alpha * alpha) / den
            }
        };
        roots
            .into_iter()
            .filter(|r| r.is_finite())
            .map(|r| (r, value(r)))
            .filter(|(_, v)| v.is_finite())
            .min_by(|x, y| x.1.total_cmp(&y.1))
            .map(|(r, _)| r)
    }

    fn minimize(&self, mut f: DVector<f64>) -> f64 {
        let dim = f.len();
        let normalize = |f: &mut DVector<f64>, this: &Self| {
            let den = this.denominator(f);
            *f /= den.sqrt();
        };
        normalize(&mut f, self);
        let mut value = self.ratio(&f);
        let mut grad = self.gradient(&f);
        let mut dir = -&grad;
        let mut stall = 0;
        for iter in 0..20_000 {
            let gnorm = grad.norm();
            if gnorm <= 1e-14 * (1.0 + value.abs()) {
                break;
            }
            let alpha = match self.line_search(&f, &dir) {
                Some(a) => a,
                None => {
                    dir = -&grad;
                    match self.line_search(&f, &dir) {
                        Some(a) => a,
                        None => break,
                    }
                }
            };
            let mut next = &f + &dir * alpha;
            normalize(&mut next, self);
            let next_value = self.ratio(&next);
            if next_value >= value - 1e-16 * (1.0 + value.abs()) {
                stall += 1;
                if stall > 3 {
                    break;
                }
                dir = -&grad;
                continue;
            }
            stall = 0;
            let next_grad = self.gradient(&next);
            // Polak–Ribière with restarts
            let beta = if (iter + 1) % (dim.max(1) + 1) == 0 {
                0.0
            } else {
                (next_grad.dot(&(&next_grad - &grad)) / grad.dot(&grad)).max(0.0)
            };
            dir = -&next_grad + &dir * beta;
            if dir.dot(&next_grad) >= 0.0 {
                dir = -&next_grad;
            }
            f = next;
            value = next_value;
            grad = next_grad;
        }
        value
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::{generate, Family};
    use crate::graph::MeasurePolicy;

    fn two_vertex() -> WeightedGraph {
        generate(Family::Path { n: 2 }, MeasurePolicy::Normalized).unwrap()
    }

    #[test]
    fn dimension_parsing() {
        assert_eq!("inf".parse::<Dimension>().unwrap(), Dimension::INFINITE);
        assert_eq!("2".parse::<Dimension>().unwrap().value(), 2.0);
        assert!("0".parse::<Dimension>().is_err());
        assert!("-1".parse::<Dimension>().is_err());
        assert_eq!(Dimension::INFINITE.inverse(), 0.0);
        assert_eq!(
            serde_json::to_string(&Dimension::INFINITE).unwrap(),
            "\"inf\""
        );
    }

    #[test]
    fn two_vertex_closed_form() {
        let g = two_vertex();
        let inf = curvature_at(&g, 0, Dimension::INFINITE).unwrap();
        assert!((inf.k - 2.0).abs() < 1e-12);
        let two = curvature_at(&g, 0, Dimension::new(2.0).unwrap()).unwrap();
        assert!((two.k - 1.0).abs() < 1e-12);
        assert!((gamma(&g, &inf.witness, &inf.witness)[0] - 1.0).abs() < 1e-12);
        assert!(inf.witness_slack.abs() < WITNESS_TOL);
    }

    #[test]
    fn cd_check_two_vertex() {
        let g = two_vertex();
        assert!(cd_check(&g, Dimension::INFINITE, 2.0).unwrap().passed());
        assert!(cd_check(&g, Dimension::INFINITE, -1e6).unwrap().passed());
        match cd_check(&g, Dimension::INFINITE, 2.0 + 1e-3).unwrap() {
            CdOutcome::Violation { slack, .. } => {
                assert!(slack < 0.0 && (slack + 1e-3).abs() < 1e-10)
            }
            CdOutcome::Pass => panic!("expected a violation"),
        }
    }

    #[test]
    fn hypercube_is_vertex_transitive() {
        let g = generate(Family::Hypercube { d: 3 }, MeasurePolicy::Normalized).unwrap();
        let res = curvature_function(&g, Dimension::INFINITE).unwrap();
        for v in &res.vertices {
            assert!((v.k - res.global_k).abs() < 1e-12);
        }
        assert!((res.global_k - 2.0 / 3.0).abs() < 1e-10);
    }

    #[test]
    fn witness_is_a_fixed_point_of_the_oracle() {
        let g = generate(
            Family::Random {
                n: 8,
                p: 0.4,
                seed: 2,
            },
            MeasurePolicy::Combinatorial,
        )
        .unwrap();
        for x in 0..8 {
            let vc = curvature_at(&g, x, Dimension::INFINITE).unwrap();
            let from = curvature_bruteforce_from(&g, x, Dimension::INFINITE, &vc.witness).unwrap();
            assert!((from - vc.k).abs() < 1e-10, "x={x}: {from} vs {}", vc.k);
        }
    }

    #[test]
    fn dimension_monotone() {
        let g = generate(
            Family::Random {
                n: 9,
                p: 0.3,
                seed: 5,
            },
            MeasurePolicy::Normalized,
        )
        .unwrap();
        for x in 0..9 {
            let mut prev = f64::NEG_INFINITY;
            for n in [0.5, 1.0, 2.0, 4.0, 10.0, f64::INFINITY] {
                let k = curvature_at(&g, x, Dimension::new(n).unwrap()).unwrap().k;
                assert!(k >= prev - 1e-10);
                prev = k;
            }
        }
    }
}
