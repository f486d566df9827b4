//! The heat semigroup `P_t = e^{tΔ}` and the inequality checks built on it.
//!
//! `heat_apply` is the general entry point (dense Padé or Krylov action).
//! The checks go through [`HeatKernel`], an eigendecomposition of the
//! symmetrized generator with the constant mode split off exactly. That keeps
//! `P_tf − f_V` accurate to relative precision even when it has decayed far
//! below the size of `f`, which matters for identities that hold with
//! equality, such as the reverse Poincaré inequality on the two-vertex graph.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::curvature::Dimension;
use crate::error::{Error, Result};
use crate::graph::{volume, VertexSubset, WeightedGraph};
use crate::linalg::{expm, expm_action_lanczos, sym_eigen_sorted, SparseSym};
use crate::operators::{
    gamma, inner, laplacian_apply, norm_p, symmetric_generator, VertexFunction,
};
use crate::report::{json_f64, CheckReport, Relation, DEFAULT_TOL};
use crate::spectral::DENSE_LIMIT;

pub const KRYLOV_TOL: f64 = 1e-10;
pub const KRYLOV_MAX_DIM: usize = 40;
/// Below this `|K|` the curvature coefficients use their `K → 0` limits.
pub const FLAT_K: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HeatMethod {
    DenseExpm,
    KrylovAction,
}

#[derive(Debug, Clone)]
pub struct HeatOptions {
    pub method: HeatMethod,
    pub t: f64,
    pub dirichlet: Option<VertexSubset>,
}

impl HeatOptions {
    pub fn new(t: f64) -> Self {
        HeatOptions {
            method: HeatMethod::DenseExpm,
            t,
            dirichlet: None,
        }
    }

    pub fn method(mut self, method: HeatMethod) -> Self {
        self.method = method;
        self
    }

    pub fn dirichlet(mut self, omega: VertexSubset) -> Self {
        self.dirichlet = Some(omega);
        self
    }

    /// Dense below the dense-solver limit, Krylov above it.
    pub fn auto(g: &WeightedGraph, t: f64) -> Self {
        let method = if g.num_vertices() <= DENSE_LIMIT {
            HeatMethod::DenseExpm
        } else {
            HeatMethod::KrylovAction
        };
        HeatOptions::new(t).method(method)
    }
}

fn check_time(t: f64) -> Result<()> {
    if !(t.is_finite() && t >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "time must be finite and nonnegative, got {t}"
        )));
    }
    Ok(())
}

fn check_len(g: &WeightedGraph, f: &[f64]) -> Result<()> {
    if f.len() != g.num_vertices() {
        return Err(Error::InvalidParameter(format!(
            "function has {} values but the graph has {} vertices",
            f.len(),
            g.num_vertices()
        )));
    }
    Ok(())
}

/// `P_t f`, or `P^Ω_t f` (zero outside Ω, `f` restricted to Ω) with a
/// Dirichlet subset.
pub fn heat_apply(g: &WeightedGraph, f: &[f64], opts: &HeatOptions) -> Result<VertexFunction> {
    check_len(g, f)?;
    check_time(opts.t)?;
    let members: Vec<usize> = match &opts.dirichlet {
        Some(o) => {
            o.check_host(g)?;
            o.members().to_vec()
        }
        None => (0..g.num_vertices()).collect(),
    };
    if opts.t == 0.0 && opts.dirichlet.is_none() {
        return Ok(VertexFunction(f.to_vec()));
    }
    let mut out = VertexFunction::zeros(g.num_vertices());
    if members.is_empty() {
        return Ok(out);
    }
    let v = DVector::from_iterator(members.len(), members.iter().map(|&x| g.m(x).sqrt() * f[x]));
    let w = match opts.method {
        HeatMethod::DenseExpm => {
            let s = symmetric_generator(g, opts.dirichlet.as_ref())?;
            expm(&(s * opts.t)) * v
        }
        HeatMethod::KrylovAction => {
            let s = SparseSym::generator(g, opts.dirichlet.as_ref())?;
            expm_action_lanczos(&s, &v, opts.t, KRYLOV_TOL, KRYLOV_MAX_DIM)?
        }
    };
    for (i, &x) in members.iter().enumerate() {
        out[x] = w[i] / g.m(x).sqrt();
    }
    Ok(out)
}

/// Spectral representation of `P_t` on the whole graph or on a Dirichlet
/// subset, reusable across many functions and times.
#[derive(Debug, Clone)]
pub struct HeatKernel {
    n: usize,
    members: Vec<usize>,
    sqrt_m: Vec<f64>,
    /// Eigenvalues of `−Δ` (ascending) on the non-constant modes.
    values: DVector<f64>,
    /// Matching orthonormal eigenvectors in symmetric coordinates.
    vectors: DMatrix<f64>,
    whole: bool,
    total_mass: f64,
}

impl HeatKernel {
    pub fn new(g: &WeightedGraph, dirichlet: Option<&VertexSubset>) -> Result<Self> {
        let n = g.num_vertices();
        let members: Vec<usize> = match dirichlet {
            Some(o) => {
                o.check_host(g)?;
                if o.is_empty() {
                    return Err(Error::EmptySubset);
                }
                o.members().to_vec()
            }
            None => (0..n).collect(),
        };
        if members.len() > DENSE_LIMIT {
            return Err(Error::InvalidParameter(format!(
                "heat kernel is dense; {} vertices exceeds {DENSE_LIMIT}",
                members.len()
            )));
        }
        let sqrt_m: Vec<f64> = members.iter().map(|&x| g.m(x).sqrt()).collect();
        let b = -symmetric_generator(g, dirichlet)?;
        let whole = dirichlet.is_none_or(|o| o.is_full());
        let (values, vectors) = if whole && n > 1 {
            let k = members.len();
            let mut u0 = DVector::from_column_slice(&sqrt_m);
            u0 /= u0.norm();
            let mut h = u0;
            h[0] += 1.0;
            let hh = h.dot(&h);
            let reflector = DMatrix::<f64>::identity(k, k) - &h * h.transpose() * (2.0 / hh);
            let z = reflector.columns(1, k - 1).into_owned();
            let reduced = z.transpose() * &b * &z;
            let (vals, q) = sym_eigen_sorted((&reduced + reduced.transpose()) * 0.5);
            (vals, z * q)
        } else if whole {
            (DVector::zeros(0), DMatrix::zeros(1, 0))
        } else {
            sym_eigen_sorted(b)
        };
        let total_mass = g.measure().iter().sum();
        Ok(HeatKernel {
            n,
            members,
            sqrt_m,
            values,
            vectors,
            whole,
            total_mass,
        })
    }

    /// Smallest nonzero (whole graph) or smallest Dirichlet eigenvalue.
    pub fn bottom(&self) -> Option<f64> {
        self.values.iter().next().copied()
    }

    /// The m-average `f_V = Σ m f / Σ m` that `P_t f` tends to
    /// (0 for a Dirichlet kernel).
    pub fn mean(&self, f: &[f64]) -> f64 {
        if !self.whole {
            return 0.0;
        }
        self.members
            .iter()
            .zip(&self.sqrt_m)
            .map(|(&x, s)| s * s * f[x])
            .sum::<f64>()
            / self.total_mass
    }

    /// `P_t f − f_V`, computed mode by mode.
    pub fn fluctuation(&self, f: &[f64], t: f64) -> VertexFunction {
        let mean = self.mean(f);
        let v = DVector::from_iterator(
            self.members.len(),
            self.members
                .iter()
                .zip(&self.sqrt_m)
                .map(|(&x, s)| s * (f[x] - mean)),
        );
        let mut coeffs = self.vectors.transpose() * v;
        for (c, lam) in coeffs.iter_mut().zip(self.values.iter()) {
            *c *= (-t * lam.max(0.0)).exp();
        }
        let w = &self.vectors * coeffs;
        let mut out = VertexFunction::zeros(self.n);
        for (i, &x) in self.members.iter().enumerate() {
            out[x] = w[i] / self.sqrt_m[i];
        }
        out
    }

    pub fn apply(&self, f: &[f64], t: f64) -> VertexFunction {
        let mean = self.mean(f);
        let mut out = self.fluctuation(f, t);
        if self.whole {
            for v in out.iter_mut() {
                *v += mean;
            }
        }
        out
    }
}

/// Residuals of the exact semigroup identities, each normalized by the
/// natural size of its terms.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct IdentityReport {
    /// `‖ΔP_tf − P_tΔf‖_∞`
    pub commute: f64,
    /// `‖P_tP_sf − P_{t+s}f‖_∞`
    pub semigroup: f64,
    /// `|⟨P_tf, h⟩ − ⟨f, P_th⟩|`
    pub self_adjoint: f64,
    /// `‖f‖_p − ‖P_tf‖_p` for p = 1, 2, ∞ (nonnegative up to rounding).
    pub contraction: [f64; 3],
}

impl IdentityReport {
    pub fn max_residual(&self) -> f64 {
        let worst_contraction = self.contraction.iter().fold(0.0f64, |a, &c| a.max(-c));
        self.commute
            .max(self.semigroup)
            .max(self.self_adjoint)
            .max(worst_contraction)
    }
}

pub fn semigroup_identities(
    g: &WeightedGraph,
    f: &[f64],
    h: &[f64],
    t: f64,
    s: f64,
) -> Result<IdentityReport> {
    check_len(g, f)?;
    check_len(g, h)?;
    check_time(s)?;
    let heat = |u: &[f64], time: f64| heat_apply(g, u, &HeatOptions::auto(g, time));
    let ptf = heat(f, t)?;
    let lf = laplacian_apply(g, f);
    let op_norm = 2.0
        * (0..g.num_vertices())
            .map(|x| g.deg(x) / g.m(x))
            .fold(0.0, f64::max);
    let sup = |u: &[f64]| norm_p(g, u, f64::INFINITY);

    let commute = {
        let a = laplacian_apply(g, &ptf);
        let b = heat(&lf, t)?;
        sup(&a.zip_with(&b, |x, y| x - y)) / (op_norm * sup(f)).max(1.0)
    };
    let semigroup = {
        let a = heat(&heat(f, s)?, t)?;
        let b = heat(f, t + s)?;
        sup(&a.zip_with(&b, |x, y| x - y)) / sup(f).max(1.0)
    };
    let self_adjoint = {
        let pth = heat(h, t)?;
        (inner(g, &ptf, h) - inner(g, f, &pth)).abs()
            / (norm_p(g, f, 2.0) * norm_p(g, h, 2.0)).max(1.0)
    };
    let mut contraction = [0.0; 3];
    for (slot, p) in contraction.iter_mut().zip([1.0, 2.0, f64::INFINITY]) {
        let nf = norm_p(g, f, p);
        *slot = (nf - norm_p(g, &ptf, p)) / nf.max(1.0);
    }
    Ok(IdentityReport {
        commute,
        semigroup,
        self_adjoint,
        contraction,
    })
}

/// `Σ m P_tf − Σ m f`; with a Dirichlet subset the initial mass is that of
/// `f` restricted to it, and the residual is negative (mass leaks out).
pub fn mass_conservation_residual(
    g: &WeightedGraph,
    f: &[f64],
    t: f64,
    dirichlet: Option<&VertexSubset>,
) -> Result<f64> {
    let mut opts = HeatOptions::auto(g, t);
    opts.dirichlet = dirichlet.cloned();
    let ptf = heat_apply(g, f, &opts)?;
    let initial: f64 = match dirichlet {
        Some(o) => o.members().iter().map(|&x| g.m(x) * f[x]).sum(),
        None => (0..g.num_vertices()).map(|x| g.m(x) * f[x]).sum(),
    };
    let after: f64 = (0..g.num_vertices()).map(|x| g.m(x) * ptf[x]).sum();
    Ok(after - initial)
}

/// `(1 − e^{−2Kt}) / K`, tending to `2t` as `K → 0`.
pub fn decay_coefficient(k: f64, t: f64) -> f64 {
    if k.abs() < FLAT_K {
        2.0 * t
    } else {
        -(-2.0 * k * t).exp_m1() / k
    }
}

/// `∫₀ᵗ 2e^{2Ks} ds = (e^{2Kt} − 1) / K`, tending to `2t`.
pub fn growth_integral(k: f64, t: f64) -> f64 {
    if k.abs() < FLAT_K {
        2.0 * t
    } else {
        (2.0 * k * t).exp_m1() / k
    }
}

/// `∫₀ᵗ 2(e^{2Ks} − 1)/K ds = (e^{2Kt} − 1 − 2Kt) / K²`, tending to `2t²`.
pub fn growth_excess_integral(k: f64, t: f64) -> f64 {
    if k.abs() < FLAT_K {
        return 2.0 * t * t;
    }
    let x = 2.0 * k * t;
    let excess = if x.abs() < 1e-3 {
        // x²/2 + x³/6 + ... without cancellation
        let mut term = x * x / 2.0;
        let mut sum = term;
        for j in 3..10 {
            term *= x / j as f64;
            sum += term;
        }
        sum
    } else {
        x.exp_m1() - x
    };
    excess / (k * k)
}

fn argmin(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, v) in values.iter().enumerate() {
        if *v < values[best] {
            best = i;
        }
    }
    best
}

fn pointwise_report(
    check: &str,
    g: &WeightedGraph,
    relation: Relation,
    lhs: &[f64],
    rhs: &[f64],
    anchor: &str,
) -> CheckReport {
    let slack: Vec<f64> = lhs
        .iter()
        .zip(rhs)
        .map(|(l, r)| match relation {
            Relation::AtMost => r - l,
            Relation::AtLeast => l - r,
        })
        .collect();
    let x = argmin(&slack);
    CheckReport::new(check, g, relation, lhs[x], rhs[x], DEFAULT_TOL, anchor)
        .with_extra("vertex", g.label(x))
}

/// `Γ(P_tf) ≤ e^{−2Kt} P_tΓ(f) − (1 − e^{−2Kt})/(Kn) (ΔP_tf)²` at every vertex.
pub fn gradient_bound_check(
    g: &WeightedGraph,
    f: &[f64],
    t: f64,
    n: Dimension,
    k: f64,
) -> Result<CheckReport> {
    gradient_bound_check_with(&HeatKernel::new(g, None)?, g, f, t, n, k)
}

pub fn gradient_bound_check_with(
    kernel: &HeatKernel,
    g: &WeightedGraph,
    f: &[f64],
    t: f64,
    n: Dimension,
    k: f64,
) -> Result<CheckReport> {
    check_len(g, f)?;
    check_time(t)?;
    let fluct = kernel.fluctuation(f, t);
    let lhs = gamma(g, &fluct, &fluct);
    let pt_gamma = kernel.apply(&gamma(g, f, f), t);
    let lap = laplacian_apply(g, &fluct);
    let coef = decay_coefficient(k, t) * n.inverse();
    let decay = (-2.0 * k * t).exp();
    let rhs: Vec<f64> = (0..g.num_vertices())
        .map(|x| decay * pt_gamma[x] - coef * lap[x] * lap[x])
        .collect();
    Ok(pointwise_report(
        "gradient_bound",
        g,
        Relation::AtMost,
        &lhs,
        &rhs,
        "Γ(P_t f) ≤ e^{-2Kt} P_t(Γ(f)) - (1-e^{-2Kt})/(Kn) (ΔP_t f)^2",
    )
    .param("t", t)
    .param("n", n.to_string())
    .param("K", json_f64(k)))
}

/// `P_t(f²) − (P_tf)² ≥ ∫₀ᵗ2e^{2Ks}ds Γ(P_tf) + ∫₀ᵗ2(e^{2Ks}−1)/(Kn)ds (ΔP_tf)²`.
pub fn reverse_poincare_check(
    g: &WeightedGraph,
    f: &[f64],
    t: f64,
    n: Dimension,
    k: f64,
) -> Result<CheckReport> {
    reverse_poincare_check_with(&HeatKernel::new(g, None)?, g, f, t, n, k)
}

pub fn reverse_poincare_check_with(
    kernel: &HeatKernel,
    g: &WeightedGraph,
    f: &[f64],
    t: f64,
    n: Dimension,
    k: f64,
) -> Result<CheckReport> {
    check_len(g, f)?;
    check_time(t)?;
    // the variance is unchanged by subtracting the mean, which keeps both
    // sides free of cancellation
    let mean = kernel.mean(f);
    let centered: Vec<f64> = f.iter().map(|v| v - mean).collect();
    let squares: Vec<f64> = centered.iter().map(|v| v * v).collect();
    let fluct = kernel.fluctuation(f, t);
    let pt_sq = kernel.apply(&squares, t);
    let lhs: Vec<f64> = (0..g.num_vertices())
        .map(|x| pt_sq[x] - fluct[x] * fluct[x])
        .collect();
    let grad = gamma(g, &fluct, &fluct);
    let lap = laplacian_apply(g, &fluct);
    let c1 = growth_integral(k, t);
    let c2 = growth_excess_integral(k, t) * n.inverse();
    let rhs: Vec<f64> = (0..g.num_vertices())
        .map(|x| c1 * grad[x] + c2 * lap[x] * lap[x])
        .collect();
    Ok(pointwise_report(
        "reverse_poincare",
        g,
        Relation::AtLeast,
        &lhs,
        &rhs,
        "P_t(f^2) - (P_t f)^2 ≥ 2∫_0^t e^{2Ks} ds Γ(P_t f) + 2∫_0^t (e^{2Ks}-1)/(Kn) ds (ΔP_t f)^2",
    )
    .param("t", t)
    .param("n", n.to_string())
    .param("K", json_f64(k)))
}

/// `Σ m √Γ(f)`
pub fn sqrt_gamma_l1(g: &WeightedGraph, f: &[f64]) -> f64 {
    let gf = gamma(g, f, f);
    (0..g.num_vertices()).map(|x| g.m(x) * gf[x].sqrt()).sum()
}

fn smoothing_l1(kernel: &HeatKernel, g: &WeightedGraph, f: &[f64], t: f64) -> f64 {
    let mean = kernel.mean(f);
    let fluct = kernel.fluctuation(f, t);
    (0..g.num_vertices())
        .map(|x| g.m(x) * (f[x] - mean - fluct[x]).abs())
        .sum()
}

/// `‖f − P_tf‖₁ ≤ 4√t ‖√Γ(f)‖₁`, for `t ≤ 1/(2|K|)` when `K < 0`.
pub fn pseudo_poincare_check(g: &WeightedGraph, f: &[f64], t: f64, k: f64) -> Result<CheckReport> {
    pseudo_poincare_check_with(&HeatKernel::new(g, None)?, g, f, t, k)
}

pub fn pseudo_poincare_check_with(
    kernel: &HeatKernel,
    g: &WeightedGraph,
    f: &[f64],
    t: f64,
    k: f64,
) -> Result<CheckReport> {
    check_len(g, f)?;
    check_time(t)?;
    if k < 0.0 && t > 1.0 / (2.0 * k.abs()) {
        return Err(Error::Domain(format!(
            "t = {t} exceeds 1/(2|K|) = {} for K = {k}",
            1.0 / (2.0 * k.abs())
        )));
    }
    let lhs = smoothing_l1(kernel, g, f, t);
    let rhs = 4.0 * t.sqrt() * sqrt_gamma_l1(g, f);
    Ok(CheckReport::new(
        "pseudo_poincare",
        g,
        Relation::AtMost,
        lhs,
        rhs,
        DEFAULT_TOL,
        "‖f - P_t f‖_1 ≤ 4√t ‖√Γ(f)‖_1",
    )
    .param("t", t)
    .param("K", json_f64(k)))
}

/// `(2/√K)(π − 2 arcsin e^{−Kt})`, written as `(8/√K) arcsin √((1 − e^{−Kt})/2)`
/// to stay accurate for small `Kt`.
pub fn remark_factor(k: f64, t: f64) -> f64 {
    8.0 / k.sqrt() * (-(-k * t).exp_m1() / 2.0).sqrt().asin()
}

/// `‖f − P_tf‖₁ ≤ (2/√K)(π − 2 arcsin e^{−Kt}) ‖√Γ(f)‖₁` for `K > 0`.
/// The variant with `‖Γ(f)‖₁` in place of `‖√Γ(f)‖₁` is reported alongside.
pub fn remark_bound_check(g: &WeightedGraph, f: &[f64], t: f64, k: f64) -> Result<CheckReport> {
    remark_bound_check_with(&HeatKernel::new(g, None)?, g, f, t, k)
}

pub fn remark_bound_check_with(
    kernel: &HeatKernel,
    g: &WeightedGraph,
    f: &[f64],
    t: f64,
    k: f64,
) -> Result<CheckReport> {
    check_len(g, f)?;
    check_time(t)?;
    if k <= 0.0 {
        return Err(Error::NonpositiveCurvature(k));
    }
    let factor = remark_factor(k, t);
    let lhs = smoothing_l1(kernel, g, f, t);
    let rhs = factor * sqrt_gamma_l1(g, f);
    let gf = gamma(g, f, f);
    let literal_rhs = factor * (0..g.num_vertices()).map(|x| g.m(x) * gf[x]).sum::<f64>();
    Ok(CheckReport::new(
        "remark_bound",
        g,
        Relation::AtMost,
        lhs,
        rhs,
        DEFAULT_TOL,
        "‖f - P_t f‖_1 ≤ (2/√K)(π - 2 arcsin e^{-Kt}) ‖√Γ(f)‖_1",
    )
    .param("t", t)
    .param("K", k)
    .with_extra("factor", factor)
    .with_extra("literal_gamma_rhs", literal_rhs)
    .with_extra("literal_gamma_margin", literal_rhs - lhs))
}

/// `‖1_U − P_t1_U‖₁ ≥ 2(1 − e^{−λt})|U|` for a given `λ`.
pub fn indicator_lower_bound_check(
    g: &WeightedGraph,
    u: &VertexSubset,
    t: f64,
    lambda: f64,
) -> Result<CheckReport> {
    indicator_lower_bound_check_with(&HeatKernel::new(g, None)?, g, u, t, lambda)
}

pub fn indicator_lower_bound_check_with(
    kernel: &HeatKernel,
    g: &WeightedGraph,
    u: &VertexSubset,
    t: f64,
    lambda: f64,
) -> Result<CheckReport> {
    u.check_host(g)?;
    check_time(t)?;
    if u.is_empty() {
        return Err(Error::EmptySubset);
    }
    let indicator = VertexFunction::indicator(u);
    let lhs = smoothing_l1(kernel, g, &indicator, t);
    let rhs = -2.0 * (-lambda * t).exp_m1() * volume(g, u);
    Ok(CheckReport::new(
        "indicator_lower_bound",
        g,
        Relation::AtLeast,
        lhs,
        rhs,
        DEFAULT_TOL,
        "‖1_U - P_t 1_U‖_1 ≥ 2(1-e^{-λt})|U|",
    )
    .param("t", t)
    .param("lambda", lambda)
    .param("subset", u.labels(g)))
}

#[derive(Debug, Clone, Serialize)]
pub struct ConvergenceReport {
    /// `f_V = (1/|V|) Σ m f` with `|V| = Σ m`.
    pub mean: f64,
    pub times: Vec<f64>,
    /// `sup_x |P_tf(x) − f_V|`
    pub deviation: Vec<f64>,
    /// `‖Γ(P_tf)‖_∞`
    pub gamma_sup: Vec<f64>,
    /// `e^{−2Kt} ‖Γ(f)‖_∞`, an upper bound for `gamma_sup` when `K > 0`.
    pub envelope: Option<Vec<f64>>,
    /// Deviation is non-increasing along the (sorted) times.
    pub monotone: bool,
    pub envelope_holds: Option<bool>,
}

pub fn convergence_to_average(
    g: &WeightedGraph,
    f: &[f64],
    times: &[f64],
    k: Option<f64>,
) -> Result<ConvergenceReport> {
    check_len(g, f)?;
    for &t in times {
        check_time(t)?;
    }
    let kernel = HeatKernel::new(g, None)?;
    let mean = kernel.mean(f);
    let mut deviation = Vec::with_capacity(times.len());
    let mut gamma_sup = Vec::with_capacity(times.len());
    for &t in times {
        let fluct = kernel.fluctuation(f, t);
        deviation.push(fluct.max_abs());
        gamma_sup.push(gamma(g, &fluct, &fluct).max_abs());
    }
    let mut order: Vec<usize> = (0..times.len()).collect();
    order.sort_by(|&a, &b| times[a].total_cmp(&times[b]));
    let monotone = order
        .windows(2)
        .all(|w| deviation[w[1]] <= deviation[w[0]] * (1.0 + 1e-12) + 1e-15);
    let (envelope, envelope_holds) = match k {
        Some(k) if k > 0.0 => {
            let g0 = gamma(g, f, f).max_abs();
            let env: Vec<f64> = times.iter().map(|t| (-2.0 * k * t).exp() * g0).collect();
            let holds = env
                .iter()
                .zip(&gamma_sup)
                .all(|(e, s)| *s <= e + DEFAULT_TOL);
            (Some(env), Some(holds))
        }
        _ => (None, None),
    };
    Ok(ConvergenceReport {
        mean,
        times: times.to_vec(),
        deviation,
        gamma_sup,
        envelope,
        monotone,
        envelope_holds,
    })
}
