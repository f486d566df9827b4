//! The theorem-level checks that combine curvature, spectrum, isoperimetry
//! and the heat semigroup, plus nested-truncation (exhaustion) runs.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::curvature::{curvature_at, curvature_function, Dimension};
use crate::error::{Error, Result};
use crate::generate::{center_vertex, generate, Family};
use crate::graph::{ball, d_omega, hop_distances, MeasurePolicy, VertexSubset, WeightedGraph};
use crate::isoperimetry::{
    boundary_volume, cheeger_finite_exact, cheeger_subset, cheeger_sweep, Method, ENUMERATION_CAP,
};
use crate::operators::VertexFunction;
use crate::report::{json_f64, CheckReport, Relation, DEFAULT_TOL};
use crate::semigroup::sqrt_gamma_l1;
use crate::spectral::{lambda1_finite, lambda_bottom_dirichlet};

/// Curvatures this close to zero count as flat.
pub const FLAT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BuserConstants {
    pub d_omega: f64,
    /// `4√(2D_ω)`
    pub c: f64,
    /// `C² / (1 − e^{−1})²`, from choosing `t = 1/λ`.
    pub c1: f64,
    /// `2√2·C`, from choosing `t = 1/(2|K|)`.
    pub c2: f64,
}

impl BuserConstants {
    pub fn new(d_omega: f64) -> Self {
        let c = 4.0 * (2.0 * d_omega).sqrt();
        let e = 1.0 - (-1.0f64).exp();
        BuserConstants {
            d_omega,
            c,
            c1: c * c / (e * e),
            c2: 2.0 * 2f64.sqrt() * c,
        }
    }

    pub fn of(g: &WeightedGraph) -> Self {
        Self::new(d_omega(g))
    }

    /// `max{C₁h², C₂√|K| h}`
    pub fn bound(&self, h: f64, k: f64) -> f64 {
        (self.c1 * h * h).max(self.c2 * k.abs().sqrt() * h)
    }
}

fn clamp_flat(k: f64) -> f64 {
    if k.abs() < FLAT_TOL {
        0.0
    } else {
        k
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BuserMode {
    /// `λ₁` against the finite-graph Cheeger constant.
    Finite,
    /// Dirichlet `λ(Ω)` against `h(Ω)` on a proper subset.
    Truncation,
}

/// Buser-type upper bound on the bottom of the spectrum. `Ω = V` selects the
/// finite pairing, a proper `Ω` the truncation pairing.
pub fn buser_check(g: &WeightedGraph, omega: &VertexSubset, n: Dimension) -> Result<CheckReport> {
    let k = curvature_function(g, n)?.global_k;
    buser_check_with_curvature(g, omega, k)
}

pub fn buser_check_with_curvature(
    g: &WeightedGraph,
    omega: &VertexSubset,
    k: f64,
) -> Result<CheckReport> {
    omega.check_host(g)?;
    if omega.is_empty() {
        return Err(Error::EmptySubset);
    }
    let k = clamp_flat(k);
    let consts = BuserConstants::of(g);
    let (mode, lambda, iso) = if omega.is_full() {
        (
            BuserMode::Finite,
            lambda1_finite(g)?.eigenvalue,
            cheeger_finite_exact(g)?,
        )
    } else {
        (
            BuserMode::Truncation,
            lambda_bottom_dirichlet(g, omega)?.eigenvalue,
            cheeger_subset(g, omega)?,
        )
    };
    let h = iso.value;
    let rhs = consts.bound(h, k);
    Ok(CheckReport::new(
        "buser",
        g,
        Relation::AtMost,
        lambda,
        rhs,
        DEFAULT_TOL,
        "λ ≤ max{C_1 h^2, C_2 √|K| h}",
    )
    .param("mode", serde_json::to_value(mode).expect("enum serializes"))
    .param("omega_size", omega.len())
    .with_extra("K", k)
    .with_extra("h", h)
    .with_extra("h_subset", omega_labels(g, &iso.subset))
    .with_extra(
        "constants",
        serde_json::to_value(consts).expect("plain struct"),
    ))
}

fn omega_labels(g: &WeightedGraph, u: &VertexSubset) -> Vec<String> {
    u.labels(g).into_iter().map(str::to_string).collect()
}

/// `h ≥ √K / (2π√(2D_ω))` for `K > 0`; skipped otherwise.
pub fn cheeger_lower_bound_check(g: &WeightedGraph) -> Result<CheckReport> {
    let k = curvature_function(g, Dimension::INFINITE)?.global_k;
    cheeger_lower_bound_check_with_curvature(g, k)
}

pub fn cheeger_lower_bound_check_with_curvature(g: &WeightedGraph, k: f64) -> Result<CheckReport> {
    const ANCHOR: &str = "h ≥ √K / (2π √(2 D_ω))";
    let k = clamp_flat(k);
    if k <= 0.0 {
        return Ok(CheckReport::skipped(
            "cheeger_bound",
            g,
            &Error::NonpositiveCurvature(k).to_string(),
            ANCHOR,
        )
        .with_extra("K", json_f64(k)));
    }
    let iso = if g.num_vertices() <= ENUMERATION_CAP {
        cheeger_finite_exact(g)?
    } else {
        cheeger_sweep(g)?
    };
    let rhs = k.sqrt() / (2.0 * PI * (2.0 * d_omega(g)).sqrt());
    let method = iso.method;
    let mut report = CheckReport::new(
        "cheeger_bound",
        g,
        Relation::AtLeast,
        iso.value,
        rhs,
        DEFAULT_TOL,
        ANCHOR,
    )
    .with_extra("K", k)
    .with_extra("d_omega", d_omega(g))
    .with_extra(
        "method",
        serde_json::to_value(method).expect("enum serializes"),
    );
    if method == Method::Sweep {
        // the sweep only bounds h from above
        report = report.with_extra("indicative_only", true);
    }
    Ok(report)
}

/// `Σ m √Γ(1_U) ≤ √(2D_ω) |∂U|`.
pub fn edge_indicator_bound_check(g: &WeightedGraph, u: &VertexSubset) -> Result<CheckReport> {
    u.check_host(g)?;
    if u.is_empty() {
        return Err(Error::EmptySubset);
    }
    let lhs = sqrt_gamma_l1(g, &VertexFunction::indicator(u));
    let rhs = (2.0 * d_omega(g)).sqrt() * boundary_volume(g, u)?;
    Ok(CheckReport::new(
        "indicator_bound",
        g,
        Relation::AtMost,
        lhs,
        rhs,
        DEFAULT_TOL,
        "‖√Γ(1_U)‖_1 ≤ √(2 D_ω) |∂U|",
    )
    .param("subset", u.labels(g)))
}

/// A growing sequence of balls `Ω₁ ⊂ Ω₂ ⊂ …` about the centre of a
/// ball-shaped family, evaluated inside one host graph large enough that
/// every vertex of every `Ω_k` sees its full 2-ball.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExhaustionSpec {
    pub family: Family,
    pub radii: Vec<usize>,
    #[serde(default = "default_policy")]
    pub measure: String,
}

fn default_policy() -> String {
    "normalized".into()
}

#[derive(Debug, Clone, Serialize)]
pub struct ExhaustionStep {
    pub radius: usize,
    pub size: usize,
    pub lambda: f64,
    pub h: f64,
    /// Smallest CD(∞, ·) curvature over the vertices of `Ω_k`.
    pub interior_curvature: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ExhaustionReport {
    pub host: String,
    pub steps: Vec<ExhaustionStep>,
    pub lambda_monotone: bool,
    pub h_monotone: bool,
}

impl ExhaustionSpec {
    fn host_family(&self) -> Result<Family> {
        let outer = self
            .radii
            .iter()
            .copied()
            .max()
            .ok_or_else(|| Error::InvalidParameter("empty radius schedule".into()))?
            + 2;
        match self.family {
            Family::LatticeBall { d, .. } => Ok(Family::LatticeBall { d, r: outer }),
            Family::TreeBall { degree, .. } => Ok(Family::TreeBall { degree, r: outer }),
            other => Err(Error::InvalidParameter(format!(
                "{other} has no ball structure to exhaust"
            ))),
        }
    }

    pub fn run(&self) -> Result<ExhaustionReport> {
        if self.radii.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidParameter(
                "radii must be strictly increasing".into(),
            ));
        }
        let host = self.host_family()?;
        let g = generate(host, MeasurePolicy::parse(&self.measure)?)?;
        let center = center_vertex(host, &g)
            .ok_or_else(|| Error::InvalidParameter("family has no centre".into()))?;
        let hops = hop_distances(&g, center);
        let mut steps = Vec::with_capacity(self.radii.len());
        for &r in &self.radii {
            let omega = ball(&g, center, r)?;
            let lambda = lambda_bottom_dirichlet(&g, &omega)?.eigenvalue;
            let h = cheeger_subset(&g, &omega)?.value;
            let mut interior = f64::INFINITY;
            for &x in omega.members() {
                debug_assert!(hops[x].is_some_and(|d| d <= r));
                interior = interior.min(curvature_at(&g, x, Dimension::INFINITE)?.k);
            }
            steps.push(ExhaustionStep {
                radius: r,
                size: omega.len(),
                lambda,
                h,
                interior_curvature: interior,
            });
        }
        let mono =
            |f: fn(&ExhaustionStep) -> f64| steps.windows(2).all(|w| f(&w[1]) <= f(&w[0]) + 1e-12);
        let lambda_monotone = mono(|s| s.lambda);
        let h_monotone = mono(|s| s.h);
        Ok(ExhaustionReport {
            host: host.to_string(),
            steps,
            lambda_monotone,
            h_monotone,
        })
    }
}
