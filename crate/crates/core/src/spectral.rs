//! Bottom of the spectrum of `−Δ`: Dirichlet eigenvalues on vertex subsets,
//! the first nonzero eigenvalue of a finite graph, Rayleigh quotients.
//!
//! Everything is solved on the symmetric matrix `M^{1/2}(−Δ)M^{−1/2}`,
//! which is similar to `−Δ`; eigenvectors are mapped back with `M^{−1/2}`.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{VertexSubset, WeightedGraph};
use crate::linalg::{lanczos_smallest, sym_eigen_sorted, SparseSym};
use crate::operators::{inner, laplacian_apply, symmetric_generator, VertexFunction};

/// Largest problem solved densely when the solver is chosen automatically.
pub const DENSE_LIMIT: usize = 2000;
pub const LANCZOS_MAX_KRYLOV: usize = 200;
pub const LANCZOS_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Solver {
    Dense,
    Lanczos,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SolverChoice {
    #[default]
    Auto,
    Force(Solver),
}

impl SolverChoice {
    fn resolve(self, size: usize) -> Solver {
        match self {
            SolverChoice::Auto if size <= DENSE_LIMIT => Solver::Dense,
            SolverChoice::Auto => Solver::Lanczos,
            SolverChoice::Force(s) => s,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SpectralResult {
    pub eigenvalue: f64,
    /// Eigenfunction on the whole graph (zero outside the subset), with
    /// unit m-weighted norm.
    pub eigenvector: VertexFunction,
    pub solver: Solver,
    /// `‖(−Δ)v − λv‖` in the m-weighted norm.
    pub residual: f64,
}

/// Smallest eigenvalue of the Dirichlet operator `−Δ_Ω`.
pub fn lambda_bottom_dirichlet(g: &WeightedGraph, omega: &VertexSubset) -> Result<SpectralResult> {
    lambda_bottom_dirichlet_with(g, omega, SolverChoice::Auto)
}

pub fn lambda_bottom_dirichlet_with(
    g: &WeightedGraph,
    omega: &VertexSubset,
    choice: SolverChoice,
) -> Result<SpectralResult> {
    omega.check_host(g)?;
    if omega.is_empty() {
        return Err(Error::EmptySubset);
    }
    let solver = choice.resolve(omega.len());
    let (lambda, u, residual) = match solver {
        Solver::Dense => {
            let s = symmetric_generator(g, Some(omega))?;
            let (vals, vecs) = sym_eigen_sorted(-&s);
            let u = vecs.column(0).into_owned();
            let residual = (&s * &u + &u * vals[0]).norm();
            (vals[0], u, residual)
        }
        Solver::Lanczos => {
            let s = SparseSym::generator(g, Some(omega))?;
            lanczos_smallest(&s, None, LANCZOS_MAX_KRYLOV, LANCZOS_TOL)?
        }
    };
    Ok(SpectralResult {
        eigenvalue: lambda.max(0.0),
        eigenvector: lift(g, omega.members(), &u),
        solver,
        residual,
    })
}

/// Smallest eigenvalue of `−Δ` on functions m-orthogonal to constants.
pub fn lambda1_finite(g: &WeightedGraph) -> Result<SpectralResult> {
    lambda1_finite_with(g, SolverChoice::Auto)
}

pub fn lambda1_finite_with(g: &WeightedGraph, choice: SolverChoice) -> Result<SpectralResult> {
    let n = g.num_vertices();
    if n < 2 {
        return Err(Error::InvalidParameter("need at least two vertices".into()));
    }
    // constants map to √m in symmetric coordinates
    let mut u0 = DVector::from_iterator(n, g.measure().iter().map(|m| m.sqrt()));
    u0 /= u0.norm();
    let solver = choice.resolve(n);
    let all: Vec<usize> = (0..n).collect();
    let (lambda, u, residual) = match solver {
        Solver::Dense => {
            let b = -symmetric_generator(g, None)?;
            // Householder reflector with H u0 = −e₁; columns 1.. span u0^⊥
            let mut h = u0.clone();
            h[0] += 1.0;
            let hh = h.dot(&h);
            let reflector = DMatrix::<f64>::identity(n, n) - &h * h.transpose() * (2.0 / hh);
            let z = reflector.columns(1, n - 1).into_owned();
            let reduced = z.transpose() * &b * &z;
            let reduced = (&reduced + reduced.transpose()) * 0.5;
            let (vals, vecs) = sym_eigen_sorted(reduced);
            let mut u = &z * vecs.column(0);
            u /= u.norm();
            let residual = (&b * &u - &u * vals[0]).norm();
            (vals[0], u, residual)
        }
        Solver::Lanczos => {
            let s = SparseSym::generator(g, None)?;
            lanczos_smallest(&s, Some(&u0), LANCZOS_MAX_KRYLOV, LANCZOS_TOL)?
        }
    };
    Ok(SpectralResult {
        eigenvalue: lambda.max(0.0),
        eigenvector: lift(g, &all, &u),
        solver,
        residual,
    })
}

fn lift(g: &WeightedGraph, members: &[usize], u: &DVector<f64>) -> VertexFunction {
    let mut f = VertexFunction::zeros(g.num_vertices());
    for (i, &x) in members.iter().enumerate() {
        f[x] = u[i] / g.m(x).sqrt();
    }
    if let Some(lead) = f.iter().copied().find(|v| v.abs() > 1e-12) {
        if lead < 0.0 {
            for v in f.iter_mut() {
                *v = -*v;
            }
        }
    }
    f
}

/// `⟨f, −Δf⟩ / ⟨f, f⟩` in the m-weighted inner product.
pub fn rayleigh_quotient(g: &WeightedGraph, f: &[f64]) -> Result<f64> {
    let denom = inner(g, f, f);
    if denom == 0.0 {
        return Err(Error::ZeroFunction);
    }
    let lf = laplacian_apply(g, f);
    Ok(-inner(g, f, &lf) / denom)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::{generate, Family};
    use crate::graph::MeasurePolicy;

    #[test]
    fn two_vertex_and_complete_graphs() {
        let g = generate(Family::Path { n: 2 }, MeasurePolicy::Normalized).unwrap();
        let r = lambda1_finite(&g).unwrap();
        assert!((r.eigenvalue - 2.0).abs() < 1e-12);
        for n in 3..=5 {
            let g = generate(Family::Complete { n }, MeasurePolicy::Normalized).unwrap();
            let r = lambda1_finite(&g).unwrap();
            assert!((r.eigenvalue - n as f64 / (n as f64 - 1.0)).abs() < 1e-12);
            assert!(r.residual < 1e-10);
        }
    }

    #[test]
    fn single_vertex_dirichlet() {
        let g = generate(Family::Path { n: 3 }, MeasurePolicy::Combinatorial).unwrap();
        let omega = VertexSubset::new(&g, [1]).unwrap();
        let r = lambda_bottom_dirichlet(&g, &omega).unwrap();
        assert!((r.eigenvalue - 2.0).abs() < 1e-14);
        assert_eq!(r.eigenvector[0], 0.0);
        assert!(matches!(
            lambda_bottom_dirichlet(&g, &VertexSubset::new(&g, []).unwrap()),
            Err(Error::EmptySubset)
        ));
    }

    #[test]
    fn rayleigh_quotient_basics() {
        let g = generate(Family::Hypercube { d: 3 }, MeasurePolicy::Normalized).unwrap();
        assert_eq!(rayleigh_quotient(&g, &[1.0; 8]).unwrap(), 0.0);
        assert!(matches!(
            rayleigh_quotient(&g, &[0.0; 8]),
            Err(Error::ZeroFunction)
        ));
        let r = lambda1_finite(&g).unwrap();
        assert!((rayleigh_quotient(&g, &r.eigenvector).unwrap() - r.eigenvalue).abs() < 1e-10);
        assert!(inner(&g, &r.eigenvector, &[1.0; 8]).abs() < 1e-12);
        assert!((inner(&g, &r.eigenvector, &r.eigenvector) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn lanczos_agrees_with_dense_on_small_problems() {
        let g = generate(
            Family::LatticeBall { d: 2, r: 5 },
            MeasurePolicy::Combinatorial,
        )
        .unwrap();
        let omega = crate::graph::ball(
            &g,
            crate::generate::center_vertex(Family::LatticeBall { d: 2, r: 5 }, &g).unwrap(),
            4,
        )
        .unwrap();
        let dense =
            lambda_bottom_dirichlet_with(&g, &omega, SolverChoice::Force(Solver::Dense)).unwrap();
        let lanczos =
            lambda_bottom_dirichlet_with(&g, &omega, SolverChoice::Force(Solver::Lanczos)).unwrap();
        assert!((dense.eigenvalue - lanczos.eigenvalue).abs() < 1e-8);
        let d1 = lambda1_finite_with(&g, SolverChoice::Force(Solver::Dense)).unwrap();
        let l1 = lambda1_finite_with(&g, SolverChoice::Force(Solver::Lanczos)).unwrap();
        assert!(
            (d1.eigenvalue - l1.eigenvalue).abs() < 1e-8,
            "{} vs {}",
            d1.eigenvalue,
            l1.eigenvalue
        );
    }
}
