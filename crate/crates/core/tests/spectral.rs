use std::f64::consts::PI;

use graphcurv::generate::{center_vertex, generate, Family};
use graphcurv::graph::{ball, MeasurePolicy, VertexSubset};
use graphcurv::harness::ExhaustionSpec;
use graphcurv::spectral::{
    lambda1_finite, lambda1_finite_with, lambda_bottom_dirichlet, lambda_bottom_dirichlet_with,
    Solver, SolverChoice,
};

#[test]
fn hypercube_gap_is_two_over_d() {
    for d in 1..=6 {
        let g = generate(Family::Hypercube { d }, MeasurePolicy::Normalized).unwrap();
        let lam = lambda1_finite(&g).unwrap().eigenvalue;
        assert!((lam - 2.0 / d as f64).abs() < 1e-10, "d={d}: {lam}");
    }
}

#[test]
fn cycle_gap_closed_form() {
    for n in 3..=20 {
        let g = generate(Family::Cycle { n }, MeasurePolicy::Normalized).unwrap();
        let lam = lambda1_finite(&g).unwrap().eigenvalue;
        let exact = 1.0 - (2.0 * PI / n as f64).cos();
        assert!((lam - exact).abs() < 1e-12, "n={n}");
        let g = generate(Family::Cycle { n }, MeasurePolicy::Combinatorial).unwrap();
        assert!((lambda1_finite(&g).unwrap().eigenvalue - 2.0 * exact).abs() < 1e-12);
    }
}

#[test]
fn dirichlet_interior_of_path_closed_form() {
    // combinatorial path, Ω the interior: the discrete sine basis
    for k in 1..=12 {
        let g = generate(Family::Path { n: k + 2 }, MeasurePolicy::Combinatorial).unwrap();
        let omega = VertexSubset::new(&g, 1..=k).unwrap();
        let r = lambda_bottom_dirichlet(&g, &omega).unwrap();
        let exact = 2.0 - 2.0 * (PI / (k + 1) as f64).cos();
        assert!((r.eigenvalue - exact).abs() < 1e-12, "k={k}");
        assert!(r.eigenvector.0[0] == 0.0 && r.eigenvector.0[k + 1] == 0.0);
    }
}

#[test]
fn domain_monotonicity_along_balls() {
    for fam in [
        Family::LatticeBall { d: 2, r: 6 },
        Family::TreeBall { degree: 3, r: 5 },
        Family::Hypercube { d: 5 },
    ] {
        let g = generate(fam, MeasurePolicy::Normalized).unwrap();
        let c = center_vertex(fam, &g).unwrap_or(0);
        let mut last = f64::INFINITY;
        for r in 0..5 {
            let omega = ball(&g, c, r).unwrap();
            if omega.is_full() {
                break;
            }
            let lam = lambda_bottom_dirichlet(&g, &omega).unwrap().eigenvalue;
            assert!(lam <= last + 1e-12, "{fam} r={r}: {lam} > {last}");
            last = lam;
        }
    }
}

#[test]
fn exhaustion_is_monotone() {
    for fam in [
        Family::LatticeBall { d: 1, r: 0 },
        Family::LatticeBall { d: 2, r: 0 },
        Family::TreeBall { degree: 3, r: 0 },
    ] {
        let rep = ExhaustionSpec {
            family: fam,
            radii: vec![1, 2, 3, 4],
            measure: "normalized".into(),
        }
        .run()
        .unwrap();
        assert!(
            rep.lambda_monotone && rep.h_monotone,
            "{fam}: {:?}",
            rep.steps
        );
    }
}

#[test]
fn lanczos_agrees_with_dense_near_500_vertices() {
    // lattice_ball(2, 15) has 481 vertices
    let fam = Family::LatticeBall { d: 2, r: 15 };
    let g = generate(fam, MeasurePolicy::Normalized).unwrap();
    assert_eq!(g.num_vertices(), 481);
    let omega = ball(&g, center_vertex(fam, &g).unwrap(), 14).unwrap();
    let dense =
        lambda_bottom_dirichlet_with(&g, &omega, SolverChoice::Force(Solver::Dense)).unwrap();
    let lanczos =
        lambda_bottom_dirichlet_with(&g, &omega, SolverChoice::Force(Solver::Lanczos)).unwrap();
    assert!(
        (dense.eigenvalue - lanczos.eigenvalue).abs() < 1e-9,
        "{} vs {}",
        dense.eigenvalue,
        lanczos.eigenvalue
    );

    let g = generate(Family::Hypercube { d: 9 }, MeasurePolicy::Normalized).unwrap();
    let lanczos = lambda1_finite_with(&g, SolverChoice::Force(Solver::Lanczos)).unwrap();
    assert!((lanczos.eigenvalue - 2.0 / 9.0).abs() < 1e-9);
    assert!(lanczos.residual < 1e-6);
}
