use proptest::prelude::*;

use graphcurv::curvature::{cd_slack, curvature_function, Dimension};
use graphcurv::generate::{generate, random_function, Family};
use graphcurv::graph::{MeasurePolicy, VertexSubset, WeightedGraph};
use graphcurv::harness::{buser_check, cheeger_lower_bound_check};
use graphcurv::isoperimetry::{cheeger_finite_exact, cheeger_subset, cheeger_sweep, subset_ratio};
use graphcurv::metric::canonical_intrinsic_metric;
use graphcurv::operators::{gamma, gamma2, green_residual};
use graphcurv::semigroup::HeatKernel;
use graphcurv::spectral::{lambda1_finite, lambda_bottom_dirichlet, rayleigh_quotient};

fn graph_strategy() -> impl Strategy<Value = WeightedGraph> {
    (3usize..10, 0.1f64..0.6, any::<u64>(), any::<bool>()).prop_map(|(n, p, seed, normalized)| {
        let policy = if normalized {
            MeasurePolicy::Normalized
        } else {
            MeasurePolicy::Combinatorial
        };
        generate(Family::Random { n, p, seed }, policy).unwrap()
    })
}

fn subset_of(g: &WeightedGraph, bits: u64) -> VertexSubset {
    let n = g.num_vertices();
    let mut members: Vec<usize> = (0..n).filter(|x| bits >> x & 1 == 1).collect();
    if members.is_empty() {
        members.push(0);
    }
    if members.len() == n {
        members.pop();
    }
    VertexSubset::new(g, members).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn gamma_forms_are_nonnegative_and_green_holds(g in graph_strategy(), seed in any::<u64>()) {
        let f = random_function(g.num_vertices(), seed);
        let h = random_function(g.num_vertices(), seed ^ 1);
        prop_assert!(gamma(&g, &f, &f).0.iter().all(|&v| v >= 0.0));
        prop_assert!(green_residual(&g, &f, &h) < 1e-12);
        // Γ₂(f) ≥ K Γ(f) with K the computed global constant
        let res = curvature_function(&g, Dimension::INFINITE).unwrap();
        let g2 = gamma2(&g, &f);
        let g1 = gamma(&g, &f, &f);
        for x in 0..g.num_vertices() {
            prop_assert!(g2[x] - res.global_k * g1[x] >= -1e-9 * (1.0 + g2[x].abs()));
            prop_assert!(cd_slack(&g, &f, x, Dimension::INFINITE, res.vertices[x].k) >= -1e-9 * (1.0 + g2[x].abs()));
        }
    }

    #[test]
    fn curvature_decreases_with_dimension(g in graph_strategy()) {
        let inf = curvature_function(&g, Dimension::INFINITE).unwrap().per_vertex();
        let four = curvature_function(&g, Dimension::new(4.0).unwrap()).unwrap().per_vertex();
        let two = curvature_function(&g, Dimension::new(2.0).unwrap()).unwrap().per_vertex();
        for x in 0..g.num_vertices() {
            prop_assert!(four[x] <= inf[x] + 1e-9 && two[x] <= four[x] + 1e-9);
        }
    }

    #[test]
    fn measure_scaling_covariance(g in graph_strategy(), c in prop::sample::select(vec![0.5, 3.0])) {
        let scaled = g.rescaled(1.0, c).unwrap();
        let k = curvature_function(&g, Dimension::INFINITE).unwrap().global_k;
        let ks = curvature_function(&scaled, Dimension::INFINITE).unwrap().global_k;
        prop_assert!((ks - k / c).abs() < 1e-9 * (1.0 + k.abs()));
        let lam = lambda1_finite(&g).unwrap().eigenvalue;
        prop_assert!((lambda1_finite(&scaled).unwrap().eigenvalue - lam / c).abs() < 1e-9);
        let h = cheeger_finite_exact(&g).unwrap().value;
        prop_assert!((cheeger_finite_exact(&scaled).unwrap().value - h / c).abs() < 1e-12 * (1.0 + h));

        let omega = VertexSubset::all(&g);
        let b = buser_check(&g, &omega, Dimension::INFINITE).unwrap();
        let bs = buser_check(&scaled, &VertexSubset::all(&scaled), Dimension::INFINITE).unwrap();
        prop_assert!((bs.lhs - b.lhs / c).abs() < 1e-9 * (1.0 + b.lhs));
        prop_assert!((bs.rhs - b.rhs / c).abs() < 1e-9 * (1.0 + b.rhs));
        prop_assert_eq!(b.pass, bs.pass);

        let cb = cheeger_lower_bound_check(&g).unwrap();
        let cbs = cheeger_lower_bound_check(&scaled).unwrap();
        prop_assert_eq!(cb.status, cbs.status);
        if cb.lhs.is_finite() {
            prop_assert!((cbs.lhs - cb.lhs / c).abs() < 1e-9 * (1.0 + cb.lhs));
            prop_assert!((cbs.rhs - cb.rhs / c).abs() < 1e-9 * (1.0 + cb.rhs));
        }
    }

    #[test]
    fn cheeger_orderings(g in graph_strategy(), bits in any::<u64>()) {
        let exact = cheeger_finite_exact(&g).unwrap();
        prop_assert!(cheeger_sweep(&g).unwrap().value >= exact.value - 1e-12);
        let u = subset_of(&g, bits);
        let sub = cheeger_subset(&g, &u).unwrap();
        prop_assert!(sub.value <= subset_ratio(&g, &u).unwrap() + 1e-12);
        prop_assert!(sub.subset.is_subset_of(&u));
    }

    #[test]
    fn rayleigh_quotients_bound_dirichlet_bottom(g in graph_strategy(), bits in any::<u64>(), seed in any::<u64>()) {
        let u = subset_of(&g, bits);
        let lam = lambda_bottom_dirichlet(&g, &u).unwrap().eigenvalue;
        let mut f = random_function(g.num_vertices(), seed);
        for (x, v) in f.iter_mut().enumerate() {
            if !u.contains(x) {
                *v = 0.0;
            }
        }
        if f.iter().any(|&v| v != 0.0) {
            prop_assert!(rayleigh_quotient(&g, &f).unwrap() >= lam - 1e-10);
        }
        // removing a vertex cannot lower the bottom
        if u.len() >= 2 {
            let smaller = VertexSubset::new(&g, u.members()[1..].iter().copied()).unwrap();
            prop_assert!(lambda_bottom_dirichlet(&g, &smaller).unwrap().eigenvalue >= lam - 1e-10);
        }
    }

    #[test]
    fn heat_is_positive_markov_and_contractive(g in graph_strategy(), seed in any::<u64>(), t in 0.0f64..5.0) {
        let kernel = HeatKernel::new(&g, None).unwrap();
        let f: Vec<f64> = random_function(g.num_vertices(), seed).iter().map(|v| v.abs()).collect();
        let p = kernel.apply(&f, t);
        prop_assert!(p.0.iter().all(|&v| v >= -1e-13));
        let one = kernel.apply(&vec![1.0; g.num_vertices()], t);
        prop_assert!(one.0.iter().all(|&v| (v - 1.0).abs() < 1e-12));
        let sup = f.iter().cloned().fold(0.0, f64::max);
        prop_assert!(p.max_abs() <= sup + 1e-12);
    }

    #[test]
    fn intrinsic_metric_is_admissible(g in graph_strategy()) {
        let rho = canonical_intrinsic_metric(&g).unwrap();
        prop_assert!(rho.slack.iter().all(|&s| s >= -1e-12));
        let d = rho.all_pairs();
        let n = g.num_vertices();
        for x in 0..n {
            prop_assert_eq!(d[x][x], 0.0);
            for y in 0..n {
                prop_assert!((d[x][y] - d[y][x]).abs() < 1e-12);
                for z in 0..n {
                    prop_assert!(d[x][z] <= d[x][y] + d[y][z] + 1e-12);
                }
            }
        }
        let max_edge = g.edges().map(|(x, y, _)| rho.edge_length(x, y).unwrap()).fold(0.0, f64::max);
        prop_assert_eq!(max_edge, rho.jump_size);
    }
}
