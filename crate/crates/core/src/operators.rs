//! Laplacian, carré du champ `Γ`, iterated form `Γ₂`, and the local
//! quadratic forms on punctured 2-balls used by the curvature solver.

use std::ops::{Deref, DerefMut};

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{VertexSubset, WeightedGraph};

/// A real function on the vertices of a graph, indexed densely.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VertexFunction(pub Vec<f64>);

impl VertexFunction {
    pub fn zeros(n: usize) -> Self {
        VertexFunction(vec![0.0; n])
    }

    pub fn constant(n: usize, c: f64) -> Self {
        VertexFunction(vec![c; n])
    }

    pub fn indicator(subset: &VertexSubset) -> Self {
        VertexFunction(
            subset
                .mask()
                .into_iter()
                .map(|b| if b { 1.0 } else { 0.0 })
                .collect(),
        )
    }

    /// Indices where the function is nonzero.
    pub fn support(&self) -> Vec<usize> {
        self.0
            .iter()
            .enumerate()
            .filter(|(_, &v)| v != 0.0)
            .map(|(i, _)| i)
            .collect()
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        VertexFunction(self.0.iter().map(|&v| f(v)).collect())
    }

    pub fn zip_with(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Self {
        VertexFunction(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        )
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().fold(0.0, |acc, v| acc.max(v.abs()))
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl Deref for VertexFunction {
    type Target = [f64];
    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl DerefMut for VertexFunction {
    fn deref_mut(&mut self) -> &mut [f64] {
        &mut self.0
    }
}

impl From<Vec<f64>> for VertexFunction {
    fn from(v: Vec<f64>) -> Self {
        VertexFunction(v)
    }
}

/// m-weighted inner product `⟨f, h⟩ = Σ f h m`.
pub fn inner(g: &WeightedGraph, f: &[f64], h: &[f64]) -> f64 {
    f.iter()
        .zip(h)
        .zip(g.measure())
        .map(|((a, b), m)| a * b * m)
        .sum()
}

/// m-weighted `ℓ^p` norm; `p = f64::INFINITY` gives the sup norm.
pub fn norm_p(g: &WeightedGraph, f: &[f64], p: f64) -> f64 {
    if p.is_infinite() {
        return f.iter().fold(0.0, |acc, v| acc.max(v.abs()));
    }
    let sum: f64 = f
        .iter()
        .zip(g.measure())
        .map(|(v, m)| v.abs().powf(p) * m)
        .sum();
    sum.powf(1.0 / p)
}

/// `(Δf)(x) = (1/m(x)) Σ_{y∼x} ω(x,y) (f(y) − f(x))`.
pub fn laplacian_apply(g: &WeightedGraph, f: &[f64]) -> VertexFunction {
    debug_assert_eq!(f.len(), g.num_vertices());
    VertexFunction(
        (0..g.num_vertices())
            .map(|x| laplacian_at(g, f, x))
            .collect(),
    )
}

fn laplacian_at(g: &WeightedGraph, f: &[f64], x: usize) -> f64 {
    g.neighbors(x).map(|(y, w)| w * (f[y] - f[x])).sum::<f64>() / g.m(x)
}

/// Dense matrix of `Δ` acting on column vectors of vertex values.
pub fn laplacian_matrix(g: &WeightedGraph) -> DMatrix<f64> {
    let n = g.num_vertices();
    let mut l = DMatrix::zeros(n, n);
    for x in 0..n {
        let mx = g.m(x);
        for (y, w) in g.neighbors(x) {
            l[(x, y)] = w / mx;
        }
        l[(x, x)] = -g.deg(x) / mx;
    }
    l
}

/// Dirichlet restriction of `Δ` to functions vanishing outside `omega`, in
/// the local coordinates `omega.members()`. Edges leaving `omega` keep
/// their contribution to the diagonal.
pub fn dirichlet_matrix(g: &WeightedGraph, omega: &VertexSubset) -> Result<DMatrix<f64>> {
    omega.check_host(g)?;
    if omega.is_empty() {
        return Err(Error::EmptySubset);
    }
    let members = omega.members();
    let k = members.len();
    let mut l = DMatrix::zeros(k, k);
    for (i, &x) in members.iter().enumerate() {
        let mx = g.m(x);
        for (y, w) in g.neighbors(x) {
            if let Ok(j) = members.binary_search(&y) {
                l[(i, j)] = w / mx;
            }
        }
        l[(i, i)] = -g.deg(x) / mx;
    }
    Ok(l)
}

/// Symmetrized Dirichlet operator `M^{1/2} Δ_Ω M^{-1/2}` (symmetric,
/// negative semidefinite). With `omega = None` the whole graph is used.
pub fn symmetric_generator(
    g: &WeightedGraph,
    omega: Option<&VertexSubset>,
) -> Result<DMatrix<f64>> {
    let full;
    let omega = match omega {
        Some(o) => o,
        None => {
            full = VertexSubset::all(g);
            &full
        }
    };
    omega.check_host(g)?;
    if omega.is_empty() {
        return Err(Error::EmptySubset);
    }
    let members = omega.members();
    let k = members.len();
    let mut s = DMatrix::zeros(k, k);
    for (i, &x) in members.iter().enumerate() {
        for (y, w) in g.neighbors(x) {
            if let Ok(j) = members.binary_search(&y) {
                s[(i, j)] = w / (g.m(x) * g.m(y)).sqrt();
            }
        }
        s[(i, i)] = -g.deg(x) / g.m(x);
    }
    Ok(s)
}

/// `Γ(f, h)(x) = (1/2m(x)) Σ_{y∼x} ω(x,y) (f(y) − f(x))(h(y) − h(x))`.
pub fn gamma(g: &WeightedGraph, f: &[f64], h: &[f64]) -> VertexFunction {
    VertexFunction(
        (0..g.num_vertices())
            .map(|x| gamma_at(g, f, h, x))
            .collect(),
    )
}

pub fn gamma_at(g: &WeightedGraph, f: &[f64], h: &[f64], x: usize) -> f64 {
    g.neighbors(x)
        .map(|(y, w)| w * (f[y] - f[x]) * (h[y] - h[x]))
        .sum::<f64>()
        / (2.0 * g.m(x))
}

/// Polarized `Γ₂(f, h) = ½ [ΔΓ(f, h) − Γ(f, Δh) − Γ(h, Δf)]`.
pub fn gamma2_bilinear(g: &WeightedGraph, f: &[f64], h: &[f64]) -> VertexFunction {
    let gfh = gamma(g, f, h);
    let lap_gfh = laplacian_apply(g, &gfh);
    let lf = laplacian_apply(g, f);
    let lh = laplacian_apply(g, h);
    let a = gamma(g, f, &lh);
    let b = gamma(g, h, &lf);
    VertexFunction(
        (0..g.num_vertices())
            .map(|x| 0.5 * (lap_gfh[x] - a[x] - b[x]))
            .collect(),
    )
}

/// `Γ₂(f) = ½ ΔΓ(f) − Γ(f, Δf)`.
pub fn gamma2(g: &WeightedGraph, f: &[f64]) -> VertexFunction {
    gamma2_bilinear(g, f, f)
}

/// Residual of the summation-by-parts identity
/// `Σ f Δh m + Σ Γ(f, h) m = 0`.
pub fn green_residual(g: &WeightedGraph, f: &[f64], h: &[f64]) -> f64 {
    let lh = laplacian_apply(g, h);
    let gfh = gamma(g, f, h);
    inner(g, f, &lh) + gfh.iter().zip(g.measure()).map(|(v, m)| v * m).sum::<f64>()
}

/// Quadratic forms at `x` on functions over `B₂(x) \ {x}` with `f(x) = 0`.
#[derive(Debug, Clone)]
pub struct LocalForms {
    pub center: usize,
    /// Global indices of the coordinates: the 1-sphere first, then the 2-sphere,
    /// each sorted by index.
    pub coords: Vec<usize>,
    /// Number of 1-sphere coordinates (the leading block).
    pub s1_len: usize,
    /// `fᵀ A f = 2Γ₂(f)(x)`.
    pub a: DMatrix<f64>,
    /// `fᵀ B f = 2Γ(f)(x)`; diagonal, zero outside the 1-sphere block.
    pub b: DMatrix<f64>,
    /// `w · f = Δf(x)`.
    pub w: DVector<f64>,
}

impl LocalForms {
    pub fn s2_len(&self) -> usize {
        self.coords.len() - self.s1_len
    }

    /// Extends local coordinates to a global function with `f(x) = 0`.
    pub fn lift(&self, local: &[f64], n: usize) -> VertexFunction {
        let mut f = VertexFunction::zeros(n);
        for (&v, &c) in local.iter().zip(&self.coords) {
            f[c] = v;
        }
        f
    }
}

/// Assembles [`LocalForms`] at `x`.
///
/// Writing every quantity as a linear or bilinear map on the vertex values
/// over `B₂(x)`, with `D_y` the difference rows at `y`:
///
/// * `2ΔΓ(f)(x) = Σ_y (ω_xy/m_x) (2Γ(f)(y) − 2Γ(f)(x))`,
/// * `2Γ(f, Δf)(x) = (1/m_x) Σ_y ω_xy (f_y − f_x)(Δf(y) − Δf(x))`,
///
/// and `2Γ₂(f) = ΔΓ(f) − 2Γ(f, Δf)` is read off as a symmetric matrix.
pub fn local_forms(g: &WeightedGraph, x: usize) -> Result<LocalForms> {
    g.check_vertex(x)?;
    let s1: Vec<usize> = g.neighbors(x).map(|(y, _)| y).collect();
    let mut s2: Vec<usize> = s1
        .iter()
        .flat_map(|&y| g.neighbors(y).map(|(z, _)| z))
        .filter(|&z| z != x && s1.binary_search(&z).is_err())
        .collect();
    s2.sort_unstable();
    s2.dedup();

    // ball coordinates: x first, then S1, then S2
    let mut ball = Vec::with_capacity(1 + s1.len() + s2.len());
    ball.push(x);
    ball.extend(&s1);
    ball.extend(&s2);
    let nb = ball.len();
    let pos = |v: usize| -> usize {
        if v == x {
            0
        } else if let Ok(i) = s1.binary_search(&v) {
            1 + i
        } else {
            1 + s1.len() + s2.binary_search(&v).expect("vertex inside the 2-ball")
        }
    };

    let mx = g.m(x);
    // rows of the linear map f ↦ Δf(v) for v ∈ {x} ∪ S1
    let lap_row = |v: usize| -> DVector<f64> {
        let mut row = DVector::zeros(nb);
        let mv = g.m(v);
        for (u, w) in g.neighbors(v) {
            row[pos(u)] += w / mv;
        }
        row[pos(v)] -= g.deg(v) / mv;
        row
    };
    // matrix of f ↦ 2Γ(f)(v), v ∈ {x} ∪ S1
    let gamma_form = |v: usize| -> DMatrix<f64> {
        let mut q = DMatrix::zeros(nb, nb);
        let (pv, mv) = (pos(v), g.m(v));
        for (u, w) in g.neighbors(v) {
            let pu = pos(u);
            let c = w / mv;
            q[(pu, pu)] += c;
            q[(pv, pv)] += c;
            q[(pu, pv)] -= c;
            q[(pv, pu)] -= c;
        }
        q
    };

    let gamma_x = gamma_form(x);
    let lap_x = lap_row(x);
    let mut a_full: DMatrix<f64> = DMatrix::zeros(nb, nb);
    for (y, w) in g.neighbors(x) {
        let c = w / mx;
        // ΔΓ(f)(x) = Σ c (Γ(f)(y) − Γ(f)(x))
        a_full += (gamma_form(y) - &gamma_x) * (0.5 * c);
        // −2Γ(f, Δf)(x) = −(1/m_x) Σ ω (f_y − f_x)(Δf(y) − Δf(x))
        let mut diff: DVector<f64> = DVector::zeros(nb);
        diff[pos(y)] += 1.0;
        diff[0] -= 1.0;
        let lap_diff = lap_row(y) - &lap_x;
        let outer = &diff * lap_diff.transpose();
        a_full -= (&outer + outer.transpose()) * (0.5 * c);
    }
    // drop the pinned centre coordinate
    let k = nb - 1;
    let a = a_full.view((1, 1), (k, k)).into_owned();
    let a = (&a + a.transpose()) * 0.5;

    let mut b = DMatrix::zeros(k, k);
    let mut w = DVector::zeros(k);
    for (i, (_, wxy)) in g.neighbors(x).enumerate() {
        b[(i, i)] = wxy / mx;
        w[i] = wxy / mx;
    }
    let mut coords = s1.clone();
    coords.extend(&s2);
    Ok(LocalForms {
        center: x,
        coords,
        s1_len: s1.len(),
        a,
        b,
        w,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::{generate, Family};
    use crate::graph::MeasurePolicy;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn two_vertex() -> WeightedGraph {
        generate(Family::Path { n: 2 }, MeasurePolicy::Normalized).unwrap()
    }

    fn random_fn(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
        (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()
    }

    #[test]
    fn two_vertex_hand_values() {
        let g = two_vertex();
        assert_eq!(laplacian_apply(&g, &[1.0, 0.0]).0, [-1.0, 1.0]);
        let f = [0.0, 1.0];
        assert_eq!(gamma(&g, &f, &f).0, [0.5, 0.5]);
        assert_eq!(gamma2(&g, &f).0, [1.0, 1.0]);

        let lf = local_forms(&g, 0).unwrap();
        assert_eq!(lf.coords, [1]);
        assert_eq!(lf.b[(0, 0)], 1.0);
        assert_eq!(lf.w[0], 1.0);
        assert!((lf.a[(0, 0)] - 2.0).abs() < 1e-15);
    }

    #[test]
    fn constants_are_harmonic() {
        let g = generate(
            Family::Random {
                n: 9,
                p: 0.4,
                seed: 3,
            },
            MeasurePolicy::Combinatorial,
        )
        .unwrap();
        let c = vec![2.5; 9];
        assert!(laplacian_apply(&g, &c).max_abs() < 1e-14);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let h = random_fn(&mut rng, 9);
        assert!(gamma(&g, &c, &h).max_abs() < 1e-15);
    }

    #[test]
    fn cycle_indicator_gamma() {
        let g = generate(Family::Cycle { n: 4 }, MeasurePolicy::Normalized).unwrap();
        let f = [1.0, 0.0, 0.0, 0.0];
        assert_eq!(gamma(&g, &f, &f)[0], 0.5);
    }

    #[test]
    fn dirichlet_single_vertex() {
        let g = generate(Family::Path { n: 3 }, MeasurePolicy::Combinatorial).unwrap();
        let omega = VertexSubset::new(&g, [1]).unwrap();
        let d = dirichlet_matrix(&g, &omega).unwrap();
        assert_eq!(d.shape(), (1, 1));
        assert_eq!(d[(0, 0)], -2.0);
        assert!(matches!(
            dirichlet_matrix(&g, &VertexSubset::new(&g, []).unwrap()),
            Err(Error::EmptySubset)
        ));
    }

    #[test]
    fn green_identity_on_cycle_and_cube() {
        let g = generate(Family::Cycle { n: 8 }, MeasurePolicy::Normalized).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let f = random_fn(&mut rng, 8);
            let h = random_fn(&mut rng, 8);
            assert!(green_residual(&g, &f, &h).abs() < 1e-10);
        }
        let q = generate(Family::Hypercube { d: 3 }, MeasurePolicy::Normalized).unwrap();
        let ind = VertexFunction::indicator(&VertexSubset::new(&q, [0, 1, 3]).unwrap());
        assert!(green_residual(&q, &ind, &ind).abs() < 1e-10);
        assert_eq!(green_residual(&q, &[1.0; 8], &[1.0; 8]), 0.0);
    }

    #[test]
    fn local_forms_structure() {
        let k4 = generate(Family::Complete { n: 4 }, MeasurePolicy::Normalized).unwrap();
        let lf = local_forms(&k4, 0).unwrap();
        assert_eq!(lf.s2_len(), 0);
        assert_eq!(lf.a.shape(), (3, 3));

        let c5 = generate(Family::Cycle { n: 5 }, MeasurePolicy::Combinatorial).unwrap();
        let lf = local_forms(&c5, 2).unwrap();
        assert_eq!(lf.coords.len(), 4);
        assert_eq!(lf.s1_len, 2);
        assert_eq!(lf.coords, [1, 3, 0, 4]);
    }

    #[test]
    fn local_forms_agree_with_global_operators() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for seed in 0..10 {
            let policy = if seed % 2 == 0 {
                MeasurePolicy::Normalized
            } else {
                MeasurePolicy::Combinatorial
            };
            let g = generate(
                Family::Random {
                    n: 10,
                    p: 0.35,
                    seed,
                },
                policy,
            )
            .unwrap();
            for x in 0..g.num_vertices() {
                let lf = local_forms(&g, x).unwrap();
                assert!((&lf.a - lf.a.transpose()).amax() < 1e-14);
                let local = DVector::from_vec(random_fn(&mut rng, lf.coords.len()));
                let f = lf.lift(local.as_slice(), g.num_vertices());
                let qa = (local.transpose() * &lf.a * &local)[(0, 0)];
                let qb = (local.transpose() * &lf.b * &local)[(0, 0)];
                let lw = lf.w.dot(&local);
                assert!((qa - 2.0 * gamma2(&g, &f)[x]).abs() < 1e-12, "Γ₂ at {x}");
                assert!((qb - 2.0 * gamma(&g, &f, &f)[x]).abs() < 1e-12);
                assert!((lw - laplacian_apply(&g, &f)[x]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn dirichlet_form_nonnegative_and_polarization() {
        let g = generate(
            Family::Random {
                n: 12,
                p: 0.3,
                seed: 9,
            },
            MeasurePolicy::Normalized,
        )
        .unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..20 {
            let f = random_fn(&mut rng, 12);
            let h = random_fn(&mut rng, 12);
            let lf = laplacian_apply(&g, &f);
            assert!(-inner(&g, &f, &lf) >= -1e-14);
            let fh: Vec<f64> = f.iter().zip(&h).map(|(a, b)| a * b).collect();
            let lfh = laplacian_apply(&g, &fh);
            let lh = laplacian_apply(&g, &h);
            let gfh = gamma(&g, &f, &h);
            for x in 0..12 {
                let rhs = lfh[x] - f[x] * lh[x] - h[x] * lf[x];
                assert!((2.0 * gfh[x] - rhs).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn matrix_forms_match_apply() {
        let g = generate(
            Family::Random {
                n: 7,
                p: 0.5,
                seed: 4,
            },
            MeasurePolicy::Combinatorial,
        )
        .unwrap();
        let f = DVector::from_fn(7, |i, _| (i as f64).sin());
        let via_matrix = laplacian_matrix(&g) * &f;
        let direct = laplacian_apply(&g, f.as_slice());
        for i in 0..7 {
            assert!((via_matrix[i] - direct[i]).abs() < 1e-14);
        }
        let full = VertexSubset::all(&g);
        assert_eq!(dirichlet_matrix(&g, &full).unwrap(), laplacian_matrix(&g));
    }
}
