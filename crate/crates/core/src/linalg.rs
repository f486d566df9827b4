//! Dense and sparse symmetric linear algebra used by the spectral and heat
//! modules: sorted symmetric eigensolves, Padé scaling-and-squaring `expm`,
//! conjugate gradients, shift-invert Lanczos and Lanczos `exp(tS)v`.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};
use crate::graph::{VertexSubset, WeightedGraph};

/// Symmetric eigendecomposition with eigenvalues ascending (stable on ties)
/// and each eigenvector's first non-negligible entry made positive.
pub fn sym_eigen_sorted(m: DMatrix<f64>) -> (DVector<f64>, DMatrix<f64>) {
    let n = m.nrows();
    let eig = SymmetricEigen::new(m);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        eig.eigenvalues[a]
            .total_cmp(&eig.eigenvalues[b])
            .then(a.cmp(&b))
    });
    let values = DVector::from_iterator(n, order.iter().map(|&i| eig.eigenvalues[i]));
    let mut vectors = DMatrix::zeros(n, n);
    for (k, &i) in order.iter().enumerate() {
        let mut v = eig.eigenvectors.column(i).into_owned();
        if let Some(lead) = v.iter().copied().find(|x| x.abs() > 1e-12) {
            if lead < 0.0 {
                v.neg_mut();
            }
        }
        vectors.set_column(k, &v);
    }
    (values, vectors)
}

const PADE13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];
const THETA13: f64 = 5.371920351148152;

fn norm1(a: &DMatrix<f64>) -> f64 {
    a.column_iter()
        .map(|c| c.iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Matrix exponential by the [13/13] diagonal Padé approximant with scaling
/// and squaring.
pub fn expm(a: &DMatrix<f64>) -> DMatrix<f64> {
    let n = a.nrows();
    let id = DMatrix::<f64>::identity(n, n);
    let norm = norm1(a);
    if norm == 0.0 {
        return id;
    }
    let s = if norm > THETA13 {
        (norm / THETA13).log2().ceil() as i32
    } else {
        0
    };
    let a = a / 2f64.powi(s);
    let b = &PADE13;
    let a2 = &a * &a;
    let a4 = &a2 * &a2;
    let a6 = &a4 * &a2;
    let u_inner = &a6 * (&a6 * b[13] + &a4 * b[11] + &a2 * b[9])
        + &a6 * b[7]
        + &a4 * b[5]
        + &a2 * b[3]
        + &id * b[1];
    let u = &a * u_inner;
    let v = &a6 * (&a6 * b[12] + &a4 * b[10] + &a2 * b[8])
        + &a6 * b[6]
        + &a4 * b[4]
        + &a2 * b[2]
        + &id * b[0];
    let p = &v + &u;
    let q = &v - &u;
    let mut r = q.lu().solve(&p).expect("Padé denominator is nonsingular");
    for _ in 0..s {
        r = &r * &r;
    }
    r
}

/// Symmetric sparse matrix in CSR form.
#[derive(Debug, Clone)]
pub struct SparseSym {
    n: usize,
    offsets: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
}

impl SparseSym {
    /// `M^{1/2} Δ_Ω M^{-1/2}` on `omega` (whole graph when `None`), local indexing.
    pub fn generator(g: &WeightedGraph, omega: Option<&VertexSubset>) -> Result<SparseSym> {
        let members: Vec<usize> = match omega {
            Some(o) => {
                if o.is_empty() {
                    return Err(Error::EmptySubset);
                }
                o.members().to_vec()
            }
            None => (0..g.num_vertices()).collect(),
        };
        let mut local = vec![usize::MAX; g.num_vertices()];
        for (i, &x) in members.iter().enumerate() {
            local[x] = i;
        }
        let mut offsets = vec![0];
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        for &x in &members {
            let mut row: Vec<(usize, f64)> = g
                .neighbors(x)
                .filter(|&(y, _)| local[y] != usize::MAX)
                .map(|(y, w)| (local[y], w / (g.m(x) * g.m(y)).sqrt()))
                .collect();
            row.push((local[x], -g.deg(x) / g.m(x)));
            row.sort_by_key(|&(j, _)| j);
            for (j, v) in row {
                cols.push(j);
                vals.push(v);
            }
            offsets.push(cols.len());
        }
        Ok(SparseSym {
            n: members.len(),
            offsets,
            cols,
            vals,
        })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn apply(&self, x: &[f64], y: &mut [f64]) {
        for i in 0..self.n {
            let mut acc = 0.0;
            for k in self.offsets[i]..self.offsets[i + 1] {
                acc += self.vals[k] * x[self.cols[k]];
            }
            y[i] = acc;
        }
    }

    pub fn mul(&self, x: &DVector<f64>) -> DVector<f64> {
        let mut y = DVector::zeros(self.n);
        self.apply(x.as_slice(), y.as_mut_slice());
        y
    }

    /// Gershgorin bound on the spectral radius.
    pub fn norm_bound(&self) -> f64 {
        (0..self.n)
            .map(|i| {
                (self.offsets[i]..self.offsets[i + 1])
                    .map(|k| self.vals[k].abs())
                    .sum::<f64>()
            })
            .fold(0.0, f64::max)
    }
}

/// Conjugate gradients for an SPD operator. Returns the solution and the
/// achieved relative residual.
pub fn conjugate_gradient(
    apply: impl Fn(&DVector<f64>) -> DVector<f64>,
    rhs: &DVector<f64>,
    rel_tol: f64,
    max_iter: usize,
) -> (DVector<f64>, f64) {
    let bnorm = rhs.norm();
    let mut x = DVector::zeros(rhs.len());
    if bnorm == 0.0 {
        return (x, 0.0);
    }
    let mut r = rhs.clone();
    let mut p = r.clone();
    let mut rr = r.dot(&r);
    for _ in 0..max_iter {
        if rr.sqrt() <= rel_tol * bnorm {
            break;
        }
        let ap = apply(&p);
        let alpha = rr / p.dot(&ap);
        x.axpy(alpha, &p, 1.0);
        r.axpy(-alpha, &ap, 1.0);
        let rr_new = r.dot(&r);
        p = &r + &p * (rr_new / rr);
        rr = rr_new;
    }
    // true residual
    let res = (rhs - apply(&x)).norm() / bnorm;
    (x, res)
}

/// Smallest eigenpair of the PSD operator `B = −S`, optionally on the
/// orthogonal complement of a unit vector `deflate`, by shift-invert Lanczos
/// with full reorthogonalization. CG solves `(B + δI) x = v`.
pub fn lanczos_smallest(
    s: &SparseSym,
    deflate: Option<&DVector<f64>>,
    max_krylov: usize,
    tol: f64,
) -> Result<(f64, DVector<f64>, f64)> {
    let n = s.dim();
    let project = |v: &mut DVector<f64>| {
        if let Some(u) = deflate {
            let c = u.dot(v);
            v.axpy(-c, u, 1.0);
        }
    };
    let b_apply = |v: &DVector<f64>| -> DVector<f64> { -s.mul(v) };
    let delta = 1e-3 * s.norm_bound().max(1e-300);
    // B + δI is SPD on the whole space and commutes with the deflation
    let shifted = |v: &DVector<f64>| -> DVector<f64> { b_apply(v) + v * delta };

    // deterministic start: smooth positive vector with a small ramp
    let mut start = DVector::from_fn(n, |i, _| {
        1.0 + 0.5 * ((i as f64 + 1.0) * 0.7548776662466927).fract()
    });
    project(&mut start);
    let mut best = (f64::INFINITY, start.clone(), f64::INFINITY);

    for _restart in 0..8 {
        let mut q = start.clone();
        let qn = q.norm();
        if qn == 0.0 {
            return Err(Error::Nonconvergence(
                "Lanczos start vector vanished".into(),
            ));
        }
        q /= qn;
        let mut basis: Vec<DVector<f64>> = vec![q];
        let mut alpha = Vec::new();
        let mut beta: Vec<f64> = Vec::new();
        for j in 0..max_krylov.min(n) {
            let (mut w, cg_res) = conjugate_gradient(&shifted, &basis[j], 1e-13, 20 * n + 100);
            if cg_res > 1e-6 {
                return Err(Error::Nonconvergence(format!(
                    "CG residual {cg_res:e} in shift-invert"
                )));
            }
            project(&mut w);
            let a = basis[j].dot(&w);
            alpha.push(a);
            // full reorthogonalization, twice
            for _ in 0..2 {
                for v in &basis {
                    let c = v.dot(&w);
                    w.axpy(-c, v, 1.0);
                }
            }
            let b = w.norm();
            let k = alpha.len();
            let check = k % 5 == 0 || b < 1e-12 || k == max_krylov.min(n);
            if check {
                let mut t = DMatrix::zeros(k, k);
                for i in 0..k {
                    t[(i, i)] = alpha[i];
                    if i + 1 < k {
                        t[(i, i + 1)] = beta[i];
                        t[(i + 1, i)] = beta[i];
                    }
                }
                let (_, vecs) = sym_eigen_sorted(t);
                let y = vecs.column(k - 1);
                let mut u = DVector::zeros(n);
                for (i, v) in basis.iter().enumerate() {
                    u.axpy(y[i], v, 1.0);
                }
                project(&mut u);
                u /= u.norm();
                let bu = b_apply(&u);
                let lambda = u.dot(&bu);
                let mut r = &bu - &u * lambda;
                project(&mut r);
                let res = r.norm();
                if res < best.2 {
                    best = (lambda, u.clone(), res);
                }
                if res <= tol * lambda.abs().max(1.0) {
                    return Ok(best);
                }
            }
            if b < 1e-12 {
                break;
            }
            beta.push(b);
            basis.push(w / b);
        }
        start = best.1.clone();
    }
    if best.2 <= 1e-8 * best.0.abs().max(1.0) {
        Ok(best)
    } else {
        Err(Error::Nonconvergence(format!(
            "Lanczos residual {:e}",
            best.2
        )))
    }
}

/// `exp(t S) v` for symmetric `S` by Lanczos with adaptive time stepping.
pub fn expm_action_lanczos(
    s: &SparseSym,
    v: &DVector<f64>,
    t: f64,
    tol: f64,
    max_dim: usize,
) -> Result<DVector<f64>> {
    let mut w = v.clone();
    if t == 0.0 || w.norm() == 0.0 {
        return Ok(w);
    }
    let n = s.dim();
    let mut remaining = t;
    let mut tau = t
        .min(10.0 / s.norm_bound().max(1e-300))
        .max(t * 1e-6)
        .min(t);
    let mut grow = true;
    let mut steps = 0;
    while remaining > 0.0 {
        steps += 1;
        if steps > 100_000 {
            return Err(Error::Nonconvergence(
                "Krylov time stepping did not finish".into(),
            ));
        }
        let beta0 = w.norm();
        if beta0 == 0.0 {
            return Ok(w);
        }
        let mut basis: Vec<DVector<f64>> = vec![&w / beta0];
        let mut alpha = Vec::new();
        let mut beta = Vec::new();
        let mut breakdown = false;
        for j in 0..max_dim.min(n) {
            let mut u = s.mul(&basis[j]);
            alpha.push(basis[j].dot(&u));
            for _ in 0..2 {
                for q in &basis {
                    let c = q.dot(&u);
                    u.axpy(-c, q, 1.0);
                }
            }
            let b = u.norm();
            beta.push(b);
            if b <= 1e-14 * beta0.max(1.0) {
                breakdown = true;
                break;
            }
            basis.push(u / b);
        }
        let k = alpha.len();
        let mut tm = DMatrix::zeros(k, k);
        for i in 0..k {
            tm[(i, i)] = alpha[i];
            if i + 1 < k {
                tm[(i, i + 1)] = beta[i];
                tm[(i + 1, i)] = beta[i];
            }
        }
        let (vals, vecs) = sym_eigen_sorted(tm);
        let step_tau = tau.min(remaining);
        let mut accepted = None;
        let mut trial = step_tau;
        for _ in 0..60 {
            let coeffs = krylov_coeffs(&vals, &vecs, trial);
            let err = if breakdown {
                0.0
            } else {
                beta[k - 1] * coeffs[k - 1].abs() * beta0
            };
            if err <= tol * beta0 * (trial / t).max(1e-3) {
                accepted = Some((trial, coeffs));
                break;
            }
            trial *= 0.5;
            grow = false;
        }
        let (step, coeffs) = accepted
            .ok_or_else(|| Error::Nonconvergence("Krylov step shrank below tolerance".into()))?;
        let mut next = DVector::zeros(n);
        for (i, q) in basis.iter().take(k).enumerate() {
            next.axpy(beta0 * coeffs[i], q, 1.0);
        }
        w = next;
        remaining -= step;
        if remaining < 1e-15 * t {
            remaining = 0.0;
        }
        tau = if grow { step * 2.0 } else { step * 1.25 };
        grow = true;
    }
    Ok(w)
}

fn krylov_coeffs(vals: &DVector<f64>, vecs: &DMatrix<f64>, tau: f64) -> DVector<f64> {
    // exp(τ T) e₁ = V exp(τ Λ) Vᵀ e₁
    let k = vals.len();
    let mut out = DVector::zeros(k);
    for j in 0..k {
        let c = (tau * vals[j]).exp() * vecs[(0, j)];
        for i in 0..k {
            out[i] += vecs[(i, j)] * c;
        }
    }
    out
}
