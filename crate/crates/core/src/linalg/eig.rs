//! Eigensolvers.
//!
//! `hermitian_eig` is a cyclic complex Jacobi method for the small operators
//! of quantum strategies. `SymmetricEigen` is a Householder tridiagonalization
//! followed by implicit QL, used where many medium-sized real symmetric
//! decompositions are needed (PSD projection inside the SDP solver).

use super::matrix::{ComplexMatrix, C64};
use crate::error::{Error, Result};

/// Hermiticity tolerance accepted by [`hermitian_eig`].
pub const HERMITIAN_TOL: f64 = 1e-10;

const MAX_SWEEPS: usize = 100;

/// Eigenvalues ascending, with eigenvectors as the matching columns.
pub fn hermitian_eig(a: &ComplexMatrix) -> Result<(Vec<f64>, ComplexMatrix)> {
    if !a.is_square() {
        return Err(Error::Dimension(format!(
            "eigendecomposition of non-square {}x{} matrix",
            a.rows(),
            a.cols()
        )));
    }
    let defect = a.hermiticity_defect();
    if defect > HERMITIAN_TOL * a.max_abs().max(1.0) {
        return Err(Error::Domain(format!(
            "matrix is not Hermitian (defect {defect:e})"
        )));
    }
    let n = a.rows();
    // Symmetrize exactly before rotating.
    let mut m = ComplexMatrix::from_fn(n, n, |i, j| (a.get(i, j) + a.get(j, i).conj()) * 0.5);
    let mut v = ComplexMatrix::identity(n);
    let scale = m.max_abs().max(f64::MIN_POSITIVE);

    for _ in 0..MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| m.get(i, j).norm_sqr())
            .sum();
        if off.sqrt() <= 1e-15 * scale * n as f64 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = m.get(p, q);
                let r = apq.norm();
                if r <= 1e-300 {
                    continue;
                }
                let app = m.get(p, p).re;
                let aqq = m.get(q, q).re;
                // Phase e^{-iφ} on column q makes the pivot real, then a real rotation.
                let phase = (apq / r).conj();
                let theta = 0.5 * (2.0 * r).atan2(app - aqq);
                let (s, c) = theta.sin_cos();
                // J = [[c, -s], [s e^{-iφ}, c e^{-iφ}]] acting on columns p, q.
                let j_pp = C64::new(c, 0.0);
                let j_pq = C64::new(-s, 0.0);
                let j_qp = phase * s;
                let j_qq = phase * c;
                // M ← M J
                for k in 0..n {
                    let mkp = m.get(k, p);
                    let mkq = m.get(k, q);
                    m.set(k, p, mkp * j_pp + mkq * j_qp);
                    m.set(k, q, mkp * j_pq + mkq * j_qq);
                }
                // M ← J† M
                for k in 0..n {
                    let mpk = m.get(p, k);
                    let mqk = m.get(q, k);
                    m.set(p, k, j_pp.conj() * mpk + j_qp.conj() * mqk);
                    m.set(q, k, j_pq.conj() * mpk + j_qq.conj() * mqk);
                }
                m.set(p, q, C64::new(0.0, 0.0));
                m.set(q, p, C64::new(0.0, 0.0));
                for k in 0..n {
                    let vkp = v.get(k, p);
                    let vkq = v.get(k, q);
                    v.set(k, p, vkp * j_pp + vkq * j_qp);
                    v.set(k, q, vkp * j_pq + vkq * j_qq);
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    let diag: Vec<f64> = (0..n).map(|i| m.get(i, i).re).collect();
    order.sort_by(|&i, &j| diag[i].total_cmp(&diag[j]));
    let values = order.iter().map(|&i| diag[i]).collect();
    let vectors = ComplexMatrix::from_fn(n, n, |r, c| v.get(r, order[c]));
    Ok((values, vectors))
}

/// Largest eigenvalue and a unit eigenvector for it.
pub fn top_eigenpair(a: &ComplexMatrix) -> Result<(f64, Vec<C64>)> {
    let (vals, vecs) = hermitian_eig(a)?;
    let n = vals.len();
    let v = (0..n).map(|r| vecs.get(r, n - 1)).collect();
    Ok((vals[n - 1], v))
}

/// Real symmetric eigendecomposition, eigenvalues ascending.
#[derive(Debug, Clone)]
pub struct SymmetricEigen {
    pub values: Vec<f64>,
    /// Row-major n×n; row j is the eigenvector for `values[j]`.
    pub vectors: Vec<f64>,
}

impl SymmetricEigen {
    /// `a` is row-major n×n and assumed symmetric (only used as given).
    pub fn new(a: &[f64], n: usize) -> Self {
        assert_eq!(a.len(), n * n);
        if n == 0 {
            return Self {
                values: vec![],
                vectors: vec![],
            };
        }
        let mut v = a.to_vec();
        let mut d = vec![0.0; n];
        let mut e = vec![0.0; n];
        tridiagonalize(n, &mut v, &mut d, &mut e);
        tql2(n, &mut v, &mut d, &mut e);
        Self {
            values: d,
            vectors: v,
        }
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    /// V diag(f(λ)) Vᵀ.
    pub fn reconstruct_with(&self, f: impl Fn(f64) -> f64) -> Vec<f64> {
        let n = self.dim();
        let mut out = vec![0.0; n * n];
        for k in 0..n {
            let lam = f(self.values[k]);
            if lam == 0.0 {
                continue;
            }
            let vk = &self.vectors[k * n..(k + 1) * n];
            for i in 0..n {
                let vik = vk[i] * lam;
                if vik == 0.0 {
                    continue;
                }
                let row = &mut out[i * n..(i + 1) * n];
                for (r, &x) in row.iter_mut().zip(vk) {
                    *r += vik * x;
                }
            }
        }
        out
    }
}

// Householder tridiagonalization on full symmetric storage. On return `v`
// holds Pᵀ row-major (A = P T Pᵀ), `d` the diagonal of T and e[i] = T[i][i-1].
fn tridiagonalize(n: usize, v: &mut Vec<f64>, d: &mut [f64], e: &mut [f64]) {
    let mut a = std::mem::take(v);
    let mut reflectors: Vec<(usize, Vec<f64>, f64)> = Vec::new();
    let mut p = vec![0.0; n];
    for i in (1..n).rev() {
        d[i] = a[i * n + i];
        let x = &a[i * n..i * n + i];
        let norm2: f64 = x.iter().map(|t| t * t).sum();
        if i == 1 || norm2 == 0.0 {
            e[i] = x[i - 1];
            continue;
        }
        let xl = x[i - 1];
        let alpha = if xl > 0.0 { -norm2.sqrt() } else { norm2.sqrt() };
        let mut u = x.to_vec();
        u[i - 1] -= alpha;
        let h = norm2 - alpha * xl;
        e[i] = alpha;
        for (j, pj) in p.iter_mut().enumerate().take(i) {
            let row = &a[j * n..j * n + i];
            *pj = row.iter().zip(&u).map(|(r, t)| r * t).sum::<f64>() / h;
        }
        let k = u.iter().zip(&p).map(|(t, q)| t * q).sum::<f64>() / (2.0 * h);
        for j in 0..i {
            p[j] -= k * u[j];
        }
        for j in 0..i {
            let (qj, uj) = (p[j], u[j]);
            let row = &mut a[j * n..j * n + i];
            for ((r, &uk), &qk) in row.iter_mut().zip(&u).zip(&p[..i]) {
                *r -= qj * uk + uj * qk;
            }
        }
        reflectors.push((i, u, h));
    }
    d[0] = a[0];
    e[0] = 0.0;
    // Pᵀ = H_1 ⋯ H_{n-1}, built by left-multiplying the identity.
    a.iter_mut().for_each(|t| *t = 0.0);
    for j in 0..n {
        a[j * n + j] = 1.0;
    }
    let mut w = vec![0.0; n];
    for (i, u, h) in &reflectors {
        w.iter_mut().for_each(|t| *t = 0.0);
        for (k, &uk) in u.iter().enumerate().take(*i) {
            let row = &a[k * n..(k + 1) * n];
            for (wt, &r) in w.iter_mut().zip(row) {
                *wt += uk * r;
            }
        }
        for (k, &uk) in u.iter().enumerate().take(*i) {
            let f = uk / h;
            let row = &mut a[k * n..(k + 1) * n];
            for (r, &wt) in row.iter_mut().zip(&w) {
                *r -= f * wt;
            }
        }
    }
    *v = a;
}

// Implicit QL on the tridiagonal form, accumulating into the rows of `v`
// (the transposed EISPACK layout); sorts ascending.
fn tql2(n: usize, v: &mut [f64], d: &mut [f64], e: &mut [f64]) {
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = 0.0;
    let mut f = 0.0;
    let mut tst1: f64 = 0.0;
    let eps = f64::EPSILON;
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n - 1 {
            if e[m].abs() <= eps * tst1 {
                break;
            }
            m += 1;
        }
        if m > l {
            let mut iter = 0;
            loop {
                iter += 1;
                let mut g = d[l];
                let mut p = (d[l + 1] - g) / (2.0 * e[l]);
                let mut r = p.hypot(1.0);
                if p < 0.0 {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let mut h = g - d[l];
                for di in d.iter_mut().take(n).skip(l + 2) {
                    *di -= h;
                }
                f += h;
                p = d[m];
                let mut c = 1.0;
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = 0.0;
                let mut s2 = 0.0;
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    g = c * e[i];
                    h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    let (lo, hi) = v.split_at_mut((i + 1) * n);
                    let vi = &mut lo[i * n..];
                    let vi1 = &mut hi[..n];
                    for (a, b) in vi.iter_mut().zip(vi1.iter_mut()) {
                        let h = *b;
                        *b = s * *a + c * h;
                        *a = c * *a - s * h;
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if e[l].abs() <= eps * tst1 || iter > 200 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = 0.0;
    }
    for i in 0..n.saturating_sub(1) {
        let mut k = i;
        let mut p = d[i];
        for (j, &dj) in d.iter().enumerate().skip(i + 1) {
            if dj < p {
                k = j;
                p = dj;
            }
        }
        if k != i {
            d[k] = d[i];
            d[i] = p;
            for j in 0..n {
                v.swap(i * n + j, k * n + j);
            }
        }
    }
}
