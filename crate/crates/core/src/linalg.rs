//! Dense kernels: Jacobi eigensolver, SVD, Gauss-Jordan inversion, norms.
//!
//! Everything here works at desk scale (dimensions up to a few hundred).
//! The SVD is computed from the eigendecomposition of the Hermitian dilation
//! `[[0, A], [Aᵀ, 0]]`, so the Jacobi sweep is the only iterative routine.

use ndarray::{s, Array1, Array2, ArrayView2, Axis};
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const JACOBI_TOL: f64 = 1e-12;
const JACOBI_MAX_SWEEPS: usize = 100;
const SYMMETRY_TOL: f64 = 1e-10;
const PIVOT_TOL: f64 = 1e-12;

#[derive(Debug, Clone)]
pub struct EigResult {
    /// Descending.
    pub eigenvalues: Array1<f64>,
    /// Column `i` pairs with `eigenvalues[i]`.
    pub eigenvectors: Array2<f64>,
}

impl EigResult {
    /// `Q f(Λ) Qᵀ`.
    pub fn apply(&self, f: impl Fn(f64) -> f64) -> Array2<f64> {
        let q = &self.eigenvectors;
        let mut scaled = q.clone();
        for (mut col, &lam) in scaled.axis_iter_mut(Axis(1)).zip(self.eigenvalues.iter()) {
            col *= f(lam);
        }
        scaled.dot(&q.t())
    }
}

#[derive(Debug, Clone)]
pub struct Svd {
    /// `d1 × r` with orthonormal columns, `r = min(d1, d2)`.
    pub u: Array2<f64>,
    /// Descending, nonnegative.
    pub sigma: Array1<f64>,
    /// `d2 × r` with orthonormal columns.
    pub v: Array2<f64>,
}

impl Svd {
    pub fn reassemble(&self, sigma: &Array1<f64>) -> Array2<f64> {
        let mut us = self.u.clone();
        for (mut col, &s) in us.axis_iter_mut(Axis(1)).zip(sigma.iter()) {
            col *= s;
        }
        us.dot(&self.v.t())
    }
}

pub fn max_abs(a: ArrayView2<'_, f64>) -> f64 {
    a.iter().fold(0.0, |m, v| m.max(v.abs()))
}

pub fn asymmetry(a: ArrayView2<'_, f64>) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..a.nrows() {
        for j in (i + 1)..a.ncols() {
            worst = worst.max((a[(i, j)] - a[(j, i)]).abs());
        }
    }
    worst
}

/// Cyclic Jacobi rotations on a row-major `n × n` buffer. On return `a`
/// holds the eigenvalues on its diagonal and `v` the accumulated rotations.
fn jacobi(a: &mut [f64], v: &mut [f64], n: usize) -> Result<()> {
    let scale = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    if scale == 0.0 {
        return Ok(());
    }
    for _ in 0..JACOBI_MAX_SWEEPS {
        let mut off = 0.0;
        for p in 0..n {
            for q in (p + 1)..n {
                off += 2.0 * a[p * n + q] * a[p * n + q];
            }
        }
        if off.sqrt() <= JACOBI_TOL * scale {
            return Ok(());
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[q * n + q] - a[p * n + p]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (1.0 + theta * theta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
                a[p * n + q] = 0.0;
                a[q * n + p] = 0.0;
                for k in 0..n {
                    let vkp = v[k * n + p];
                    let vkq = v[k * n + q];
                    v[k * n + p] = c * vkp - s * vkq;
                    v[k * n + q] = s * vkp + c * vkq;
                }
            }
        }
    }
    Err(Error::NoConvergence {
        routine: "jacobi eigensolver",
        iterations: JACOBI_MAX_SWEEPS,
    })
}

/// Eigendecomposition of a symmetric matrix, eigenvalues descending.
pub fn sym_eig(a: ArrayView2<'_, f64>) -> Result<EigResult> {
    let n = a.nrows();
    if a.ncols() != n {
        return Err(Error::DimensionMismatch(format!(
            "sym_eig on a {}×{} matrix",
            n,
            a.ncols()
        )));
    }
    let asym = asymmetry(a);
    if asym > SYMMETRY_TOL * max_abs(a).max(1.0) {
        return Err(Error::NotSymmetric(asym));
    }
    let mut buf = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            buf[i * n + j] = 0.5 * (a[(i, j)] + a[(j, i)]);
        }
    }
    let mut vecs = vec![0.0; n * n];
    for i in 0..n {
        vecs[i * n + i] = 1.0;
    }
    jacobi(&mut buf, &mut vecs, n)?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| buf[j * n + j].total_cmp(&buf[i * n + i]));
    let eigenvalues = order.iter().map(|&i| buf[i * n + i]).collect();
    let mut eigenvectors = Array2::zeros((n, n));
    for (dst, &src) in order.iter().enumerate() {
        for k in 0..n {
            eigenvectors[(k, dst)] = vecs[k * n + src];
        }
    }
    Ok(EigResult {
        eigenvalues,
        eigenvectors,
    })
}

/// `[[0, A], [Aᵀ, 0]]`.
pub fn hermitian_dilation(a: ArrayView2<'_, f64>) -> Array2<f64> {
    let (d1, d2) = a.dim();
    let mut h = Array2::zeros((d1 + d2, d1 + d2));
    h.slice_mut(s![..d1, d1..]).assign(&a);
    h.slice_mut(s![d1.., ..d1]).assign(&a.t());
    h
}

/// Orthonormalizes `cols` in place (two passes of modified Gram-Schmidt
/// against the earlier columns), then fills columns flagged in `missing`
/// with the first standard basis vectors that survive projection.
fn orthonormalize_columns(m: &mut Array2<f64>, missing: &[bool]) {
    let (rows, cols) = m.dim();
    let mut basis_next = 0;
    for j in 0..cols {
        if missing[j] {
            loop {
                let mut e = Array1::zeros(rows);
                e[basis_next % rows] = 1.0;
                basis_next += 1;
                m.column_mut(j).assign(&e);
                if project_out(m, j) > 1e-6 {
                    break;
                }
            }
        } else {
            project_out(m, j);
        }
    }
}

fn project_out(m: &mut Array2<f64>, j: usize) -> f64 {
    let original = m.column(j).dot(&m.column(j)).sqrt();
    for _ in 0..2 {
        for i in 0..j {
            let proj = m.column(i).dot(&m.column(j));
            let ci = m.column(i).to_owned();
            m.column_mut(j).scaled_add(-proj, &ci);
        }
    }
    let norm = m.column(j).dot(&m.column(j)).sqrt();
    if norm > 0.0 {
        m.column_mut(j).mapv_inplace(|x| x / norm);
    }
    if original > 0.0 {
        norm / original
    } else {
        0.0
    }
}

/// Thin SVD via the Hermitian dilation: the eigenpair `(σ, (u; v)/√2)` of
/// the dilation carries a singular triplet of `A`.
pub fn svd(a: ArrayView2<'_, f64>) -> Result<Svd> {
    let (d1, d2) = a.dim();
    let r = d1.min(d2);
    if let Some(((i, j), _)) = a.indexed_iter().find(|(_, v)| !v.is_finite()) {
        return Err(Error::NonFinite {
            what: "svd input",
            index: format!("({i},{j})"),
        });
    }
    let eig = sym_eig(hermitian_dilation(a).view())?;
    let top = eig.eigenvalues.get(0).copied().unwrap_or(0.0).max(0.0);
    let null_tol = 1e-10 * top;

    let mut u = Array2::zeros((d1, r));
    let mut v = Array2::zeros((d2, r));
    let mut sigma = Array1::zeros(r);
    let mut missing = vec![false; r];
    for i in 0..r {
        let s_i = eig.eigenvalues[i].max(0.0);
        sigma[i] = s_i;
        let q = eig.eigenvectors.column(i);
        if s_i <= null_tol || s_i == 0.0 {
            missing[i] = true;
            continue;
        }
        let top_block = q.slice(s![..d1]);
        let bottom_block = q.slice(s![d1..]);
        let nu = top_block.dot(&top_block).sqrt();
        let nv = bottom_block.dot(&bottom_block).sqrt();
        if nu == 0.0 || nv == 0.0 {
            missing[i] = true;
            continue;
        }
        u.column_mut(i).assign(&(&top_block / nu));
        v.column_mut(i).assign(&(&bottom_block / nv));
    }
    orthonormalize_columns(&mut u, &missing);
    orthonormalize_columns(&mut v, &missing);
    Ok(Svd { u, sigma, v })
}

/// Gauss-Jordan inversion with partial pivoting and one refinement step.
pub fn inverse(a: ArrayView2<'_, f64>) -> Result<Array2<f64>> {
    let n = a.nrows();
    if a.ncols() != n {
        return Err(Error::DimensionMismatch(format!(
            "inverse of a {}×{} matrix",
            n,
            a.ncols()
        )));
    }
    let scale = max_abs(a);
    if n == 0 {
        return Ok(Array2::zeros((0, 0)));
    }
    if scale == 0.0 {
        return Err(Error::Singular("zero matrix".into()));
    }
    let mut m = a.to_owned();
    let mut inv = Array2::<f64>::eye(n);
    for col in 0..n {
        let pivot_row = (col..n)
            .max_by(|&i, &j| m[(i, col)].abs().total_cmp(&m[(j, col)].abs()))
            .unwrap();
        let pivot = m[(pivot_row, col)];
        if pivot.abs() < PIVOT_TOL * scale {
            return Err(Error::Singular(format!(
                "pivot {pivot:e} in column {col} below {PIVOT_TOL:e}·‖A‖_max"
            )));
        }
        if pivot_row != col {
            for k in 0..n {
                m.swap((pivot_row, k), (col, k));
                inv.swap((pivot_row, k), (col, k));
            }
        }
        let p = m[(col, col)];
        m.row_mut(col).mapv_inplace(|x| x / p);
        inv.row_mut(col).mapv_inplace(|x| x / p);
        for row in 0..n {
            if row == col {
                continue;
            }
            let factor = m[(row, col)];
            if factor == 0.0 {
                continue;
            }
            for k in 0..n {
                m[(row, k)] -= factor * m[(col, k)];
                inv[(row, k)] -= factor * inv[(col, k)];
            }
        }
    }
    // X ← X + X (I − A X)
    let residual = Array2::<f64>::eye(n) - a.dot(&inv);
    inv = &inv + &inv.dot(&residual);
    Ok(inv)
}

/// Lower Cholesky factor of a symmetric positive definite matrix.
pub fn cholesky(a: ArrayView2<'_, f64>) -> Result<Array2<f64>> {
    let n = a.nrows();
    if a.ncols() != n {
        return Err(Error::DimensionMismatch(format!(
            "cholesky of a {}×{} matrix",
            n,
            a.ncols()
        )));
    }
    let mut l = Array2::<f64>::zeros((n, n));
    for j in 0..n {
        let mut d = a[(j, j)];
        for k in 0..j {
            d -= l[(j, k)] * l[(j, k)];
        }
        if !(d > 0.0) {
            return Err(Error::Singular(format!(
                "not positive definite (pivot {j})"
            )));
        }
        let d = d.sqrt();
        l[(j, j)] = d;
        for i in (j + 1)..n {
            let mut v = a[(i, j)];
            for k in 0..j {
                v -= l[(i, k)] * l[(j, k)];
            }
            l[(i, j)] = v / d;
        }
    }
    Ok(l)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NormKind {
    Max,
    Fro,
    Nuclear,
    Spectral,
    /// Max column absolute sum.
    Induced1,
    /// Max row absolute sum.
    InducedInf,
    /// Sum of absolute entries.
    L11,
}

pub fn matrix_norm(a: ArrayView2<'_, f64>, kind: NormKind) -> Result<f64> {
    Ok(match kind {
        NormKind::Max => max_abs(a),
        NormKind::Fro => a.iter().map(|x| x * x).sum::<f64>().sqrt(),
        NormKind::L11 => a.iter().map(|x| x.abs()).sum(),
        NormKind::Induced1 => a
            .axis_iter(Axis(1))
            .map(|c| c.iter().map(|x| x.abs()).sum::<f64>())
            .fold(0.0, f64::max),
        NormKind::InducedInf => a
            .axis_iter(Axis(0))
            .map(|r| r.iter().map(|x| x.abs()).sum::<f64>())
            .fold(0.0, f64::max),
        NormKind::Nuclear => svd(a)?.sigma.sum(),
        NormKind::Spectral => svd(a)?.sigma.iter().copied().fold(0.0, f64::max),
    })
}

/// Haar-distributed orthogonal matrix: Gram-Schmidt QR of a Gaussian matrix
/// with `diag(R) > 0`.
pub fn random_orthogonal<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Array2<f64> {
    assert!(d >= 1, "random_orthogonal needs d >= 1");
    let mut q = Array2::from_shape_simple_fn((d, d), || rng.sample::<f64, _>(StandardNormal));
    // Gram-Schmidt normalizes by a positive norm, so R has a positive diagonal.
    orthonormalize_columns(&mut q, &vec![false; d]);
    q
}
