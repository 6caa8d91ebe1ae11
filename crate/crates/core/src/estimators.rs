//! Stein estimators for the sparse vector, low-rank and sparse matrix cases,
//! with the default tuning regimes.
//!
//! Every estimator is the closed-form minimizer of a separable penalized
//! least-squares objective built from an empirical Stein moment, so no
//! iterative solver is involved.

use ndarray::{Array1, Array2, ArrayView1, ArrayView2, Axis};
use serde::{Deserialize, Serialize};

use crate::data::{Dataset, TuningParams};
use crate::error::{Error, Result};
use crate::precision::PrecisionEstimate;
use crate::score::DesignScore;
use crate::shrinkage::{
    hard_truncate_scalar, rank_one_soft_weight, soft_threshold_entrywise, soft_threshold_singular,
    soft_threshold_vector,
};

#[derive(Debug, Clone, PartialEq)]
pub struct SparseVectorResult {
    /// Estimate of `μ_k β*_k`.
    pub beta_hat: Array1<f64>,
    /// The unshrunk truncated moment.
    pub moment: Array1<f64>,
    /// 1-based index.
    pub k: usize,
    /// `None` when the estimate is zero or its first entry is zero.
    pub beta_normalized: Option<Array1<f64>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Penalty {
    Nuclear,
    L11,
}

#[derive(Debug, Clone)]
pub struct MatrixResult {
    /// Estimate of `B* diag(μ)`.
    pub b_hat: Array2<f64>,
    /// `moment · Ω̂` before shrinkage.
    pub input: Array2<f64>,
    pub penalty: Penalty,
    pub lambda_used: f64,
    pub precision_used: PrecisionEstimate,
}

fn check_lambda(lambda: f64) -> Result<()> {
    if lambda.is_finite() && lambda >= 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("lambda = {lambda}")))
    }
}

fn check_tau(tau: f64) -> Result<()> {
    if tau > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("tau = {tau}")))
    }
}

/// `n⁻¹ Σ_i y̌_i Ž_ik Š(X_i)` with one threshold `τ` for all three factors.
pub fn sparse_vector_moment<S: DesignScore + ?Sized>(
    data: &Dataset,
    k: usize,
    tau: f64,
    spec: &S,
) -> Result<Array1<f64>> {
    if k == 0 || k > data.d2() {
        return Err(Error::InvalidParameter(format!(
            "k = {k} with d2 = {}",
            data.d2()
        )));
    }
    check_tau(tau)?;
    let s = spec.score_matrix(data.x.view())?;
    let mut m = Array1::zeros(data.d1());
    for i in 0..data.n() {
        let w =
            hard_truncate_scalar(data.y[i], tau) * hard_truncate_scalar(data.z[(i, k - 1)], tau);
        if w == 0.0 {
            continue;
        }
        for (acc, &v) in m.iter_mut().zip(s.row(i)) {
            *acc += w * hard_truncate_scalar(v, tau);
        }
    }
    Ok(m / data.n() as f64)
}

pub fn sparse_vector_estimate<S: DesignScore + ?Sized>(
    data: &Dataset,
    k: usize,
    lambda: f64,
    tau: f64,
    spec: &S,
) -> Result<SparseVectorResult> {
    check_lambda(lambda)?;
    let moment = sparse_vector_moment(data, k, tau, spec)?;
    let beta_hat = soft_threshold_vector(moment.view(), lambda / 2.0);
    let beta_normalized = normalize_direction(beta_hat.view()).ok();
    Ok(SparseVectorResult {
        beta_hat,
        moment,
        k,
        beta_normalized,
    })
}

/// `(1 / nκ₁) Σ_i Φ(κ₁ y_i S(X_i) Z_iᵀ)`. Each summand is rank one, so `Φ`
/// reduces to a scalar reweighting (see [`rank_one_soft_weight`]).
pub fn cross_moment_soft<S: DesignScore + ?Sized>(
    data: &Dataset,
    kappa1: f64,
    spec: &S,
) -> Result<Array2<f64>> {
    if !(kappa1.is_finite() && kappa1 > 0.0) {
        return Err(Error::InvalidParameter(format!("kappa1 = {kappa1}")));
    }
    let s = spec.score_matrix(data.x.view())?;
    let mut w = Array1::zeros(data.n());
    for i in 0..data.n() {
        let a = data.y[i].abs() * norm(s.row(i));
        w[i] = data.y[i] * rank_one_soft_weight(a, norm(data.z.row(i)), kappa1);
    }
    // Σ_i w_i S_i Z_iᵀ = Sᵀ diag(w) Z
    let wz = &data.z * &w.insert_axis(Axis(1));
    Ok(s.t().dot(&wz) / (data.n() as f64 * kappa1))
}

/// The same moment through the general eigendecomposition route; slower,
/// kept as an independent check.
pub fn cross_moment_soft_dilation<S: DesignScore + ?Sized>(
    data: &Dataset,
    kappa1: f64,
    spec: &S,
) -> Result<Array2<f64>> {
    let s = spec.score_matrix(data.x.view())?;
    let mut acc = Array2::zeros((data.d1(), data.d2()));
    for i in 0..data.n() {
        let sy = s.row(i).mapv(|v| v * data.y[i]).insert_axis(Axis(1));
        let outer = sy.dot(&data.z.row(i).insert_axis(Axis(0)));
        acc += &crate::shrinkage::soft_truncate_matrix(outer.view(), kappa1)?;
    }
    Ok(acc / (data.n() as f64 * kappa1))
}

/// `(1/n) Σ_i y̌_i Š(X_i) Ž_iᵀ`.
pub fn cross_moment_hard<S: DesignScore + ?Sized>(
    data: &Dataset,
    tau: f64,
    spec: &S,
) -> Result<Array2<f64>> {
    check_tau(tau)?;
    let s = spec
        .score_matrix(data.x.view())?
        .mapv(|v| hard_truncate_scalar(v, tau));
    let mut m = Array2::zeros((data.d1(), data.d2()));
    // Accumulated in the same order as `sparse_vector_moment`, so the two
    // agree bit for bit when z ≡ 1 and d2 = 1.
    for i in 0..data.n() {
        let y = hard_truncate_scalar(data.y[i], tau);
        for j in 0..data.d2() {
            let w = y * hard_truncate_scalar(data.z[(i, j)], tau);
            if w == 0.0 {
                continue;
            }
            for (acc, &v) in m.column_mut(j).iter_mut().zip(s.row(i)) {
                *acc += w * v;
            }
        }
    }
    Ok(m / data.n() as f64)
}

fn check_omega(data: &Dataset, omega: &PrecisionEstimate) -> Result<()> {
    if omega.omega.dim() != (data.d2(), data.d2()) {
        return Err(Error::DimensionMismatch(format!(
            "precision of dimension {:?} for d2 = {}",
            omega.omega.dim(),
            data.d2()
        )));
    }
    Ok(())
}

/// Singular-value shrinkage of an already formed `moment · Ω̂`.
pub fn lowrank_from_input(
    input: Array2<f64>,
    lambda: f64,
    omega: PrecisionEstimate,
) -> Result<MatrixResult> {
    check_lambda(lambda)?;
    let b_hat = soft_threshold_singular(input.view(), lambda / 2.0)?;
    Ok(MatrixResult {
        b_hat,
        input,
        penalty: Penalty::Nuclear,
        lambda_used: lambda,
        precision_used: omega,
    })
}

/// Entrywise shrinkage of an already formed `moment · Ω̂`.
pub fn sparse_matrix_from_input(
    input: Array2<f64>,
    lambda: f64,
    omega: PrecisionEstimate,
) -> Result<MatrixResult> {
    check_lambda(lambda)?;
    let b_hat = soft_threshold_entrywise(input.view(), lambda / 2.0);
    Ok(MatrixResult {
        b_hat,
        input,
        penalty: Penalty::L11,
        lambda_used: lambda,
        precision_used: omega,
    })
}

pub fn lowrank_estimate<S: DesignScore + ?Sized>(
    data: &Dataset,
    lambda: f64,
    kappa1: f64,
    spec: &S,
    omega: PrecisionEstimate,
) -> Result<MatrixResult> {
    check_omega(data, &omega)?;
    let input = cross_moment_soft(data, kappa1, spec)?.dot(&omega.omega);
    lowrank_from_input(input, lambda, omega)
}

pub fn sparse_matrix_estimate<S: DesignScore + ?Sized>(
    data: &Dataset,
    lambda: f64,
    tau: f64,
    spec: &S,
    omega: PrecisionEstimate,
) -> Result<MatrixResult> {
    check_omega(data, &omega)?;
    let input = cross_moment_hard(data, tau, spec)?.dot(&omega.omega);
    sparse_matrix_from_input(input, lambda, omega)
}

fn norm(v: ArrayView1<'_, f64>) -> f64 {
    v.dot(&v).sqrt()
}

/// `sign(β̂₁) β̂ / ‖β̂‖₂`.
pub fn normalize_direction(beta_hat: ArrayView1<'_, f64>) -> Result<Array1<f64>> {
    let n = norm(beta_hat);
    if n == 0.0 {
        return Err(Error::ZeroVector);
    }
    if beta_hat[0] == 0.0 {
        return Err(Error::ZeroFirstCoordinate);
    }
    let scale = beta_hat[0].signum() / n;
    Ok(beta_hat.mapv(|v| v * scale))
}

/// Column-wise [`normalize_direction`].
pub fn normalize_columns(b: ArrayView2<'_, f64>) -> Result<Array2<f64>> {
    let mut out = b.to_owned();
    for (j, mut col) in out.columns_mut().into_iter().enumerate() {
        let unit = normalize_direction(col.view()).map_err(|e| match e {
            Error::ZeroVector => Error::ZeroColumn(j),
            other => other,
        })?;
        col.assign(&unit);
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    SparseVectorThm4,
    LowrankThm5,
    SparseMatrixThm8,
    SimSparseVector,
    SimLowrank,
    SimSparseMatrix,
}

impl Regime {
    pub const ALL: [Regime; 6] = [
        Regime::SparseVectorThm4,
        Regime::LowrankThm5,
        Regime::SparseMatrixThm8,
        Regime::SimSparseVector,
        Regime::SimLowrank,
        Regime::SimSparseMatrix,
    ];
}

/// Published tuning formulas, natural logarithms throughout.
///
/// `m_p` is the moment bound: `M₆` for the hard-truncated regimes, `M₄` for
/// the soft-truncated one. The `sparse_matrix_thm8` `γ` uses `‖Ω*‖₁ = 1`.
pub fn default_tuning(
    regime: Regime,
    n: usize,
    d1: usize,
    d2: usize,
    m_p: f64,
) -> Result<TuningParams> {
    if n < 2 || d1 == 0 || d2 == 0 || !(m_p > 0.0 && m_p.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "default tuning needs n >= 2, d1, d2 >= 1, m_p > 0 (got n={n}, d1={d1}, d2={d2}, m_p={m_p})"
        )));
    }
    let nf = n as f64;
    let l12 = ((d1 * d2) as f64).ln();
    let dsum = (d1 + d2) as f64;
    let lsum = dsum.ln();
    let l2 = (d2 as f64).ln();
    let mut t = TuningParams::new(0.0);
    t.m_p = m_p;
    match regime {
        Regime::SparseVectorThm4 => {
            t.lambda = 76.0 * (m_p * l12 / nf).sqrt();
            t.tau = (m_p * nf / l12).powf(1.0 / 6.0) / 2.0;
        }
        Regime::LowrankThm5 => {
            t.kappa1 = Some((2.0 * lsum / (nf * dsum * m_p.powf(1.5))).sqrt());
            t.lambda = 16.0 * m_p.powf(0.75) * (dsum * lsum / nf).sqrt();
            t.kappa2 = Some((2.0 * l2 / (nf * d2 as f64 * m_p.sqrt())).sqrt());
        }
        Regime::SparseMatrixThm8 => {
            t.lambda = 76.0 * (m_p * l12 / nf).sqrt();
            t.tau = (m_p * nf / l12).powf(1.0 / 6.0) / 2.0;
            t.gamma = Some(12.0 * (m_p * l2 / nf).sqrt());
            t.tau_precision = (m_p * nf / l2).powf(0.25) / 2.0;
        }
        Regime::SimSparseVector => {
            t.lambda = 30.0 * (l12 / nf).sqrt();
            t.tau = 2.0 * (nf / l12).powf(1.0 / 6.0);
        }
        Regime::SimLowrank => {
            t.kappa1 = Some(2.0 * (lsum / (nf * dsum)).sqrt());
            t.lambda = 12.0 * (dsum * lsum / nf).sqrt();
            t.kappa2 = Some(2.0 * (l2 / (nf * d2 as f64)).sqrt());
        }
        Regime::SimSparseMatrix => {
            t.lambda = 10.0 * (l12 / nf).sqrt();
            t.tau = 2.0 * (nf / l12).powf(1.0 / 6.0);
            t.gamma = Some(10.0 * (l2 / nf).sqrt());
            t.tau_precision = 2.0 * (nf / l2).powf(0.25);
        }
    }
    // ln 1 = 0 makes some τ infinite for d2 = 1, which means no truncation.
    if t.tau.is_nan() {
        t.tau = f64::INFINITY;
    }
    if t.tau_precision.is_nan() {
        t.tau_precision = f64::INFINITY;
    }
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{matrix_norm, svd, NormKind};
    use crate::rng::rng_from_seed;
    use crate::score::{ScoreKind, ScoreSpec};
    use approx::assert_abs_diff_eq;
    use ndarray::array;
    use rand::Rng;
    use rand_distr::StandardNormal;

    fn gaussian(rows: usize, cols: usize, rng: &mut impl Rng) -> Array2<f64> {
        Array2::from_shape_simple_fn((rows, cols), || rng.sample::<f64, _>(StandardNormal))
    }

    fn random_data(n: usize, d1: usize, d2: usize, seed: u64) -> Dataset {
        let mut rng = rng_from_seed(seed);
        let x = gaussian(n, d1, &mut rng);
        let z = gaussian(n, d2, &mut rng);
        let y = gaussian(n, 1, &mut rng).column(0).mapv(|v| 3.0 * v);
        Dataset::new(y, x, z).unwrap()
    }

    const G: ScoreSpec = ScoreSpec::Named(ScoreKind::Gaussian);

    #[test]
    fn sparse_vector_single_observation() {
        let d = Dataset::new(array![2.0], array![[1.0, 0.0]], array![[1.0]]).unwrap();
        let r = sparse_vector_estimate(&d, 1, 1.0, f64::INFINITY, &G).unwrap();
        assert_eq!(r.beta_hat, array![1.5, 0.0]);
        assert_eq!(r.beta_normalized, Some(array![1.0, 0.0]));
    }

    #[test]
    fn zero_penalty_is_the_moment() {
        let d = random_data(30, 4, 2, 1);
        let r = sparse_vector_estimate(&d, 2, 0.0, f64::INFINITY, &G).unwrap();
        let mut m = Array1::zeros(4);
        for i in 0..30 {
            m = m + d.x.row(i).mapv(|v| v * d.y[i] * d.z[(i, 1)]);
        }
        m /= 30.0;
        for (a, b) in r.beta_hat.iter().zip(m.iter()) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-12);
        }
    }

    #[test]
    fn index_out_of_range() {
        let d = random_data(5, 2, 2, 2);
        assert!(sparse_vector_estimate(&d, 0, 0.1, 1.0, &G).is_err());
        assert!(sparse_vector_estimate(&d, 3, 0.1, 1.0, &G).is_err());
    }

    #[test]
    fn score_domain_propagates() {
        let d = Dataset::new(array![1.0], array![[-1.0]], array![[1.0]]).unwrap();
        let err = sparse_vector_estimate(&d, 1, 0.0, f64::INFINITY, &ScoreKind::Rayleigh);
        assert!(matches!(err, Err(Error::ScoreDomain { .. })));
    }

    fn subgradient_ok(b: f64, m: f64, lambda: f64) -> bool {
        if b == 0.0 {
            (2.0 * (b - m)).abs() <= lambda + 1e-10
        } else {
            (2.0 * (b - m) + lambda * b.signum()).abs() <= 1e-10
        }
    }

    #[test]
    fn closed_forms_satisfy_subgradient_conditions() {
        let mut rng = rng_from_seed(3);
        for seed in 0..100u64 {
            let d = random_data(20, 6, 3, 100 + seed);
            let lambda = rng.random_range(0.0..3.0);
            let tau = rng.random_range(0.5..4.0);
            let r = sparse_vector_estimate(&d, 1 + (seed as usize % 3), lambda, tau, &G).unwrap();
            for (b, m) in r.beta_hat.iter().zip(r.moment.iter()) {
                assert!(subgradient_ok(*b, *m, lambda));
            }
            let mr = sparse_matrix_estimate(&d, lambda, tau, &G, PrecisionEstimate::identity(3))
                .unwrap();
            for (b, m) in mr.b_hat.iter().zip(mr.input.iter()) {
                assert!(subgradient_ok(*b, *m, lambda));
            }
        }
    }

    #[test]
    fn lowrank_spectrum_is_shrunk() {
        for seed in 0..20u64 {
            let d = random_data(25, 5, 4, 200 + seed);
            let r = lowrank_estimate(&d, 0.4, 0.3, &G, PrecisionEstimate::identity(4)).unwrap();
            let before = svd(r.input.view()).unwrap().sigma;
            let after = svd(r.b_hat.view()).unwrap().sigma;
            for (a, b) in after.iter().zip(before.iter()) {
                assert_abs_diff_eq!(*a, (b - 0.2).max(0.0), epsilon = 1e-9);
            }
        }
    }

    #[test]
    fn matrix_examples() {
        let omega = PrecisionEstimate::identity(2);
        let r = lowrank_from_input(array![[3.0, 0.0], [0.0, 1.0]], 4.0, omega.clone()).unwrap();
        for (a, b) in r.b_hat.iter().zip([1.0, 0.0, 0.0, 0.0]) {
            assert_abs_diff_eq!(*a, b, epsilon = 1e-12);
        }
        let r = lowrank_from_input(array![[3.0, 0.0], [0.0, 1.0]], 6.0, omega).unwrap();
        assert!(r.b_hat.iter().all(|v| v.abs() < 1e-12));
        let r = sparse_matrix_from_input(array![[3.0, -0.5]], 2.0, PrecisionEstimate::identity(2))
            .unwrap();
        assert_eq!(r.b_hat, array![[2.0, 0.0]]);
    }

    #[test]
    fn zero_penalty_matrix_estimates_are_the_moments() {
        let d = random_data(15, 3, 2, 4);
        let id = PrecisionEstimate::identity(2);
        let soft = cross_moment_soft(&d, 0.7, &G).unwrap();
        let lr = lowrank_estimate(&d, 0.0, 0.7, &G, id.clone()).unwrap();
        for (a, b) in lr.b_hat.iter().zip(soft.iter()) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-10);
        }
        let hard = cross_moment_hard(&d, 1.5, &G).unwrap();
        let sm = sparse_matrix_estimate(&d, 0.0, 1.5, &G, id).unwrap();
        assert_eq!(sm.b_hat, hard);
    }

    #[test]
    fn cross_moment_examples() {
        let d = Dataset::new(array![1.0], array![[2.0]], array![[1.0]]).unwrap();
        assert_abs_diff_eq!(
            cross_moment_soft(&d, 1.0, &G).unwrap()[(0, 0)],
            5f64.ln(),
            epsilon = 1e-12
        );
        let d = Dataset::new(array![3.0], array![[1.0, 4.0]], array![[1.0]]).unwrap();
        assert_eq!(
            cross_moment_hard(&d, 2.0, &G).unwrap(),
            array![[0.0], [0.0]]
        );
        let d = Dataset::new(array![1.0], array![[1.0, 4.0]], array![[1.0]]).unwrap();
        assert_eq!(
            cross_moment_hard(&d, 2.0, &G).unwrap(),
            array![[1.0], [0.0]]
        );
        let zero = Dataset::new(
            Array1::zeros(3),
            Array2::zeros((3, 2)),
            Array2::zeros((3, 2)),
        )
        .unwrap();
        assert!(cross_moment_soft(&zero, 1.0, &G)
            .unwrap()
            .iter()
            .all(|&v| v == 0.0));
    }

    #[test]
    fn soft_moment_routes_agree() {
        let d = random_data(12, 4, 3, 5);
        for kappa in [1e-3, 0.2, 1.0, 5.0] {
            let a = cross_moment_soft(&d, kappa, &G).unwrap();
            let b = cross_moment_soft_dilation(&d, kappa, &G).unwrap();
            for (u, v) in a.iter().zip(b.iter()) {
                assert_abs_diff_eq!(u, v, epsilon = 1e-9 * (1.0 + u.abs()));
            }
        }
    }

    #[test]
    fn small_kappa_is_the_plain_moment() {
        let d = random_data(40, 3, 2, 6);
        let soft = cross_moment_soft(&d, 1e-6, &G).unwrap();
        let plain = cross_moment_hard(&d, f64::INFINITY, &G).unwrap();
        for (a, b) in soft.iter().zip(plain.iter()) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-4);
        }
    }

    #[test]
    fn shrinkage_is_monotone_in_lambda() {
        let d = random_data(30, 6, 3, 7);
        let id = PrecisionEstimate::identity(3);
        let mut prev = (f64::INFINITY, f64::INFINITY, f64::INFINITY);
        for lambda in [0.0, 0.1, 0.3, 0.8, 2.0, 5.0] {
            let v = sparse_vector_estimate(&d, 1, lambda, 3.0, &G)
                .unwrap()
                .beta_hat;
            let l1 = v.iter().map(|x| x.abs()).sum::<f64>();
            let lr = lowrank_estimate(&d, lambda, 0.5, &G, id.clone())
                .unwrap()
                .b_hat;
            let nuc = matrix_norm(lr.view(), NormKind::Nuclear).unwrap();
            let sm = sparse_matrix_estimate(&d, lambda, 3.0, &G, id.clone())
                .unwrap()
                .b_hat;
            let l11 = matrix_norm(sm.view(), NormKind::L11).unwrap();
            assert!(l1 <= prev.0 + 1e-12 && nuc <= prev.1 + 1e-9 && l11 <= prev.2 + 1e-12);
            prev = (l1, nuc, l11);
        }
    }

    #[test]
    fn single_index_special_case_agrees() {
        let mut d = random_data(25, 5, 1, 8);
        d.z.fill(1.0);
        for (lambda, tau) in [(0.0, f64::INFINITY), (0.3, 2.0), (1.0, 1.0)] {
            let v = sparse_vector_estimate(&d, 1, lambda, tau, &G)
                .unwrap()
                .beta_hat;
            let m = sparse_matrix_estimate(&d, lambda, tau, &G, PrecisionEstimate::identity(1))
                .unwrap()
                .b_hat;
            assert_eq!(v, m.column(0));
        }
    }

    #[test]
    fn scale_equivariance() {
        let input = array![[1.0, -2.0, 0.3], [0.05, 4.0, -0.7]];
        let id = PrecisionEstimate::identity(3);
        for c in [0.5, 2.0, 7.0] {
            let a = sparse_matrix_from_input(input.clone(), 0.8, id.clone())
                .unwrap()
                .b_hat;
            let b = sparse_matrix_from_input(&input * c, 0.8 * c, id.clone())
                .unwrap()
                .b_hat;
            for (u, v) in a.iter().zip(b.iter()) {
                assert_abs_diff_eq!(c * u, *v, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn precision_dimension_is_checked() {
        let d = random_data(5, 2, 2, 9);
        assert!(sparse_matrix_estimate(&d, 0.1, 1.0, &G, PrecisionEstimate::identity(3)).is_err());
    }

    #[test]
    fn normalization_examples() {
        let n = normalize_direction(array![3.0, 4.0].view()).unwrap();
        assert_abs_diff_eq!(n[0], 0.6, epsilon = 1e-15);
        assert_abs_diff_eq!(n[1], 0.8, epsilon = 1e-15);
        let n = normalize_direction(array![-0.6, 0.8].view()).unwrap();
        assert_eq!(n, array![0.6, -0.8]);
        assert!(matches!(
            normalize_direction(array![0.0, 0.0].view()),
            Err(Error::ZeroVector)
        ));
        assert!(matches!(
            normalize_direction(array![0.0, 1.0].view()),
            Err(Error::ZeroFirstCoordinate)
        ));
    }

    #[test]
    fn tuning_formulas() {
        let t = default_tuning(Regime::SparseVectorThm4, 10_000, 10, 10, 1.0).unwrap();
        assert_abs_diff_eq!(t.lambda, 1.630934179979904, epsilon = 1e-12);
        assert_abs_diff_eq!(t.tau, 1.7992674511225177, epsilon = 1e-12);
        let t = default_tuning(Regime::SimSparseVector, 2000, 100, 20, 1.0).unwrap();
        assert_abs_diff_eq!(t.lambda, 1.8494339963334556, epsilon = 1e-12);
        for regime in Regime::ALL {
            let a = default_tuning(regime, 1000, 30, 10, 2.0).unwrap();
            let b = default_tuning(regime, 4000, 30, 10, 2.0).unwrap();
            assert_abs_diff_eq!(b.lambda, a.lambda / 2.0, epsilon = 1e-12);
            assert!(a.validate().is_ok());
        }
        assert!(default_tuning(Regime::SimLowrank, 1, 3, 3, 1.0).is_err());
    }
}
