//! Error metrics, the Monte Carlo `μ` oracle, and bootstrap bands.

use ndarray::{Array1, Array2, ArrayView1, ArrayView2, Axis};
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::linalg::{matrix_norm, NormKind};
use crate::rng::{substream, tag};
use crate::score::ScoreKind;
use crate::synth::{link_derivative, DesignLaw, LinkFamily};

/// `1 − |β̂ᵀβ*| / ‖β̂‖₂`.
pub fn cosine_distance(
    beta_hat: ArrayView1<'_, f64>,
    beta_star: ArrayView1<'_, f64>,
) -> Result<f64> {
    if beta_hat.len() != beta_star.len() {
        return Err(Error::DimensionMismatch(format!(
            "estimate of length {} against truth of length {}",
            beta_hat.len(),
            beta_star.len()
        )));
    }
    let star = beta_star.dot(&beta_star).sqrt();
    if (star - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidParameter(format!(
            "truth has norm {star}, expected 1"
        )));
    }
    let norm = beta_hat.dot(&beta_hat).sqrt();
    if norm == 0.0 {
        return Err(Error::ZeroVector);
    }
    Ok((1.0 - beta_hat.dot(&beta_star).abs() / norm).max(0.0))
}

/// Sum of column cosine distances.
pub fn matrix_cosine_sum(b_hat: ArrayView2<'_, f64>, b_star: ArrayView2<'_, f64>) -> Result<f64> {
    if b_hat.dim() != b_star.dim() {
        return Err(Error::DimensionMismatch(format!(
            "{:?} vs {:?}",
            b_hat.dim(),
            b_star.dim()
        )));
    }
    let mut total = 0.0;
    for (k, (a, b)) in b_hat
        .columns()
        .into_iter()
        .zip(b_star.columns())
        .enumerate()
    {
        total += cosine_distance(a, b).map_err(|e| match e {
            Error::ZeroVector => Error::ZeroColumn(k),
            other => other,
        })?;
    }
    Ok(total)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MuEstimate {
    pub mean: f64,
    pub stderr: f64,
}

const MU_CHUNK: usize = 8192;

/// Monte Carlo mean of `f_k'(⟨x, β⟩)` over `mc_n` design draws.
pub fn mu_oracle<R: Rng + ?Sized>(
    link: &LinkFamily,
    k: usize,
    beta_star_k: ArrayView1<'_, f64>,
    design: &DesignLaw,
    mc_n: usize,
    rng: &mut R,
) -> Result<MuEstimate> {
    if mc_n < 2 {
        return Err(Error::InvalidParameter(format!("mc_n = {mc_n}")));
    }
    let d1 = beta_star_k.len();
    let (mut sum, mut sq) = (0.0, 0.0);
    let mut add = |u: f64| {
        let g = link_derivative(link, k, u);
        sum += g;
        sq += g * g;
    };
    if let DesignLaw::Iid(ScoreKind::Gaussian) = design {
        // ⟨x, β⟩ ~ N(0, ‖β‖²) exactly.
        let scale = beta_star_k.dot(&beta_star_k).sqrt();
        for _ in 0..mc_n {
            add(scale * rng.sample::<f64, _>(StandardNormal));
        }
    } else {
        let mut left = mc_n;
        while left > 0 {
            let m = left.min(MU_CHUNK);
            let x = design.sample(m, d1, rng)?;
            x.dot(&beta_star_k).iter().for_each(|&u| add(u));
            left -= m;
        }
    }
    let n = mc_n as f64;
    let mean = sum / n;
    let var = ((sq - n * mean * mean) / (n - 1.0)).max(0.0);
    Ok(MuEstimate {
        mean,
        stderr: (var / n).sqrt(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TildeNorm {
    Frobenius,
    Nuclear,
}

/// `‖B̂ − B* diag(μ)‖`.
pub fn matrix_error_vs_tilde(
    b_hat: ArrayView2<'_, f64>,
    b_star: ArrayView2<'_, f64>,
    mu: ArrayView1<'_, f64>,
    kind: TildeNorm,
) -> Result<f64> {
    if b_hat.dim() != b_star.dim() || mu.len() != b_star.ncols() {
        return Err(Error::DimensionMismatch(format!(
            "B̂ {:?}, B* {:?}, μ of length {}",
            b_hat.dim(),
            b_star.dim(),
            mu.len()
        )));
    }
    let tilde = &b_star * &mu.insert_axis(Axis(0));
    let diff = &b_hat - &tilde;
    matrix_norm(
        diff.view(),
        match kind {
            TildeNorm::Frobenius => NormKind::Fro,
            TildeNorm::Nuclear => NormKind::Nuclear,
        },
    )
}

/// One scalar metric for one replication. `k = None` marks matrix metrics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorRecord {
    pub n: usize,
    pub replication: usize,
    pub k: Option<usize>,
    pub metric: String,
    pub value: f64,
}

/// Linear interpolation between order statistics of sorted samples.
pub fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    assert!(!sorted.is_empty() && (0.0..=1.0).contains(&p));
    let h = p * (sorted.len() - 1) as f64;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

pub fn quantile(samples: &[f64], p: f64) -> f64 {
    let mut s = samples.to_vec();
    s.sort_by(f64::total_cmp);
    quantile_sorted(&s, p)
}

#[derive(Debug, Clone)]
pub enum BootstrapMode<'a> {
    /// Resample rows with replacement.
    Nonparametric,
    /// Redraw the design `x` from its law; `y` and `z` stay fixed.
    Parametric(&'a DesignLaw),
}

#[derive(Debug, Clone)]
pub struct BootstrapBands {
    pub lower: Array2<f64>,
    pub point: Array2<f64>,
    pub upper: Array2<f64>,
    pub level: f64,
    pub reps: usize,
}

/// Percentile bootstrap bands at `(1 − level)/2` and `1 − (1 − level)/2`.
/// Replicate `b` draws from a substream of `(seed, b)`, so bands do not
/// depend on scheduling.
pub fn bootstrap_ci<F>(
    estimate_fn: F,
    data: &Dataset,
    mode: BootstrapMode<'_>,
    reps: usize,
    level: f64,
    seed: u64,
) -> Result<BootstrapBands>
where
    F: Fn(&Dataset) -> Result<Array2<f64>> + Sync,
{
    if reps < 2 {
        return Err(Error::InvalidParameter(format!("reps = {reps}")));
    }
    if !(level > 0.0 && level < 1.0) {
        return Err(Error::InvalidParameter(format!("level = {level}")));
    }
    let point = estimate_fn(data)?;
    let draws: Vec<Array2<f64>> = (0..reps)
        .into_par_iter()
        .map(|b| {
            let mut rng = substream(seed, &[tag::BOOT, b as u64]);
            let resampled = match &mode {
                BootstrapMode::Nonparametric => {
                    let idx: Vec<usize> = (0..data.n())
                        .map(|_| rng.random_range(0..data.n()))
                        .collect();
                    data.select_rows(&idx)
                }
                BootstrapMode::Parametric(law) => {
                    let x = law.sample(data.n(), data.d1(), &mut rng)?;
                    Dataset::new(data.y.clone(), x, data.z.clone())?
                }
            };
            let est = estimate_fn(&resampled)?;
            if est.dim() != point.dim() {
                return Err(Error::DimensionMismatch("estimate shape changed".into()));
            }
            Ok(est)
        })
        .enumerate()
        .map(|(rep, r)| {
            r.map_err(|e| Error::Bootstrap {
                rep,
                source: Box::new(e),
            })
        })
        .collect::<Result<_>>()?;
    let alpha = (1.0 - level) / 2.0;
    let mut lower = Array2::zeros(point.raw_dim());
    let mut upper = Array2::zeros(point.raw_dim());
    let mut column = vec![0.0; reps];
    for idx in ndarray::indices(point.raw_dim()) {
        for (c, d) in column.iter_mut().zip(&draws) {
            *c = d[idx];
        }
        column.sort_by(f64::total_cmp);
        lower[idx] = quantile_sorted(&column, alpha);
        upper[idx] = quantile_sorted(&column, 1.0 - alpha);
    }
    Ok(BootstrapBands {
        lower,
        point,
        upper,
        level,
        reps,
    })
}

/// Sample mean and standard error (`0` for a single value).
pub fn mean_stderr(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

pub fn column_mu<R: Rng + ?Sized>(
    link: &LinkFamily,
    b_star: ArrayView2<'_, f64>,
    design: &DesignLaw,
    mc_n: usize,
    rng: &mut R,
) -> Result<Vec<MuEstimate>> {
    (0..b_star.ncols())
        .map(|j| mu_oracle(link, j + 1, b_star.column(j), design, mc_n, rng))
        .collect()
}

pub fn mu_means(mu: &[MuEstimate]) -> Array1<f64> {
    mu.iter().map(|m| m.mean).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimators::normalize_direction;
    use crate::rng::rng_from_seed;
    use approx::assert_abs_diff_eq;
    use ndarray::array;

    #[test]
    fn cosine_examples() {
        let star = array![0.6, 0.8];
        assert_abs_diff_eq!(cosine_distance(star.view(), star.view()).unwrap(), 0.0);
        assert_abs_diff_eq!(
            cosine_distance(array![-0.8, 0.6].view(), star.view()).unwrap(),
            1.0
        );
        assert_abs_diff_eq!(
            cosine_distance((&star * 2.0).view(), star.view()).unwrap(),
            0.0,
            epsilon = 1e-15
        );
        assert!(matches!(
            cosine_distance(array![0.0, 0.0].view(), star.view()),
            Err(Error::ZeroVector)
        ));
    }

    #[test]
    fn cosine_invariances() {
        let mut rng = rng_from_seed(1);
        for _ in 0..50 {
            let raw: Array1<f64> = (0..5)
                .map(|_| rng.sample::<f64, _>(StandardNormal))
                .collect();
            let star = &raw / raw.dot(&raw).sqrt();
            let hat: Array1<f64> = (0..5)
                .map(|_| rng.sample::<f64, _>(StandardNormal))
                .collect();
            let base = cosine_distance(hat.view(), star.view()).unwrap();
            for c in [-3.0, -0.1, 0.5, 10.0] {
                let scaled = cosine_distance((&hat * c).view(), star.view()).unwrap();
                assert_abs_diff_eq!(scaled, base, epsilon = 1e-14);
            }
            let unit = normalize_direction(hat.view()).unwrap();
            assert_abs_diff_eq!(
                cosine_distance(unit.view(), star.view()).unwrap(),
                base,
                epsilon = 1e-14
            );
        }
    }

    #[test]
    fn matrix_cosine_examples() {
        let star = array![[1.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
        assert_abs_diff_eq!(matrix_cosine_sum(star.view(), star.view()).unwrap(), 0.0);
        let mut hat = star.clone();
        hat[(0, 1)] = 0.0;
        hat[(1, 1)] = 1.0;
        assert_abs_diff_eq!(matrix_cosine_sum(hat.view(), star.view()).unwrap(), 1.0);
        let scaled = &hat * &array![[2.0, -5.0, 0.1]];
        assert_abs_diff_eq!(
            matrix_cosine_sum(scaled.view(), star.view()).unwrap(),
            1.0,
            epsilon = 1e-15
        );
        let zero = array![[1.0, 0.0], [0.0, 0.0]];
        let st = array![[1.0, 1.0], [0.0, 0.0]];
        assert!(matches!(
            matrix_cosine_sum(zero.view(), st.view()),
            Err(Error::ZeroColumn(1))
        ));
    }

    #[test]
    fn mu_identity_link_is_one() {
        let law = DesignLaw::Iid(ScoreKind::Gaussian);
        let m = mu_oracle(
            &LinkFamily::Identity,
            1,
            array![1.0, 0.0].view(),
            &law,
            1000,
            &mut rng_from_seed(2),
        )
        .unwrap();
        assert_eq!(m.mean, 1.0);
        assert_eq!(m.stderr, 0.0);
    }

    #[test]
    fn mu_quadratic_family_is_about_k() {
        let law = DesignLaw::Iid(ScoreKind::Gaussian);
        let beta = array![0.6, 0.8, 0.0];
        for k in [1usize, 5, 20] {
            let m = mu_oracle(
                &LinkFamily::F4,
                k,
                beta.view(),
                &law,
                1_000_000,
                &mut rng_from_seed(3),
            )
            .unwrap();
            assert!(
                (m.mean - k as f64).abs() <= 0.02 * k as f64,
                "k={k} mu={}",
                m.mean
            );
        }
        let a = mu_oracle(
            &LinkFamily::F1,
            2,
            beta.view(),
            &law,
            5000,
            &mut rng_from_seed(4),
        )
        .unwrap();
        let b = mu_oracle(
            &LinkFamily::F1,
            2,
            beta.view(),
            &law,
            5000,
            &mut rng_from_seed(4),
        )
        .unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn gaussian_shortcut_matches_full_sampling() {
        let beta = array![0.3, -0.5, 0.2, 0.1];
        let fast = DesignLaw::Iid(ScoreKind::Gaussian);
        let slow = DesignLaw::Columns(vec![
            crate::synth::Mixture::two_group_normal(1, 1, 0.0)
                .unwrap();
            4
        ]);
        for link in [LinkFamily::F1, LinkFamily::F5] {
            let a =
                mu_oracle(&link, 3, beta.view(), &fast, 200_000, &mut rng_from_seed(9)).unwrap();
            let b = mu_oracle(
                &link,
                3,
                beta.view(),
                &slow,
                200_000,
                &mut rng_from_seed(10),
            )
            .unwrap();
            let se = (a.stderr.powi(2) + b.stderr.powi(2)).sqrt();
            assert!(
                (a.mean - b.mean).abs() <= 4.0 * se + 1e-12,
                "{} vs {}",
                a.mean,
                b.mean
            );
        }
    }

    #[test]
    fn tilde_error_examples() {
        let star = array![[1.0, 0.0], [0.0, 1.0]];
        let mu = array![2.0, 0.5];
        let tilde = array![[2.0, 0.0], [0.0, 0.5]];
        assert_eq!(
            matrix_error_vs_tilde(tilde.view(), star.view(), mu.view(), TildeNorm::Frobenius)
                .unwrap(),
            0.0
        );
        let zero = Array2::zeros((2, 2));
        let e = matrix_error_vs_tilde(
            zero.view(),
            star.view(),
            array![1.0, 1.0].view(),
            TildeNorm::Frobenius,
        )
        .unwrap();
        assert_abs_diff_eq!(e, 2f64.sqrt(), epsilon = 1e-15);
        let n = matrix_error_vs_tilde(
            zero.view(),
            star.view(),
            array![1.0, 1.0].view(),
            TildeNorm::Nuclear,
        )
        .unwrap();
        assert_abs_diff_eq!(n, 2.0, epsilon = 1e-12);
    }

    #[test]
    fn tilde_error_triangle_inequality() {
        let mut rng = rng_from_seed(5);
        let mut g =
            |r, c| Array2::from_shape_simple_fn((r, c), || rng.sample::<f64, _>(StandardNormal));
        for _ in 0..50 {
            let star = g(4, 3);
            let mu = g(1, 3).row(0).to_owned();
            let (p, q) = (g(4, 3), g(4, 3));
            let tilde = &star * &mu.view().insert_axis(Axis(0));
            let hat = &tilde + &p + &q;
            for kind in [TildeNorm::Frobenius, TildeNorm::Nuclear] {
                let total =
                    matrix_error_vs_tilde(hat.view(), star.view(), mu.view(), kind).unwrap();
                let one = matrix_error_vs_tilde((&tilde + &p).view(), star.view(), mu.view(), kind)
                    .unwrap();
                let two = matrix_error_vs_tilde((&tilde + &q).view(), star.view(), mu.view(), kind)
                    .unwrap();
                assert!(total <= one + two + 1e-9);
            }
        }
    }

    #[test]
    fn quantile_convention() {
        let s = [3.0, 1.0, 2.0, 4.0];
        assert_eq!(quantile(&s, 0.0), 1.0);
        assert_eq!(quantile(&s, 1.0), 4.0);
        assert_abs_diff_eq!(quantile(&s, 0.5), 2.5);
        assert_abs_diff_eq!(
            quantile(&(0..=100).map(f64::from).collect::<Vec<_>>(), 0.025),
            2.5
        );
    }

    fn small_data() -> Dataset {
        let mut rng = rng_from_seed(6);
        let x = Array2::from_shape_simple_fn((40, 2), || rng.sample::<f64, _>(StandardNormal));
        let z = Array2::ones((40, 1));
        let y = x.column(0).to_owned() + x.column(1).mapv(|v| 0.5 * v);
        Dataset::new(y, x, z).unwrap()
    }

    fn mean_moment(d: &Dataset) -> Result<Array2<f64>> {
        Ok((d.x.t().dot(&d.y) / d.n() as f64).insert_axis(Axis(1)))
    }

    #[test]
    fn bootstrap_bands() {
        let d = small_data();
        let b = bootstrap_ci(mean_moment, &d, BootstrapMode::Nonparametric, 200, 0.95, 7).unwrap();
        assert!(b.lower.iter().zip(b.upper.iter()).all(|(l, u)| l <= u));
        let again =
            bootstrap_ci(mean_moment, &d, BootstrapMode::Nonparametric, 200, 0.95, 7).unwrap();
        assert_eq!(b.lower, again.lower);
        assert_eq!(b.upper, again.upper);
        let constant = |_: &Dataset| Ok(array![[1.0, 2.0]]);
        let c = bootstrap_ci(constant, &d, BootstrapMode::Nonparametric, 10, 0.9, 1).unwrap();
        assert_eq!(c.lower, c.point);
        assert_eq!(c.upper, c.point);
        let law = DesignLaw::Iid(ScoreKind::Gaussian);
        let p = bootstrap_ci(
            mean_moment,
            &d,
            BootstrapMode::Parametric(&law),
            50,
            0.95,
            8,
        )
        .unwrap();
        assert!(p.lower.iter().zip(p.upper.iter()).all(|(l, u)| l <= u));
        assert!(bootstrap_ci(mean_moment, &d, BootstrapMode::Nonparametric, 1, 0.95, 7).is_err());
    }

    #[test]
    fn bootstrap_errors_carry_the_rep() {
        let d = small_data();
        let failing = |ds: &Dataset| {
            if ds.y[0] == d.y[0] {
                Ok(array![[0.0]])
            } else {
                Err(Error::Singular("test".into()))
            }
        };
        let err = bootstrap_ci(failing, &d, BootstrapMode::Nonparametric, 5, 0.9, 3).unwrap_err();
        assert!(matches!(err, Error::Bootstrap { .. }));
    }

    #[test]
    fn mean_stderr_values() {
        let (m, s) = mean_stderr(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(m, 2.5);
        assert_abs_diff_eq!(s, (5.0f64 / 12.0).sqrt(), epsilon = 1e-15);
    }
}
