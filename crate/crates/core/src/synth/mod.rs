//! Synthetic designs, covariates, parameters and responses.
//!
//! Samplers (all seed-deterministic through the caller's RNG):
//! - Gaussian, Beta, Gamma, Student t, Weibull: `rand_distr`.
//! - Rayleigh(1): inverse CDF `√(−2 ln U)`.
//! - Rademacher `z`: one fair bit per entry.
//! - Copula `z`: Cholesky factor of the correlation applied to i.i.d.
//!   normals, then mapped coordinatewise through `Φ` and the t₇ quantile.

mod links;
pub mod quantile;

use ndarray::{Array1, Array2, ArrayView2};
use rand::seq::index::sample as sample_indices;
use rand::Rng;
use rand_distr::{Beta, Distribution, Gamma, StandardNormal, StudentT, Weibull};
use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::data::{CoefficientMatrix, Dataset, ModelSpec};
use crate::error::{Error, Result};
use crate::linalg::{asymmetry, cholesky, inverse, random_orthogonal};
use crate::score::{ColumnScores, CustomScore, DesignScore, ScoreKind, ScoreSpec};

pub use links::{link_derivative, link_eval, CustomLink, LinkFamily};
pub use quantile::{normal_cdf, normal_quantile, normal_to_t, t_cdf, t_quantile};

/// Draws one entry from a named design distribution.
pub fn sample_scalar<R: Rng + ?Sized>(kind: ScoreKind, rng: &mut R) -> f64 {
    match kind {
        ScoreKind::Gaussian => rng.sample(StandardNormal),
        ScoreKind::Beta => Beta::new(8.0, 8.0).unwrap().sample(rng),
        ScoreKind::Gamma => Gamma::new(8.0, 0.1).unwrap().sample(rng),
        ScoreKind::StudentT => StudentT::new(13.0).unwrap().sample(rng),
        ScoreKind::Rayleigh => {
            let u: f64 = rng.random();
            (-2.0 * (1.0 - u).ln()).sqrt()
        }
        ScoreKind::Weibull => Weibull::new(1.0, 7.0).unwrap().sample(rng),
    }
}

/// `n × d1` i.i.d. design.
pub fn sample_design<R: Rng + ?Sized>(
    kind: ScoreKind,
    n: usize,
    d1: usize,
    rng: &mut R,
) -> Array2<f64> {
    Array2::from_shape_simple_fn((n, d1), || sample_scalar(kind, rng))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MixtureBase {
    Normal,
    StudentT { nu: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MixtureComponent {
    pub weight: f64,
    pub location: f64,
    pub base: MixtureBase,
}

/// Finite location mixture of unit-scale normal or t components.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Mixture {
    pub components: Vec<MixtureComponent>,
}

impl Mixture {
    pub fn new(components: Vec<MixtureComponent>) -> Result<Self> {
        let total: f64 = components.iter().map(|c| c.weight).sum();
        if components.is_empty() || components.iter().any(|c| !(c.weight > 0.0)) {
            return Err(Error::InvalidParameter(
                "mixture weights must be positive".into(),
            ));
        }
        let components = components
            .into_iter()
            .map(|c| MixtureComponent {
                weight: c.weight / total,
                ..c
            })
            .collect();
        Ok(Self { components })
    }

    /// `(n1/n) N(0, 1) + (n2/n) N(offset, 1)`: a two-group confounder.
    pub fn two_group_normal(n1: usize, n2: usize, offset: f64) -> Result<Self> {
        Self::new(vec![
            MixtureComponent {
                weight: n1 as f64,
                location: 0.0,
                base: MixtureBase::Normal,
            },
            MixtureComponent {
                weight: n2 as f64,
                location: offset,
                base: MixtureBase::Normal,
            },
        ])
    }

    /// `½ t_ν + ½ (offset + t_ν)`: a two-site confounder.
    pub fn two_site_t(nu: f64, offset: f64) -> Result<Self> {
        let base = MixtureBase::StudentT { nu };
        Self::new(vec![
            MixtureComponent {
                weight: 0.5,
                location: 0.0,
                base,
            },
            MixtureComponent {
                weight: 0.5,
                location: offset,
                base,
            },
        ])
    }

    fn log_base_density(base: MixtureBase, u: f64) -> f64 {
        match base {
            MixtureBase::Normal => -0.5 * u * u - 0.5 * (2.0 * std::f64::consts::PI).ln(),
            MixtureBase::StudentT { nu } => {
                ln_gamma(0.5 * (nu + 1.0))
                    - ln_gamma(0.5 * nu)
                    - 0.5 * (nu * std::f64::consts::PI).ln()
                    - 0.5 * (nu + 1.0) * (1.0 + u * u / nu).ln()
            }
        }
    }

    fn base_score(base: MixtureBase, u: f64) -> f64 {
        match base {
            MixtureBase::Normal => u,
            MixtureBase::StudentT { nu } => (nu + 1.0) * u / (nu + u * u),
        }
    }

    pub fn log_density(&self, x: f64) -> f64 {
        let logs: Vec<f64> = self
            .components
            .iter()
            .map(|c| c.weight.ln() + Self::log_base_density(c.base, x - c.location))
            .collect();
        let top = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        top + logs.iter().map(|l| (l - top).exp()).sum::<f64>().ln()
    }

    /// `−p'(x)/p(x)`: component scores averaged with posterior weights.
    pub fn score(&self, x: f64) -> f64 {
        let logs: Vec<f64> = self
            .components
            .iter()
            .map(|c| c.weight.ln() + Self::log_base_density(c.base, x - c.location))
            .collect();
        let top = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let mut num = 0.0;
        let mut den = 0.0;
        for (c, l) in self.components.iter().zip(logs) {
            let r = (l - top).exp();
            num += r * Self::base_score(c.base, x - c.location);
            den += r;
        }
        num / den
    }

    pub fn score_spec(&self) -> ScoreSpec {
        let m = self.clone();
        ScoreSpec::Custom(CustomScore::new("mixture", move |v| {
            v.is_finite().then(|| m.score(v))
        }))
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let mut u: f64 = rng.random();
        let mut chosen = self.components.last().unwrap();
        for c in &self.components {
            if u < c.weight {
                chosen = c;
                break;
            }
            u -= c.weight;
        }
        let base = match chosen.base {
            MixtureBase::Normal => rng.sample(StandardNormal),
            MixtureBase::StudentT { nu } => StudentT::new(nu).unwrap().sample(rng),
        };
        chosen.location + base
    }
}

/// Distribution of the design `x`.
#[derive(Debug, Clone)]
pub enum DesignLaw {
    /// i.i.d. entries from a named distribution.
    Iid(ScoreKind),
    /// Independent columns, one mixture each.
    Columns(Vec<Mixture>),
}

impl DesignLaw {
    pub fn sample<R: Rng + ?Sized>(&self, n: usize, d1: usize, rng: &mut R) -> Result<Array2<f64>> {
        match self {
            DesignLaw::Iid(kind) => Ok(sample_design(*kind, n, d1, rng)),
            DesignLaw::Columns(cols) => {
                if cols.len() != d1 {
                    return Err(Error::DimensionMismatch(format!(
                        "{} mixture columns for d1 = {d1}",
                        cols.len()
                    )));
                }
                let mut x = Array2::zeros((n, d1));
                for i in 0..n {
                    for (j, m) in cols.iter().enumerate() {
                        x[(i, j)] = m.sample(rng);
                    }
                }
                Ok(x)
            }
        }
    }
}

impl DesignScore for DesignLaw {
    fn score_matrix(&self, x: ArrayView2<'_, f64>) -> Result<Array2<f64>> {
        match self {
            DesignLaw::Iid(kind) => kind.score_matrix(x),
            DesignLaw::Columns(cols) => {
                ColumnScores(cols.iter().map(Mixture::score_spec).collect()).score_matrix(x)
            }
        }
    }
}

pub fn sample_z_independent<R: Rng + ?Sized>(n: usize, d2: usize, rng: &mut R) -> Array2<f64> {
    Array2::from_shape_simple_fn((n, d2), || if rng.random::<bool>() { 1.0 } else { -1.0 })
}

/// Gaussian copula with t marginals.
#[derive(Debug, Clone, PartialEq)]
pub struct CopulaSpec {
    pub correlation: Array2<f64>,
    pub nu: f64,
}

impl CopulaSpec {
    pub fn new(correlation: Array2<f64>, nu: f64) -> Result<Self> {
        let d = correlation.nrows();
        if correlation.ncols() != d {
            return Err(Error::DimensionMismatch(
                "correlation must be square".into(),
            ));
        }
        if asymmetry(correlation.view()) > 1e-12 {
            return Err(Error::NotSymmetric(asymmetry(correlation.view())));
        }
        if correlation.diag().iter().any(|&v| (v - 1.0).abs() > 1e-12) {
            return Err(Error::InvalidParameter(
                "correlation diagonal must be 1".into(),
            ));
        }
        cholesky(correlation.view())?;
        Ok(Self { correlation, nu })
    }

    /// `ρ 11ᵀ + (1 − ρ) I` with t₇ marginals.
    pub fn equicorrelated(d2: usize, rho: f64) -> Result<Self> {
        let mut c = Array2::from_elem((d2, d2), rho);
        c.diag_mut().fill(1.0);
        Self::new(c, 7.0)
    }

    /// Correlation of `Θ⁻¹` for the tridiagonal precision `Θ` with unit
    /// diagonal and `off` on the first off-diagonals; t₇ marginals.
    pub fn tridiagonal_precision(d2: usize, off: f64) -> Result<Self> {
        Self::new(tridiagonal_correlation(d2, off)?, 7.0)
    }
}

pub fn tridiagonal_correlation(d2: usize, off: f64) -> Result<Array2<f64>> {
    let mut theta = Array2::<f64>::eye(d2);
    for i in 0..d2.saturating_sub(1) {
        theta[(i, i + 1)] = off;
        theta[(i + 1, i)] = off;
    }
    let cov = inverse(theta.view())?;
    let sd: Array1<f64> = cov.diag().mapv(f64::sqrt);
    let mut corr = Array2::zeros((d2, d2));
    for i in 0..d2 {
        for j in 0..d2 {
            corr[(i, j)] = if i == j {
                1.0
            } else {
                cov[(i, j)] / (sd[i] * sd[j])
            };
        }
    }
    // Symmetrize away inversion round-off.
    let corr = (&corr + &corr.t()) * 0.5;
    Ok(corr)
}

pub fn sample_z_copula<R: Rng + ?Sized>(
    spec: &CopulaSpec,
    n: usize,
    rng: &mut R,
) -> Result<Array2<f64>> {
    let l = cholesky(spec.correlation.view())?;
    let d = l.nrows();
    let w = Array2::from_shape_simple_fn((n, d), || rng.sample::<f64, _>(StandardNormal));
    let g = w.dot(&l.t());
    Ok(g.mapv(|v| normal_to_t(v, spec.nu)))
}

/// Distribution of the covariate `z`.
#[derive(Debug, Clone)]
pub enum ZLaw {
    /// i.i.d. Rademacher entries.
    Independent,
    Copula(CopulaSpec),
    /// `z ≡ 1`, which reduces the model to a sum of single-index terms.
    Ones,
}

impl ZLaw {
    pub fn sample<R: Rng + ?Sized>(&self, n: usize, d2: usize, rng: &mut R) -> Result<Array2<f64>> {
        match self {
            ZLaw::Independent => Ok(sample_z_independent(n, d2, rng)),
            ZLaw::Copula(spec) => {
                if spec.correlation.nrows() != d2 {
                    return Err(Error::DimensionMismatch(format!(
                        "copula of dimension {} for d2 = {d2}",
                        spec.correlation.nrows()
                    )));
                }
                sample_z_copula(spec, n, rng)
            }
            ZLaw::Ones => Ok(Array2::ones((n, d2))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Structure {
    /// `s` nonzeros per column, values `±1/√s`. With `identified`, the first
    /// coordinate is always in the support with value `+1/√s`.
    ColumnSparse {
        s: usize,
        #[serde(default)]
        identified: bool,
    },
    /// `U Λ Vᵀ` with Haar `U`, `V` and `r` diagonal slots of `Λ` set to `±1/√r`.
    LowRank { r: usize },
    /// `s` nonzeros over the whole matrix, values `±1/√s`.
    FullySparse { s: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ParamGenSpec {
    pub structure: Structure,
    pub d1: usize,
    pub d2: usize,
}

impl ParamGenSpec {
    pub fn validate(&self) -> Result<()> {
        let ok = match self.structure {
            Structure::ColumnSparse { s, .. } => s >= 1 && s <= self.d1,
            Structure::LowRank { r } => r >= 1 && r <= self.d1.min(self.d2),
            Structure::FullySparse { s } => s >= 1 && s <= self.d1 * self.d2,
        };
        if ok && self.d1 >= 1 && self.d2 >= 1 {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!("{:?}", self)))
        }
    }
}

fn random_sign<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    if rng.random::<bool>() {
        1.0
    } else {
        -1.0
    }
}

pub fn gen_parameters<R: Rng + ?Sized>(
    spec: &ParamGenSpec,
    rng: &mut R,
) -> Result<CoefficientMatrix> {
    spec.validate()?;
    let (d1, d2) = (spec.d1, spec.d2);
    let mut b = Array2::zeros((d1, d2));
    match spec.structure {
        Structure::ColumnSparse { s, identified } => {
            let value = 1.0 / (s as f64).sqrt();
            for j in 0..d2 {
                if identified {
                    b[(0, j)] = value;
                    for i in sample_indices(rng, d1 - 1, s - 1) {
                        b[(i + 1, j)] = value * random_sign(rng);
                    }
                } else {
                    for i in sample_indices(rng, d1, s) {
                        b[(i, j)] = value * random_sign(rng);
                    }
                }
            }
        }
        Structure::LowRank { r } => {
            let u = random_orthogonal(d1, rng);
            let v = random_orthogonal(d2, rng);
            let value = 1.0 / (r as f64).sqrt();
            let mut lambda = Array2::zeros((d1, d2));
            for i in sample_indices(rng, d1.min(d2), r) {
                lambda[(i, i)] = value * random_sign(rng);
            }
            b = u.dot(&lambda).dot(&v.t());
        }
        Structure::FullySparse { s } => {
            let value = 1.0 / (s as f64).sqrt();
            for flat in sample_indices(rng, d1 * d2, s) {
                b[(flat / d2, flat % d2)] = value * random_sign(rng);
            }
        }
    }
    CoefficientMatrix::new(b)
}

/// `y_i = Σ_j Z_ij f_j(⟨X_i, β_j⟩)` without noise.
pub fn mean_response(
    link: &LinkFamily,
    b: ArrayView2<'_, f64>,
    x: ArrayView2<'_, f64>,
    z: ArrayView2<'_, f64>,
) -> Array1<f64> {
    let u = x.dot(&b);
    let mut y = Array1::zeros(x.nrows());
    for i in 0..x.nrows() {
        let mut acc = 0.0;
        for j in 0..b.ncols() {
            acc += z[(i, j)] * link_eval(link, j + 1, u[(i, j)]);
        }
        y[i] = acc;
    }
    y
}

/// Generated dataset with its noise draws kept for checking.
#[derive(Debug, Clone)]
pub struct Generated {
    pub data: Dataset,
    pub noise: Array1<f64>,
}

/// Draws `X`, then `Z`, then `ε ~ N(0, noise_sd²)`, in that order.
pub fn gen_dataset_with_noise<R: Rng + ?Sized>(
    model: &ModelSpec,
    b: &CoefficientMatrix,
    n: usize,
    rng: &mut R,
) -> Result<Generated> {
    model.validate()?;
    let (d1, d2) = (b.d1(), b.d2());
    let x = model.design.sample(n, d1, rng)?;
    let z = model.z_law.sample(n, d2, rng)?;
    let noise: Array1<f64> = (0..n)
        .map(|_| model.noise_sd * rng.sample::<f64, _>(StandardNormal))
        .collect();
    let y = mean_response(&model.link, b.matrix().view(), x.view(), z.view()) + &noise;
    Ok(Generated {
        data: Dataset::new(y, x, z)?,
        noise,
    })
}

pub fn gen_dataset<R: Rng + ?Sized>(
    model: &ModelSpec,
    b: &CoefficientMatrix,
    n: usize,
    rng: &mut R,
) -> Result<Dataset> {
    gen_dataset_with_noise(model, b, n, rng).map(|g| g.data)
}
