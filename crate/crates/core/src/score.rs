//! Score functions `S(x) = -d/dx log p(x)` for product designs.
//!
//! The named kinds carry fixed parameters: Gaussian(0, 1), Beta(8, 8),
//! Gamma(shape 8, scale 0.1), Student t(13), Rayleigh(1), Weibull(shape 7,
//! scale 1).

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use ndarray::{Array2, ArrayView2};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScoreKind {
    Gaussian,
    Beta,
    Gamma,
    #[serde(rename = "student_t")]
    StudentT,
    Rayleigh,
    Weibull,
}

impl ScoreKind {
    pub const ALL: [ScoreKind; 6] = [
        ScoreKind::Gaussian,
        ScoreKind::Beta,
        ScoreKind::Gamma,
        ScoreKind::StudentT,
        ScoreKind::Rayleigh,
        ScoreKind::Weibull,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ScoreKind::Gaussian => "gaussian",
            ScoreKind::Beta => "beta",
            ScoreKind::Gamma => "gamma",
            ScoreKind::StudentT => "student_t",
            ScoreKind::Rayleigh => "rayleigh",
            ScoreKind::Weibull => "weibull",
        }
    }

    /// Open support of the density.
    pub fn in_support(self, v: f64) -> bool {
        match self {
            ScoreKind::Gaussian | ScoreKind::StudentT => v.is_finite(),
            ScoreKind::Beta => v > 0.0 && v < 1.0,
            ScoreKind::Gamma | ScoreKind::Rayleigh | ScoreKind::Weibull => v > 0.0 && v.is_finite(),
        }
    }

    /// Closed-form score; `None` outside the support.
    pub fn score(self, v: f64) -> Option<f64> {
        if !self.in_support(v) {
            return None;
        }
        Some(match self {
            ScoreKind::Gaussian => v,
            ScoreKind::Beta => (14.0 * v - 7.0) / ((1.0 - v) * v),
            ScoreKind::Gamma => 10.0 - 7.0 / v,
            ScoreKind::StudentT => 14.0 * v / (13.0 + v * v),
            ScoreKind::Rayleigh => v - 1.0 / v,
            ScoreKind::Weibull => 7.0 * v.powi(6) - 6.0 / v,
        })
    }
}

impl fmt::Display for ScoreKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ScoreKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ScoreKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown design distribution `{s}`")))
    }
}

/// A user-supplied score `s(v)`, returning `None` outside the support.
#[derive(Clone)]
pub struct CustomScore {
    name: String,
    func: Arc<dyn Fn(f64) -> Option<f64> + Send + Sync>,
}

impl CustomScore {
    pub fn new(
        name: impl Into<String>,
        func: impl Fn(f64) -> Option<f64> + Send + Sync + 'static,
    ) -> Self {
        Self {
            name: name.into(),
            func: Arc::new(func),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }
}

impl fmt::Debug for CustomScore {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CustomScore")
            .field("name", &self.name)
            .finish()
    }
}

#[derive(Debug, Clone)]
pub enum ScoreSpec {
    Named(ScoreKind),
    Custom(CustomScore),
}

impl From<ScoreKind> for ScoreSpec {
    fn from(kind: ScoreKind) -> Self {
        ScoreSpec::Named(kind)
    }
}

impl ScoreSpec {
    pub fn name(&self) -> &str {
        match self {
            ScoreSpec::Named(k) => k.name(),
            ScoreSpec::Custom(c) => c.name(),
        }
    }

    fn eval(&self, v: f64) -> Option<f64> {
        let s = match self {
            ScoreSpec::Named(k) => k.score(v),
            ScoreSpec::Custom(c) => (c.func)(v),
        };
        s.filter(|s| s.is_finite())
    }
}

pub fn score_scalar(spec: &ScoreSpec, v: f64) -> Result<f64> {
    spec.eval(v)
        .ok_or_else(|| Error::Domain(format!("{v} for the {} score", spec.name())))
}

/// Entrywise score of an `n × d` design. The error names the first
/// offending entry in row-major order.
pub fn score_matrix(spec: &ScoreSpec, x: ArrayView2<'_, f64>) -> Result<Array2<f64>> {
    let mut out = Array2::zeros(x.raw_dim());
    for ((i, j), &v) in x.indexed_iter() {
        out[(i, j)] = spec.eval(v).ok_or_else(|| Error::ScoreDomain {
            kind: spec.name().to_owned(),
            row: i,
            col: j,
            value: v,
        })?;
    }
    Ok(out)
}

/// Anything that maps a design matrix to its score matrix.
pub trait DesignScore: Sync {
    fn score_matrix(&self, x: ArrayView2<'_, f64>) -> Result<Array2<f64>>;
}

impl DesignScore for ScoreSpec {
    fn score_matrix(&self, x: ArrayView2<'_, f64>) -> Result<Array2<f64>> {
        score_matrix(self, x)
    }
}

impl DesignScore for ScoreKind {
    fn score_matrix(&self, x: ArrayView2<'_, f64>) -> Result<Array2<f64>> {
        score_matrix(&ScoreSpec::Named(*self), x)
    }
}

/// Independent but not identically distributed columns, one score each.
#[derive(Debug, Clone)]
pub struct ColumnScores(pub Vec<ScoreSpec>);

impl DesignScore for ColumnScores {
    fn score_matrix(&self, x: ArrayView2<'_, f64>) -> Result<Array2<f64>> {
        if x.ncols() != self.0.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} column scores for a design with {} columns",
                self.0.len(),
                x.ncols()
            )));
        }
        let mut out = Array2::zeros(x.raw_dim());
        for ((i, j), &v) in x.indexed_iter() {
            let spec = &self.0[j];
            out[(i, j)] = spec.eval(v).ok_or_else(|| Error::ScoreDomain {
                kind: spec.name().to_owned(),
                row: i,
                col: j,
                value: v,
            })?;
        }
        Ok(out)
    }
}
