//! Datasets, coefficient matrices, model and tuning descriptions.

use ndarray::{Array1, Array2, Axis};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::synth::{DesignLaw, LinkFamily, ZLaw};

/// `n` observations of `(y, x ∈ R^{d1}, z ∈ R^{d2})`, stored row-major by
/// observation.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub y: Array1<f64>,
    pub x: Array2<f64>,
    pub z: Array2<f64>,
}

impl Dataset {
    pub fn new(y: Array1<f64>, x: Array2<f64>, z: Array2<f64>) -> Result<Self> {
        validate_dataset(Dataset { y, x, z })
    }

    pub fn n(&self) -> usize {
        self.y.len()
    }

    pub fn d1(&self) -> usize {
        self.x.ncols()
    }

    pub fn d2(&self) -> usize {
        self.z.ncols()
    }

    /// Copy with each `z` column shifted to sample mean zero.
    pub fn center_z(&self) -> Dataset {
        let mut z = self.z.clone();
        if let Some(mean) = self.z.mean_axis(Axis(0)) {
            z -= &mean;
        }
        Dataset {
            y: self.y.clone(),
            x: self.x.clone(),
            z,
        }
    }

    /// Rows `idx` (with repetition) as a new dataset.
    pub fn select_rows(&self, idx: &[usize]) -> Dataset {
        Dataset {
            y: self.y.select(Axis(0), idx),
            x: self.x.select(Axis(0), idx),
            z: self.z.select(Axis(0), idx),
        }
    }
}

pub fn validate_dataset(data: Dataset) -> Result<Dataset> {
    let n = data.y.len();
    if n == 0 {
        return Err(Error::DimensionMismatch(
            "dataset has no observations".into(),
        ));
    }
    if data.x.nrows() != n || data.z.nrows() != n {
        return Err(Error::DimensionMismatch(format!(
            "y has {n} rows, X has {}, Z has {}",
            data.x.nrows(),
            data.z.nrows()
        )));
    }
    if let Some(i) = data.y.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite {
            what: "y",
            index: format!("{i}"),
        });
    }
    for (what, m) in [("X", &data.x), ("Z", &data.z)] {
        if let Some(((i, j), _)) = m.indexed_iter().find(|(_, v)| !v.is_finite()) {
            return Err(Error::NonFinite {
                what,
                index: format!("({i},{j})"),
            });
        }
    }
    Ok(data)
}

/// The `d1 × d2` coefficient matrix; column `j` is the index vector `β_j`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientMatrix {
    b: Array2<f64>,
    identified: bool,
}

impl CoefficientMatrix {
    pub fn new(b: Array2<f64>) -> Result<Self> {
        if let Some(((i, j), _)) = b.indexed_iter().find(|(_, v)| !v.is_finite()) {
            return Err(Error::NonFinite {
                what: "coefficients",
                index: format!("({i},{j})"),
            });
        }
        Ok(Self {
            b,
            identified: false,
        })
    }

    /// Rescales every column to unit norm with a positive first entry.
    pub fn identified(b: Array2<f64>) -> Result<Self> {
        let mut b = Self::new(b)?.b;
        for (j, mut col) in b.columns_mut().into_iter().enumerate() {
            let norm = col.dot(&col).sqrt();
            if norm == 0.0 {
                return Err(Error::ZeroColumn(j));
            }
            if col[0] == 0.0 {
                return Err(Error::ZeroFirstCoordinate);
            }
            let scale = col[0].signum() / norm;
            col.mapv_inplace(|x| x * scale);
        }
        Ok(Self {
            b,
            identified: true,
        })
    }

    pub fn matrix(&self) -> &Array2<f64> {
        &self.b
    }

    pub fn into_matrix(self) -> Array2<f64> {
        self.b
    }

    pub fn is_identified(&self) -> bool {
        self.identified
    }

    pub fn d1(&self) -> usize {
        self.b.nrows()
    }

    pub fn d2(&self) -> usize {
        self.b.ncols()
    }
}

#[derive(Debug, Clone)]
pub struct ModelSpec {
    pub link: LinkFamily,
    pub design: DesignLaw,
    pub z_law: ZLaw,
    pub noise_sd: f64,
}

impl ModelSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.noise_sd.is_finite() && self.noise_sd >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "noise_sd = {}",
                self.noise_sd
            )));
        }
        Ok(())
    }
}

/// Penalty, truncation and precision tuning for one estimator call.
///
/// `kappa1`, `kappa2` and `gamma` are only present for regimes that use
/// them. `tau = ∞` disables hard truncation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TuningParams {
    pub lambda: f64,
    #[serde(default = "infinite", with = "crate::io::float_or_inf")]
    pub tau: f64,
    #[serde(default)]
    pub kappa1: Option<f64>,
    #[serde(default)]
    pub kappa2: Option<f64>,
    #[serde(default)]
    pub gamma: Option<f64>,
    /// Truncation level for the covariance fed to CLIME.
    #[serde(default = "infinite", with = "crate::io::float_or_inf")]
    pub tau_precision: f64,
    #[serde(default = "one")]
    pub m_p: f64,
}

fn infinite() -> f64 {
    f64::INFINITY
}

fn one() -> f64 {
    1.0
}

impl TuningParams {
    pub fn new(lambda: f64) -> Self {
        Self {
            lambda,
            tau: f64::INFINITY,
            kappa1: None,
            kappa2: None,
            gamma: None,
            tau_precision: f64::INFINITY,
            m_p: 1.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str, v: f64| Err(Error::InvalidParameter(format!("{what} = {v}")));
        if !(self.lambda.is_finite() && self.lambda >= 0.0) {
            return bad("lambda", self.lambda);
        }
        for (what, v) in [("tau", self.tau), ("tau_precision", self.tau_precision)] {
            if !(v > 0.0) || v.is_nan() {
                return bad(what, v);
            }
        }
        for (what, v) in [("kappa1", self.kappa1), ("kappa2", self.kappa2)] {
            if let Some(v) = v {
                if !(v.is_finite() && v > 0.0) {
                    return bad(what, v);
                }
            }
        }
        if let Some(g) = self.gamma {
            if !(g.is_finite() && g >= 0.0) {
                return bad("gamma", g);
            }
        }
        if !(self.m_p.is_finite() && self.m_p > 0.0) {
            return bad("m_p", self.m_p);
        }
        Ok(())
    }
}
