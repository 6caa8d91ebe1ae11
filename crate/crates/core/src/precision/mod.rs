//! Covariance and precision estimates for heavy-tailed `z`.
//!
//! Two routes: invert the soft-truncated covariance (low `d2`), or run CLIME
//! on the hard-truncated covariance (high `d2`, sparse precision).

pub mod lp;

use ndarray::{Array1, Array2, ArrayView2, Axis};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{asymmetry, inverse, max_abs};
use crate::shrinkage::{hard_truncate, phi};
use lp::LinearProgram;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PrecisionMethod {
    Identity,
    InverseSoft,
    Clime,
}

#[derive(Debug, Clone)]
pub struct PrecisionEstimate {
    pub omega: Array2<f64>,
    pub method: PrecisionMethod,
    /// `‖Σ̂ Ω̂ − I‖_max`; `None` for the identity plug-in.
    pub residual: Option<f64>,
    /// `‖Ω̂ − Ω̂ᵀ‖_max`. CLIME output is not symmetrized.
    pub asymmetry: f64,
}

impl PrecisionEstimate {
    pub fn identity(d2: usize) -> Self {
        Self {
            omega: Array2::eye(d2),
            method: PrecisionMethod::Identity,
            residual: None,
            asymmetry: 0.0,
        }
    }

    pub fn dim(&self) -> usize {
        self.omega.nrows()
    }
}

fn feasibility_residual(sigma: ArrayView2<'_, f64>, omega: ArrayView2<'_, f64>) -> f64 {
    let d = sigma.nrows();
    max_abs((sigma.dot(&omega) - Array2::<f64>::eye(d)).view())
}

/// `(1 / nκ) Σ_i Φ(κ Z_i Z_iᵀ)`. Each term is rank one with spectrum
/// `{‖Z_i‖², 0, …}`, so `Φ(κ Z_i Z_iᵀ) = φ(κ‖Z_i‖²)/‖Z_i‖² · Z_i Z_iᵀ`.
pub fn soft_truncated_covariance(z: ArrayView2<'_, f64>, kappa2: f64) -> Result<Array2<f64>> {
    if !(kappa2 > 0.0 && kappa2.is_finite()) {
        return Err(Error::InvalidParameter(format!("kappa2 = {kappa2}")));
    }
    let n = z.nrows();
    if n == 0 {
        return Err(Error::DimensionMismatch("no observations".into()));
    }
    let weights: Array1<f64> = z
        .axis_iter(Axis(0))
        .map(|row| {
            let sq = row.dot(&row);
            if sq == 0.0 {
                0.0
            } else {
                phi(kappa2 * sq) / sq
            }
        })
        .collect();
    let weighted = &z * &weights.insert_axis(Axis(1));
    let mut sigma = weighted.t().dot(&z) / (n as f64 * kappa2);
    symmetrize(&mut sigma);
    Ok(sigma)
}

fn symmetrize(m: &mut Array2<f64>) {
    let d = m.nrows();
    for i in 0..d {
        for j in (i + 1)..d {
            let avg = 0.5 * (m[(i, j)] + m[(j, i)]);
            m[(i, j)] = avg;
            m[(j, i)] = avg;
        }
    }
}

/// `Ω̂ = Σ̂⁻¹` with `Σ̂` the soft-truncated covariance.
pub fn precision_inverse(z: ArrayView2<'_, f64>, kappa2: f64) -> Result<PrecisionEstimate> {
    let sigma = soft_truncated_covariance(z, kappa2)?;
    let omega = inverse(sigma.view()).map_err(|e| match e {
        Error::Singular(msg) => Error::Singular(format!(
            "soft-truncated covariance of {} observations in dimension {} ({msg})",
            z.nrows(),
            z.ncols()
        )),
        other => other,
    })?;
    let residual = feasibility_residual(sigma.view(), omega.view());
    Ok(PrecisionEstimate {
        asymmetry: asymmetry(omega.view()),
        omega,
        method: PrecisionMethod::InverseSoft,
        residual: Some(residual),
    })
}

/// `(1/n) Σ_i Ž_i Ž_iᵀ` with entries of `Z_i` above `τ` in magnitude zeroed.
pub fn hard_truncated_covariance(z: ArrayView2<'_, f64>, tau: f64) -> Result<Array2<f64>> {
    let n = z.nrows();
    if n == 0 {
        return Err(Error::DimensionMismatch("no observations".into()));
    }
    let mut zt = z.to_owned();
    for mut row in zt.axis_iter_mut(Axis(0)) {
        let t = hard_truncate(row.view(), tau);
        row.assign(&t);
    }
    let mut sigma = zt.t().dot(&zt) / n as f64;
    symmetrize(&mut sigma);
    Ok(sigma)
}

/// `min ‖l‖₁ s.t. ‖S l − e_j‖_∞ ≤ γ` via the split `l = l⁺ − l⁻`.
pub fn solve_column_lp(s: ArrayView2<'_, f64>, j: usize, gamma: f64) -> Result<Array1<f64>> {
    let d = s.nrows();
    if s.ncols() != d || j >= d {
        return Err(Error::DimensionMismatch(format!(
            "column {j} of a {}×{} matrix",
            d,
            s.ncols()
        )));
    }
    if !(gamma >= 0.0 && gamma.is_finite()) {
        return Err(Error::InvalidParameter(format!("gamma = {gamma}")));
    }
    let mut a = Vec::with_capacity(2 * d);
    let mut b = Vec::with_capacity(2 * d);
    for i in 0..d {
        let e = if i == j { 1.0 } else { 0.0 };
        let row: Vec<f64> = s
            .row(i)
            .iter()
            .copied()
            .chain(s.row(i).iter().map(|v| -v))
            .collect();
        b.push(gamma + e);
        a.push(row.clone());
        b.push(gamma - e);
        a.push(row.into_iter().map(|v| -v).collect());
    }
    let lp = LinearProgram {
        c: vec![1.0; 2 * d],
        a,
        b,
    };
    let sol = lp.solve().map_err(|e| match e {
        Error::Infeasible { .. } => Error::Infeasible { column: j },
        other => other,
    })?;
    Ok((0..d).map(|i| sol.x[i] - sol.x[d + i]).collect())
}

/// CLIME: `min ‖Ω‖_{1,1} s.t. ‖Σ̂Ω − I‖_max ≤ γ`, solved column by column.
pub fn clime(sigma_hat: ArrayView2<'_, f64>, gamma: f64) -> Result<PrecisionEstimate> {
    let d = sigma_hat.nrows();
    let columns: Vec<Array1<f64>> = (0..d)
        .into_par_iter()
        .map(|j| solve_column_lp(sigma_hat, j, gamma))
        .collect::<Result<_>>()?;
    let mut omega = Array2::zeros((d, d));
    for (j, col) in columns.into_iter().enumerate() {
        omega.column_mut(j).assign(&col);
    }
    Ok(PrecisionEstimate {
        residual: Some(feasibility_residual(sigma_hat, omega.view())),
        asymmetry: asymmetry(omega.view()),
        omega,
        method: PrecisionMethod::Clime,
    })
}

/// `12 ‖Ω*‖₁ √(M₄ log d₂ / n)` with a user bound standing in for `‖Ω*‖₁`.
pub fn clime_default_gamma(n: usize, d2: usize, m4: f64, omega_l1_bound: f64) -> f64 {
    12.0 * omega_l1_bound * (m4 * (d2 as f64).ln() / n as f64).sqrt()
}

/// `(M₄ n / log d₂)^{1/4} / 2`.
pub fn clime_default_tau(n: usize, d2: usize, m4: f64) -> f64 {
    (m4 * n as f64 / (d2 as f64).ln()).powf(0.25) / 2.0
}

/// Plug-in choice as it appears in experiment configs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PrecisionConfig {
    pub method: PrecisionMethod,
    #[serde(default)]
    pub gamma: Option<f64>,
    #[serde(default)]
    pub kappa2: Option<f64>,
    #[serde(default, with = "crate::io::opt_float_or_inf")]
    pub tau: Option<f64>,
}

impl PrecisionConfig {
    pub fn identity() -> Self {
        Self {
            method: PrecisionMethod::Identity,
            gamma: None,
            kappa2: None,
            tau: None,
        }
    }
}

/// Runs the configured method on `Z`. `inverse_soft` needs `kappa2` and
/// `clime` needs `gamma`; `tau` truncates the covariance fed to CLIME.
pub fn estimate_precision(
    z: ArrayView2<'_, f64>,
    method: PrecisionMethod,
    kappa2: Option<f64>,
    gamma: Option<f64>,
    tau: f64,
) -> Result<PrecisionEstimate> {
    match method {
        PrecisionMethod::Identity => Ok(PrecisionEstimate::identity(z.ncols())),
        PrecisionMethod::InverseSoft => {
            let k = kappa2.ok_or_else(|| {
                Error::InvalidParameter("inverse_soft precision needs kappa2".into())
            })?;
            precision_inverse(z, k)
        }
        PrecisionMethod::Clime => {
            let g = gamma
                .ok_or_else(|| Error::InvalidParameter("clime precision needs gamma".into()))?;
            let sigma = hard_truncated_covariance(z, tau)?;
            clime(sigma.view(), g)
        }
    }
}
