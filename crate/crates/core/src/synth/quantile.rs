//! Normal and Student t distribution functions.
//!
//! The t CDF is the regularized incomplete beta
//! `P(T ≤ t) = ½ I_{ν/(ν+t²)}(ν/2, ½)` for `t ≤ 0`; quantiles are found by
//! Newton steps kept inside a shrinking bisection bracket.

use std::f64::consts::{PI, SQRT_2};

use statrs::function::beta::beta_reg;
use statrs::function::erf::{erfc, erfc_inv};
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};

const QUANTILE_TOL: f64 = 1e-12;

pub fn normal_cdf(x: f64) -> f64 {
    0.5 * erfc(-x / SQRT_2)
}

/// Upper tail `P(N > x)`, accurate far into the tail.
pub fn normal_sf(x: f64) -> f64 {
    0.5 * erfc(x / SQRT_2)
}

pub fn normal_quantile(p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::Domain(format!("normal quantile at p = {p}")));
    }
    Ok(-SQRT_2 * erfc_inv(2.0 * p))
}

/// Lower tail `P(T ≤ t)` for `t ≤ 0` and, by symmetry, any `t`.
pub fn t_cdf(t: f64, nu: f64) -> f64 {
    if t.is_infinite() {
        return if t > 0.0 { 1.0 } else { 0.0 };
    }
    let x = nu / (nu + t * t);
    let tail = 0.5 * beta_reg(0.5 * nu, 0.5, x);
    if t <= 0.0 {
        tail
    } else {
        1.0 - tail
    }
}

pub fn t_pdf(t: f64, nu: f64) -> f64 {
    let ln_norm = ln_gamma(0.5 * (nu + 1.0)) - ln_gamma(0.5 * nu) - 0.5 * (nu * PI).ln();
    (ln_norm - 0.5 * (nu + 1.0) * (1.0 + t * t / nu).ln()).exp()
}

/// Solves `P(T ≤ t) = p` for `p ≤ ½`, so the answer is `≤ 0`.
fn lower_t_quantile(p: f64, nu: f64, start: f64) -> f64 {
    if p == 0.5 {
        return 0.0;
    }
    let mut hi = 0.0f64;
    let mut lo = start.min(-1.0);
    while t_cdf(lo, nu) > p {
        hi = lo;
        lo *= 2.0;
    }
    let mut x = start.clamp(lo, hi);
    for _ in 0..200 {
        let f = t_cdf(x, nu) - p;
        if f > 0.0 {
            hi = x;
        } else {
            lo = x;
        }
        if hi - lo <= QUANTILE_TOL * (1.0 + x.abs()) {
            break;
        }
        let newton = x - f / t_pdf(x, nu);
        let next = if newton > lo && newton < hi && newton.is_finite() {
            newton
        } else {
            0.5 * (lo + hi)
        };
        if (next - x).abs() <= 0.25 * QUANTILE_TOL * (1.0 + x.abs()) {
            x = next;
            break;
        }
        x = next;
    }
    x
}

/// Cornish-Fisher start from the matching normal quantile.
fn cornish_fisher(z: f64, nu: f64) -> f64 {
    let z3 = z * z * z;
    let z5 = z3 * z * z;
    z + (z3 + z) / (4.0 * nu) + (5.0 * z5 + 16.0 * z3 + 3.0 * z) / (96.0 * nu * nu)
}

pub fn t_quantile(p: f64, nu: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::Domain(format!("t quantile at p = {p}")));
    }
    if !(nu > 0.0) {
        return Err(Error::InvalidParameter(format!("degrees of freedom {nu}")));
    }
    let lower = p.min(1.0 - p);
    let z = normal_quantile(lower)?;
    let q = lower_t_quantile(lower, nu, cornish_fisher(z, nu));
    Ok(if p <= 0.5 { q } else { -q })
}

/// Maps a standard normal draw to the t quantile of the same probability,
/// working from whichever tail avoids rounding `Φ(g)` to 1.
pub fn normal_to_t(g: f64, nu: f64) -> f64 {
    let lower = if g <= 0.0 {
        normal_cdf(g)
    } else {
        normal_sf(g)
    };
    if lower <= 0.0 {
        return if g < 0.0 {
            f64::NEG_INFINITY
        } else {
            f64::INFINITY
        };
    }
    let q = lower_t_quantile(lower, nu, cornish_fisher(-g.abs(), nu));
    if g <= 0.0 {
        q
    } else {
        -q
    }
}
