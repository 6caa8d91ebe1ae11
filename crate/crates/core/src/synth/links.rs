//! The six simulation link families and their derivatives.
//!
//! Columns are indexed from `k = 1`; the fluctuation term of every family
//! fades as `k` grows.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

fn logistic(u: f64) -> f64 {
    1.0 / (1.0 + (-u).exp())
}

/// A user-supplied link `f_k(u)` together with its derivative.
/// Compared by identity of the shared closures.
#[derive(Clone)]
pub struct CustomLink {
    pub name: String,
    pub f: Arc<dyn Fn(usize, f64) -> f64 + Send + Sync>,
    pub df: Arc<dyn Fn(usize, f64) -> f64 + Send + Sync>,
}

impl fmt::Debug for CustomLink {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CustomLink")
            .field("name", &self.name)
            .finish()
    }
}

impl PartialEq for CustomLink {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.f, &other.f) && Arc::ptr_eq(&self.df, &other.df)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LinkFamily {
    /// `u + cos(u)/k`
    F1,
    /// `u + exp(-u²)/k`
    F2,
    /// `u + σ(u)/k` with `σ` the logistic function
    F3,
    /// `u² + k u + cos²(u)/k`
    F4,
    /// `u² + √k u + exp(-u²)/√k`
    F5,
    /// `u² + k^{1/4} u + σ(u)/k²`
    F6,
    /// `u` for every column.
    Identity,
    #[serde(skip)]
    Custom(CustomLink),
}

impl LinkFamily {
    pub fn name(&self) -> &str {
        match self {
            LinkFamily::F1 => "f1",
            LinkFamily::F2 => "f2",
            LinkFamily::F3 => "f3",
            LinkFamily::F4 => "f4",
            LinkFamily::F5 => "f5",
            LinkFamily::F6 => "f6",
            LinkFamily::Identity => "identity",
            LinkFamily::Custom(c) => &c.name,
        }
    }

    pub fn builtin() -> [LinkFamily; 6] {
        [
            LinkFamily::F1,
            LinkFamily::F2,
            LinkFamily::F3,
            LinkFamily::F4,
            LinkFamily::F5,
            LinkFamily::F6,
        ]
    }
}

/// `f_k(u)` for column `k ≥ 1`.
pub fn link_eval(family: &LinkFamily, k: usize, u: f64) -> f64 {
    let kf = k as f64;
    match family {
        LinkFamily::F1 => u + u.cos() / kf,
        LinkFamily::F2 => u + (-u * u).exp() / kf,
        LinkFamily::F3 => u + logistic(u) / kf,
        LinkFamily::F4 => u * u + kf * u + u.cos().powi(2) / kf,
        LinkFamily::F5 => u * u + kf.sqrt() * u + (-u * u).exp() / kf.sqrt(),
        LinkFamily::F6 => u * u + kf.powf(0.25) * u + logistic(u) / (kf * kf),
        LinkFamily::Identity => u,
        LinkFamily::Custom(c) => (c.f)(k, u),
    }
}

/// `f_k'(u)`.
pub fn link_derivative(family: &LinkFamily, k: usize, u: f64) -> f64 {
    let kf = k as f64;
    let dlogistic = |u: f64| {
        let s = logistic(u);
        s * (1.0 - s)
    };
    match family {
        LinkFamily::F1 => 1.0 - u.sin() / kf,
        LinkFamily::F2 => 1.0 - 2.0 * u * (-u * u).exp() / kf,
        LinkFamily::F3 => 1.0 + dlogistic(u) / kf,
        LinkFamily::F4 => 2.0 * u + kf - (2.0 * u).sin() / kf,
        LinkFamily::F5 => 2.0 * u + kf.sqrt() - 2.0 * u * (-u * u).exp() / kf.sqrt(),
        LinkFamily::F6 => 2.0 * u + kf.powf(0.25) + dlogistic(u) / (kf * kf),
        LinkFamily::Identity => 1.0,
        LinkFamily::Custom(c) => (c.df)(k, u),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn formula_values() {
        assert_eq!(link_eval(&LinkFamily::F1, 1, 0.0), 1.0);
        assert_eq!(link_eval(&LinkFamily::F4, 2, 0.0), 0.5);
        for u in [-2.0, 0.3, 4.0] {
            assert_abs_diff_eq!(link_eval(&LinkFamily::F3, 1_000_000, u), u, epsilon = 1e-5);
        }
    }

    #[test]
    fn derivatives_match_central_differences() {
        let h = 1e-5;
        for fam in LinkFamily::builtin() {
            for k in [1, 3, 10] {
                for i in 0..21 {
                    let u = -3.0 + 0.3 * i as f64;
                    let fd = (link_eval(&fam, k, u + h) - link_eval(&fam, k, u - h)) / (2.0 * h);
                    assert_abs_diff_eq!(link_derivative(&fam, k, u), fd, epsilon = 1e-7);
                }
            }
        }
    }

    #[test]
    fn names_serialize() {
        let json = serde_json::to_string(&LinkFamily::builtin()).unwrap();
        assert_eq!(json, r#"["f1","f2","f3","f4","f5","f6"]"#);
        let back: LinkFamily = serde_json::from_str("\"identity\"").unwrap();
        assert_eq!(back.name(), "identity");
    }
}
