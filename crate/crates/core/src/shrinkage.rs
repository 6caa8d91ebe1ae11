//! Truncation and thresholding operators.

use ndarray::{s, Array1, Array2, ArrayView1, ArrayView2};

use crate::error::Result;
use crate::linalg::{hermitian_dilation, svd, sym_eig};

/// Keeps `v` when `|v| <= tau`, otherwise 0. `tau = ∞` keeps everything.
#[inline]
pub fn hard_truncate_scalar(v: f64, tau: f64) -> f64 {
    if v.abs() <= tau {
        v
    } else {
        0.0
    }
}

pub fn hard_truncate(v: ArrayView1<'_, f64>, tau: f64) -> Array1<f64> {
    v.mapv(|x| hard_truncate_scalar(x, tau))
}

/// Catoni-type influence function: odd, increasing, logarithmic growth.
#[inline]
pub fn phi(x: f64) -> f64 {
    if x <= 0.0 {
        -(1.0 - x + 0.5 * x * x).ln()
    } else {
        (1.0 + x + 0.5 * x * x).ln()
    }
}

/// `Φ(κV)`: `φ` applied to the spectrum of the Hermitian dilation of `κV`,
/// upper-right `d1 × d2` block. Callers divide by `κ` themselves.
pub fn soft_truncate_matrix(v: ArrayView2<'_, f64>, kappa: f64) -> Result<Array2<f64>> {
    let (d1, _) = v.dim();
    let scaled = v.mapv(|x| kappa * x);
    let eig = sym_eig(hermitian_dilation(scaled.view()).view())?;
    let full = eig.apply(phi);
    Ok(full.slice(s![..d1, d1..]).to_owned())
}

/// `Φ(κ a bᵀ)` in closed form. The dilation of a rank-one matrix has
/// eigenvalues `±‖a‖‖b‖` and zeros, and `φ` is odd, so the upper-right block
/// is `φ(κ‖a‖‖b‖) / (‖a‖‖b‖) · a bᵀ`. Returns the scalar weight on `a bᵀ`.
#[inline]
pub fn rank_one_soft_weight(norm_a: f64, norm_b: f64, kappa: f64) -> f64 {
    let sigma = norm_a * norm_b;
    if sigma == 0.0 {
        0.0
    } else {
        phi(kappa * sigma) / sigma
    }
}

#[inline]
pub fn soft_threshold_scalar(a: f64, lambda: f64) -> f64 {
    if a > lambda {
        a - lambda
    } else if a < -lambda {
        a + lambda
    } else {
        0.0
    }
}

pub fn soft_threshold_vector(a: ArrayView1<'_, f64>, lambda: f64) -> Array1<f64> {
    a.mapv(|x| soft_threshold_scalar(x, lambda))
}

pub fn soft_threshold_entrywise(a: ArrayView2<'_, f64>, lambda: f64) -> Array2<f64> {
    a.mapv(|x| soft_threshold_scalar(x, lambda))
}

/// `U diag((σ - λ)₊) Vᵀ`.
pub fn soft_threshold_singular(a: ArrayView2<'_, f64>, lambda: f64) -> Result<Array2<f64>> {
    let dec = svd(a)?;
    let shrunk = dec.sigma.mapv(|s| (s - lambda).max(0.0));
    Ok(dec.reassemble(&shrunk))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::max_abs;
    use crate::rng::rng_from_seed;
    use approx::assert_abs_diff_eq;
    use ndarray::array;
    use proptest::prelude::*;
    use rand::Rng;
    use rand_distr::StandardNormal;

    fn random_matrix(rows: usize, cols: usize, seed: u64) -> Array2<f64> {
        let mut rng = rng_from_seed(seed);
        Array2::from_shape_simple_fn((rows, cols), || rng.sample::<f64, _>(StandardNormal))
    }

    #[test]
    fn hard_truncation_examples() {
        assert_eq!(
            hard_truncate(array![1.0, -3.0, 2.0].view(), 2.0),
            array![1.0, 0.0, 2.0]
        );
        let v = array![5.0, -1e300, 0.0];
        assert_eq!(hard_truncate(v.view(), f64::INFINITY), v);
        assert_eq!(
            hard_truncate(array![0.0, 0.0].view(), 0.1),
            array![0.0, 0.0]
        );
    }

    #[test]
    fn phi_examples() {
        assert_eq!(phi(0.0), 0.0);
        assert_abs_diff_eq!(phi(1.0), 0.916_290_731_874_155_1, epsilon = 1e-15);
        assert_abs_diff_eq!(phi(-1.0), -0.916_290_731_874_155_1, epsilon = 1e-15);
    }

    #[test]
    fn soft_truncate_examples() {
        let one = soft_truncate_matrix(array![[2.0]].view(), 1.0).unwrap();
        assert_abs_diff_eq!(one[(0, 0)], 5f64.ln(), epsilon = 1e-12);
        let zero = soft_truncate_matrix(Array2::<f64>::zeros((3, 2)).view(), 0.7).unwrap();
        assert!(zero.iter().all(|&x| x == 0.0));
        let v = random_matrix(3, 4, 1);
        let pos = soft_truncate_matrix(v.view(), 0.8).unwrap();
        let neg = soft_truncate_matrix((-&v).view(), 0.8).unwrap();
        assert!(max_abs((&pos + &neg).view()) <= 1e-10);
    }

    #[test]
    fn soft_truncate_transpose_commutes() {
        for seed in 0..10 {
            let v = random_matrix(3, 5, 10 + seed);
            let a = soft_truncate_matrix(v.t(), 0.5).unwrap();
            let b = soft_truncate_matrix(v.view(), 0.5).unwrap();
            assert!(max_abs((&a - &b.t()).view()) <= 1e-10);
        }
    }

    #[test]
    fn rank_one_weight_matches_dilation() {
        for seed in 0..10 {
            let a = random_matrix(4, 1, 20 + seed);
            let b = random_matrix(3, 1, 40 + seed);
            let v = a.dot(&b.t());
            let kappa = 0.3;
            let direct = soft_truncate_matrix(v.view(), kappa).unwrap();
            let na = a.iter().map(|x| x * x).sum::<f64>().sqrt();
            let nb = b.iter().map(|x| x * x).sum::<f64>().sqrt();
            let closed = &v * rank_one_soft_weight(na, nb, kappa);
            assert!(max_abs((&direct - &closed).view()) <= 1e-10);
        }
        assert_eq!(rank_one_soft_weight(0.0, 3.0, 1.0), 0.0);
    }

    #[test]
    fn soft_threshold_examples() {
        assert_eq!(
            soft_threshold_vector(array![3.0, -0.5, 1.0].view(), 1.0),
            array![2.0, 0.0, 0.0]
        );
        let a = array![0.3, -7.0];
        assert_eq!(soft_threshold_vector(a.view(), 0.0), a);
        assert_eq!(soft_threshold_vector(array![-2.0].view(), 2.0), array![0.0]);
    }

    #[test]
    fn singular_threshold_examples() {
        let d = soft_threshold_singular(array![[3.0, 0.0], [0.0, 1.0]].view(), 2.0).unwrap();
        assert!(max_abs((&d - &array![[1.0, 0.0], [0.0, 0.0]]).view()) <= 1e-12);
        let a = random_matrix(4, 3, 9);
        let same = soft_threshold_singular(a.view(), 0.0).unwrap();
        assert!(max_abs((&same - &a).view()) <= 1e-10);
        let smax = svd(a.view()).unwrap().sigma[0];
        let gone = soft_threshold_singular(a.view(), smax).unwrap();
        assert!(max_abs(gone.view()) <= 1e-12);
    }

    #[test]
    fn singular_threshold_spectrum() {
        for seed in 0..20 {
            let a = random_matrix(5, 4, 60 + seed);
            let lambda = 0.4;
            let before = svd(a.view()).unwrap().sigma;
            let after = svd(soft_threshold_singular(a.view(), lambda).unwrap().view())
                .unwrap()
                .sigma;
            for (b, s) in before.iter().zip(after.iter()) {
                assert_abs_diff_eq!((b - lambda).max(0.0), *s, epsilon = 1e-9);
            }
        }
    }

    proptest! {
        #[test]
        fn hard_truncate_shrinks_and_is_idempotent(
            v in proptest::collection::vec(-10.0f64..10.0, 1..20),
            tau in 0.01f64..8.0,
        ) {
            let v = Array1::from(v);
            let once = hard_truncate(v.view(), tau);
            for (a, b) in v.iter().zip(once.iter()) {
                prop_assert!(b.abs() <= a.abs());
            }
            prop_assert_eq!(hard_truncate(once.view(), tau), once);
        }

        #[test]
        fn soft_threshold_is_scale_equivariant(
            v in proptest::collection::vec(-10.0f64..10.0, 1..20),
            lambda in 0.0f64..3.0,
            c in 0.1f64..10.0,
        ) {
            let v = Array1::from(v);
            let lhs = soft_threshold_vector((&v * c).view(), lambda * c);
            let rhs = soft_threshold_vector(v.view(), lambda) * c;
            for (a, b) in lhs.iter().zip(rhs.iter()) {
                prop_assert!((a - b).abs() <= 1e-12 * (1.0 + a.abs()));
            }
        }
    }
}
