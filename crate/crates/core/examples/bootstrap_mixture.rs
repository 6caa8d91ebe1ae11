//! Percentile bootstrap bands for a two-confounder study: a population
//! group mixture and a location mixture, with ternary genotype-like `z`.

use ndarray::Array2;
use rand::Rng;
use vicm::data::{CoefficientMatrix, Dataset};
use vicm::estimators::sparse_matrix_estimate;
use vicm::metrics::{bootstrap_ci, BootstrapMode};
use vicm::precision::{clime, hard_truncated_covariance};
use vicm::rng::rng_from_seed;
use vicm::synth::{mean_response, DesignLaw, LinkFamily, Mixture};

fn main() -> vicm::Result<()> {
    let (n, d2) = (215, 12);
    let law = DesignLaw::Columns(vec![
        Mixture::two_group_normal(119, 96, 50.0)?,
        Mixture::two_site_t(13.0, 50.0)?,
    ]);
    let mut rng = rng_from_seed(11);
    let x = law.sample(n, 2, &mut rng)?;
    let z = Array2::from_shape_simple_fn((n, d2), || rng.random_range(-1i32..=1) as f64);
    let mut b = Array2::zeros((2, d2));
    b[(0, 1)] = 0.02;
    b[(1, 4)] = -0.02;
    let truth = CoefficientMatrix::new(b)?;
    let noise: Vec<f64> = (0..n).map(|_| rng.random_range(-0.1..0.1)).collect();
    let y = mean_response(
        &LinkFamily::Identity,
        truth.matrix().view(),
        x.view(),
        z.view(),
    ) + &ndarray::Array1::from(noise);
    let data = Dataset::new(y, x, z)?;

    let (d1, nf) = (2.0, n as f64);
    let lambda = ((d1 * d2 as f64).ln() / nf).sqrt();
    let gamma = 5.0 * ((d2 as f64).ln() / nf).sqrt();
    let fit = |d: &Dataset| -> vicm::Result<Array2<f64>> {
        let sigma = hard_truncated_covariance(d.z.view(), f64::INFINITY)?;
        let omega = clime(sigma.view(), gamma)?;
        Ok(sparse_matrix_estimate(d, lambda, f64::INFINITY, &law, omega)?.b_hat)
    };
    for (name, mode) in [
        ("nonparametric", BootstrapMode::Nonparametric),
        ("parametric", BootstrapMode::Parametric(&law)),
    ] {
        let bands = bootstrap_ci(fit, &data, mode, 100, 0.95, 12)?;
        println!("{name} 95% bands (confounder, snp: lower / point / upper):");
        for ((i, j), p) in bands.point.indexed_iter() {
            if *p != 0.0 || bands.lower[(i, j)] != 0.0 || bands.upper[(i, j)] != 0.0 {
                println!(
                    "  ({}, {:>2}): {:+.4} / {:+.4} / {:+.4}",
                    i + 1,
                    j + 1,
                    bands.lower[(i, j)],
                    p,
                    bands.upper[(i, j)]
                );
            }
        }
    }
    Ok(())
}
