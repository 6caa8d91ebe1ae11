//! Fully sparse coefficient matrix with a CLIME precision plug-in.

use vicm::data::ModelSpec;
use vicm::estimators::{default_tuning, sparse_matrix_estimate, Regime};
use vicm::metrics::{column_mu, matrix_error_vs_tilde, mu_means, TildeNorm};
use vicm::precision::{clime, hard_truncated_covariance};
use vicm::rng::rng_from_seed;
use vicm::score::ScoreKind;
use vicm::synth::{
    gen_dataset, gen_parameters, CopulaSpec, DesignLaw, LinkFamily, ParamGenSpec, Structure, ZLaw,
};

fn main() -> vicm::Result<()> {
    let (d1, d2, s) = (20, 8, 10);
    let design = DesignLaw::Iid(ScoreKind::StudentT);
    let model = ModelSpec {
        link: LinkFamily::F2,
        design: design.clone(),
        z_law: ZLaw::Copula(CopulaSpec::tridiagonal_precision(d2, 0.2)?),
        noise_sd: 0.1,
    };
    let truth = gen_parameters(
        &ParamGenSpec {
            structure: Structure::FullySparse { s },
            d1,
            d2,
        },
        &mut rng_from_seed(6),
    )?;
    let mu = mu_means(&column_mu(
        &model.link,
        truth.matrix().view(),
        &design,
        100_000,
        &mut rng_from_seed(7),
    )?);
    for n in [2_000, 8_000, 32_000] {
        let data = gen_dataset(&model, &truth, n, &mut rng_from_seed(8 + n as u64))?;
        let t = default_tuning(Regime::SimSparseMatrix, n, d1, d2, 1.0)?;
        let sigma = hard_truncated_covariance(data.z.view(), t.tau_precision)?;
        let omega = clime(sigma.view(), t.gamma.unwrap())?;
        let asym = omega.asymmetry;
        let est = sparse_matrix_estimate(&data, t.lambda, t.tau, &ScoreKind::StudentT, omega)?;
        let err = matrix_error_vs_tilde(
            est.b_hat.view(),
            truth.matrix().view(),
            mu.view(),
            TildeNorm::Frobenius,
        )?;
        let nnz = est.b_hat.iter().filter(|v| **v != 0.0).count();
        println!("n = {n:>5}: {nnz} nonzeros, ‖B̂ − B̃‖_F = {err:.4}, CLIME asymmetry {asym:.2e}");
    }
    Ok(())
}
