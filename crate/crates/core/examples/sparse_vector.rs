//! Column-sparse index vectors recovered one `z` coordinate at a time.

use vicm::data::ModelSpec;
use vicm::estimators::{default_tuning, sparse_vector_estimate, Regime};
use vicm::metrics::cosine_distance;
use vicm::rng::rng_from_seed;
use vicm::score::ScoreKind;
use vicm::synth::{
    gen_dataset, gen_parameters, DesignLaw, LinkFamily, ParamGenSpec, Structure, ZLaw,
};

fn main() -> vicm::Result<()> {
    let (d1, d2, s, n) = (50, 5, 5, 20_000);
    let model = ModelSpec {
        link: LinkFamily::F1,
        design: DesignLaw::Iid(ScoreKind::Gaussian),
        z_law: ZLaw::Independent,
        noise_sd: 0.1,
    };
    let truth = gen_parameters(
        &ParamGenSpec {
            structure: Structure::ColumnSparse {
                s,
                identified: false,
            },
            d1,
            d2,
        },
        &mut rng_from_seed(1),
    )?;
    let data = gen_dataset(&model, &truth, n, &mut rng_from_seed(2))?;
    let t = default_tuning(Regime::SimSparseVector, n, d1, d2, 1.0)?;
    println!("n = {n}, lambda = {:.4}, tau = {:.3}", t.lambda, t.tau);
    for k in 1..=d2 {
        let est = sparse_vector_estimate(&data, k, t.lambda, t.tau, &ScoreKind::Gaussian)?;
        let support = est.beta_hat.iter().filter(|v| **v != 0.0).count();
        let cos = cosine_distance(est.beta_hat.view(), truth.matrix().column(k - 1)).unwrap_or(1.0);
        println!("k = {k}: {support} nonzeros, cosine distance {cos:.4}");
    }
    Ok(())
}
