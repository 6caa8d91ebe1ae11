//! `E[g(x) S(x)] = E[g'(x)]` checked by Monte Carlo for every design.

use vicm::rng::rng_from_seed;
use vicm::score::ScoreKind;
use vicm::synth::sample_design;
use vicm::DesignScore;

fn main() -> vicm::Result<()> {
    let n = 200_000;
    for kind in ScoreKind::ALL {
        let x = sample_design(kind, n, 1, &mut rng_from_seed(10));
        let s = kind.score_matrix(x.view())?;
        let lhs = x
            .iter()
            .zip(s.iter())
            .map(|(v, sv)| v.sin() * sv)
            .sum::<f64>()
            / n as f64;
        let rhs = x.iter().map(|v| v.cos()).sum::<f64>() / n as f64;
        println!("{kind:>10}: E[sin(x) S(x)] = {lhs:+.4}, E[cos(x)] = {rhs:+.4}");
    }
    Ok(())
}
