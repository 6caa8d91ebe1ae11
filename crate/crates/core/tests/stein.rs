//! Monte Carlo checks of `E[g(x) S(x)] = E[g'(x)]` for every design.

use vicm::rng::rng_from_seed;
use vicm::score::ScoreKind;
use vicm::synth::{sample_design, DesignLaw, Mixture};
use vicm::DesignScore;

fn check(x: &[f64], s: &[f64], g: impl Fn(f64) -> f64, dg: impl Fn(f64) -> f64, what: &str) {
    let n = x.len() as f64;
    let diff: Vec<f64> = x.iter().zip(s).map(|(&v, &sv)| g(v) * sv - dg(v)).collect();
    let mean = diff.iter().sum::<f64>() / n;
    let var = diff.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / (n - 1.0);
    let se = (var / n).sqrt();
    assert!(
        mean.abs() <= 4.0 * se,
        "{what}: mean gap {mean} with se {se}"
    );
}

#[test]
fn stein_identity_for_each_design() {
    for kind in ScoreKind::ALL {
        let x = sample_design(kind, 200_000, 1, &mut rng_from_seed(41));
        let s = kind.score_matrix(x.view()).unwrap();
        let (x, s) = (x.column(0).to_vec(), s.column(0).to_vec());
        check(&x, &s, |v| v, |_| 1.0, kind.name());
        check(&x, &s, |v| v * v, |v| 2.0 * v, kind.name());
    }
}

#[test]
fn stein_identity_for_mixtures() {
    let law = DesignLaw::Columns(vec![
        Mixture::two_group_normal(119, 96, 50.0).unwrap(),
        Mixture::two_site_t(13.0, 50.0).unwrap(),
    ]);
    let x = law.sample(200_000, 2, &mut rng_from_seed(42)).unwrap();
    let s = law.score_matrix(x.view()).unwrap();
    for j in 0..2 {
        let (xc, sc) = (x.column(j).to_vec(), s.column(j).to_vec());
        check(&xc, &sc, |v| v, |_| 1.0, "mixture");
        check(
            &xc,
            &sc,
            |v| (v / 10.0).sin(),
            |v| (v / 10.0).cos() / 10.0,
            "mixture",
        );
    }
}
