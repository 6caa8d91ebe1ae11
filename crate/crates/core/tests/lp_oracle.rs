use minilp::{ComparisonOp, OptimizationDirection, Problem};
use ndarray::Array2;
use rand::Rng;
use rand_distr::StandardNormal;

use vicm::linalg::max_abs;
use vicm::precision::lp::LinearProgram;
use vicm::precision::{clime, solve_column_lp};
use vicm::rng::rng_from_seed;

fn spd(d: usize, rng: &mut impl Rng) -> Array2<f64> {
    let a = Array2::from_shape_simple_fn((d, d), || rng.sample::<f64, _>(StandardNormal));
    a.dot(&a.t()) + Array2::<f64>::eye(d) * 0.3
}

/// `min ‖Ω‖₁,₁ s.t. ‖SΩ − I‖_max ≤ γ` as one LP over all `d²` entries.
fn joint_objective(s: &Array2<f64>, gamma: f64) -> f64 {
    let d = s.nrows();
    let mut p = Problem::new(OptimizationDirection::Minimize);
    let plus: Vec<Vec<_>> = (0..d)
        .map(|_| {
            (0..d)
                .map(|_| p.add_var(1.0, (0.0, f64::INFINITY)))
                .collect()
        })
        .collect();
    let minus: Vec<Vec<_>> = (0..d)
        .map(|_| {
            (0..d)
                .map(|_| p.add_var(1.0, (0.0, f64::INFINITY)))
                .collect()
        })
        .collect();
    for r in 0..d {
        for c in 0..d {
            // (SΩ)_{rc} = Σ_m S_{rm} Ω_{mc}
            let expr: Vec<_> = (0..d)
                .flat_map(|m| [(plus[m][c], s[(r, m)]), (minus[m][c], -s[(r, m)])])
                .collect();
            let e = if r == c { 1.0 } else { 0.0 };
            p.add_constraint(expr.as_slice(), ComparisonOp::Le, e + gamma);
            p.add_constraint(expr.as_slice(), ComparisonOp::Ge, e - gamma);
        }
    }
    p.solve().unwrap().objective()
}

#[test]
fn column_decomposition_matches_joint_problem() {
    let mut rng = rng_from_seed(31);
    for _ in 0..30 {
        let s = spd(3, &mut rng);
        for gamma in [0.0, 0.02, 0.1, 0.4] {
            let ours = clime(s.view(), gamma)
                .unwrap()
                .omega
                .iter()
                .map(|v| v.abs())
                .sum::<f64>();
            let joint = joint_objective(&s, gamma);
            assert!((ours - joint).abs() <= 1e-6, "{ours} vs {joint}");
        }
    }
}

#[test]
fn column_lp_examples() {
    let id = Array2::<f64>::eye(3);
    let l = solve_column_lp(id.view(), 1, 0.3).unwrap();
    assert!((l[1] - 0.7).abs() < 1e-12 && l[0] == 0.0 && l[2] == 0.0);
    let two = &id * 2.0;
    let l = solve_column_lp(two.view(), 0, 0.0).unwrap();
    assert!((l[0] - 0.5).abs() < 1e-12);
}

#[test]
fn feasibility_holds_on_random_instances() {
    let mut rng = rng_from_seed(32);
    for d in [2, 4, 6, 8] {
        for gamma in [0.0, 0.05, 0.2] {
            let s = spd(d, &mut rng);
            let est = clime(s.view(), gamma).unwrap();
            let resid = max_abs((s.dot(&est.omega) - Array2::<f64>::eye(d)).view());
            assert!(resid <= gamma + 1e-8);
        }
    }
}

#[test]
fn generic_simplex_matches_oracle() {
    let mut rng = rng_from_seed(33);
    let mut solved = 0;
    for _ in 0..200 {
        let (m, n) = (rng.random_range(1..6), rng.random_range(1..6));
        let a: Vec<Vec<f64>> = (0..m)
            .map(|_| (0..n).map(|_| rng.random_range(-2.0..3.0)).collect())
            .collect();
        let b: Vec<f64> = (0..m).map(|_| rng.random_range(-1.0..4.0)).collect();
        let c: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..2.0)).collect();
        let mut p = Problem::new(OptimizationDirection::Minimize);
        let vars: Vec<_> = c
            .iter()
            .map(|&ci| p.add_var(ci, (0.0, f64::INFINITY)))
            .collect();
        for (row, &bi) in a.iter().zip(&b) {
            let expr: Vec<_> = vars.iter().copied().zip(row.iter().copied()).collect();
            p.add_constraint(expr.as_slice(), ComparisonOp::Le, bi);
        }
        let ours = LinearProgram {
            c: c.clone(),
            a: a.clone(),
            b: b.clone(),
        }
        .solve();
        match (ours, p.solve()) {
            (Ok(x), Ok(y)) => {
                assert!((x.objective - y.objective()).abs() <= 1e-7 * (1.0 + y.objective().abs()));
                for (row, &bi) in a.iter().zip(&b) {
                    let lhs: f64 = row.iter().zip(&x.x).map(|(r, v)| r * v).sum();
                    assert!(lhs <= bi + 1e-8);
                }
                solved += 1;
            }
            (Err(vicm::Error::Infeasible { .. }), Err(minilp::Error::Infeasible)) => {}
            (Err(vicm::Error::Unbounded), Err(minilp::Error::Unbounded)) => {}
            (Err(vicm::Error::Unbounded), Ok(y)) if !y.objective().is_finite() => {}
            (x, y) => panic!("disagreement: {x:?} vs {y:?}"),
        }
    }
    assert!(solved > 50);
}
