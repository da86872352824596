use std::f64::consts::PI;

use qcard::alice::{AliceAngle, AliceStrategy};
use qcard::bob_collective::{CoefficientSet, GuessChoice};
use qcard::bob_separate::SequentialProtocol;
use qcard::engine::{exact_success, simulate, SimulationConfig, StrategySpec};

fn median(mut xs: Vec<f64>) -> f64 {
    xs.sort_by(f64::total_cmp);
    let n = xs.len();
    (xs[n / 2 - 1] + xs[n / 2]) / 2.0
}

fn median_error(spec: &StrategySpec, trials: u64) -> f64 {
    let exact = exact_success(spec).unwrap();
    let errors = (0..20u64)
        .map(|seed| {
            let r = simulate(spec, &SimulationConfig::new(trials, seed, 4).unwrap()).unwrap();
            (r.estimate - exact).abs()
        })
        .collect();
    median(errors)
}

#[test]
fn error_shrinks_like_inverse_sqrt_n() {
    let spec = StrategySpec::Alice {
        alpha: AliceAngle::new(PI / 12.0).unwrap(),
        strategy: AliceStrategy::Strategy1,
    };
    let errs: Vec<f64> = [10_000, 100_000, 1_000_000].iter().map(|&n| median_error(&spec, n)).collect();
    assert!(errs[0] > errs[1] && errs[1] > errs[2], "{errs:?}");
    // Each decade should cut the median error by about √10; allow a wide band.
    for w in errs.windows(2) {
        let ratio = w[0] / w[1];
        assert!((1.2..12.0).contains(&ratio), "ratio {ratio} in {errs:?}");
    }
}

#[test]
fn separate_protocol_simulates_near_exact() {
    let spec = StrategySpec::BobSeparate(SequentialProtocol::standard());
    let r = simulate(&spec, &SimulationConfig::new(1_000_000, 3, 8).unwrap()).unwrap();
    assert!(r.z_score.unwrap().abs() < 5.0, "{r:?}");
    assert!((r.exact_reference.unwrap() - (11.0 + 3.0 * 3f64.sqrt()) / 24.0).abs() < 1e-12);
}

#[test]
fn every_collective_choice_simulates_near_exact() {
    for choice in [GuessChoice::I, GuessChoice::II, GuessChoice::III] {
        let spec = StrategySpec::bob_collective(&CoefficientSet::known_optimum(), choice).unwrap();
        let r = simulate(&spec, &SimulationConfig::new(200_000, 11, 4).unwrap()).unwrap();
        assert!(r.z_score.unwrap().abs() < 5.0, "{choice:?}: {r:?}");
    }
}
