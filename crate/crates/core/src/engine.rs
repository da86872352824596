//! Strategy-agnostic evaluation of the whole game.
//!
//! Every strategy is reduced to an outcome tree per deal (a list of
//! [`Branch`]es). [`exact_success`] sums the tree with fractional credit for
//! randomized guesses; [`simulate`] samples it.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::alice::{AliceAngle, AliceStrategy, Outcome};
use crate::bob_collective::{build_basis, guess_map, CoefficientSet, GuessChoice};
use crate::bob_separate::SequentialProtocol;
use crate::game::{all_deals, card_states, Branch, CardTriple, Deal, GuessDist};
use crate::linalg::{gram_residual, inner, Ket};
use crate::tolerances;
use crate::{QcardError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Actor {
    Alice,
    BobSeparate,
    BobCollective,
}

#[derive(Debug, Clone, PartialEq)]
pub enum StrategySpec {
    Alice {
        alpha: AliceAngle,
        strategy: AliceStrategy,
    },
    BobSeparate(SequentialProtocol),
    BobCollective {
        frame: [Ket; 4],
        guesses: [GuessDist; 4],
    },
}

impl StrategySpec {
    /// Collective measurement built from coefficients.
    pub fn bob_collective(coeffs: &CoefficientSet, choice: GuessChoice) -> Result<Self> {
        let basis = build_basis(coeffs)?;
        Ok(Self::BobCollective {
            frame: basis.phi,
            guesses: guess_map(choice),
        })
    }

    pub fn actor(&self) -> Actor {
        match self {
            Self::Alice { .. } => Actor::Alice,
            Self::BobSeparate(_) => Actor::BobSeparate,
            Self::BobCollective { .. } => Actor::BobCollective,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Self::Alice { .. } => Ok(()),
            Self::BobSeparate(p) => p.validate(),
            Self::BobCollective { frame, guesses } => {
                if frame.iter().any(|k| k.dim() != 4) {
                    return Err(QcardError::InvalidArgument(
                        "collective frame vectors must have dimension 4".into(),
                    ));
                }
                let residual = gram_residual(frame)?;
                if residual > tolerances::COLLECTIVE_BASIS {
                    return Err(QcardError::InvalidArgument(format!(
                        "collective frame is not orthonormal (Gram residual {residual:e})"
                    )));
                }
                for g in guesses {
                    let total: f64 = g.iter().sum();
                    if g.iter().any(|&p| !(0.0..=1.0).contains(&p)) || (total - 1.0).abs() > 1e-12 {
                        return Err(QcardError::InvalidArgument(format!(
                            "guess rule {g:?} is not a distribution"
                        )));
                    }
                }
                Ok(())
            }
        }
    }

    /// Outcome tree of this strategy for one deal.
    pub fn branches(&self, cards: &CardTriple, deal: &Deal) -> Vec<Branch> {
        match self {
            Self::Alice { alpha, strategy } => {
                let card = cards.state(deal.alice);
                let up = inner(&alpha.up_ket(), card).expect("dim 2").norm_sqr();
                vec![
                    Branch {
                        probability: up,
                        guess: strategy.guess(Outcome::Up),
                    },
                    Branch {
                        probability: 1.0 - up,
                        guess: strategy.guess(Outcome::Down),
                    },
                ]
            }
            Self::BobSeparate(protocol) => protocol.branches(cards, deal.bob_first, deal.bob_second),
            Self::BobCollective { frame, guesses } => {
                let state = cards.pair(deal.bob_first, deal.bob_second);
                frame
                    .iter()
                    .zip(guesses)
                    .map(|(phi, g)| Branch {
                        probability: inner(phi, &state).expect("dim 4").norm_sqr(),
                        guess: *g,
                    })
                    .collect()
            }
        }
    }
}

/// Exact success probability: Σ over deals and outcome branches of
/// `P(deal) · P(branch | deal) · P(guess = Alice's card | branch)`.
pub fn exact_success(strategy: &StrategySpec) -> Result<f64> {
    strategy.validate()?;
    let cards = card_states();
    let mut total = 0.0;
    for deal in all_deals() {
        for b in strategy.branches(&cards, &deal) {
            total += deal.probability * b.probability * b.guess[deal.alice.index()];
        }
    }
    Ok(total)
}

/// SplitMix64 finalizer applied to `seed` and a stream index; used to give
/// each shard or restart an independent generator.
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SimulationConfig {
    pub trials: u64,
    pub seed: u64,
    pub shards: u32,
}

impl SimulationConfig {
    pub fn new(trials: u64, seed: u64, shards: u32) -> Result<Self> {
        let config = Self { trials, seed, shards };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(QcardError::InvalidArgument("trials must be at least 1".into()));
        }
        if self.shards == 0 || u64::from(self.shards) > self.trials {
            return Err(QcardError::InvalidArgument(format!(
                "shards must be in 1..={}, got {}",
                self.trials, self.shards
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SimulationReport {
    pub estimate: f64,
    pub std_error: f64,
    pub trials: u64,
    pub successes: u64,
    pub seed: u64,
    pub shards: u32,
    pub exact_reference: Option<f64>,
    pub z_score: Option<f64>,
}

/// Cumulative branch table of one deal.
struct DealTable {
    alice: usize,
    cdf: Vec<f64>,
    guesses: Vec<GuessDist>,
}

fn pick(cdf: &[f64], u: f64) -> usize {
    cdf.iter().position(|&c| u < c).unwrap_or(cdf.len() - 1)
}

fn cumulative(weights: impl IntoIterator<Item = f64>) -> Vec<f64> {
    let mut acc = 0.0;
    weights
        .into_iter()
        .map(|w| {
            acc += w.max(0.0);
            acc
        })
        .collect()
}

fn run_shard(tables: &[DealTable], trials: u64, seed: u64) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut hits = 0;
    for _ in 0..trials {
        let t = &tables[rng.random_range(0..tables.len())];
        let total = *t.cdf.last().expect("non-empty tree");
        let branch = pick(&t.cdf, rng.random::<f64>() * total);
        let g = &t.guesses[branch];
        let guess = pick(&cumulative(g.iter().copied()), rng.random::<f64>());
        if guess == t.alice {
            hits += 1;
        }
    }
    hits
}

/// Monte Carlo estimate of the success probability. Shard `i` draws from
/// its own ChaCha8 stream seeded by `derive_seed(seed, i)`, so the result is
/// bit-identical for a fixed `(strategy, config)`.
pub fn simulate(strategy: &StrategySpec, config: &SimulationConfig) -> Result<SimulationReport> {
    config.validate()?;
    let exact = exact_success(strategy)?;
    let cards = card_states();
    let tables: Vec<DealTable> = all_deals()
        .iter()
        .map(|deal| {
            let branches = strategy.branches(&cards, deal);
            DealTable {
                alice: deal.alice.index(),
                cdf: cumulative(branches.iter().map(|b| b.probability)),
                guesses: branches.iter().map(|b| b.guess).collect(),
            }
        })
        .collect();

    let shards = u64::from(config.shards);
    let (base, extra) = (config.trials / shards, config.trials % shards);
    let successes: u64 = (0..shards)
        .into_par_iter()
        .map(|i| {
            let n = base + u64::from(i < extra);
            run_shard(&tables, n, derive_seed(config.seed, i))
        })
        .sum();

    let estimate = successes as f64 / config.trials as f64;
    let std_error = (estimate * (1.0 - estimate) / config.trials as f64).sqrt();
    let z_score = (std_error > 0.0).then(|| (estimate - exact) / std_error);
    Ok(SimulationReport {
        estimate,
        std_error,
        trials: config.trials,
        successes,
        seed: config.seed,
        shards: config.shards,
        exact_reference: Some(exact),
        z_score,
    })
}

/// How a reported value was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    ClosedForm,
    Enumeration,
    Optimization,
    Simulation,
}

/// One evaluated quantity, as emitted by the report command.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StrategyReport {
    pub name: String,
    pub value: f64,
    pub method: Method,
    /// Value the quantity is checked against.
    pub reference: f64,
    pub deviation: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub parameters: serde_json::Value,
}

impl StrategyReport {
    pub fn new(
        name: &str,
        value: f64,
        method: Method,
        reference: f64,
        tolerance: f64,
        parameters: serde_json::Value,
    ) -> Self {
        let deviation = (value - reference).abs();
        Self {
            name: name.to_string(),
            value,
            method,
            reference,
            deviation,
            tolerance,
            pass: deviation <= tolerance,
            parameters,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bob_separate::{FirstStage, SecondStage};
    use crate::game::UNIFORM_GUESS;
    use std::f64::consts::PI;

    fn alice_best() -> StrategySpec {
        StrategySpec::Alice {
            alpha: AliceAngle::new(PI / 12.0).unwrap(),
            strategy: AliceStrategy::Strategy1,
        }
    }

    fn uniform() -> StrategySpec {
        StrategySpec::BobSeparate(SequentialProtocol {
            first: FirstStage::Uniform,
            second: SecondStage::Uniform,
        })
    }

    #[test]
    fn exact_values() {
        let p = exact_success(&alice_best()).unwrap();
        assert!((p - (2.0 + 3f64.sqrt()) / 6.0).abs() < 1e-12);
        let c = StrategySpec::bob_collective(&CoefficientSet::known_optimum(), GuessChoice::III)
            .unwrap();
        assert!((exact_success(&c).unwrap() - (3.0 + 2f64.sqrt()) / 6.0).abs() < 1e-12);
        assert!((exact_success(&uniform()).unwrap() - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_collective_frame() {
        let e = Ket::basis(4, 0).unwrap();
        let spec = StrategySpec::BobCollective {
            frame: [e.clone(), e.clone(), e.clone(), e],
            guesses: [UNIFORM_GUESS; 4],
        };
        assert!(exact_success(&spec).is_err());
    }

    #[test]
    fn config_validation() {
        assert!(SimulationConfig::new(0, 1, 1).is_err());
        assert!(SimulationConfig::new(10, 1, 0).is_err());
        assert!(SimulationConfig::new(3, 1, 4).is_err());
        assert!(SimulationConfig::new(4, 1, 4).is_ok());
    }

    #[test]
    fn single_trial_report() {
        let r = simulate(&alice_best(), &SimulationConfig::new(1, 5, 1).unwrap()).unwrap();
        assert!(r.estimate == 0.0 || r.estimate == 1.0);
        assert_eq!(r.std_error, 0.0);
        assert_eq!(r.z_score, None);
    }

    #[test]
    fn simulation_is_reproducible_per_config() {
        for shards in [1, 4, 16] {
            let cfg = SimulationConfig::new(20_000, 99, shards).unwrap();
            let a = simulate(&alice_best(), &cfg).unwrap();
            let b = simulate(&alice_best(), &cfg).unwrap();
            assert_eq!(a.estimate.to_bits(), b.estimate.to_bits());
            assert_eq!(a, b);
        }
    }

    #[test]
    fn uniform_simulation_near_a_third() {
        let r = simulate(&uniform(), &SimulationConfig::new(1_000_000, 3, 8).unwrap()).unwrap();
        assert!(r.z_score.unwrap().abs() < 5.0, "{r:?}");
        assert!((r.estimate - 1.0 / 3.0).abs() < 5.0 * r.std_error);
    }

    #[test]
    fn std_error_formula() {
        let r = simulate(&alice_best(), &SimulationConfig::new(1000, 11, 2).unwrap()).unwrap();
        let expect = (r.estimate * (1.0 - r.estimate) / 1000.0).sqrt();
        assert_eq!(r.std_error, expect);
        assert_eq!(r.successes as f64 / 1000.0, r.estimate);
    }

    #[test]
    fn derived_seeds_differ() {
        let s: Vec<u64> = (0..16).map(|i| derive_seed(42, i)).collect();
        let mut d = s.clone();
        d.sort();
        d.dedup();
        assert_eq!(d.len(), 16);
    }

    #[test]
    fn pick_inverse_cdf() {
        let cdf = [0.25, 0.5, 1.0];
        assert_eq!(pick(&cdf, 0.0), 0);
        assert_eq!(pick(&cdf, 0.3), 1);
        assert_eq!(pick(&cdf, 0.99), 2);
        assert_eq!(pick(&cdf, 1.5), 2);
    }
}
