//! Alice's single-card game: a two-outcome spin measurement along
//! `(cos α, sin α)`, the posterior over her card, and three guessing
//! strategies for the spin-down outcome.
//!
//! The posterior table is written in terms of the same angle the
//! measurement is parameterized by, so one angle type serves both.

use std::f64::consts::{FRAC_PI_3, FRAC_PI_6};

use rayon::prelude::*;
use serde::Serialize;

use crate::game::{card_states, rho_a, GuessDist};
use crate::linalg::Ket;
use crate::optim::golden_section_max;
use crate::{QcardError, Result};

/// Measurement angle, restricted to `[-π/6, π/6]`; other angles are
/// equivalent to one in range under the three-fold symmetry of the cards.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize)]
#[serde(transparent)]
pub struct AliceAngle(f64);

impl AliceAngle {
    pub const MAX: f64 = FRAC_PI_6;

    pub fn new(alpha: f64) -> Result<Self> {
        if !alpha.is_finite() || alpha.abs() > Self::MAX + 1e-12 {
            return Err(QcardError::InvalidArgument(format!(
                "angle {alpha} outside [-pi/6, pi/6]"
            )));
        }
        Ok(Self(alpha.clamp(-Self::MAX, Self::MAX)))
    }

    pub fn radians(self) -> f64 {
        self.0
    }

    /// Ket for the spin-up outcome.
    pub fn up_ket(self) -> Ket {
        let (s, c) = self.0.sin_cos();
        Ket::real(&[c, s]).expect("dim 2")
    }

    /// Ket for the spin-down outcome.
    pub fn down_ket(self) -> Ket {
        let (s, c) = self.0.sin_cos();
        Ket::real(&[-s, c]).expect("dim 2")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Up,
    Down,
}

/// Spin-up is always read as card 1; the strategies differ on spin-down.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum AliceStrategy {
    /// Spin-down guesses card 3; intended for `0 < α ≤ π/6`.
    Strategy1,
    /// Spin-down guesses card 2; intended for `-π/6 ≤ α < 0`.
    Strategy2,
    /// Spin-down guesses card 2 or 3 with equal odds; intended for `α = 0`.
    Strategy3,
}

/// Interval of angles, each end open or closed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AngleDomain {
    pub lo: f64,
    pub hi: f64,
    pub lo_open: bool,
    pub hi_open: bool,
}

impl AngleDomain {
    pub fn closed(lo: f64, hi: f64) -> Self {
        Self {
            lo,
            hi,
            lo_open: false,
            hi_open: false,
        }
    }

    pub fn contains(&self, x: f64) -> bool {
        let above = if self.lo_open { x > self.lo } else { x >= self.lo };
        let below = if self.hi_open { x < self.hi } else { x <= self.hi };
        above && below
    }

    /// Grid of spacing `step` inside the domain, starting at the low end.
    pub fn grid(&self, step: f64) -> Result<Vec<f64>> {
        if step.is_nan() || step <= 0.0 || self.lo > self.hi {
            return Err(QcardError::EmptyDomain {
                lo: self.lo,
                hi: self.hi,
            });
        }
        let count = ((self.hi - self.lo) / step).floor() as usize;
        let mut pts: Vec<f64> = (0..=count)
            .map(|i| self.lo + i as f64 * step)
            .filter(|&x| self.contains(x))
            .collect();
        if !self.hi_open && pts.last().is_some_and(|&x| self.hi - x > 1e-15) {
            pts.push(self.hi);
        }
        if pts.is_empty() {
            return Err(QcardError::EmptyDomain {
                lo: self.lo,
                hi: self.hi,
            });
        }
        Ok(pts)
    }
}

impl AliceStrategy {
    pub const ALL: [AliceStrategy; 3] = [Self::Strategy1, Self::Strategy2, Self::Strategy3];

    pub fn number(self) -> u8 {
        match self {
            Self::Strategy1 => 1,
            Self::Strategy2 => 2,
            Self::Strategy3 => 3,
        }
    }

    pub fn from_number(n: u8) -> Result<Self> {
        match n {
            1 => Ok(Self::Strategy1),
            2 => Ok(Self::Strategy2),
            3 => Ok(Self::Strategy3),
            other => Err(QcardError::InvalidArgument(format!(
                "Alice strategy must be 1, 2 or 3, got {other}"
            ))),
        }
    }

    pub fn domain(self) -> AngleDomain {
        match self {
            Self::Strategy1 => AngleDomain {
                lo: 0.0,
                hi: FRAC_PI_6,
                lo_open: true,
                hi_open: false,
            },
            Self::Strategy2 => AngleDomain {
                lo: -FRAC_PI_6,
                hi: 0.0,
                lo_open: false,
                hi_open: true,
            },
            Self::Strategy3 => AngleDomain::closed(0.0, 0.0),
        }
    }

    pub fn in_domain(self, alpha: AliceAngle) -> bool {
        self.domain().contains(alpha.radians())
    }

    pub fn guess(self, outcome: Outcome) -> GuessDist {
        match (self, outcome) {
            (_, Outcome::Up) => [1.0, 0.0, 0.0],
            (Self::Strategy1, Outcome::Down) => [0.0, 0.0, 1.0],
            (Self::Strategy2, Outcome::Down) => [0.0, 1.0, 0.0],
            (Self::Strategy3, Outcome::Down) => [0.0, 0.5, 0.5],
        }
    }
}

/// `(P(up), P(down))` on Alice's reduced state.
pub fn outcome_probs(alpha: AliceAngle) -> (f64, f64) {
    let up = rho_a()
        .expectation(&alpha.up_ket())
        .expect("dim 2 expectation");
    (up, 1.0 - up)
}

/// `P(i | r)` for `i = 1, 2, 3`.
pub fn posterior(alpha: AliceAngle, outcome: Outcome) -> [f64; 3] {
    let t = alpha.radians();
    let f: fn(f64) -> f64 = match outcome {
        Outcome::Up => |x| x.cos().powi(2),
        Outcome::Down => |x| x.sin().powi(2),
    };
    [
        2.0 / 3.0 * f(t),
        2.0 / 3.0 * f(t - FRAC_PI_3),
        2.0 / 3.0 * f(t + FRAC_PI_3),
    ]
}

/// Closed-form success probability of `strategy` at `alpha`. Defined for
/// every angle in range; use [`AliceStrategy::in_domain`] to flag angles
/// outside the strategy's intended interval.
pub fn success_probability(alpha: AliceAngle, strategy: AliceStrategy) -> f64 {
    let a = alpha.radians();
    let up = a.cos().powi(2);
    let plus = (a + FRAC_PI_3).sin().powi(2);
    let minus = (a - FRAC_PI_3).sin().powi(2);
    let down = match strategy {
        AliceStrategy::Strategy1 => plus,
        AliceStrategy::Strategy2 => minus,
        AliceStrategy::Strategy3 => 0.5 * (plus + minus),
    };
    (up + down) / 3.0
}

fn binary_entropy_term(p: f64) -> f64 {
    if p <= 0.0 {
        0.0
    } else {
        -p * p.log2()
    }
}

/// Entropy, in bits, of the success/failure variable averaged over outcomes.
pub fn shannon_entropy(alpha: AliceAngle, strategy: AliceStrategy) -> f64 {
    let (p_up, p_down) = outcome_probs(alpha);
    [(Outcome::Up, p_up), (Outcome::Down, p_down)]
        .into_iter()
        .map(|(r, pr)| {
            let post = posterior(alpha, r);
            let guess = strategy.guess(r);
            let ok: f64 = post.iter().zip(guess).map(|(p, g)| p * g).sum();
            let ok = ok.clamp(0.0, 1.0);
            pr * (binary_entropy_term(ok) + binary_entropy_term(1.0 - ok))
        })
        .sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AliceOptimum {
    pub strategy: AliceStrategy,
    pub alpha: f64,
    pub probability: f64,
    pub grid_points: usize,
}

/// Grid search over the strategy's domain, then golden-section refinement
/// around the best grid point.
pub fn optimize_alice(
    strategy: AliceStrategy,
    grid_step: f64,
    refine_tol: f64,
) -> Result<AliceOptimum> {
    optimize_alice_on(strategy, strategy.domain(), grid_step, refine_tol)
}

pub fn optimize_alice_on(
    strategy: AliceStrategy,
    domain: AngleDomain,
    grid_step: f64,
    refine_tol: f64,
) -> Result<AliceOptimum> {
    if refine_tol.is_nan() || refine_tol <= 0.0 {
        return Err(QcardError::InvalidArgument(format!(
            "refine_tol must be positive, got {refine_tol}"
        )));
    }
    let grid = domain.grid(grid_step)?;
    let objective = |x: f64| match AliceAngle::new(x) {
        Ok(a) => success_probability(a, strategy),
        Err(_) => f64::NEG_INFINITY,
    };
    let values: Vec<f64> = grid.par_iter().map(|&x| objective(x)).collect();
    let (best_i, &best_v) = values
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .expect("non-empty grid");
    let mut alpha = grid[best_i];
    let mut probability = best_v;

    if domain.hi > domain.lo {
        let lo = (alpha - grid_step).max(domain.lo);
        let hi = (alpha + grid_step).min(domain.hi);
        let (x, fx) = golden_section_max(objective, lo, hi, refine_tol);
        if fx >= probability && domain.contains(x) {
            alpha = x;
            probability = fx;
        }
    }
    Ok(AliceOptimum {
        strategy,
        alpha,
        probability,
        grid_points: grid.len(),
    })
}

/// Minimum of [`shannon_entropy`] over a grid of the strategy's domain:
/// `(alpha, entropy)`.
pub fn entropy_argmin(strategy: AliceStrategy, grid_step: f64) -> Result<(f64, f64)> {
    let grid = strategy.domain().grid(grid_step)?;
    let values: Vec<f64> = grid
        .par_iter()
        .map(|&x| shannon_entropy(AliceAngle::new(x).expect("grid inside range"), strategy))
        .collect();
    let (i, &s) = values
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .expect("non-empty grid");
    Ok((grid[i], s))
}

/// Born probability that a card measured along `alpha` yields `outcome`.
pub fn outcome_likelihood(alpha: AliceAngle, outcome: Outcome, card: &Ket) -> f64 {
    let axis = match outcome {
        Outcome::Up => alpha.up_ket(),
        Outcome::Down => alpha.down_ket(),
    };
    crate::linalg::inner(&axis, card)
        .expect("dim 2 kets")
        .norm_sqr()
}

/// Posterior recomputed from Born likelihoods and the uniform prior.
pub fn posterior_from_born(alpha: AliceAngle, outcome: Outcome) -> [f64; 3] {
    let cards = card_states();
    let like: Vec<f64> = cards
        .states()
        .iter()
        .map(|c| outcome_likelihood(alpha, outcome, c))
        .collect();
    let total: f64 = like.iter().sum();
    [like[0] / total, like[1] / total, like[2] / total]
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn a(x: f64) -> AliceAngle {
        AliceAngle::new(x).unwrap()
    }

    #[test]
    fn angle_range_enforced() {
        assert!(AliceAngle::new(PI / 6.0).is_ok());
        assert!(AliceAngle::new(-PI / 6.0).is_ok());
        assert!(AliceAngle::new(0.6).is_err());
        assert!(AliceAngle::new(f64::NAN).is_err());
    }

    #[test]
    fn outcomes_are_even() {
        for x in [0.0, PI / 12.0, -0.3] {
            let (u, d) = outcome_probs(a(x));
            assert!((u - 0.5).abs() < 1e-12);
            assert!((u + d - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn posterior_at_zero() {
        let up = posterior(a(0.0), Outcome::Up);
        let expect = [2.0 / 3.0, 1.0 / 6.0, 1.0 / 6.0];
        for (p, e) in up.iter().zip(expect) {
            assert!((p - e).abs() < 1e-15);
        }
        let down = posterior(a(0.0), Outcome::Down);
        let expect = [0.0, 0.5, 0.5];
        for (p, e) in down.iter().zip(expect) {
            assert!((p - e).abs() < 1e-15);
        }
    }

    #[test]
    fn posterior_matches_born_rule() {
        for x in [-0.5, -0.1, 0.0, 0.2, PI / 12.0, 0.52] {
            for r in [Outcome::Up, Outcome::Down] {
                let table = posterior(a(x), r);
                let born = posterior_from_born(a(x), r);
                assert!((table.iter().sum::<f64>() - 1.0).abs() < 1e-12);
                for (t, b) in table.iter().zip(born) {
                    assert!((t - b).abs() < 1e-12, "{x} {r:?}");
                }
            }
        }
    }

    #[test]
    fn success_values() {
        let best = (2.0 + 3f64.sqrt()) / 6.0;
        let s1 = success_probability(a(PI / 12.0), AliceStrategy::Strategy1);
        assert!((s1 - best).abs() < 1e-15);
        let s2 = success_probability(a(-PI / 12.0), AliceStrategy::Strategy2);
        assert!((s2 - best).abs() < 1e-15);
        let s3 = success_probability(a(0.0), AliceStrategy::Strategy3);
        assert!((s3 - 7.0 / 12.0).abs() < 1e-15);
        assert!(s3 < s1);
    }

    #[test]
    fn strategy3_by_enumeration() {
        // 3 cards x 2 outcomes x the randomized guess, summed directly
        let cards = card_states();
        let alpha = a(0.0);
        let mut total = 0.0;
        for (i, card) in cards.states().iter().enumerate() {
            for r in [Outcome::Up, Outcome::Down] {
                let p = outcome_likelihood(alpha, r, card);
                total += p * AliceStrategy::Strategy3.guess(r)[i] / 3.0;
            }
        }
        assert!((total - 7.0 / 12.0).abs() < 1e-15);
    }

    #[test]
    fn domains() {
        assert!(AliceStrategy::Strategy1.in_domain(a(PI / 6.0)));
        assert!(!AliceStrategy::Strategy1.in_domain(a(0.0)));
        assert!(AliceStrategy::Strategy2.in_domain(a(-PI / 6.0)));
        assert!(!AliceStrategy::Strategy2.in_domain(a(0.0)));
        assert!(AliceStrategy::Strategy3.in_domain(a(0.0)));
        assert!(!AliceStrategy::Strategy3.in_domain(a(0.1)));
    }

    #[test]
    fn empty_domain_is_an_error() {
        let d = AngleDomain::closed(0.3, 0.1);
        assert!(matches!(
            optimize_alice_on(AliceStrategy::Strategy1, d, 1e-3, 1e-9),
            Err(QcardError::EmptyDomain { .. })
        ));
        let open = AngleDomain {
            lo: 0.0,
            hi: 0.0,
            lo_open: true,
            hi_open: false,
        };
        assert!(open.grid(1e-3).is_err());
        assert!(optimize_alice(AliceStrategy::Strategy1, 0.0, 1e-9).is_err());
        assert!(optimize_alice(AliceStrategy::Strategy1, 1e-3, 0.0).is_err());
    }

    #[test]
    fn optimizer_finds_both_mirrors() {
        let best = (2.0 + 3f64.sqrt()) / 6.0;
        let o1 = optimize_alice(AliceStrategy::Strategy1, 1e-3, 1e-10).unwrap();
        assert!((o1.alpha - PI / 12.0).abs() < 1e-6);
        assert!((o1.probability - best).abs() < 1e-9);
        let o2 = optimize_alice(AliceStrategy::Strategy2, 1e-3, 1e-10).unwrap();
        assert!((o2.alpha + PI / 12.0).abs() < 1e-6);
        assert!((o2.probability - best).abs() < 1e-9);
        let o3 = optimize_alice(AliceStrategy::Strategy3, 1e-3, 1e-10).unwrap();
        assert_eq!(o3.alpha, 0.0);
        assert!((o3.probability - 7.0 / 12.0).abs() < 1e-15);
        assert_eq!(o3.grid_points, 1);
    }

    #[test]
    fn entropy_nonnegative_and_finite() {
        for i in -100..=100 {
            let x = i as f64 / 100.0 * PI / 6.0;
            for s in AliceStrategy::ALL {
                let e = shannon_entropy(a(x), s);
                assert!(e.is_finite() && e >= 0.0);
            }
        }
    }

    #[test]
    fn entropy_matches_written_expansion() {
        // Term-by-term expansion of the success/failure entropy for the
        // first strategy, written independently of the implementation.
        let oracle = |x: f64| {
            let c = x.cos().powi(2);
            let s = (x + PI / 3.0).sin().powi(2);
            -(c / 3.0) * (2.0 * c / 3.0).log2()
                - (0.5 - c / 3.0) * (1.0 - 2.0 * c / 3.0).log2()
                - (s / 3.0) * (2.0 * s / 3.0).log2()
                - (0.5 - s / 3.0) * (1.0 - 2.0 * s / 3.0).log2()
        };
        for x in [PI / 12.0, 0.05, 0.3, PI / 6.0] {
            let got = shannon_entropy(a(x), AliceStrategy::Strategy1);
            assert!((got - oracle(x)).abs() < 1e-12, "{x}: {got} vs {}", oracle(x));
        }
    }

    #[test]
    fn entropy_min_at_pi_over_12() {
        let (x, _) = entropy_argmin(AliceStrategy::Strategy1, 1e-5).unwrap();
        assert!((x - PI / 12.0).abs() < 1e-4);
    }
}
