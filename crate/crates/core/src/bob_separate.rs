//! Bob measures his two cards one at a time.
//!
//! The first card is measured like Alice's and read as a label `g1`. The
//! second card is then discriminated, with the optimal two-outcome
//! measurement for two equiprobable pure states, between the two labels
//! other than `g1`. Bob names the label missing from `{g1, g2}`.
//!
//! [`closed_forms`] gives the factorized closed forms for this protocol;
//! [`enumerate_sequential`] sums the full outcome tree with no
//! independence assumptions, and the two are reported side by side.

use std::f64::consts::PI;

use serde::Serialize;

use crate::alice::{AliceAngle, AliceStrategy, Outcome};
use crate::game::{
    all_deals, card_states, certain, infer_alice, Branch, CardLabel, CardTriple, GuessDist,
};
use crate::linalg::{inner, outer, Ket};
use crate::optim::golden_section_max;
use crate::{QcardError, Result};

/// Optimal success probability for telling `u` from `v` with prior
/// `prior_u` on `u`.
pub fn helstrom_pair(u: &Ket, v: &Ket, prior_u: f64) -> Result<f64> {
    check_pair(u, v, prior_u)?;
    let overlap = inner(u, v)?.norm_sqr();
    let disc = 1.0 - 4.0 * prior_u * (1.0 - prior_u) * overlap;
    Ok(0.5 * (1.0 + disc.max(0.0).sqrt()))
}

fn check_pair(u: &Ket, v: &Ket, prior_u: f64) -> Result<()> {
    if !u.is_normalized() || !v.is_normalized() {
        return Err(QcardError::InvalidArgument(
            "discriminated states must be normalized".into(),
        ));
    }
    if u.dim() != 2 || v.dim() != 2 {
        return Err(QcardError::InvalidArgument(
            "discriminated states must be single cards".into(),
        ));
    }
    if !(0.0..=1.0).contains(&prior_u) {
        return Err(QcardError::InvalidArgument(format!(
            "prior {prior_u} outside [0, 1]"
        )));
    }
    Ok(())
}

/// Projective measurement attaining [`helstrom_pair`]: `[e_u, e_v]`, where
/// outcome `e_u` is read as `u`. The two kets are the eigenvectors of
/// `p|u⟩⟨u| − (1−p)|v⟩⟨v|` for its larger and smaller eigenvalue.
pub fn helstrom_measurement(u: &Ket, v: &Ket, prior_u: f64) -> Result<[Ket; 2]> {
    check_pair(u, v, prior_u)?;
    let diff = outer(u, u)?
        .scale(prior_u)
        .add(&outer(v, v)?.scale(-(1.0 - prior_u)))?;
    let (_, mut vecs) = diff.eigh();
    let e_u = vecs.pop().expect("two eigenvectors");
    let e_v = vecs.pop().expect("two eigenvectors");
    Ok([e_u, e_v])
}

/// How Bob reads his first card.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum FirstStage {
    /// Measure along `(cos axis, sin axis)` and guess by outcome.
    Projective {
        axis: f64,
        up: GuessDist,
        down: GuessDist,
    },
    /// Knows the first card exactly.
    Oracle,
    /// Guesses uniformly without measuring.
    Uniform,
}

/// How Bob reads his second card, given the first guess.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SecondStage {
    /// Optimal equal-prior discrimination between the two labels other than
    /// the first guess.
    Helstrom,
    /// Picks one of the two labels other than the first guess at random.
    Uniform,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SequentialProtocol {
    pub first: FirstStage,
    pub second: SecondStage,
}

impl SequentialProtocol {
    /// First card measured with Alice's `strategy` at `alpha`; second card
    /// by Helstrom discrimination.
    pub fn with_first(alpha: AliceAngle, strategy: AliceStrategy) -> Self {
        Self {
            first: FirstStage::Projective {
                axis: alpha.radians(),
                up: strategy.guess(Outcome::Up),
                down: strategy.guess(Outcome::Down),
            },
            second: SecondStage::Helstrom,
        }
    }

    /// Strategy 1 at `π/12`, then Helstrom.
    pub fn standard() -> Self {
        Self::with_first(
            AliceAngle::new(PI / 12.0).expect("in range"),
            AliceStrategy::Strategy1,
        )
    }

    pub fn validate(&self) -> Result<()> {
        if let FirstStage::Projective { axis, up, down } = &self.first {
            if !axis.is_finite() {
                return Err(QcardError::InvalidArgument("non-finite axis".into()));
            }
            for rule in [up, down] {
                let total: f64 = rule.iter().sum();
                if rule.iter().any(|&p| !(0.0..=1.0).contains(&p)) || (total - 1.0).abs() > 1e-12 {
                    return Err(QcardError::InvalidArgument(format!(
                        "guess rule {rule:?} is not a distribution"
                    )));
                }
            }
        }
        Ok(())
    }

    /// `(probability, first guess)` pairs for a first card `first`.
    fn first_guesses(&self, cards: &CardTriple, first: CardLabel) -> Vec<(f64, CardLabel)> {
        match &self.first {
            FirstStage::Projective { axis, up, down } => {
                let (s, c) = axis.sin_cos();
                let up_ket = Ket::real(&[c, s]).expect("dim 2");
                let p_up = inner(&up_ket, cards.state(first))
                    .expect("dim 2")
                    .norm_sqr();
                let mut out = Vec::with_capacity(6);
                for (p, rule) in [(p_up, up), (1.0 - p_up, down)] {
                    for label in CardLabel::ALL {
                        let w = rule[label.index()];
                        if w > 0.0 {
                            out.push((p * w, label));
                        }
                    }
                }
                out
            }
            FirstStage::Oracle => vec![(1.0, first)],
            FirstStage::Uniform => CardLabel::ALL.iter().map(|&l| (1.0 / 3.0, l)).collect(),
        }
    }

    /// Outcome tree for Bob holding `(first, second)`.
    pub fn branches(&self, cards: &CardTriple, first: CardLabel, second: CardLabel) -> Vec<Branch> {
        let mut out = Vec::with_capacity(12);
        for (p1, g1) in self.first_guesses(cards, first) {
            let others: Vec<CardLabel> = CardLabel::ALL.into_iter().filter(|&l| l != g1).collect();
            let (r0, r1) = (others[0], others[1]);
            let second_guesses: [(f64, CardLabel); 2] = match self.second {
                SecondStage::Helstrom => {
                    let [e0, e1] =
                        helstrom_measurement(cards.state(r0), cards.state(r1), 0.5)
                            .expect("card states are normalized");
                    let y = cards.state(second);
                    [
                        (inner(&e0, y).expect("dim 2").norm_sqr(), r0),
                        (inner(&e1, y).expect("dim 2").norm_sqr(), r1),
                    ]
                }
                SecondStage::Uniform => [(0.5, r0), (0.5, r1)],
            };
            for (p2, g2) in second_guesses {
                out.push(Branch {
                    probability: p1 * p2,
                    guess: resolve(g1, g2),
                });
            }
        }
        out
    }
}

/// Final guess from the two card guesses. If they name the same label the
/// guess is uniform over the other two.
pub fn resolve(g1: CardLabel, g2: CardLabel) -> GuessDist {
    match infer_alice(g1, g2) {
        Ok(label) => certain(label),
        Err(_) => {
            let mut g = [0.5; 3];
            g[g1.index()] = 0.0;
            g
        }
    }
}

/// Exact success probability of `protocol`, summed over every deal and
/// every outcome of both measurements.
pub fn enumerate_sequential(protocol: &SequentialProtocol) -> Result<f64> {
    enumerate_sequential_with(&card_states(), protocol)
}

pub fn enumerate_sequential_with(cards: &CardTriple, protocol: &SequentialProtocol) -> Result<f64> {
    protocol.validate()?;
    let mut total = 0.0;
    for d in all_deals() {
        for b in protocol.branches(cards, d.bob_first, d.bob_second) {
            total += d.probability * b.probability * b.guess[d.alice.index()];
        }
    }
    Ok(total)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SeparateReport {
    pub p1: f64,
    pub p2: f64,
    pub p12: f64,
    pub p21: f64,
    pub p_sep: f64,
    pub enumeration_p_sep: Option<f64>,
    /// `enumeration_p_sep − p_sep`.
    pub discrepancy: Option<f64>,
}

/// The factorized closed forms: first card right with `P1`, second right
/// with `P2`, plus the branch where both card guesses are wrong but the
/// inferred label is still right.
pub fn closed_forms() -> SeparateReport {
    let s3 = 3f64.sqrt();
    let p1 = (2.0 + s3) / 6.0;
    let p2 = (2.0 + s3) / 4.0;
    let p12 = p1 * p2;
    let p21 = (1.0 - p1) * 0.5 * 0.5;
    SeparateReport {
        p1,
        p2,
        p12,
        p21,
        p_sep: p12 + p21,
        enumeration_p_sep: None,
        discrepancy: None,
    }
}

/// Closed forms plus the enumeration of `protocol`.
pub fn separate_report(protocol: &SequentialProtocol) -> Result<SeparateReport> {
    let mut report = closed_forms();
    let exact = enumerate_sequential(protocol)?;
    report.enumeration_p_sep = Some(exact);
    report.discrepancy = Some(exact - report.p_sep);
    Ok(report)
}

/// Best first-stage angle for a fixed first-stage strategy, with Helstrom
/// second stage: `(alpha, probability)`.
pub fn optimize_first_stage(strategy: AliceStrategy, refine_tol: f64) -> Result<(f64, f64)> {
    let domain = strategy.domain();
    let objective = |x: f64| {
        AliceAngle::new(x)
            .map(|a| {
                enumerate_sequential(&SequentialProtocol::with_first(a, strategy))
                    .unwrap_or(f64::NEG_INFINITY)
            })
            .unwrap_or(f64::NEG_INFINITY)
    };
    if domain.hi <= domain.lo {
        return Ok((domain.lo, objective(domain.lo)));
    }
    // coarse scan brackets the peak before golden-section refinement
    let grid = domain.grid((domain.hi - domain.lo) / 64.0)?;
    let (i, _) = grid
        .iter()
        .map(|&x| objective(x))
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(&b.1))
        .expect("non-empty grid");
    let step = (domain.hi - domain.lo) / 64.0;
    let lo = (grid[i] - step).max(domain.lo);
    let hi = (grid[i] + step).min(domain.hi);
    let (x, fx) = golden_section_max(objective, lo, hi, refine_tol);
    Ok((x, fx))
}
