//! The card ensemble, the six deals and the states they induce.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::linalg::{outer, tensor, Ket, Operator};
use crate::{QcardError, Result};

/// One of the three card labels `1`, `2`, `3`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub struct CardLabel(u8);

impl CardLabel {
    pub const ONE: CardLabel = CardLabel(1);
    pub const TWO: CardLabel = CardLabel(2);
    pub const THREE: CardLabel = CardLabel(3);
    pub const ALL: [CardLabel; 3] = [Self::ONE, Self::TWO, Self::THREE];

    pub fn new(value: u8) -> Result<Self> {
        match value {
            1..=3 => Ok(Self(value)),
            other => Err(QcardError::InvalidArgument(format!(
                "card label must be 1, 2 or 3, got {other}"
            ))),
        }
    }

    pub fn value(self) -> u8 {
        self.0
    }

    /// Zero-based position, for indexing three-element arrays.
    pub fn index(self) -> usize {
        usize::from(self.0 - 1)
    }

    pub fn from_index(index: usize) -> Self {
        Self::ALL[index]
    }
}

impl TryFrom<u8> for CardLabel {
    type Error = QcardError;
    fn try_from(value: u8) -> Result<Self> {
        Self::new(value)
    }
}

impl From<CardLabel> for u8 {
    fn from(label: CardLabel) -> u8 {
        label.0
    }
}

impl fmt::Display for CardLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "psi{}", self.0)
    }
}

/// The three card states, indexed by label.
#[derive(Debug, Clone, PartialEq)]
pub struct CardTriple {
    states: [Ket; 3],
}

impl CardTriple {
    pub fn new(states: [Ket; 3]) -> Result<Self> {
        for s in &states {
            if s.dim() != 2 {
                return Err(QcardError::DimensionMismatch {
                    left: 2,
                    right: s.dim(),
                });
            }
        }
        Ok(Self { states })
    }

    pub fn state(&self, label: CardLabel) -> &Ket {
        &self.states[label.index()]
    }

    pub fn states(&self) -> &[Ket; 3] {
        &self.states
    }

    /// Two-card ket with `first` as the major tensor factor.
    pub fn pair(&self, first: CardLabel, second: CardLabel) -> Ket {
        tensor(self.state(first), self.state(second)).expect("2 x 2 tensor")
    }

    /// Every card rotated by `theta` within the real plane the cards live in
    /// (a spin rotation about the Y axis).
    pub fn rotated(&self, theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        let states = self.states.clone().map(|k| {
            let a = k.amplitudes();
            Ket::new(vec![c * a[0] - s * a[1], s * a[0] + c * a[1]]).expect("dim 2")
        });
        Self { states }
    }
}

/// `|ψ1⟩ = (1, 0)`, `|ψ2⟩ = (1/2, √3/2)`, `|ψ3⟩ = (−1/2, √3/2)`.
pub fn card_states() -> CardTriple {
    let h = 3f64.sqrt() / 2.0;
    let k = |a: f64, b: f64| Ket::real(&[a, b]).expect("dim 2");
    CardTriple {
        states: [k(1.0, 0.0), k(0.5, h), k(-0.5, h)],
    }
}

/// Probability distribution of a guess over the three labels, indexed by
/// [`CardLabel::index`].
pub type GuessDist = [f64; 3];

/// Point mass on one label.
pub fn certain(label: CardLabel) -> GuessDist {
    let mut g = [0.0; 3];
    g[label.index()] = 1.0;
    g
}

pub const UNIFORM_GUESS: GuessDist = [1.0 / 3.0; 3];

/// One leaf of a strategy's outcome tree for a fixed deal: the Born
/// probability of reaching it and the guess made there.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Branch {
    pub probability: f64,
    pub guess: GuessDist,
}

/// One equiprobable assignment of the cards.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Deal {
    pub alice: CardLabel,
    pub bob_first: CardLabel,
    pub bob_second: CardLabel,
    pub probability: f64,
}

/// All six deals, ordered by `(alice, bob_first)`.
pub fn all_deals() -> [Deal; 6] {
    let mut deals = Vec::with_capacity(6);
    for alice in CardLabel::ALL {
        for bob_first in CardLabel::ALL {
            if bob_first == alice {
                continue;
            }
            let bob_second = infer_alice(alice, bob_first).expect("distinct labels");
            deals.push(Deal {
                alice,
                bob_first,
                bob_second,
                probability: 1.0 / 6.0,
            });
        }
    }
    deals.try_into().expect("six permutations")
}

/// Full three-card state, Alice's card as the first tensor factor.
pub fn composite_rho() -> Operator {
    composite_rho_for(&card_states())
}

pub fn composite_rho_for(cards: &CardTriple) -> Operator {
    let mut rho = Operator::zeros(8).expect("dim 8");
    for d in all_deals() {
        let v = tensor(cards.state(d.alice), &cards.pair(d.bob_first, d.bob_second))
            .expect("2 x 4 tensor");
        let proj = outer(&v, &v).expect("same dim").scale(d.probability);
        rho = rho.add(&proj).expect("same dim");
    }
    rho
}

/// Alice's reduced state, `(1/3) Σ |ψi⟩⟨ψi|`.
pub fn rho_a() -> Operator {
    rho_a_for(&card_states())
}

pub fn rho_a_for(cards: &CardTriple) -> Operator {
    let mut rho = Operator::zeros(2).expect("dim 2");
    for s in cards.states() {
        rho = rho.add(&outer(s, s).expect("same dim")).expect("same dim");
    }
    rho.scale(1.0 / 3.0)
}

/// Bob's reduced state, the uniform mixture of the six ordered pairs.
pub fn rho_b() -> Operator {
    let cards = card_states();
    let mut rho = Operator::zeros(4).expect("dim 4");
    for d in all_deals() {
        let v = cards.pair(d.bob_first, d.bob_second);
        rho = rho
            .add(&outer(&v, &v).expect("same dim").scale(d.probability))
            .expect("same dim");
    }
    rho
}

/// The one label Bob does not hold.
pub fn infer_alice(first: CardLabel, second: CardLabel) -> Result<CardLabel> {
    if first == second {
        return Err(QcardError::InvalidArgument(format!(
            "Bob's cards must differ, got {first} twice"
        )));
    }
    Ok(CardLabel::from_index(3 - first.index() - second.index()))
}
