//! Bob measures both cards at once in an orthonormal basis
//! `{φ1, φ2, φ3, φ4}` of the two-card space.
//!
//! Outcome `φ1` is read as "Bob holds cards 1 and 2" and so names card 3,
//! `φ2` names card 1 and `φ3` names card 2. Outcome `φ4` is handled by a
//! [`GuessChoice`].
//!
//! The first three vectors are expanded in three auxiliary orthonormal
//! bases, one per unordered pair of cards:
//!
//! ```text
//! |A1⟩ = √(2/5) (|A⟩ + |A'⟩)          |A⟩ = |ψ1ψ2⟩, |A'⟩ = |ψ2ψ1⟩
//! |A2⟩ = √(2/3) (|A⟩ − |A'⟩)
//! |A3⟩ = √(2/3) (|ψ1ψ1⟩ − |ψ2ψ2⟩)
//! |A4⟩ = (1/3)√(2/5) (|ψ1ψ1⟩ + |ψ2ψ2⟩ + 4|ψ3ψ3⟩)
//! ```
//!
//! with `B` and `C` obtained by the cyclic shift `1 → 2 → 3 → 1`
//! (`|B⟩ = |ψ2ψ3⟩`, `|C⟩ = |ψ3ψ1⟩`). Real coefficient vectors `a`, `b`, `c`
//! then give `φ1 = Σ a_k |A_k⟩`, `φ2 = Σ b_k |B_k⟩`, `φ3 = Σ c_k |C_k⟩`, and
//! `φ4` completes the frame.

use nalgebra::Matrix4x3;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::engine::derive_seed;
use crate::game::{all_deals, card_states, certain, CardLabel, GuessDist, UNIFORM_GUESS};
use crate::linalg::{gram_residual, gram_schmidt, inner, Ket};
use crate::optim::{nelder_mead, NelderMeadOptions};
use crate::tolerances;
use crate::{QcardError, Result};

type Vec4 = [f64; 4];

fn dot(u: &Vec4, v: &Vec4) -> f64 {
    u[0] * v[0] + u[1] * v[1] + u[2] * v[2] + u[3] * v[3]
}

fn combine(coeffs: &Vec4, basis: &[Vec4; 4]) -> Vec4 {
    let mut out = [0.0; 4];
    for (c, v) in coeffs.iter().zip(basis) {
        for (o, x) in out.iter_mut().zip(v) {
            *o += c * x;
        }
    }
    out
}

fn to_vec4(k: &Ket) -> Vec4 {
    let r = k.real_parts();
    [r[0], r[1], r[2], r[3]]
}

fn to_ket(v: &Vec4) -> Ket {
    Ket::real(v).expect("dim 4")
}

/// The three auxiliary bases, `A`, `B`, `C` in that order.
#[derive(Debug, Clone, PartialEq)]
pub struct AuxBases {
    pub a: [Ket; 4],
    pub b: [Ket; 4],
    pub c: [Ket; 4],
}

impl AuxBases {
    pub fn all(&self) -> [&[Ket; 4]; 3] {
        [&self.a, &self.b, &self.c]
    }

    fn real(&self) -> [[Vec4; 4]; 3] {
        self.all().map(|basis| basis.each_ref().map(to_vec4))
    }
}

pub fn aux_bases() -> AuxBases {
    let cards = card_states();
    let block = |i: u8, j: u8, l: u8| -> [Ket; 4] {
        let [i, j, l] = [i, j, l].map(|x| CardLabel::new(x).expect("valid label"));
        let x = cards.pair(i, j);
        let xp = cards.pair(j, i);
        let (ii, jj, ll) = (cards.pair(i, i), cards.pair(j, j), cards.pair(l, l));
        let r25 = (2.0f64 / 5.0).sqrt();
        let r23 = (2.0f64 / 3.0).sqrt();
        [
            r25 * &(&x + &xp),
            r23 * &(&x - &xp),
            r23 * &(&ii - &jj),
            (r25 / 3.0) * &(&(&ii + &jj) + &(4.0 * &ll)),
        ]
    };
    AuxBases {
        a: block(1, 2, 3),
        b: block(2, 3, 1),
        c: block(3, 1, 2),
    }
}

/// Coefficients of `φ1`, `φ2`, `φ3` in the `A`, `B`, `C` bases.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CoefficientSet {
    pub a: Vec4,
    pub b: Vec4,
    pub c: Vec4,
}

impl CoefficientSet {
    /// `a1 = b1 = c1 = (4+√2)/√30`, `a4 = b4 = −c4 = (2−√2)/√15`, rest zero.
    pub fn known_optimum() -> Self {
        let r2 = 2f64.sqrt();
        let x1 = (4.0 + r2) / 30f64.sqrt();
        let x4 = (2.0 - r2) / 15f64.sqrt();
        Self {
            a: [x1, 0.0, 0.0, x4],
            b: [x1, 0.0, 0.0, x4],
            c: [x1, 0.0, 0.0, -x4],
        }
    }

    /// Expands three given measurement vectors in the auxiliary bases.
    pub fn from_vectors(phi: [&Ket; 3]) -> Result<Self> {
        let aux = aux_bases();
        let mut out = [[0.0; 4]; 3];
        for ((row, basis), v) in out.iter_mut().zip(aux.all()).zip(phi) {
            for (x, e) in row.iter_mut().zip(basis) {
                *x = inner(e, v)?.re;
            }
        }
        Ok(Self {
            a: out[0],
            b: out[1],
            c: out[2],
        })
    }

    pub fn rows(&self) -> [Vec4; 3] {
        [self.a, self.b, self.c]
    }

    fn from_rows(rows: [Vec4; 3]) -> Self {
        Self {
            a: rows[0],
            b: rows[1],
            c: rows[2],
        }
    }

    /// Flips the sign of each row so its first non-negligible entry is
    /// positive. Success probabilities are invariant under these flips.
    pub fn canonical(&self) -> Self {
        Self::from_rows(self.rows().map(|row| {
            let lead = row.iter().copied().find(|x| x.abs() > 1e-12).unwrap_or(0.0);
            if lead < 0.0 {
                row.map(|x| -x)
            } else {
                row
            }
        }))
    }
}

/// What Bob guesses on outcome `φ4`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum GuessChoice {
    /// Always the given card.
    Fixed(CardLabel),
    /// One of the two given cards, evenly.
    Pair(CardLabel, CardLabel),
    /// Any of the three cards, evenly.
    Uniform,
}

impl GuessChoice {
    /// Choice I: guess card 3.
    pub const I: GuessChoice = GuessChoice::Fixed(CardLabel::THREE);
    /// Choice II: guess card 3 or card 1.
    pub const II: GuessChoice = GuessChoice::Pair(CardLabel::THREE, CardLabel::ONE);
    /// Choice III: uniform over all three cards.
    pub const III: GuessChoice = GuessChoice::Uniform;

    pub fn guess(self) -> GuessDist {
        match self {
            Self::Fixed(l) => certain(l),
            Self::Pair(x, y) => {
                let mut g = [0.0; 3];
                g[x.index()] += 0.5;
                g[y.index()] += 0.5;
                g
            }
            Self::Uniform => UNIFORM_GUESS,
        }
    }

    pub fn name(self) -> String {
        match self {
            c if c == Self::I => "I".into(),
            c if c == Self::II => "II".into(),
            c if c == Self::III => "III".into(),
            Self::Fixed(l) => format!("fixed({})", l.value()),
            Self::Pair(x, y) => format!("pair({},{})", x.value(), y.value()),
            Self::Uniform => "III".into(),
        }
    }
}

/// Guess rule for outcomes `φ1..φ4`.
pub fn guess_map(choice: GuessChoice) -> [GuessDist; 4] {
    [
        certain(CardLabel::THREE),
        certain(CardLabel::ONE),
        certain(CardLabel::TWO),
        choice.guess(),
    ]
}

#[derive(Debug, Clone, PartialEq)]
pub struct CollectiveBasis {
    pub phi: [Ket; 4],
    /// Coefficients after internal re-orthonormalization.
    pub coefficients: CoefficientSet,
    pub gram_residual: f64,
}

/// Nearest orthonormal triple to the columns of `m` (polar factor).
fn polar(m: Matrix4x3<f64>) -> Matrix4x3<f64> {
    let svd = m.svd(true, true);
    svd.u.expect("u requested") * svd.v_t.expect("v_t requested")
}

fn columns(vs: &[Vec4; 3]) -> Matrix4x3<f64> {
    Matrix4x3::from_fn(|i, j| vs[j][i])
}

fn uncolumns(m: &Matrix4x3<f64>) -> [Vec4; 3] {
    [0, 1, 2].map(|j| [m[(0, j)], m[(1, j)], m[(2, j)], m[(3, j)]])
}

/// The unit vector orthogonal to `phi[0..3]`, canonically signed.
fn complement(phi: &[Ket; 3]) -> Result<Ket> {
    let mut best: Option<(f64, Ket)> = None;
    for k in 0..4 {
        let e = Ket::basis(4, k)?;
        let mut w = e.clone();
        for q in phi {
            w = &w - &q.scale(inner(q, &w)?);
        }
        let n = w.norm();
        if best.as_ref().is_none_or(|(m, _)| n > *m) {
            best = Some((n, e));
        }
    }
    let (_, e) = best.expect("four candidates");
    let full = gram_schmidt(&[phi[0].clone(), phi[1].clone(), phi[2].clone(), e])?;
    Ok(full[3].clone())
}

/// Assembles `{φ1..φ4}` from coefficients.
pub fn build_basis(coeffs: &CoefficientSet) -> Result<CollectiveBasis> {
    let aux = aux_bases().real();
    let mut rows = coeffs.rows();
    for (name, row) in ["a", "b", "c"].iter().zip(rows.iter_mut()) {
        let n2: f64 = row.iter().map(|x| x * x).sum();
        if !n2.is_finite() || (n2 - 1.0).abs() > tolerances::COEFF_INPUT {
            return Err(QcardError::InvalidArgument(format!(
                "coefficients {name} have squared norm {n2}, expected 1"
            )));
        }
        let n = n2.sqrt();
        row.iter_mut().for_each(|x| *x /= n);
    }
    let raw: [Vec4; 3] = [0, 1, 2].map(|i| combine(&rows[i], &aux[i]));
    for (i, j) in [(0, 1), (0, 2), (1, 2)] {
        let residual = dot(&raw[i], &raw[j]);
        if residual.abs() > tolerances::CROSS_ORTHOGONALITY {
            return Err(QcardError::Constraint {
                i: i + 1,
                j: j + 1,
                residual,
            });
        }
    }
    let polished = uncolumns(&polar(columns(&raw)));
    let first: [Ket; 3] = polished.each_ref().map(to_ket);
    let phi4 = complement(&first)?;
    let [p1, p2, p3] = first;
    let phi = [p1, p2, p3, phi4];
    let gram = gram_residual(&phi)?;
    if gram > tolerances::COLLECTIVE_BASIS {
        return Err(QcardError::Constraint {
            i: 1,
            j: 4,
            residual: gram,
        });
    }
    let coefficients = CoefficientSet::from_vectors([&phi[0], &phi[1], &phi[2]])?;
    Ok(CollectiveBasis {
        phi,
        coefficients,
        gram_residual: gram,
    })
}

/// Born-rule success of measuring in `frame` and guessing per `guesses`,
/// summed over the six deals.
pub fn evaluate_frame(frame: &[Ket; 4], guesses: &[GuessDist; 4]) -> Result<f64> {
    let cards = card_states();
    let mut total = 0.0;
    for d in all_deals() {
        let state = cards.pair(d.bob_first, d.bob_second);
        for (phi, g) in frame.iter().zip(guesses) {
            total += d.probability * inner(phi, &state)?.norm_sqr() * g[d.alice.index()];
        }
    }
    Ok(total)
}

/// Success probability for the basis built from `coeffs`, by enumeration.
pub fn success_combined(coeffs: &CoefficientSet, choice: GuessChoice) -> Result<f64> {
    let basis = build_basis(coeffs)?;
    evaluate_frame(&basis.phi, &guess_map(choice))
}

/// Closed polynomial form of the choice-III success probability in terms of
/// the coefficients; a cross-check on [`success_combined`].
pub fn success_polynomial(coeffs: &CoefficientSet) -> f64 {
    let (a, b, c) = (coeffs.a, coeffs.b, coeffs.c);
    let sq = |k: usize| a[k] * a[k] + b[k] * b[k] + c[k] * c[k];
    1.0 / 3.0 + 2.0 / 15.0 * sq(0) - 1.0 / 12.0 * sq(2) - 1.0 / 20.0 * sq(3)
        + 1.0 / 30.0 * (a[0] * a[3] + b[0] * b[3] - c[0] * c[3])
}

/// Real deal vectors and aux bases, laid out for repeated evaluation.
struct Model {
    deals: [(usize, Vec4); 6],
    aux: [[Vec4; 4]; 3],
}

impl Model {
    fn new() -> Self {
        let cards = card_states();
        let deals = all_deals().map(|d| (d.alice.index(), to_vec4(&cards.pair(d.bob_first, d.bob_second))));
        Self {
            deals,
            aux: aux_bases().real(),
        }
    }

    /// Success for orthonormal `φ1..φ3`; the `φ4` term uses completeness,
    /// `|⟨d|φ4⟩|² = 1 − Σ_k |⟨d|φk⟩|²`.
    fn success(&self, phi: &[Vec4; 3], guesses: &[GuessDist; 4]) -> f64 {
        let mut total = 0.0;
        for (alice, d) in &self.deals {
            let mut rest = 1.0;
            for (p, g) in phi.iter().zip(guesses) {
                let w = dot(d, p).powi(2);
                rest -= w;
                total += w * g[*alice];
            }
            total += rest * guesses[3][*alice];
        }
        total / 6.0
    }

    fn vectors(&self, raw: &[f64]) -> ([Vec4; 3], [Vec4; 3]) {
        let mut rows = [[0.0; 4]; 3];
        for (i, row) in rows.iter_mut().enumerate() {
            let chunk = &raw[4 * i..4 * i + 4];
            let n = chunk.iter().map(|x| x * x).sum::<f64>().sqrt().max(1e-300);
            for (r, x) in row.iter_mut().zip(chunk) {
                *r = x / n;
            }
        }
        let phi = [0, 1, 2].map(|i| combine(&rows[i], &self.aux[i]));
        (rows, phi)
    }
}

/// Weight of the cross-orthogonality penalty in the unconstrained chart.
const PENALTY: f64 = 0.1;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RestartStats {
    pub restarts: usize,
    pub failed: usize,
    pub best_restart: usize,
    pub min: f64,
    pub median: f64,
    pub max: f64,
    pub evaluations: usize,
}

impl RestartStats {
    fn from_values(values: &[(usize, f64, usize)], restarts: usize) -> Self {
        let mut ok: Vec<f64> = values.iter().map(|v| v.1).filter(|v| v.is_finite()).collect();
        ok.sort_by(f64::total_cmp);
        let best_restart = values
            .iter()
            .filter(|v| v.1.is_finite())
            .max_by(|a, b| a.1.total_cmp(&b.1).then(b.0.cmp(&a.0)))
            .map_or(0, |v| v.0);
        Self {
            restarts,
            failed: restarts - ok.len(),
            best_restart,
            min: ok.first().copied().unwrap_or(f64::NAN),
            median: ok.get(ok.len() / 2).copied().unwrap_or(f64::NAN),
            max: ok.last().copied().unwrap_or(f64::NAN),
            evaluations: values.iter().map(|v| v.2).sum(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CollectiveOptimum {
    pub choice: GuessChoice,
    pub coefficients: CoefficientSet,
    pub probability: f64,
    pub stats: RestartStats,
}

fn nm_options() -> NelderMeadOptions {
    NelderMeadOptions {
        initial_step: 0.4,
        f_tol: 1e-14,
        x_tol: 1e-9,
        max_evals: 30_000,
        max_restarts: 6,
    }
}

/// Multi-restart Nelder-Mead over the coefficient chart.
///
/// Each restart draws twelve raw parameters from its own stream, normalizes
/// them row-wise into `a`, `b`, `c`, and minimizes the negative success of
/// the polar-projected (hence orthonormal) triple plus a penalty on the
/// cross-overlaps of the unprojected triple. The winner is re-evaluated
/// through [`build_basis`] and [`success_combined`].
pub fn optimize_collective(choice: GuessChoice, restarts: usize, seed: u64) -> Result<CollectiveOptimum> {
    if restarts == 0 {
        return Err(QcardError::InvalidArgument("restarts must be at least 1".into()));
    }
    let model = Model::new();
    let guesses = guess_map(choice);
    let objective = |raw: &[f64]| -> f64 {
        let (_, phi) = model.vectors(raw);
        let penalty: f64 = [(0, 1), (0, 2), (1, 2)]
            .iter()
            .map(|&(i, j)| dot(&phi[i], &phi[j]).powi(2))
            .sum();
        let q = uncolumns(&polar(columns(&phi)));
        -model.success(&q, &guesses) + PENALTY * penalty
    };

    let runs: Vec<(usize, f64, usize, Option<CoefficientSet>)> = (0..restarts)
        .into_par_iter()
        .map(|r| {
            let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, r as u64));
            let x0: Vec<f64> = (0..12).map(|_| rng.random::<f64>() * 2.0 - 1.0).collect();
            let res = nelder_mead(objective, &x0, &nm_options());
            let (_, phi) = model.vectors(&res.x);
            let q = uncolumns(&polar(columns(&phi)));
            let rows = [0, 1, 2].map(|i| {
                let mut row = [0.0; 4];
                for (x, e) in row.iter_mut().zip(&model.aux[i]) {
                    *x = dot(e, &q[i]);
                }
                row
            });
            let coeffs = CoefficientSet::from_rows(rows).canonical();
            match success_combined(&coeffs, choice) {
                Ok(p) if p.is_finite() => (r, p, res.evals, Some(coeffs)),
                _ => (r, f64::NAN, res.evals, None),
            }
        })
        .collect();

    let stats = RestartStats::from_values(
        &runs.iter().map(|r| (r.0, r.1, r.2)).collect::<Vec<_>>(),
        restarts,
    );
    let best = runs
        .iter()
        .find(|r| r.0 == stats.best_restart && r.3.is_some())
        .ok_or_else(|| QcardError::InvalidArgument("every restart failed".into()))?;
    Ok(CollectiveOptimum {
        choice,
        coefficients: best.3.expect("checked"),
        probability: best.1,
        stats,
    })
}

/// Orthonormal real frame from six planar rotation angles; columns are the
/// frame vectors.
pub fn frame_from_angles(angles: &[f64; 6]) -> [Vec4; 4] {
    let mut q = [[0.0; 4]; 4];
    for (i, row) in q.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    let mut idx = 0;
    for i in 0..4 {
        for j in i + 1..4 {
            let (s, c) = angles[idx].sin_cos();
            idx += 1;
            // q <- q * G(i, j)
            for row in q.iter_mut() {
                let (qi, qj) = (row[i], row[j]);
                row[i] = c * qi + s * qj;
                row[j] = -s * qi + c * qj;
            }
        }
    }
    [0, 1, 2, 3].map(|k| [q[0][k], q[1][k], q[2][k], q[3][k]])
}

/// Success of a frame when every outcome guesses the label with the largest
/// posterior weight; returns the value and the chosen labels.
pub fn best_guess_value(frame: &[Ket; 4]) -> Result<(f64, [CardLabel; 4])> {
    let cards = card_states();
    let mut labels = [CardLabel::ONE; 4];
    let mut total = 0.0;
    for (k, phi) in frame.iter().enumerate() {
        let mut weight = [0.0; 3];
        for d in all_deals() {
            let state = cards.pair(d.bob_first, d.bob_second);
            weight[d.alice.index()] += d.probability * inner(phi, &state)?.norm_sqr();
        }
        let (i, w) = weight
            .iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |best, (i, &w)| if w > best.1 + 1e-15 { (i, w) } else { best });
        labels[k] = CardLabel::from_index(i);
        total += w;
    }
    Ok((total, labels))
}

fn best_guess_fast(model: &Model, frame: &[Vec4; 4]) -> f64 {
    frame
        .iter()
        .map(|phi| {
            let mut weight = [0.0; 3];
            for (alice, d) in &model.deals {
                weight[*alice] += dot(d, phi).powi(2);
            }
            weight.into_iter().fold(f64::NEG_INFINITY, f64::max)
        })
        .sum::<f64>()
        / 6.0
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FullFrameOptimum {
    pub angles: [f64; 6],
    /// Frame vectors as real amplitude rows.
    pub frame: [Vec4; 4],
    pub guesses: [CardLabel; 4],
    pub probability: f64,
    pub stats: RestartStats,
}

impl FullFrameOptimum {
    pub fn kets(&self) -> [Ket; 4] {
        self.frame.each_ref().map(to_ket)
    }
}

/// Multi-restart search over every real orthonormal frame of the two-card
/// space with the best-guess rule; no ansatz.
pub fn optimize_full_frame(restarts: usize, seed: u64) -> Result<FullFrameOptimum> {
    if restarts == 0 {
        return Err(QcardError::InvalidArgument("restarts must be at least 1".into()));
    }
    let model = Model::new();
    let objective = |x: &[f64]| -> f64 {
        let angles: [f64; 6] = x.try_into().expect("six angles");
        -best_guess_fast(&model, &frame_from_angles(&angles))
    };
    let runs: Vec<(usize, f64, usize, [f64; 6])> = (0..restarts)
        .into_par_iter()
        .map(|r| {
            let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed ^ 0xF0F0_F0F0, r as u64));
            let x0: Vec<f64> = (0..6)
                .map(|_| (rng.random::<f64>() * 2.0 - 1.0) * std::f64::consts::PI)
                .collect();
            let res = nelder_mead(objective, &x0, &nm_options());
            let angles: [f64; 6] = res.x.as_slice().try_into().expect("six angles");
            (r, -res.f, res.evals, angles)
        })
        .collect();
    let stats = RestartStats::from_values(
        &runs.iter().map(|r| (r.0, r.1, r.2)).collect::<Vec<_>>(),
        restarts,
    );
    let best = runs
        .iter()
        .find(|r| r.0 == stats.best_restart)
        .expect("at least one restart");
    let frame = frame_from_angles(&best.3);
    let kets = frame.each_ref().map(to_ket);
    let (probability, guesses) = best_guess_value(&kets)?;
    Ok(FullFrameOptimum {
        angles: best.3,
        frame,
        guesses,
        probability,
        stats,
    })
}
