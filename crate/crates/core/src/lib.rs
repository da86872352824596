//! Optimal guessing strategies for a three-card quantum guessing game.
//!
//! A dealer holds three non-orthogonal qubit "cards", gives one to Alice and
//! the other two to Bob, and both players try to guess Alice's card. This
//! crate evaluates every strategy three ways: in closed form, by exact
//! Born-rule enumeration over all deals and measurement outcomes, and by
//! seeded Monte Carlo simulation.
//!
//! Module map:
//!
//! - [`linalg`]: small dense complex vectors and operators (dims 2, 4, 8).
//! - [`game`]: card states, the six deals, composite and reduced states.
//! - [`alice`]: Alice's single-qubit measurement and guessing strategies.
//! - [`bob_separate`]: Bob measures his two cards one after the other.
//! - [`bob_collective`]: Bob measures both cards in one orthonormal basis.
//! - [`engine`]: strategy-agnostic exact enumeration and simulation.
//! - [`cli`]: the `qcard` command-line front end.

pub mod alice;
pub mod bob_collective;
pub mod bob_separate;
pub mod cli;
pub mod engine;
mod error;
pub mod game;
pub mod linalg;
pub mod optim;
pub mod tolerances;

pub use error::{QcardError, Result};
