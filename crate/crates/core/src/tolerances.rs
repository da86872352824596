//! Numerical tolerances shared by the library, its tests and the acceptance suite.

/// Unit-norm check for kets.
pub const NORM: f64 = 1e-12;
/// Hermiticity and unit-trace checks for density operators.
pub const DENSITY: f64 = 1e-12;
/// Smallest eigenvalue still accepted as positive semidefinite.
pub const PSD: f64 = 1e-10;
/// Linear-independence threshold and orthonormality of Gram-Schmidt output.
pub const GRAM_SCHMIDT: f64 = 1e-10;
/// Orthonormality of the auxiliary two-card bases.
pub const AUX_BASIS: f64 = 1e-10;
/// Orthonormality of an assembled collective measurement basis.
pub const COLLECTIVE_BASIS: f64 = 1e-9;
/// Coefficient normalization accepted on input to `build_basis`.
pub const COEFF_INPUT: f64 = 1e-6;
/// Cross-orthogonality of phi1..phi3 accepted on input to `build_basis`.
pub const CROSS_ORTHOGONALITY: f64 = 1e-6;
/// Agreement between closed forms and exact enumeration.
pub const ORACLE: f64 = 1e-10;
/// Closed-form identities that should hold to rounding.
pub const EXACT: f64 = 1e-12;

/// Alice's optimal angle.
pub const ALICE_ANGLE: f64 = 1e-6;
/// Alice's optimal success probability.
pub const ALICE_VALUE: f64 = 1e-9;
/// Entropy argmin vs pi/12.
pub const ENTROPY_ARGMIN: f64 = 1e-4;
/// Grid spacing used for the entropy argmin scan.
pub const ENTROPY_GRID: f64 = 1e-5;
/// Allowed gap between enumerated sequential protocol and its printed value.
pub const SEPARATE_GAP: f64 = 0.02;
/// Collective success at the known optimal coefficients.
pub const COLLECTIVE_VALUE: f64 = 1e-9;
/// Optimizer shortfall accepted against the collective optimum.
pub const OPTIMIZER: f64 = 1e-6;
/// Simulation acceptance band in standard errors.
pub const Z_BAND: f64 = 5.0;
