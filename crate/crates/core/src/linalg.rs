//! Dense complex linear algebra for the dimensions this game needs: one card
//! (2), two cards (4) and the full three-card system (8).
//!
//! Tensor products are first-factor-major: the amplitude of `|i⟩⊗|j⟩` lives
//! at index `i * dim2 + j`. Every two-card ket in the crate is written with
//! Bob's first card as the first factor.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::DMatrix;
pub use num_complex::Complex64;

use crate::tolerances;
use crate::{QcardError, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

fn check_dim(dim: usize) -> Result<()> {
    match dim {
        2 | 4 | 8 => Ok(()),
        other => Err(QcardError::UnsupportedDimension(other)),
    }
}

/// A (not necessarily normalized) state vector of dimension 2, 4 or 8.
#[derive(Clone, PartialEq)]
pub struct Ket {
    amps: Vec<Complex64>,
}

impl Ket {
    pub fn new(amps: Vec<Complex64>) -> Result<Self> {
        check_dim(amps.len())?;
        Ok(Self { amps })
    }

    /// Builds a ket with real amplitudes.
    pub fn real(amps: &[f64]) -> Result<Self> {
        Self::new(amps.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    /// Computational basis vector `|index⟩`.
    pub fn basis(dim: usize, index: usize) -> Result<Self> {
        check_dim(dim)?;
        if index >= dim {
            return Err(QcardError::InvalidArgument(format!(
                "basis index {index} out of range for dimension {dim}"
            )));
        }
        let mut amps = vec![ZERO; dim];
        amps[index] = ONE;
        Ok(Self { amps })
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    /// Real parts of the amplitudes.
    pub fn real_parts(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.re).collect()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn is_normalized(&self) -> bool {
        (self.norm_sqr() - 1.0).abs() < tolerances::NORM
    }

    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm();
        if n == 0.0 || !n.is_finite() {
            return Err(QcardError::InvalidArgument(
                "cannot normalize a zero vector".into(),
            ));
        }
        Ok(self.scale(Complex64::new(1.0 / n, 0.0)))
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self {
            amps: self.amps.iter().map(|a| a * c).collect(),
        }
    }

    /// Multiplies by the phase that makes the first largest-magnitude
    /// amplitude real and positive.
    pub fn canonical_phase(&self) -> Self {
        let mut pivot = 0;
        let mut best = 0.0;
        for (i, a) in self.amps.iter().enumerate() {
            let m = a.norm();
            if m > best + tolerances::EXACT {
                best = m;
                pivot = i;
            }
        }
        if best == 0.0 {
            return self.clone();
        }
        let p = self.amps[pivot];
        self.scale(p.conj() / p.norm())
    }

    fn zip_with(&self, other: &Ket, f: impl Fn(Complex64, Complex64) -> Complex64) -> Ket {
        assert_eq!(self.dim(), other.dim(), "ket dimension mismatch");
        Ket {
            amps: self
                .amps
                .iter()
                .zip(&other.amps)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        }
    }
}

impl fmt::Debug for Ket {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.amps.iter()).finish()
    }
}

impl Add for &Ket {
    type Output = Ket;
    fn add(self, rhs: &Ket) -> Ket {
        self.zip_with(rhs, |a, b| a + b)
    }
}

impl Sub for &Ket {
    type Output = Ket;
    fn sub(self, rhs: &Ket) -> Ket {
        self.zip_with(rhs, |a, b| a - b)
    }
}

impl Mul<&Ket> for f64 {
    type Output = Ket;
    fn mul(self, rhs: &Ket) -> Ket {
        rhs.scale(Complex64::new(self, 0.0))
    }
}

impl Neg for &Ket {
    type Output = Ket;
    fn neg(self) -> Ket {
        -1.0 * self
    }
}

/// `⟨u|v⟩`, conjugate-linear in the first argument.
pub fn inner(u: &Ket, v: &Ket) -> Result<Complex64> {
    if u.dim() != v.dim() {
        return Err(QcardError::DimensionMismatch {
            left: u.dim(),
            right: v.dim(),
        });
    }
    Ok(u.amps.iter().zip(&v.amps).map(|(a, b)| a.conj() * b).sum())
}

/// `|u⟩⊗|v⟩` with `u` as the major index.
pub fn tensor(u: &Ket, v: &Ket) -> Result<Ket> {
    let dim = u.dim() * v.dim();
    check_dim(dim)?;
    let mut amps = Vec::with_capacity(dim);
    for a in &u.amps {
        for b in &v.amps {
            amps.push(a * b);
        }
    }
    Ok(Ket { amps })
}

/// `|u⟩⟨v|`.
pub fn outer(u: &Ket, v: &Ket) -> Result<Operator> {
    if u.dim() != v.dim() {
        return Err(QcardError::DimensionMismatch {
            left: u.dim(),
            right: v.dim(),
        });
    }
    let n = u.dim();
    Ok(Operator::from_fn(n, |i, j| u.amps[i] * v.amps[j].conj()))
}

/// Square complex matrix of dimension 2, 4 or 8, stored row-major.
#[derive(Clone, PartialEq)]
pub struct Operator {
    dim: usize,
    entries: Vec<Complex64>,
}

impl Operator {
    pub fn new(dim: usize, entries: Vec<Complex64>) -> Result<Self> {
        check_dim(dim)?;
        if entries.len() != dim * dim {
            return Err(QcardError::InvalidArgument(format!(
                "expected {} entries for dimension {dim}, got {}",
                dim * dim,
                entries.len()
            )));
        }
        Ok(Self { dim, entries })
    }

    fn from_fn(dim: usize, f: impl Fn(usize, usize) -> Complex64) -> Self {
        let mut entries = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                entries.push(f(i, j));
            }
        }
        Self { dim, entries }
    }

    pub fn zeros(dim: usize) -> Result<Self> {
        check_dim(dim)?;
        Ok(Self::from_fn(dim, |_, _| ZERO))
    }

    pub fn identity(dim: usize) -> Result<Self> {
        check_dim(dim)?;
        Ok(Self::from_fn(dim, |i, j| if i == j { ONE } else { ZERO }))
    }

    pub fn diag(values: &[f64]) -> Result<Self> {
        check_dim(values.len())?;
        Ok(Self::from_fn(values.len(), |i, j| {
            if i == j {
                Complex64::new(values[i], 0.0)
            } else {
                ZERO
            }
        }))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.entries[row * self.dim + col]
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self.get(j, i).conj())
    }

    pub fn scale(&self, c: f64) -> Self {
        Self {
            dim: self.dim,
            entries: self.entries.iter().map(|e| e * c).collect(),
        }
    }

    pub fn add(&self, other: &Operator) -> Result<Self> {
        if self.dim != other.dim {
            return Err(QcardError::DimensionMismatch {
                left: self.dim,
                right: other.dim,
            });
        }
        Ok(Self {
            dim: self.dim,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    pub fn matmul(&self, other: &Operator) -> Result<Self> {
        if self.dim != other.dim {
            return Err(QcardError::DimensionMismatch {
                left: self.dim,
                right: other.dim,
            });
        }
        let n = self.dim;
        Ok(Self::from_fn(n, |i, j| {
            (0..n).map(|k| self.get(i, k) * other.get(k, j)).sum()
        }))
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Operator) -> Result<f64> {
        if self.dim != other.dim {
            return Err(QcardError::DimensionMismatch {
                left: self.dim,
                right: other.dim,
            });
        }
        Ok(self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    /// Largest entrywise modulus of `M - M†`.
    pub fn hermitian_residual(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.dim {
            for j in 0..self.dim {
                worst = worst.max((self.get(i, j) - self.get(j, i).conj()).norm());
            }
        }
        worst
    }

    /// `⟨v|M|v⟩` (real part; exact for Hermitian `M`).
    pub fn expectation(&self, v: &Ket) -> Result<f64> {
        if v.dim() != self.dim {
            return Err(QcardError::DimensionMismatch {
                left: self.dim,
                right: v.dim(),
            });
        }
        let mut acc = ZERO;
        for i in 0..self.dim {
            let row: Complex64 = (0..self.dim).map(|j| self.get(i, j) * v.amps[j]).sum();
            acc += v.amps[i].conj() * row;
        }
        Ok(acc.re)
    }

    fn to_nalgebra(&self) -> DMatrix<Complex64> {
        DMatrix::from_fn(self.dim, self.dim, |i, j| self.get(i, j))
    }

    /// Eigen-decomposition of the Hermitian part `(M + M†)/2`, eigenvalues
    /// ascending, eigenvectors canonically phased.
    pub fn eigh(&self) -> (Vec<f64>, Vec<Ket>) {
        let m = self.to_nalgebra();
        let h = (&m + m.adjoint()) * Complex64::new(0.5, 0.0);
        let eig = h.symmetric_eigen();
        let mut pairs: Vec<(f64, Ket)> = (0..self.dim)
            .map(|k| {
                let col = eig.eigenvectors.column(k);
                let ket = Ket {
                    amps: col.iter().copied().collect(),
                };
                (eig.eigenvalues[k], ket.canonical_phase())
            })
            .collect();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        pairs.into_iter().unzip()
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        self.eigh().0
    }
}

impl fmt::Debug for Operator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<&[Complex64]> = self.entries.chunks(self.dim).collect();
        f.debug_list().entries(rows).finish()
    }
}

/// Which tensor factor a partial trace keeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subsystem {
    First,
    Second,
}

/// Reduced operator on the kept factor of a bipartite space with factor
/// dimensions `dims`.
pub fn partial_trace(m: &Operator, keep: Subsystem, dims: (usize, usize)) -> Result<Operator> {
    let (d1, d2) = dims;
    if d1 * d2 != m.dim() {
        return Err(QcardError::InvalidArgument(format!(
            "factor dimensions {d1}x{d2} do not match operator dimension {}",
            m.dim()
        )));
    }
    let kept = match keep {
        Subsystem::First => d1,
        Subsystem::Second => d2,
    };
    check_dim(kept)?;
    let idx = |i: usize, j: usize| i * d2 + j;
    let out = match keep {
        Subsystem::First => Operator::from_fn(d1, |i, k| {
            (0..d2).map(|j| m.get(idx(i, j), idx(k, j))).sum()
        }),
        Subsystem::Second => Operator::from_fn(d2, |j, l| {
            (0..d1).map(|i| m.get(idx(i, j), idx(i, l))).sum()
        }),
    };
    Ok(out)
}

/// Modified Gram-Schmidt. Each output vector is canonically phased.
pub fn gram_schmidt(vs: &[Ket]) -> Result<Vec<Ket>> {
    let mut out: Vec<Ket> = Vec::with_capacity(vs.len());
    for (index, v) in vs.iter().enumerate() {
        if let Some(first) = vs.first() {
            if first.dim() != v.dim() {
                return Err(QcardError::DimensionMismatch {
                    left: first.dim(),
                    right: v.dim(),
                });
            }
        }
        let scale = v.norm();
        let mut w = v.clone();
        // Two passes keep the residual orthogonal to working precision.
        for _ in 0..2 {
            for q in &out {
                let c = inner(q, &w)?;
                w = &w - &q.scale(c);
            }
        }
        let residual = w.norm();
        if scale == 0.0 || residual <= tolerances::GRAM_SCHMIDT * scale.max(1.0) {
            return Err(QcardError::Degenerate { index, residual });
        }
        out.push(w.normalized()?.canonical_phase());
    }
    Ok(out)
}

/// Largest entrywise deviation of the Gram matrix of `vs` from the identity.
pub fn gram_residual(vs: &[Ket]) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for (i, u) in vs.iter().enumerate() {
        for (j, v) in vs.iter().enumerate() {
            let target = if i == j { ONE } else { ZERO };
            worst = worst.max((inner(u, v)? - target).norm());
        }
    }
    Ok(worst)
}

/// The property a density check found furthest out of tolerance.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DensityViolation {
    None,
    NotHermitian,
    TraceNotOne,
    NegativeEigenvalue,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DensityCheck {
    pub is_density: bool,
    pub hermitian_residual: f64,
    pub trace_error: f64,
    pub min_eigenvalue: f64,
    pub worst: DensityViolation,
}

/// Checks Hermiticity, unit trace and positive semidefiniteness, each
/// within `tol`.
pub fn is_density(m: &Operator, tol: f64) -> DensityCheck {
    let hermitian_residual = m.hermitian_residual();
    let trace_error = (m.trace() - ONE).norm();
    let min_eigenvalue = m.eigenvalues().first().copied().unwrap_or(0.0);

    let excess = [
        (DensityViolation::NotHermitian, hermitian_residual - tol),
        (DensityViolation::TraceNotOne, trace_error - tol),
        (DensityViolation::NegativeEigenvalue, -min_eigenvalue - tol),
    ];
    let (worst, amount) = excess
        .iter()
        .copied()
        .max_by(|a, b| a.1.total_cmp(&b.1))
        .expect("non-empty");
    let is_density = amount <= 0.0;
    DensityCheck {
        is_density,
        hermitian_residual,
        trace_error,
        min_eigenvalue,
        worst: if is_density { DensityViolation::None } else { worst },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn k(a: &[f64]) -> Ket {
        Ket::real(a).unwrap()
    }

    fn psi() -> [Ket; 3] {
        let h = 3f64.sqrt() / 2.0;
        [k(&[1.0, 0.0]), k(&[0.5, h]), k(&[-0.5, h])]
    }

    #[test]
    fn inner_products_of_cards() {
        let [p1, p2, p3] = psi();
        assert!((inner(&p1, &p1).unwrap() - ONE).norm() < 1e-15);
        assert!((inner(&p2, &p3).unwrap().re - 0.5).abs() < 1e-15);
        assert!((inner(&p1, &p3).unwrap().re + 0.5).abs() < 1e-15);
    }

    #[test]
    fn inner_conjugates_first_argument() {
        let u = Ket::new(vec![Complex64::new(0.0, 1.0), ZERO]).unwrap();
        let v = Ket::new(vec![ONE, ZERO]).unwrap();
        assert_eq!(inner(&u, &v).unwrap(), Complex64::new(0.0, -1.0));
    }

    #[test]
    fn inner_rejects_mismatched_dims() {
        let [p1, p2, _] = psi();
        let pair = tensor(&p1, &p2).unwrap();
        assert!(matches!(
            inner(&p1, &pair),
            Err(QcardError::DimensionMismatch { left: 2, right: 4 })
        ));
    }

    #[test]
    fn tensor_layout_and_overlaps() {
        let [p1, p2, _] = psi();
        let t11 = tensor(&p1, &p1).unwrap();
        assert_eq!(t11.amplitudes()[0], ONE);
        let t12 = tensor(&p1, &p2).unwrap();
        let t21 = tensor(&p2, &p1).unwrap();
        assert!((inner(&t12, &t21).unwrap().re - 0.25).abs() < 1e-15);
        assert!((t12.norm() - 1.0).abs() < 1e-15);
        // first factor is major
        assert!((t12.amplitudes()[1].re - 3f64.sqrt() / 2.0).abs() < 1e-15);
    }

    #[test]
    fn tensor_rejects_large_result() {
        let [p1, p2, _] = psi();
        let t = tensor(&p1, &p2).unwrap();
        assert!(matches!(
            tensor(&t, &t),
            Err(QcardError::UnsupportedDimension(16))
        ));
    }

    #[test]
    fn outer_products() {
        let [p1, p2, _] = psi();
        let o = outer(&p1, &p1).unwrap();
        assert_eq!(o, Operator::diag(&[1.0, 0.0]).unwrap());
        assert!((outer(&p2, &p2).unwrap().trace() - ONE).norm() < 1e-15);
        assert!((outer(&p2, &p2).unwrap().get(0, 0).re - 0.25).abs() < 1e-15);
        let pair = tensor(&p1, &p2).unwrap();
        assert!(outer(&p1, &pair).is_err());
    }

    #[test]
    fn partial_trace_of_product_state() {
        let [p1, p2, _] = psi();
        let pair = tensor(&p1, &p2).unwrap();
        let proj = outer(&pair, &pair).unwrap();
        let second = partial_trace(&proj, Subsystem::Second, (2, 2)).unwrap();
        let expect = outer(&p2, &p2).unwrap();
        assert!(second.max_abs_diff(&expect).unwrap() < 1e-15);
        let first = partial_trace(&proj, Subsystem::First, (2, 2)).unwrap();
        assert!(first.max_abs_diff(&outer(&p1, &p1).unwrap()).unwrap() < 1e-15);
        assert!((first.trace() - ONE).norm() < 1e-12);
    }

    #[test]
    fn partial_trace_rejects_bad_dims() {
        let m = Operator::identity(8).unwrap();
        assert!(partial_trace(&m, Subsystem::First, (2, 2)).is_err());
        assert!(partial_trace(&m, Subsystem::Second, (8, 1)).is_err());
    }

    #[test]
    fn gram_schmidt_examples() {
        let s = 1.0 / 2f64.sqrt();
        let out = gram_schmidt(&[k(&[1.0, 0.0]), k(&[s, s])]).unwrap();
        assert!((&out[0] - &k(&[1.0, 0.0])).norm() < 1e-15);
        assert!((&out[1] - &k(&[0.0, 1.0])).norm() < 1e-15);

        let ortho = [k(&[0.0, 1.0]), k(&[1.0, 0.0])];
        let again = gram_schmidt(&ortho).unwrap();
        assert_eq!(again, ortho.to_vec());
    }

    #[test]
    fn gram_schmidt_sign_convention() {
        let out = gram_schmidt(&[k(&[0.3, -0.8])]).unwrap();
        assert!(out[0].amplitudes()[1].re > 0.0);
        assert!(out[0].amplitudes()[0].re < 0.0);
    }

    #[test]
    fn gram_schmidt_reports_degenerate_index() {
        let err = gram_schmidt(&[k(&[1.0, 0.0]), k(&[0.0, 1.0]), k(&[1.0, 1.0])]);
        // dimension 2 cannot hold three independent vectors
        assert!(matches!(err, Err(QcardError::Degenerate { index: 2, .. })));
        let err = gram_schmidt(&[k(&[1.0, 2.0]), k(&[2.0, 4.0])]);
        assert!(matches!(err, Err(QcardError::Degenerate { index: 1, .. })));
    }

    #[test]
    fn density_checks() {
        let [p1, p2, p3] = psi();
        let mix = outer(&p1, &p1)
            .unwrap()
            .add(&outer(&p2, &p2).unwrap())
            .unwrap()
            .add(&outer(&p3, &p3).unwrap())
            .unwrap()
            .scale(1.0 / 3.0);
        let check = is_density(&mix, tolerances::PSD);
        assert!(check.is_density);
        assert_eq!(check.worst, DensityViolation::None);

        let bad = Operator::diag(&[1.0 / 0.9999, -0.0001 / 0.9999]).unwrap();
        let check = is_density(&bad, tolerances::PSD);
        assert!(!check.is_density);
        assert_eq!(check.worst, DensityViolation::NegativeEigenvalue);
        assert!(check.min_eigenvalue < 0.0);

        let unnormalized = Operator::identity(2).unwrap();
        assert_eq!(
            is_density(&unnormalized, tolerances::PSD).worst,
            DensityViolation::TraceNotOne
        );
    }

    #[test]
    fn eigh_sorted_ascending() {
        let m = Operator::diag(&[0.7, 0.1, 0.2, 0.0]).unwrap();
        let (vals, vecs) = m.eigh();
        assert_eq!(vecs.len(), 4);
        let expect = [0.0, 0.1, 0.2, 0.7];
        for (v, e) in vals.iter().zip(expect) {
            assert!((v - e).abs() < 1e-14);
        }
    }
}
