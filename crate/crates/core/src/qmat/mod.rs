//! Dense complex linear algebra for small multi-qubit systems.
//!
//! Everything here works on [`ComplexMatrix`], a row-major dense matrix of
//! `Complex64`. Kets are single-column matrices. Tensor factors are ordered as
//! described by a [`SubsystemLayout`], first label most significant.

mod haar;
mod layout;

use std::ops::{Add, Mul, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

pub use haar::{haar_average, HaarNode, HaarQuadrature, AZIMUTHAL_NODES, POLAR_NODES};
pub use layout::{Qubit, SubsystemLayout};

pub type C64 = Complex64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

/// Tolerance for unit norm of kets.
pub const STATE_NORM_TOL: f64 = 1e-12;
/// Tolerance for Hermiticity and unit trace of density matrices.
pub const DENSITY_TOL: f64 = 1e-12;
/// Smallest eigenvalue accepted for a positive semidefinite matrix.
pub const PSD_TOL: f64 = 1e-10;
/// Norm deviation accepted for the target ket of [`fidelity_to_pure`].
pub const FIDELITY_NORM_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |r, c| if r == c { ONE } else { ZERO })
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if data.len() != rows * cols || rows == 0 || cols == 0 {
            return Err(Error::BadShape {
                rows,
                cols,
                len: data.len(),
            });
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Self { rows, cols, data }
    }

    /// Build from real entries given row by row.
    pub fn from_real_rows(rows: &[&[f64]]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        Self::from_fn(rows.len(), cols, |r, c| C64::new(rows[r][c], 0.0))
    }

    /// Column vector (ket) with the given amplitudes.
    pub fn ket(amplitudes: &[C64]) -> Self {
        Self {
            rows: amplitudes.len(),
            cols: 1,
            data: amplitudes.to_vec(),
        }
    }

    /// Computational basis ket `|index⟩` of dimension `dim`.
    pub fn basis_ket(dim: usize, index: usize) -> Self {
        let mut k = Self::zeros(dim, 1);
        k.data[index] = ONE;
        k
    }

    /// `|a⟩⟨b|`.
    pub fn ket_bra(a: &ComplexMatrix, b: &ComplexMatrix) -> Self {
        debug_assert!(a.cols == 1 && b.cols == 1);
        Self::from_fn(a.rows, b.rows, |r, c| a.data[r] * b.data[c].conj())
    }

    /// `|k⟩⟨k|`.
    pub fn projector(k: &ComplexMatrix) -> Self {
        Self::ket_bra(k, k)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn is_ket(&self) -> bool {
        self.cols == 1
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> C64 {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: C64) {
        self.data[r * self.cols + c] = v;
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self.get(c, r).conj())
    }

    pub fn scale(&self, s: C64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&z| z * s).collect(),
        }
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.scale(C64::new(s, 0.0))
    }

    /// Checked product.
    pub fn matmul(&self, rhs: &ComplexMatrix) -> Result<Self> {
        if self.cols != rhs.rows {
            return Err(Error::DimensionMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut out = Self::zeros(self.rows, rhs.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.data[r * self.cols + k];
                if a == ZERO {
                    continue;
                }
                let row = &rhs.data[k * rhs.cols..(k + 1) * rhs.cols];
                let dst = &mut out.data[r * rhs.cols..(r + 1) * rhs.cols];
                for (d, &b) in dst.iter_mut().zip(row) {
                    *d += a * b;
                }
            }
        }
        Ok(out)
    }

    fn zip_with(&self, rhs: &ComplexMatrix, f: impl Fn(C64, C64) -> C64) -> Result<Self> {
        if self.shape() != rhs.shape() {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} vs {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        })
    }

    pub fn checked_add(&self, rhs: &ComplexMatrix) -> Result<Self> {
        self.zip_with(rhs, |a, b| a + b)
    }

    pub fn checked_sub(&self, rhs: &ComplexMatrix) -> Result<Self> {
        self.zip_with(rhs, |a, b| a - b)
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self.get(i, i)).sum()
    }

    /// `⟨self|other⟩` for kets.
    pub fn inner(&self, other: &ComplexMatrix) -> C64 {
        debug_assert!(self.is_ket() && other.is_ket());
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// Frobenius norm (the 2-norm for kets).
    pub fn norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Entrywise max-norm of `self - other`; infinite when shapes differ.
    pub fn max_abs_diff(&self, other: &ComplexMatrix) -> f64 {
        if self.shape() != other.shape() {
            return f64::INFINITY;
        }
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// `‖ρ − ρ†‖_max`.
    pub fn hermiticity_residual(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let mut worst = 0.0_f64;
        for r in 0..self.rows {
            for c in r..self.cols {
                worst = worst.max((self.get(r, c) - self.get(c, r).conj()).norm());
            }
        }
        worst
    }

    /// Smallest eigenvalue of the Hermitian part.
    pub fn min_hermitian_eigenvalue(&self) -> f64 {
        let m = DMatrix::from_fn(self.rows, self.cols, |r, c| {
            (self.get(r, c) + self.get(c, r).conj()) * 0.5
        });
        m.symmetric_eigenvalues().iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Unit-norm ket check.
    pub fn check_state_vector(&self) -> Result<()> {
        if !self.is_ket() {
            return Err(Error::DimensionMismatch(format!(
                "expected a column vector, got {}x{}",
                self.rows, self.cols
            )));
        }
        let n = self.norm();
        if (n - 1.0).abs() > STATE_NORM_TOL {
            return Err(Error::NotNormalized(n));
        }
        Ok(())
    }

    /// Square, Hermitian, unit trace and positive semidefinite.
    pub fn check_density_matrix(&self) -> Result<()> {
        if !self.is_square() {
            return Err(Error::NotDensityMatrix(format!(
                "not square ({}x{})",
                self.rows, self.cols
            )));
        }
        let h = self.hermiticity_residual();
        if h > DENSITY_TOL {
            return Err(Error::NotDensityMatrix(format!("not Hermitian ({h:e})")));
        }
        let tr = self.trace();
        if (tr - ONE).norm() > DENSITY_TOL {
            return Err(Error::NotDensityMatrix(format!("trace {tr}")));
        }
        let min = self.min_hermitian_eigenvalue();
        if min < -PSD_TOL {
            return Err(Error::NotDensityMatrix(format!(
                "negative eigenvalue {min:e}"
            )));
        }
        Ok(())
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    /// Panics on shape mismatch; use [`ComplexMatrix::matmul`] for a checked product.
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.matmul(rhs).expect("matrix product shape mismatch")
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.checked_add(rhs).expect("matrix sum shape mismatch")
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.checked_sub(rhs).expect("matrix difference shape mismatch")
    }
}

/// Kronecker product `a ⊗ b`.
pub fn tensor(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let rows = a.rows * b.rows;
    let cols = a.cols * b.cols;
    let mut out = ComplexMatrix::zeros(rows, cols);
    for ar in 0..a.rows {
        for ac in 0..a.cols {
            let x = a.get(ar, ac);
            if x == ZERO {
                continue;
            }
            for br in 0..b.rows {
                for bc in 0..b.cols {
                    out.set(ar * b.rows + br, ac * b.cols + bc, x * b.get(br, bc));
                }
            }
        }
    }
    out
}

/// Left-to-right Kronecker product of several factors.
pub fn tensor_all(factors: &[&ComplexMatrix]) -> ComplexMatrix {
    let mut iter = factors.iter();
    let first = (*iter.next().expect("tensor_all needs at least one factor")).clone();
    iter.fold(first, |acc, m| tensor(&acc, m))
}

/// Reduced operator on `keep`, in layout order.
///
/// Works for any square operator of the layout's dimension, not only density
/// matrices; the map is linear and trace preserving.
pub fn partial_trace(
    rho: &ComplexMatrix,
    layout: &SubsystemLayout,
    keep: &[Qubit],
) -> Result<ComplexMatrix> {
    if !rho.is_square() || rho.rows != layout.dim() {
        return Err(Error::DimensionMismatch(format!(
            "operator is {}x{}, layout has dimension {}",
            rho.rows,
            rho.cols,
            layout.dim()
        )));
    }
    let kept = layout.restrict(keep)?;
    let n = layout.len();
    let kept_bits: Vec<usize> = layout
        .labels()
        .iter()
        .enumerate()
        .filter(|(_, l)| kept.labels().contains(l))
        .map(|(i, _)| n - 1 - i)
        .collect();

    // split every full index into (kept index, traced index)
    let split: Vec<(usize, usize)> = (0..layout.dim())
        .map(|idx| {
            let mut k = 0;
            let mut t = 0;
            for bit in (0..n).rev() {
                let v = (idx >> bit) & 1;
                if kept_bits.contains(&bit) {
                    k = (k << 1) | v;
                } else {
                    t = (t << 1) | v;
                }
            }
            (k, t)
        })
        .collect();

    let d = kept.dim();
    let mut out = ComplexMatrix::zeros(d, d);
    for (i, &(ki, ti)) in split.iter().enumerate() {
        for (j, &(kj, tj)) in split.iter().enumerate() {
            if ti == tj {
                let v = out.get(ki, kj) + rho.get(i, j);
                out.set(ki, kj, v);
            }
        }
    }
    Ok(out)
}

/// `∑ E ρ E†`.
pub fn apply_kraus(rho: &ComplexMatrix, ops: &[ComplexMatrix]) -> Result<ComplexMatrix> {
    if !rho.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "operator is {}x{}",
            rho.rows, rho.cols
        )));
    }
    let mut out = ComplexMatrix::zeros(rho.rows, rho.cols);
    for e in ops {
        if !e.is_square() || e.rows != rho.rows {
            return Err(Error::DimensionMismatch(format!(
                "Kraus operator is {}x{}, state is {}x{}",
                e.rows, e.cols, rho.rows, rho.cols
            )));
        }
        let term = &(e * rho) * &e.adjoint();
        for (o, t) in out.data.iter_mut().zip(&term.data) {
            *o += t;
        }
    }
    Ok(out)
}

/// Overlap fidelity `⟨ψ|ρ|ψ⟩`.
pub fn fidelity_to_pure(rho: &ComplexMatrix, psi: &ComplexMatrix) -> Result<f64> {
    if !psi.is_ket() || !rho.is_square() || rho.rows != psi.rows {
        return Err(Error::DimensionMismatch(format!(
            "state is {}x{}, target is {}x{}",
            rho.rows, rho.cols, psi.rows, psi.cols
        )));
    }
    let n = psi.norm();
    if (n - 1.0).abs() > FIDELITY_NORM_TOL {
        return Err(Error::NotNormalized(n));
    }
    let rho_psi = rho * psi;
    Ok(psi.inner(&rho_psi).re)
}

/// l1-norm of coherence: sum of moduli of off-diagonal entries.
pub fn l1_coherence(rho: &ComplexMatrix) -> f64 {
    let mut sum = 0.0;
    for r in 0..rho.rows {
        for c in 0..rho.cols {
            if r != c {
                sum += rho.get(r, c).norm();
            }
        }
    }
    sum
}
