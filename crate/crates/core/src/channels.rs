//! Kraus families for switched teleportation and the switch post-selection step.

use std::fmt;

use crate::error::{Error, Result};
use crate::qmat::{tensor, tensor_all, ComplexMatrix, SubsystemLayout};
use crate::states::{bell, hadamard, identity, off, on, pauli, Bell, Pauli};

/// Maximum `‖∑ E†E − I‖_max` accepted for a Kraus set.
pub const COMPLETENESS_TOL: f64 = 1e-12;
/// Post-selection probabilities below this are treated as degenerate.
pub const POSTSELECT_MIN_PROBABILITY: f64 = 1e-14;

/// Switch measurement outcome after the Hadamard rotation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Outcome {
    On,
    Off,
}

impl Outcome {
    pub const BOTH: [Outcome; 2] = [Outcome::On, Outcome::Off];

    fn index(self) -> usize {
        match self {
            Outcome::On => 0,
            Outcome::Off => 1,
        }
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Outcome::On => "on",
            Outcome::Off => "off",
        })
    }
}

/// A complete set of Kraus operators acting on `layout`.
#[derive(Debug, Clone)]
pub struct KrausSet {
    ops: Vec<ComplexMatrix>,
    layout: SubsystemLayout,
}

impl KrausSet {
    /// Validates shapes and completeness.
    pub fn new(ops: Vec<ComplexMatrix>, layout: SubsystemLayout) -> Result<Self> {
        let set = Self::new_unchecked(ops, layout)?;
        let residual = set.completeness_residual();
        if residual > COMPLETENESS_TOL {
            return Err(Error::IncompleteKraus(residual));
        }
        Ok(set)
    }

    /// Shape checks only. Used for fault injection.
    pub fn new_unchecked(ops: Vec<ComplexMatrix>, layout: SubsystemLayout) -> Result<Self> {
        let d = layout.dim();
        if ops.is_empty() {
            return Err(Error::DimensionMismatch("empty Kraus set".into()));
        }
        if let Some(op) = ops.iter().find(|op| op.shape() != (d, d)) {
            return Err(Error::DimensionMismatch(format!(
                "Kraus operator is {}x{}, layout dimension is {d}",
                op.rows(),
                op.cols()
            )));
        }
        Ok(Self { ops, layout })
    }

    pub fn ops(&self) -> &[ComplexMatrix] {
        &self.ops
    }

    pub fn layout(&self) -> &SubsystemLayout {
        &self.layout
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    /// `‖∑ E†E − I‖_max`.
    pub fn completeness_residual(&self) -> f64 {
        let d = self.layout.dim();
        let mut sum = ComplexMatrix::zeros(d, d);
        for e in &self.ops {
            sum = &sum + &(&e.adjoint() * e);
        }
        sum.max_abs_diff(&ComplexMatrix::identity(d))
    }

    pub fn apply(&self, rho: &ComplexMatrix) -> Result<ComplexMatrix> {
        crate::qmat::apply_kraus(rho, &self.ops)
    }

    /// Position of the largest-magnitude entry of operator `index`; ties go to
    /// the first in row-major order.
    pub fn largest_entry(&self, index: usize) -> (usize, usize) {
        let op = &self.ops[index];
        let mut best = (0, 0);
        let mut best_abs = -1.0;
        for r in 0..op.rows() {
            for c in 0..op.cols() {
                let v = op.get(r, c).norm();
                if v > best_abs {
                    best_abs = v;
                    best = (r, c);
                }
            }
        }
        best
    }

    /// Copy with `delta` added to entry `(row, col)` of operator `index`,
    /// skipping the completeness check.
    pub fn perturbed(&self, index: usize, row: usize, col: usize, delta: f64) -> Self {
        let mut ops = self.ops.clone();
        let v = ops[index].get(row, col) + delta;
        ops[index].set(row, col, v);
        Self {
            ops,
            layout: self.layout.clone(),
        }
    }
}

/// Standard teleportation through the singlet on `A′ ⊗ A ⊗ B`, followed by
/// Alice's correction that returns `A′A` to the singlet.
pub fn kraus_teleport() -> Result<KrausSet> {
    let i2 = identity(2);
    let corrected = |b: Bell, p: Option<Pauli>| {
        let proj = ComplexMatrix::projector(&bell(b));
        match p {
            None => tensor(&proj, &i2),
            Some(p) => {
                let sigma = pauli(p);
                let alice = tensor_all(&[&i2, &sigma, &i2]);
                &alice * &tensor(&proj, &sigma)
            }
        }
    };
    KrausSet::new(
        vec![
            corrected(Bell::PsiMinus, None),
            corrected(Bell::PsiPlus, Some(Pauli::Z)),
            corrected(Bell::PhiMinus, Some(Pauli::X)),
            corrected(Bell::PhiPlus, Some(Pauli::Y)),
        ],
        SubsystemLayout::register(),
    )
}

/// Switch-controlled teleportation; the off branch does nothing.
pub fn kraus_protocol1() -> Result<KrausSet> {
    let on_proj = ComplexMatrix::projector(&on());
    let off_idle = tensor(&ComplexMatrix::projector(&off()), &identity(8).scale_real(0.5));
    let ops = kraus_teleport()?
        .ops()
        .iter()
        .map(|k| &tensor(&on_proj, k) + &off_idle)
        .collect();
    KrausSet::new(ops, SubsystemLayout::full())
}

/// Measure `A′` in the computational basis and have Bob prepare the outcome.
///
/// The completing operators `L₅..L₈` map back onto the basis kets they
/// annihilate; on valid inputs `|ψ⟩ ⊗ |ψ⁻⟩` they contribute nothing.
pub fn kraus_measure_prepare() -> Result<KrausSet> {
    let k = |i| ComplexMatrix::basis_ket(8, i);
    let pairs = [(0, 1), (2, 2), (5, 5), (7, 6), (0, 0), (3, 3), (4, 4), (7, 7)];
    let ops = pairs
        .iter()
        .map(|&(out, inp)| ComplexMatrix::ket_bra(&k(out), &k(inp)))
        .collect();
    KrausSet::new(ops, SubsystemLayout::register())
}

/// Switch-controlled teleportation; the off branch measures and prepares.
pub fn kraus_protocol2() -> Result<KrausSet> {
    let on_proj = ComplexMatrix::projector(&on()).scale_real(1.0 / 8f64.sqrt());
    let off_proj = ComplexMatrix::projector(&off()).scale_real(0.5);
    let teleport = kraus_teleport()?;
    let prepare = kraus_measure_prepare()?;
    let mut ops = Vec::with_capacity(teleport.len() * prepare.len());
    for k in teleport.ops() {
        let on_part = tensor(&on_proj, k);
        for l in prepare.ops() {
            ops.push(&on_part + &tensor(&off_proj, l));
        }
    }
    KrausSet::new(ops, SubsystemLayout::full())
}

/// Rotate the switch by `H`, project it onto `outcome`, and return the
/// unnormalized `A′AB` block. Linear in `rho`.
pub fn project_switch(rho: &ComplexMatrix, outcome: Outcome) -> Result<ComplexMatrix> {
    if rho.shape() != (16, 16) {
        return Err(Error::DimensionMismatch(format!(
            "expected a 16x16 operator with the switch first, got {}x{}",
            rho.rows(),
            rho.cols()
        )));
    }
    let u = tensor(&hadamard(), &identity(8));
    let rotated = &(&u * rho) * &u.adjoint();
    let off = outcome.index() * 8;
    Ok(ComplexMatrix::from_fn(8, 8, |r, c| rotated.get(off + r, off + c)))
}

/// Post-selected, normalized `A′AB` state and the outcome probability.
pub fn postselect_switch(rho: &ComplexMatrix, outcome: Outcome) -> Result<(ComplexMatrix, f64)> {
    let block = project_switch(rho, outcome)?;
    let p = block.trace().re;
    if p < POSTSELECT_MIN_PROBABILITY {
        return Err(Error::DegeneratePostSelection(p));
    }
    Ok((block.scale_real(1.0 / p), p))
}
