//! Named states and single-qubit operators.
//!
//! `|on⟩` is the computational `|0⟩` of the switch qubit and `|off⟩` is `|1⟩`.
//! Two-qubit states are written in `A′ ⊗ A` (or `A ⊗ B`) order.

use std::f64::consts::{FRAC_1_SQRT_2, PI, TAU};

use crate::error::{Error, Result};
use crate::qmat::{tensor_all, ComplexMatrix, C64, I, ONE, ZERO};

fn check_angle(name: &'static str, value: f64, max: f64) -> Result<()> {
    if !(0.0..=max).contains(&value) {
        return Err(Error::OutOfRange {
            name,
            value,
            min: 0.0,
            max,
        });
    }
    Ok(())
}

/// Bloch angles of the switch state `α|on⟩ + β|off⟩`, with
/// `α = cos(θ/2)` and `β = e^{iφ} sin(θ/2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SwitchParams {
    theta: f64,
    phi: f64,
}

impl SwitchParams {
    /// `θ ∈ [0, π]`, `φ ∈ [0, 2π]`. Out-of-range values are rejected, never wrapped.
    pub fn new(theta: f64, phi: f64) -> Result<Self> {
        check_angle("theta", theta, PI)?;
        check_angle("phi", phi, TAU)?;
        Ok(Self { theta, phi })
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    pub fn alpha(&self) -> C64 {
        C64::new((self.theta / 2.0).cos(), 0.0)
    }

    pub fn beta(&self) -> C64 {
        C64::from_polar((self.theta / 2.0).sin(), self.phi)
    }
}

/// Bloch angles of the unknown input `a|0⟩ + b|1⟩`, with
/// `a = cos(θ′/2)` and `b = e^{iφ′} sin(θ′/2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InputParams {
    theta_prime: f64,
    phi_prime: f64,
}

impl InputParams {
    pub fn new(theta_prime: f64, phi_prime: f64) -> Result<Self> {
        check_angle("theta_prime", theta_prime, PI)?;
        check_angle("phi_prime", phi_prime, TAU)?;
        Ok(Self {
            theta_prime,
            phi_prime,
        })
    }

    pub fn theta_prime(&self) -> f64 {
        self.theta_prime
    }

    pub fn phi_prime(&self) -> f64 {
        self.phi_prime
    }

    pub fn a(&self) -> C64 {
        C64::new((self.theta_prime / 2.0).cos(), 0.0)
    }

    pub fn b(&self) -> C64 {
        C64::from_polar((self.theta_prime / 2.0).sin(), self.phi_prime)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Bell {
    PhiPlus,
    PhiMinus,
    PsiPlus,
    PsiMinus,
}

impl Bell {
    pub const ALL: [Bell; 4] = [Bell::PhiPlus, Bell::PhiMinus, Bell::PsiPlus, Bell::PsiMinus];
}

pub fn bell(kind: Bell) -> ComplexMatrix {
    let s = C64::new(FRAC_1_SQRT_2, 0.0);
    let amps = match kind {
        Bell::PhiPlus => [s, ZERO, ZERO, s],
        Bell::PhiMinus => [s, ZERO, ZERO, -s],
        Bell::PsiPlus => [ZERO, s, s, ZERO],
        Bell::PsiMinus => [ZERO, s, -s, ZERO],
    };
    ComplexMatrix::ket(&amps)
}

/// `|on⟩`.
pub fn on() -> ComplexMatrix {
    ComplexMatrix::basis_ket(2, 0)
}

/// `|off⟩`.
pub fn off() -> ComplexMatrix {
    ComplexMatrix::basis_ket(2, 1)
}

pub fn switch_state(p: &SwitchParams) -> ComplexMatrix {
    ComplexMatrix::ket(&[p.alpha(), p.beta()])
}

pub fn input_qubit(p: &InputParams) -> ComplexMatrix {
    ComplexMatrix::ket(&[p.a(), p.b()])
}

/// `|ξ⟩ = (α|on⟩ + β|off⟩)_S ⊗ |ψ⟩_{A′} ⊗ |ψ⁻⟩_{AB}`.
pub fn initial_joint(s: &SwitchParams, q: &InputParams) -> ComplexMatrix {
    tensor_all(&[&switch_state(s), &input_qubit(q), &bell(Bell::PsiMinus)])
}

pub fn hadamard() -> ComplexMatrix {
    let s = FRAC_1_SQRT_2;
    ComplexMatrix::from_real_rows(&[&[s, s], &[s, -s]])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Pauli {
    X,
    Y,
    Z,
}

pub fn pauli(axis: Pauli) -> ComplexMatrix {
    let data = match axis {
        Pauli::X => vec![ZERO, ONE, ONE, ZERO],
        Pauli::Y => vec![ZERO, -I, I, ZERO],
        Pauli::Z => vec![ONE, ZERO, ZERO, -ONE],
    };
    ComplexMatrix::from_vec(2, 2, data).expect("2x2")
}

pub fn identity(n: usize) -> ComplexMatrix {
    ComplexMatrix::identity(n)
}
