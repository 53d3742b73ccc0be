//! Closed-form fidelities, path differences and their coherence forms.
//!
//! All angles are radians. `X` below stands for `sin θ cos φ = 2 Re(αβ*)`.

use std::f64::consts::{FRAC_PI_2, PI, SQRT_2, TAU};

use serde::{Deserialize, Serialize};

use crate::channels::Outcome;
use crate::error::{Error, Result};

fn x(theta: f64, phi: f64) -> f64 {
    theta.sin() * phi.cos()
}

fn signed_x(theta: f64, phi: f64, outcome: Outcome) -> f64 {
    match outcome {
        Outcome::On => x(theta, phi),
        Outcome::Off => -x(theta, phi),
    }
}

/// Protocol 1, path 1: `(1 + cos²(θ/2)) / 2`.
pub fn f_pr1_pa1(theta: f64) -> f64 {
    0.5 * (1.0 + (theta / 2.0).cos().powi(2))
}

/// Protocol 1, path 2: `(3 + cos θ ∓ X) / (4 ∓ X)`, upper sign for `on`.
pub fn f_pr1_pa2(theta: f64, phi: f64, outcome: Outcome) -> f64 {
    let x = signed_x(theta, phi, outcome);
    (3.0 + theta.cos() - x) / (4.0 - x)
}

/// Probability of the `on` outcome in protocol 1, path 2.
pub fn p_on_pr1(theta: f64, phi: f64) -> f64 {
    (4.0 - x(theta, phi)) / 8.0
}

/// `F_Pr1Pa2(on) − F_Pr1Pa1`.
pub fn d1(theta: f64, phi: f64) -> f64 {
    let x = x(theta, phi);
    x * (theta.cos() - 1.0) / (4.0 * (4.0 - x))
}

/// `max{F_Pr1Pa2(on), F_Pr1Pa2(off)} − F_Pr1Pa1`.
pub fn d1_max(theta: f64, phi: f64) -> f64 {
    let best = f_pr1_pa2(theta, phi, Outcome::On).max(f_pr1_pa2(theta, phi, Outcome::Off));
    best - f_pr1_pa1(theta)
}

/// `|d1|`, the absolute value of the on-outcome difference.
///
/// Coincides with [`d1_max`] only where `cos φ ≤ 0`; for `cos φ > 0` the off
/// outcome's gain has denominator `4 + X` instead of `4 − X`.
pub fn d1_abs(theta: f64, phi: f64) -> f64 {
    d1(theta, phi).abs()
}

/// Protocol 2, path 1, Haar averaged: `(2 + cos²(θ/2)) / 3`.
pub fn f_pr2_pa1(theta: f64) -> f64 {
    (2.0 + (theta / 2.0).cos().powi(2)) / 3.0
}

/// Protocol 2, path 1, for input `θ′`: `|α|² + |β|²(|a|⁴ + |b|⁴)`.
pub fn f_pr2_pa1_pointwise(theta: f64, theta_prime: f64) -> f64 {
    let alpha2 = (theta / 2.0).cos().powi(2);
    let beta2 = (theta / 2.0).sin().powi(2);
    alpha2 + beta2 * classical_overlap(theta_prime)
}

fn classical_overlap(theta_prime: f64) -> f64 {
    (theta_prime / 2.0).cos().powi(4) + (theta_prime / 2.0).sin().powi(4)
}

/// Protocol 2, path 2, Haar averaged:
/// `(40 + 8 cos θ ∓ 3√2 X) / (48 ∓ 3√2 X)`.
pub fn f_pr2_pa2(theta: f64, phi: f64, outcome: Outcome) -> f64 {
    let y = 3.0 * SQRT_2 * signed_x(theta, phi, outcome);
    (40.0 + 8.0 * theta.cos() - y) / (48.0 - y)
}

/// Protocol 2, path 2, for input `θ′`.
pub fn f_pr2_pa2_pointwise(theta: f64, phi: f64, outcome: Outcome, theta_prime: f64) -> f64 {
    let alpha2 = (theta / 2.0).cos().powi(2);
    let beta2 = (theta / 2.0).sin().powi(2);
    let y = SQRT_2 * signed_x(theta, phi, outcome);
    (16.0 * alpha2 - y + 16.0 * beta2 * classical_overlap(theta_prime)) / (16.0 - y)
}

/// `F_Pr2Pa2(on) − F_Pr2Pa1`.
pub fn d2(theta: f64, phi: f64) -> f64 {
    let x = x(theta, phi);
    x * (theta.cos() - 1.0) / (SQRT_2 * (48.0 - 3.0 * SQRT_2 * x))
}

/// `max{F_Pr2Pa2(on), F_Pr2Pa2(off)} − F_Pr2Pa1`.
pub fn d2_max(theta: f64, phi: f64) -> f64 {
    let best = f_pr2_pa2(theta, phi, Outcome::On).max(f_pr2_pa2(theta, phi, Outcome::Off));
    best - f_pr2_pa1(theta)
}

/// l1 coherence of the switch state in the σ_z and σ_x eigenbases.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoherencePair {
    pub c_z: f64,
    pub c_x: f64,
}

/// `c_x = √(1 − X²)` with `X = sin θ cos φ`. Near `|X| = 1` it is evaluated
/// as `√(cos²θ + sin²θ sin²φ)` to avoid cancellation; near `X = 0` the direct
/// form keeps `c_x = 1` exact when `X` underflows against one.
pub fn coherences(theta: f64, phi: f64) -> CoherencePair {
    let x = x(theta, phi);
    let c_x = if x.abs() <= 0.5 {
        (1.0 - x * x).sqrt()
    } else {
        theta.cos().hypot(theta.sin() * phi.sin()).min(1.0)
    };
    CoherencePair {
        c_z: theta.sin(),
        c_x,
    }
}

/// Which side of `θ = π/2` a switch state lies on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ThetaBranch {
    /// `0 ≤ θ ≤ π/2`
    First,
    /// `π/2 ≤ θ ≤ π`
    Second,
}

impl ThetaBranch {
    /// `θ = π/2` goes to `First`.
    pub fn of(theta: f64) -> Self {
        if theta <= FRAC_PI_2 {
            ThetaBranch::First
        } else {
            ThetaBranch::Second
        }
    }

    /// `cos θ` recovered from `c_z = sin θ`.
    fn cos_theta(self, c_z: f64) -> f64 {
        let r = complement(c_z);
        match self {
            ThetaBranch::First => r,
            ThetaBranch::Second => -r,
        }
    }
}

/// `Inner` is `π/2 ≤ φ ≤ 3π/2` (where `cos φ ≤ 0`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PhiHalf {
    Inner,
    Outer,
}

impl PhiHalf {
    /// Boundaries `π/2`, `3π/2` go to `Inner`.
    pub fn of(phi: f64) -> Self {
        if (FRAC_PI_2..=3.0 * FRAC_PI_2).contains(&phi) {
            PhiHalf::Inner
        } else {
            PhiHalf::Outer
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Region {
    pub theta_half: ThetaBranch,
    pub phi_half: PhiHalf,
}

/// Region of the `(θ, φ)` plane. Ties go to the first/inner side; the
/// adjoining closed forms agree on every boundary.
pub fn classify_region(theta: f64, phi: f64) -> Region {
    Region {
        theta_half: ThetaBranch::of(theta),
        phi_half: PhiHalf::of(phi.rem_euclid(TAU)),
    }
}

/// `d1` written through `c_z = sin θ`, on the given `θ` branch.
pub fn delta1(c_z: f64, phi: f64, branch: ThetaBranch) -> f64 {
    let u = c_z * phi.cos();
    u * (branch.cos_theta(c_z) - 1.0) / (4.0 * (4.0 - u))
}

/// `d2` written through `c_z = sin θ`, on the given `θ` branch.
pub fn delta2(c_z: f64, phi: f64, branch: ThetaBranch) -> f64 {
    let u = c_z * phi.cos();
    u * (branch.cos_theta(c_z) - 1.0) / (SQRT_2 * (48.0 - 3.0 * SQRT_2 * u))
}

/// `∂Δ1/∂c_z`. Singular at `c_z = 1`.
pub fn ddelta1_dcz(c_z: f64, phi: f64, branch: ThetaBranch) -> Result<f64> {
    if !(0.0..1.0).contains(&c_z) {
        if c_z == 1.0 {
            return Err(Error::SingularDerivative);
        }
        return Err(Error::OutOfRange {
            name: "c_z",
            value: c_z,
            min: 0.0,
            max: 1.0,
        });
    }
    let cos_phi = phi.cos();
    let root = complement(c_z);
    let denom = 4.0 * (4.0 - c_z * cos_phi).powi(2) * root;
    let cubic = -8.0 * c_z * c_z + c_z.powi(3) * cos_phi;
    Ok(match branch {
        ThetaBranch::First => cos_phi * (4.0 - 4.0 * root + cubic) / denom,
        ThetaBranch::Second => -cos_phi * (4.0 + 4.0 * root + cubic) / denom,
    })
}

/// `√(1 − c²)`, factored so no rounding enters before the cancellation.
fn complement(c: f64) -> f64 {
    ((1.0 - c) * (1.0 + c)).max(0.0).sqrt()
}

fn check_coherence_pair(c_z: f64, c_x: f64) -> Result<()> {
    let in_unit = |v: f64| (0.0..=1.0).contains(&v);
    // 1 − c_x² = sin²θ cos²φ ≤ sin²θ = c_z², with a little room for rounding
    if !in_unit(c_z) || !in_unit(c_x) || 1.0 - c_x * c_x > c_z * c_z + 1e-12 {
        return Err(Error::InconsistentCoherence { c_z, c_x });
    }
    Ok(())
}

/// `d1` written through both coherences, region by region.
pub fn g1_branch(c_z: f64, c_x: f64, region: Region) -> Result<f64> {
    check_coherence_pair(c_z, c_x)?;
    let w = complement(c_x);
    let r = complement(c_z);
    Ok(match (region.theta_half, region.phi_half) {
        (ThetaBranch::First, PhiHalf::Outer) => w * (r - 1.0) / (4.0 * (4.0 - w)),
        (ThetaBranch::First, PhiHalf::Inner) => -w * (r - 1.0) / (4.0 * (4.0 + w)),
        (ThetaBranch::Second, PhiHalf::Outer) => -w * (r + 1.0) / (4.0 * (4.0 - w)),
        (ThetaBranch::Second, PhiHalf::Inner) => w * (r + 1.0) / (4.0 * (4.0 + w)),
    })
}

/// `d2` written through both coherences, region by region.
pub fn g2_branch(c_z: f64, c_x: f64, region: Region) -> Result<f64> {
    check_coherence_pair(c_z, c_x)?;
    let w = complement(c_x);
    let r = complement(c_z);
    let k = 3.0 * SQRT_2 * w;
    Ok(match (region.theta_half, region.phi_half) {
        (ThetaBranch::First, PhiHalf::Outer) => w * (r - 1.0) / (SQRT_2 * (48.0 - k)),
        (ThetaBranch::First, PhiHalf::Inner) => -w * (r - 1.0) / (SQRT_2 * (48.0 + k)),
        (ThetaBranch::Second, PhiHalf::Outer) => -w * (r + 1.0) / (SQRT_2 * (48.0 - k)),
        (ThetaBranch::Second, PhiHalf::Inner) => w * (r + 1.0) / (SQRT_2 * (48.0 + k)),
    })
}

/// Largest `θ` for which protocol 1, path 1 still beats the classical 2/3:
/// `2 arccos(1/√3) ≈ 1.9106` rad (109.47°).
pub fn classical_threshold_pr1pa1() -> f64 {
    2.0 * (1.0 / 3f64.sqrt()).acos()
}

/// Every closed-form quantity at one switch state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnalyticValues {
    pub f_p1pa1: f64,
    pub f_p1pa2_on: f64,
    pub f_p1pa2_off: f64,
    pub p_on_p1: f64,
    pub d1: f64,
    pub d1max: f64,
    pub f_p2pa1: f64,
    pub f_p2pa2_on: f64,
    pub f_p2pa2_off: f64,
    pub d2: f64,
    pub d2max: f64,
    pub c_z: f64,
    pub c_x: f64,
    pub delta1: f64,
    pub delta2: f64,
    pub g1: f64,
    pub g2: f64,
}

impl AnalyticValues {
    pub fn at(theta: f64, phi: f64) -> Result<Self> {
        let coh = coherences(theta, phi);
        let region = classify_region(theta, phi);
        Ok(Self {
            f_p1pa1: f_pr1_pa1(theta),
            f_p1pa2_on: f_pr1_pa2(theta, phi, Outcome::On),
            f_p1pa2_off: f_pr1_pa2(theta, phi, Outcome::Off),
            p_on_p1: p_on_pr1(theta, phi),
            d1: d1(theta, phi),
            d1max: d1_max(theta, phi),
            f_p2pa1: f_pr2_pa1(theta),
            f_p2pa2_on: f_pr2_pa2(theta, phi, Outcome::On),
            f_p2pa2_off: f_pr2_pa2(theta, phi, Outcome::Off),
            d2: d2(theta, phi),
            d2max: d2_max(theta, phi),
            c_z: coh.c_z,
            c_x: coh.c_x,
            delta1: delta1(coh.c_z, phi, region.theta_half),
            delta2: delta2(coh.c_z, phi, region.theta_half),
            g1: g1_branch(coh.c_z, coh.c_x, region)?,
            g2: g2_branch(coh.c_z, coh.c_x, region)?,
        })
    }
}

/// Fraction of the `(θ, φ)` plane where `value(θ, φ) < 0`, on a grid.
pub fn negative_fraction(
    theta_points: usize,
    phi_points: usize,
    value: impl Fn(f64, f64) -> f64,
) -> f64 {
    let mut negative = 0usize;
    for i in 0..theta_points {
        let t = PI * i as f64 / (theta_points - 1) as f64;
        for j in 0..phi_points {
            let p = TAU * j as f64 / (phi_points - 1) as f64;
            if value(t, p) < 0.0 {
                negative += 1;
            }
        }
    }
    negative as f64 / (theta_points * phi_points) as f64
}
