use std::f64::consts::PI;
use std::num::NonZeroUsize;
use std::sync::OnceLock;

use gauss_quad::legendre::GaussLegendre;

use crate::error::{Error, Result};
use crate::states::InputParams;

/// Gauss–Legendre nodes in `cos θ′`.
pub const POLAR_NODES: usize = 64;
/// Trapezoid nodes in `φ′`.
pub const AZIMUTHAL_NODES: usize = 128;

/// One node of the spherical product rule.
#[derive(Debug, Clone, Copy)]
pub struct HaarNode {
    /// Normalized weight; all weights sum to one.
    pub weight: f64,
    pub cos_half: f64,
    pub sin_half: f64,
    pub phi: f64,
    pub input: InputParams,
}

/// Uniform average over the Bloch sphere by a product rule: Gauss–Legendre in
/// `cos θ′`, periodic trapezoid in `φ′`.
#[derive(Debug, Clone)]
pub struct HaarQuadrature {
    nodes: Vec<HaarNode>,
}

impl HaarQuadrature {
    pub fn new(polar: usize, azimuthal: usize) -> Self {
        let polar = NonZeroUsize::new(polar).expect("polar node count must be positive");
        assert!(azimuthal > 0, "azimuthal node count must be positive");
        let rule = GaussLegendre::new(polar);
        let mut nodes = Vec::with_capacity(polar.get() * azimuthal);
        for &(x, w) in rule.as_node_weight_pairs() {
            // cos(θ′/2), sin(θ′/2) straight from x = cos θ′
            let cos_half = ((1.0 + x) / 2.0).sqrt();
            let sin_half = ((1.0 - x) / 2.0).sqrt();
            let theta_prime = 2.0 * sin_half.atan2(cos_half);
            for j in 0..azimuthal {
                let phi = 2.0 * PI * j as f64 / azimuthal as f64;
                nodes.push(HaarNode {
                    weight: w / 2.0 / azimuthal as f64,
                    cos_half,
                    sin_half,
                    phi,
                    input: InputParams::new(theta_prime, phi)
                        .expect("quadrature node inside the parameter domain"),
                });
            }
        }
        Self { nodes }
    }

    /// The 64 × 128 rule used throughout.
    pub fn standard() -> &'static Self {
        static RULE: OnceLock<HaarQuadrature> = OnceLock::new();
        RULE.get_or_init(|| Self::new(POLAR_NODES, AZIMUTHAL_NODES))
    }

    pub fn nodes(&self) -> &[HaarNode] {
        &self.nodes
    }

    pub fn average<F>(&self, mut f: F) -> Result<f64>
    where
        F: FnMut(InputParams) -> f64,
    {
        let mut acc = 0.0;
        for node in &self.nodes {
            let v = f(node.input);
            if !v.is_finite() {
                return Err(Error::NonFinite {
                    value: v,
                    theta_prime: node.input.theta_prime(),
                    phi_prime: node.input.phi_prime(),
                });
            }
            acc += node.weight * v;
        }
        Ok(acc)
    }
}

/// Haar average of `f` over pure input qubits with the standard rule.
pub fn haar_average<F>(f: F) -> Result<f64>
where
    F: FnMut(InputParams) -> f64,
{
    HaarQuadrature::standard().average(f)
}
