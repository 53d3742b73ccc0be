//! End-to-end numerical execution of the switched teleportation protocols.
//!
//! [`Simulator::run`] evolves the full 16-dimensional state for one input.
//! Haar averages go through [`InputResponse`]: Bob's unnormalized output is
//! linear in the initial operator, so the channel is evolved once on every
//! basis operator `|k⟩⟨l|_S ⊗ |i⟩⟨j|_{A′} ⊗ |ψ⁻⟩⟨ψ⁻|_{AB}` and the exact
//! rational integrand is then evaluated at each quadrature node. No closed-form
//! fidelity enters this path.

use std::fmt;
use std::sync::OnceLock;

use crate::channels::{
    kraus_protocol1, kraus_protocol2, postselect_switch, project_switch, KrausSet, Outcome,
    POSTSELECT_MIN_PROBABILITY,
};
use crate::error::{Error, Result};
use crate::qmat::{
    fidelity_to_pure, partial_trace, tensor_all, ComplexMatrix, HaarQuadrature, Qubit,
    SubsystemLayout, C64, ZERO,
};
use crate::states::{bell, initial_joint, input_qubit, Bell, InputParams, SwitchParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Protocol {
    /// Off branch does nothing.
    One,
    /// Off branch measures and prepares.
    Two,
}

impl Protocol {
    pub const BOTH: [Protocol; 2] = [Protocol::One, Protocol::Two];

    pub fn number(self) -> u8 {
        match self {
            Protocol::One => 1,
            Protocol::Two => 2,
        }
    }

    fn index(self) -> usize {
        self.number() as usize - 1
    }
}

impl fmt::Display for Protocol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Pr{}", self.number())
    }
}

/// What happens to the switch after the protocol.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Path {
    /// Path 1: trace the switch out.
    Discard,
    /// Path 2: Hadamard on the switch, measure, keep `Outcome`.
    PostSelect(Outcome),
}

impl Path {
    pub const ALL: [Path; 3] = [
        Path::Discard,
        Path::PostSelect(Outcome::On),
        Path::PostSelect(Outcome::Off),
    ];

    pub fn number(self) -> u8 {
        match self {
            Path::Discard => 1,
            Path::PostSelect(_) => 2,
        }
    }

    pub fn outcome(self) -> Option<Outcome> {
        match self {
            Path::Discard => None,
            Path::PostSelect(o) => Some(o),
        }
    }

    fn index(self) -> usize {
        match self {
            Path::Discard => 0,
            Path::PostSelect(Outcome::On) => 1,
            Path::PostSelect(Outcome::Off) => 2,
        }
    }
}

impl fmt::Display for Path {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Path::Discard => f.write_str("Pa1"),
            Path::PostSelect(o) => write!(f, "Pa2({o})"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProtocolRun {
    pub protocol: Protocol,
    pub path: Path,
    pub switch: SwitchParams,
    pub input: InputParams,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunResult {
    /// Bob's normalized 2×2 state.
    pub bob_state: ComplexMatrix,
    pub fidelity: f64,
    /// Outcome probability; 1 for path 1.
    pub probability: f64,
}

/// Haar-averaged quantities of one protocol at one switch state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathAverages {
    pub discard: f64,
    pub on: f64,
    pub off: f64,
    pub p_on: f64,
    pub p_off: f64,
}

impl PathAverages {
    pub fn fidelity(&self, path: Path) -> f64 {
        match path {
            Path::Discard => self.discard,
            Path::PostSelect(Outcome::On) => self.on,
            Path::PostSelect(Outcome::Off) => self.off,
        }
    }

    pub fn probability(&self, outcome: Outcome) -> f64 {
        match outcome {
            Outcome::On => self.p_on,
            Outcome::Off => self.p_off,
        }
    }
}

type Mat2 = [[C64; 2]; 2];

const ZERO2: Mat2 = [[ZERO; 2]; 2];

fn to_mat2(m: &ComplexMatrix) -> Mat2 {
    [[m.get(0, 0), m.get(0, 1)], [m.get(1, 0), m.get(1, 1)]]
}

/// Bob's unnormalized output as a linear function of `|i⟩⟨j|_{A′}` for a
/// fixed switch state and path.
#[derive(Debug, Clone, Copy)]
pub struct InputResponse {
    blocks: [[Mat2; 2]; 2],
    normalize: bool,
}

// Monomials c^(4-n) s^n e^{i e φ′} reachable in ⟨ψ|B(ψ)|ψ⟩ with
// ψ = (c, s e^{iφ′}); likewise for the quadratic trace.
const QUARTIC_TERMS: [(i32, i32); 9] = [
    (0, 0),
    (1, -1),
    (1, 1),
    (2, -2),
    (2, 0),
    (2, 2),
    (3, -1),
    (3, 1),
    (4, 0),
];
const QUADRATIC_TERMS: [(i32, i32); 4] = [(0, 0), (1, -1), (1, 1), (2, 0)];

fn term_index(terms: &[(i32, i32)], n: i32, e: i32) -> usize {
    terms
        .iter()
        .position(|&t| t == (n, e))
        .expect("unreachable monomial")
}

/// Real feature vectors of one quadrature node.
struct NodeFeatures {
    weight: f64,
    quartic: [f64; 18],
    quadratic: [f64; 8],
}

fn node_features() -> &'static [NodeFeatures] {
    static FEATURES: OnceLock<Vec<NodeFeatures>> = OnceLock::new();
    FEATURES.get_or_init(|| {
        HaarQuadrature::standard()
            .nodes()
            .iter()
            .map(|node| {
                let (c, s) = (node.cos_half, node.sin_half);
                let fill = |terms: &[(i32, i32)], degree: i32, out: &mut [f64]| {
                    for (t, &(n, e)) in terms.iter().enumerate() {
                        let mag = c.powi(degree - n) * s.powi(n);
                        let (sin, cos) = (e as f64 * node.phi).sin_cos();
                        out[2 * t] = mag * cos;
                        out[2 * t + 1] = -mag * sin;
                    }
                };
                let mut quartic = [0.0; 18];
                let mut quadratic = [0.0; 8];
                fill(&QUARTIC_TERMS, 4, &mut quartic);
                fill(&QUADRATIC_TERMS, 2, &mut quadratic);
                NodeFeatures {
                    weight: node.weight,
                    quartic,
                    quadratic,
                }
            })
            .collect()
    })
}

fn mean_features() -> &'static NodeFeatures {
    static MEAN: OnceLock<NodeFeatures> = OnceLock::new();
    MEAN.get_or_init(|| {
        let mut mean = NodeFeatures {
            weight: 0.0,
            quartic: [0.0; 18],
            quadratic: [0.0; 8],
        };
        for node in node_features() {
            mean.weight += node.weight;
            for (m, v) in mean.quartic.iter_mut().zip(&node.quartic) {
                *m += node.weight * v;
            }
            for (m, v) in mean.quadratic.iter_mut().zip(&node.quadratic) {
                *m += node.weight * v;
            }
        }
        mean
    })
}

#[inline]
fn dot<const N: usize>(a: &[f64; N], b: &[f64; N]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

impl InputResponse {
    /// Unnormalized Bob operator for input `q`.
    pub fn bob_operator(&self, q: &InputParams) -> ComplexMatrix {
        let psi = [q.a(), q.b()];
        let mut out = ZERO2;
        for i in 0..2 {
            for j in 0..2 {
                let w = psi[i] * psi[j].conj();
                for (r, row) in out.iter_mut().enumerate() {
                    for (c, v) in row.iter_mut().enumerate() {
                        *v += w * self.blocks[i][j][r][c];
                    }
                }
            }
        }
        ComplexMatrix::from_fn(2, 2, |r, c| out[r][c])
    }

    /// `(fidelity, probability)` for input `q`.
    pub fn evaluate(&self, q: &InputParams) -> Result<(f64, f64)> {
        let bob = self.bob_operator(q);
        let psi = input_qubit(q);
        let overlap = psi.inner(&(&bob * &psi)).re;
        if !self.normalize {
            return Ok((overlap, 1.0));
        }
        let p = bob.trace().re;
        if p < POSTSELECT_MIN_PROBABILITY {
            return Err(Error::DegeneratePostSelection(p));
        }
        Ok((overlap / p, p))
    }

    #[allow(clippy::needless_range_loop)]
    fn coefficients(&self) -> ([f64; 18], [f64; 8]) {
        let mut quartic = [C64::new(0.0, 0.0); 9];
        let mut quadratic = [C64::new(0.0, 0.0); 4];
        for i in 0..2 {
            for j in 0..2 {
                let b = &self.blocks[i][j];
                let n2 = (i + j) as i32;
                let e2 = i as i32 - j as i32;
                quadratic[term_index(&QUADRATIC_TERMS, n2, e2)] += b[0][0] + b[1][1];
                for k in 0..2 {
                    for l in 0..2 {
                        let n = (i + j + k + l) as i32;
                        let e = (i + l) as i32 - (j + k) as i32;
                        quartic[term_index(&QUARTIC_TERMS, n, e)] += b[k][l];
                    }
                }
            }
        }
        let mut q4 = [0.0; 18];
        for (t, z) in quartic.iter().enumerate() {
            q4[2 * t] = z.re;
            q4[2 * t + 1] = z.im;
        }
        let mut q2 = [0.0; 8];
        for (t, z) in quadratic.iter().enumerate() {
            q2[2 * t] = z.re;
            q2[2 * t + 1] = z.im;
        }
        (q4, q2)
    }

    /// Haar averages of `(fidelity, probability)` with the standard rule.
    pub fn haar_averages(&self) -> Result<(f64, f64)> {
        let (q4, q2) = self.coefficients();
        if !self.normalize {
            // linear in the features, so the rule collapses to one dot product
            let mean = mean_features();
            return Ok((dot(&q4, &mean.quartic), mean.weight));
        }
        let mut fid = 0.0;
        let mut prob = 0.0;
        for node in node_features() {
            let overlap = dot(&q4, &node.quartic);
            if self.normalize {
                let p = dot(&q2, &node.quadratic);
                if p < POSTSELECT_MIN_PROBABILITY {
                    return Err(Error::DegeneratePostSelection(p));
                }
                fid += node.weight * overlap / p;
                prob += node.weight * p;
            } else {
                fid += node.weight * overlap;
                prob += node.weight;
            }
        }
        if !fid.is_finite() {
            return Err(Error::NonFinite {
                value: fid,
                theta_prime: f64::NAN,
                phi_prime: f64::NAN,
            });
        }
        Ok((fid, prob))
    }
}

/// Bob's output for every switch/input basis operator, per path.
#[derive(Debug, Clone)]
struct ProtocolResponse {
    // [path][k][l][i][j]
    table: [[[[[Mat2; 2]; 2]; 2]; 2]; 3],
}

impl ProtocolResponse {
    #[allow(clippy::needless_range_loop)]
    fn build(kraus: &KrausSet) -> Result<Self> {
        let full = SubsystemLayout::full();
        let register = SubsystemLayout::register();
        let singlet = ComplexMatrix::projector(&bell(Bell::PsiMinus));
        let e = |d, i| ComplexMatrix::basis_ket(d, i);
        let mut table = [[[[[ZERO2; 2]; 2]; 2]; 2]; 3];
        for k in 0..2 {
            for l in 0..2 {
                for i in 0..2 {
                    for j in 0..2 {
                        let op = tensor_all(&[
                            &ComplexMatrix::ket_bra(&e(2, k), &e(2, l)),
                            &ComplexMatrix::ket_bra(&e(2, i), &e(2, j)),
                            &singlet,
                        ]);
                        let out = kraus.apply(&op)?;
                        for path in Path::ALL {
                            let bob = match path {
                                Path::Discard => partial_trace(&out, &full, &[Qubit::B])?,
                                Path::PostSelect(o) => partial_trace(
                                    &project_switch(&out, o)?,
                                    &register,
                                    &[Qubit::B],
                                )?,
                            };
                            table[path.index()][k][l][i][j] = to_mat2(&bob);
                        }
                    }
                }
            }
        }
        Ok(Self { table })
    }

    fn input_response(&self, path: Path, switch: &SwitchParams) -> InputResponse {
        let s = [switch.alpha(), switch.beta()];
        let t = &self.table[path.index()];
        let mut blocks = [[ZERO2; 2]; 2];
        for k in 0..2 {
            for l in 0..2 {
                let w = s[k] * s[l].conj();
                for i in 0..2 {
                    for j in 0..2 {
                        for r in 0..2 {
                            for c in 0..2 {
                                blocks[i][j][r][c] += w * t[k][l][i][j][r][c];
                            }
                        }
                    }
                }
            }
        }
        InputResponse {
            blocks,
            normalize: path != Path::Discard,
        }
    }
}

/// Kraus sets of both protocols plus their response tables.
#[derive(Debug, Clone)]
pub struct Simulator {
    sets: [KrausSet; 2],
    responses: [ProtocolResponse; 2],
}

impl Simulator {
    pub fn new() -> Result<Self> {
        Self::from_kraus(kraus_protocol1()?, kraus_protocol2()?)
    }

    /// Simulator over arbitrary 16-dimensional Kraus sets (e.g. perturbed ones).
    pub fn from_kraus(protocol1: KrausSet, protocol2: KrausSet) -> Result<Self> {
        let responses = [
            ProtocolResponse::build(&protocol1)?,
            ProtocolResponse::build(&protocol2)?,
        ];
        Ok(Self {
            sets: [protocol1, protocol2],
            responses,
        })
    }

    /// Process-wide simulator with the unperturbed Kraus sets.
    pub fn shared() -> &'static Simulator {
        static SIM: OnceLock<Simulator> = OnceLock::new();
        SIM.get_or_init(|| Simulator::new().expect("standard Kraus sets are complete"))
    }

    pub fn kraus(&self, protocol: Protocol) -> &KrausSet {
        &self.sets[protocol.index()]
    }

    /// Full density-matrix evolution for one input.
    pub fn run(&self, r: &ProtocolRun) -> Result<RunResult> {
        let rho = ComplexMatrix::projector(&initial_joint(&r.switch, &r.input));
        let out = self.kraus(r.protocol).apply(&rho)?;
        let (register, probability) = match r.path {
            Path::Discard => (
                partial_trace(
                    &out,
                    &SubsystemLayout::full(),
                    &[Qubit::APrime, Qubit::A, Qubit::B],
                )?,
                1.0,
            ),
            Path::PostSelect(o) => postselect_switch(&out, o)?,
        };
        let bob_state = partial_trace(&register, &SubsystemLayout::register(), &[Qubit::B])?;
        let fidelity = fidelity_to_pure(&bob_state, &input_qubit(&r.input))?;
        Ok(RunResult {
            bob_state,
            fidelity,
            probability,
        })
    }

    pub fn input_response(
        &self,
        protocol: Protocol,
        path: Path,
        switch: &SwitchParams,
    ) -> InputResponse {
        self.responses[protocol.index()].input_response(path, switch)
    }

    /// Haar-averaged fidelity over input qubits.
    pub fn average_fidelity(
        &self,
        protocol: Protocol,
        path: Path,
        switch: &SwitchParams,
    ) -> Result<f64> {
        Ok(self.input_response(protocol, path, switch).haar_averages()?.0)
    }

    /// All path fidelities and outcome probabilities, Haar averaged.
    pub fn path_averages(&self, protocol: Protocol, switch: &SwitchParams) -> Result<PathAverages> {
        let (discard, _) = self
            .input_response(protocol, Path::Discard, switch)
            .haar_averages()?;
        let (on, p_on) = self
            .input_response(protocol, Path::PostSelect(Outcome::On), switch)
            .haar_averages()?;
        let (off, p_off) = self
            .input_response(protocol, Path::PostSelect(Outcome::Off), switch)
            .haar_averages()?;
        Ok(PathAverages {
            discard,
            on,
            off,
            p_on,
            p_off,
        })
    }

    /// `|α|²·F_on + |β|²·F_off` from the two pure switch branches, each run
    /// numerically and Haar averaged.
    pub fn classical_mixture_fidelity(&self, protocol: Protocol, switch: &SwitchParams) -> Result<f64> {
        let on_branch = SwitchParams::new(0.0, 0.0)?;
        let off_branch = SwitchParams::new(std::f64::consts::PI, 0.0)?;
        let f_on = self.average_fidelity(protocol, Path::Discard, &on_branch)?;
        let f_off = self.average_fidelity(protocol, Path::Discard, &off_branch)?;
        Ok(switch.alpha().norm_sqr() * f_on + switch.beta().norm_sqr() * f_off)
    }
}

pub fn run(r: &ProtocolRun) -> Result<RunResult> {
    Simulator::shared().run(r)
}

pub fn average_fidelity(protocol: Protocol, path: Path, switch: &SwitchParams) -> Result<f64> {
    Simulator::shared().average_fidelity(protocol, path, switch)
}

pub fn classical_mixture_fidelity(protocol: Protocol, switch: &SwitchParams) -> Result<f64> {
    Simulator::shared().classical_mixture_fidelity(protocol, switch)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qmat::haar_average;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::{FRAC_PI_2, PI, TAU};

    fn sp(t: f64, p: f64) -> SwitchParams {
        SwitchParams::new(t, p).unwrap()
    }

    fn ip(t: f64, p: f64) -> InputParams {
        InputParams::new(t, p).unwrap()
    }

    fn go(protocol: Protocol, path: Path, switch: SwitchParams, input: InputParams) -> RunResult {
        run(&ProtocolRun {
            protocol,
            path,
            switch,
            input,
        })
        .unwrap()
    }

    const ON: Path = Path::PostSelect(Outcome::On);
    const OFF: Path = Path::PostSelect(Outcome::Off);

    #[test]
    fn switch_on_is_perfect() {
        let r = go(Protocol::One, Path::Discard, sp(0.0, 0.0), ip(1.2, 3.4));
        assert!((r.fidelity - 1.0).abs() < 1e-12);
        assert_eq!(r.probability, 1.0);
        r.bob_state.check_density_matrix().unwrap();
    }

    #[test]
    fn equatorial_switch_path1() {
        for q in [ip(0.0, 0.0), ip(1.0, 2.0), ip(PI, 5.0)] {
            let r = go(Protocol::One, Path::Discard, sp(FRAC_PI_2, 1.0), q);
            assert!((r.fidelity - 0.75).abs() < 1e-12);
        }
    }

    #[test]
    fn protocol1_path2_on_at_phi_pi() {
        // brute-force 16×16 evolution: F = 4/5, P = 5/8
        let r = go(Protocol::One, ON, sp(FRAC_PI_2, PI), ip(0.8, 0.4));
        assert!((r.fidelity - 0.8).abs() < 1e-12);
        assert!((r.probability - 5.0 / 8.0).abs() < 1e-12);
        r.bob_state.check_density_matrix().unwrap();
    }

    #[test]
    fn protocol2_classical_branch_at_equator() {
        let r = go(Protocol::Two, Path::Discard, sp(PI, 0.0), ip(FRAC_PI_2, 0.3));
        assert!((r.fidelity - 0.5).abs() < 1e-12);
    }

    #[test]
    fn averages_examples() {
        let f = average_fidelity(Protocol::Two, Path::Discard, &sp(FRAC_PI_2, 0.0)).unwrap();
        assert!((f - 5.0 / 6.0).abs() < 1e-12);
        let f = average_fidelity(Protocol::Two, ON, &sp(0.0, 0.0)).unwrap();
        assert!((f - 1.0).abs() < 1e-12);
        let r2 = 2f64.sqrt();
        let f = average_fidelity(Protocol::Two, ON, &sp(FRAC_PI_2, PI)).unwrap();
        assert!((f - (40.0 + 3.0 * r2) / (48.0 + 3.0 * r2)).abs() < 1e-12);
    }

    #[test]
    fn response_matches_full_run() {
        let sim = Simulator::shared();
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..50 {
            let s = sp(rng.random_range(0.0..=PI), rng.random_range(0.0..TAU));
            let q = ip(rng.random_range(0.0..=PI), rng.random_range(0.0..TAU));
            for protocol in Protocol::BOTH {
                for path in Path::ALL {
                    let full = go(protocol, path, s, q);
                    let (f, p) = sim.input_response(protocol, path, &s).evaluate(&q).unwrap();
                    assert!((full.fidelity - f).abs() < 1e-13);
                    assert!((full.probability - p).abs() < 1e-13);
                }
            }
        }
    }

    #[test]
    fn fast_average_matches_brute_force_quadrature() {
        // haar_average over full 16×16 runs at every node
        let sim = Simulator::shared();
        for (protocol, path, s) in [
            (Protocol::Two, ON, sp(1.1, 2.5)),
            (Protocol::Two, Path::Discard, sp(2.0, 0.7)),
            (Protocol::One, OFF, sp(0.4, 4.0)),
        ] {
            let brute = haar_average(|q| go(protocol, path, s, q).fidelity).unwrap();
            let fast = sim.average_fidelity(protocol, path, &s).unwrap();
            assert!((brute - fast).abs() < 1e-12, "{protocol} {path}: {brute} vs {fast}");
        }
    }

    #[test]
    fn protocol1_is_input_independent() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let s = sp(2.2, 0.9);
        let reference: Vec<f64> = Path::ALL
            .iter()
            .map(|&p| go(Protocol::One, p, s, ip(0.0, 0.0)).fidelity)
            .collect();
        for _ in 0..1000 {
            let q = ip(rng.random_range(0.0..=PI), rng.random_range(0.0..TAU));
            for (path, f0) in Path::ALL.iter().zip(&reference) {
                assert!((go(Protocol::One, *path, s, q).fidelity - f0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn outcome_swap_symmetry() {
        let sim = Simulator::shared();
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..200 {
            let t = rng.random_range(0.0..=PI);
            let p = rng.random_range(0.0..TAU);
            let shifted = (p + PI) % TAU;
            for protocol in Protocol::BOTH {
                let off = sim.average_fidelity(protocol, OFF, &sp(t, p)).unwrap();
                let on = sim.average_fidelity(protocol, ON, &sp(t, shifted)).unwrap();
                assert!((off - on).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn classical_mixture_examples() {
        let f = classical_mixture_fidelity(Protocol::One, &sp(FRAC_PI_2, 0.0)).unwrap();
        assert!((f - 0.75).abs() < 1e-12);
        let f = classical_mixture_fidelity(Protocol::Two, &sp(PI, 0.0)).unwrap();
        assert!((f - 2.0 / 3.0).abs() < 1e-12);
        let f = classical_mixture_fidelity(Protocol::One, &sp(0.0, 0.0)).unwrap();
        assert!((f - 1.0).abs() < 1e-12);
    }

    #[test]
    fn probabilities_sum_to_one() {
        let sim = Simulator::shared();
        for protocol in Protocol::BOTH {
            for &(t, p) in &[(0.3, 0.0), (1.5, 2.0), (3.0, 6.0)] {
                let a = sim.path_averages(protocol, &sp(t, p)).unwrap();
                assert!((a.p_on + a.p_off - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn perturbed_kraus_changes_results() {
        let p1 = kraus_protocol1().unwrap().perturbed(0, 1, 1, 1e-6);
        let sim = Simulator::from_kraus(p1, kraus_protocol2().unwrap()).unwrap();
        let s = sp(1.0, 1.0);
        let clean = Simulator::shared().average_fidelity(Protocol::One, ON, &s).unwrap();
        let dirty = sim.average_fidelity(Protocol::One, ON, &s).unwrap();
        assert!((clean - dirty).abs() > 1e-10);
    }
}
