use std::f64::consts::{PI, TAU};

use proptest::prelude::*;

use qswitch_teleport::analytic;
use qswitch_teleport::channels::{kraus_protocol1, kraus_protocol2, Outcome};
use qswitch_teleport::protocols::{Path, Protocol, ProtocolRun, Simulator};
use qswitch_teleport::qmat::{
    fidelity_to_pure, partial_trace, tensor, ComplexMatrix, Qubit, SubsystemLayout, C64,
};
use qswitch_teleport::states::{initial_joint, input_qubit, InputParams, SwitchParams};

fn c64() -> impl Strategy<Value = C64> {
    (-1.0..1.0f64, -1.0..1.0f64).prop_map(|(re, im)| C64::new(re, im))
}

fn matrix(rows: usize, cols: usize) -> impl Strategy<Value = ComplexMatrix> {
    proptest::collection::vec(c64(), rows * cols)
        .prop_map(move |v| ComplexMatrix::from_vec(rows, cols, v).unwrap())
}

/// Random density matrix `A A† / tr(A A†)`.
fn density(dim: usize) -> impl Strategy<Value = ComplexMatrix> {
    matrix(dim, dim).prop_map(|a| {
        let rho = &a * &a.adjoint();
        let t = rho.trace().re;
        rho.scale_real(1.0 / t)
    })
}

fn switch() -> impl Strategy<Value = SwitchParams> {
    (0.0..=PI, 0.0..=TAU).prop_map(|(t, p)| SwitchParams::new(t, p).unwrap())
}

fn input() -> impl Strategy<Value = InputParams> {
    (0.0..=PI, 0.0..=TAU).prop_map(|(t, p)| InputParams::new(t, p).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn kraus_channels_preserve_trace(rho in density(16)) {
        for set in [kraus_protocol1().unwrap(), kraus_protocol2().unwrap()] {
            let out = set.apply(&rho).unwrap();
            prop_assert!((out.trace() - rho.trace()).norm() < 1e-12);
            prop_assert!(out.hermiticity_residual() < 1e-12);
            prop_assert!(out.min_hermitian_eigenvalue() > -1e-10);
        }
    }

    #[test]
    fn partial_trace_is_linear(a in density(8), b in density(8), w in 0.0..=1.0f64) {
        let layout = SubsystemLayout::register();
        let mix = &a.scale_real(w) + &b.scale_real(1.0 - w);
        let lhs = partial_trace(&mix, &layout, &[Qubit::B]).unwrap();
        let ra = partial_trace(&a, &layout, &[Qubit::B]).unwrap();
        let rb = partial_trace(&b, &layout, &[Qubit::B]).unwrap();
        let rhs = &ra.scale_real(w) + &rb.scale_real(1.0 - w);
        prop_assert!(lhs.max_abs_diff(&rhs) < 1e-14);
        prop_assert!((lhs.trace() - C64::new(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn tensor_is_associative(a in matrix(2, 2), b in matrix(2, 3), c in matrix(3, 2)) {
        let left = tensor(&tensor(&a, &b), &c);
        let right = tensor(&a, &tensor(&b, &c));
        prop_assert!(left.max_abs_diff(&right) < 1e-14);
    }

    #[test]
    fn fidelity_is_affine(a in density(2), b in density(2), w in 0.0..=1.0f64, q in input()) {
        let psi = input_qubit(&q);
        let mix = &a.scale_real(w) + &b.scale_real(1.0 - w);
        let f = fidelity_to_pure(&mix, &psi).unwrap();
        let fa = fidelity_to_pure(&a, &psi).unwrap();
        let fb = fidelity_to_pure(&b, &psi).unwrap();
        prop_assert!((f - (w * fa + (1.0 - w) * fb)).abs() < 1e-13);
        prop_assert!((-1e-12..=1.0 + 1e-12).contains(&f));
    }

    #[test]
    fn prepared_states_are_normalized(s in switch(), q in input()) {
        let xi = initial_joint(&s, &q);
        prop_assert!((xi.norm() - 1.0).abs() < 1e-12);
        prop_assert!(xi.check_state_vector().is_ok());
    }

    #[test]
    fn postselection_probabilities_sum_to_one(s in switch(), q in input()) {
        let sim = Simulator::shared();
        for protocol in Protocol::BOTH {
            let p: f64 = Outcome::BOTH
                .iter()
                .map(|&o| {
                    sim.run(&ProtocolRun { protocol, path: Path::PostSelect(o), switch: s, input: q })
                        .map(|r| r.probability)
                        .unwrap_or(0.0)
                })
                .sum();
            prop_assert!((p - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn fast_response_matches_full_run(s in switch(), q in input()) {
        let sim = Simulator::shared();
        for protocol in Protocol::BOTH {
            for path in Path::ALL {
                let full = sim.run(&ProtocolRun { protocol, path, switch: s, input: q });
                let fast = sim.input_response(protocol, path, &s).evaluate(&q);
                match (full, fast) {
                    (Ok(r), Ok((f, p))) => {
                        prop_assert!((r.fidelity - f).abs() < 1e-12);
                        prop_assert!((r.probability - p).abs() < 1e-12);
                    }
                    (Err(_), Err(_)) => {}
                    (a, b) => prop_assert!(false, "pipelines disagree: {a:?} vs {b:?}"),
                }
            }
        }
    }

    #[test]
    fn pointwise_fidelities_stay_in_unit_interval(s in switch(), q in input()) {
        let (t, p) = (s.theta(), s.phi());
        for o in Outcome::BOTH {
            let f = analytic::f_pr2_pa2_pointwise(t, p, o, q.theta_prime());
            prop_assert!((0.0..=1.0 + 1e-15).contains(&f));
        }
        let f = analytic::f_pr2_pa1_pointwise(t, q.theta_prime());
        prop_assert!((0.5 - 1e-15..=1.0 + 1e-15).contains(&f));
    }

    #[test]
    fn maximized_gains_are_nonnegative(s in switch()) {
        prop_assert!(analytic::d1_max(s.theta(), s.phi()) >= -1e-15);
        prop_assert!(analytic::d2_max(s.theta(), s.phi()) >= -1e-15);
        prop_assert!(analytic::d1_abs(s.theta(), s.phi()) >= analytic::d1_max(s.theta(), s.phi()) - 1e-15);
    }
}
