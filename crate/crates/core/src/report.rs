//! Analytic and numeric values side by side, per switch state.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::analytic::AnalyticValues;
use crate::channels::Outcome;
use crate::error::Result;
use crate::protocols::{Path, Protocol, ProtocolRun, Simulator};
use crate::qmat::{l1_coherence, ComplexMatrix};
use crate::states::{hadamard, switch_state, InputParams, SwitchParams};

/// Numeric counterparts of the analytic values. Entries belonging to a
/// protocol that was not simulated stay `None`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct NumericValues {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub f_p1pa1: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub f_p1pa2_on: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub f_p1pa2_off: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p_on_p1: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d1: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d1max: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub f_p2pa1: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub f_p2pa2_on: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub f_p2pa2_off: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d2: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d2max: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c_z: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c_x: Option<f64>,
}

/// One output column with a closed form and, possibly, a simulated value.
#[derive(Clone, Copy)]
pub struct Column {
    pub name: &'static str,
    pub protocol: Option<Protocol>,
    pub outcome: Option<Outcome>,
    pub analytic: fn(&AnalyticValues) -> f64,
    pub numeric: fn(&NumericValues) -> Option<f64>,
}

impl std::fmt::Debug for Column {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name)
    }
}

macro_rules! column {
    ($name:ident, $protocol:expr, $outcome:expr) => {
        Column {
            name: stringify!($name),
            protocol: $protocol,
            outcome: $outcome,
            analytic: |a| a.$name,
            numeric: |n| n.$name,
        }
    };
}

const P1: Option<Protocol> = Some(Protocol::One);
const P2: Option<Protocol> = Some(Protocol::Two);
const ON: Option<Outcome> = Some(Outcome::On);
const OFF: Option<Outcome> = Some(Outcome::Off);

/// Value columns in output order (after `theta`, `phi`).
pub const COLUMNS: [Column; 13] = [
    column!(f_p1pa1, P1, None),
    column!(f_p1pa2_on, P1, ON),
    column!(f_p1pa2_off, P1, OFF),
    column!(p_on_p1, P1, None),
    column!(d1, P1, None),
    column!(d1max, P1, None),
    column!(f_p2pa1, P2, None),
    column!(f_p2pa2_on, P2, ON),
    column!(f_p2pa2_off, P2, OFF),
    column!(d2, P2, None),
    column!(d2max, P2, None),
    column!(c_z, None, None),
    column!(c_x, None, None),
];

pub fn column(name: &str) -> Option<&'static Column> {
    COLUMNS.iter().find(|c| c.name == name)
}

/// l1 coherence of the switch state in the σ_z and σ_x eigenbases,
/// computed from its density matrix.
pub fn numeric_coherences(switch: &SwitchParams) -> (f64, f64) {
    let rho = ComplexMatrix::projector(&switch_state(switch));
    let h = hadamard();
    let rho_x = &(&h * &rho) * &h;
    (l1_coherence(&rho), l1_coherence(&rho_x))
}

/// Simulate every numeric value for the given protocols.
pub fn numeric_values(
    sim: &Simulator,
    switch: &SwitchParams,
    protocols: &[Protocol],
) -> Result<NumericValues> {
    let mut n = NumericValues::default();
    for &protocol in protocols {
        let avg = sim.path_averages(protocol, switch)?;
        let d = avg.on - avg.discard;
        let dmax = avg.on.max(avg.off) - avg.discard;
        match protocol {
            Protocol::One => {
                n.f_p1pa1 = Some(avg.discard);
                n.f_p1pa2_on = Some(avg.on);
                n.f_p1pa2_off = Some(avg.off);
                n.p_on_p1 = Some(avg.p_on);
                n.d1 = Some(d);
                n.d1max = Some(dmax);
            }
            Protocol::Two => {
                n.f_p2pa1 = Some(avg.discard);
                n.f_p2pa2_on = Some(avg.on);
                n.f_p2pa2_off = Some(avg.off);
                n.d2 = Some(d);
                n.d2max = Some(dmax);
            }
        }
    }
    let (c_z, c_x) = numeric_coherences(switch);
    n.c_z = Some(c_z);
    n.c_x = Some(c_x);
    Ok(n)
}

/// Pointwise values for one input qubit.
#[derive(Debug, Clone, Serialize)]
pub struct InputReport {
    pub theta_prime: f64,
    pub phi_prime: f64,
    /// Closed forms: protocol 1 is input independent, protocol 2 is not.
    pub analytic: BTreeMap<String, f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub numeric: Option<BTreeMap<String, f64>>,
}

/// Every analytic value at one switch state, optionally with simulated
/// counterparts and their discrepancies.
#[derive(Debug, Clone, Serialize)]
pub struct FidelityReport {
    pub theta: f64,
    pub phi: f64,
    pub analytic: AnalyticValues,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub numeric: Option<NumericValues>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub discrepancies: Option<BTreeMap<String, f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_abs_discrepancy: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub input: Option<InputReport>,
}

fn run_key(protocol: Protocol, path: Path) -> String {
    let p = protocol.number();
    match path {
        Path::Discard => format!("f_p{p}pa1"),
        Path::PostSelect(o) => format!("f_p{p}pa2_{o}"),
    }
}

fn input_report(
    sim: Option<&Simulator>,
    switch: &SwitchParams,
    input: &InputParams,
    protocols: &[Protocol],
) -> Result<InputReport> {
    use crate::analytic as an;
    let (t, p) = (switch.theta(), switch.phi());
    let tp = input.theta_prime();
    let mut analytic = BTreeMap::new();
    for &protocol in protocols {
        for path in Path::ALL {
            let v = match (protocol, path) {
                (Protocol::One, Path::Discard) => an::f_pr1_pa1(t),
                (Protocol::One, Path::PostSelect(o)) => an::f_pr1_pa2(t, p, o),
                (Protocol::Two, Path::Discard) => an::f_pr2_pa1_pointwise(t, tp),
                (Protocol::Two, Path::PostSelect(o)) => an::f_pr2_pa2_pointwise(t, p, o, tp),
            };
            analytic.insert(run_key(protocol, path), v);
        }
    }
    let numeric = match sim {
        None => None,
        Some(sim) => {
            let mut m = BTreeMap::new();
            for &protocol in protocols {
                for path in Path::ALL {
                    let r = sim.run(&ProtocolRun {
                        protocol,
                        path,
                        switch: *switch,
                        input: *input,
                    })?;
                    m.insert(run_key(protocol, path), r.fidelity);
                }
            }
            Some(m)
        }
    };
    Ok(InputReport {
        theta_prime: input.theta_prime(),
        phi_prime: input.phi_prime(),
        analytic,
        numeric,
    })
}

impl FidelityReport {
    /// Analytic values only.
    pub fn analytic(switch: &SwitchParams) -> Result<Self> {
        Ok(Self {
            theta: switch.theta(),
            phi: switch.phi(),
            analytic: AnalyticValues::at(switch.theta(), switch.phi())?,
            numeric: None,
            discrepancies: None,
            max_abs_discrepancy: None,
            input: None,
        })
    }

    /// Build a report; with `sim` the numeric pipeline runs as well.
    pub fn build(
        sim: Option<&Simulator>,
        switch: &SwitchParams,
        input: Option<&InputParams>,
        protocols: &[Protocol],
    ) -> Result<Self> {
        let mut report = Self::analytic(switch)?;
        if let Some(sim) = sim {
            let numeric = numeric_values(sim, switch, protocols)?;
            let mut disc = BTreeMap::new();
            for col in &COLUMNS {
                if let Some(v) = (col.numeric)(&numeric) {
                    disc.insert(col.name.to_string(), (v - (col.analytic)(&report.analytic)).abs());
                }
            }
            report.numeric = Some(numeric);
            report.discrepancies = Some(disc);
        }
        if let Some(q) = input {
            let ir = input_report(sim, switch, q, protocols)?;
            if let (Some(num), Some(disc)) = (&ir.numeric, report.discrepancies.as_mut()) {
                for (k, v) in num {
                    disc.insert(format!("input.{k}"), (v - ir.analytic[k]).abs());
                }
            }
            report.input = Some(ir);
        }
        report.max_abs_discrepancy = report
            .discrepancies
            .as_ref()
            .map(|d| d.values().fold(0.0, |m: f64, &v| m.max(v)));
        Ok(report)
    }
}
