//! Grid-wide comparison of the closed forms against the simulator.

use serde::Serialize;

use super::config::SweepConfig;
use super::table::{evaluate_grid, GridRow};
use super::CliError;
use crate::channels::COMPLETENESS_TOL;
use crate::protocols::{Protocol, Simulator};
use crate::report::COLUMNS;
use crate::states::SwitchParams;

/// Tolerance for identities between closed forms.
pub const IDENTITY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_abs: Option<f64>,
    pub tolerance: f64,
}

impl Check {
    fn measured(name: impl Into<String>, max_abs: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            status: if max_abs <= tolerance { Status::Pass } else { Status::Fail },
            max_abs: Some(max_abs),
            tolerance,
        }
    }

    fn skipped(name: impl Into<String>, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            status: Status::Skipped,
            max_abs: None,
            tolerance,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifySummary {
    pub theta_points: usize,
    pub phi_points: usize,
    pub points: usize,
    pub tolerance: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub perturb: Option<f64>,
    pub passed: bool,
    pub failed: usize,
    pub skipped: usize,
    pub checks: Vec<Check>,
}

impl VerifySummary {
    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

fn max_over(rows: &[GridRow], f: impl Fn(&GridRow) -> f64) -> f64 {
    rows.iter().map(f).fold(0.0, f64::max)
}

/// Run every check on the configured grid.
pub fn verify(cfg: &SweepConfig, sim: &Simulator) -> Result<VerifySummary, CliError> {
    let rows = evaluate_grid(cfg, Some(sim))?;
    let mut checks = Vec::new();

    for col in &COLUMNS {
        let name = format!("numeric_vs_analytic.{}", col.name);
        let wanted = col.protocol.is_none_or(|p| cfg.includes(p))
            && match (col.outcome, cfg.outcome) {
                (Some(a), Some(b)) => a == b,
                _ => true,
            };
        if !wanted {
            checks.push(Check::skipped(name, cfg.tolerance));
            continue;
        }
        let err = max_over(&rows, |r| {
            let num = r.numeric.as_ref().and_then(|n| (col.numeric)(n)).unwrap_or(f64::NAN);
            let e = (num - (col.analytic)(&r.analytic)).abs();
            // NaN counts as infinitely wrong
            if e.is_nan() { f64::INFINITY } else { e }
        });
        checks.push(Check::measured(name, err, cfg.tolerance));
    }

    for protocol in Protocol::BOTH {
        let n = protocol.number();
        let included = cfg.includes(protocol);

        let name = format!("kraus_completeness.p{n}");
        checks.push(if included {
            Check::measured(name, sim.kraus(protocol).completeness_residual(), COMPLETENESS_TOL)
        } else {
            Check::skipped(name, COMPLETENESS_TOL)
        });

        let name = format!("coherence_chain.d{n}");
        checks.push(if included {
            let err = max_over(&rows, |r| {
                let a = &r.analytic;
                match protocol {
                    Protocol::One => (a.d1 - a.delta1).abs().max((a.d1 - a.g1).abs()),
                    Protocol::Two => (a.d2 - a.delta2).abs().max((a.d2 - a.g2).abs()),
                }
            });
            Check::measured(name, err, IDENTITY_TOL)
        } else {
            Check::skipped(name, IDENTITY_TOL)
        });

        let name = format!("nonnegative.d{n}max");
        checks.push(if included {
            // worst amount by which the simulated maximized gain dips below zero
            let err = max_over(&rows, |r| {
                let n = r.numeric.as_ref().expect("numeric values requested");
                let v = match protocol {
                    Protocol::One => n.d1max,
                    Protocol::Two => n.d2max,
                };
                v.map_or(f64::INFINITY, |v| (-v).max(0.0))
            });
            Check::measured(name, err, IDENTITY_TOL)
        } else {
            Check::skipped(name, IDENTITY_TOL)
        });

        let name = format!("classical_mixture.p{n}");
        checks.push(if included {
            let mut err: f64 = 0.0;
            for r in &rows {
                let s = SwitchParams::new(r.theta, r.phi)?;
                let mix = sim.classical_mixture_fidelity(protocol, &s)?;
                let n = r.numeric.as_ref().expect("numeric values requested");
                let pa1 = match protocol {
                    Protocol::One => n.f_p1pa1,
                    Protocol::Two => n.f_p2pa1,
                };
                err = err.max(pa1.map_or(f64::INFINITY, |v| (v - mix).abs()));
            }
            Check::measured(name, err, IDENTITY_TOL)
        } else {
            Check::skipped(name, IDENTITY_TOL)
        });
    }

    let failed = checks.iter().filter(|c| c.status == Status::Fail).count();
    let skipped = checks.iter().filter(|c| c.status == Status::Skipped).count();
    Ok(VerifySummary {
        theta_points: cfg.theta_points,
        phi_points: cfg.phi_points,
        points: rows.len(),
        tolerance: cfg.tolerance,
        perturb: cfg.perturb,
        passed: failed == 0,
        failed,
        skipped,
        checks,
    })
}
