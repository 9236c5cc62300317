//! Cross-checks of a scenario: closed forms against the full-state oracle,
//! symplecticity of the model, and single-carrier dominance.

use std::fmt::{self, Display};

use optomech_core::bounds::{crb_homodyne_general, qcrb_general};
use optomech_core::gaussian::{commutation_matrix, symplectic_from_complex, Sectors};
use optomech_core::optimizer::{verify_single_carrier_dominance, BoundKind, GridSpec, Verdict};
use optomech_core::oracle::{homodyne_cfi, qfi_full_state};
use optomech_core::sensor::{build_model, CouplingSet};
use optomech_core::Error as CoreError;

use crate::config::ScenarioConfig;
use crate::error::Result;
use crate::sweep::{operating_point, Operating};

/// Largest relative disagreement accepted between oracle and closed form.
pub const ORACLE_TOLERANCE: f64 = 1e-9;
/// Frequencies sampled from the sweep.
pub const SAMPLE_POINTS: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    Skip,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub status: Status,
    pub detail: String,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct VerifyReport {
    pub checks: Vec<Check>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.status != Status::Fail)
    }

    fn record(&mut self, name: String, status: Status, detail: String) {
        self.checks.push(Check { name, status, detail });
    }

    fn compare(&mut self, name: String, oracle: std::result::Result<f64, CoreError>, closed: std::result::Result<f64, CoreError>) {
        match (oracle, closed) {
            (Ok(o), Ok(c)) => {
                let err = (o - c).abs() / c.abs();
                let status = if err < ORACLE_TOLERANCE { Status::Pass } else { Status::Fail };
                self.record(name, status, format!("relative error {err:.3e}"));
            }
            (Err(e @ (CoreError::IllConditioned { .. } | CoreError::Divergent(_))), _)
            | (_, Err(e @ CoreError::Divergent(_))) => self.record(name, Status::Skip, e.to_string()),
            (Err(e), _) | (_, Err(e)) => self.record(name, Status::Fail, e.to_string()),
        }
    }
}

impl Display for VerifyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            let tag = match c.status {
                Status::Pass => "PASS",
                Status::Fail => "FAIL",
                Status::Skip => "SKIP",
            };
            writeln!(f, "{tag} {}: {}", c.name, c.detail)?;
        }
        Ok(())
    }
}

fn sample_omegas(config: &ScenarioConfig) -> Vec<f64> {
    let all = config.sweep.omegas();
    let n = all.len().min(SAMPLE_POINTS);
    (0..n).map(|i| all[i * (all.len() - 1) / (n - 1).max(1)]).collect()
}

fn check_point(report: &mut VerifyReport, config: &ScenarioConfig, op: &Operating) {
    let tag = format!("omega={:.6e}", op.omega);
    let original = config.carriers();
    let betas = original.iter().map(|c| c.beta).collect();
    let couplings = match CouplingSet::with_phases(op.kappas.clone(), op.h_sql, betas, op.chi) {
        Ok(c) => c,
        Err(e) => {
            report.record(format!("{tag} couplings"), Status::Skip, e.to_string());
            return;
        }
    };
    let eta = config.sensor.eta;
    let sq_in: Vec<_> = original.iter().map(|c| c.squeezing).collect();
    let th_in: Vec<_> = original.iter().map(|c| c.theta).collect();

    match symplectic_from_complex(&build_model(&couplings).m) {
        Ok(map) => {
            let res = map.symplectic_residual(&commutation_matrix(couplings.carriers(), Sectors::XP));
            let status = if res < 1e-10 { Status::Pass } else { Status::Fail };
            report.record(format!("{tag} symplectic"), status, format!("residual {res:.3e}"));
        }
        Err(e) => report.record(format!("{tag} symplectic"), Status::Fail, e.to_string()),
    }

    let oracle_q = qfi_full_state(&couplings, &sq_in, eta, 0.0).map(|q| 1.0 / q);
    let closed_q = qcrb_general(&op.kappas, &op.squeezings(), eta, op.h_sql).map(|b| b.variance_bound);
    report.compare(format!("{tag} quantum limit"), oracle_q, closed_q);

    let oracle_c = homodyne_cfi(&couplings, &sq_in, &th_in, eta).map(|c| 1.0 / c);
    let closed_c = crb_homodyne_general(&op.kappas, &op.squeezings(), &op.thetas(), eta, op.h_sql)
        .map(|b| b.variance_bound);
    report.compare(format!("{tag} homodyne limit"), oracle_c, closed_c);
}

pub fn run_verify(config: &ScenarioConfig) -> Result<VerifyReport> {
    let mut report = VerifyReport::default();
    let mut reference: Option<Operating> = None;
    for omega in sample_omegas(config) {
        match operating_point(config, omega) {
            Ok(op) => {
                check_point(&mut report, config, &op);
                reference.get_or_insert(op);
            }
            Err(e) => report.record(format!("omega={omega:.6e}"), Status::Skip, e.to_string()),
        }
    }

    let Some(op) = reference else {
        return Ok(report);
    };
    let sq = op.squeezings();
    let thetas = op.thetas();
    for kind in [BoundKind::Fundamental, BoundKind::SignalQuadrature, BoundKind::Homodyne] {
        let name = format!("dominance {}", kind.as_str());
        if sq.len() > 4 {
            report.record(name, Status::Skip, "more than 4 carriers".into());
            continue;
        }
        match verify_single_carrier_dominance(kind, &sq, &thetas, config.sensor.eta, GridSpec::default()) {
            Ok(d) => {
                let (status, detail) = match d.verdict {
                    Verdict::Holds => (
                        Status::Pass,
                        format!(
                            "best single carrier {:.6e}, search minimum {:.6e} over {} points",
                            d.optimum.bound_star,
                            d.search_min,
                            d.grid_points + d.random_points
                        ),
                    ),
                    Verdict::Violated { margin } => (Status::Fail, format!("beaten by {margin:.3e}")),
                    Verdict::ShotNoiseRegime => (Status::Skip, "shot-noise regime, optimum at infinite coupling".into()),
                };
                report.record(name, status, detail);
            }
            Err(e) => report.record(name, Status::Fail, e.to_string()),
        }
    }
    Ok(report)
}
