//! Frequency sweeps.

use optomech_core::bounds::{self, FormulaId};
use optomech_core::sensor::{
    chi_negative_equivalent, h_sql, kappa_resonant, kappa_tuned, CarrierConfig, ResponseSign,
};
use optomech_core::Squeezing;
use rayon::prelude::*;

use crate::config::{BoundColumn, Convention, CouplingModel, ScenarioConfig};
use crate::error::{CliError, Result};

/// Couplings at one sideband frequency.
#[derive(Debug, Clone, PartialEq)]
pub struct Operating {
    pub omega: f64,
    pub kappas: Vec<f64>,
    pub h_sql: f64,
    pub chi: ResponseSign,
    /// Carriers as seen by the closed forms: angles flipped when the
    /// response is negative.
    pub carriers: Vec<CarrierConfig>,
}

impl Operating {
    pub fn kappa_tot(&self) -> f64 {
        self.kappas.iter().sum()
    }

    pub fn squeezings(&self) -> Vec<Squeezing> {
        self.carriers.iter().map(|c| c.squeezing).collect()
    }

    pub fn thetas(&self) -> Vec<f64> {
        self.carriers.iter().map(|c| c.theta).collect()
    }
}

pub fn operating_point(config: &ScenarioConfig, omega: f64) -> optomech_core::Result<Operating> {
    let params = config.sensor.params_at(omega);
    let carriers = config.carriers();
    let mut kappas = Vec::with_capacity(carriers.len());
    let mut chi = ResponseSign::Positive;
    for c in &carriers {
        match config.coupling_model {
            CouplingModel::Tuned => kappas.push(kappa_tuned(c, &params)?),
            CouplingModel::Resonant => {
                let (k, sign) = kappa_resonant(c, &params)?;
                kappas.push(k);
                chi = sign;
            }
        }
    }
    let carriers = match chi {
        ResponseSign::Positive => carriers,
        ResponseSign::Negative => chi_negative_equivalent(&carriers),
    };
    Ok(Operating {
        omega,
        kappas,
        h_sql: h_sql(&params)?,
        chi,
        carriers,
    })
}

/// Variance bound of one column at an operating point.
pub fn evaluate_column(op: &Operating, column: &BoundColumn) -> optomech_core::Result<f64> {
    let k = &op.kappas;
    let k_tot = op.kappa_tot();
    let sq = op.squeezings();
    let first = sq[0];
    let (eta, h) = (column.eta, op.h_sql);
    let result = match column.formula {
        FormulaId::QcrbGeneral => bounds::qcrb_general(k, &sq, eta, h)?,
        FormulaId::CrbHomodyne => bounds::crb_homodyne_general(k, &sq, &op.thetas(), eta, h)?,
        FormulaId::CrbSignalQuadrature => bounds::crb_signal_quadrature(k, &sq, eta, h)?,
        FormulaId::QcrbEqualSqueezing => bounds::qcrb_equal_squeezing(k_tot, first, eta, h)?,
        FormulaId::QcrbEqualSqueezingOptimalPhi => {
            bounds::qcrb_equal_squeezing_optimal_phi(k_tot, first.r, eta, h)?
        }
        FormulaId::CrbSignalEqualSqueezing => bounds::crb_signal_equal_squeezing(k_tot, first, eta, h)?,
        FormulaId::CrbSignalEqualSqueezingOptimalPhi => {
            bounds::crb_signal_equal_squeezing_optimal_phi(k_tot, first.r, eta, h)?
        }
        FormulaId::QcrbUnsqueezed => bounds::qcrb_unsqueezed(k_tot, eta, h)?,
        FormulaId::CrbSignalUnsqueezed => bounds::crb_signal_unsqueezed(k_tot, eta, h)?,
        FormulaId::QcrbLossless => bounds::qcrb_lossless(k, &sq, h)?,
    };
    Ok(result.variance_bound)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub omega: f64,
    pub kappa_tot: Option<f64>,
    pub h_sql: Option<f64>,
    /// One entry per column in the selected convention; `None` where the
    /// bound could not be evaluated.
    pub values: Vec<Option<f64>>,
    pub diagnostic: Option<String>,
}

fn sweep_point(config: &ScenarioConfig, columns: &[BoundColumn], convention: Convention, omega: f64) -> SweepRow {
    let op = match operating_point(config, omega) {
        Ok(op) => op,
        Err(e) => {
            return SweepRow {
                omega,
                kappa_tot: None,
                h_sql: None,
                values: vec![None; columns.len()],
                diagnostic: Some(e.to_string()),
            }
        }
    };
    let mut notes = Vec::new();
    let values = columns
        .iter()
        .map(|col| match evaluate_column(&op, col).and_then(|v| convention.apply(v)) {
            Ok(v) => Some(v),
            Err(e) => {
                notes.push(format!("{}: {e}", col.label));
                None
            }
        })
        .collect();
    SweepRow {
        omega,
        kappa_tot: Some(op.kappa_tot()),
        h_sql: Some(op.h_sql),
        values,
        diagnostic: (!notes.is_empty()).then(|| notes.join("; ")),
    }
}

/// Evaluates every requested bound at every sweep frequency. Points where a
/// bound cannot be evaluated carry a diagnostic instead of aborting the
/// sweep.
pub fn run_sweep(config: &ScenarioConfig, convention: Convention) -> Result<Vec<SweepRow>> {
    let columns = config.columns()?;
    let rows: Vec<SweepRow> = config
        .sweep
        .omegas()
        .into_par_iter()
        .map(|omega| sweep_point(config, &columns, convention, omega))
        .collect();
    if rows.iter().all(|r| r.diagnostic.is_some()) {
        return Err(CliError::Numerical(format!(
            "no sweep point could be evaluated; first failure: {}",
            rows[0].diagnostic.as_deref().unwrap_or("unknown")
        )));
    }
    Ok(rows)
}
