//! Optimum power and angle report at a single sideband frequency.

use std::fmt::{self, Display};

use optomech_core::bounds::{optimal_homodyne_angle_equal, optimal_homodyne_angle_lossless};
use optomech_core::optimizer::{
    degenerate_family, extract_coefficients_analytic, verify_single_carrier_dominance, BoundKind,
    GridSpec, Regime, Verdict,
};
use optomech_core::sensor::{power_for_kappa_resonant, power_for_kappa_tuned, ResponseSign};
use optomech_core::sql_prefactor;

use crate::config::{CouplingModel, ScenarioConfig};
use crate::emit::format_number;
use crate::error::{CliError, Result};
use crate::sweep::operating_point;

/// Ordered `key=value` pairs.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Report {
    pub entries: Vec<(String, String)>,
}

impl Report {
    fn push(&mut self, key: impl Into<String>, value: impl Display) {
        self.entries.push((key.into(), value.to_string()));
    }

    fn num(&mut self, key: impl Into<String>, value: f64) {
        self.push(key, format_number(value));
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn number(&self, key: &str) -> Option<f64> {
        self.get(key).and_then(|v| v.parse().ok())
    }
}

impl Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, v) in &self.entries {
            writeln!(f, "{k}={v}")?;
        }
        Ok(())
    }
}

const KINDS: [BoundKind; 3] = [
    BoundKind::Fundamental,
    BoundKind::SignalQuadrature,
    BoundKind::Homodyne,
];

pub fn report_optimum(config: &ScenarioConfig, omega: f64) -> Result<Report> {
    if !(omega.is_finite() && omega > 0.0) {
        return Err(CliError::Validation(format!("frequency must be positive, got {omega}")));
    }
    let op = operating_point(config, omega)?;
    let eta = config.sensor.eta;
    let params = config.sensor.params_at(omega);
    let sq = op.squeezings();
    let thetas = op.thetas();
    let k_tot = op.kappa_tot();
    let total_power: f64 = op.carriers.iter().map(|c| c.power).sum();
    let mut r = Report::default();

    r.num("omega", omega);
    r.num("frequency_hz", omega / (2.0 * std::f64::consts::PI));
    r.push(
        "coupling_model",
        match config.coupling_model {
            CouplingModel::Tuned => "tuned",
            CouplingModel::Resonant => "resonant",
        },
    );
    r.push("chi", if op.chi == ResponseSign::Positive { "+1" } else { "-1" });
    r.num("eta", eta);
    r.num("h_sql", op.h_sql);
    r.num("total_power", total_power);
    for (i, k) in op.kappas.iter().enumerate() {
        r.num(format!("kappa[{i}]"), *k);
    }
    r.num("kappa_tot", k_tot);

    let unsq_fund = if eta < 1.0 {
        1.0 / ((1.0 - eta) * eta).sqrt()
    } else {
        f64::INFINITY
    };
    let unsq_signal = 1.0 / eta.sqrt();
    r.num("unsqueezed.fundamental.kappa_opt", unsq_fund);
    r.num("unsqueezed.signal_quadrature.kappa_opt", unsq_signal);
    r.num("unsqueezed.signal_quadrature.kappa_ratio", k_tot / unsq_signal);
    let factor = unsq_fund / unsq_signal;
    r.num("unsqueezed.frequency_dependent_homodyne.power_factor", factor);
    r.push(
        "unsqueezed.frequency_dependent_homodyne.within_order_of_magnitude",
        factor <= 10.0,
    );

    for kind in KINDS {
        let key = kind.as_str();
        let coeffs = extract_coefficients_analytic(kind, &sq, &thetas, eta)?;
        let opt = degenerate_family(&coeffs)?;
        match opt.regime {
            Regime::ShotNoise => {
                r.push(format!("{key}.regime"), "shot_noise");
                r.push(format!("{key}.best_carrier"), opt.best_carrier_index);
                r.push(format!("{key}.kappa_opt"), "inf");
            }
            Regime::Interior => {
                let best = opt.best_carrier_index;
                r.push(format!("{key}.regime"), "interior");
                r.push(format!("{key}.best_carrier"), best);
                r.num(format!("{key}.kappa_opt"), opt.kappa_star);
                r.num(format!("{key}.bound_opt"), sql_prefactor(op.h_sql) * opt.bound_star);
                r.num(format!("{key}.kappa_ratio"), k_tot / opt.kappa_star);
                let carrier = &op.carriers[best];
                let required = match config.coupling_model {
                    CouplingModel::Tuned => power_for_kappa_tuned(opt.kappa_star, carrier, &params)?,
                    CouplingModel::Resonant => power_for_kappa_resonant(opt.kappa_star, carrier, &params)?,
                };
                r.num(format!("{key}.required_power"), required);
                r.num(format!("{key}.power_ratio"), total_power / required);
                r.push(format!("{key}.classes"), opt.classes.len());
            }
        }
        let dominance = if sq.len() <= 4 {
            match verify_single_carrier_dominance(kind, &sq, &thetas, eta, GridSpec::default())?.verdict {
                Verdict::Holds => "holds".to_string(),
                Verdict::Violated { margin } => format!("violated by {}", format_number(margin)),
                Verdict::ShotNoiseRegime => "shot_noise_regime".to_string(),
            }
        } else {
            "skipped".to_string()
        };
        r.push(format!("{key}.dominance"), dominance);
    }

    r.num("angles.unsqueezed_homodyne", (eta * k_tot).atan());
    r.num("angles.frequency_dependent_squeezing", k_tot.atan());
    if sq.iter().all(|s| *s == sq[0]) {
        r.num(
            "angles.equal_squeezing_homodyne",
            optimal_homodyne_angle_equal(k_tot, sq[0], eta)?,
        );
    }
    for (i, th) in optimal_homodyne_angle_lossless(&op.kappas, &sq)?.iter().enumerate() {
        r.num(format!("angles.lossless_homodyne[{i}]"), *th);
    }
    Ok(r)
}
