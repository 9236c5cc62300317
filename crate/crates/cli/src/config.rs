//! Scenario files.
//!
//! A scenario is a JSON document; unknown keys are rejected. Squeezing is
//! given as the natural-log magnitude `r`, where a power ratio of `D` dB
//! corresponds to `r = D·ln10/20` (10 dB is `r ≈ 1.1513`).

use std::collections::HashSet;
use std::path::{Path, PathBuf};

use optomech_core::bounds::FormulaId;
use optomech_core::sensor::{CarrierConfig, SensorParams, HBAR, SPEED_OF_LIGHT};
use optomech_core::Squeezing;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub sensor: SensorConfig,
    #[serde(default)]
    pub coupling_model: CouplingModel,
    pub carriers: Vec<CarrierSpec>,
    pub sweep: SweepSpec,
    pub bounds: Vec<BoundRequest>,
    #[serde(default)]
    pub output: OutputSpec,
    /// Frequency for `optimum` when none is given on the command line, rad/s.
    #[serde(default)]
    pub optimum_omega: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct SensorConfig {
    /// Test mass, kg.
    pub mass: f64,
    /// Arm length, m.
    pub arm_length: f64,
    /// Detection transmittivity.
    pub eta: f64,
    /// Mechanical resonance, rad/s; used by the resonant coupling model.
    #[serde(default)]
    pub resonance: Option<f64>,
    #[serde(default = "default_hbar")]
    pub hbar: f64,
    #[serde(default = "default_c")]
    pub c: f64,
}

fn default_hbar() -> f64 {
    HBAR
}

fn default_c() -> f64 {
    SPEED_OF_LIGHT
}

impl SensorConfig {
    pub fn params_at(&self, omega: f64) -> SensorParams {
        SensorParams {
            mass: self.mass,
            arm_length: self.arm_length,
            omega,
            eta: self.eta,
            resonance: self.resonance,
            hbar: self.hbar,
            c: self.c,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CouplingModel {
    /// Tuned interferometer with cavity bandwidth `γ`.
    #[default]
    Tuned,
    /// Free cavity with a mechanical resonance.
    Resonant,
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct CarrierSpec {
    /// Circulating power, W.
    pub power: f64,
    /// Carrier angular frequency, rad/s.
    pub omega: f64,
    /// Cavity half-bandwidth, rad/s.
    pub gamma: f64,
    #[serde(default)]
    pub beta: f64,
    /// Squeezing magnitude (natural log).
    #[serde(default)]
    pub r: f64,
    /// Squeezing angle, rad.
    #[serde(default)]
    pub phi: f64,
    /// Homodyne angle, rad.
    #[serde(default)]
    pub theta: f64,
}

impl CarrierSpec {
    pub fn to_carrier(&self) -> CarrierConfig {
        CarrierConfig {
            power: self.power,
            omega: self.omega,
            gamma: self.gamma,
            beta: self.beta,
            squeezing: Squeezing::new(self.r, self.phi),
            theta: self.theta,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub omega_min: f64,
    pub omega_max: f64,
    pub n_points: usize,
    #[serde(default)]
    pub spacing: Spacing,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Spacing {
    #[default]
    Log,
    Linear,
}

impl SweepSpec {
    pub fn omegas(&self) -> Vec<f64> {
        let n = self.n_points;
        let last = n - 1;
        (0..n)
            .map(|i| {
                if i == last {
                    return self.omega_max;
                }
                let t = i as f64 / last as f64;
                match self.spacing {
                    Spacing::Log => self.omega_min * (self.omega_max / self.omega_min).powf(t),
                    Spacing::Linear => self.omega_min + t * (self.omega_max - self.omega_min),
                }
            })
            .collect()
    }
}

/// A bound column: either a bare formula identifier or a table with an
/// optional transmittivity override and column label.
#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(untagged)]
pub enum BoundRequest {
    Name(String),
    Detailed(DetailedRequest),
}

#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct DetailedRequest {
    pub formula: String,
    #[serde(default)]
    pub eta: Option<f64>,
    #[serde(default)]
    pub label: Option<String>,
}

/// A validated bound column.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundColumn {
    pub formula: FormulaId,
    pub eta: f64,
    pub label: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    #[serde(default)]
    pub path: Option<PathBuf>,
    #[serde(default)]
    pub format: Format,
    #[serde(default)]
    pub convention: Convention,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize, Serialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    #[default]
    Csv,
    JsonLines,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize, Serialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Convention {
    /// Variance bound on `h`.
    #[default]
    Variance,
    /// Single-sided spectral density, four times the variance.
    Psd,
    /// `2Δh`, twice the standard deviation.
    Amplitude,
}

impl Convention {
    pub fn apply(self, variance: f64) -> optomech_core::Result<f64> {
        match self {
            Convention::Variance => Ok(variance),
            Convention::Psd => optomech_core::sensor::variance_to_psd(variance),
            Convention::Amplitude => optomech_core::sensor::variance_to_amplitude(variance),
        }
    }
}

fn hint_for(message: &str) -> Option<&'static str> {
    if message.contains("unknown field `squeeze_db`") || message.contains("unknown field `squeezing_db`") {
        Some("squeezing is given as the natural-log magnitude `r`; convert D dB with r = D·ln10/20")
    } else {
        None
    }
}

impl ScenarioConfig {
    pub fn from_json_str(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let config: ScenarioConfig = serde_path_to_error::deserialize(de).map_err(|err| {
            let path = err.path().to_string();
            let inner = err.into_inner().to_string();
            let mut msg = if path.is_empty() || path == "." {
                inner
            } else {
                format!("at `{path}`: {inner}")
            };
            if let Some(hint) = hint_for(&msg) {
                msg.push_str("; ");
                msg.push_str(hint);
            }
            CliError::Validation(msg)
        })?;
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |path: &str, msg: String| Err(CliError::Validation(format!("at `{path}`: {msg}")));
        let s = &self.sensor;
        for (name, v) in [("mass", s.mass), ("arm_length", s.arm_length), ("hbar", s.hbar), ("c", s.c)] {
            if !(v.is_finite() && v > 0.0) {
                return fail(&format!("sensor.{name}"), format!("must be positive, got {v}"));
            }
        }
        if !(s.eta > 0.0 && s.eta <= 1.0) {
            return fail("sensor.eta", format!("must lie in (0, 1], got {}", s.eta));
        }
        if let Some(res) = s.resonance {
            if !(res.is_finite() && res >= 0.0) {
                return fail("sensor.resonance", format!("must be non-negative, got {res}"));
            }
        }
        if self.carriers.is_empty() {
            return fail("carriers", "at least one carrier is required".into());
        }
        for (i, c) in self.carriers.iter().enumerate() {
            if let Err(e) = c.to_carrier().validate() {
                return fail(&format!("carriers[{i}]"), e.to_string());
            }
            for (name, v) in [("beta", c.beta), ("phi", c.phi), ("theta", c.theta)] {
                if !v.is_finite() {
                    return fail(&format!("carriers[{i}].{name}"), format!("must be finite, got {v}"));
                }
            }
        }
        let sw = &self.sweep;
        if !(sw.omega_min.is_finite() && sw.omega_max.is_finite() && sw.omega_min < sw.omega_max) {
            return fail(
                "sweep",
                format!("need omega_min < omega_max, got {} and {}", sw.omega_min, sw.omega_max),
            );
        }
        if sw.omega_min <= 0.0 {
            return fail("sweep.omega_min", format!("must be positive, got {}", sw.omega_min));
        }
        if sw.n_points < 2 {
            return fail("sweep.n_points", format!("need at least 2 points, got {}", sw.n_points));
        }
        if let Some(om) = self.optimum_omega {
            if !(om.is_finite() && om > 0.0) {
                return fail("optimum_omega", format!("must be positive, got {om}"));
            }
        }
        if self.bounds.is_empty() {
            return fail("bounds", "at least one bound is required".into());
        }
        let columns = self.columns()?;
        let mut seen = HashSet::new();
        for (i, col) in columns.iter().enumerate() {
            if !seen.insert(col.label.clone()) {
                return fail(
                    &format!("bounds[{i}]"),
                    format!("duplicate column `{}`; give the request a distinct label", col.label),
                );
            }
            if ["omega", "kappa_tot", "h_sql", "diagnostic"].contains(&col.label.as_str()) {
                return fail(&format!("bounds[{i}].label"), format!("`{}` is reserved", col.label));
            }
            if needs_equal_squeezing(col.formula) && !self.equal_squeezing(col.formula) {
                return fail(
                    &format!("bounds[{i}]"),
                    format!("`{}` needs identical squeezing on every carrier", col.formula),
                );
            }
        }
        Ok(())
    }

    fn equal_squeezing(&self, formula: FormulaId) -> bool {
        let first = &self.carriers[0];
        self.carriers.iter().all(|c| {
            c.r == first.r
                && (formula == FormulaId::QcrbEqualSqueezingOptimalPhi
                    || formula == FormulaId::CrbSignalEqualSqueezingOptimalPhi
                    || c.phi == first.phi)
        })
    }

    /// Bound columns with labels and transmittivities resolved.
    pub fn columns(&self) -> Result<Vec<BoundColumn>> {
        self.bounds
            .iter()
            .enumerate()
            .map(|(i, req)| {
                let (name, eta, label) = match req {
                    BoundRequest::Name(n) => (n.as_str(), None, None),
                    BoundRequest::Detailed(d) => (d.formula.as_str(), d.eta, d.label.clone()),
                };
                let formula: FormulaId = name
                    .parse()
                    .map_err(|e: optomech_core::Error| CliError::Validation(format!("at `bounds[{i}]`: {e}")))?;
                let eta = eta.unwrap_or(self.sensor.eta);
                if !(eta > 0.0 && eta <= 1.0) {
                    return Err(CliError::Validation(format!(
                        "at `bounds[{i}].eta`: must lie in (0, 1], got {eta}"
                    )));
                }
                Ok(BoundColumn {
                    formula,
                    eta,
                    label: label.unwrap_or_else(|| formula.as_str().to_string()),
                })
            })
            .collect()
    }

    pub fn carriers(&self) -> Vec<CarrierConfig> {
        self.carriers.iter().map(CarrierSpec::to_carrier).collect()
    }
}

fn needs_equal_squeezing(formula: FormulaId) -> bool {
    matches!(
        formula,
        FormulaId::QcrbEqualSqueezing
            | FormulaId::QcrbEqualSqueezingOptimalPhi
            | FormulaId::CrbSignalEqualSqueezing
            | FormulaId::CrbSignalEqualSqueezingOptimalPhi
    )
}

pub fn load_config(path: &Path) -> Result<ScenarioConfig> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        context: format!("cannot read {}", path.display()),
        source,
    })?;
    ScenarioConfig::from_json_str(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn minimal() -> serde_json::Value {
        serde_json::json!({
            "sensor": {"mass": 40.0, "arm_length": 4000.0, "eta": 0.95},
            "carriers": [{"power": 840e3, "omega": 1.77e15, "gamma": 3141.6}],
            "sweep": {"omega_min": 60.0, "omega_max": 6000.0, "n_points": 4},
            "bounds": ["qcrb_general"]
        })
    }

    fn parse(v: &serde_json::Value) -> Result<ScenarioConfig> {
        ScenarioConfig::from_json_str(&v.to_string())
    }

    #[test]
    fn minimal_config_defaults() {
        let c = parse(&minimal()).unwrap();
        assert_eq!(c.coupling_model, CouplingModel::Tuned);
        assert_eq!(c.carriers[0].r, 0.0);
        assert_eq!(c.output.format, Format::Csv);
        assert_eq!(c.output.convention, Convention::Variance);
        assert_eq!(c.sensor.hbar, HBAR);
    }

    #[test]
    fn inverted_sweep_rejected() {
        let mut v = minimal();
        v["sweep"]["omega_min"] = 7000.0.into();
        let err = parse(&v).unwrap_err();
        assert!(matches!(err, CliError::Validation(ref m) if m.contains("omega_min < omega_max")));
    }

    #[test]
    fn squeeze_db_suggests_r() {
        let mut v = minimal();
        v["carriers"][0]["squeeze_db"] = 10.0.into();
        let err = parse(&v).unwrap_err().to_string();
        assert!(err.contains("carriers[0]"), "{err}");
        assert!(err.contains("`r`"), "{err}");
    }

    #[test]
    fn unknown_formula_rejected() {
        let mut v = minimal();
        v["bounds"] = serde_json::json!(["eq14"]);
        assert!(parse(&v).unwrap_err().to_string().contains("bounds[0]"));
    }

    #[test]
    fn duplicate_columns_need_labels() {
        let mut v = minimal();
        v["bounds"] = serde_json::json!(["qcrb_unsqueezed", {"formula": "qcrb_unsqueezed", "eta": 1.0}]);
        assert!(parse(&v).is_err());
        v["bounds"] = serde_json::json!(["qcrb_unsqueezed", {"formula": "qcrb_unsqueezed", "eta": 1.0, "label": "lossless"}]);
        let c = parse(&v).unwrap();
        let cols = c.columns().unwrap();
        assert_eq!(cols[1].label, "lossless");
        assert_eq!(cols[1].eta, 1.0);
        assert_eq!(cols[0].eta, 0.95);
    }

    #[test]
    fn equal_squeezing_formulas_check_carriers() {
        let mut v = minimal();
        v["carriers"] = serde_json::json!([
            {"power": 1.0, "omega": 1.0, "gamma": 1.0, "r": 0.5},
            {"power": 1.0, "omega": 1.0, "gamma": 1.0, "r": 0.7}
        ]);
        v["bounds"] = serde_json::json!(["qcrb_equal_squeezing"]);
        assert!(parse(&v).is_err());
    }

    #[test]
    fn too_few_points() {
        let mut v = minimal();
        v["sweep"]["n_points"] = 1.into();
        assert!(parse(&v).is_err());
    }

    #[test]
    fn sweep_endpoints() {
        let s = SweepSpec { omega_min: 10.0, omega_max: 1000.0, n_points: 3, spacing: Spacing::Log };
        let o = s.omegas();
        assert_eq!(o[0], 10.0);
        assert!((o[1] - 100.0).abs() < 1e-12);
        assert_eq!(o[2], 1000.0);
        let s = SweepSpec { spacing: Spacing::Linear, ..s };
        assert_eq!(s.omegas(), vec![10.0, 505.0, 1000.0]);
    }
}
