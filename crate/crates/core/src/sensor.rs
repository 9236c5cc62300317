//! Physical parameters, coupling constants and the input-output model of a
//! multicarrier interferometer.

use nalgebra::{Complex, DMatrix, DVector};

use crate::{Error, Result};

/// Reduced Planck constant (CODATA 2018), J·s.
pub const HBAR: f64 = 1.054_571_817e-34;
/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Shared mechanical and optical parameters, strict SI units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SensorParams {
    /// Test mass, kg.
    pub mass: f64,
    /// Arm length, m.
    pub arm_length: f64,
    /// Sideband angular frequency Ω, rad/s.
    pub omega: f64,
    /// Detection transmittivity.
    pub eta: f64,
    /// Mechanical resonance (pendulum or optical spring), rad/s.
    pub resonance: Option<f64>,
    pub hbar: f64,
    pub c: f64,
}

impl SensorParams {
    pub fn new(mass: f64, arm_length: f64, omega: f64, eta: f64) -> Result<Self> {
        let params = Self {
            mass,
            arm_length,
            omega,
            eta,
            resonance: None,
            hbar: HBAR,
            c: SPEED_OF_LIGHT,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn with_resonance(mut self, resonance: f64) -> Self {
        self.resonance = Some(resonance);
        self
    }

    pub fn at_frequency(mut self, omega: f64) -> Self {
        self.omega = omega;
        self
    }

    pub fn validate(&self) -> Result<()> {
        for (name, value) in [
            ("mass", self.mass),
            ("arm_length", self.arm_length),
            ("hbar", self.hbar),
            ("c", self.c),
        ] {
            if !(value.is_finite() && value > 0.0) {
                return Err(Error::Domain(format!("{name} must be positive, got {value}")));
            }
        }
        if !(self.omega.is_finite() && self.omega >= 0.0) {
            return Err(Error::Domain(format!(
                "sideband frequency must be non-negative, got {}",
                self.omega
            )));
        }
        if !(0.0..=1.0).contains(&self.eta) {
            return Err(Error::Domain(format!(
                "transmittivity must lie in [0, 1], got {}",
                self.eta
            )));
        }
        if let Some(res) = self.resonance {
            if !(res.is_finite() && res >= 0.0) {
                return Err(Error::Domain(format!(
                    "resonance must be non-negative, got {res}"
                )));
            }
        }
        Ok(())
    }
}

/// Injected squeezed vacuum `ξ = r e^{iφ}` on one carrier.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Squeezing {
    pub r: f64,
    pub phi: f64,
}

impl Squeezing {
    pub const VACUUM: Squeezing = Squeezing { r: 0.0, phi: 0.0 };

    pub fn new(r: f64, phi: f64) -> Self {
        Self { r, phi }
    }

    /// Squeezing magnitude from a power ratio in dB, `10·log₁₀ e^{2r}`.
    pub fn from_db(db: f64, phi: f64) -> Self {
        Self {
            r: db * std::f64::consts::LN_10 / 20.0,
            phi,
        }
    }

    pub fn db(&self) -> f64 {
        20.0 * self.r / std::f64::consts::LN_10
    }

    /// Covariance block `[[q, s], [s, rr]]` of the squeezed vacuum.
    pub fn block(&self) -> [[f64; 2]; 2] {
        let (ch, sh) = ((2.0 * self.r).cosh(), (2.0 * self.r).sinh());
        let (s2, c2) = (2.0 * self.phi).sin_cos();
        [[ch + sh * c2, sh * s2], [sh * s2, ch - sh * c2]]
    }
}

/// Per-carrier physical and protocol parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CarrierConfig {
    /// Circulating arm power, W.
    pub power: f64,
    /// Carrier angular frequency ω, rad/s.
    pub omega: f64,
    /// Arm cavity half-bandwidth γ, rad/s.
    pub gamma: f64,
    /// Propagation phase β, rad.
    pub beta: f64,
    pub squeezing: Squeezing,
    /// Homodyne angle θ, rad.
    pub theta: f64,
}

impl CarrierConfig {
    pub fn new(power: f64, omega: f64, gamma: f64) -> Self {
        Self {
            power,
            omega,
            gamma,
            beta: 0.0,
            squeezing: Squeezing::VACUUM,
            theta: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.power.is_finite() && self.power >= 0.0) {
            return Err(Error::Domain(format!("power must be non-negative, got {}", self.power)));
        }
        if !(self.omega.is_finite() && self.omega > 0.0) {
            return Err(Error::Domain(format!(
                "carrier frequency must be positive, got {}",
                self.omega
            )));
        }
        if !(self.gamma.is_finite() && self.gamma > 0.0) {
            return Err(Error::Domain(format!(
                "cavity half-bandwidth must be positive, got {}",
                self.gamma
            )));
        }
        if !(self.squeezing.r.is_finite() && self.squeezing.r >= 0.0) {
            return Err(Error::Domain(format!(
                "squeezing magnitude must be non-negative, got {}",
                self.squeezing.r
            )));
        }
        Ok(())
    }
}

/// Sign χ of the mechanical response.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ResponseSign {
    #[default]
    Positive,
    Negative,
}

impl ResponseSign {
    pub fn value(self) -> f64 {
        match self {
            ResponseSign::Positive => 1.0,
            ResponseSign::Negative => -1.0,
        }
    }
}

/// Derived couplings entering model assembly and every closed form.
#[derive(Debug, Clone, PartialEq)]
pub struct CouplingSet {
    pub kappas: Vec<f64>,
    pub h_sql: f64,
    pub betas: Vec<f64>,
    pub chi: ResponseSign,
}

impl CouplingSet {
    /// Couplings with zero phases and positive response.
    pub fn new(kappas: Vec<f64>, h_sql: f64) -> Result<Self> {
        let betas = vec![0.0; kappas.len()];
        Self::with_phases(kappas, h_sql, betas, ResponseSign::Positive)
    }

    pub fn with_phases(
        kappas: Vec<f64>,
        h_sql: f64,
        betas: Vec<f64>,
        chi: ResponseSign,
    ) -> Result<Self> {
        if kappas.is_empty() {
            return Err(Error::Dimension("at least one carrier is required".into()));
        }
        if betas.len() != kappas.len() {
            return Err(Error::Dimension(format!(
                "{} phases for {} carriers",
                betas.len(),
                kappas.len()
            )));
        }
        if let Some(k) = kappas.iter().find(|k| !(k.is_finite() && **k >= 0.0)) {
            return Err(Error::Domain(format!("couplings must be non-negative, got {k}")));
        }
        if !(h_sql.is_finite() && h_sql > 0.0) {
            return Err(Error::Domain(format!("h_sql must be positive, got {h_sql}")));
        }
        Ok(Self {
            kappas,
            h_sql,
            betas,
            chi,
        })
    }

    pub fn carriers(&self) -> usize {
        self.kappas.len()
    }

    pub fn kappa_tot(&self) -> f64 {
        self.kappas.iter().sum()
    }
}

/// `𝓜 = B M B`, `𝓥 = B V` over the `2d` two-photon components
/// `(a1⁽¹⁾, a2⁽¹⁾, …, a1⁽ᵈ⁾, a2⁽ᵈ⁾)`.
#[derive(Debug, Clone, PartialEq)]
pub struct InputOutputModel {
    pub m: DMatrix<Complex<f64>>,
    pub v: DVector<Complex<f64>>,
    /// Diagonal phase matrix `B = diag(e^{iβⱼ} 𝟙₂)`.
    pub phases: DMatrix<Complex<f64>>,
    pub m_real: DMatrix<f64>,
    pub v_real: DVector<f64>,
}

/// Coupling of a tuned interferometer,
/// `κ = 16 I ω γ / (m c L Ω² (γ² + Ω²))`.
pub fn kappa_tuned(carrier: &CarrierConfig, params: &SensorParams) -> Result<f64> {
    carrier.validate()?;
    params.validate()?;
    let om = params.omega;
    if om == 0.0 {
        return Err(Error::Singular(
            "coupling diverges at zero sideband frequency".into(),
        ));
    }
    let g = carrier.gamma;
    Ok(16.0 * carrier.power * carrier.omega * g
        / (params.mass * params.c * params.arm_length * om * om * (g * g + om * om)))
}

/// Coupling and response sign of the simplified interferometer with a
/// mechanical resonance Ω_p:
/// `κ = |2√2 I ω / (m c² (Ω² − Ω_p²))|`, `χ = sign(Ω² − Ω_p²)`.
pub fn kappa_resonant(
    carrier: &CarrierConfig,
    params: &SensorParams,
) -> Result<(f64, ResponseSign)> {
    carrier.validate()?;
    params.validate()?;
    let res = params.resonance.unwrap_or(0.0);
    let detuning = params.omega * params.omega - res * res;
    if detuning == 0.0 {
        return Err(Error::Singular(format!(
            "sideband frequency {} rad/s sits on the mechanical resonance",
            params.omega
        )));
    }
    let kappa = (2.0 * std::f64::consts::SQRT_2 * carrier.power * carrier.omega
        / (params.mass * params.c * params.c * detuning))
        .abs();
    let chi = if detuning > 0.0 {
        ResponseSign::Positive
    } else {
        ResponseSign::Negative
    };
    Ok((kappa, chi))
}

/// Circulating power that produces coupling `kappa` in a tuned
/// interferometer; the inverse of [`kappa_tuned`] in the power.
pub fn power_for_kappa_tuned(kappa: f64, carrier: &CarrierConfig, params: &SensorParams) -> Result<f64> {
    let unit = kappa_tuned(&CarrierConfig { power: 1.0, ..*carrier }, params)?;
    Ok(kappa / unit)
}

/// Inverse of [`kappa_resonant`] in the power.
pub fn power_for_kappa_resonant(
    kappa: f64,
    carrier: &CarrierConfig,
    params: &SensorParams,
) -> Result<f64> {
    let (unit, _) = kappa_resonant(&CarrierConfig { power: 1.0, ..*carrier }, params)?;
    Ok(kappa / unit)
}

/// Standard-quantum-limit normalisation `√(8ħ / (m Ω² L²))`.
pub fn h_sql(params: &SensorParams) -> Result<f64> {
    params.validate()?;
    if params.omega == 0.0 {
        return Err(Error::Singular("h_sql diverges at zero sideband frequency".into()));
    }
    Ok((8.0 * params.hbar
        / (params.mass * params.omega * params.omega * params.arm_length * params.arm_length))
        .sqrt())
}

pub fn build_model(couplings: &CouplingSet) -> InputOutputModel {
    let d = couplings.carriers();
    let chi = couplings.chi.value();
    let n = 2 * d;
    let mut m_real = DMatrix::zeros(n, n);
    let mut v_real = DVector::zeros(n);
    for j in 0..d {
        m_real[(2 * j, 2 * j)] = 1.0;
        m_real[(2 * j + 1, 2 * j + 1)] = 1.0;
        for k in 0..d {
            m_real[(2 * j + 1, 2 * k)] = -chi * (couplings.kappas[j] * couplings.kappas[k]).sqrt();
        }
        v_real[2 * j + 1] = chi * (2.0 * couplings.kappas[j]).sqrt() / couplings.h_sql;
    }
    let phase_of = |row: usize| Complex::from_polar(1.0, couplings.betas[row / 2]);
    let phases = DMatrix::from_fn(n, n, |r, c| {
        if r == c {
            phase_of(r)
        } else {
            Complex::new(0.0, 0.0)
        }
    });
    let m = DMatrix::from_fn(n, n, |r, c| phase_of(r) * m_real[(r, c)] * phase_of(c));
    let v = DVector::from_fn(n, |r, _| phase_of(r) * v_real[r]);
    InputOutputModel {
        m,
        v,
        phases,
        m_real,
        v_real,
    }
}

/// Covariance of parallel squeezed vacuum on the `x` sector: one
/// `[[cosh2r + sinh2r cos2φ, sinh2r sin2φ], [·, cosh2r − sinh2r cos2φ]]`
/// block per carrier.
pub fn input_covariance(squeezings: &[Squeezing]) -> DMatrix<f64> {
    let n = 2 * squeezings.len();
    let mut cov = DMatrix::zeros(n, n);
    for (i, sq) in squeezings.iter().enumerate() {
        let b = sq.block();
        for (r, row) in b.iter().enumerate() {
            for (c, &val) in row.iter().enumerate() {
                cov[(2 * i + r, 2 * i + c)] = val;
            }
        }
    }
    cov
}

/// Configuration that, under a positive response, reproduces the sensitivity
/// of `carriers` under a negative response: squeezing and homodyne angles
/// change sign.
pub fn chi_negative_equivalent(carriers: &[CarrierConfig]) -> Vec<CarrierConfig> {
    carriers
        .iter()
        .map(|c| CarrierConfig {
            squeezing: Squeezing::new(c.squeezing.r, -c.squeezing.phi),
            theta: -c.theta,
            ..*c
        })
        .collect()
}

/// Single-sided spectral density equivalent of a variance bound (`× 4`).
pub fn variance_to_psd(variance_bound: f64) -> Result<f64> {
    if !(variance_bound.is_finite() && variance_bound > 0.0) {
        return Err(Error::Domain(format!(
            "variance bound must be positive, got {variance_bound}"
        )));
    }
    Ok(4.0 * variance_bound)
}

/// Amplitude `2Δh` matching spectral-density plots.
pub fn variance_to_amplitude(variance_bound: f64) -> Result<f64> {
    if !(variance_bound.is_finite() && variance_bound > 0.0) {
        return Err(Error::Domain(format!(
            "variance bound must be positive, got {variance_bound}"
        )));
    }
    Ok(2.0 * variance_bound.sqrt())
}
