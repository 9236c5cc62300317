//! Closed-form quantum and classical Cramér–Rao bounds.
//!
//! Every bound is a weighted sum `⟨A⟩ = Σ κᵢ Aᵢᵢ` over diagonal per-carrier
//! quantities. [`SqueezeMatrices`] evaluates these sums in units of
//! `h_SQL²/8`; the public bound functions reapply the prefactor.

use std::fmt;
use std::str::FromStr;

use crate::sensor::Squeezing;
use crate::{sql_prefactor, Error, Result};

/// Weighted sum `Σ κᵢ aᵢ`.
pub fn weighted_sum(kappas: &[f64], diag: &[f64]) -> f64 {
    kappas.iter().zip(diag).map(|(k, a)| k * a).sum()
}

/// Which closed form a [`BoundResult`] came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FormulaId {
    QcrbGeneral,
    CrbHomodyne,
    CrbSignalQuadrature,
    QcrbEqualSqueezing,
    QcrbEqualSqueezingOptimalPhi,
    CrbSignalEqualSqueezing,
    CrbSignalEqualSqueezingOptimalPhi,
    QcrbUnsqueezed,
    CrbSignalUnsqueezed,
    QcrbLossless,
}

impl FormulaId {
    pub const ALL: [FormulaId; 10] = [
        FormulaId::QcrbGeneral,
        FormulaId::CrbHomodyne,
        FormulaId::CrbSignalQuadrature,
        FormulaId::QcrbEqualSqueezing,
        FormulaId::QcrbEqualSqueezingOptimalPhi,
        FormulaId::CrbSignalEqualSqueezing,
        FormulaId::CrbSignalEqualSqueezingOptimalPhi,
        FormulaId::QcrbUnsqueezed,
        FormulaId::CrbSignalUnsqueezed,
        FormulaId::QcrbLossless,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            FormulaId::QcrbGeneral => "qcrb_general",
            FormulaId::CrbHomodyne => "crb_homodyne",
            FormulaId::CrbSignalQuadrature => "crb_signal_quadrature",
            FormulaId::QcrbEqualSqueezing => "qcrb_equal_squeezing",
            FormulaId::QcrbEqualSqueezingOptimalPhi => "qcrb_equal_squeezing_optimal_phi",
            FormulaId::CrbSignalEqualSqueezing => "crb_signal_equal_squeezing",
            FormulaId::CrbSignalEqualSqueezingOptimalPhi => "crb_signal_equal_squeezing_optimal_phi",
            FormulaId::QcrbUnsqueezed => "qcrb_unsqueezed",
            FormulaId::CrbSignalUnsqueezed => "crb_signal_unsqueezed",
            FormulaId::QcrbLossless => "qcrb_lossless",
        }
    }
}

impl fmt::Display for FormulaId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for FormulaId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        FormulaId::ALL
            .into_iter()
            .find(|id| id.as_str() == s)
            .ok_or_else(|| {
                let known: Vec<_> = FormulaId::ALL.iter().map(|id| id.as_str()).collect();
                Error::Domain(format!("unknown formula `{s}`, expected one of {}", known.join(", ")))
            })
    }
}

/// Angles under which a bound is attained.
#[derive(Debug, Clone, PartialEq)]
pub enum AttainingAngles {
    Homodyne(Vec<f64>),
    Squeezing(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundResult {
    /// Lower bound on the variance of `h`, in units of `h²`.
    pub variance_bound: f64,
    pub formula: FormulaId,
    pub attaining_angles: Option<AttainingAngles>,
}

impl BoundResult {
    fn new(normalized: f64, h_sql: f64, formula: FormulaId) -> Result<Self> {
        let variance_bound = sql_prefactor(h_sql) * normalized;
        if !(variance_bound.is_finite() && variance_bound > 0.0) {
            return Err(Error::Divergent(format!(
                "{formula} evaluated to {variance_bound}"
            )));
        }
        Ok(Self {
            variance_bound,
            formula,
            attaining_angles: None,
        })
    }

    fn attained_by(mut self, angles: AttainingAngles) -> Self {
        self.attaining_angles = Some(angles);
        self
    }
}

/// Grouping used to evaluate the general lossy squeezed QCRB.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum QcrbForm {
    /// `[1 − (1−η)η⟨SΓ⟩]² / (η[(1−η)⟨Γ⟩ + η⟨QΓ⟩]) + (1−η)⟨PΓ⟩`.
    #[default]
    Compact,
    /// The same quantity with the square expanded term by term.
    Expanded,
}

/// Groupings of the equal-squeezing QCRB and its homodyne angle.
///
/// `Consistent` uses `K_Tot = κ_Tot(cosh2r + sinh2r cos2φ)` throughout and
/// agrees with the full-state oracle. `Alternative` puts `sin2φ` inside the
/// squeezing-weighted term and `cosh2φ` inside the angle; kept for
/// comparison only.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EqualSqueezingForm {
    #[default]
    Consistent,
    Alternative,
}

fn check_eta(eta: f64) -> Result<()> {
    if eta == 0.0 {
        return Err(Error::Domain(
            "transmittivity 0 carries no information; every bound is infinite".into(),
        ));
    }
    if !(eta > 0.0 && eta <= 1.0) {
        return Err(Error::Domain(format!("transmittivity must lie in (0, 1], got {eta}")));
    }
    Ok(())
}

fn check_kappa_tot(kappa_tot: f64) -> Result<()> {
    if !(kappa_tot.is_finite() && kappa_tot >= 0.0) {
        return Err(Error::Domain(format!("coupling must be non-negative, got {kappa_tot}")));
    }
    if kappa_tot == 0.0 {
        return Err(Error::Divergent("zero total coupling carries no signal".into()));
    }
    Ok(())
}

fn check_squeezing(sq: &Squeezing) -> Result<()> {
    if !(sq.r.is_finite() && sq.r >= 0.0 && sq.phi.is_finite()) {
        return Err(Error::Domain(format!(
            "squeezing must have finite r ≥ 0 and finite angle, got r = {}, φ = {}",
            sq.r, sq.phi
        )));
    }
    Ok(())
}

/// Per-carrier diagonal entries of the squeezing, loss and homodyne
/// matrices.
#[derive(Debug, Clone, PartialEq)]
pub struct SqueezeMatrices {
    pub eta: f64,
    pub q: Vec<f64>,
    pub r: Vec<f64>,
    pub s: Vec<f64>,
    pub t: Vec<f64>,
    pub gamma: Vec<f64>,
    pub p: Vec<f64>,
    pub f: Vec<f64>,
    pub g: Vec<f64>,
    pub y: Vec<f64>,
    pub w: Vec<f64>,
}

impl SqueezeMatrices {
    /// `thetas` may be empty, meaning detection along the signal quadrature.
    pub fn new(squeezings: &[Squeezing], thetas: &[f64], eta: f64) -> Result<Self> {
        check_eta(eta)?;
        if squeezings.is_empty() {
            return Err(Error::Dimension("at least one carrier is required".into()));
        }
        if !thetas.is_empty() && thetas.len() != squeezings.len() {
            return Err(Error::Dimension(format!(
                "{} homodyne angles for {} carriers",
                thetas.len(),
                squeezings.len()
            )));
        }
        let d = squeezings.len();
        let mut m = Self {
            eta,
            q: Vec::with_capacity(d),
            r: Vec::with_capacity(d),
            s: Vec::with_capacity(d),
            t: Vec::with_capacity(d),
            gamma: Vec::with_capacity(d),
            p: Vec::with_capacity(d),
            f: Vec::with_capacity(d),
            g: Vec::with_capacity(d),
            y: Vec::with_capacity(d),
            w: Vec::with_capacity(d),
        };
        let loss = 1.0 - eta;
        for (i, sq) in squeezings.iter().enumerate() {
            check_squeezing(sq)?;
            let theta = thetas.get(i).copied().unwrap_or(0.0);
            if !theta.is_finite() {
                return Err(Error::Domain(format!("homodyne angle must be finite, got {theta}")));
            }
            let (ch, sh) = ((2.0 * sq.r).cosh(), (2.0 * sq.r).sinh());
            let (s2, c2) = (2.0 * sq.phi).sin_cos();
            let q = ch + sh * c2;
            let r = ch - sh * c2;
            let s = sh * s2;
            let t = loss + eta * r;
            m.q.push(q);
            m.r.push(r);
            m.s.push(s);
            m.t.push(t);
            m.gamma.push(1.0 / (loss * loss + eta * eta + 2.0 * eta * loss * ch));
            m.p.push(eta + loss * q);
            m.f.push(theta.sin());
            m.g.push(theta.cos());
            m.y.push(loss + eta * (ch - sh * (2.0 * sq.phi + 2.0 * theta).cos()));
            m.w.push(loss + eta * q - eta * eta * s * s / t);
        }
        Ok(m)
    }

    pub fn carriers(&self) -> usize {
        self.q.len()
    }

    fn check_kappas(&self, kappas: &[f64]) -> Result<()> {
        if kappas.len() != self.carriers() {
            return Err(Error::Dimension(format!(
                "{} couplings for {} carriers",
                kappas.len(),
                self.carriers()
            )));
        }
        if let Some(k) = kappas.iter().find(|k| !(k.is_finite() && **k >= 0.0)) {
            return Err(Error::Domain(format!("couplings must be non-negative, got {k}")));
        }
        if kappas.iter().all(|k| *k == 0.0) {
            return Err(Error::Divergent("all couplings vanish; no signal reaches the output".into()));
        }
        Ok(())
    }

    fn sum<F: Fn(usize) -> f64>(&self, kappas: &[f64], entry: F) -> f64 {
        kappas.iter().enumerate().map(|(i, k)| k * entry(i)).sum()
    }

    /// General lossy squeezed QCRB in units of `h_SQL²/8`.
    pub fn fundamental(&self, kappas: &[f64], form: QcrbForm) -> Result<f64> {
        self.check_kappas(kappas)?;
        let eta = self.eta;
        let loss = 1.0 - eta;
        let s_g = self.sum(kappas, |i| self.s[i] * self.gamma[i]);
        let g = self.sum(kappas, |i| self.gamma[i]);
        let q_g = self.sum(kappas, |i| self.q[i] * self.gamma[i]);
        let p_g = self.sum(kappas, |i| self.p[i] * self.gamma[i]);
        let denom = loss * g + eta * q_g;
        Ok(match form {
            QcrbForm::Compact => {
                let lead = 1.0 - loss * eta * s_g;
                lead * lead / (eta * denom) + loss * p_g
            }
            QcrbForm::Expanded => {
                1.0 / (eta * loss * g + eta * eta * q_g)
                    - loss
                        * (2.0 * s_g / denom - eta * loss * s_g * s_g / denom
                            - (eta * g + loss * q_g))
            }
        })
    }

    /// Homodyne CRB for the stored angles, units of `h_SQL²/8`.
    pub fn homodyne(&self, kappas: &[f64]) -> Result<f64> {
        self.check_kappas(kappas)?;
        let eta = self.eta;
        let g2y = self.sum(kappas, |i| self.g[i] * self.g[i] / self.y[i]);
        let y_inv = self.sum(kappas, |i| 1.0 / self.y[i]);
        if g2y <= 1e-24 * y_inv {
            return Err(Error::Divergent(
                "every measured quadrature is orthogonal to the signal".into(),
            ));
        }
        let g2ys = self.sum(kappas, |i| self.g[i] * self.g[i] * self.s[i] / self.y[i]);
        let fgyq = self.sum(kappas, |i| self.f[i] * self.g[i] * self.q[i] / self.y[i]);
        let qy = self.sum(kappas, |i| self.q[i] / self.y[i]);
        let lead = 1.0 - eta * (g2ys + fgyq);
        Ok(lead * lead / (eta * g2y) + (1.0 - eta) * qy + eta * g2y)
    }

    /// Signal-quadrature CRB, units of `h_SQL²/8`.
    pub fn signal_quadrature(&self, kappas: &[f64]) -> Result<f64> {
        self.check_kappas(kappas)?;
        let eta = self.eta;
        let st = self.sum(kappas, |i| self.s[i] / self.t[i]);
        let t_inv = self.sum(kappas, |i| 1.0 / self.t[i]);
        let pt = self.sum(kappas, |i| self.p[i] / self.t[i]);
        let lead = 1.0 - eta * st;
        Ok(lead * lead / (eta * t_inv) + pt)
    }

    /// Signal-quadrature CRB written with `⟨Q⟩ − η⟨ST⁻¹S⟩` as the
    /// additive term.
    pub fn signal_quadrature_expanded(&self, kappas: &[f64]) -> Result<f64> {
        self.check_kappas(kappas)?;
        let eta = self.eta;
        let st = self.sum(kappas, |i| self.s[i] / self.t[i]);
        let t_inv = self.sum(kappas, |i| 1.0 / self.t[i]);
        let q = self.sum(kappas, |i| self.q[i]);
        let sts = self.sum(kappas, |i| self.s[i] * self.s[i] / self.t[i]);
        let lead = 1.0 - eta * st;
        Ok(lead * lead / (eta * t_inv) + q - eta * sts)
    }

    /// Lossless signal-quadrature CRB `(1 − ⟨R⁻¹S⟩)²/⟨R⁻¹⟩ + ⟨R⁻¹⟩`;
    /// ignores the stored transmittivity.
    pub fn signal_quadrature_lossless(&self, kappas: &[f64]) -> Result<f64> {
        self.check_kappas(kappas)?;
        let rs = self.sum(kappas, |i| self.s[i] / self.r[i]);
        let r_inv = self.sum(kappas, |i| 1.0 / self.r[i]);
        let lead = 1.0 - rs;
        Ok(lead * lead / r_inv + r_inv)
    }

    /// Squeezing-weighted total coupling `K_Tot = ⟨Q⟩`.
    pub fn k_tot(&self, kappas: &[f64]) -> f64 {
        weighted_sum(kappas, &self.q)
    }
}

/// Fundamental QCRB with loss and arbitrary per-carrier squeezing.
pub fn qcrb_general(kappas: &[f64], squeezings: &[Squeezing], eta: f64, h_sql: f64) -> Result<BoundResult> {
    qcrb_general_with(QcrbForm::Compact, kappas, squeezings, eta, h_sql)
}

pub fn qcrb_general_with(
    form: QcrbForm,
    kappas: &[f64],
    squeezings: &[Squeezing],
    eta: f64,
    h_sql: f64,
) -> Result<BoundResult> {
    let m = SqueezeMatrices::new(squeezings, &[], eta)?;
    BoundResult::new(m.fundamental(kappas, form)?, h_sql, FormulaId::QcrbGeneral)
}

/// CRB for homodyne detection at per-carrier angles `thetas`.
pub fn crb_homodyne_general(
    kappas: &[f64],
    squeezings: &[Squeezing],
    thetas: &[f64],
    eta: f64,
    h_sql: f64,
) -> Result<BoundResult> {
    if thetas.len() != squeezings.len() {
        return Err(Error::Dimension(format!(
            "{} homodyne angles for {} carriers",
            thetas.len(),
            squeezings.len()
        )));
    }
    let m = SqueezeMatrices::new(squeezings, thetas, eta)?;
    BoundResult::new(m.homodyne(kappas)?, h_sql, FormulaId::CrbHomodyne)
}

/// CRB for homodyne detection along the signal quadrature (`θᵢ = 0`).
pub fn crb_signal_quadrature(
    kappas: &[f64],
    squeezings: &[Squeezing],
    eta: f64,
    h_sql: f64,
) -> Result<BoundResult> {
    let m = SqueezeMatrices::new(squeezings, &[], eta)?;
    Ok(BoundResult::new(m.signal_quadrature(kappas)?, h_sql, FormulaId::CrbSignalQuadrature)?
        .attained_by(AttainingAngles::Homodyne(vec![0.0; squeezings.len()])))
}

fn equal_squeezing_terms(sq: &Squeezing) -> (f64, f64, f64, f64) {
    let (ch, sh) = ((2.0 * sq.r).cosh(), (2.0 * sq.r).sinh());
    let (s2, c2) = (2.0 * sq.phi).sin_cos();
    (ch, sh, s2, c2)
}

fn qcrb_equal_normalized(form: EqualSqueezingForm, kappa_tot: f64, sq: &Squeezing, eta: f64) -> f64 {
    let (ch, sh, s2, c2) = equal_squeezing_terms(sq);
    let loss = 1.0 - eta;
    // Squeezing weight per unit coupling; the printed variants differ here.
    let weight = match form {
        EqualSqueezingForm::Consistent => ch + sh * c2,
        EqualSqueezingForm::Alternative => ch + sh * s2,
    };
    let k = kappa_tot;
    let num = eta * eta
        + loss * (loss + 2.0 * eta * ch - 2.0 * eta * k * sh * s2 + eta * k * k * weight);
    num / (eta * k * (loss + eta * weight))
}

/// Fundamental QCRB when every carrier carries the same squeezing; depends
/// on the couplings only through their total.
pub fn qcrb_equal_squeezing(kappa_tot: f64, squeezing: Squeezing, eta: f64, h_sql: f64) -> Result<BoundResult> {
    qcrb_equal_squeezing_with(EqualSqueezingForm::Consistent, kappa_tot, squeezing, eta, h_sql)
}

pub fn qcrb_equal_squeezing_with(
    form: EqualSqueezingForm,
    kappa_tot: f64,
    squeezing: Squeezing,
    eta: f64,
    h_sql: f64,
) -> Result<BoundResult> {
    check_eta(eta)?;
    check_kappa_tot(kappa_tot)?;
    check_squeezing(&squeezing)?;
    let angle = optimal_homodyne_angle_equal_with(form, kappa_tot, squeezing, eta)?;
    Ok(BoundResult::new(
        qcrb_equal_normalized(form, kappa_tot, &squeezing, eta),
        h_sql,
        FormulaId::QcrbEqualSqueezing,
    )?
    .attained_by(AttainingAngles::Homodyne(vec![angle])))
}

/// Common homodyne angle attaining [`qcrb_equal_squeezing`].
pub fn optimal_homodyne_angle_equal(kappa_tot: f64, squeezing: Squeezing, eta: f64) -> Result<f64> {
    optimal_homodyne_angle_equal_with(EqualSqueezingForm::Consistent, kappa_tot, squeezing, eta)
}

pub fn optimal_homodyne_angle_equal_with(
    form: EqualSqueezingForm,
    kappa_tot: f64,
    squeezing: Squeezing,
    eta: f64,
) -> Result<f64> {
    check_eta(eta)?;
    check_squeezing(&squeezing)?;
    if !(kappa_tot.is_finite() && kappa_tot >= 0.0) {
        return Err(Error::Domain(format!("coupling must be non-negative, got {kappa_tot}")));
    }
    let (ch, sh, s2, c2) = equal_squeezing_terms(&squeezing);
    let weight = match form {
        EqualSqueezingForm::Consistent => ch + sh * c2,
        EqualSqueezingForm::Alternative => ch + sh * (2.0 * squeezing.phi).cosh(),
    };
    let num = kappa_tot * weight - sh * s2;
    let den = 1.0 - eta + eta * (ch + sh * c2);
    Ok((eta * num / den).atan())
}

/// Squeezing angle minimising [`qcrb_equal_squeezing`] at fixed `κ_Tot`.
///
/// The bound has the form `(α + β cos u + γ sin u)/(δ + ε cos u)` in
/// `u = 2φ`; both stationary points are compared.
pub fn optimal_squeezing_angle_equal(kappa_tot: f64, r: f64, eta: f64) -> Result<f64> {
    check_eta(eta)?;
    check_kappa_tot(kappa_tot)?;
    check_squeezing(&Squeezing::new(r, 0.0))?;
    let (ch, sh) = ((2.0 * r).cosh(), (2.0 * r).sinh());
    let k = kappa_tot;
    let loss = 1.0 - eta;
    let alpha = 1.0 + 2.0 * eta * loss * (ch - 1.0) + eta * loss * k * k * ch;
    let beta = eta * loss * k * k * sh;
    let gam = -2.0 * eta * loss * k * sh;
    let delta = eta * (loss * k + eta * k * ch);
    let eps = eta * eta * k * sh;
    let a = alpha * eps - beta * delta;
    let b = gam * delta;
    let c = gam * eps;
    let amp = a.hypot(b);
    if amp == 0.0 {
        return Ok(0.0);
    }
    let psi = a.atan2(b);
    let spread = (-c / amp).clamp(-1.0, 1.0).acos();
    let value = |u: f64| (alpha + beta * u.cos() + gam * u.sin()) / (delta + eps * u.cos());
    let best = [psi + spread, psi - spread]
        .into_iter()
        .min_by(|x, y| value(*x).total_cmp(&value(*y)))
        .unwrap_or(0.0);
    let phi = 0.5 * best.rem_euclid(2.0 * std::f64::consts::PI);
    Ok(if phi > std::f64::consts::FRAC_PI_2 {
        phi - std::f64::consts::PI
    } else {
        phi
    })
}

/// [`qcrb_equal_squeezing`] at the squeezing angle of
/// [`optimal_squeezing_angle_equal`].
pub fn qcrb_equal_squeezing_optimal_phi(kappa_tot: f64, r: f64, eta: f64, h_sql: f64) -> Result<BoundResult> {
    let phi = optimal_squeezing_angle_equal(kappa_tot, r, eta)?;
    let sq = Squeezing::new(r, phi);
    let mut res = qcrb_equal_squeezing(kappa_tot, sq, eta, h_sql)?;
    res.formula = FormulaId::QcrbEqualSqueezingOptimalPhi;
    res.attaining_angles = Some(AttainingAngles::Squeezing(vec![phi]));
    Ok(res)
}

/// Signal-quadrature CRB with identical squeezing on every carrier.
pub fn crb_signal_equal_squeezing(kappa_tot: f64, squeezing: Squeezing, eta: f64, h_sql: f64) -> Result<BoundResult> {
    check_eta(eta)?;
    check_kappa_tot(kappa_tot)?;
    check_squeezing(&squeezing)?;
    let (ch, sh, s2, c2) = equal_squeezing_terms(&squeezing);
    let k = kappa_tot;
    let value = (1.0 - eta + eta * (ch - sh * c2)) / (eta * k) + k * (ch + sh * c2) - 2.0 * sh * s2;
    Ok(BoundResult::new(value, h_sql, FormulaId::CrbSignalEqualSqueezing)?
        .attained_by(AttainingAngles::Homodyne(vec![0.0])))
}

/// Signal-quadrature CRB with identical squeezing at the
/// frequency-dependent angle `φ = arctan κ_Tot`.
pub fn crb_signal_equal_squeezing_optimal_phi(kappa_tot: f64, r: f64, eta: f64, h_sql: f64) -> Result<BoundResult> {
    check_eta(eta)?;
    check_kappa_tot(kappa_tot)?;
    check_squeezing(&Squeezing::new(r, 0.0))?;
    let k = kappa_tot;
    let anti = (-2.0 * r).exp();
    let value = (1.0 - eta + eta * anti) / (eta * k) + anti * k;
    Ok(BoundResult::new(value, h_sql, FormulaId::CrbSignalEqualSqueezingOptimalPhi)?
        .attained_by(AttainingAngles::Squeezing(vec![k.atan()])))
}

/// Fundamental QCRB without squeezing.
pub fn qcrb_unsqueezed(kappa_tot: f64, eta: f64, h_sql: f64) -> Result<BoundResult> {
    check_eta(eta)?;
    check_kappa_tot(kappa_tot)?;
    let value = 1.0 / (eta * kappa_tot) + (1.0 - eta) * kappa_tot;
    Ok(BoundResult::new(value, h_sql, FormulaId::QcrbUnsqueezed)?
        .attained_by(AttainingAngles::Homodyne(vec![(eta * kappa_tot).atan()])))
}

/// Signal-quadrature CRB without squeezing.
pub fn crb_signal_unsqueezed(kappa_tot: f64, eta: f64, h_sql: f64) -> Result<BoundResult> {
    check_eta(eta)?;
    check_kappa_tot(kappa_tot)?;
    let value = 1.0 / (eta * kappa_tot) + kappa_tot;
    Ok(BoundResult::new(value, h_sql, FormulaId::CrbSignalUnsqueezed)?
        .attained_by(AttainingAngles::Homodyne(vec![0.0])))
}

/// Lossless QCRB `h_SQL² / (8 K_Tot)`.
pub fn qcrb_lossless(kappas: &[f64], squeezings: &[Squeezing], h_sql: f64) -> Result<BoundResult> {
    let m = SqueezeMatrices::new(squeezings, &[], 1.0)?;
    m.check_kappas(kappas)?;
    let angles = optimal_homodyne_angle_lossless(kappas, squeezings)?;
    Ok(BoundResult::new(1.0 / m.k_tot(kappas), h_sql, FormulaId::QcrbLossless)?
        .attained_by(AttainingAngles::Homodyne(angles)))
}

/// Per-carrier homodyne angles attaining [`qcrb_lossless`].
pub fn optimal_homodyne_angle_lossless(kappas: &[f64], squeezings: &[Squeezing]) -> Result<Vec<f64>> {
    let m = SqueezeMatrices::new(squeezings, &[], 1.0)?;
    if kappas.len() != m.carriers() {
        return Err(Error::Dimension(format!(
            "{} couplings for {} carriers",
            kappas.len(),
            m.carriers()
        )));
    }
    let k_tot = m.k_tot(kappas);
    Ok((0..m.carriers())
        .map(|i| ((k_tot - m.s[i]) / m.q[i]).atan())
        .collect())
}
