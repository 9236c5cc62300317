//! Optimal power distribution over carriers.
//!
//! Every bound in [`crate::bounds`] has the form
//! `B(κ) = (1 − Σ c1ᵢ κᵢ)² / Σ c2ᵢ κᵢ + Σ c3ᵢ κᵢ` in units of `h_SQL²/8`.
//! This module extracts the coefficients, finds single-carrier optima and
//! checks by exhaustive search that no spread of power over several carriers
//! does better.

use nalgebra::{DMatrix, Matrix3, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bounds::{QcrbForm, SqueezeMatrices};
use crate::sensor::Squeezing;
use crate::{Error, Result};

/// Default relative tolerance for grouping carriers into degenerate classes.
pub const CLASS_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BoundKind {
    Fundamental,
    Homodyne,
    SignalQuadrature,
}

impl BoundKind {
    pub const ALL: [BoundKind; 3] = [
        BoundKind::Fundamental,
        BoundKind::Homodyne,
        BoundKind::SignalQuadrature,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            BoundKind::Fundamental => "fundamental",
            BoundKind::Homodyne => "homodyne",
            BoundKind::SignalQuadrature => "signal_quadrature",
        }
    }

    /// Closed-form bound of this kind in units of `h_SQL²/8`.
    pub fn evaluate(self, matrices: &SqueezeMatrices, kappas: &[f64]) -> Result<f64> {
        match self {
            BoundKind::Fundamental => matrices.fundamental(kappas, QcrbForm::Compact),
            BoundKind::Homodyne => matrices.homodyne(kappas),
            BoundKind::SignalQuadrature => matrices.signal_quadrature(kappas),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AbstractBoundCoefficients {
    pub c1: Vec<f64>,
    pub c2: Vec<f64>,
    pub c3: Vec<f64>,
}

impl AbstractBoundCoefficients {
    pub fn new(c1: Vec<f64>, c2: Vec<f64>, c3: Vec<f64>) -> Result<Self> {
        if c1.is_empty() || c1.len() != c2.len() || c1.len() != c3.len() {
            return Err(Error::Dimension(format!(
                "coefficient vectors of lengths {}, {}, {}",
                c1.len(),
                c2.len(),
                c3.len()
            )));
        }
        Ok(Self { c1, c2, c3 })
    }

    pub fn carriers(&self) -> usize {
        self.c1.len()
    }

    fn check(&self, kappas: &[f64]) -> Result<(f64, f64)> {
        if kappas.len() != self.carriers() {
            return Err(Error::Dimension(format!(
                "{} couplings for {} carriers",
                kappas.len(),
                self.carriers()
            )));
        }
        let signal = dot(&self.c2, kappas);
        if !(signal > 0.0) {
            return Err(Error::Divergent(format!(
                "Σ c2 κ = {signal}; no signal at this configuration"
            )));
        }
        Ok((1.0 - dot(&self.c1, kappas), signal))
    }

    pub fn evaluate(&self, kappas: &[f64]) -> Result<f64> {
        let (lead, signal) = self.check(kappas)?;
        Ok(lead * lead / signal + dot(&self.c3, kappas))
    }

    /// `ρ = (1 − Σ c1 κ) / Σ c2 κ`.
    pub fn rho(&self, kappas: &[f64]) -> Result<f64> {
        let (lead, signal) = self.check(kappas)?;
        Ok(lead / signal)
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Reads the coefficients off the closed forms.
///
/// `thetas` is only consulted for [`BoundKind::Homodyne`].
pub fn extract_coefficients_analytic(
    kind: BoundKind,
    squeezings: &[Squeezing],
    thetas: &[f64],
    eta: f64,
) -> Result<AbstractBoundCoefficients> {
    let angles = if kind == BoundKind::Homodyne { thetas } else { &[] };
    if kind == BoundKind::Homodyne && thetas.len() != squeezings.len() {
        return Err(Error::Dimension(format!(
            "{} homodyne angles for {} carriers",
            thetas.len(),
            squeezings.len()
        )));
    }
    let m = SqueezeMatrices::new(squeezings, angles, eta)?;
    let loss = 1.0 - eta;
    let d = m.carriers();
    let (mut c1, mut c2, mut c3) = (vec![0.0; d], vec![0.0; d], vec![0.0; d]);
    for i in 0..d {
        let (a, b, c) = match kind {
            BoundKind::Fundamental => (
                loss * eta * m.s[i] * m.gamma[i],
                eta * (loss + eta * m.q[i]) * m.gamma[i],
                loss * m.p[i] * m.gamma[i],
            ),
            BoundKind::Homodyne => {
                let g2 = m.g[i] * m.g[i];
                (
                    eta * (g2 * m.s[i] + m.f[i] * m.g[i] * m.q[i]) / m.y[i],
                    eta * g2 / m.y[i],
                    (loss * m.q[i] + eta * g2) / m.y[i],
                )
            }
            BoundKind::SignalQuadrature => (
                eta * m.s[i] / m.t[i],
                eta / m.t[i],
                m.p[i] / m.t[i],
            ),
        };
        c1[i] = a;
        c2[i] = b;
        c3[i] = c;
    }
    AbstractBoundCoefficients::new(c1, c2, c3)
}

/// Probe points used by [`extract_coefficients_probe`] by default.
pub const DEFAULT_PROBES: [f64; 3] = [0.5, 1.0, 2.0];

/// Recovers `(c1, c2, c3)` of a single carrier from three evaluations of
/// `B(κ) = a/κ + b + cκ`.
pub fn extract_coefficients_probe<F>(bound: F, probes: [f64; 3]) -> Result<(f64, f64, f64)>
where
    F: Fn(f64) -> Result<f64>,
{
    for (i, p) in probes.iter().enumerate() {
        if !(p.is_finite() && *p > 0.0) {
            return Err(Error::Domain(format!("probe couplings must be positive, got {p}")));
        }
        if probes[..i].contains(p) {
            return Err(Error::Singular(format!("probe coupling {p} repeated")));
        }
    }
    let a = Matrix3::from_fn(|r, c| match c {
        0 => 1.0 / probes[r],
        1 => 1.0,
        _ => probes[r],
    });
    let rhs = Vector3::new(bound(probes[0])?, bound(probes[1])?, bound(probes[2])?);
    let sol = a
        .lu()
        .solve(&rhs)
        .ok_or_else(|| Error::Singular("probe system is singular".into()))?;
    let (inv_c2, b, c) = (sol[0], sol[1], sol[2]);
    if !(inv_c2 > 0.0) {
        return Err(Error::Domain(format!(
            "fitted 1/κ coefficient {inv_c2} is not positive"
        )));
    }
    let c1 = -b / (2.0 * inv_c2);
    let c2 = 1.0 / inv_c2;
    let c3 = c - b * b / (4.0 * inv_c2);
    Ok((c1, c2, c3))
}

/// Probes each carrier of a closed-form bound with all other couplings set
/// to zero.
pub fn extract_coefficients_probe_all(
    kind: BoundKind,
    squeezings: &[Squeezing],
    thetas: &[f64],
    eta: f64,
    probes: [f64; 3],
) -> Result<AbstractBoundCoefficients> {
    let angles = if kind == BoundKind::Homodyne { thetas } else { &[] };
    let m = SqueezeMatrices::new(squeezings, angles, eta)?;
    let d = m.carriers();
    let (mut c1, mut c2, mut c3) = (vec![0.0; d], vec![0.0; d], vec![0.0; d]);
    for i in 0..d {
        let (a, b, c) = extract_coefficients_probe(
            |k| {
                let mut kappas = vec![0.0; d];
                kappas[i] = k;
                kind.evaluate(&m, &kappas)
            },
            probes,
        )?;
        c1[i] = a;
        c2[i] = b;
        c3[i] = c;
    }
    AbstractBoundCoefficients::new(c1, c2, c3)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SingleCarrierOptimum {
    Finite { kappa: f64, bound: f64 },
    /// No radiation-pressure term: the bound keeps falling as `κ → ∞`.
    ShotNoiseLimited,
}

impl SingleCarrierOptimum {
    pub fn bound(&self) -> f64 {
        match self {
            SingleCarrierOptimum::Finite { bound, .. } => *bound,
            SingleCarrierOptimum::ShotNoiseLimited => 0.0,
        }
    }

    pub fn kappa(&self) -> f64 {
        match self {
            SingleCarrierOptimum::Finite { kappa, .. } => *kappa,
            SingleCarrierOptimum::ShotNoiseLimited => f64::INFINITY,
        }
    }
}

/// Stationary point `κ* = 1/√(c1² + c2 c3)` with value
/// `−2c1/c2 + 2√((c1/c2)² + c3/c2)`.
pub fn single_carrier_optimum(c1: f64, c2: f64, c3: f64) -> Result<SingleCarrierOptimum> {
    if !(c2 > 0.0 && c2.is_finite()) {
        return Err(Error::Domain(format!("c2 must be positive, got {c2}")));
    }
    if !(c3 >= 0.0 && c3.is_finite() && c1.is_finite()) {
        return Err(Error::Domain(format!("need finite c1 and c3 ≥ 0, got {c1}, {c3}")));
    }
    if c3 == 0.0 && c1 <= 0.0 {
        return Ok(SingleCarrierOptimum::ShotNoiseLimited);
    }
    let kappa = 1.0 / (c1 * c1 + c2 * c3).sqrt();
    let ratio = c1 / c2;
    let bound = -2.0 * ratio + 2.0 * (ratio * ratio + c3 / c2).sqrt();
    Ok(SingleCarrierOptimum::Finite { kappa, bound })
}

/// `∂B/∂κⱼ = −c2ⱼ ρ² − 2 c1ⱼ ρ + c3ⱼ`.
pub fn bound_gradient(coeffs: &AbstractBoundCoefficients, kappas: &[f64]) -> Result<Vec<f64>> {
    let rho = coeffs.rho(kappas)?;
    Ok((0..coeffs.carriers())
        .map(|j| -coeffs.c2[j] * rho * rho - 2.0 * coeffs.c1[j] * rho + coeffs.c3[j])
        .collect())
}

/// `(2 / Σ c2 κ) v vᵀ` with `vⱼ = c1ⱼ + c2ⱼ ρ`.
pub fn bound_hessian(coeffs: &AbstractBoundCoefficients, kappas: &[f64]) -> Result<DMatrix<f64>> {
    let rho = coeffs.rho(kappas)?;
    let signal = dot(&coeffs.c2, kappas);
    let v: Vec<f64> = (0..coeffs.carriers())
        .map(|j| coeffs.c1[j] + coeffs.c2[j] * rho)
        .collect();
    let d = v.len();
    Ok(DMatrix::from_fn(d, d, |r, c| 2.0 * v[r] * v[c] / signal))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    /// Finite optimal coupling.
    Interior,
    /// Optimum at `κ → ∞`.
    ShotNoise,
}

/// Affine set of equally good configurations spanned by one class.
#[derive(Debug, Clone, PartialEq)]
pub struct DegenerateFamily {
    /// Carriers in the class.
    pub members: Vec<usize>,
    /// `√(c1² + c2 c3)` per member; the family is `Σ weightⱼ κⱼ = 1`.
    pub weights: Vec<f64>,
    /// Single-carrier configurations spanning the family, one per member.
    pub vertices: Vec<Vec<f64>>,
    /// Member whose vertex has the smallest total coupling.
    pub min_total_member: usize,
    /// Member whose vertex has the largest total coupling.
    pub max_total_member: usize,
    /// Largest relative deviation of `B` from the optimum over the samples.
    pub max_relative_variation: f64,
    pub samples: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimumReport {
    pub regime: Regime,
    pub best_carrier_index: usize,
    pub kappa_star: f64,
    /// Optimal bound in units of `h_SQL²/8`.
    pub bound_star: f64,
    /// Single-carrier optimum of every carrier; `None` for carriers without
    /// signal (`c2 = 0`).
    pub per_carrier: Vec<Option<SingleCarrierOptimum>>,
    /// Carriers grouped by equal `−c1/c2 + √((c1/c2)² + c3/c2)`.
    pub classes: Vec<Vec<usize>>,
    /// Family of the best class; absent in the shot-noise regime.
    pub degenerate_family: Option<DegenerateFamily>,
    /// Roots `−c1/c2 − √((c1/c2)² + c3/c2)` per carrier. They would need
    /// negative couplings and are not explored.
    pub negative_roots: Vec<f64>,
}

impl OptimumReport {
    /// Optimal configuration: all power in the best carrier.
    pub fn configuration(&self) -> Vec<f64> {
        let mut k = vec![0.0; self.per_carrier.len()];
        k[self.best_carrier_index] = self.kappa_star;
        k
    }
}

fn positive_root(c1: f64, c2: f64, c3: f64) -> f64 {
    let r = c1 / c2;
    -r + (r * r + c3 / c2).sqrt()
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs())
}

pub fn degenerate_family(coeffs: &AbstractBoundCoefficients) -> Result<OptimumReport> {
    degenerate_family_with(coeffs, CLASS_TOLERANCE, 0)
}

/// As [`degenerate_family`], with an explicit class tolerance and the seed
/// used to sample the family.
pub fn degenerate_family_with(
    coeffs: &AbstractBoundCoefficients,
    tolerance: f64,
    seed: u64,
) -> Result<OptimumReport> {
    let d = coeffs.carriers();
    let mut per_carrier = Vec::with_capacity(d);
    for j in 0..d {
        per_carrier.push(if coeffs.c2[j] > 0.0 {
            Some(single_carrier_optimum(coeffs.c1[j], coeffs.c2[j], coeffs.c3[j])?)
        } else {
            None
        });
    }
    let negative_roots = (0..d)
        .map(|j| {
            let r = coeffs.c1[j] / coeffs.c2[j];
            -r - (r * r + coeffs.c3[j] / coeffs.c2[j]).sqrt()
        })
        .collect();

    let active: Vec<usize> = (0..d).filter(|&j| per_carrier[j].is_some()).collect();
    if active.is_empty() {
        return Err(Error::Divergent("no carrier carries signal".into()));
    }

    if let Some(&j) = active
        .iter()
        .find(|&&j| per_carrier[j] == Some(SingleCarrierOptimum::ShotNoiseLimited))
    {
        return Ok(OptimumReport {
            regime: Regime::ShotNoise,
            best_carrier_index: j,
            kappa_star: f64::INFINITY,
            bound_star: 0.0,
            per_carrier,
            classes: vec![active],
            degenerate_family: None,
            negative_roots,
        });
    }

    let roots: Vec<f64> = (0..d)
        .map(|j| positive_root(coeffs.c1[j], coeffs.c2[j], coeffs.c3[j]))
        .collect();
    let mut classes: Vec<Vec<usize>> = Vec::new();
    for &j in &active {
        match classes
            .iter_mut()
            .find(|class| close(roots[class[0]], roots[j], tolerance))
        {
            Some(class) => class.push(j),
            None => classes.push(vec![j]),
        }
    }

    let best = active
        .iter()
        .copied()
        .min_by(|&a, &b| {
            per_carrier[a]
                .map(|o| o.bound())
                .unwrap_or(f64::INFINITY)
                .total_cmp(&per_carrier[b].map(|o| o.bound()).unwrap_or(f64::INFINITY))
        })
        .unwrap_or(active[0]);
    let (kappa_star, bound_star) = match per_carrier[best] {
        Some(SingleCarrierOptimum::Finite { kappa, bound }) => (kappa, bound),
        _ => unreachable!("finite optimum established above"),
    };

    let members = classes
        .iter()
        .find(|c| c.contains(&best))
        .cloned()
        .unwrap_or_else(|| vec![best]);
    let weights: Vec<f64> = members
        .iter()
        .map(|&j| (coeffs.c1[j].powi(2) + coeffs.c2[j] * coeffs.c3[j]).sqrt())
        .collect();
    let vertices: Vec<Vec<f64>> = members
        .iter()
        .zip(&weights)
        .map(|(&j, w)| {
            let mut k = vec![0.0; d];
            k[j] = 1.0 / w;
            k
        })
        .collect();
    let totals: Vec<f64> = weights.iter().map(|w| 1.0 / w).collect();
    let argmin = (0..members.len())
        .min_by(|&a, &b| totals[a].total_cmp(&totals[b]))
        .unwrap_or(0);
    let argmax = (0..members.len())
        .max_by(|&a, &b| totals[a].total_cmp(&totals[b]))
        .unwrap_or(0);

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut samples = Vec::with_capacity(10);
    let mut max_relative_variation: f64 = 0.0;
    for _ in 0..10 {
        let raw: Vec<f64> = (0..members.len()).map(|_| rng.gen::<f64>() + 1e-3).collect();
        let total: f64 = raw.iter().sum();
        let mut k = vec![0.0; d];
        for (m, vertex) in vertices.iter().enumerate() {
            for (kj, vj) in k.iter_mut().zip(vertex) {
                *kj += raw[m] / total * vj;
            }
        }
        let value = coeffs.evaluate(&k)?;
        max_relative_variation = max_relative_variation.max((value - bound_star).abs() / bound_star.abs());
        samples.push(k);
    }

    Ok(OptimumReport {
        regime: Regime::Interior,
        best_carrier_index: best,
        kappa_star,
        bound_star,
        per_carrier,
        classes,
        degenerate_family: Some(DegenerateFamily {
            min_total_member: members[argmin],
            max_total_member: members[argmax],
            members,
            weights,
            vertices,
            max_relative_variation,
            samples,
        }),
        negative_roots,
    })
}

/// Resolution of the exhaustive dominance search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    /// Points per axis including both ends; `None` picks 64 for up to three
    /// carriers and 24 for four.
    pub points_per_axis: Option<usize>,
    pub random_points: usize,
    pub seed: u64,
    /// Grid extends to this multiple of the largest single-carrier optimum.
    pub extent: f64,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            points_per_axis: None,
            random_points: 10_000,
            seed: 0x5eed,
            extent: 4.0,
        }
    }
}

/// Where the best searched configuration lies.
#[derive(Debug, Clone, PartialEq)]
pub enum MinimumLocation {
    /// All power in one carrier.
    Axis(usize),
    /// Power spread over carriers of one degenerate class.
    DegenerateSet(Vec<usize>),
    /// Power spread over carriers of different classes.
    Interior(Vec<usize>),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Verdict {
    /// No searched configuration beats the best single carrier.
    Holds,
    /// A configuration beat it by `margin`.
    Violated { margin: f64 },
    /// The optimum lies at infinite coupling; nothing to compare.
    ShotNoiseRegime,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DominanceReport {
    pub kind: BoundKind,
    pub optimum: OptimumReport,
    pub search_min: f64,
    pub search_argmin: Vec<f64>,
    pub location: MinimumLocation,
    pub grid_points: usize,
    pub random_points: usize,
    pub verdict: Verdict,
}

impl DominanceReport {
    pub fn holds(&self) -> bool {
        self.verdict == Verdict::Holds
    }
}

/// Absolute slack, in units of `h_SQL²/8`, allowed before dominance fails.
pub const DOMINANCE_TOLERANCE: f64 = 1e-9;

/// Searches a grid over `[0, extent·κ*]ᵈ` and random interior points for a
/// multi-carrier configuration beating the best single carrier.
pub fn verify_single_carrier_dominance(
    kind: BoundKind,
    squeezings: &[Squeezing],
    thetas: &[f64],
    eta: f64,
    grid: GridSpec,
) -> Result<DominanceReport> {
    let d = squeezings.len();
    let per_axis = match grid.points_per_axis {
        Some(n) if n >= 2 => n,
        Some(n) => return Err(Error::Domain(format!("need at least 2 grid points per axis, got {n}"))),
        None if d <= 3 => 64,
        None if d == 4 => 24,
        None => {
            return Err(Error::Dimension(format!(
                "exhaustive search supports at most 4 carriers, got {d}"
            )))
        }
    };
    let coeffs = extract_coefficients_analytic(kind, squeezings, thetas, eta)?;
    let optimum = degenerate_family(&coeffs)?;
    let angles = if kind == BoundKind::Homodyne { thetas } else { &[] };
    let matrices = SqueezeMatrices::new(squeezings, angles, eta)?;

    if optimum.regime == Regime::ShotNoise {
        return Ok(DominanceReport {
            kind,
            location: MinimumLocation::Axis(optimum.best_carrier_index),
            search_min: 0.0,
            search_argmin: optimum.configuration(),
            optimum,
            grid_points: 0,
            random_points: 0,
            verdict: Verdict::ShotNoiseRegime,
        });
    }

    let reach = optimum
        .per_carrier
        .iter()
        .flatten()
        .map(|o| o.kappa())
        .fold(0.0_f64, f64::max);
    let extent = grid.extent * reach;
    let step = extent / (per_axis - 1) as f64;

    let mut best_value = f64::INFINITY;
    let mut best_point = optimum.configuration();
    let mut consider = |k: &[f64], value: f64| {
        let support = k.iter().filter(|x| **x != 0.0).count();
        let current = best_point.iter().filter(|x| **x != 0.0).count();
        let tie = best_value.is_finite() && (value - best_value).abs() <= 1e-15 * best_value.abs();
        if value < best_value && !tie || tie && support < current {
            best_value = value;
            best_point = k.to_vec();
        }
    };

    let total = per_axis.pow(d as u32);
    let mut idx = vec![0usize; d];
    let mut kappas = vec![0.0; d];
    let mut grid_points = 0;
    for _ in 0..total {
        for (k, i) in kappas.iter_mut().zip(&idx) {
            *k = *i as f64 * step;
        }
        if let Ok(value) = kind.evaluate(&matrices, &kappas) {
            grid_points += 1;
            consider(&kappas, value);
        }
        for i in idx.iter_mut() {
            *i += 1;
            if *i < per_axis {
                break;
            }
            *i = 0;
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(grid.seed);
    let mut random_points = 0;
    for _ in 0..grid.random_points {
        for k in kappas.iter_mut() {
            *k = rng.gen::<f64>() * extent;
        }
        if let Ok(value) = kind.evaluate(&matrices, &kappas) {
            random_points += 1;
            consider(&kappas, value);
        }
    }

    let support: Vec<usize> = (0..d).filter(|&j| best_point[j] != 0.0).collect();
    let location = if support.len() == 1 {
        MinimumLocation::Axis(support[0])
    } else if optimum
        .classes
        .iter()
        .any(|class| support.iter().all(|j| class.contains(j)))
    {
        MinimumLocation::DegenerateSet(support)
    } else {
        MinimumLocation::Interior(support)
    };
    let margin = optimum.bound_star - best_value;
    let verdict = if margin > DOMINANCE_TOLERANCE {
        Verdict::Violated { margin }
    } else {
        Verdict::Holds
    };
    Ok(DominanceReport {
        kind,
        optimum,
        search_min: best_value,
        search_argmin: best_point,
        location,
        grid_points,
        random_points,
        verdict,
    })
}
