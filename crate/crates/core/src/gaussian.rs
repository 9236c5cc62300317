//! Gaussian states of two-photon optical modes.
//!
//! Quadratures are indexed carrier by carrier. A state either carries only
//! the `x` sector `(x1⁽¹⁾, x2⁽¹⁾, …, x1⁽ᵈ⁾, x2⁽ᵈ⁾)` or both sectors, in which
//! case the `p` sector `(p1⁽¹⁾, p2⁽¹⁾, …)` follows the `x` sector. Covariances
//! are normalised so that vacuum is the identity.
//!
//! In the two-photon basis the conjugate pairs are `(x1, x2)` and `(p1, p2)`
//! of the same carrier, which fixes the commutation matrix returned by
//! [`commutation_matrix`].

use nalgebra::{Complex, DMatrix, DVector};

use crate::linalg;
use crate::{Error, Result};

/// Relative tolerance for the symmetry of a covariance matrix.
pub const SYMMETRY_TOLERANCE: f64 = 1e-12;

/// Which quadrature sectors a state carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sectors {
    /// Only the `x1`, `x2` quadratures of each carrier.
    X,
    /// The `x` sector followed by the `p` sector.
    XP,
}

impl Sectors {
    pub fn count(self) -> usize {
        match self {
            Sectors::X => 1,
            Sectors::XP => 2,
        }
    }
}

/// Order of the quadratures within one sector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModeOrdering {
    /// `(x1⁽¹⁾, x2⁽¹⁾, …, x1⁽ᵈ⁾, x2⁽ᵈ⁾)`, the native ordering of this module.
    Interleaved,
    /// `(x1⁽¹⁾, …, x1⁽ᵈ⁾, x2⁽¹⁾, …, x2⁽ᵈ⁾)`.
    Blocked,
}

impl ModeOrdering {
    /// Permutation matrix `P` with `v_self = P · v_interleaved` for one
    /// sector of `carriers` carriers.
    pub fn permutation(self, carriers: usize) -> DMatrix<f64> {
        let n = 2 * carriers;
        let mut p = DMatrix::zeros(n, n);
        for i in 0..carriers {
            for q in 0..2 {
                let row = match self {
                    ModeOrdering::Interleaved => 2 * i + q,
                    ModeOrdering::Blocked => q * carriers + i,
                };
                p[(row, 2 * i + q)] = 1.0;
            }
        }
        p
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GaussianState {
    carriers: usize,
    sectors: Sectors,
    mean: DVector<f64>,
    cov: DMatrix<f64>,
}

impl GaussianState {
    /// Builds a state, checking dimensions, symmetry and positive
    /// definiteness of the covariance.
    pub fn new(
        carriers: usize,
        sectors: Sectors,
        mean: DVector<f64>,
        cov: DMatrix<f64>,
    ) -> Result<Self> {
        if carriers == 0 {
            return Err(Error::Dimension("a state needs at least one carrier".into()));
        }
        let dim = 2 * carriers * sectors.count();
        if mean.len() != dim || cov.nrows() != dim || cov.ncols() != dim {
            return Err(Error::Dimension(format!(
                "expected {dim} quadratures, got mean of length {} and {}x{} covariance",
                mean.len(),
                cov.nrows(),
                cov.ncols()
            )));
        }
        linalg::check_symmetric(&cov, SYMMETRY_TOLERANCE)?;
        if cov.clone().cholesky().is_none() {
            return Err(Error::InvalidState(
                "covariance is not positive definite".into(),
            ));
        }
        Ok(Self {
            carriers,
            sectors,
            mean,
            cov,
        })
    }

    pub fn vacuum(carriers: usize, sectors: Sectors) -> Self {
        let dim = 2 * carriers * sectors.count();
        Self {
            carriers,
            sectors,
            mean: DVector::zeros(dim),
            cov: DMatrix::identity(dim, dim),
        }
    }

    pub fn carriers(&self) -> usize {
        self.carriers
    }

    pub fn sectors(&self) -> Sectors {
        self.sectors
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    pub fn mean(&self) -> &DVector<f64> {
        &self.mean
    }

    pub fn cov(&self) -> &DMatrix<f64> {
        &self.cov
    }

    /// Index of quadrature `x2` (or `x1` when `second == false`) of a carrier
    /// in the `x` sector.
    pub fn x_index(carrier: usize, second: bool) -> usize {
        2 * carrier + usize::from(second)
    }

    /// Moments with each sector rearranged into `ordering`.
    pub fn moments_in(&self, ordering: ModeOrdering) -> (DVector<f64>, DMatrix<f64>) {
        let block = ordering.permutation(self.carriers);
        let p = block_diag_repeat(&block, self.sectors.count());
        (&p * &self.mean, &p * &self.cov * p.transpose())
    }
}

/// A Gaussian channel `d → S d + shift`, `σ → S σ Sᵀ`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymplecticMap {
    pub matrix: DMatrix<f64>,
    pub shift: DVector<f64>,
}

impl SymplecticMap {
    pub fn identity(dim: usize) -> Self {
        Self {
            matrix: DMatrix::identity(dim, dim),
            shift: DVector::zeros(dim),
        }
    }

    pub fn with_shift(mut self, shift: DVector<f64>) -> Result<Self> {
        if shift.len() != self.matrix.nrows() {
            return Err(Error::Dimension(format!(
                "shift of length {} for a {}-dimensional map",
                shift.len(),
                self.matrix.nrows()
            )));
        }
        self.shift = shift;
        Ok(self)
    }

    /// `max |S J Sᵀ − J|`.
    pub fn symplectic_residual(&self, j: &DMatrix<f64>) -> f64 {
        linalg::max_abs(&(&self.matrix * j * self.matrix.transpose() - j))
    }
}

/// Commutation matrix of the two-photon basis: one `[[0, 1], [-1, 0]]` block
/// per `(x1, x2)` pair, repeated for the `p` sector when present.
pub fn commutation_matrix(carriers: usize, sectors: Sectors) -> DMatrix<f64> {
    let n = 2 * carriers * sectors.count();
    let mut j = DMatrix::zeros(n, n);
    for pair in 0..n / 2 {
        j[(2 * pair, 2 * pair + 1)] = 1.0;
        j[(2 * pair + 1, 2 * pair)] = -1.0;
    }
    j
}

/// Real symplectic representation `[[Re M, −Im M], [Im M, Re M]]` of a
/// complex mode transformation.
pub fn symplectic_from_complex(m: &DMatrix<Complex<f64>>) -> Result<SymplecticMap> {
    if !m.is_square() {
        return Err(Error::Dimension(format!(
            "mode transformation is {}x{}, expected square",
            m.nrows(),
            m.ncols()
        )));
    }
    let n = m.nrows();
    let re = m.map(|z| z.re);
    let im = m.map(|z| z.im);
    let mut s = DMatrix::zeros(2 * n, 2 * n);
    s.view_mut((0, 0), (n, n)).copy_from(&re);
    s.view_mut((0, n), (n, n)).copy_from(&(-&im));
    s.view_mut((n, 0), (n, n)).copy_from(&im);
    s.view_mut((n, n), (n, n)).copy_from(&re);
    Ok(SymplecticMap::identity(2 * n).with_matrix(s))
}

impl SymplecticMap {
    fn with_matrix(mut self, matrix: DMatrix<f64>) -> Self {
        self.matrix = matrix;
        self
    }
}

/// Displacement `√2 (Re[hV]; Im[hV])` produced by a signal `h` entering
/// along `V`.
pub fn displacement_from_signal(h: Complex<f64>, v: &DVector<Complex<f64>>) -> DVector<f64> {
    let n = v.len();
    let mut d = DVector::zeros(2 * n);
    for (k, vk) in v.iter().enumerate() {
        let z = h * vk;
        d[k] = std::f64::consts::SQRT_2 * z.re;
        d[n + k] = std::f64::consts::SQRT_2 * z.im;
    }
    d
}

pub fn apply_channel(state: &GaussianState, map: &SymplecticMap) -> Result<GaussianState> {
    let dim = state.dim();
    if map.matrix.nrows() != dim || map.matrix.ncols() != dim || map.shift.len() != dim {
        return Err(Error::Dimension(format!(
            "{}x{} map applied to a {dim}-dimensional state",
            map.matrix.nrows(),
            map.matrix.ncols()
        )));
    }
    let mean = &map.matrix * &state.mean + &map.shift;
    let cov = linalg::symmetrize(&(&map.matrix * &state.cov * map.matrix.transpose()));
    Ok(GaussianState {
        mean,
        cov,
        ..state.clone()
    })
}

/// Pure loss to vacuum through a beam splitter of transmittivity `eta`.
pub fn apply_loss(state: &GaussianState, eta: f64) -> Result<GaussianState> {
    let env = DMatrix::identity(state.dim(), state.dim());
    apply_loss_with_environment(state, eta, &env)
}

/// Loss with an arbitrary Gaussian environment: `d → √η d`,
/// `σ → η σ + (1 − η) σ_env`.
pub fn apply_loss_with_environment(
    state: &GaussianState,
    eta: f64,
    env: &DMatrix<f64>,
) -> Result<GaussianState> {
    if !(0.0..=1.0).contains(&eta) {
        return Err(Error::Domain(format!(
            "transmittivity must lie in [0, 1], got {eta}"
        )));
    }
    if env.nrows() != state.dim() || env.ncols() != state.dim() {
        return Err(Error::Dimension(format!(
            "{}x{} environment for a {}-dimensional state",
            env.nrows(),
            env.ncols(),
            state.dim()
        )));
    }
    linalg::check_symmetric(env, SYMMETRY_TOLERANCE)?;
    if env.clone().cholesky().is_none() {
        return Err(Error::InvalidState(
            "environment covariance is not positive definite".into(),
        ));
    }
    Ok(GaussianState {
        mean: &state.mean * eta.sqrt(),
        cov: &state.cov * eta + env * (1.0 - eta),
        ..state.clone()
    })
}

/// Rotates each carrier's `(x1, x2)` pair (and `(p1, p2)` when present) by
/// `[[cos θ, −sin θ], [sin θ, cos θ]]`, so that the new `x2` is
/// `sin θ · x1 + cos θ · x2`.
pub fn homodyne_rotate(state: &GaussianState, thetas: &[f64]) -> Result<GaussianState> {
    let map = homodyne_map(state.carriers, state.sectors, thetas)?;
    apply_channel(state, &map)
}

pub fn homodyne_map(carriers: usize, sectors: Sectors, thetas: &[f64]) -> Result<SymplecticMap> {
    if thetas.len() != carriers {
        return Err(Error::Dimension(format!(
            "{} homodyne angles for {carriers} carriers",
            thetas.len()
        )));
    }
    let dim = 2 * carriers * sectors.count();
    let mut s = DMatrix::zeros(dim, dim);
    for sector in 0..sectors.count() {
        let offset = sector * 2 * carriers;
        for (i, &theta) in thetas.iter().enumerate() {
            let (sin, cos) = theta.sin_cos();
            let a = offset + 2 * i;
            s[(a, a)] = cos;
            s[(a, a + 1)] = -sin;
            s[(a + 1, a)] = sin;
            s[(a + 1, a + 1)] = cos;
        }
    }
    Ok(SymplecticMap::identity(dim).with_matrix(s))
}

/// Marginal of the Wigner function on a set of mutually commuting
/// quadratures: the sub-vector of the mean and the principal sub-matrix of
/// the covariance.
pub fn marginalize(
    state: &GaussianState,
    indices: &[usize],
) -> Result<(DVector<f64>, DMatrix<f64>)> {
    let dim = state.dim();
    for (k, &a) in indices.iter().enumerate() {
        if a >= dim {
            return Err(Error::Dimension(format!(
                "quadrature index {a} out of range for {dim} quadratures"
            )));
        }
        if indices[..k].contains(&a) {
            return Err(Error::Dimension(format!("quadrature index {a} repeated")));
        }
    }
    let j = commutation_matrix(state.carriers, state.sectors);
    for (k, &a) in indices.iter().enumerate() {
        for &b in &indices[k + 1..] {
            if j[(a, b)] != 0.0 {
                return Err(Error::NonCommuting(a.min(b), a.max(b)));
            }
        }
    }
    let w = DVector::from_iterator(indices.len(), indices.iter().map(|&a| state.mean[a]));
    let sigma = DMatrix::from_fn(indices.len(), indices.len(), |r, c| {
        state.cov[(indices[r], indices[c])]
    });
    Ok((w, sigma))
}

/// Classical Fisher information of a Gaussian distribution with
/// vacuum-normalised covariance:
/// `2 ∂wᵀ Σ⁻¹ ∂w + ½ tr[(∂Σ Σ⁻¹)²]`.
pub fn gaussian_cfi(
    dw_dh: &DVector<f64>,
    sigma: &DMatrix<f64>,
    dsigma_dh: &DMatrix<f64>,
) -> Result<f64> {
    let n = dw_dh.len();
    if sigma.nrows() != n || sigma.ncols() != n || dsigma_dh.nrows() != n || dsigma_dh.ncols() != n
    {
        return Err(Error::Dimension(format!(
            "derivative of length {n} with {}x{} covariance and {}x{} covariance derivative",
            sigma.nrows(),
            sigma.ncols(),
            dsigma_dh.nrows(),
            dsigma_dh.ncols()
        )));
    }
    let mean_term = 2.0 * dw_dh.dot(&linalg::spd_solve(sigma, dw_dh)?);
    if dsigma_dh.iter().all(|&x| x == 0.0) {
        return Ok(mean_term);
    }
    let prod = dsigma_dh * linalg::spd_inverse(sigma)?;
    Ok(mean_term + 0.5 * (&prod * &prod).trace())
}

/// Quantum Fisher information `2 (∂d)ᵀ σ⁻¹ (∂d)` of a parameter encoded
/// only in the displacement.
pub fn displacement_qfi(state: &GaussianState, dd_dh: &DVector<f64>) -> Result<f64> {
    if dd_dh.len() != state.dim() {
        return Err(Error::Dimension(format!(
            "displacement derivative of length {} for a {}-dimensional state",
            dd_dh.len(),
            state.dim()
        )));
    }
    Ok(2.0 * dd_dh.dot(&linalg::spd_solve(&state.cov, dd_dh)?))
}

/// Change of basis from sideband quadratures to two-photon quadratures.
///
/// The input is ordered `(x₊, p₊, x₋, p₋)` per sideband pair; the output uses
/// this module's `x`-then-`p` layout, so for one pair it is
/// `(x1, x2, p1, p2)` with
/// `x1 = (x₊ + x₋)/√2`, `x2 = (p₊ + p₋)/√2`, `p1 = (p₊ − p₋)/√2`,
/// `p2 = (−x₊ + x₋)/√2`.
pub fn two_photon_basis_map(n_sidebands: usize) -> Result<SymplecticMap> {
    if n_sidebands == 0 {
        return Err(Error::Dimension("need at least one sideband pair".into()));
    }
    let n = n_sidebands;
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let mut s = DMatrix::zeros(4 * n, 4 * n);
    for i in 0..n {
        let (xp, pp, xm, pm) = (4 * i, 4 * i + 1, 4 * i + 2, 4 * i + 3);
        let (x1, x2) = (2 * i, 2 * i + 1);
        let (p1, p2) = (2 * n + 2 * i, 2 * n + 2 * i + 1);
        s[(x1, xp)] = h;
        s[(x1, xm)] = h;
        s[(x2, pp)] = h;
        s[(x2, pm)] = h;
        s[(p1, pp)] = h;
        s[(p1, pm)] = -h;
        s[(p2, xp)] = -h;
        s[(p2, xm)] = h;
    }
    Ok(SymplecticMap::identity(4 * n).with_matrix(s))
}

/// Commutation matrix of `n` independent sideband modes ordered
/// `(x₊, p₊, x₋, p₋)` per pair.
pub fn sideband_commutation_matrix(n_sidebands: usize) -> DMatrix<f64> {
    let n = 4 * n_sidebands;
    let mut j = DMatrix::zeros(n, n);
    for mode in 0..n / 2 {
        j[(2 * mode, 2 * mode + 1)] = 1.0;
        j[(2 * mode + 1, 2 * mode)] = -1.0;
    }
    j
}

fn block_diag_repeat(block: &DMatrix<f64>, times: usize) -> DMatrix<f64> {
    let n = block.nrows();
    let mut out = DMatrix::zeros(n * times, n * times);
    for t in 0..times {
        out.view_mut((t * n, t * n), (n, n)).copy_from(block);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::{FRAC_PI_2, SQRT_2};

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    /// Single-carrier ponderomotive map in the `x` sector.
    fn ponderomotive_x(kappa: f64) -> SymplecticMap {
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, -kappa, 1.0]);
        SymplecticMap::identity(2).with_matrix(m)
    }

    #[test]
    fn identity_complex_matrix_gives_identity() {
        let m = DMatrix::from_fn(2, 2, |r, col| if r == col { c(1.0, 0.0) } else { c(0.0, 0.0) });
        let s = symplectic_from_complex(&m).unwrap();
        assert_eq!(s.matrix, DMatrix::identity(4, 4));
        assert_eq!(s.shift, DVector::zeros(4));
    }

    #[test]
    fn imaginary_unit_is_quarter_rotation() {
        let m = DMatrix::from_element(1, 1, c(0.0, 1.0));
        let s = symplectic_from_complex(&m).unwrap();
        assert_eq!(s.matrix, DMatrix::from_row_slice(2, 2, &[0.0, -1.0, 1.0, 0.0]));
    }

    #[test]
    fn non_square_is_rejected() {
        let m = DMatrix::from_element(2, 3, c(1.0, 0.0));
        assert!(matches!(symplectic_from_complex(&m), Err(Error::Dimension(_))));
    }

    #[test]
    fn zero_signal_has_no_displacement() {
        let v = DVector::from_vec(vec![c(0.3, 1.0), c(-2.0, 0.5)]);
        assert_eq!(displacement_from_signal(c(0.0, 0.0), &v), DVector::zeros(4));
    }

    #[test]
    fn imaginary_component_lands_in_p_block() {
        let v = DVector::from_vec(vec![c(0.0, 0.0), c(0.0, 1.0)]);
        let d = displacement_from_signal(c(1.0, 0.0), &v);
        assert_eq!(d, DVector::from_vec(vec![0.0, 0.0, 0.0, SQRT_2]));
    }

    #[test]
    fn displacement_norm_ignores_signal_phase() {
        // V = (0, √(2κ)) at κ = 1, h_sql = 1.
        let v = DVector::from_vec(vec![c(0.0, 0.0), c(2.0_f64.sqrt(), 0.0)]);
        let d = displacement_from_signal(Complex::from_polar(1.0, std::f64::consts::FRAC_PI_4), &v);
        let re = d.rows(0, 2).norm();
        let im = d.rows(2, 2).norm();
        // √2 · √(2κ) · (1/√2) in each block.
        assert_relative_eq!(re, SQRT_2 * 2.0_f64.sqrt() * std::f64::consts::FRAC_1_SQRT_2, max_relative = 1e-15);
        assert_relative_eq!(im, re, max_relative = 1e-15);
        for alpha in [0.0, 0.4, 1.3, 2.9, 5.0] {
            let d = displacement_from_signal(Complex::from_polar(1.0, alpha), &v);
            assert_relative_eq!(d.norm_squared(), 4.0, max_relative = 1e-14);
        }
    }

    #[test]
    fn channel_identity_keeps_vacuum() {
        let vac = GaussianState::vacuum(2, Sectors::XP);
        let out = apply_channel(&vac, &SymplecticMap::identity(8)).unwrap();
        assert_eq!(out, vac);
    }

    #[test]
    fn ponderomotive_map_on_vacuum() {
        let vac = GaussianState::vacuum(1, Sectors::X);
        let out = apply_channel(&vac, &ponderomotive_x(1.0)).unwrap();
        assert_relative_eq!(out.cov()[(1, 1)], 2.0);
        assert_relative_eq!(out.cov()[(0, 1)], -1.0);
        assert_relative_eq!(out.cov()[(1, 0)], -1.0);
        assert_relative_eq!(out.cov()[(0, 0)], 1.0);
    }

    #[test]
    fn squeezed_state_passes_trivial_map_unchanged() {
        let (e2, em2) = (2.0_f64.exp(), (-2.0_f64).exp());
        let cov = DMatrix::from_diagonal(&DVector::from_vec(vec![e2, em2]));
        let st = GaussianState::new(1, Sectors::X, DVector::zeros(2), cov).unwrap();
        let out = apply_channel(&st, &ponderomotive_x(0.0)).unwrap();
        assert_eq!(out, st);
    }

    #[test]
    fn channel_dimension_mismatch() {
        let vac = GaussianState::vacuum(1, Sectors::X);
        assert!(matches!(
            apply_channel(&vac, &SymplecticMap::identity(4)),
            Err(Error::Dimension(_))
        ));
    }

    #[test]
    fn loss_extremes() {
        let cov = DMatrix::from_row_slice(2, 2, &[3.0, 0.5, 0.5, 1.0]);
        let st = GaussianState::new(1, Sectors::X, DVector::from_vec(vec![1.0, -2.0]), cov).unwrap();
        assert_eq!(apply_loss(&st, 1.0).unwrap(), st);
        let dark = apply_loss(&st, 0.0).unwrap();
        assert_eq!(dark.mean(), &DVector::zeros(2));
        assert_eq!(dark.cov(), &DMatrix::identity(2, 2));
        let env = DMatrix::from_diagonal(&DVector::from_vec(vec![2.0, 5.0]));
        let thermal = apply_loss_with_environment(&st, 0.0, &env).unwrap();
        assert_eq!(thermal.cov(), &env);
    }

    #[test]
    fn vacuum_is_fixed_point_of_loss() {
        let vac = GaussianState::vacuum(3, Sectors::X);
        let out = apply_loss(&vac, 0.95).unwrap();
        assert_relative_eq!(out.cov(), vac.cov(), epsilon = 1e-15);
        assert_eq!(out.mean(), vac.mean());
    }

    #[test]
    fn loss_outside_unit_interval() {
        let vac = GaussianState::vacuum(1, Sectors::X);
        assert!(matches!(apply_loss(&vac, 1.2), Err(Error::Domain(_))));
        assert!(matches!(apply_loss(&vac, -0.1), Err(Error::Domain(_))));
    }

    #[test]
    fn zero_angle_homodyne_is_identity() {
        let cov = DMatrix::from_row_slice(2, 2, &[3.0, 0.5, 0.5, 1.0]);
        let st = GaussianState::new(1, Sectors::X, DVector::from_vec(vec![1.0, -2.0]), cov).unwrap();
        assert_eq!(homodyne_rotate(&st, &[0.0]).unwrap(), st);
    }

    #[test]
    fn quarter_turn_moves_x1_into_x2() {
        let mean = DVector::from_vec(vec![1.5, -2.0, 0.25, 0.75]);
        let st = GaussianState::new(1, Sectors::XP, mean, DMatrix::identity(4, 4)).unwrap();
        let out = homodyne_rotate(&st, &[FRAC_PI_2]).unwrap();
        assert_relative_eq!(out.mean()[1], 1.5, epsilon = 1e-15);
        assert_relative_eq!(out.mean()[0], 2.0, epsilon = 1e-15);
        // p sector rotates the same way.
        assert_relative_eq!(out.mean()[3], 0.25, epsilon = 1e-15);
    }

    #[test]
    fn homodyne_angle_count_checked() {
        let vac = GaussianState::vacuum(2, Sectors::X);
        assert!(matches!(homodyne_rotate(&vac, &[0.1]), Err(Error::Dimension(_))));
    }

    #[test]
    fn measured_quadrature_after_optimal_rotation() {
        // κ = 1, η = 1, r = 0 at θ = arctan κ: the measured quadrature
        // sinθ·x1 + cosθ·x2 has variance cos²θ(1 + (κ − tanθ)²) = cos²θ and
        // mean proportional to cosθ, so the CFI is 2·(2√κ cosθ)²/cos²θ = 8κ.
        let kappa = 1.0_f64;
        let theta = kappa.atan();
        let vac = GaussianState::vacuum(1, Sectors::X);
        let map = ponderomotive_x(kappa)
            .with_shift(DVector::from_vec(vec![0.0, 2.0 * kappa.sqrt()]))
            .unwrap();
        let out = homodyne_rotate(&apply_channel(&vac, &map).unwrap(), &[theta]).unwrap();
        let (w, sigma) = marginalize(&out, &[1]).unwrap();
        assert_relative_eq!(sigma[(0, 0)], theta.cos().powi(2), max_relative = 1e-14);
        let cfi = gaussian_cfi(&w, &sigma, &DMatrix::zeros(1, 1)).unwrap();
        assert_relative_eq!(cfi, 8.0 * kappa, max_relative = 1e-14);
    }

    #[test]
    fn marginal_of_vacuum() {
        let vac = GaussianState::vacuum(2, Sectors::XP);
        for idx in 0..8 {
            let (w, s) = marginalize(&vac, &[idx]).unwrap();
            assert_eq!(w, DVector::zeros(1));
            assert_eq!(s, DMatrix::identity(1, 1));
        }
    }

    #[test]
    fn marginal_keeps_cross_covariance() {
        let (k1, k2) = (0.5_f64, 0.25_f64);
        let m = DMatrix::from_row_slice(
            4,
            4,
            &[
                1.0, 0.0, 0.0, 0.0,
                -k1, 1.0, -(k1 * k2).sqrt(), 0.0,
                0.0, 0.0, 1.0, 0.0,
                -(k1 * k2).sqrt(), 0.0, -k2, 1.0,
            ],
        );
        let st = apply_channel(
            &GaussianState::vacuum(2, Sectors::X),
            &SymplecticMap::identity(4).with_matrix(m.clone()),
        )
        .unwrap();
        let (_, sigma) = marginalize(&st, &[1, 3]).unwrap();
        let full = &m * m.transpose();
        assert_relative_eq!(sigma[(0, 1)], full[(1, 3)], epsilon = 1e-15);
        // x2⁽¹⁾·x2⁽²⁾ = κ1√(κ1κ2) + √(κ1κ2)κ2.
        assert_relative_eq!(sigma[(0, 1)], (k1 + k2) * (k1 * k2).sqrt(), epsilon = 1e-15);
    }

    #[test]
    fn marginal_contract_violations() {
        let vac = GaussianState::vacuum(2, Sectors::XP);
        assert!(matches!(marginalize(&vac, &[0, 1]), Err(Error::NonCommuting(0, 1))));
        assert!(matches!(marginalize(&vac, &[5, 4]), Err(Error::NonCommuting(4, 5))));
        assert!(matches!(marginalize(&vac, &[1, 1]), Err(Error::Dimension(_))));
        assert!(matches!(marginalize(&vac, &[8]), Err(Error::Dimension(_))));
        // x and p sectors commute.
        assert!(marginalize(&vac, &[1, 3, 4, 6]).is_ok());
    }

    #[test]
    fn cfi_unit_cases() {
        let one = DMatrix::identity(1, 1);
        let zero = DMatrix::zeros(1, 1);
        assert_eq!(gaussian_cfi(&DVector::from_vec(vec![1.0]), &one, &zero).unwrap(), 2.0);
        assert_eq!(gaussian_cfi(&DVector::zeros(1), &one, &zero).unwrap(), 0.0);
    }

    #[test]
    fn cfi_covariance_term() {
        // Σ = s, ∂Σ = ds: ½ (ds/s)².
        let sigma = DMatrix::from_element(1, 1, 2.0);
        let ds = DMatrix::from_element(1, 1, 0.5);
        let cfi = gaussian_cfi(&DVector::zeros(1), &sigma, &ds).unwrap();
        assert_relative_eq!(cfi, 0.5 * 0.25 * 0.25, max_relative = 1e-15);
    }

    #[test]
    fn cfi_singular_covariance() {
        let sigma = DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 1.0, 1.0]);
        let r = gaussian_cfi(&DVector::from_vec(vec![1.0, 0.0]), &sigma, &DMatrix::zeros(2, 2));
        assert!(r.is_err());
    }

    #[test]
    fn qfi_unit_cases() {
        let vac = GaussianState::vacuum(2, Sectors::X);
        let mut dd = DVector::zeros(4);
        assert_eq!(displacement_qfi(&vac, &dd).unwrap(), 0.0);
        dd[0] = 1.0;
        assert_eq!(displacement_qfi(&vac, &dd).unwrap(), 2.0);
    }

    #[test]
    fn qfi_single_carrier_lossless() {
        // σ = M Mᵀ has (σ⁻¹)_{x2,x2} = 1, so QFI = 2·(2√κ)² / h² = 8κ / h².
        for kappa in [0.1, 1.0, 3.7] {
            let h_sql = 1.3;
            let map = ponderomotive_x(kappa);
            let st = apply_channel(&GaussianState::vacuum(1, Sectors::X), &map).unwrap();
            let dd = DVector::from_vec(vec![0.0, 2.0 * f64::sqrt(kappa) / h_sql]);
            let qfi = displacement_qfi(&st, &dd).unwrap();
            assert_relative_eq!(qfi, 8.0 * kappa / (h_sql * h_sql), max_relative = 1e-13);
        }
    }

    #[test]
    fn two_photon_map_rows() {
        let s = two_photon_basis_map(1).unwrap().matrix;
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let expected = DMatrix::from_row_slice(
            4,
            4,
            &[
                h, 0.0, h, 0.0, // x1
                0.0, h, 0.0, h, // x2
                0.0, h, 0.0, -h, // p1
                -h, 0.0, h, 0.0, // p2
            ],
        );
        assert_eq!(s, expected);
        assert_relative_eq!(&s * s.transpose(), DMatrix::identity(4, 4), epsilon = 1e-15);
        assert_relative_eq!(s.transpose() * &s, DMatrix::identity(4, 4), epsilon = 1e-15);
    }

    #[test]
    fn two_photon_map_transforms_commutators() {
        for n in 1..=3 {
            let s = two_photon_basis_map(n).unwrap();
            let sideband = sideband_commutation_matrix(n);
            let conj = &s.matrix * &sideband * s.matrix.transpose();
            assert_relative_eq!(conj, commutation_matrix(n, Sectors::XP), epsilon = 1e-15);
        }
        assert!(two_photon_basis_map(0).is_err());
    }

    #[test]
    fn ordering_permutation_is_orthogonal() {
        for d in 1..=5 {
            let p = ModeOrdering::Blocked.permutation(d);
            assert_eq!(&p * p.transpose(), DMatrix::identity(2 * d, 2 * d));
            assert_eq!(ModeOrdering::Interleaved.permutation(d), DMatrix::identity(2 * d, 2 * d));
        }
        let p = ModeOrdering::Blocked.permutation(2);
        let v = DVector::from_vec(vec![10.0, 20.0, 11.0, 21.0]);
        assert_eq!(&p * v, DVector::from_vec(vec![10.0, 11.0, 20.0, 21.0]));
    }

    #[test]
    fn state_validation() {
        assert!(GaussianState::new(1, Sectors::X, DVector::zeros(3), DMatrix::identity(3, 3)).is_err());
        let asym = DMatrix::from_row_slice(2, 2, &[1.0, 0.1, 0.0, 1.0]);
        assert!(matches!(
            GaussianState::new(1, Sectors::X, DVector::zeros(2), asym),
            Err(Error::InvalidState(_))
        ));
        let indefinite = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 1.0]);
        assert!(GaussianState::new(1, Sectors::X, DVector::zeros(2), indefinite).is_err());
    }
}
