//! Brute-force Fisher information from the full Gaussian state.
//!
//! These routines propagate the input covariance through the symplectic
//! representation of the interferometer, apply loss, and evaluate the
//! quantum or homodyne Fisher information numerically. They share no algebra
//! with [`crate::bounds`] and serve as its cross-check.

use nalgebra::{Complex, DMatrix};

use crate::gaussian::{
    apply_channel, apply_loss, displacement_from_signal, displacement_qfi, gaussian_cfi,
    homodyne_rotate, marginalize, symplectic_from_complex, GaussianState, Sectors,
};
use crate::sensor::{build_model, input_covariance, CouplingSet, Squeezing};
use crate::{Error, Result};

fn check_lengths(couplings: &CouplingSet, squeezings: &[Squeezing]) -> Result<()> {
    if squeezings.len() != couplings.carriers() {
        return Err(Error::Dimension(format!(
            "{} squeezings for {} carriers",
            squeezings.len(),
            couplings.carriers()
        )));
    }
    Ok(())
}

/// Injected state on both quadrature sectors: the squeezed covariance is
/// repeated on the `p` sector.
pub fn input_state(squeezings: &[Squeezing]) -> Result<GaussianState> {
    let x = input_covariance(squeezings);
    let n = x.nrows();
    let mut cov = DMatrix::zeros(2 * n, 2 * n);
    cov.view_mut((0, 0), (n, n)).copy_from(&x);
    cov.view_mut((n, n), (n, n)).copy_from(&x);
    GaussianState::new(squeezings.len(), Sectors::XP, nalgebra::DVector::zeros(2 * n), cov)
}

/// Detected state for signal `h`, after the interferometer and loss.
pub fn output_state(
    couplings: &CouplingSet,
    squeezings: &[Squeezing],
    eta: f64,
    h: Complex<f64>,
) -> Result<GaussianState> {
    check_lengths(couplings, squeezings)?;
    let model = build_model(couplings);
    let map = symplectic_from_complex(&model.m)?.with_shift(displacement_from_signal(h, &model.v))?;
    let state = apply_channel(&input_state(squeezings)?, &map)?;
    apply_loss(&state, eta)
}

/// Undoes the carrier phases `e^{iβⱼ}` on the detected modes, so that
/// homodyne angles refer to each carrier's own phase.
fn compensate_phases(state: &GaussianState, couplings: &CouplingSet) -> Result<GaussianState> {
    let n = 2 * couplings.carriers();
    let inverse = DMatrix::from_fn(n, n, |r, c| {
        if r == c {
            Complex::from_polar(1.0, -couplings.betas[r / 2])
        } else {
            Complex::new(0.0, 0.0)
        }
    });
    apply_channel(state, &symplectic_from_complex(&inverse)?)
}

/// Quantum Fisher information for the magnitude of `h = |h| e^{i·signal_phase}`.
pub fn qfi_full_state(
    couplings: &CouplingSet,
    squeezings: &[Squeezing],
    eta: f64,
    signal_phase: f64,
) -> Result<f64> {
    let unit = Complex::from_polar(1.0, signal_phase);
    let with = output_state(couplings, squeezings, eta, unit)?;
    let without = output_state(couplings, squeezings, eta, Complex::new(0.0, 0.0))?;
    let dd = with.mean() - without.mean();
    displacement_qfi(&without, &dd)
}

/// Classical Fisher information of homodyne detection of
/// `sin θⱼ x1⁽ʲ⁾ + cos θⱼ x2⁽ʲ⁾` on every carrier.
pub fn homodyne_cfi(
    couplings: &CouplingSet,
    squeezings: &[Squeezing],
    thetas: &[f64],
    eta: f64,
) -> Result<f64> {
    let measured: Vec<usize> = (0..couplings.carriers())
        .map(|i| GaussianState::x_index(i, true))
        .collect();
    let detect = |h: Complex<f64>| -> Result<GaussianState> {
        let state = output_state(couplings, squeezings, eta, h)?;
        homodyne_rotate(&compensate_phases(&state, couplings)?, thetas)
    };
    let (w1, _) = marginalize(&detect(Complex::new(1.0, 0.0))?, &measured)?;
    let (w0, sigma) = marginalize(&detect(Complex::new(0.0, 0.0))?, &measured)?;
    let dsigma = DMatrix::zeros(sigma.nrows(), sigma.ncols());
    gaussian_cfi(&(w1 - w0), &sigma, &dsigma)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sensor::ResponseSign;
    use approx::assert_relative_eq;

    #[test]
    fn single_carrier_lossless_qfi() {
        let cs = CouplingSet::new(vec![2.5], 1.0).unwrap();
        let qfi = qfi_full_state(&cs, &[Squeezing::VACUUM], 1.0, 0.0).unwrap();
        assert_relative_eq!(qfi, 8.0 * 2.5, max_relative = 1e-12);
    }

    #[test]
    fn loss_scales_unsqueezed_qfi() {
        let cs = CouplingSet::new(vec![1.0], 1.0).unwrap();
        let qfi = qfi_full_state(&cs, &[Squeezing::VACUUM], 0.95, 0.0).unwrap();
        assert_relative_eq!(1.0 / qfi, (1.0 / 0.95 + 0.05) / 8.0, max_relative = 1e-12);
    }

    #[test]
    fn signal_quadrature_cfi() {
        let cs = CouplingSet::new(vec![0.5, 1.5], 1.0).unwrap();
        let cfi = homodyne_cfi(&cs, &[Squeezing::VACUUM; 2], &[0.0, 0.0], 1.0).unwrap();
        assert_relative_eq!(1.0 / cfi, (1.0 / 2.0 + 2.0) / 8.0, max_relative = 1e-12);
    }

    #[test]
    fn signal_phase_is_irrelevant() {
        let cs = CouplingSet::new(vec![0.7, 1.3], 1.0).unwrap();
        let sq = [Squeezing::new(0.6, 0.4), Squeezing::new(1.0, -0.3)];
        let a = qfi_full_state(&cs, &sq, 0.8, 0.0).unwrap();
        let b = qfi_full_state(&cs, &sq, 0.8, 1.1).unwrap();
        assert_relative_eq!(a, b, max_relative = 1e-10);
    }

    #[test]
    fn carrier_phases_are_irrelevant() {
        let sq = [Squeezing::new(0.6, 0.4), Squeezing::new(1.0, -0.3)];
        let flat = CouplingSet::new(vec![0.7, 1.3], 1.0).unwrap();
        let phased =
            CouplingSet::with_phases(vec![0.7, 1.3], 1.0, vec![0.9, -2.1], ResponseSign::Positive)
                .unwrap();
        assert_relative_eq!(
            qfi_full_state(&flat, &sq, 0.8, 0.0).unwrap(),
            qfi_full_state(&phased, &sq, 0.8, 0.0).unwrap(),
            max_relative = 1e-10
        );
        let th = [0.3, 1.0];
        assert_relative_eq!(
            homodyne_cfi(&flat, &sq, &th, 0.8).unwrap(),
            homodyne_cfi(&phased, &sq, &th, 0.8).unwrap(),
            max_relative = 1e-10
        );
    }

    #[test]
    fn mismatched_squeezings() {
        let cs = CouplingSet::new(vec![1.0, 1.0], 1.0).unwrap();
        assert!(matches!(
            qfi_full_state(&cs, &[Squeezing::VACUUM], 1.0, 0.0),
            Err(Error::Dimension(_))
        ));
    }
}
