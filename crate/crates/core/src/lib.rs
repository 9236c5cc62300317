//! Quantum and classical Cramér–Rao limits for multicarrier optomechanical
//! sensors.
//!
//! The crate is organised bottom-up:
//!
//! - [`gaussian`]: Gaussian states over two-photon quadratures, symplectic
//!   channels, loss, homodyne marginals and Fisher information.
//! - [`sensor`]: coupling constants, the input-output model and the
//!   squeezed-vacuum input covariance.
//! - [`bounds`]: closed-form bounds for the lossy, squeezed, multicarrier
//!   sensor and their special cases.
//! - [`optimizer`]: the abstract bound form, its single-carrier optima and
//!   the dominance checks.
//! - [`oracle`]: brute-force Gaussian-state evaluation of the same bounds,
//!   used to cross-check every closed form.
//!
//! All bound values are variances in units of h². Helpers that work in
//! "SQL units" divide by the common prefactor `h_sql² / 8`.

pub mod bounds;
pub mod error;
pub mod gaussian;
mod linalg;
pub mod optimizer;
pub mod oracle;
pub mod sensor;

pub use error::{Error, Result};
pub use sensor::Squeezing;

/// Common prefactor `h_sql² / 8` shared by every bound.
pub fn sql_prefactor(h_sql: f64) -> f64 {
    h_sql * h_sql / 8.0
}
