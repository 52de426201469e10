//! Centralized tolerance constants for invariant checks.
//!
//! Every structural check in the crate (Hermitian symmetry, real diagonals,
//! imaginary residuals of quadratic forms) goes through one shared record so
//! that tests and runtime validation cannot drift apart.

/// Absolute floor used when a relative tolerance would underflow on
/// all-zero data.
pub const DEFAULT_ABS_TOL: f64 = 1e-12;

/// Relative tolerance for checks scaled by the magnitude of the data.
pub const DEFAULT_REL_TOL: f64 = 1e-10;

/// Relative bound on the imaginary residual of a Hermitian quadratic form,
/// scaled by `‖L‖_∞ · ‖x‖₂²`.
pub const QUADRATIC_FORM_IMAG_REL_TOL: f64 = 1e-10;

/// Tolerance record threaded through invariant checks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Absolute tolerance.
    pub abs: f64,
    /// Relative tolerance (multiplied by a problem-dependent scale).
    pub rel: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            abs: DEFAULT_ABS_TOL,
            rel: DEFAULT_REL_TOL,
        }
    }
}

impl Tolerances {
    /// Bound for a quantity whose natural scale is `scale`:
    /// `max(abs, rel * scale)`.
    pub fn bound(&self, scale: f64) -> f64 {
        self.abs.max(self.rel * scale)
    }
}
