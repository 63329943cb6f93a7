//! Scalar special-function kernel.
//!
//! Every analytic expression in the crate bottoms out here: gamma-family
//! functions, the modified Bessel function of the second kind for real
//! order, the regularized lower incomplete gamma, the exponential integral,
//! the complementary error function, the order-1/2 Marcum Q, and the 1F2
//! hypergeometric series. All functions are pure scalar maps; vectorization
//! is a caller concern.

mod bessel;
mod erf;
mod expint;
mod gamma;
mod hyp;

pub use bessel::{bessel_k, ln_bessel_k};
pub use erf::{erfc, marcum_q_half};
pub use expint::{e1_scaled, exp_integral_ei};
pub use gamma::{digamma, gamma_fn, ln_gamma, reg_lower_inc_gamma};
pub(crate) use gamma::gamma_signed;
pub use hyp::{hyp_1f2, hyp_1f2_guarded};
pub(crate) use hyp::hyp_1f2_with_peak;

use thiserror::Error;

/// Accuracy request for iterative evaluations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalAccuracy {
    /// Relative tolerance, > 0.
    pub rel_tol: f64,
    /// Absolute floor, >= 0.
    pub abs_tol: f64,
}

impl Default for EvalAccuracy {
    fn default() -> Self {
        EvalAccuracy {
            rel_tol: 1e-10,
            abs_tol: 1e-300,
        }
    }
}

impl EvalAccuracy {
    pub fn new(rel_tol: f64, abs_tol: f64) -> Self {
        assert!(rel_tol > 0.0 && abs_tol >= 0.0);
        EvalAccuracy { rel_tol, abs_tol }
    }
}

/// Errors from special-function evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum SpecialError {
    /// Argument outside the supported domain.
    #[error("domain error in {0}")]
    Domain(&'static str),
    /// Result exceeds the representable range. Callers that can work in
    /// the log domain should use the ln_* companions instead.
    #[error("overflow in {0}")]
    Overflow(&'static str),
    /// A series or continued fraction failed to converge within its
    /// iteration budget.
    #[error("no convergence in {0}")]
    NonConvergence(&'static str),
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn accuracy_defaults() {
        let acc = EvalAccuracy::default();
        assert_eq!(acc.rel_tol, 1e-10);
        assert_eq!(acc.abs_tol, 1e-300);
    }

    #[test]
    #[should_panic]
    fn accuracy_rejects_nonpositive_rel() {
        EvalAccuracy::new(0.0, 1e-10);
    }
}
