//! Generalized hypergeometric series 1F2, the backbone of the pole
//! expansions that replace a general Meijer-G evaluator in this crate.

use super::{EvalAccuracy, SpecialError};

/// Series terms stop being trusted past this argument by default; callers
/// fall back to quadrature instead.
pub const DEFAULT_Z_GUARD: f64 = 100.0;

const MAX_TERMS: usize = 10_000;

/// 1F2(a; b1, b2; z) = sum_j (a)_j / ((b1)_j (b2)_j) z^j / j!,
/// summed until the running tail drops below `acc.rel_tol`.
///
/// `z` may be negative (the capacity expansion uses -z); the guard applies
/// to |z|. Lower parameters at nonpositive integers are rejected, and a
/// non-convergence signal is returned if the terms fail to decay within
/// 10^4 terms so the caller can fall back to quadrature.
pub fn hyp_1f2(a: f64, b1: f64, b2: f64, z: f64, acc: &EvalAccuracy) -> Result<f64, SpecialError> {
    hyp_1f2_guarded(a, b1, b2, z, acc, DEFAULT_Z_GUARD)
}

/// [`hyp_1f2`] with an explicit series-divergence guard on |z|.
pub fn hyp_1f2_guarded(
    a: f64,
    b1: f64,
    b2: f64,
    z: f64,
    acc: &EvalAccuracy,
    z_guard: f64,
) -> Result<f64, SpecialError> {
    hyp_1f2_with_peak(a, b1, b2, z, acc, z_guard).map(|(sum, _)| sum)
}

/// Largest intermediate term magnitude relative to the final sum; used by
/// callers to detect catastrophic cancellation between paired expansions.
pub(crate) fn hyp_1f2_with_peak(
    a: f64,
    b1: f64,
    b2: f64,
    z: f64,
    acc: &EvalAccuracy,
    z_guard: f64,
) -> Result<(f64, f64), SpecialError> {
    for b in [b1, b2] {
        if b <= 0.0 && b == b.floor() {
            return Err(SpecialError::Domain("hyp_1f2: lower parameter at nonpositive integer"));
        }
    }
    if z.abs() > z_guard {
        return Err(SpecialError::NonConvergence("hyp_1f2: |z| beyond series guard"));
    }
    let mut term = 1.0f64;
    let mut sum = 1.0f64;
    let mut peak = 1.0f64;
    for j in 0..MAX_TERMS {
        let jf = j as f64;
        term *= (a + jf) / ((b1 + jf) * (b2 + jf)) * z / (jf + 1.0);
        sum += term;
        peak = peak.max(term.abs());
        if !term.is_finite() {
            return Err(SpecialError::NonConvergence("hyp_1f2: term overflow"));
        }
        if term.abs() <= acc.rel_tol * sum.abs().max(acc.abs_tol) && jf + 1.0 > a.abs() {
            return Ok((sum, peak));
        }
    }
    Err(SpecialError::NonConvergence("hyp_1f2: no decay within term budget"))
}
