//! Exponential integral Ei on the negative real axis, plus the scaled
//! companion e^t E1(t) that stays finite where e^t alone would overflow.

use super::SpecialError;

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
const MAX_ITER: usize = 500;

/// e^t E1(t) for t > 0.
///
/// For t <= 1 the classical series for E1 is used and then scaled; for
/// larger t the Lentz continued fraction yields the scaled value directly,
/// so no overflow occurs for any positive t.
pub fn e1_scaled(t: f64) -> Result<f64, SpecialError> {
    if !(t > 0.0) {
        return Err(SpecialError::Domain("e1_scaled: requires t > 0"));
    }
    if t <= 1.0 {
        // E1(t) = -gamma - ln t + sum_{k>=1} (-1)^{k+1} t^k / (k k!)
        let mut sum = 0.0;
        let mut term = 1.0;
        for k in 1..=MAX_ITER {
            term *= -t / k as f64;
            let contrib = -term / k as f64;
            sum += contrib;
            if contrib.abs() < 1e-17 * sum.abs().max(1e-300) {
                return Ok(t.exp() * (-EULER_GAMMA - t.ln() + sum));
            }
        }
        Err(SpecialError::NonConvergence("e1_scaled series"))
    } else {
        // e^t E1(t) = 1/(t + 1/(1 + 1/(t + 2/(1 + 2/(t + ...)))))
        let tiny = 1e-300;
        let mut f = t;
        let mut c = t;
        let mut d = 0.0;
        for n in 1..=MAX_ITER {
            let an = n as f64;
            // pair of CF stages: denominator 1 with numerator n, then t with numerator n
            for b in [1.0, t] {
                d = b + an * d;
                if d == 0.0 {
                    d = tiny;
                }
                c = b + an / c;
                if c == 0.0 {
                    c = tiny;
                }
                d = 1.0 / d;
                f *= c * d;
            }
            if ((c * d) - 1.0).abs() < 1e-16 {
                return Ok(1.0 / f);
            }
        }
        Err(SpecialError::NonConvergence("e1_scaled cf"))
    }
}

/// Exponential integral Ei(x) for x < 0, via Ei(-t) = -E1(t).
pub fn exp_integral_ei(x: f64) -> Result<f64, SpecialError> {
    if !(x < 0.0) {
        return Err(SpecialError::Domain("exp_integral_ei: requires x < 0"));
    }
    let t = -x;
    Ok(-(e1_scaled(t)? * (-t).exp()))
}
