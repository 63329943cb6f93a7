//! Link-level metrics: outage probability, average BER and average channel
//! capacity, each as a closed form with a quadrature twin, plus high-SNR
//! asymptotes, Jensen upper bounds, and a diversity-order estimator.
//!
//! Closed forms for the squared-K_G model go through pole expansions of the
//! corresponding Bessel-kernel transforms; whenever an expansion is
//! inapplicable (near-integer shaping differences, large arguments) or
//! cancellation-dominated, evaluation falls back to the quadrature path and
//! the result is tagged accordingly.

pub mod curves;

pub use curves::{MetricCurve, Method, ModelTag};

use crate::channelmodels::{
    is_near_integer, RisDhModel, RisTModel, SnrDistribution, CANCELLATION_LIMIT, INTEGER_GAP,
};
use crate::quadrature::{integrate_semi_infinite, QuadError};
use crate::special::{
    digamma, e1_scaled, gamma_fn, gamma_signed, hyp_1f2_with_peak, ln_gamma, EvalAccuracy,
    SpecialError,
};
use thiserror::Error;

#[derive(Debug, Clone, Error)]
pub enum MetricsError {
    #[error(transparent)]
    Quad(#[from] QuadError),
    #[error(transparent)]
    Special(#[from] SpecialError),
    #[error("diversity window holds {points} grid points, need at least 3")]
    DegenerateWindow { points: usize },
    #[error("diversity estimation requires strictly positive curve values")]
    NonPositiveValues,
}

/// Parameters (p, q) of the unified binary-modulation BER integral.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModulationParams {
    pub p: f64,
    pub q: f64,
}

impl ModulationParams {
    /// Differential phase shift keying: (p, q) = (1, 1).
    pub fn dpsk() -> Self {
        ModulationParams { p: 1.0, q: 1.0 }
    }

    pub fn custom(p: f64, q: f64) -> Self {
        assert!(p > 0.0 && q > 0.0, "modulation parameters must be positive");
        ModulationParams { p, q }
    }
}

/// A value together with the evaluation route that produced it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TaggedValue {
    pub value: f64,
    pub method: Method,
}

// ---------------------------------------------------------------------------
// Outage
// ---------------------------------------------------------------------------

/// P(SNR <= gamma_th) for the dual-hop model.
pub fn outage_dh(model: &RisDhModel, gamma_th: f64) -> f64 {
    assert!(gamma_th > 0.0);
    model.cdf(gamma_th)
}

/// P(SNR <= gamma_th) for the transmit-side model.
pub fn outage_t(model: &RisTModel, gamma_th: f64) -> f64 {
    assert!(gamma_th > 0.0);
    model.cdf(gamma_th)
}

/// High-SNR outage bound gamma_th^N / ((B gbar)^N N!). Upper-bounds the
/// exact outage everywhere and becomes tight as gbar grows; its log-log
/// slope in gbar is exactly -N.
pub fn outage_t_asymptotic(model: &RisTModel, gamma_th: f64) -> f64 {
    assert!(gamma_th > 0.0);
    let n = model.n_elems() as f64;
    let ln_v = n * (gamma_th / model.scale()).ln()
        - ln_gamma(n + 1.0).expect("N >= 1");
    ln_v.exp()
}

// ---------------------------------------------------------------------------
// BER
// ---------------------------------------------------------------------------

fn ber_quad_acc() -> EvalAccuracy {
    EvalAccuracy {
        rel_tol: 1e-8,
        abs_tol: 1e-280,
    }
}

/// Unified average BER from the CDF:
/// (q^p / (2 Gamma(p))) int_0^inf e^{-q gamma} gamma^{p-1} F(gamma) dgamma.
pub fn ber_unified_quadrature<F: Fn(f64) -> f64>(
    cdf: F,
    modulation: &ModulationParams,
) -> Result<f64, MetricsError> {
    let (p, q) = (modulation.p, modulation.q);
    let integrand = move |g: f64| {
        if g <= 0.0 {
            return 0.0;
        }
        let ln_w = -q * g + (p - 1.0) * g.ln();
        let f = cdf(g);
        if f == 0.0 {
            0.0
        } else {
            ln_w.exp() * f
        }
    };
    let integral = integrate_semi_infinite(integrand, 0.0, &ber_quad_acc())?;
    let pref = (p * q.ln() - std::f64::consts::LN_2 - ln_gamma(p)?).exp();
    Ok((pref * integral.value).clamp(0.0, 0.5))
}

/// Arguments larger than this never enter the BER pole expansion.
const BER_SERIES_Z_GUARD: f64 = 40.0;

/// 2F2 series with running peak magnitude, same contract as the 1F2
/// helper in `special`.
fn hyp_2f2_with_peak(
    a1: f64,
    a2: f64,
    b1: f64,
    b2: f64,
    z: f64,
    rel_tol: f64,
) -> Option<(f64, f64)> {
    for b in [b1, b2] {
        if b <= 0.0 && b == b.floor() {
            return None;
        }
    }
    let mut term = 1.0f64;
    let mut sum = 1.0f64;
    let mut peak = 1.0f64;
    for j in 0..10_000 {
        let jf = j as f64;
        term *= (a1 + jf) * (a2 + jf) / ((b1 + jf) * (b2 + jf)) * z / (jf + 1.0);
        sum += term;
        peak = peak.max(term.abs());
        if !term.is_finite() {
            return None;
        }
        if term.abs() <= rel_tol * sum.abs().max(1e-300) && jf > a1.abs().max(a2.abs()) {
            return Some((sum, peak));
        }
    }
    None
}

/// Average BER of a squared-K_G channel through the pole expansion of its
/// Laplace-weighted CDF transform, argument z = Xi~^2 / q:
///
///   Pe = [ G(m-k) G(p+k)/k z^k 2F2(p+k, k; k-m+1, k+1; z) + (k <-> m) ]
///        / (2 G(p) G(k) G(m)).
///
/// None when inapplicable or cancellation-dominated.
pub(crate) fn kg_ber_series(k: f64, m: f64, p: f64, z: f64) -> Option<f64> {
    if z <= 0.0 {
        return Some(0.0);
    }
    if is_near_integer(k - m, INTEGER_GAP) || z > BER_SERIES_Z_GUARD {
        return None;
    }
    let gamma_mk = gamma_signed(m - k).ok()?;
    let gamma_km = gamma_signed(k - m).ok()?;
    let (f1, p1) = hyp_2f2_with_peak(p + k, k, k - m + 1.0, k + 1.0, z, 1e-13)?;
    let (f2, p2) = hyp_2f2_with_peak(p + m, m, m - k + 1.0, m + 1.0, z, 1e-13)?;
    let c1 = gamma_mk * gamma_fn(p + k).ok()? / k * z.powf(k);
    let c2 = gamma_km * gamma_fn(p + m).ok()? / m * z.powf(m);
    let sum = c1 * f1 + c2 * f2;
    let scale = (c1.abs() * p1).max(c2.abs() * p2);
    if !sum.is_finite() || sum.abs() * CANCELLATION_LIMIT < scale {
        return None;
    }
    let denom = (std::f64::consts::LN_2 + ln_gamma(p).ok()? + ln_gamma(k).ok()? + ln_gamma(m).ok()?)
        .exp();
    Some((sum / denom).clamp(0.0, 0.5))
}

/// Closed-form average BER of the dual-hop model. Falls back to
/// [`ber_unified_quadrature`] over the model CDF when the expansion does
/// not apply, tagging the result.
pub fn ber_dh_closed(
    model: &RisDhModel,
    modulation: &ModulationParams,
) -> Result<TaggedValue, MetricsError> {
    let fit = model.fit();
    let z = model.xi_tilde_sq() / modulation.q;
    if let Some(value) = kg_ber_series(fit.k_w, fit.m_w, modulation.p, z) {
        return Ok(TaggedValue {
            value,
            method: Method::ClosedForm,
        });
    }
    let value = ber_unified_quadrature(|g| model.cdf(g), modulation)?;
    Ok(TaggedValue {
        value,
        method: Method::Quadrature,
    })
}

/// Closed-form average BER of the transmit-side Gamma model.
///
/// The textbook form 1/2 - (q^p/(2 Gamma(p))) sum_k ... loses all digits at
/// high SNR where the sum approaches 1/2; for r = 1/(1 + q B gbar) <= 1/2
/// the algebraically identical positive tail series
///   Pe = (1/2) (1-r)^p sum_{j>=N} [(p)_j / j!] r^j
/// is used instead.
pub fn ber_t_closed(model: &RisTModel, modulation: &ModulationParams) -> f64 {
    let (p, q) = (modulation.p, modulation.q);
    let n = model.n_elems();
    let beta = model.scale();
    let r = 1.0 / (1.0 + q * beta);
    if r <= 0.5 {
        let nf = n as f64;
        let ln_t0 = ln_gamma(p + nf).expect("p + N > 0") - ln_gamma(p).expect("p > 0")
            - ln_gamma(nf + 1.0).expect("N >= 1")
            + nf * r.ln();
        let mut term = ln_t0.exp();
        let mut sum = 0.0;
        let mut j = nf;
        loop {
            sum += term;
            term *= (p + j) / (j + 1.0) * r;
            j += 1.0;
            if term < 1e-17 * sum.max(1e-300) || j > nf + 10_000.0 {
                break;
            }
        }
        (0.5 * (1.0 - r).powf(p) * sum).clamp(0.0, 0.5)
    } else {
        let mut sum = 0.0;
        for k in 0..n {
            let kf = k as f64;
            let ln_term = p * q.ln() - ln_gamma(p).expect("p > 0")
                + ln_gamma(p + kf).expect("p + k > 0")
                - ln_gamma(kf + 1.0).expect("k >= 0")
                - kf * beta.ln()
                - (p + kf) * (q + 1.0 / beta).ln();
            sum += ln_term.exp();
        }
        (0.5 - 0.5 * sum).clamp(0.0, 0.5)
    }
}

/// High-SNR BER asymptote Gamma(p+N) / (2 Gamma(p) (B q gbar)^N N!).
pub fn ber_t_asymptotic(model: &RisTModel, modulation: &ModulationParams) -> f64 {
    let (p, q) = (modulation.p, modulation.q);
    let n = model.n_elems() as f64;
    (ln_gamma(p + n).expect("p + N > 0")
        - ln_gamma(p).expect("p > 0")
        - std::f64::consts::LN_2
        - n * (model.b_const() * q * model.avg_snr()).ln()
        - ln_gamma(n + 1.0).expect("N >= 1"))
    .exp()
}

// ---------------------------------------------------------------------------
// Capacity
// ---------------------------------------------------------------------------

fn capacity_quad_acc() -> EvalAccuracy {
    EvalAccuracy {
        rel_tol: 1e-8,
        abs_tol: 1e-280,
    }
}

/// Average capacity from the complementary CDF:
/// (1/ln 2) int_0^inf ccdf(gamma) / (1 + gamma) dgamma.
pub fn capacity_from_ccdf<F: Fn(f64) -> f64>(ccdf: F) -> Result<f64, MetricsError> {
    let integral = integrate_semi_infinite(
        move |g| {
            let c = ccdf(g);
            if c <= 0.0 {
                0.0
            } else {
                c / (1.0 + g)
            }
        },
        0.0,
        &capacity_quad_acc(),
    )?;
    Ok((integral.value / std::f64::consts::LN_2).max(0.0))
}

/// Arguments larger than this never enter the capacity pole expansion.
const CAP_SERIES_Z_GUARD: f64 = 30.0;

/// Average capacity of a squared-K_G channel with z = Xi~^2, through the
/// double-pole expansion of its log-kernel transform:
///
///   C ln2 G(k)G(m) = G(k)G(m)(psi(k) + psi(m) - ln z)
///     + sum_{l>=1} ((-1)^{l+1}/l) G(k-l) G(m-l) z^l
///     + pi/(k sin(pi k)) G(m-k) z^k 1F2(k; k+1, k-m+1; -z)
///     + pi/(m sin(pi m)) G(k-m) z^m 1F2(m; m+1, m-k+1; -z),
///
/// valid when k, m and k - m are all away from integers. None otherwise.
pub(crate) fn kg_capacity_series(k: f64, m: f64, z: f64) -> Option<f64> {
    if z <= 0.0 {
        return None;
    }
    if is_near_integer(k - m, INTEGER_GAP)
        || is_near_integer(k, INTEGER_GAP)
        || is_near_integer(m, INTEGER_GAP)
        || z > CAP_SERIES_Z_GUARD
    {
        return None;
    }
    let acc = EvalAccuracy {
        rel_tol: 1e-13,
        abs_tol: 1e-300,
    };
    let gk = gamma_fn(k).ok()?;
    let gm = gamma_fn(m).ok()?;
    let head = gk * gm * (digamma(k).ok()? + digamma(m).ok()? - z.ln());
    let mut scale = head.abs();

    // sum over the simple poles that the double ones collapse into
    let mut tail = 0.0;
    let mut g_kl = gk; // Gamma(k - l), updated by division
    let mut g_ml = gm;
    let mut zl = 1.0;
    for l in 1..300 {
        let lf = l as f64;
        g_kl /= k - lf;
        g_ml /= m - lf;
        zl *= z;
        let term = if l % 2 == 1 { 1.0 } else { -1.0 } / lf * g_kl * g_ml * zl;
        tail += term;
        scale = scale.max(term.abs());
        if term.abs() < 1e-15 * (head.abs() + tail.abs()).max(1e-300) && lf > k + m {
            break;
        }
    }

    let pi = std::f64::consts::PI;
    let (f1, p1) = hyp_1f2_with_peak(k, k + 1.0, k - m + 1.0, -z, &acc, CAP_SERIES_Z_GUARD).ok()?;
    let (f2, p2) = hyp_1f2_with_peak(m, m + 1.0, m - k + 1.0, -z, &acc, CAP_SERIES_Z_GUARD).ok()?;
    let c1 = pi / (k * (pi * k).sin()) * gamma_signed(m - k).ok()? * z.powf(k);
    let c2 = pi / (m * (pi * m).sin()) * gamma_signed(k - m).ok()? * z.powf(m);
    scale = scale.max(c1.abs() * p1).max(c2.abs() * p2);

    let total = head + tail + c1 * f1 + c2 * f2;
    if !total.is_finite() || total.abs() * CANCELLATION_LIMIT < scale {
        return None;
    }
    Some((total / (gk * gm * std::f64::consts::LN_2)).max(0.0))
}

/// Closed-form average capacity of the dual-hop model; quadrature-tagged
/// fallback where the four-pole expansion does not apply (which includes
/// every fit with coincident shaping parameters).
pub fn capacity_dh_closed(model: &RisDhModel) -> Result<TaggedValue, MetricsError> {
    let fit = model.fit();
    if let Some(value) = kg_capacity_series(fit.k_w, fit.m_w, model.xi_tilde_sq()) {
        return Ok(TaggedValue {
            value,
            method: Method::ClosedForm,
        });
    }
    let value = capacity_from_ccdf(|g| model.ccdf(g))?;
    Ok(TaggedValue {
        value,
        method: Method::Quadrature,
    })
}

/// Jensen bound log2(1 + Omega_w gbar).
pub fn capacity_dh_upper(model: &RisDhModel) -> f64 {
    (1.0 + model.mean_snr()).log2()
}

/// High-SNR capacity asymptote of the dual-hop scheme,
/// log2(gbar) + 2 log2(e) psi(N): the degenerate-channel slope-1 line.
pub fn capacity_dh_asymptotic(model: &RisDhModel) -> f64 {
    model.avg_snr().log2()
        + 2.0 * std::f64::consts::E.log2() * digamma(model.n_elems() as f64).expect("N >= 1")
}

/// Closed-form average capacity of the transmit-side Gamma model:
///
///   C = (1/ln2) sum_{k=0}^{N-1} [ S_k + (-1)^k e^{1/beta} E1(1/beta) ]
///       / (beta^k k!),   S_k = sum_{m=1}^{k} (m-1)! (-1)^{k-m} beta^m,
///
/// with beta = B gbar. Each term is evaluated in combined log form so that
/// large N and large beta do not overflow; the scaled exponential integral
/// keeps the small-beta side finite as well.
pub fn capacity_t_closed(model: &RisTModel) -> f64 {
    let n = model.n_elems();
    let beta = model.scale();
    let ln_beta = beta.ln();
    let e1s = e1_scaled(1.0 / beta).expect("1/beta > 0");
    // ln (m-1)! and ln k! tables
    let mut ln_fact = Vec::with_capacity(n as usize + 1);
    ln_fact.push(0.0f64);
    for i in 1..=n as usize {
        ln_fact.push(ln_fact[i - 1] + (i as f64).ln());
    }
    let mut total = 0.0;
    for k in 0..n as usize {
        let mut poly = 0.0;
        for m in 1..=k {
            let mag = (ln_fact[m - 1] - ln_fact[k] + (m as f64 - k as f64) * ln_beta).exp();
            poly += if (k - m) % 2 == 0 { mag } else { -mag };
        }
        let ei_mag = (-ln_fact[k] - k as f64 * ln_beta).exp() * e1s;
        total += poly + if k % 2 == 0 { ei_mag } else { -ei_mag };
    }
    (total / std::f64::consts::LN_2).max(0.0)
}

/// Jensen bound log2(1 + B N gbar); E[SNR] = N B gbar for the Gamma model.
pub fn capacity_t_upper(model: &RisTModel) -> f64 {
    (1.0 + model.mean_snr()).log2()
}

/// High-SNR form of the mean-SNR capacity: log2(gbar) + log2(B N).
pub fn capacity_t_asymptotic(model: &RisTModel) -> f64 {
    model.avg_snr().log2() + (model.b_const() * model.n_elems() as f64).log2()
}

// ---------------------------------------------------------------------------
// Diversity order
// ---------------------------------------------------------------------------

/// Least-squares slope of -log10(value) against log10(linear SNR) over the
/// grid points falling inside `window_db`. This is the standard
/// operationalization of the diversity order of an outage or BER curve.
pub fn diversity_order_estimate(
    curve: &MetricCurve,
    window_db: (f64, f64),
) -> Result<f64, MetricsError> {
    let (lo, hi) = window_db;
    let pts: Vec<(f64, f64)> = curve
        .snr_grid_db
        .iter()
        .zip(&curve.values)
        .filter(|(db, _)| **db >= lo - 1e-9 && **db <= hi + 1e-9)
        .map(|(db, v)| (*db, *v))
        .collect();
    if pts.len() < 3 {
        return Err(MetricsError::DegenerateWindow { points: pts.len() });
    }
    if pts.iter().any(|(_, v)| !(*v > 0.0)) {
        return Err(MetricsError::NonPositiveValues);
    }
    // log10(linear snr) = db / 10
    let xs: Vec<f64> = pts.iter().map(|(db, _)| db / 10.0).collect();
    let ys: Vec<f64> = pts.iter().map(|(_, v)| -v.log10()).collect();
    let n = xs.len() as f64;
    let xm = xs.iter().sum::<f64>() / n;
    let ym = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - xm) * (y - ym)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - xm) * (x - xm)).sum();
    Ok(sxy / sxx)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channelmodels::{KeyholeModel, SnrDistribution};
    use crate::momentmatch::SaaFit;

    fn rel(a: f64, b: f64) -> f64 {
        if b == 0.0 {
            a.abs()
        } else {
            ((a - b) / b).abs()
        }
    }

    fn synthetic_dh(avg_snr: f64) -> RisDhModel {
        RisDhModel::from_fit(
            2,
            avg_snr,
            SaaFit {
                k_w: 2.3,
                m_w: 1.4,
                omega_w: 2.0,
                discriminant: 0.1,
                fallback_used: false,
            },
        )
    }

    // ---------------- outage ----------------

    #[test]
    fn outage_t_known_point() {
        // N=1, B=1, gbar = gamma_th: 1 - e^-1
        let model = RisTModel::new(1, 5.0);
        assert!(rel(outage_t(&model, 5.0), 1.0 - (-1f64).exp()) < 1e-12);
    }

    #[test]
    fn outage_dh_vanishes_at_high_snr_and_is_monotone() {
        let mut prev = 1.0;
        for db in [0, 10, 20, 30, 40, 50] {
            let model = RisDhModel::new(2, crate::db_to_lin(db as f64)).unwrap();
            let p = outage_dh(&model, 100.0);
            assert!(p <= prev + 1e-12, "{db} dB");
            prev = p;
        }
        assert!(prev < 1e-3);
    }

    #[test]
    fn outage_dh_n1_quadrature_oracle() {
        // N=1, gbar=1, gamma_th=1: int_0^1 2 K_0(2 sqrt g) dg, frozen from
        // a 30-digit quadrature oracle
        let model = RisDhModel::new(1, 1.0).unwrap();
        assert!(rel(outage_dh(&model, 1.0), 0.720_268_236_366_955_15) < 1e-7);
    }

    #[test]
    fn outage_t_asymptote_dominates_and_converges() {
        for n in [1u32, 2, 4] {
            for db in [10.0, 30.0, 60.0] {
                let model = RisTModel::new(n, crate::db_to_lin(db));
                let exact = outage_t(&model, 100.0);
                let asym = outage_t_asymptotic(&model, 100.0);
                assert!(asym >= exact, "N={n} {db}dB: {asym} < {exact}");
            }
            let model = RisTModel::new(n, crate::db_to_lin(60.0));
            let ratio = outage_t_asymptotic(&model, 100.0) / outage_t(&model, 100.0);
            assert!((ratio - 1.0).abs() < 0.02, "N={n}: ratio {ratio}");
        }
    }

    #[test]
    fn outage_t_asymptotic_example() {
        // N=2: (gamma_th/(B gbar))^2 / 2
        let model = RisTModel::new(2, 1e4);
        let expect = (100.0 / model.scale()).powi(2) / 2.0;
        assert!(rel(outage_t_asymptotic(&model, 100.0), expect) < 1e-12);
    }

    // ---------------- BER ----------------

    #[test]
    fn ber_quadrature_degenerate_cdfs() {
        let mod_dpsk = ModulationParams::dpsk();
        let half = ber_unified_quadrature(|_| 1.0, &mod_dpsk).unwrap();
        assert!(rel(half, 0.5) < 1e-8);
        let zero = ber_unified_quadrature(|_| 0.0, &mod_dpsk).unwrap();
        assert_eq!(zero, 0.0);
        // same for a non-trivial (p, q)
        let half = ber_unified_quadrature(|_| 1.0, &ModulationParams::custom(0.5, 2.0)).unwrap();
        assert!(rel(half, 0.5) < 1e-8);
    }

    #[test]
    fn ber_t_rayleigh_dpsk() {
        // N=1, B=1, DPSK: 1/(2(1 + gbar))
        let model = RisTModel::new(1, 10.0);
        let m = ModulationParams::dpsk();
        assert!(rel(ber_t_closed(&model, &m), 1.0 / 22.0) < 1e-14);
        let quad = ber_unified_quadrature(|g| model.cdf(g), &m).unwrap();
        assert!(rel(quad, 1.0 / 22.0) < 1e-7);
    }

    #[test]
    fn ber_t_closed_matches_quadrature() {
        let m = ModulationParams::dpsk();
        for n in [1u32, 2, 4, 8] {
            for gbar in [1.0, 10.0, 100.0, 1000.0] {
                let model = RisTModel::new(n, gbar);
                let closed = ber_t_closed(&model, &m);
                let quad = ber_unified_quadrature(|g| model.cdf(g), &m).unwrap();
                assert!(
                    rel(closed, quad) <= 1e-6,
                    "N={n} gbar={gbar}: {closed} vs {quad}"
                );
            }
        }
    }

    #[test]
    fn ber_t_branches_agree_at_crossover() {
        // r = 0.5 at q beta = 1; check continuity across the branch switch
        let m = ModulationParams::dpsk();
        let b_const = 1.0 + std::f64::consts::PI / 4.0;
        let lo = RisTModel::new(2, 0.99 / b_const); // literal branch, r > 0.5
        let hi = RisTModel::new(2, 1.01 / b_const); // tail branch, r < 0.5
        let a = ber_t_closed(&lo, &m);
        let b = ber_t_closed(&hi, &m);
        assert!(a > b, "{a} vs {b}");
        assert!((a - b) < 5e-3);
        // and both agree with quadrature right at their side of the seam
        for model in [lo, hi] {
            let quad = ber_unified_quadrature(|g| model.cdf(g), &m).unwrap();
            assert!(rel(ber_t_closed(&model, &m), quad) < 1e-7);
        }
    }

    #[test]
    fn ber_t_low_snr_limit() {
        let m = ModulationParams::dpsk();
        let model = RisTModel::new(3, 1e-9);
        assert!((ber_t_closed(&model, &m) - 0.5).abs() < 1e-6);
    }

    #[test]
    fn ber_t_asymptote_properties() {
        let m = ModulationParams::dpsk();
        // classical Rayleigh high-SNR DPSK: 1/(2 gbar)
        let model = RisTModel::new(1, 1000.0);
        assert!(rel(ber_t_asymptotic(&model, &m), 1.0 / 2000.0) < 1e-12);
        // ratio to exact -> 1 at 60 dB
        for n in [1u32, 2, 4] {
            let model = RisTModel::new(n, 1e6);
            let ratio = ber_t_asymptotic(&model, &m) / ber_t_closed(&model, &m);
            assert!((ratio - 1.0).abs() < 0.02, "N={n}: {ratio}");
        }
        // exact log-log slope -N
        let m1 = RisTModel::new(3, 1e5);
        let m2 = RisTModel::new(3, 1e6);
        let slope = (ber_t_asymptotic(&m1, &m) / ber_t_asymptotic(&m2, &m)).log10();
        assert!((slope - 3.0).abs() < 1e-12);
    }

    #[test]
    fn ber_dh_series_agrees_with_quadrature() {
        // synthetic non-degenerate fit exercises the closed route
        let m = ModulationParams::dpsk();
        for gbar in [10.0, 100.0] {
            let model = synthetic_dh(gbar);
            let closed = ber_dh_closed(&model, &m).unwrap();
            assert_eq!(closed.method, Method::ClosedForm);
            let quad = ber_unified_quadrature(|g| model.cdf(g), &m).unwrap();
            assert!(
                rel(closed.value, quad) <= 1e-4,
                "gbar={gbar}: {} vs {quad}",
                closed.value
            );
        }
        // frozen 30-digit reference at gbar = 10 (z = 0.161)
        let model = synthetic_dh(10.0);
        let closed = ber_dh_closed(&model, &m).unwrap();
        assert!(rel(closed.value, 0.022_550_505_937_6) < 1e-8);
    }

    #[test]
    fn ber_dh_production_fits_take_quadrature_route() {
        let m = ModulationParams::dpsk();
        for n in [1u32, 2, 4] {
            for gbar in [10.0, 1000.0] {
                let model = RisDhModel::new(n, gbar).unwrap();
                let tagged = ber_dh_closed(&model, &m).unwrap();
                assert_eq!(tagged.method, Method::Quadrature, "N={n}");
                let quad = ber_unified_quadrature(|g| model.cdf(g), &m).unwrap();
                assert!(rel(tagged.value, quad) <= 1e-4);
                assert!(tagged.value > 0.0 && tagged.value <= 0.5);
            }
        }
    }

    #[test]
    fn ber_dh_low_snr_limit() {
        let m = ModulationParams::dpsk();
        let model = RisDhModel::new(2, 1e-8).unwrap();
        let v = ber_dh_closed(&model, &m).unwrap().value;
        assert!((v - 0.5).abs() < 1e-4);
    }

    // ---------------- capacity ----------------

    #[test]
    fn capacity_degenerate_ccdfs() {
        assert_eq!(capacity_from_ccdf(|_| 0.0).unwrap(), 0.0);
        // deterministic SNR gamma0: ccdf = step -> log2(1 + gamma0)
        let gamma0 = 7.5;
        let cap = capacity_from_ccdf(|g| if g < gamma0 { 1.0 } else { 0.0 }).unwrap();
        assert!(rel(cap, (1.0 + gamma0).log2()) < 1e-7);
    }

    #[test]
    fn capacity_rayleigh_reference() {
        // RIS-T N=1, B=1, gbar=1: -e Ei(-1) / ln 2 from the Ei oracle
        let model = RisTModel::new(1, 1.0);
        let expect = 0.860_347_382_270_885_95;
        assert!(rel(capacity_t_closed(&model), expect) < 1e-12);
        let quad = capacity_from_ccdf(|g| model.ccdf(g)).unwrap();
        assert!(rel(quad, expect) < 1e-7);
    }

    #[test]
    fn capacity_t_closed_matches_quadrature() {
        for n in [1u32, 2, 4, 8] {
            for gbar in [1.0, 10.0, 100.0, 1000.0] {
                let model = RisTModel::new(n, gbar);
                let closed = capacity_t_closed(&model);
                let quad = capacity_from_ccdf(|g| model.ccdf(g)).unwrap();
                assert!(
                    rel(closed, quad) <= 1e-6,
                    "N={n} gbar={gbar}: {closed} vs {quad}"
                );
            }
        }
    }

    #[test]
    fn capacity_t_small_snr_goes_to_zero() {
        let model = RisTModel::new(4, 1e-3);
        let c = capacity_t_closed(&model);
        assert!(c >= 0.0 && c < 0.05, "c = {c}");
        let tiny = RisTModel::new(1, 1e-6);
        assert!(capacity_t_closed(&tiny) < 1e-4);
    }

    #[test]
    fn capacity_t_large_n_no_overflow() {
        let model = RisTModel::new(64, 100.0);
        let closed = capacity_t_closed(&model);
        assert!(closed.is_finite());
        let quad = capacity_from_ccdf(|g| model.ccdf(g)).unwrap();
        assert!(rel(closed, quad) < 1e-6, "{closed} vs {quad}");
    }

    #[test]
    fn capacity_t_bounds_and_asymptote() {
        for n in [1u32, 2, 4, 8] {
            let model = RisTModel::new(n, 100.0);
            let exact = capacity_t_closed(&model);
            assert!(capacity_t_upper(&model) >= exact);
        }
        // upper-bound gap shrinks with N (channel hardening)
        let gaps: Vec<f64> = [1u32, 2, 4, 8]
            .iter()
            .map(|&n| {
                let model = RisTModel::new(n, 100.0);
                capacity_t_upper(&model) - capacity_t_closed(&model)
            })
            .collect();
        for w in gaps.windows(2) {
            assert!(w[1] < w[0], "gaps not shrinking: {gaps:?}");
        }
        // N=1: upper = log2(1 + gbar), asym = log2(gbar)
        let model = RisTModel::new(1, 256.0);
        assert!(rel(capacity_t_upper(&model), 257f64.log2()) < 1e-12);
        assert!(rel(capacity_t_asymptotic(&model), 8.0) < 1e-12);
    }

    #[test]
    fn capacity_dh_series_agrees_with_quadrature() {
        for gbar in [10.0, 100.0] {
            let model = synthetic_dh(gbar);
            let closed = capacity_dh_closed(&model).unwrap();
            assert_eq!(closed.method, Method::ClosedForm);
            let quad = capacity_from_ccdf(|g| model.ccdf(g)).unwrap();
            assert!(
                rel(closed.value, quad) <= 1e-4,
                "gbar={gbar}: {} vs {quad}",
                closed.value
            );
        }
        // frozen 30-digit references (z = 0.161 and 0.0161)
        let closed = capacity_dh_closed(&synthetic_dh(10.0)).unwrap();
        assert!(rel(closed.value, 3.659_060_693_548_6) < 1e-8);
        let closed = capacity_dh_closed(&synthetic_dh(100.0)).unwrap();
        assert!(rel(closed.value, 6.768_865_723_556_4) < 1e-8);
    }

    #[test]
    fn capacity_dh_production_route_and_bounds() {
        for n in [1u32, 2, 4] {
            for gbar in [1.0, 100.0] {
                let model = RisDhModel::new(n, gbar).unwrap();
                let tagged = capacity_dh_closed(&model).unwrap();
                assert_eq!(tagged.method, Method::Quadrature, "N={n}");
                assert!(tagged.value >= 0.0);
                assert!(
                    capacity_dh_upper(&model) >= tagged.value,
                    "Jensen violated at N={n} gbar={gbar}"
                );
            }
        }
        // gbar -> 0 sends capacity to 0
        let model = RisDhModel::new(2, 1e-7).unwrap();
        assert!(capacity_dh_closed(&model).unwrap().value < 1e-4);
    }

    #[test]
    fn capacity_dh_upper_basics() {
        // N=1: Omega = 1, so bound = log2(1 + gbar)
        let model = RisDhModel::new(1, 1.0).unwrap();
        assert!(rel(capacity_dh_upper(&model), 1.0) < 1e-12);
        // doubling Omega gbar adds ~1 bit at high SNR
        let m1 = RisDhModel::new(2, 1e5).unwrap();
        let m2 = RisDhModel::new(2, 2e5).unwrap();
        let d = capacity_dh_upper(&m2) - capacity_dh_upper(&m1);
        assert!((d - 1.0).abs() < 1e-4);
    }

    #[test]
    fn capacity_dh_asymptote_tracks_keyhole_quadrature() {
        // the asymptote is the degenerate-channel line; compare against
        // the keyhole model's quadrature capacity at 60 dB
        for n in [1u32, 2, 4] {
            let dh = RisDhModel::new(n, 1e6).unwrap();
            let kh = KeyholeModel::new(n, 1e6);
            let asym = capacity_dh_asymptotic(&dh);
            let quad = capacity_from_ccdf(|g| kh.ccdf(g)).unwrap();
            assert!(
                (asym - quad).abs() < 0.05,
                "N={n}: asym {asym} vs keyhole quad {quad}"
            );
        }
    }

    #[test]
    fn capacity_asymptote_slopes_are_one() {
        let m1 = RisDhModel::new(2, 1e5).unwrap();
        let m2 = RisDhModel::new(2, 1e6).unwrap();
        let slope =
            (capacity_dh_asymptotic(&m2) - capacity_dh_asymptotic(&m1)) / (1e6f64.log2() - 1e5f64.log2());
        assert!((slope - 1.0).abs() < 1e-12);
        let t1 = RisTModel::new(4, 1e5);
        let t2 = RisTModel::new(4, 1e6);
        let slope =
            (capacity_t_asymptotic(&t2) - capacity_t_asymptotic(&t1)) / (1e6f64.log2() - 1e5f64.log2());
        assert!((slope - 1.0).abs() < 1e-12);
    }

    // ---------------- diversity ----------------

    #[test]
    fn diversity_of_exact_monomial() {
        // outage_t_asymptotic is an exact monomial in gbar: slope = N
        let grid: Vec<f64> = (0..11).map(|i| 50.0 + 2.0 * i as f64).collect();
        let vals: Vec<f64> = grid
            .iter()
            .map(|db| outage_t_asymptotic(&RisTModel::new(3, crate::db_to_lin(*db)), 100.0))
            .collect();
        let curve = MetricCurve::new(grid, vals, Method::Asymptotic, ModelTag::T);
        let slope = diversity_order_estimate(&curve, (50.0, 70.0)).unwrap();
        assert!((slope - 3.0).abs() < 1e-6, "slope = {slope}");
    }

    #[test]
    fn diversity_of_exact_t_outage() {
        let grid: Vec<f64> = (0..11).map(|i| 50.0 + 2.0 * i as f64).collect();
        let vals: Vec<f64> = grid
            .iter()
            .map(|db| outage_t(&RisTModel::new(2, crate::db_to_lin(*db)), 100.0))
            .collect();
        let curve = MetricCurve::new(grid, vals, Method::ClosedForm, ModelTag::T);
        let slope = diversity_order_estimate(&curve, (50.0, 70.0)).unwrap();
        assert!((slope - 2.0).abs() < 0.05, "slope = {slope}");
    }

    #[test]
    fn diversity_of_dh_outage_between_n_minus_one_and_n() {
        for n in [2u32, 3] {
            let fit = crate::momentmatch::fit_for_elements(n).unwrap();
            let grid: Vec<f64> = (0..11).map(|i| 50.0 + 2.0 * i as f64).collect();
            let vals: Vec<f64> = grid
                .iter()
                .map(|db| {
                    outage_dh(
                        &RisDhModel::from_fit(n, crate::db_to_lin(*db), fit),
                        100.0,
                    )
                })
                .collect();
            let curve = MetricCurve::new(grid, vals, Method::ClosedForm, ModelTag::Dh);
            let slope = diversity_order_estimate(&curve, (50.0, 70.0)).unwrap();
            assert!(
                slope > (n - 1) as f64 && slope < n as f64,
                "N={n}: slope {slope}"
            );
        }
    }

    #[test]
    fn diversity_window_errors() {
        let grid = vec![0.0, 10.0, 20.0, 30.0];
        let vals = vec![0.1, 0.01, 0.001, 0.0001];
        let curve = MetricCurve::new(grid, vals, Method::ClosedForm, ModelTag::T);
        assert!(matches!(
            diversity_order_estimate(&curve, (25.0, 28.0)),
            Err(MetricsError::DegenerateWindow { .. })
        ));
        let bad = MetricCurve::new(
            vec![0.0, 10.0, 20.0],
            vec![0.1, 0.0, 0.001],
            Method::ClosedForm,
            ModelTag::T,
        );
        assert!(matches!(
            diversity_order_estimate(&bad, (0.0, 20.0)),
            Err(MetricsError::NonPositiveValues)
        ));
    }
}
