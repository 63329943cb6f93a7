//! Moments of the cascaded channel amplitude and the moment-matched
//! squared-K_G fit.
//!
//! The dual-hop amplitude is a sum of N i.i.d. double-Rayleigh products.
//! Its moments follow from the binomial convolution of the per-element
//! moments; matching the 2nd/4th/6th amplitude moments to the first three
//! moments of a squared-K_G law fixes the shaping parameters (k_w, m_w)
//! and the mean power Omega_w.

use thiserror::Error;

/// Log-domain accumulation kicks in above this element count.
const LOG_DOMAIN_THRESHOLD: u32 = 32;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FitError {
    #[error("moment set too short: need n_max >= {needed}, have {have}")]
    InsufficientOrder { needed: u32, have: u32 },
    #[error("invalid moment sequence: {0}")]
    InvalidMoments(&'static str),
    #[error("moment overflow during accumulation")]
    MomentOverflow,
    #[error("moments incompatible with a squared-K_G law (s = {s}, p = {p})")]
    Incompatible { s: f64, p: f64 },
}

/// Moments mu[n] = E[X^n], n = 0..=n_max, of a nonnegative random variable
/// under unit-power normalization.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentSet {
    mu: Vec<f64>,
}

impl MomentSet {
    /// Wrap a raw moment sequence. Requires mu[0] = 1 and positivity.
    pub fn new(mu: Vec<f64>) -> Result<Self, FitError> {
        if mu.is_empty() {
            return Err(FitError::InvalidMoments("empty sequence"));
        }
        if mu[0] != 1.0 {
            return Err(FitError::InvalidMoments("mu[0] must equal 1"));
        }
        if mu.iter().any(|&m| !(m > 0.0) || !m.is_finite()) {
            return Err(FitError::InvalidMoments("moments must be positive and finite"));
        }
        Ok(MomentSet { mu })
    }

    /// Highest available order.
    pub fn n_max(&self) -> u32 {
        (self.mu.len() - 1) as u32
    }

    /// mu[n] = E[X^n].
    pub fn mu(&self, n: u32) -> f64 {
        self.mu[n as usize]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.mu
    }

    /// Lyapunov log-convexity mu[n-1] mu[n+1] >= mu[n]^2, allowing `tol`
    /// relative slack for rounding.
    pub fn is_log_convex(&self, tol: f64) -> bool {
        self.mu
            .windows(3)
            .all(|w| w[0] * w[2] >= w[1] * w[1] * (1.0 - tol))
    }
}

/// n-th moment of a product of two i.i.d. unit-power Rayleigh amplitudes:
/// Gamma(1 + n/2)^2. Computed through exact factorial / double-factorial
/// arithmetic so that integer moments come out exact.
pub fn double_rayleigh_moment(n: u32) -> f64 {
    if n % 2 == 0 {
        // (h!)^2 with h = n/2
        let h = n / 2;
        let f: f64 = (1..=h).map(|i| i as f64).product();
        f * f
    } else {
        // Gamma(1 + n/2) = sqrt(pi) n!! / 2^{(n+1)/2}; squared gives
        // pi (n!!)^2 / 2^{n+1}
        let dfact: f64 = (1..=n).step_by(2).map(|i| i as f64).product();
        std::f64::consts::PI * dfact * dfact / 2f64.powi(n as i32 + 1)
    }
}

/// Moment set of one double-Rayleigh element up to order `n_max`.
pub fn double_rayleigh_moments(n_max: u32) -> MomentSet {
    MomentSet {
        mu: (0..=n_max).map(double_rayleigh_moment).collect(),
    }
}

fn binomial(n: u32, k: u32) -> f64 {
    let mut c = 1.0f64;
    for i in 0..k.min(n - k) {
        c = c * (n - i) as f64 / (i + 1) as f64;
    }
    c
}

/// Moments of X + Y for independent X, Y given their moment sets:
/// mu_{X+Y}(n) = sum_l C(n,l) mu_X(l) mu_Y(n-l).
pub fn combine_moments(a: &MomentSet, b: &MomentSet, n_max: u32) -> Result<MomentSet, FitError> {
    if a.n_max() < n_max || b.n_max() < n_max {
        return Err(FitError::InsufficientOrder {
            needed: n_max,
            have: a.n_max().min(b.n_max()),
        });
    }
    let mu = (0..=n_max)
        .map(|n| {
            (0..=n)
                .map(|l| binomial(n, l) * a.mu(l) * b.mu(n - l))
                .sum::<f64>()
        })
        .collect::<Vec<_>>();
    if mu.iter().any(|m| !m.is_finite()) {
        return Err(FitError::MomentOverflow);
    }
    MomentSet::new(mu)
}

/// Same convolution carried out on ln mu via log-sum-exp; used above the
/// element-count threshold where linear accumulation could overflow.
fn combine_log(a: &[f64], b: &[f64], n_max: u32) -> Vec<f64> {
    (0..=n_max as usize)
        .map(|n| {
            let terms: Vec<f64> = (0..=n)
                .map(|l| binomial(n as u32, l as u32).ln() + a[l] + b[n - l])
                .collect();
            let m = terms.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            m + terms.iter().map(|t| (t - m).exp()).sum::<f64>().ln()
        })
        .collect()
}

/// Moments of S_N = sum of `n_elems` i.i.d. copies of `elem`, for orders
/// 0..=n_max. Equals the nested multinomial expansion of the sum moment
/// exactly; the recursion is just its associative regrouping.
pub fn sum_moments(elem: &MomentSet, n_elems: u32, n_max: u32) -> Result<MomentSet, FitError> {
    assert!(n_elems >= 1, "sum_moments requires n_elems >= 1");
    if elem.n_max() < n_max {
        return Err(FitError::InsufficientOrder {
            needed: n_max,
            have: elem.n_max(),
        });
    }
    let base = MomentSet::new(elem.mu[..=n_max as usize].to_vec())?;
    if n_elems <= LOG_DOMAIN_THRESHOLD {
        let mut acc = base.clone();
        for _ in 1..n_elems {
            acc = combine_moments(&acc, &base, n_max)?;
        }
        Ok(acc)
    } else {
        let lbase: Vec<f64> = base.mu.iter().map(|m| m.ln()).collect();
        let mut lacc = lbase.clone();
        for _ in 1..n_elems {
            lacc = combine_log(&lacc, &lbase, n_max);
        }
        let mu: Vec<f64> = lacc.iter().map(|l| l.exp()).collect();
        if mu.iter().any(|m| !m.is_finite()) {
            return Err(FitError::MomentOverflow);
        }
        MomentSet::new(mu)
    }
}

/// Shaping parameters of the squared-K_G law fitted to a moment set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SaaFit {
    /// First shaping parameter, canonical ordering k_w >= m_w.
    pub k_w: f64,
    /// Second shaping parameter.
    pub m_w: f64,
    /// Mean power, equal to the input mu(2).
    pub omega_w: f64,
    /// Discriminant of the reciprocal-root quadratic; negative means the
    /// conjugate-pair fallback was taken.
    pub discriminant: f64,
    /// True iff the discriminant was negative and k_w = m_w was pinned to
    /// the conjugate-pair modulus.
    pub fallback_used: bool,
}

impl SaaFit {
    /// True on the measure-zero boundary where the two reciprocal roots
    /// coincide exactly (discriminant zero, no fallback needed).
    pub fn exact_boundary(&self) -> bool {
        self.discriminant == 0.0
    }
}

/// Fit a squared-K_G law to the amplitude moments mu(2), mu(4), mu(6).
///
/// With A = mu4/mu2^2 and B = mu6/mu2^3, the moment-ratio equations of the
/// squared-K_G law,
///   E[W^2]/E[W]^2 = (1 + 1/k)(1 + 1/m),
///   E[W^3]/E[W]^3 = (1 + 1/k)(1 + 2/k)(1 + 1/m)(1 + 2/m),
/// reduce to s = (4A - 3 - B/A)/2 and p = A - 1 - s, where the reciprocals
/// 1/k_w and 1/m_w are the roots of t^2 - s t + p = 0. A negative
/// discriminant (conjugate pair) pins k_w = m_w = 1/sqrt(p), the modulus of
/// the pair.
pub fn fit_saa(m: &MomentSet) -> Result<SaaFit, FitError> {
    if m.n_max() < 6 {
        return Err(FitError::InsufficientOrder {
            needed: 6,
            have: m.n_max(),
        });
    }
    let (m2, m4, m6) = (m.mu(2), m.mu(4), m.mu(6));
    let a = m4 / (m2 * m2);
    let b = m6 / (m2 * m2 * m2);
    let s = (4.0 * a - 3.0 - b / a) / 2.0;
    let p = a - 1.0 - s;
    if !(s > 0.0) || !(p > 0.0) {
        return Err(FitError::Incompatible { s, p });
    }
    let disc = s * s - 4.0 * p;
    let (k_w, m_w, fallback) = if disc >= 0.0 {
        let u_hi = 0.5 * (s + disc.sqrt());
        let u_lo = p / u_hi; // Vieta: avoids cancellation in the small root
        (1.0 / u_lo, 1.0 / u_hi, false)
    } else {
        let k = 1.0 / p.sqrt();
        (k, k, true)
    };
    Ok(SaaFit {
        k_w,
        m_w,
        omega_w: m2,
        discriminant: disc,
        fallback_used: fallback,
    })
}

/// Moments-then-fit pipeline for a dual-hop cascade with `n_elems`
/// reflecting elements.
pub fn fit_for_elements(n_elems: u32) -> Result<SaaFit, FitError> {
    let moments = sum_moments(&double_rayleigh_moments(6), n_elems, 6)?;
    fit_saa(&moments)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn element_moments_exact() {
        assert_eq!(double_rayleigh_moment(0), 1.0);
        assert!((double_rayleigh_moment(1) - std::f64::consts::PI / 4.0).abs() < 1e-16);
        assert_eq!(double_rayleigh_moment(2), 1.0);
        assert_eq!(double_rayleigh_moment(4), 4.0);
        assert_eq!(double_rayleigh_moment(6), 36.0);
        // Gamma(1 + 3/2)^2 = (3 sqrt(pi)/4)^2 = 9 pi / 16
        assert!((double_rayleigh_moment(3) - 9.0 * std::f64::consts::PI / 16.0).abs() < 1e-15);
    }

    #[test]
    fn element_moments_match_gamma() {
        for n in 0..=12u32 {
            let g = crate::special::gamma_fn(1.0 + n as f64 / 2.0).unwrap();
            let rel = (double_rayleigh_moment(n) - g * g).abs() / (g * g);
            assert!(rel < 1e-13, "n = {n}");
        }
    }

    #[test]
    fn single_summand_unchanged() {
        let chi = double_rayleigh_moments(6);
        let s = sum_moments(&chi, 1, 6).unwrap();
        assert_eq!(s, chi);
    }

    #[test]
    fn two_elements_second_moment() {
        // E[(chi1+chi2)^2] = 2 mu(2) + 2 mu(1)^2 = 2 + pi^2/8
        let s = sum_moments(&double_rayleigh_moments(6), 2, 2).unwrap();
        let expect = 2.0 + std::f64::consts::PI * std::f64::consts::PI / 8.0;
        assert!((s.mu(2) - expect).abs() < 1e-12);
    }

    #[test]
    fn matches_nested_multinomial_oracle() {
        // literal nested sum for N = 3, n <= 6:
        // mu(n) = sum_{n1=0}^{n} sum_{n2=0}^{n1} C(n,n1) C(n1,n2)
        //         mu_chi(n-n1) mu_chi(n1-n2) mu_chi(n2)
        let nested = |n: u32| -> f64 {
            let mut total = 0.0;
            for n1 in 0..=n {
                for n2 in 0..=n1 {
                    total += binomial(n, n1)
                        * binomial(n1, n2)
                        * double_rayleigh_moment(n - n1)
                        * double_rayleigh_moment(n1 - n2)
                        * double_rayleigh_moment(n2);
                }
            }
            total
        };
        let s = sum_moments(&double_rayleigh_moments(6), 3, 6).unwrap();
        for n in 0..=6u32 {
            let rel = (s.mu(n) - nested(n)).abs() / nested(n);
            assert!(rel < 1e-13, "n = {n}: {} vs {}", s.mu(n), nested(n));
        }
    }

    #[test]
    fn associative_regrouping() {
        let chi = double_rayleigh_moments(8);
        let two = sum_moments(&chi, 2, 8).unwrap();
        let three = sum_moments(&chi, 3, 8).unwrap();
        // ((1+1)+2) vs (1+3)
        let a = combine_moments(&two, &two, 8).unwrap();
        let b = combine_moments(&chi, &three, 8).unwrap();
        for n in 0..=8u32 {
            let rel = (a.mu(n) - b.mu(n)).abs() / b.mu(n);
            assert!(rel <= 1e-12, "n = {n}");
        }
    }

    #[test]
    fn log_domain_path_agrees() {
        let chi = double_rayleigh_moments(6);
        // above the threshold the log path runs; compare against linear
        // accumulation done manually
        let big = sum_moments(&chi, 40, 6).unwrap();
        let mut acc = chi.clone();
        for _ in 1..40 {
            acc = combine_moments(&acc, &chi, 6).unwrap();
        }
        for n in 0..=6u32 {
            let rel = (big.mu(n) - acc.mu(n)).abs() / acc.mu(n);
            assert!(rel < 1e-11, "n = {n}: {} vs {}", big.mu(n), acc.mu(n));
        }
    }

    #[test]
    fn moment_sets_are_log_convex() {
        for n in [1u32, 2, 5, 16, 64] {
            let s = sum_moments(&double_rayleigh_moments(6), n, 6).unwrap();
            assert!(s.is_log_convex(1e-12), "N = {n}");
        }
    }

    #[test]
    fn n1_fit_is_exact_double_rayleigh() {
        // (mu2, mu4, mu6) = (1, 4, 36): A = 4, B = 36, s = 2, p = 1,
        // discriminant exactly 0, so k_w = m_w = Omega_w = 1.
        let fit = fit_for_elements(1).unwrap();
        assert_eq!(fit.discriminant, 0.0);
        assert_eq!(fit.k_w, 1.0);
        assert_eq!(fit.m_w, 1.0);
        assert_eq!(fit.omega_w, 1.0);
        assert!(!fit.fallback_used);
        assert!(fit.exact_boundary());
    }

    #[test]
    fn n2_fit_takes_fallback() {
        let fit = fit_for_elements(2).unwrap();
        assert!(fit.discriminant < 0.0);
        assert!(fit.fallback_used);
        assert_eq!(fit.k_w, fit.m_w);
        // cross-checked against a 40-digit evaluation of the same system
        assert!((fit.k_w - 1.802_485_921_645_672_4).abs() < 1e-12);
        assert!((fit.omega_w - 3.233_700_550_136_169_7).abs() < 1e-12);
    }

    #[test]
    fn omega_equals_mu2_by_construction() {
        for n in [1u32, 2, 3, 7, 20, 64] {
            let moments = sum_moments(&double_rayleigh_moments(6), n, 6).unwrap();
            let fit = fit_saa(&moments).unwrap();
            assert_eq!(fit.omega_w, moments.mu(2), "N = {n}");
            assert!(fit.k_w >= fit.m_w);
        }
    }

    #[test]
    fn fit_reproduces_matched_moments() {
        // when no fallback is taken, the fitted law reproduces E[W^2] and
        // E[W^3] ratios to 1e-9; synthetic moments from a true squared-K_G
        let (k, m, om) = (3.0f64, 1.25f64, 2.5f64);
        let e2 = om * om * (1.0 + 1.0 / k) * (1.0 + 1.0 / m);
        let e3 = om.powi(3)
            * (1.0 + 1.0 / k)
            * (1.0 + 2.0 / k)
            * (1.0 + 1.0 / m)
            * (1.0 + 2.0 / m);
        // amplitude moments: mu(2n) = E[W^n]; odd entries are irrelevant here
        let mu = vec![1.0, 1.0, om, 1.0, e2, 1.0, e3];
        let fit = fit_saa(&MomentSet::new(mu).unwrap()).unwrap();
        assert!(!fit.fallback_used);
        assert!((fit.k_w - k).abs() / k < 1e-9, "k = {}", fit.k_w);
        assert!((fit.m_w - m).abs() / m < 1e-9);
        let r2 = (1.0 + 1.0 / fit.k_w) * (1.0 + 1.0 / fit.m_w);
        assert!((r2 - e2 / (om * om)).abs() < 1e-9);
        let r3 = (1.0 + 1.0 / fit.k_w)
            * (1.0 + 2.0 / fit.k_w)
            * (1.0 + 1.0 / fit.m_w)
            * (1.0 + 2.0 / fit.m_w);
        assert!((r3 - e3 / om.powi(3)).abs() / r3 < 1e-9);
    }

    #[test]
    fn power_rescale_invariance() {
        // scaling mu(n) by c^n scales Omega_w by c^2 and leaves shapes alone
        let base = sum_moments(&double_rayleigh_moments(6), 3, 6).unwrap();
        let c = 2.0f64;
        let scaled = MomentSet::new(
            base.as_slice()
                .iter()
                .enumerate()
                .map(|(n, m)| m * c.powi(n as i32))
                .collect(),
        )
        .unwrap();
        let f0 = fit_saa(&base).unwrap();
        let f1 = fit_saa(&scaled).unwrap();
        assert!((f1.k_w - f0.k_w).abs() < 1e-10);
        assert!((f1.m_w - f0.m_w).abs() < 1e-10);
        assert!((f1.omega_w - c * c * f0.omega_w).abs() < 1e-9);
    }

    #[test]
    fn incompatible_moments_signal() {
        // sub-unity 4th-moment ratio cannot come from a squared-K_G
        let mu = vec![1.0, 1.0, 1.0, 1.0, 0.9, 1.0, 1.0];
        assert!(matches!(
            fit_saa(&MomentSet::new(mu).unwrap()),
            Err(FitError::Incompatible { .. })
        ));
    }

    #[test]
    fn insufficient_order_signal() {
        let short = double_rayleigh_moments(4);
        assert!(matches!(
            fit_saa(&short),
            Err(FitError::InsufficientOrder { needed: 6, .. })
        ));
    }

    #[test]
    fn moment_set_validation() {
        assert!(MomentSet::new(vec![]).is_err());
        assert!(MomentSet::new(vec![0.5, 1.0]).is_err());
        assert!(MomentSet::new(vec![1.0, -1.0]).is_err());
        assert!(MomentSet::new(vec![1.0, f64::INFINITY]).is_err());
    }
}
