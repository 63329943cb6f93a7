//! SNR distribution models for the two link setups plus the two
//! approximations they are compared against.
//!
//! Four models, all exposing pdf/cdf/ccdf over linear instantaneous SNR:
//! - [`RisDhModel`]: squared-K_G law of the dual-hop cascade, with shaping
//!   parameters from the moment-matched fit;
//! - [`KeyholeModel`]: the degenerate-channel form the dual-hop cascade is
//!   bounded by;
//! - [`RisTModel`]: Gamma law of the transmit-side sum channel;
//! - [`NccsModel`]: the CLT-based noncentral chi-square baseline.
//!
//! Models are immutable after construction; all evaluation is pure.

use crate::momentmatch::{fit_for_elements, FitError, SaaFit};
use crate::quadrature::{integrate_finite, integrate_semi_infinite};
use crate::special::{
    hyp_1f2_with_peak, ln_bessel_k, ln_gamma, marcum_q_half, reg_lower_inc_gamma, EvalAccuracy,
};

/// Which link setup a model or simulation belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum Scheme {
    /// Dual-hop reflection path; SNR = (sum of alpha_i beta_i)^2 gbar.
    Dh,
    /// Transmit-side surface; SNR = (sum of eps_i)^2 gbar.
    T,
}

impl std::fmt::Display for Scheme {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Scheme::Dh => write!(f, "dh"),
            Scheme::T => write!(f, "t"),
        }
    }
}

/// Common evaluation surface over instantaneous SNR (linear). Densities
/// and probabilities are extended by zero outside the support, so the
/// functions are total on finite inputs.
pub trait SnrDistribution {
    /// Probability density at gamma.
    fn pdf(&self, gamma: f64) -> f64;
    /// P(SNR <= gamma).
    fn cdf(&self, gamma: f64) -> f64;
    /// 1 - cdf(gamma), the complement computed from the same value.
    fn ccdf(&self, gamma: f64) -> f64 {
        1.0 - self.cdf(gamma)
    }
}

/// Density of one double-Rayleigh element amplitude: 4 r K_0(2r).
pub fn chi_pdf(r: f64) -> f64 {
    if r <= 0.0 {
        return 0.0;
    }
    match ln_bessel_k(0.0, 2.0 * r) {
        Ok(lnk) => 4.0 * r * lnk.exp(),
        Err(_) => 0.0,
    }
}

/// Series expansions of the squared-K_G CDF stay below this argument.
const CDF_SERIES_Z_GUARD: f64 = 100.0;
/// Shaping-parameter differences closer than this to an integer route to
/// quadrature (the pole expansion degenerates there).
pub(crate) const INTEGER_GAP: f64 = 1e-3;
/// Paired expansions whose terms exceed the result by this factor are
/// rejected as cancellation-dominated (1e8 keeps about eight significant
/// digits in the worst accepted case).
pub(crate) const CANCELLATION_LIMIT: f64 = 1e8;

/// Accuracy used for internal cdf/pdf quadratures.
pub(crate) fn model_acc() -> EvalAccuracy {
    EvalAccuracy {
        rel_tol: 1e-9,
        abs_tol: 1e-14,
    }
}

pub(crate) fn is_near_integer(x: f64, gap: f64) -> bool {
    (x - x.round()).abs() <= gap
}

/// CDF of a squared-K_G variate through the pole expansion of its
/// Bessel-kernel transform:
///
///   F(z) = [ G(m-k) z^k/k 1F2(k; k-m+1, k+1; z)
///          + G(k-m) z^m/m 1F2(m; m-k+1, m+1; z) ] / (G(k) G(m)),
///
/// valid for non-integer k - m. Returns None when the expansion is not
/// applicable or cancellation-dominated; the caller falls back to
/// quadrature.
fn kg_cdf_series(k: f64, m: f64, z: f64) -> Option<f64> {
    if z <= 0.0 {
        return Some(0.0);
    }
    if is_near_integer(k - m, INTEGER_GAP) || z > CDF_SERIES_Z_GUARD {
        return None;
    }
    let acc = EvalAccuracy {
        rel_tol: 1e-13,
        abs_tol: 1e-300,
    };
    let gamma_mk = crate::special::gamma_signed(m - k).ok()?;
    let gamma_km = crate::special::gamma_signed(k - m).ok()?;
    let (f1, p1) = hyp_1f2_with_peak(k, k - m + 1.0, k + 1.0, z, &acc, CDF_SERIES_Z_GUARD).ok()?;
    let (f2, p2) = hyp_1f2_with_peak(m, m - k + 1.0, m + 1.0, z, &acc, CDF_SERIES_Z_GUARD).ok()?;
    let t1 = gamma_mk * z.powf(k) / k * f1;
    let t2 = gamma_km * z.powf(m) / m * f2;
    let sum = t1 + t2;
    let scale = (gamma_mk.abs() * z.powf(k) / k * p1).max(gamma_km.abs() * z.powf(m) / m * p2);
    if !sum.is_finite() || sum.abs() * CANCELLATION_LIMIT < scale {
        return None;
    }
    let lg = ln_gamma(k).ok()? + ln_gamma(m).ok()?;
    Some((sum * (-lg).exp()).clamp(0.0, 1.0))
}

/// Squared-K_G model of the dual-hop SNR.
#[derive(Debug, Clone)]
pub struct RisDhModel {
    n_elems: u32,
    avg_snr: f64,
    fit: SaaFit,
    xi_tilde_sq: f64,
    ln_gamma_k: f64,
    ln_gamma_m: f64,
}

impl RisDhModel {
    /// Fit the cascade moments for `n_elems` and build the model at the
    /// given average SNR (linear).
    pub fn new(n_elems: u32, avg_snr: f64) -> Result<Self, FitError> {
        Ok(Self::from_fit(n_elems, avg_snr, fit_for_elements(n_elems)?))
    }

    /// Build from an existing fit (the fit does not depend on the average
    /// SNR, so sweeping a grid reuses it).
    pub fn from_fit(n_elems: u32, avg_snr: f64, fit: SaaFit) -> Self {
        assert!(n_elems >= 1);
        assert!(avg_snr > 0.0, "average SNR must be positive (linear units)");
        let xi_tilde_sq = fit.k_w * fit.m_w / (avg_snr * fit.omega_w);
        RisDhModel {
            n_elems,
            avg_snr,
            fit,
            xi_tilde_sq,
            ln_gamma_k: ln_gamma(fit.k_w).expect("k_w > 0"),
            ln_gamma_m: ln_gamma(fit.m_w).expect("m_w > 0"),
        }
    }

    /// Same fit, different average SNR.
    pub fn with_avg_snr(&self, avg_snr: f64) -> Self {
        Self::from_fit(self.n_elems, avg_snr, self.fit)
    }

    pub fn n_elems(&self) -> u32 {
        self.n_elems
    }

    pub fn avg_snr(&self) -> f64 {
        self.avg_snr
    }

    pub fn fit(&self) -> &SaaFit {
        &self.fit
    }

    /// Xi-tilde squared = k_w m_w / (avg_snr Omega_w).
    pub fn xi_tilde_sq(&self) -> f64 {
        self.xi_tilde_sq
    }

    /// E[SNR] = Omega_w * avg_snr.
    pub fn mean_snr(&self) -> f64 {
        self.fit.omega_w * self.avg_snr
    }

    /// CDF via the pole expansion when applicable (None otherwise).
    pub(crate) fn cdf_series(&self, gamma: f64) -> Option<f64> {
        kg_cdf_series(self.fit.k_w, self.fit.m_w, self.xi_tilde_sq * gamma)
    }

    /// CDF via adaptive quadrature of the density; the reference route the
    /// series path is checked against, and the production route whenever
    /// the fitted shaping parameters coincide.
    pub fn cdf_quadrature(&self, gamma: f64) -> f64 {
        if gamma <= 0.0 {
            return 0.0;
        }
        cdf_by_quadrature(self, gamma, self.mean_snr())
    }
}

impl SnrDistribution for RisDhModel {
    /// 2 Xi~^{k+m} gamma^{(k+m)/2 - 1} K_{k-m}(2 Xi~ sqrt(gamma)) /
    /// (Gamma(k) Gamma(m)), assembled in the log domain.
    fn pdf(&self, gamma: f64) -> f64 {
        if gamma <= 0.0 {
            return 0.0;
        }
        let (k, m) = (self.fit.k_w, self.fit.m_w);
        let h = 0.5 * (k + m);
        let arg = 2.0 * (self.xi_tilde_sq * gamma).sqrt();
        let lnk = match ln_bessel_k(k - m, arg) {
            Ok(v) => v,
            Err(_) => return 0.0,
        };
        let ln_pdf = std::f64::consts::LN_2 + h * self.xi_tilde_sq.ln() + (h - 1.0) * gamma.ln()
            + lnk
            - self.ln_gamma_k
            - self.ln_gamma_m;
        ln_pdf.exp()
    }

    fn cdf(&self, gamma: f64) -> f64 {
        if gamma <= 0.0 {
            return 0.0;
        }
        match self.cdf_series(gamma) {
            Some(v) => v,
            None => self.cdf_quadrature(gamma),
        }
    }
}

/// Forward/tail quadrature of a density with known mean, shared by the
/// models that have no closed CDF.
fn cdf_by_quadrature<D: SnrDistribution>(dist: &D, gamma: f64, mean: f64) -> f64 {
    let acc = model_acc();
    if gamma <= mean {
        match integrate_finite(|g| dist.pdf(g), 0.0, gamma, &acc) {
            Ok(r) => r.value.clamp(0.0, 1.0),
            Err(e) => e.best().map(|b| b.value.clamp(0.0, 1.0)).unwrap_or(f64::NAN),
        }
    } else {
        let tail = match integrate_semi_infinite(|g| dist.pdf(g), gamma, &acc) {
            Ok(r) => r.value,
            Err(e) => e.best().map(|b| b.value).unwrap_or(f64::NAN),
        };
        (1.0 - tail).clamp(0.0, 1.0)
    }
}

/// Degenerate-channel form of the dual-hop SNR law:
/// f(g) = 2 g^{N-1} K_0(2 sqrt(g/gbar)) / (Gamma(N)^2 gbar^N).
#[derive(Debug, Clone)]
pub struct KeyholeModel {
    n_elems: u32,
    avg_snr: f64,
    ln_gamma_n: f64,
}

impl KeyholeModel {
    pub fn new(n_elems: u32, avg_snr: f64) -> Self {
        assert!(n_elems >= 1);
        assert!(avg_snr > 0.0);
        KeyholeModel {
            n_elems,
            avg_snr,
            ln_gamma_n: ln_gamma(n_elems as f64).expect("N >= 1"),
        }
    }

    pub fn n_elems(&self) -> u32 {
        self.n_elems
    }

    pub fn avg_snr(&self) -> f64 {
        self.avg_snr
    }

    /// E[SNR] = N^2 gbar (product of two unit-scale Gamma(N) factors).
    pub fn mean_snr(&self) -> f64 {
        (self.n_elems as f64).powi(2) * self.avg_snr
    }
}

impl SnrDistribution for KeyholeModel {
    fn pdf(&self, gamma: f64) -> f64 {
        if gamma <= 0.0 {
            return 0.0;
        }
        let n = self.n_elems as f64;
        let arg = 2.0 * (gamma / self.avg_snr).sqrt();
        let lnk = match ln_bessel_k(0.0, arg) {
            Ok(v) => v,
            Err(_) => return 0.0,
        };
        (std::f64::consts::LN_2 + (n - 1.0) * gamma.ln() + lnk
            - 2.0 * self.ln_gamma_n
            - n * self.avg_snr.ln())
        .exp()
    }

    fn cdf(&self, gamma: f64) -> f64 {
        if gamma <= 0.0 {
            return 0.0;
        }
        // shaping difference is the integer 0, so the pole expansion never
        // applies; quadrature is the designated route
        cdf_by_quadrature(self, gamma, self.mean_snr())
    }
}

/// Gamma model of the transmit-side SNR.
#[derive(Debug, Clone)]
pub struct RisTModel {
    n_elems: u32,
    avg_snr: f64,
    b_const: f64,
    ln_gamma_n: f64,
}

impl RisTModel {
    pub fn new(n_elems: u32, avg_snr: f64) -> Self {
        assert!(n_elems >= 1);
        assert!(avg_snr > 0.0);
        // B = 1 + (N-1) Gamma(3/2)^2 = 1 + (N-1) pi/4
        let b_const = 1.0 + (n_elems as f64 - 1.0) * std::f64::consts::PI / 4.0;
        RisTModel {
            n_elems,
            avg_snr,
            b_const,
            ln_gamma_n: ln_gamma(n_elems as f64).expect("N >= 1"),
        }
    }

    pub fn n_elems(&self) -> u32 {
        self.n_elems
    }

    pub fn avg_snr(&self) -> f64 {
        self.avg_snr
    }

    /// B = 1 + (N-1) pi/4; equals 1 iff N = 1.
    pub fn b_const(&self) -> f64 {
        self.b_const
    }

    /// Scale of the Gamma law: B gbar.
    pub fn scale(&self) -> f64 {
        self.b_const * self.avg_snr
    }

    /// E[SNR] = N B gbar.
    pub fn mean_snr(&self) -> f64 {
        self.n_elems as f64 * self.scale()
    }

    /// CDF via adaptive quadrature of the density, the cross-check twin of
    /// the incomplete-gamma closed form.
    pub fn cdf_quadrature(&self, gamma: f64) -> f64 {
        if gamma <= 0.0 {
            return 0.0;
        }
        cdf_by_quadrature(self, gamma, self.mean_snr())
    }
}

impl SnrDistribution for RisTModel {
    /// gamma^{N-1} e^{-gamma/(B gbar)} / ((B gbar)^N (N-1)!).
    fn pdf(&self, gamma: f64) -> f64 {
        if gamma <= 0.0 {
            return 0.0;
        }
        let n = self.n_elems as f64;
        let beta = self.scale();
        ((n - 1.0) * gamma.ln() - gamma / beta - n * beta.ln() - self.ln_gamma_n).exp()
    }

    /// Regularized lower incomplete gamma P(N, gamma/(B gbar)); agrees with
    /// the finite-sum form 1 - e^-x sum_{k<N} x^k/k! to rounding.
    fn cdf(&self, gamma: f64) -> f64 {
        if gamma <= 0.0 {
            return 0.0;
        }
        reg_lower_inc_gamma(self.n_elems as f64, gamma / self.scale())
            .expect("N >= 1 and x >= 0 are in-domain")
    }
}

/// Noncentral chi-square baseline obtained by a Gaussian approximation of
/// the amplitude sum.
#[derive(Debug, Clone)]
pub struct NccsModel {
    lambda_nc: f64,
    sigma_sq: f64,
    avg_snr: f64,
    scheme: Scheme,
}

impl NccsModel {
    /// Scheme-specific parameters:
    /// DH: lambda = N^2 pi^2/16, sigma^2 = N (16 - pi^2)/16;
    /// T:  lambda = N^2 pi/4,    sigma^2 = N (4 - pi)/4.
    pub fn new(scheme: Scheme, n_elems: u32, avg_snr: f64) -> Self {
        assert!(n_elems >= 1);
        assert!(avg_snr > 0.0);
        let n = n_elems as f64;
        let pi = std::f64::consts::PI;
        let (lambda_nc, sigma_sq) = match scheme {
            Scheme::Dh => (n * n * pi * pi / 16.0, n * (16.0 - pi * pi) / 16.0),
            Scheme::T => (n * n * pi / 4.0, n * (4.0 - pi) / 4.0),
        };
        NccsModel {
            lambda_nc,
            sigma_sq,
            avg_snr,
            scheme,
        }
    }

    pub fn lambda_nc(&self) -> f64 {
        self.lambda_nc
    }

    pub fn sigma_sq(&self) -> f64 {
        self.sigma_sq
    }

    pub fn avg_snr(&self) -> f64 {
        self.avg_snr
    }

    pub fn scheme(&self) -> Scheme {
        self.scheme
    }
}

impl SnrDistribution for NccsModel {
    /// Noncentral chi-square density with one degree of freedom in the
    /// normalized variable y = gamma/(sigma^2 gbar), evaluated in the log
    /// domain: the cosh factor is folded into -(sqrt y - sqrt delta)^2 / 2.
    fn pdf(&self, gamma: f64) -> f64 {
        if gamma <= 0.0 {
            return 0.0;
        }
        let scale = self.sigma_sq * self.avg_snr;
        let y = gamma / scale;
        let delta = self.lambda_nc / self.sigma_sq;
        let root = (delta * y).sqrt();
        // ln cosh r = r + ln(1 + e^{-2r}) - ln 2 folds the cosh growth into
        // the Gaussian exponent: -(y+delta)/2 + r = -(sqrt y - sqrt delta)^2/2
        let ln_pdf = -0.5 * (y.sqrt() - delta.sqrt()).powi(2) + (-2.0 * root).exp().ln_1p()
            - std::f64::consts::LN_2
            - 0.5 * (2.0 * std::f64::consts::PI * y).ln()
            - scale.ln();
        ln_pdf.exp()
    }

    fn cdf(&self, gamma: f64) -> f64 {
        if gamma <= 0.0 {
            return 0.0;
        }
        let a = (self.lambda_nc / self.sigma_sq).sqrt();
        let b = (gamma / (self.avg_snr * self.sigma_sq)).sqrt();
        1.0 - marcum_q_half(a, b).expect("nonnegative arguments")
    }
}

/// Outage probability of the NCCS baseline:
/// 1 - Q_{1/2}(sqrt(lambda)/sigma, sqrt(gamma_th/(gbar sigma^2))).
pub fn nccs_outage(model: &NccsModel, gamma_th: f64) -> f64 {
    assert!(gamma_th > 0.0);
    model.cdf(gamma_th)
}
