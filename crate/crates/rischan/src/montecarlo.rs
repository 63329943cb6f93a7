//! Seeded, reproducible Monte Carlo oracle for both link setups.
//!
//! Sampling is partitioned into substreams, one counter-indexed ChaCha
//! stream per substream, derived from the master seed. Substreams execute
//! in parallel; partial sums are reduced in substream order, so estimates
//! are bit-identical for a fixed (seed, n_substreams) regardless of worker
//! count or scheduling. Channel draws are reused across the SNR grid
//! (common random numbers), which keeps empirical curves smooth in the
//! average SNR.

use crate::channelmodels::Scheme;
use crate::db_to_lin;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SimError {
    #[error("n_samples ({n_samples}) must be a positive multiple of n_substreams ({n_substreams})")]
    BadPartition { n_samples: u64, n_substreams: u32 },
    #[error("n_samples must be at least {min}")]
    TooFewSamples { min: u64 },
    #[error("SNR grid must be non-empty and strictly increasing")]
    BadGrid,
    #[error("{0}")]
    BadParameter(&'static str),
}

/// Description of one seeded simulation run.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct SimConfig {
    pub scheme: Scheme,
    pub n_elems: u32,
    /// Average-SNR grid in dB.
    pub snr_grid_db: Vec<f64>,
    /// Outage threshold, linear.
    pub gamma_th: f64,
    pub n_samples: u64,
    pub seed: u64,
    pub n_substreams: u32,
}

impl SimConfig {
    pub const MIN_SAMPLES: u64 = 10_000;

    pub fn new(
        scheme: Scheme,
        n_elems: u32,
        snr_grid_db: Vec<f64>,
        gamma_th: f64,
        n_samples: u64,
        seed: u64,
        n_substreams: u32,
    ) -> Result<Self, SimError> {
        if n_elems < 1 {
            return Err(SimError::BadParameter("n_elems must be >= 1"));
        }
        if !(gamma_th > 0.0) {
            return Err(SimError::BadParameter("gamma_th must be positive"));
        }
        if snr_grid_db.is_empty() || snr_grid_db.windows(2).any(|w| w[0] >= w[1]) {
            return Err(SimError::BadGrid);
        }
        if n_samples < Self::MIN_SAMPLES {
            return Err(SimError::TooFewSamples {
                min: Self::MIN_SAMPLES,
            });
        }
        if n_substreams < 1 || n_samples % n_substreams as u64 != 0 {
            return Err(SimError::BadPartition {
                n_samples,
                n_substreams,
            });
        }
        Ok(SimConfig {
            scheme,
            n_elems,
            snr_grid_db,
            gamma_th,
            n_samples,
            seed,
            n_substreams,
        })
    }
}

/// Streaming estimates with per-substream standard errors.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct EmpiricalCurve {
    pub snr_grid_db: Vec<f64>,
    pub estimates: Vec<f64>,
    pub std_errors: Vec<f64>,
    pub n_samples: u64,
}

/// ChaCha stream for substream `idx` under the master seed.
pub fn substream_rng(seed: u64, idx: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(idx);
    rng
}

/// Unit-power Rayleigh draw via inverse transform: r = sqrt(-ln U),
/// U in (0, 1]. Mean sqrt(pi)/2, variance (4 - pi)/4.
#[inline]
fn rayleigh(rng: &mut ChaCha8Rng) -> f64 {
    let u: f64 = rng.gen();
    (-(1.0 - u).ln()).sqrt()
}

/// One draw of the dual-hop amplitude: sum of n_elems products of two
/// independent unit-power Rayleigh amplitudes.
pub fn sample_r1(n_elems: u32, rng: &mut ChaCha8Rng) -> f64 {
    (0..n_elems).map(|_| rayleigh(rng) * rayleigh(rng)).sum()
}

/// One draw of the transmit-side amplitude: sum of n_elems independent
/// unit-power Rayleigh amplitudes.
pub fn sample_r2(n_elems: u32, rng: &mut ChaCha8Rng) -> f64 {
    (0..n_elems).map(|_| rayleigh(rng)).sum()
}

fn draw_amplitude(scheme: Scheme, n_elems: u32, rng: &mut ChaCha8Rng) -> f64 {
    match scheme {
        Scheme::Dh => sample_r1(n_elems, rng),
        Scheme::T => sample_r2(n_elems, rng),
    }
}

/// Generic substream-parallel runner: accumulates a per-grid-point
/// statistic of (r^2, linear snr) over all samples, with common random
/// numbers across the grid.
fn run_curve<F>(cfg: &SimConfig, stat: F) -> EmpiricalCurve
where
    F: Fn(f64, f64) -> f64 + Sync,
{
    let lin: Vec<f64> = cfg.snr_grid_db.iter().map(|db| db_to_lin(*db)).collect();
    let per_stream = cfg.n_samples / cfg.n_substreams as u64;
    // one partial-sum vector per substream, ordered by substream index
    let partials: Vec<Vec<f64>> = (0..cfg.n_substreams as u64)
        .into_par_iter()
        .map(|s| {
            let mut rng = substream_rng(cfg.seed, s);
            let mut acc = vec![0.0f64; lin.len()];
            for _ in 0..per_stream {
                let r = draw_amplitude(cfg.scheme, cfg.n_elems, &mut rng);
                let r_sq = r * r;
                for (a, l) in acc.iter_mut().zip(&lin) {
                    *a += stat(r_sq, *l);
                }
            }
            acc
        })
        .collect();

    let s = cfg.n_substreams as usize;
    let mut estimates = vec![0.0f64; lin.len()];
    for part in &partials {
        for (e, p) in estimates.iter_mut().zip(part) {
            *e += p;
        }
    }
    for e in estimates.iter_mut() {
        *e /= cfg.n_samples as f64;
    }
    // standard errors from the spread of substream means
    let std_errors = if s >= 2 {
        (0..lin.len())
            .map(|j| {
                let mean = estimates[j];
                let var: f64 = partials
                    .iter()
                    .map(|p| {
                        let m = p[j] / per_stream as f64;
                        (m - mean) * (m - mean)
                    })
                    .sum::<f64>()
                    / (s as f64 - 1.0);
                (var / s as f64).sqrt()
            })
            .collect()
    } else {
        vec![0.0; lin.len()]
    };
    EmpiricalCurve {
        snr_grid_db: cfg.snr_grid_db.clone(),
        estimates,
        std_errors,
        n_samples: cfg.n_samples,
    }
}

/// Empirical outage probability: fraction of samples with r^2 gbar below
/// the threshold, per grid point.
pub fn empirical_outage(cfg: &SimConfig) -> EmpiricalCurve {
    let th = cfg.gamma_th;
    run_curve(cfg, move |r_sq, lin| if r_sq * lin <= th { 1.0 } else { 0.0 })
}

/// Semi-analytic DPSK BER: average of the conditional error 0.5 e^-gamma
/// over sampled SNRs (no bit-level simulation).
pub fn empirical_ber_dpsk(cfg: &SimConfig) -> EmpiricalCurve {
    run_curve(cfg, |r_sq, lin| 0.5 * (-r_sq * lin).exp())
}

/// Empirical average capacity: mean of log2(1 + r^2 gbar).
pub fn empirical_capacity(cfg: &SimConfig) -> EmpiricalCurve {
    run_curve(cfg, |r_sq, lin| (r_sq * lin).ln_1p() / std::f64::consts::LN_2)
}

/// Kolmogorov-Smirnov distance between the empirical SNR distribution and
/// a model CDF, with the bookkeeping needed to reason about grid
/// resolution.
#[derive(Debug, Clone, Copy)]
pub struct KsEstimate {
    /// Two-sided KS statistic restricted to the evaluation nodes; never
    /// exceeds the true supremum distance.
    pub statistic: f64,
    /// Upper bound on how far the true supremum can exceed `statistic`
    /// (node spacing in probability plus the largest model-CDF increment
    /// between adjacent nodes).
    pub resolution: f64,
}

/// Number of model-CDF evaluation nodes for the KS scan.
const KS_NODES: usize = 2000;

/// KS distance details; `empirical_cdf_distance` returns just the
/// statistic.
pub fn empirical_cdf_distance_detailed<F>(
    scheme: Scheme,
    n_elems: u32,
    avg_snr: f64,
    model_cdf: F,
    n_samples: u64,
    seed: u64,
) -> KsEstimate
where
    F: Fn(f64) -> f64,
{
    assert!(avg_snr > 0.0);
    assert!(n_samples >= 2);
    let mut rng = substream_rng(seed, 0);
    let mut gammas: Vec<f64> = (0..n_samples)
        .map(|_| {
            let r = draw_amplitude(scheme, n_elems, &mut rng);
            r * r * avg_snr
        })
        .collect();
    gammas.sort_by(|a, b| a.partial_cmp(b).expect("samples are finite"));

    let n = n_samples as usize;
    let stride = (n / KS_NODES).max(1);
    let nf = n as f64;
    let mut statistic: f64 = 0.0;
    let mut max_gap: f64 = 0.0;
    let mut prev_f = 0.0f64;
    let mut p = stride;
    loop {
        let p_here = p.min(n);
        let f = model_cdf(gammas[p_here - 1]);
        statistic = statistic
            .max((f - p_here as f64 / nf).abs())
            .max((f - (p_here - 1) as f64 / nf).abs());
        max_gap = max_gap.max(f - prev_f);
        prev_f = f;
        if p_here == n {
            break;
        }
        p += stride;
    }
    // tail above the largest sample
    statistic = statistic.max(1.0 - prev_f);
    KsEstimate {
        statistic,
        resolution: stride as f64 / nf + max_gap,
    }
}

/// Kolmogorov-Smirnov distance between the empirical CDF of seeded SNR
/// samples and `model_cdf` (node-restricted statistic; see
/// [`empirical_cdf_distance_detailed`] for the resolution bound).
pub fn empirical_cdf_distance<F>(
    scheme: Scheme,
    n_elems: u32,
    avg_snr: f64,
    model_cdf: F,
    n_samples: u64,
    seed: u64,
) -> f64
where
    F: Fn(f64) -> f64,
{
    empirical_cdf_distance_detailed(scheme, n_elems, avg_snr, model_cdf, n_samples, seed).statistic
}

/// KS scan against a model given by its density: the model CDF at the
/// quantile nodes is accumulated by integrating `pdf` across consecutive
/// nodes, which by interval additivity equals the quadrature CDF at those
/// nodes but costs one short integral per node instead of one full one.
pub fn ks_scan_via_pdf<F>(sorted_gammas: &[f64], pdf: F) -> KsEstimate
where
    F: Fn(f64) -> f64,
{
    let n = sorted_gammas.len();
    assert!(n >= 2, "need at least two samples");
    let acc = crate::special::EvalAccuracy {
        rel_tol: 1e-8,
        abs_tol: 1e-14,
    };
    let stride = (n / KS_NODES).max(1);
    let nf = n as f64;
    let mut statistic = 0.0f64;
    let mut max_gap = 0.0f64;
    let mut prev_f = 0.0f64;
    let mut prev_x = 0.0f64;
    let mut p = stride;
    loop {
        let p_here = p.min(n);
        let x = sorted_gammas[p_here - 1];
        let f = if x > prev_x {
            let inc = match crate::quadrature::integrate_finite(&pdf, prev_x, x, &acc) {
                Ok(r) => r.value,
                Err(e) => e.best().map(|b| b.value).unwrap_or(0.0),
            };
            (prev_f + inc).clamp(0.0, 1.0)
        } else {
            prev_f
        };
        statistic = statistic
            .max((f - p_here as f64 / nf).abs())
            .max((f - (p_here - 1) as f64 / nf).abs());
        max_gap = max_gap.max(f - prev_f);
        prev_f = f;
        prev_x = x;
        if p_here == n {
            break;
        }
        p += stride;
    }
    statistic = statistic.max(1.0 - prev_f);
    KsEstimate {
        statistic,
        resolution: stride as f64 / nf + max_gap,
    }
}
