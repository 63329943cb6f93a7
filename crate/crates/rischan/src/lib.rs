//! Statistical toolkit for two RIS-aided wireless link setups: a dual-hop
//! reflection path (DH) whose SNR is driven by a sum of double-Rayleigh
//! products, and a transmit-side setup (T) whose SNR is driven by a sum of
//! Rayleigh amplitudes.
//!
//! The crate provides
//! - moment matching of the DH cascade onto a squared K_G law
//!   ([`momentmatch`]),
//! - the four SNR distribution models ([`channelmodels`]),
//! - outage / average-BER / average-capacity metrics in closed form with
//!   quadrature twins, bounds and high-SNR asymptotes ([`metrics`]),
//! - the scalar special-function kernel behind all of it ([`special`]),
//! - adaptive Gauss-Kronrod quadrature ([`quadrature`]),
//! - a seeded, substream-parallel Monte Carlo oracle ([`montecarlo`]),
//! - CSV/SVG writers ([`output`]) and the release validation suite
//!   ([`validation`]).
//!
//! All library layers work with linear SNR; decibel grids appear only in
//! experiment descriptions and output files. Convert with [`db_to_lin`].

pub mod channelmodels;
pub mod metrics;
pub mod momentmatch;
pub mod montecarlo;
pub mod output;
pub mod quadrature;
pub mod special;
pub mod validation;

/// x dB -> 10^(x/10). The single conversion site used by curve builders,
/// the simulator and the CLI.
pub fn db_to_lin(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// Inverse of [`db_to_lin`].
pub fn lin_to_db(lin: f64) -> f64 {
    10.0 * lin.log10()
}
