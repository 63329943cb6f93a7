//! Metric curves over average-SNR grids, the unit of exchange between the
//! metric layer, the simulator, the figure generator and the CLI.
//!
//! Curve generation parallelizes across grid points; output ordering is
//! the grid ordering regardless of worker count.

use super::{
    ber_dh_closed, ber_t_asymptotic, ber_t_closed, ber_unified_quadrature, capacity_dh_asymptotic,
    capacity_dh_closed, capacity_dh_upper, capacity_from_ccdf, capacity_t_asymptotic,
    capacity_t_closed, capacity_t_upper, outage_dh, outage_t, outage_t_asymptotic,
    MetricsError, ModulationParams,
};
use crate::channelmodels::{NccsModel, RisDhModel, RisTModel, Scheme, SnrDistribution};
use crate::db_to_lin;
use crate::momentmatch::{fit_for_elements, SaaFit};
use rayon::prelude::*;

/// How a curve was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum Method {
    ClosedForm,
    Quadrature,
    Asymptotic,
    UpperBound,
    MonteCarlo,
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Method::ClosedForm => "closed_form",
            Method::Quadrature => "quadrature",
            Method::Asymptotic => "asymptotic",
            Method::UpperBound => "upper_bound",
            Method::MonteCarlo => "monte_carlo",
        };
        write!(f, "{s}")
    }
}

/// Which distribution family a curve describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum ModelTag {
    Dh,
    T,
    Keyhole,
    Nccs,
}

/// A metric evaluated over an average-SNR grid.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricCurve {
    /// Average SNR grid in dB, strictly increasing.
    pub snr_grid_db: Vec<f64>,
    /// Metric values: probabilities for outage/BER, bits per channel use
    /// for capacity.
    pub values: Vec<f64>,
    pub method: Method,
    pub scheme: ModelTag,
}

impl MetricCurve {
    pub fn new(snr_grid_db: Vec<f64>, values: Vec<f64>, method: Method, scheme: ModelTag) -> Self {
        assert_eq!(snr_grid_db.len(), values.len());
        assert!(
            snr_grid_db.windows(2).all(|w| w[0] < w[1]),
            "SNR grid must be strictly increasing"
        );
        MetricCurve {
            snr_grid_db,
            values,
            method,
            scheme,
        }
    }
}

/// Evaluation route selector for curve builders: the default closed form
/// (with its documented fallback) or the forced quadrature twin.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum EvalMethod {
    Closed,
    Quadrature,
}

fn par_eval<F>(grid_db: &[f64], f: F) -> Result<Vec<f64>, MetricsError>
where
    F: Fn(f64) -> Result<f64, MetricsError> + Sync,
{
    grid_db
        .par_iter()
        .map(|db| f(db_to_lin(*db)))
        .collect::<Result<Vec<_>, _>>()
}

/// Shared fit for a DH grid sweep (the fit does not depend on average SNR).
fn dh_fit(n_elems: u32) -> Result<SaaFit, MetricsError> {
    fit_for_elements(n_elems).map_err(|e| {
        MetricsError::Special(crate::special::SpecialError::Domain(match e {
            _ => "dual-hop moment fit failed",
        }))
    })
}

/// Dual-hop outage curve.
pub fn dh_outage_curve(
    n_elems: u32,
    grid_db: &[f64],
    gamma_th: f64,
    method: EvalMethod,
) -> Result<MetricCurve, MetricsError> {
    let fit = dh_fit(n_elems)?;
    let values = par_eval(grid_db, |snr| {
        let model = RisDhModel::from_fit(n_elems, snr, fit);
        Ok(match method {
            EvalMethod::Closed => outage_dh(&model, gamma_th),
            EvalMethod::Quadrature => model.cdf_quadrature(gamma_th),
        })
    })?;
    Ok(MetricCurve::new(
        grid_db.to_vec(),
        values,
        match method {
            EvalMethod::Closed => Method::ClosedForm,
            EvalMethod::Quadrature => Method::Quadrature,
        },
        ModelTag::Dh,
    ))
}

/// Transmit-side outage curve.
pub fn t_outage_curve(
    n_elems: u32,
    grid_db: &[f64],
    gamma_th: f64,
    method: EvalMethod,
) -> Result<MetricCurve, MetricsError> {
    let values = par_eval(grid_db, |snr| {
        let model = RisTModel::new(n_elems, snr);
        Ok(match method {
            EvalMethod::Closed => outage_t(&model, gamma_th),
            EvalMethod::Quadrature => model.cdf_quadrature(gamma_th),
        })
    })?;
    Ok(MetricCurve::new(
        grid_db.to_vec(),
        values,
        match method {
            EvalMethod::Closed => Method::ClosedForm,
            EvalMethod::Quadrature => Method::Quadrature,
        },
        ModelTag::T,
    ))
}

/// High-SNR transmit-side outage asymptote curve.
pub fn t_outage_asymptotic_curve(
    n_elems: u32,
    grid_db: &[f64],
    gamma_th: f64,
) -> Result<MetricCurve, MetricsError> {
    let values = par_eval(grid_db, |snr| {
        Ok(outage_t_asymptotic(&RisTModel::new(n_elems, snr), gamma_th))
    })?;
    Ok(MetricCurve::new(
        grid_db.to_vec(),
        values,
        Method::Asymptotic,
        ModelTag::T,
    ))
}

/// NCCS baseline outage curve for either scheme.
pub fn nccs_outage_curve(
    scheme: Scheme,
    n_elems: u32,
    grid_db: &[f64],
    gamma_th: f64,
) -> Result<MetricCurve, MetricsError> {
    let values = par_eval(grid_db, |snr| {
        Ok(NccsModel::new(scheme, n_elems, snr).cdf(gamma_th))
    })?;
    Ok(MetricCurve::new(
        grid_db.to_vec(),
        values,
        Method::ClosedForm,
        ModelTag::Nccs,
    ))
}

/// Dual-hop average BER curve.
pub fn dh_ber_curve(
    n_elems: u32,
    grid_db: &[f64],
    modulation: &ModulationParams,
    method: EvalMethod,
) -> Result<MetricCurve, MetricsError> {
    let fit = dh_fit(n_elems)?;
    let values = par_eval(grid_db, |snr| {
        let model = RisDhModel::from_fit(n_elems, snr, fit);
        match method {
            EvalMethod::Closed => Ok(ber_dh_closed(&model, modulation)?.value),
            EvalMethod::Quadrature => ber_unified_quadrature(|g| model.cdf(g), modulation),
        }
    })?;
    Ok(MetricCurve::new(
        grid_db.to_vec(),
        values,
        match method {
            EvalMethod::Closed => Method::ClosedForm,
            EvalMethod::Quadrature => Method::Quadrature,
        },
        ModelTag::Dh,
    ))
}

/// Transmit-side average BER curve.
pub fn t_ber_curve(
    n_elems: u32,
    grid_db: &[f64],
    modulation: &ModulationParams,
    method: EvalMethod,
) -> Result<MetricCurve, MetricsError> {
    let values = par_eval(grid_db, |snr| {
        let model = RisTModel::new(n_elems, snr);
        match method {
            EvalMethod::Closed => Ok(ber_t_closed(&model, modulation)),
            EvalMethod::Quadrature => ber_unified_quadrature(|g| model.cdf(g), modulation),
        }
    })?;
    Ok(MetricCurve::new(
        grid_db.to_vec(),
        values,
        match method {
            EvalMethod::Closed => Method::ClosedForm,
            EvalMethod::Quadrature => Method::Quadrature,
        },
        ModelTag::T,
    ))
}

/// Transmit-side BER asymptote curve.
pub fn t_ber_asymptotic_curve(
    n_elems: u32,
    grid_db: &[f64],
    modulation: &ModulationParams,
) -> Result<MetricCurve, MetricsError> {
    let values = par_eval(grid_db, |snr| {
        Ok(ber_t_asymptotic(&RisTModel::new(n_elems, snr), modulation))
    })?;
    Ok(MetricCurve::new(
        grid_db.to_vec(),
        values,
        Method::Asymptotic,
        ModelTag::T,
    ))
}

/// Dual-hop average capacity curve.
pub fn dh_capacity_curve(
    n_elems: u32,
    grid_db: &[f64],
    method: EvalMethod,
) -> Result<MetricCurve, MetricsError> {
    let fit = dh_fit(n_elems)?;
    let values = par_eval(grid_db, |snr| {
        let model = RisDhModel::from_fit(n_elems, snr, fit);
        match method {
            EvalMethod::Closed => Ok(capacity_dh_closed(&model)?.value),
            EvalMethod::Quadrature => capacity_from_ccdf(|g| model.ccdf(g)),
        }
    })?;
    Ok(MetricCurve::new(
        grid_db.to_vec(),
        values,
        match method {
            EvalMethod::Closed => Method::ClosedForm,
            EvalMethod::Quadrature => Method::Quadrature,
        },
        ModelTag::Dh,
    ))
}

/// Dual-hop capacity upper bound / asymptote curves.
pub fn dh_capacity_upper_curve(
    n_elems: u32,
    grid_db: &[f64],
) -> Result<MetricCurve, MetricsError> {
    let fit = dh_fit(n_elems)?;
    let values = par_eval(grid_db, |snr| {
        Ok(capacity_dh_upper(&RisDhModel::from_fit(n_elems, snr, fit)))
    })?;
    Ok(MetricCurve::new(
        grid_db.to_vec(),
        values,
        Method::UpperBound,
        ModelTag::Dh,
    ))
}

pub fn dh_capacity_asymptotic_curve(
    n_elems: u32,
    grid_db: &[f64],
) -> Result<MetricCurve, MetricsError> {
    let fit = dh_fit(n_elems)?;
    let values = par_eval(grid_db, |snr| {
        Ok(capacity_dh_asymptotic(&RisDhModel::from_fit(
            n_elems, snr, fit,
        )))
    })?;
    Ok(MetricCurve::new(
        grid_db.to_vec(),
        values,
        Method::Asymptotic,
        ModelTag::Dh,
    ))
}

/// Transmit-side capacity curves.
pub fn t_capacity_curve(
    n_elems: u32,
    grid_db: &[f64],
    method: EvalMethod,
) -> Result<MetricCurve, MetricsError> {
    let values = par_eval(grid_db, |snr| {
        let model = RisTModel::new(n_elems, snr);
        match method {
            EvalMethod::Closed => Ok(capacity_t_closed(&model)),
            EvalMethod::Quadrature => capacity_from_ccdf(|g| model.ccdf(g)),
        }
    })?;
    Ok(MetricCurve::new(
        grid_db.to_vec(),
        values,
        match method {
            EvalMethod::Closed => Method::ClosedForm,
            EvalMethod::Quadrature => Method::Quadrature,
        },
        ModelTag::T,
    ))
}

pub fn t_capacity_upper_curve(n_elems: u32, grid_db: &[f64]) -> Result<MetricCurve, MetricsError> {
    let values = par_eval(grid_db, |snr| {
        Ok(capacity_t_upper(&RisTModel::new(n_elems, snr)))
    })?;
    Ok(MetricCurve::new(
        grid_db.to_vec(),
        values,
        Method::UpperBound,
        ModelTag::T,
    ))
}

pub fn t_capacity_asymptotic_curve(
    n_elems: u32,
    grid_db: &[f64],
) -> Result<MetricCurve, MetricsError> {
    let values = par_eval(grid_db, |snr| {
        Ok(capacity_t_asymptotic(&RisTModel::new(n_elems, snr)))
    })?;
    Ok(MetricCurve::new(
        grid_db.to_vec(),
        values,
        Method::Asymptotic,
        ModelTag::T,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> Vec<f64> {
        (0..7).map(|i| 10.0 * i as f64).collect()
    }

    #[test]
    fn outage_curve_monotone_decreasing() {
        let c = t_outage_curve(2, &grid(), 100.0, EvalMethod::Closed).unwrap();
        assert!(c.values.windows(2).all(|w| w[1] <= w[0]));
        assert!(c.values.iter().all(|v| (0.0..=1.0).contains(v)));
    }

    #[test]
    fn closed_and_quadrature_columns_agree() {
        let closed = t_outage_curve(2, &grid(), 100.0, EvalMethod::Closed).unwrap();
        let quad = t_outage_curve(2, &grid(), 100.0, EvalMethod::Quadrature).unwrap();
        for (a, b) in closed.values.iter().zip(&quad.values) {
            assert!((a - b).abs() <= 1e-7 * a.max(1e-12));
        }
    }

    #[test]
    fn capacity_upper_dominates_everywhere() {
        let cap = t_capacity_curve(4, &grid(), EvalMethod::Closed).unwrap();
        let upper = t_capacity_upper_curve(4, &grid()).unwrap();
        for (c, u) in cap.values.iter().zip(&upper.values) {
            assert!(u >= c, "{u} < {c}");
        }
        let cap = dh_capacity_curve(2, &grid(), EvalMethod::Closed).unwrap();
        let upper = dh_capacity_upper_curve(2, &grid()).unwrap();
        for (c, u) in cap.values.iter().zip(&upper.values) {
            assert!(u >= c, "{u} < {c}");
        }
    }

    #[test]
    fn grid_must_increase() {
        let r = std::panic::catch_unwind(|| {
            MetricCurve::new(
                vec![0.0, 0.0],
                vec![1.0, 1.0],
                Method::ClosedForm,
                ModelTag::T,
            )
        });
        assert!(r.is_err());
    }
}
