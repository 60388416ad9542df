//! Output flux and the two annual performance indicators.
//!
//! `pout = m c (T_ret - T_sup) / A` per hour. Hours below the operability
//! threshold are zeroed to give `p50`. `pf_t` is the share of all hours with
//! `p50 > 0` and `pf_p = 100 Σp50 / ΣI` is the yearly mean efficiency.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::climate::{ClimateSeries, Field};
use crate::collector::{simulate_collector, CollectorError, CollectorParams, RETURN_STATE};
use crate::statespace::Trajectory;

/// Operability threshold, W/m².
pub const DEFAULT_THRESHOLD: f64 = 50.0;

#[derive(Debug, Error)]
pub enum IndicatorError {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("empty series")]
    Empty,
    #[error("total irradiance is zero")]
    ZeroIrradiance,
    #[error("threshold must be finite and >= 0, got {0}")]
    InvalidThreshold(f64),
    #[error("warm-up of {warmup} h leaves no hours out of {hours}")]
    WarmupTooLong { warmup: usize, hours: usize },
    #[error(transparent)]
    Collector(#[from] CollectorError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerformanceResult {
    /// Hourly output flux, W/m². May be negative.
    pub pout: Vec<f64>,
    /// `pout` with sub-threshold hours zeroed, W/m².
    pub p50: Vec<f64>,
    /// Percentage of hours with `p50 > 0`.
    pub pf_t: f64,
    /// Yearly mean efficiency, %.
    pub pf_p: f64,
    pub threshold: f64,
}

/// Output flux for every simulated hour. The flux of hour `t` uses the
/// return temperature at the end of that hour, so the initial state is
/// skipped and the result has one value per input sample.
pub fn compute_pout(trajectory: &Trajectory, params: &CollectorParams) -> Result<Vec<f64>, IndicatorError> {
    if trajectory.state_count() != 3 {
        return Err(IndicatorError::Dimension(format!(
            "expected a 3-state collector trajectory, got {} states",
            trajectory.state_count()
        )));
    }
    let gain = params.mdot_c() / params.area;
    Ok(trajectory
        .states()
        .skip(1)
        .map(|x| gain * (x[RETURN_STATE] - params.t_sup))
        .collect())
}

/// Keeps values at or above `threshold`, zeroes the rest.
pub fn apply_threshold(pout: &[f64], threshold: f64) -> Vec<f64> {
    pout.iter()
        .map(|&p| if p >= threshold { p } else { 0.0 })
        .collect()
}

pub fn compute_pft(p50: &[f64]) -> Result<f64, IndicatorError> {
    if p50.is_empty() {
        return Err(IndicatorError::Empty);
    }
    let operating = p50.iter().filter(|&&p| p > 0.0).count();
    Ok(100.0 * operating as f64 / p50.len() as f64)
}

pub fn compute_pfp(p50: &[f64], irradiance: &[f64]) -> Result<f64, IndicatorError> {
    if p50.len() != irradiance.len() {
        return Err(IndicatorError::Dimension(format!(
            "{} flux values vs {} irradiance values",
            p50.len(),
            irradiance.len()
        )));
    }
    if p50.is_empty() {
        return Err(IndicatorError::Empty);
    }
    let total_sun: f64 = irradiance.iter().sum();
    if total_sun <= 0.0 {
        return Err(IndicatorError::ZeroIrradiance);
    }
    Ok(100.0 * p50.iter().sum::<f64>() / total_sun)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvalOptions {
    /// Operability threshold, W/m².
    pub threshold: f64,
    /// Leading hours excluded from both indicators.
    pub warmup_hours: usize,
}

impl Default for EvalOptions {
    fn default() -> Self {
        Self {
            threshold: DEFAULT_THRESHOLD,
            warmup_hours: 0,
        }
    }
}

/// Simulates `params` under `climate` and computes both indicators.
pub fn evaluate(params: &CollectorParams, climate: &ClimateSeries, threshold: f64) -> Result<PerformanceResult, IndicatorError> {
    evaluate_with(
        params,
        climate,
        &EvalOptions {
            threshold,
            ..Default::default()
        },
    )
}

pub fn evaluate_with(
    params: &CollectorParams,
    climate: &ClimateSeries,
    options: &EvalOptions,
) -> Result<PerformanceResult, IndicatorError> {
    let threshold = options.threshold;
    if !(threshold.is_finite() && threshold >= 0.0) {
        return Err(IndicatorError::InvalidThreshold(threshold));
    }
    let hours = climate.len();
    if options.warmup_hours >= hours {
        return Err(IndicatorError::WarmupTooLong {
            warmup: options.warmup_hours,
            hours,
        });
    }
    let trajectory = simulate_collector(params, climate)?;
    evaluate_trajectory(params, climate, &trajectory, options)
}

/// Indicators from an already simulated `trajectory` of `params` under
/// `climate`.
pub fn evaluate_trajectory(
    params: &CollectorParams,
    climate: &ClimateSeries,
    trajectory: &Trajectory,
    options: &EvalOptions,
) -> Result<PerformanceResult, IndicatorError> {
    let threshold = options.threshold;
    if !(threshold.is_finite() && threshold >= 0.0) {
        return Err(IndicatorError::InvalidThreshold(threshold));
    }
    let hours = climate.len();
    if trajectory.len() != hours + 1 {
        return Err(IndicatorError::Dimension(format!(
            "trajectory of {} states for {hours} climate hours",
            trajectory.len()
        )));
    }
    if options.warmup_hours >= hours {
        return Err(IndicatorError::WarmupTooLong {
            warmup: options.warmup_hours,
            hours,
        });
    }
    let pout = compute_pout(trajectory, params)?;
    let p50 = apply_threshold(&pout, threshold);
    let irradiance = climate.column(Field::Isgh);
    let skip = options.warmup_hours;
    let pf_t = compute_pft(&p50[skip..])?;
    // A sunless year has no efficiency to speak of; report 0 rather than fail.
    let pf_p = match compute_pfp(&p50[skip..], &irradiance[skip..]) {
        Err(IndicatorError::ZeroIrradiance) => 0.0,
        other => other?,
    };
    Ok(PerformanceResult {
        pout,
        p50,
        pf_t,
        pf_p,
        threshold,
    })
}

impl PerformanceResult {
    /// Checks the bounds every result must satisfy.
    pub fn invariants_hold(&self) -> bool {
        (0.0..=100.0).contains(&self.pf_t)
            && self.pf_p >= 0.0
            && self.pout.len() == self.p50.len()
            && self.p50.iter().all(|&p| p == 0.0 || p >= self.threshold)
    }
}
