//! Sum-rate sweeps over transmit power and the empirical DOF slope.

use serde::{Deserialize, Serialize};

use super::trials::{plan_for, run_link, Link, SimConfig, SimResult};
use crate::direction::analyze_plan;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub points: Vec<SimResult>,
    /// Points used in the slope fit.
    pub fitted: Vec<bool>,
    /// `S (1-eps)/(m_eff+eps)` with `S` desired streams.
    pub scheduled_slope: f64,
    /// Least-squares slope of sum rate against `0.5 log2 P`.
    pub empirical_slope: f64,
}

/// `S (1 - eps) / (m_eff + eps)`.
pub fn scheduled_slope(streams: usize, m_eff: usize, epsilon: f64) -> f64 {
    streams as f64 * (1.0 - epsilon) / (m_eff as f64 + epsilon)
}

/// Least-squares slope of `y` on `x`.
pub fn ls_slope(x: &[f64], y: &[f64]) -> Option<f64> {
    let n = x.len();
    if n < 2 || n != y.len() {
        return None;
    }
    let mx = x.iter().sum::<f64>() / n as f64;
    let my = y.iter().sum::<f64>() / n as f64;
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

/// Log-spaced grid from `lo` to `hi` with `per_decade` points per decade.
pub fn log_grid(lo: f64, hi: f64, per_decade: u32) -> Result<Vec<f64>> {
    if !(lo > 0.0 && hi >= lo && hi.is_finite()) || per_decade == 0 {
        return Err(Error::InvalidParameter(format!(
            "bad power grid {lo}..{hi}"
        )));
    }
    let (a, b) = (lo.log10(), hi.log10());
    let steps = ((b - a) * per_decade as f64).round() as u32;
    Ok((0..=steps)
        .map(|i| {
            if i == steps {
                hi
            } else {
                10f64.powf(a + i as f64 / per_decade as f64)
            }
        })
        .collect())
}

/// Runs `base` at every power in `grid` and fits the sum-rate slope over the
/// points whose streams all meet the SER target. Points where `Q = 1` carry
/// no data and are left out of the fit.
pub fn dof_sweep(base: &SimConfig, grid: &[f64]) -> Result<SweepResult> {
    let (lo, hi) = grid.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), &p| {
        (lo.min(p), hi.max(p))
    });
    if grid.is_empty() || hi / lo < 1e4 * (1.0 - 1e-12) {
        return Err(Error::InvalidParameter(
            "power grid must span at least four decades".into(),
        ));
    }
    let plan = plan_for(base.scheme)?;
    let analysis = analyze_plan(&plan)?;
    let scheduled = scheduled_slope(analysis.total_desired, analysis.m_eff, base.epsilon);

    let mut points = Vec::with_capacity(grid.len());
    for &p in grid {
        let cfg = SimConfig {
            power: p,
            ..base.clone()
        };
        let link = Link::with_plan(plan.clone(), &cfg)?;
        points.push(run_link(&link, &cfg));
    }
    let fitted: Vec<bool> = points
        .iter()
        .map(|r| r.q > 1 && r.max_ser() <= base.ser_target)
        .collect();
    let (x, y): (Vec<f64>, Vec<f64>) = points
        .iter()
        .zip(&fitted)
        .filter(|(_, &f)| f)
        .map(|(r, _)| (0.5 * r.power.log2(), r.sum_rate))
        .unzip();
    let empirical = ls_slope(&x, &y).ok_or(Error::SerTargetUnmet {
        target: base.ser_target,
    })?;
    Ok(SweepResult {
        points,
        fitted,
        scheduled_slope: scheduled,
        empirical_slope: empirical,
    })
}
