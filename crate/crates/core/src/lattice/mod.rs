//! Diophantine minimum searches, received-constellation minimum distance and
//! the power/amplitude/level sizing rules.

mod search;

pub use search::{box_min, search_size, ExactValue, FixedPoint, DEFAULT_SEARCH_CAP};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Per-stream alphabet `A * {-(Q-1), ..., Q-1}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConstellationSpec {
    pub q: u64,
    pub amplitude: f64,
}

impl ConstellationSpec {
    pub fn new(q: u64, amplitude: f64) -> Result<Self> {
        if q < 1 {
            return Err(Error::InvalidParameter("Q must be at least 1".into()));
        }
        if !(amplitude > 0.0 && amplitude.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "amplitude {amplitude} must be positive"
            )));
        }
        Ok(ConstellationSpec { q, amplitude })
    }

    /// Largest symbol magnitude, `Q - 1`.
    pub fn max_symbol(&self) -> i64 {
        self.q as i64 - 1
    }

    pub fn alphabet_size(&self) -> u64 {
        2 * self.q - 1
    }
}

/// Result of [`khintchine_min`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KhintchineMin {
    pub value: f64,
    pub exact: ExactValue,
    /// `(p, q_1, ..., q_m)`.
    pub argmin: Vec<i64>,
}

/// Minimum of `|p + v.q|` over `p` in Z and `q` in `[-Q, Q]^m`, excluding
/// `(p, q) = 0`.
pub fn khintchine_min(v: &[f64], q_max: u64) -> Result<KhintchineMin> {
    khintchine_min_capped(v, q_max, DEFAULT_SEARCH_CAP)
}

pub fn khintchine_min_capped(v: &[f64], q_max: u64, cap: u128) -> Result<KhintchineMin> {
    if v.is_empty() {
        return Err(Error::InvalidParameter(
            "need at least one direction value".into(),
        ));
    }
    if q_max < 1 {
        return Err(Error::InvalidParameter("Q must be at least 1".into()));
    }
    let q = i64::try_from(q_max).map_err(|_| Error::InvalidParameter("Q too large".into()))?;
    // the nearest integer to -v.q never exceeds this
    let p_bound = (v.iter().map(|x| x.abs()).sum::<f64>() * q as f64).ceil() as i64 + 1;
    let mut values = Vec::with_capacity(v.len() + 1);
    values.push(1.0);
    values.extend_from_slice(v);
    let mut bounds = vec![q; v.len() + 1];
    bounds[0] = p_bound;
    let fp = FixedPoint::new(&values, &bounds)?;
    let (mantissa, argmin) =
        box_min(&fp.coeffs, &bounds, 0, cap)?.expect("box contains q = 0, p = 1");
    let exact = fp.exact(mantissa as i128);
    Ok(KhintchineMin {
        value: exact.to_f64(),
        exact,
        argmin,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KappaRow {
    pub q: u64,
    pub min_value: f64,
    /// `min_value * Q^{m + epsilon}`.
    pub scaled_value: f64,
    pub argmin: Vec<i64>,
}

/// Empirical lower envelope of `|p + v.q| * Q^{m+eps}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KappaEstimate {
    pub values: Vec<f64>,
    pub m: usize,
    pub epsilon: f64,
    pub rows: Vec<KappaRow>,
    pub kappa_hat: f64,
}

impl KappaEstimate {
    pub fn is_positive(&self) -> bool {
        self.kappa_hat > 0.0
    }
}

pub fn empirical_kappa(v: &[f64], q_max: u64, epsilon: f64) -> Result<KappaEstimate> {
    empirical_kappa_capped(v, q_max, epsilon, DEFAULT_SEARCH_CAP)
}

pub fn empirical_kappa_capped(
    v: &[f64],
    q_max: u64,
    epsilon: f64,
    cap: u128,
) -> Result<KappaEstimate> {
    if q_max < 1 {
        return Err(Error::InvalidParameter("Q_max must be at least 1".into()));
    }
    let m = v.len();
    let rows = (1..=q_max)
        .map(|q| {
            let k = khintchine_min_capped(v, q, cap)?;
            Ok(KappaRow {
                q,
                min_value: k.value,
                scaled_value: k.value * (q as f64).powf(m as f64 + epsilon),
                argmin: k.argmin,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let kappa_hat = rows
        .iter()
        .map(|r| r.scaled_value)
        .fold(f64::INFINITY, f64::min);
    Ok(KappaEstimate {
        values: v.to_vec(),
        m,
        epsilon,
        rows,
        kappa_hat,
    })
}

/// One coordinate of a received constellation: a direction value and the
/// largest integer difference two labels can have along it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StreamRange {
    pub value: f64,
    pub max_difference: i64,
    pub is_unit: bool,
}

impl StreamRange {
    /// A stream summing `contributors` symbols of `(-Q, Q)`: differences up
    /// to `contributors * (2Q - 2)`.
    pub fn new(value: f64, q: u64, contributors: usize, is_unit: bool) -> StreamRange {
        StreamRange {
            value,
            max_difference: contributors as i64 * (2 * q as i64 - 2),
            is_unit,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MinDistance {
    /// `A` times the exact minimum.
    pub value: f64,
    /// Minimum at unit amplitude.
    pub exact: ExactValue,
    /// Difference vector attaining it.
    pub argmin: Vec<i64>,
}

/// Minimum distance of the received constellation
/// `A * sum_j value_j * u_j`, searched over difference vectors.
pub fn min_distance(streams: &[StreamRange], amplitude: f64) -> Result<MinDistance> {
    min_distance_capped(streams, amplitude, DEFAULT_SEARCH_CAP)
}

pub fn min_distance_capped(
    streams: &[StreamRange],
    amplitude: f64,
    cap: u128,
) -> Result<MinDistance> {
    if streams.is_empty() {
        return Err(Error::InvalidParameter("no streams".into()));
    }
    if !(amplitude > 0.0 && amplitude.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "amplitude {amplitude} must be positive"
        )));
    }
    let values: Vec<f64> = streams.iter().map(|s| s.value).collect();
    let bounds: Vec<i64> = streams.iter().map(|s| s.max_difference).collect();
    let fp = FixedPoint::new(&values, &bounds)?;
    let pivot = streams.iter().position(|s| s.is_unit).unwrap_or_else(|| {
        // widest coordinate; first on ties
        let widest = *bounds.iter().max().expect("non-empty");
        bounds
            .iter()
            .position(|&b| b == widest)
            .expect("max exists")
    });
    let Some((mantissa, argmin)) = box_min(&fp.coeffs, &bounds, pivot, cap)? else {
        return Err(Error::InvalidParameter(
            "constellation has a single point; minimum distance undefined".into(),
        ));
    };
    let exact = fp.exact(mantissa as i128);
    if exact.is_zero() {
        return Err(Error::Degenerate(format!(
            "two labels map to the same received point (difference {argmin:?})"
        )));
    }
    Ok(MinDistance {
        value: amplitude * exact.to_f64(),
        exact,
        argmin,
    })
}

/// `max(1, floor(gamma * P^{(1-eps)/(2(m_eff+eps))}))`.
pub fn q_for_power(p: f64, m_eff: usize, epsilon: f64, gamma: f64) -> Result<u64> {
    if !(p > 0.0 && p.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "power {p} must be positive"
        )));
    }
    if m_eff < 1 {
        return Err(Error::InvalidParameter("m_eff must be at least 1".into()));
    }
    if !(0.0..1.0).contains(&epsilon) {
        return Err(Error::InvalidParameter(format!(
            "epsilon {epsilon} outside [0, 1)"
        )));
    }
    if !(gamma > 0.0 && gamma.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "gamma {gamma} must be positive"
        )));
    }
    let exponent = (1.0 - epsilon) / (2.0 * (m_eff as f64 + epsilon));
    let x = gamma * p.powf(exponent);
    // absorb pow() rounding just below an integer, e.g. 1e6^(1/6)
    let snapped = x.round();
    let q = if (snapped - x).abs() <= 1e-9 * x {
        snapped
    } else {
        x.floor()
    };
    Ok((q as u64).max(1))
}

/// Peak-power amplitude: the largest transmit value
/// `A (Q-1) sum_j |T_j|` equals `sqrt(P)`.
pub fn amplitude_for_power(p: f64, direction_values: &[f64], q: u64) -> Result<f64> {
    if !(p > 0.0 && p.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "power {p} must be positive"
        )));
    }
    if q <= 1 {
        return Ok(p.sqrt());
    }
    let spread: f64 = direction_values.iter().map(|v| v.abs()).sum();
    if !(spread > 0.0 && spread.is_finite()) {
        return Err(Error::InvalidParameter(
            "direction values must be nonzero and finite".into(),
        ));
    }
    Ok(p.sqrt() / ((q - 1) as f64 * spread))
}
