//! Noiseless received constellations and nearest-point decoding.

use serde::{Deserialize, Serialize};

use crate::channel::{evaluate_monomial, SymbolSource};
use crate::direction::{ReceivedProfile, StreamLabel};
use crate::error::{Error, Result};
use crate::lattice::{ConstellationSpec, FixedPoint, StreamRange};

/// Default cap on enumerated constellation points per receiver.
pub const DEFAULT_CONSTELLATION_CAP: u64 = 4_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum StreamKind {
    Desired(StreamLabel),
    /// Effective stream: the sum of the aligned contributors.
    Interference(Vec<StreamLabel>),
}

/// One coordinate of the received constellation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReceivedStream {
    pub kind: StreamKind,
    /// Numeric value of the received direction.
    pub value: f64,
    /// Symbols range over `-max_symbol..=max_symbol`.
    pub max_symbol: i64,
}

/// Sorted received points with their labels.
#[derive(Debug, Clone, PartialEq)]
pub struct ReceivedConstellation {
    pub streams: Vec<ReceivedStream>,
    /// Point values, `A * sum_j value_j u_j`, ascending.
    pub points: Vec<f64>,
    /// Mixed-radix label index of each point.
    index: Vec<u64>,
}

impl ReceivedConstellation {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Symbol tuple of the point at sorted position `pos`.
    pub fn label(&self, pos: usize) -> Vec<i64> {
        let mut rest = self.index[pos];
        let mut out = vec![0i64; self.streams.len()];
        for (j, s) in self.streams.iter().enumerate().rev() {
            let radix = 2 * s.max_symbol as u64 + 1;
            out[j] = (rest % radix) as i64 - s.max_symbol;
            rest /= radix;
        }
        out
    }

    /// Smallest gap between neighbouring points.
    pub fn min_gap(&self) -> Option<f64> {
        self.points
            .windows(2)
            .map(|w| w[1] - w[0])
            .min_by(f64::total_cmp)
    }
}

/// Coordinates of the received constellation at one receiver: desired
/// directions first, then effective interference directions.
pub fn received_streams(
    profile: &ReceivedProfile,
    channel: &impl SymbolSource,
    spec: &ConstellationSpec,
) -> Result<Vec<ReceivedStream>> {
    profile.ensure_c2()?;
    let base = spec.max_symbol();
    let mut streams = Vec::with_capacity(profile.m);
    for (dir, labels) in profile
        .desired_directions
        .iter()
        .zip(&profile.desired_streams)
    {
        streams.push(ReceivedStream {
            kind: StreamKind::Desired(labels[0]),
            value: evaluate_monomial(channel, dir)?,
            max_symbol: base,
        });
    }
    for (dir, labels) in profile
        .interference_directions
        .iter()
        .zip(&profile.contributors)
    {
        streams.push(ReceivedStream {
            kind: StreamKind::Interference(labels.clone()),
            value: evaluate_monomial(channel, dir)?,
            max_symbol: base * labels.len() as i64,
        });
    }
    Ok(streams)
}

/// Difference ranges of the received streams at one receiver, for
/// [`min_distance`](crate::lattice::min_distance).
pub fn stream_ranges(
    profile: &ReceivedProfile,
    channel: &impl SymbolSource,
    spec: &ConstellationSpec,
) -> Result<Vec<StreamRange>> {
    let streams = received_streams(profile, channel, spec)?;
    let units = profile
        .desired_directions
        .iter()
        .chain(profile.interference_directions.iter())
        .map(|d| d.is_unit());
    Ok(streams
        .iter()
        .zip(units)
        .map(|(s, is_unit)| StreamRange {
            value: s.value,
            max_difference: 2 * s.max_symbol,
            is_unit,
        })
        .collect())
}

/// Enumerates every noiseless received point. Labels must map to distinct
/// points; a repeated point is reported as a degenerate realization.
pub fn build_received_constellation(
    profile: &ReceivedProfile,
    channel: &impl SymbolSource,
    spec: &ConstellationSpec,
    cap: u64,
) -> Result<ReceivedConstellation> {
    let streams = received_streams(profile, channel, spec)?;
    build_from_streams(streams, spec.amplitude, cap)
}

pub fn build_from_streams(
    streams: Vec<ReceivedStream>,
    amplitude: f64,
    cap: u64,
) -> Result<ReceivedConstellation> {
    let size = streams
        .iter()
        .try_fold(1u128, |acc, s| {
            acc.checked_mul(2 * s.max_symbol as u128 + 1)
        })
        .unwrap_or(u128::MAX);
    if size > cap as u128 {
        return Err(Error::CapExceeded {
            what: "received constellation points",
            requested: size,
            cap: cap as u128,
        });
    }
    let values: Vec<f64> = streams.iter().map(|s| s.value).collect();
    let bounds: Vec<i64> = streams.iter().map(|s| s.max_symbol).collect();
    let fp = FixedPoint::new(&values, &bounds)?;

    let n = size as usize;
    let mut exact: Vec<(i128, u64)> = Vec::with_capacity(n);
    let mut u: Vec<i64> = bounds.iter().map(|b| -b).collect();
    let mut acc: i128 = fp.coeffs.iter().zip(&u).map(|(c, &x)| c * x as i128).sum();
    for idx in 0..n as u64 {
        exact.push((acc, idx));
        for j in (0..u.len()).rev() {
            if u[j] < bounds[j] {
                u[j] += 1;
                acc += fp.coeffs[j];
                break;
            }
            acc -= fp.coeffs[j] * (2 * bounds[j]) as i128;
            u[j] = -bounds[j];
        }
    }
    exact.sort_unstable();
    if let Some(w) = exact.windows(2).find(|w| w[0].0 == w[1].0) {
        return Err(Error::Degenerate(format!(
            "labels {} and {} give the same received point",
            w[0].1, w[1].1
        )));
    }
    let points = exact
        .iter()
        .map(|&(v, _)| amplitude * fp.exact(v).to_f64())
        .collect();
    let index = exact.into_iter().map(|(_, i)| i).collect();
    Ok(ReceivedConstellation {
        streams,
        points,
        index,
    })
}

/// Sorted position of the point nearest to `rx`; ties go to the lower value.
pub fn decode_position(rx: f64, points: &[f64]) -> usize {
    assert!(!points.is_empty(), "empty constellation");
    let hi = points.partition_point(|&p| p < rx);
    let mut best = if hi == 0 {
        0
    } else if hi == points.len() || (rx - points[hi - 1]).abs() <= (points[hi] - rx).abs() {
        hi - 1
    } else {
        hi
    };
    // rounding can make a farther point's distance equal to the nearest one
    let d = (points[best] - rx).abs();
    while best > 0 && (points[best - 1] - rx).abs() == d {
        best -= 1;
    }
    best
}

/// Labels of the nearest point.
pub fn decode(rx: f64, constellation: &ReceivedConstellation) -> Vec<i64> {
    constellation.label(decode_position(rx, &constellation.points))
}

/// Reference decoder: full scan, first strictly smaller distance wins.
pub fn decode_position_linear(rx: f64, points: &[f64]) -> usize {
    let mut best = 0;
    let mut best_d = f64::INFINITY;
    for (i, &p) in points.iter().enumerate() {
        let d = (p - rx).abs();
        if d < best_d {
            best = i;
            best_d = d;
        }
    }
    best
}
