//! Exact minimization of `|sum_j c_j d_j|` over an integer box.
//!
//! The real coefficients are `f64`, i.e. dyadic rationals, so after scaling by
//! a common power of two they become integers and every linear form is
//! evaluated exactly in `i128`. One coordinate (the pivot) is never
//! enumerated: for fixed values of the others the form is convex in the pivot,
//! so only the two integers bracketing the real minimizer (clamped to the
//! box) can be optimal.

use std::cmp::Ordering;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default cap on enumerated (non-pivot) points.
pub const DEFAULT_SEARCH_CAP: u128 = 1_000_000_000;

/// `mantissa * 2^exp2`, exact.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExactValue {
    pub mantissa: i128,
    pub exp2: i32,
}

impl ExactValue {
    pub fn to_f64(self) -> f64 {
        let mut x = self.mantissa as f64;
        let mut e = self.exp2;
        while e > 1000 {
            x *= 2f64.powi(1000);
            e -= 1000;
        }
        while e < -1000 {
            x *= 2f64.powi(-1000);
            e += 1000;
        }
        x * 2f64.powi(e)
    }

    pub fn is_zero(self) -> bool {
        self.mantissa == 0
    }
}

/// Coefficients rescaled to integers: `values[j] = coeffs[j] * 2^exp2`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FixedPoint {
    pub coeffs: Vec<i128>,
    pub exp2: i32,
}

fn decompose(x: f64) -> (i128, i32) {
    if x == 0.0 {
        return (0, 0);
    }
    let raw = x.abs().to_bits();
    let biased = (raw >> 52) as i32;
    let frac = raw & ((1u64 << 52) - 1);
    let (mut m, mut e) = if biased == 0 {
        (frac, -1074)
    } else {
        (frac | (1u64 << 52), biased - 1075)
    };
    let tz = m.trailing_zeros();
    m >>= tz;
    e += tz as i32;
    let m = m as i128;
    (if x < 0.0 { -m } else { m }, e)
}

impl FixedPoint {
    /// Scales `values` so that `sum_j |values_j| * bounds_j` fits in an
    /// `i128` without overflow.
    pub fn new(values: &[f64], bounds: &[i64]) -> Result<FixedPoint> {
        assert_eq!(values.len(), bounds.len());
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "non-finite direction value {v}"
            )));
        }
        let parts: Vec<(i128, i32)> = values.iter().map(|&v| decompose(v)).collect();
        let exp2 = parts
            .iter()
            .filter(|(m, _)| *m != 0)
            .map(|(_, e)| *e)
            .min()
            .unwrap_or(0);
        let too_wide = || {
            Error::DynamicRange(format!(
                "values {values:?} with bounds {bounds:?} overflow 127-bit fixed point"
            ))
        };
        let mut coeffs = Vec::with_capacity(values.len());
        let mut total: u128 = 0;
        for (&(m, e), &b) in parts.iter().zip(bounds) {
            let c = if m == 0 {
                0
            } else {
                let shift = (e - exp2) as u32;
                if shift > 120 {
                    return Err(too_wide());
                }
                m.checked_mul(1i128 << shift).ok_or_else(too_wide)?
            };
            let term = c
                .unsigned_abs()
                .checked_mul(b.unsigned_abs() as u128)
                .ok_or_else(too_wide)?;
            total = total.checked_add(term).ok_or_else(too_wide)?;
            coeffs.push(c);
        }
        if total >= (1u128 << 125) {
            return Err(too_wide());
        }
        Ok(FixedPoint { coeffs, exp2 })
    }

    pub fn exact(&self, mantissa: i128) -> ExactValue {
        ExactValue {
            mantissa,
            exp2: self.exp2,
        }
    }
}

#[derive(Debug, Clone)]
struct Best {
    value: u128,
    tuple: Vec<i64>,
}

impl Best {
    fn key_cmp(&self, other: &Best) -> Ordering {
        self.value
            .cmp(&other.value)
            .then_with(|| self.tuple.cmp(&other.tuple))
    }

    fn offer(slot: &mut Option<Best>, value: u128, tuple: &[i64]) {
        let better = match slot {
            None => true,
            Some(b) => value < b.value || (value == b.value && tuple < b.tuple.as_slice()),
        };
        if better {
            *slot = Some(Best {
                value,
                tuple: tuple.to_vec(),
            });
        }
    }
}

fn merge(a: Option<Best>, b: Option<Best>) -> Option<Best> {
    match (a, b) {
        (None, x) | (x, None) => x,
        (Some(a), Some(b)) => Some(if b.key_cmp(&a) == Ordering::Less {
            b
        } else {
            a
        }),
    }
}

fn floor_div(t: i128, c: i128) -> i128 {
    if c > 0 {
        t.div_euclid(c)
    } else {
        (-t).div_euclid(-c)
    }
}

/// Number of non-pivot points the search enumerates.
pub fn search_size(bounds: &[i64], pivot: usize) -> Option<u128> {
    bounds
        .iter()
        .enumerate()
        .filter(|(j, _)| *j != pivot)
        .try_fold(1u128, |acc, (_, &b)| acc.checked_mul(2 * b as u128 + 1))
}

/// Minimum of `|sum_j coeffs_j d_j|` over nonzero integer `d` with
/// `|d_j| <= bounds_j`. Ties go to the lexicographically smallest `d`.
/// Returns `None` when the box holds no nonzero point.
pub fn box_min(
    coeffs: &[i128],
    bounds: &[i64],
    pivot: usize,
    cap: u128,
) -> Result<Option<(u128, Vec<i64>)>> {
    let n = coeffs.len();
    assert_eq!(n, bounds.len());
    assert!(pivot < n);
    if bounds.iter().any(|&b| b < 0) {
        return Err(Error::InvalidParameter("negative search bound".into()));
    }
    let size = search_size(bounds, pivot).unwrap_or(u128::MAX);
    if size > cap {
        return Err(Error::CapExceeded {
            what: "lattice search points",
            requested: size,
            cap,
        });
    }
    let others: Vec<usize> = (0..n).filter(|&j| j != pivot).collect();

    let best = match others.first() {
        None => scan(coeffs, bounds, pivot, &others, None),
        Some(&outer) => {
            let r = bounds[outer];
            (-r..=r)
                .into_par_iter()
                .map(|o| scan(coeffs, bounds, pivot, &others, Some(o)))
                .reduce(|| None, merge)
        }
    };
    Ok(best.map(|b| (b.value, b.tuple)))
}

// Enumerates every non-pivot point whose outermost coordinate equals `outer`.
fn scan(
    coeffs: &[i128],
    bounds: &[i64],
    pivot: usize,
    others: &[usize],
    outer: Option<i64>,
) -> Option<Best> {
    let n = coeffs.len();
    let cp = coeffs[pivot];
    let rp = bounds[pivot] as i128;
    let mut d = vec![0i64; n];
    let mut rest: i128 = 0;
    if let Some(o) = outer {
        d[others[0]] = o;
        rest += coeffs[others[0]] * o as i128;
    }
    let inner = if outer.is_some() {
        &others[1..]
    } else {
        others
    };
    for &j in inner {
        d[j] = -bounds[j];
        rest += coeffs[j] * d[j] as i128;
    }

    let mut best: Option<Best> = None;
    loop {
        let origin = rest == 0 && others.iter().all(|&j| d[j] == 0);
        let mut candidates = [0i128; 2];
        let count;
        if origin && cp != 0 {
            candidates = [-1, 1];
            count = if rp >= 1 { 2 } else { 0 };
        } else if origin {
            candidates[0] = -rp;
            count = if rp >= 1 { 1 } else { 0 };
        } else if cp == 0 {
            candidates[0] = -rp;
            count = 1;
        } else {
            let f = floor_div(-rest, cp);
            candidates = [f.clamp(-rp, rp), (f + 1).clamp(-rp, rp)];
            count = 2;
        }
        for &c in &candidates[..count] {
            let value = (rest + cp * c).unsigned_abs();
            let beats = match &best {
                None => true,
                Some(b) => value <= b.value,
            };
            if beats {
                d[pivot] = c as i64;
                Best::offer(&mut best, value, &d);
            }
        }
        d[pivot] = 0;

        // odometer over `inner`, last coordinate fastest
        let mut pos = inner.len();
        loop {
            if pos == 0 {
                return best;
            }
            pos -= 1;
            let j = inner[pos];
            if d[j] < bounds[j] {
                d[j] += 1;
                rest += coeffs[j];
                break;
            }
            rest -= coeffs[j] * (2 * bounds[j]) as i128;
            d[j] = -bounds[j];
        }
    }
}
