//! Closed-form DOF expressions and the partial-alignment efficiency count.

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use super::kuser::DEFAULT_ENUMERATION_CAP;
use super::monomial::{DirectionSet, Generator, Monomial};
use crate::error::{Error, Result};

/// Partial alignment of three transmitters at two receivers.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlignmentEfficiency {
    pub n: u32,
    /// `n^3` transmit directions.
    pub l1: u64,
    /// Size of `aT ∪ bT ∪ cT` at the second receiver.
    pub l2: u64,
    pub eta: Ratio<u64>,
}

/// Counts `L2 = |aT ∪ bT ∪ cT|` for `T = {a^s1 b^s2 c^s3 : 0 <= s_i <= n-1}`
/// by explicit set union.
pub fn alignment_efficiency(n: u32) -> Result<AlignmentEfficiency> {
    alignment_efficiency_capped(n, DEFAULT_ENUMERATION_CAP)
}

pub fn alignment_efficiency_capped(n: u32, cap: u128) -> Result<AlignmentEfficiency> {
    if n < 1 {
        return Err(Error::InvalidParameter(format!(
            "n must be at least 1, got {n}"
        )));
    }
    let l1 = (n as u128).pow(3);
    if 3 * l1 > cap {
        return Err(Error::CapExceeded {
            what: "partial alignment directions",
            requested: 3 * l1,
            cap,
        });
    }
    let transmit: DirectionSet = (0..n)
        .flat_map(|a| (0..n).flat_map(move |b| (0..n).map(move |c| (a, b, c))))
        .map(|(a, b, c)| {
            Monomial::from_exponents([(Generator::A, a), (Generator::B, b), (Generator::C, c)])
        })
        .collect();
    let received: DirectionSet = [Generator::A, Generator::B, Generator::C]
        .into_iter()
        .flat_map(|g| transmit.shifted(&Monomial::symbol(g)).as_slice().to_vec())
        .collect();
    let l1 = transmit.len() as u64;
    let l2 = received.len() as u64;
    Ok(AlignmentEfficiency {
        n,
        l1,
        l2,
        eta: Ratio::new(l1, l2),
    })
}

/// `(3n+1)/(2n+1)` for the asymmetric three-user design.
pub fn dof_formula_three_user(n: u32) -> Result<Ratio<u64>> {
    if n < 1 {
        return Err(Error::InvalidParameter(format!(
            "n must be at least 1, got {n}"
        )));
    }
    let n = n as u64;
    Ok(Ratio::new(3 * n + 1, 2 * n + 1))
}

/// `K / (1 + ((n+1)/n)^{K-1} + 1/(n^{K-1} (n+1)^{(K-1)^2}))`.
pub fn dof_formula_kuser(k: usize, n: u32) -> Result<f64> {
    if k < 2 {
        return Err(Error::InvalidParameter(format!(
            "K must be at least 2, got {k}"
        )));
    }
    if n < 1 {
        return Err(Error::InvalidParameter(format!(
            "n must be at least 1, got {n}"
        )));
    }
    let kf = k as f64;
    let nf = n as f64;
    let km1 = (k - 1) as i32;
    let ratio = ((nf + 1.0) / nf).powi(km1);
    let tail = 1.0 / (nf.powi(km1) * (nf + 1.0).powi(km1 * km1));
    Ok(kf / (1.0 + ratio + tail))
}
