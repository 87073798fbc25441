//! K-user direction sets with each monomial packed into one integer.
//!
//! The exponent of `h_jl` occupies a fixed-width bit field, so multiplying
//! every element by a gain symbol is adding a constant. Adding a constant
//! preserves order, which turns subset and disjointness tests into linear
//! merges of sorted vectors.

use super::kuser::{interference_hull_count, kuser_direction_count};
use super::monomial::{GainSymbol, Monomial};
use crate::error::{Error, Result};

/// Default cap on packed enumeration size.
pub const DEFAULT_PACKED_CAP: u128 = 50_000_000;

/// Bit layout of packed monomials over `h_jl`, `1 <= j, l <= K`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PackedLayout {
    pub k: usize,
    /// Width of each exponent field.
    pub bits: u32,
}

impl PackedLayout {
    /// Fields wide enough for exponents up to `max_exponent`.
    pub fn new(k: usize, max_exponent: u32) -> Result<PackedLayout> {
        if k < 2 {
            return Err(Error::InvalidParameter(format!(
                "K must be at least 2, got {k}"
            )));
        }
        let bits = 32 - max_exponent.leading_zeros();
        let bits = bits.max(1);
        if (k * k) as u128 * bits as u128 > 128 {
            return Err(Error::InvalidParameter(format!(
                "K = {k} with exponents up to {max_exponent} does not fit 128 bits"
            )));
        }
        Ok(PackedLayout { k, bits })
    }

    fn offset(&self, rx: usize, tx: usize) -> u32 {
        ((rx - 1) * self.k + (tx - 1)) as u32 * self.bits
    }

    /// Packed form of the single symbol `h_{rx,tx}`.
    pub fn symbol(&self, rx: usize, tx: usize) -> u128 {
        assert!((1..=self.k).contains(&rx) && (1..=self.k).contains(&tx));
        1u128 << self.offset(rx, tx)
    }

    pub fn exponent(&self, key: u128, rx: usize, tx: usize) -> u32 {
        ((key >> self.offset(rx, tx)) & ((1u128 << self.bits) - 1)) as u32
    }

    pub fn unpack(&self, key: u128) -> Monomial {
        Monomial::from_exponents(
            (1..=self.k)
                .flat_map(|j| (1..=self.k).map(move |l| (j, l)))
                .map(|(j, l)| (GainSymbol::h(j, l), self.exponent(key, j, l))),
        )
    }

    /// Inverse of [`PackedLayout::unpack`]; `None` for symbols outside the
    /// layout or exponents too large for a field.
    pub fn pack(&self, m: &Monomial) -> Option<u128> {
        let mut key = 0u128;
        for (s, e) in m.iter() {
            let GainSymbol::H { rx, tx } = s else {
                return None;
            };
            let (rx, tx) = (rx as usize, tx as usize);
            if rx > self.k || tx > self.k || e >= (1 << self.bits) {
                return None;
            }
            key |= (e as u128) << self.offset(rx, tx);
        }
        Some(key)
    }

    /// All off-diagonal exponent assignments with `h_jl` bounded by
    /// `bound(j, l)`, sorted and free of duplicates.
    fn enumerate(&self, bound: impl Fn(usize, usize) -> u32) -> Vec<u128> {
        let vars: Vec<(u32, u32)> = (1..=self.k)
            .flat_map(|j| (1..=self.k).map(move |l| (j, l)))
            .filter(|(j, l)| j != l)
            .map(|(j, l)| (self.offset(j, l), bound(j, l)))
            .collect();
        let total: usize = vars.iter().map(|&(_, b)| b as usize + 1).product();
        let mut out = Vec::with_capacity(total);
        let mut exps = vec![0u32; vars.len()];
        let mut key = 0u128;
        loop {
            out.push(key);
            let mut pos = 0;
            loop {
                if pos == vars.len() {
                    out.sort_unstable();
                    out.dedup();
                    return out;
                }
                let (off, b) = vars[pos];
                if exps[pos] < b {
                    exps[pos] += 1;
                    key += 1u128 << off;
                    break;
                }
                key -= (exps[pos] as u128) << off;
                exps[pos] = 0;
                pos += 1;
            }
        }
    }
}

fn check(what: &'static str, count: Option<u128>, cap: u128) -> Result<()> {
    match count {
        Some(c) if c <= cap => Ok(()),
        other => Err(Error::CapExceeded {
            what,
            requested: other.unwrap_or(u128::MAX),
            cap,
        }),
    }
}

/// Layout with room for every exponent of the K-user construction after one
/// more gain factor.
pub fn kuser_layout(k: usize, n: u32) -> Result<PackedLayout> {
    if n < 1 {
        return Err(Error::InvalidParameter(format!(
            "n must be at least 1, got {n}"
        )));
    }
    PackedLayout::new(k, n + 1)
}

/// Packed transmit directions of user `i` (1-based), sorted.
pub fn packed_kuser_directions(
    layout: &PackedLayout,
    n: u32,
    i: usize,
    cap: u128,
) -> Result<Vec<u128>> {
    let k = layout.k;
    if i < 1 || i > k {
        return Err(Error::InvalidParameter(format!(
            "transmitter index {i} outside 1..={k}"
        )));
    }
    check("transmit directions", kuser_direction_count(k, n), cap)?;
    Ok(layout.enumerate(|_, l| if l == i { n - 1 } else { n }))
}

/// Packed interference hull, sorted.
pub fn packed_interference_hull(layout: &PackedLayout, n: u32, cap: u128) -> Result<Vec<u128>> {
    check(
        "interference hull",
        interference_hull_count(layout.k, n),
        cap,
    )?;
    Ok(layout.enumerate(|_, _| n))
}

/// Whether `set + shift` is a subset of `other`; both sorted.
pub fn shifted_subset(set: &[u128], shift: u128, other: &[u128]) -> bool {
    let mut j = 0;
    for &x in set {
        let x = x + shift;
        while j < other.len() && other[j] < x {
            j += 1;
        }
        if j == other.len() || other[j] != x {
            return false;
        }
    }
    true
}

/// Whether `set + shift` shares no element with `other`; both sorted.
pub fn shifted_disjoint(set: &[u128], shift: u128, other: &[u128]) -> bool {
    let mut j = 0;
    for &x in set {
        let x = x + shift;
        while j < other.len() && other[j] < x {
            j += 1;
        }
        if j < other.len() && other[j] == x {
            return false;
        }
    }
    true
}
