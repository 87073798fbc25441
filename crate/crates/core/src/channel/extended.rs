//! Binary floating point with a configurable mantissa width.
//!
//! Values are `(-1)^neg * mantissa * 2^exp` with a big-integer mantissa that is
//! rounded (nearest, ties to even) to a fixed number of bits after every
//! multiplication. Conversion from `f64` is exact.

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtFloat {
    neg: bool,
    mantissa: BigUint,
    exp: i64,
    bits: u64,
}

/// Mantissa bits needed for `digits` significant decimal digits.
pub fn bits_for_digits(digits: u32) -> u64 {
    (digits as f64 * std::f64::consts::LOG2_10).ceil() as u64 + 1
}

impl ExtFloat {
    pub fn one(bits: u64) -> ExtFloat {
        ExtFloat {
            neg: false,
            mantissa: BigUint::one(),
            exp: 0,
            bits,
        }
    }

    /// Exact conversion; `x` must be finite.
    pub fn from_f64(x: f64, bits: u64) -> ExtFloat {
        assert!(x.is_finite(), "cannot widen a non-finite value");
        let neg = x.is_sign_negative();
        let raw = x.abs().to_bits();
        let biased = (raw >> 52) as i64;
        let frac = raw & ((1u64 << 52) - 1);
        let (m, e) = if biased == 0 {
            (frac, -1074)
        } else {
            (frac | (1u64 << 52), biased - 1075)
        };
        let mut out = ExtFloat {
            neg: neg && m != 0,
            mantissa: BigUint::from(m),
            exp: e,
            bits,
        };
        out.round();
        out
    }

    pub fn is_zero(&self) -> bool {
        self.mantissa.is_zero()
    }

    pub fn mul(&self, other: &ExtFloat) -> ExtFloat {
        let mut out = ExtFloat {
            neg: self.neg != other.neg,
            mantissa: &self.mantissa * &other.mantissa,
            exp: self.exp + other.exp,
            bits: self.bits.min(other.bits),
        };
        if out.mantissa.is_zero() {
            out.neg = false;
        }
        out.round();
        out
    }

    pub fn powi(&self, e: u32) -> ExtFloat {
        let mut acc = ExtFloat::one(self.bits);
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    fn round(&mut self) {
        self.round_to(self.bits);
    }

    fn round_to(&mut self, bits: u64) {
        let len = self.mantissa.bits();
        if len <= bits {
            return;
        }
        let shift = len - bits;
        let half = BigUint::one() << (shift - 1);
        let mask = (BigUint::one() << shift) - BigUint::one();
        let rem = &self.mantissa & &mask;
        let mut kept = &self.mantissa >> shift;
        let odd = (&kept & BigUint::one()) == BigUint::one();
        if rem > half || (rem == half && odd) {
            kept += BigUint::one();
        }
        self.mantissa = kept;
        self.exp += shift as i64;
    }

    /// Rounds to the nearest `f64` (after a first rounding to 53 bits).
    pub fn to_f64(&self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        let mut r = self.clone();
        r.round_to(53);
        let m = r.mantissa.to_u64().expect("53-bit mantissa") as f64;
        let v = ldexp(m, r.exp);
        if self.neg {
            -v
        } else {
            v
        }
    }
}

fn ldexp(mut x: f64, mut e: i64) -> f64 {
    while e > 1000 {
        x *= 2f64.powi(1000);
        e -= 1000;
    }
    while e < -1000 {
        x *= 2f64.powi(-1000);
        e += 1000;
    }
    x * 2f64.powi(e as i32)
}
