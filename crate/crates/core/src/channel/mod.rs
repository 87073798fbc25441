//! Channel realizations and numeric evaluation of directions.
//!
//! Gains are drawn once per realization and held fixed (time-invariant
//! channel). Monomial directions are evaluated in extended precision and then
//! rounded to `f64`.

mod extended;

pub use extended::{bits_for_digits, ExtFloat};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::direction::{GainSymbol, Generator, Monomial};
use crate::error::{Error, Result};

pub const DEFAULT_PRECISION_DIGITS: u32 = 34;
pub const DEFAULT_DEGENERACY_TOL: f64 = 1e-12;

/// Gains are sampled with magnitude uniform on `[MIN_GAIN, MAX_GAIN]` and a
/// random sign.
pub const MIN_GAIN: f64 = 0.5;
pub const MAX_GAIN: f64 = 2.0;

/// AWGN at every receiver; the variance is fixed at one so that SNR equals the
/// transmit power.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    pub variance: f64,
}

impl Default for NoiseModel {
    fn default() -> Self {
        NoiseModel { variance: 1.0 }
    }
}

/// Anything that assigns real values to gain symbols.
pub trait SymbolSource {
    fn gain(&self, symbol: GainSymbol) -> Option<f64>;

    fn precision_digits(&self) -> u32 {
        DEFAULT_PRECISION_DIGITS
    }
}

mod decimal {
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    // Rust prints the shortest string that parses back to the same f64.
    pub fn serialize<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&x.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        let text = String::deserialize(d)?;
        text.parse().map_err(D::Error::custom)
    }

    pub mod matrix {
        use serde::{de::Error, Deserialize, Deserializer, Serializer};

        pub fn serialize<S: Serializer>(m: &[Vec<f64>], s: S) -> Result<S::Ok, S::Error> {
            let text: Vec<Vec<String>> = m
                .iter()
                .map(|r| r.iter().map(f64::to_string).collect())
                .collect();
            serde::Serialize::serialize(&text, s)
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Vec<f64>>, D::Error> {
            let text: Vec<Vec<String>> = Vec::deserialize(d)?;
            text.into_iter()
                .map(|r| {
                    r.into_iter()
                        .map(|t| t.parse().map_err(D::Error::custom))
                        .collect()
                })
                .collect()
        }
    }
}

/// Gains `h_jl` of a K-user channel (`gains[j-1][l-1]`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelRealization {
    pub k: usize,
    #[serde(with = "decimal::matrix")]
    pub gains: Vec<Vec<f64>>,
    pub rng_seed: u64,
    pub precision_digits: u32,
}

impl ChannelRealization {
    pub fn from_gains(gains: Vec<Vec<f64>>) -> Result<Self> {
        let k = gains.len();
        if k < 2 || gains.iter().any(|r| r.len() != k) {
            return Err(Error::InvalidParameter(
                "gain matrix must be K x K with K >= 2".into(),
            ));
        }
        check_gains(gains.iter().flatten().copied())?;
        Ok(ChannelRealization {
            k,
            gains,
            rng_seed: 0,
            precision_digits: DEFAULT_PRECISION_DIGITS,
        })
    }

    pub fn h(&self, rx: usize, tx: usize) -> f64 {
        self.gains[rx - 1][tx - 1]
    }
}

impl SymbolSource for ChannelRealization {
    fn gain(&self, symbol: GainSymbol) -> Option<f64> {
        match symbol {
            GainSymbol::H { rx, tx } => self
                .gains
                .get((rx as usize).checked_sub(1)?)?
                .get((tx as usize).checked_sub(1)?)
                .copied(),
            GainSymbol::Named(_) => None,
        }
    }

    fn precision_digits(&self) -> u32 {
        self.precision_digits
    }
}

/// Standard three-user channel
/// `y1 = G1 x1 + x2 + x3`, `y2 = x1 + G2 x2 + x3`, `y3 = x1 + G0 x2 + G3 x3`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StandardThreeUser {
    #[serde(with = "decimal")]
    pub g0: f64,
    #[serde(with = "decimal")]
    pub g1: f64,
    #[serde(with = "decimal")]
    pub g2: f64,
    #[serde(with = "decimal")]
    pub g3: f64,
}

impl StandardThreeUser {
    pub fn new(g0: f64, g1: f64, g2: f64, g3: f64) -> Result<Self> {
        check_gains([g0, g1, g2, g3])?;
        Ok(StandardThreeUser { g0, g1, g2, g3 })
    }
}

impl SymbolSource for StandardThreeUser {
    fn gain(&self, symbol: GainSymbol) -> Option<f64> {
        match symbol {
            GainSymbol::Named(Generator::G0) => Some(self.g0),
            GainSymbol::Named(Generator::G1) => Some(self.g1),
            GainSymbol::Named(Generator::G2) => Some(self.g2),
            GainSymbol::Named(Generator::G3) => Some(self.g3),
            _ => None,
        }
    }
}

/// Multiple-access channel `y = x1 + a x2 + b x3 + z`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MacChannel {
    #[serde(with = "decimal")]
    pub a: f64,
    #[serde(with = "decimal")]
    pub b: f64,
}

impl MacChannel {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        check_gains([a, b])?;
        Ok(MacChannel { a, b })
    }
}

impl SymbolSource for MacChannel {
    fn gain(&self, symbol: GainSymbol) -> Option<f64> {
        match symbol {
            GainSymbol::Named(Generator::A) => Some(self.a),
            GainSymbol::Named(Generator::B) => Some(self.b),
            _ => None,
        }
    }
}

/// Any supported channel, tagged for JSON replay.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "kebab-case")]
pub enum Channel {
    Gains(ChannelRealization),
    StandardThreeUser(StandardThreeUser),
    Mac(MacChannel),
}

impl SymbolSource for Channel {
    fn gain(&self, symbol: GainSymbol) -> Option<f64> {
        match self {
            Channel::Gains(c) => c.gain(symbol),
            Channel::StandardThreeUser(c) => c.gain(symbol),
            Channel::Mac(c) => c.gain(symbol),
        }
    }

    fn precision_digits(&self) -> u32 {
        match self {
            Channel::Gains(c) => c.precision_digits,
            _ => DEFAULT_PRECISION_DIGITS,
        }
    }
}

fn check_gains(gains: impl IntoIterator<Item = f64>) -> Result<()> {
    for g in gains {
        if !g.is_finite() || g == 0.0 {
            return Err(Error::InvalidParameter(format!(
                "gain {g} must be finite and nonzero"
            )));
        }
    }
    Ok(())
}

fn draw_gain(rng: &mut ChaCha8Rng) -> f64 {
    let magnitude = rng.random_range(MIN_GAIN..=MAX_GAIN);
    if rng.random::<bool>() {
        -magnitude
    } else {
        magnitude
    }
}

/// Independent gains, deterministic per seed.
pub fn sample_channel(seed: u64, k: usize) -> Result<ChannelRealization> {
    if k < 2 {
        return Err(Error::InvalidParameter(format!(
            "K must be at least 2, got {k}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let gains = (0..k)
        .map(|_| (0..k).map(|_| draw_gain(&mut rng)).collect())
        .collect();
    Ok(ChannelRealization {
        k,
        gains,
        rng_seed: seed,
        precision_digits: DEFAULT_PRECISION_DIGITS,
    })
}

pub fn sample_standard_three_user(seed: u64) -> StandardThreeUser {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    StandardThreeUser {
        g0: draw_gain(&mut rng),
        g1: draw_gain(&mut rng),
        g2: draw_gain(&mut rng),
        g3: draw_gain(&mut rng),
    }
}

pub fn sample_mac(seed: u64) -> MacChannel {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    MacChannel {
        a: draw_gain(&mut rng),
        b: draw_gain(&mut rng),
    }
}

/// `dims` gains drawn like [`sample_mac`]; the first two equal its `(a, b)`.
pub fn sample_direction_values(seed: u64, dims: usize) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..dims).map(|_| draw_gain(&mut rng)).collect()
}

/// Product of gains raised to their exponents, kept at `precision_digits`.
pub fn evaluate_monomial_ext(
    source: &impl SymbolSource,
    m: &Monomial,
    precision_digits: u32,
) -> Result<ExtFloat> {
    let bits = bits_for_digits(precision_digits);
    let mut acc = ExtFloat::one(bits);
    for (s, e) in m.iter() {
        let g = source
            .gain(s)
            .ok_or_else(|| Error::UnresolvedSymbol(s.to_string()))?;
        acc = acc.mul(&ExtFloat::from_f64(g, bits).powi(e));
    }
    Ok(acc)
}

/// [`evaluate_monomial_ext`] rounded to `f64`.
pub fn evaluate_monomial_at(
    source: &impl SymbolSource,
    m: &Monomial,
    precision_digits: u32,
) -> Result<f64> {
    Ok(evaluate_monomial_ext(source, m, precision_digits)?.to_f64())
}

pub fn evaluate_monomial(source: &impl SymbolSource, m: &Monomial) -> Result<f64> {
    evaluate_monomial_at(source, m, source.precision_digits())
}

/// Pairs of values closer than the relative tolerance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DegeneracyReport {
    /// `(i, j, relative difference)` with `values[i] <= values[j]`.
    pub collisions: Vec<(usize, usize, f64)>,
}

impl DegeneracyReport {
    pub fn is_ok(&self) -> bool {
        self.collisions.is_empty()
    }
}

fn relative_difference(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}

/// Flags numerically coincident values. For same-sign values the relative
/// difference grows with separation in sorted order, so checking neighbours
/// after sorting decides the question for every pair.
pub fn degeneracy_check(values: &[f64], rel_tol: f64) -> DegeneracyReport {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&i, &j| values[i].total_cmp(&values[j]).then(i.cmp(&j)));
    let collisions = order
        .windows(2)
        .filter_map(|w| {
            let d = relative_difference(values[w[0]], values[w[1]]);
            (d < rel_tol).then_some((w[0], w[1], d))
        })
        .collect();
    DegeneracyReport { collisions }
}
