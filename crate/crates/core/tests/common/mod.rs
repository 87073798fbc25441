//! Brute-force oracles shared by the integration tests and the acceptance run.
#![allow(dead_code)]

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use realign_core::channel::{sample_channel, sample_mac, sample_standard_three_user, Channel};
use realign_core::direction::{mac_plan, three_user_plan, x_channel_plan, Scheme, SignalingPlan};
use realign_core::lattice::{min_distance, ExactValue, StreamRange};
use realign_core::sim::{ls_slope, Link, SimConfig};

pub fn exact_rational(x: ExactValue) -> BigRational {
    let m = BigRational::from_integer(BigInt::from(x.mantissa));
    let two = BigRational::from_integer(BigInt::from(2));
    if x.exp2 >= 0 {
        m * num_traits::pow(two, x.exp2 as usize)
    } else {
        m / num_traits::pow(two, (-x.exp2) as usize)
    }
}

/// Every received point as an exact rational, then the smallest distance over
/// all pairs of distinct labels.
pub fn pairwise_min(values: &[f64], ranges: &[i64]) -> BigRational {
    let vals: Vec<BigRational> = values
        .iter()
        .map(|&v| BigRational::from_float(v).unwrap())
        .collect();
    let mut points = vec![BigRational::zero()];
    for (v, &r) in vals.iter().zip(ranges) {
        let mut next = Vec::with_capacity(points.len() * (2 * r as usize + 1));
        for p in &points {
            for u in -r..=r {
                next.push(p + v * BigRational::from_integer(BigInt::from(u)));
            }
        }
        points = next;
    }
    let mut best: Option<BigRational> = None;
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            let d = (&points[i] - &points[j]).abs();
            if best.as_ref().is_none_or(|b| d < *b) {
                best = Some(d);
            }
        }
    }
    best.expect("at least two points")
}

/// `|sum v_j d_j|` evaluated exactly.
pub fn attained(values: &[f64], diff: &[i64]) -> BigRational {
    values
        .iter()
        .zip(diff)
        .map(|(&v, &d)| {
            BigRational::from_float(v).unwrap() * BigRational::from_integer(BigInt::from(d))
        })
        .sum::<BigRational>()
        .abs()
}

/// Log-log slope of the MAC minimum distance over `Q = 2..=40` at unit
/// amplitude.
pub fn mac_dmin_slope(a: f64, b: f64) -> f64 {
    let (x, y): (Vec<f64>, Vec<f64>) = (2..=40u64)
        .map(|q| {
            let streams = [
                StreamRange::new(1.0, q, 1, true),
                StreamRange::new(a, q, 1, false),
                StreamRange::new(b, q, 1, false),
            ];
            let d = min_distance(&streams, 1.0).unwrap().value;
            ((q as f64).ln(), d.ln())
        })
        .unzip();
    ls_slope(&x, &y).unwrap()
}

pub fn noiseless(scheme: Scheme, channel: Channel) -> SimConfig {
    let mut cfg = SimConfig::new(scheme, channel, 1.0);
    cfg.noise_scale = 0.0;
    cfg
}

/// MAC, X channel and the three-user plan at `n = 1, 2` on seeded channels.
pub fn cases(seed: u64) -> Vec<(SignalingPlan, SimConfig)> {
    vec![
        (
            mac_plan(),
            noiseless(Scheme::Mac, Channel::Mac(sample_mac(seed))),
        ),
        (
            x_channel_plan(),
            noiseless(
                Scheme::XChannel,
                Channel::Gains(sample_channel(seed, 2).unwrap()),
            ),
        ),
        (
            three_user_plan(1).unwrap(),
            noiseless(
                Scheme::ThreeUser { n: 1 },
                Channel::StandardThreeUser(sample_standard_three_user(seed)),
            ),
        ),
        (
            three_user_plan(2).unwrap(),
            noiseless(
                Scheme::ThreeUser { n: 2 },
                Channel::StandardThreeUser(sample_standard_three_user(seed)),
            ),
        ),
    ]
}

/// First mismatch between sent and decoded desired symbols, if any.
pub fn round_trip_error(link: &Link, symbols: &[Vec<i64>]) -> Option<String> {
    let x = link.encode(symbols).unwrap();
    let y = link.propagate(&x);
    for (rx, &yr) in y.iter().enumerate() {
        for (label, got) in link.decode_desired(rx, yr) {
            if got != symbols[label.tx][label.index] {
                return Some(format!("rx {rx} stream {label} symbols {symbols:?}"));
            }
        }
    }
    None
}

/// Every symbol vector of `link`, as digits of the transmitted streams in
/// base `2Q - 1`.
pub fn all_symbol_vectors(link: &Link) -> impl Iterator<Item = Vec<Vec<i64>>> + '_ {
    let q = link.spec.q;
    let sizes: Vec<usize> = link.tx_values.iter().map(|v| v.len()).collect();
    let streams: usize = sizes.iter().sum();
    let radix = (2 * q - 1) as usize;
    let total = radix.pow(streams as u32);
    (0..total).map(move |code| {
        let mut rest = code;
        sizes
            .iter()
            .map(|&len| {
                (0..len)
                    .map(|_| {
                        let u = (rest % radix) as i64 - (q as i64 - 1);
                        rest /= radix;
                        u
                    })
                    .collect()
            })
            .collect()
    })
}
