//! Monte Carlo symbol-error measurement for one transmit power.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::constellation::{
    build_received_constellation, decode_position, ReceivedConstellation, StreamKind,
    DEFAULT_CONSTELLATION_CAP,
};
use crate::channel::{evaluate_monomial, Channel, SymbolSource};
use crate::direction::{
    analyze_plan, kuser_plan, mac_plan, three_user_plan, x_channel_plan, PlanAnalysis, Scheme,
    SignalingPlan, StreamLabel, DEFAULT_ENUMERATION_CAP,
};
use crate::error::{Error, Result};
use crate::lattice::{amplitude_for_power, q_for_power, ConstellationSpec};

pub const DEFAULT_EPSILON: f64 = 0.1;
pub const DEFAULT_GAMMA: f64 = 1.0;
pub const DEFAULT_SER_TARGET: f64 = 1e-2;

const TRIALS_PER_TASK: u64 = 2048;

/// Everything needed to reproduce one simulation run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub scheme: Scheme,
    pub channel: Channel,
    /// Transmit power; with unit noise variance this is also the SNR.
    pub power: f64,
    pub epsilon: f64,
    pub gamma: f64,
    pub trials: u64,
    pub seed: u64,
    pub ser_target: f64,
    pub constellation_cap: u64,
    /// Multiplies the unit-variance noise; 0 gives a noiseless run.
    #[serde(default = "default_noise_scale")]
    pub noise_scale: f64,
}

fn default_noise_scale() -> f64 {
    1.0
}

impl SimConfig {
    pub fn new(scheme: Scheme, channel: Channel, power: f64) -> SimConfig {
        SimConfig {
            scheme,
            channel,
            power,
            epsilon: DEFAULT_EPSILON,
            gamma: DEFAULT_GAMMA,
            trials: 10_000,
            seed: 0,
            ser_target: DEFAULT_SER_TARGET,
            constellation_cap: DEFAULT_CONSTELLATION_CAP,
            noise_scale: 1.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials < 1 {
            return Err(Error::InvalidParameter("trials must be at least 1".into()));
        }
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "epsilon {} outside (0, 1)",
                self.epsilon
            )));
        }
        if !(self.power > 0.0 && self.power.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "power {} must be positive",
                self.power
            )));
        }
        if !(self.noise_scale >= 0.0 && self.noise_scale.is_finite()) {
            return Err(Error::InvalidParameter(
                "noise scale must be non-negative".into(),
            ));
        }
        Ok(())
    }
}

pub fn plan_for(scheme: Scheme) -> Result<SignalingPlan> {
    match scheme {
        Scheme::Mac => Ok(mac_plan()),
        Scheme::XChannel => Ok(x_channel_plan()),
        Scheme::ThreeUser { n } => three_user_plan(n),
        Scheme::KUser { k, n } => kuser_plan(k, n, DEFAULT_ENUMERATION_CAP),
    }
}

/// Symbol errors of one desired stream.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StreamResult {
    pub receiver: usize,
    pub label: StreamLabel,
    pub errors: u64,
    pub ser: f64,
    /// `log2(2Q-1)` when `ser <= ser_target`, else 0.
    pub rate_bits: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimResult {
    pub power: f64,
    pub q: u64,
    pub amplitude: f64,
    pub m: usize,
    pub m_eff: usize,
    pub trials: u64,
    pub streams: Vec<StreamResult>,
    pub sum_rate: f64,
    /// Smallest neighbour gap of each receiver's constellation (`None` for a
    /// single point).
    pub min_distances: Vec<Option<f64>>,
}

impl SimResult {
    pub fn max_ser(&self) -> f64 {
        self.streams.iter().map(|s| s.ser).fold(0.0, f64::max)
    }
}

/// `log2(2Q - 1)` bits per channel use.
pub fn rate_of(q: u64) -> f64 {
    assert!(q >= 1, "Q must be at least 1");
    ((2 * q - 1) as f64).log2()
}

/// Constellation size, amplitude and receiver constellations for one power.
pub struct Link {
    pub plan: SignalingPlan,
    pub analysis: PlanAnalysis,
    pub spec: ConstellationSpec,
    /// Numeric transmit directions, `tx_values[tx][stream]`.
    pub tx_values: Vec<Vec<f64>>,
    /// Numeric gains, `gain_values[rx][tx]`.
    pub gain_values: Vec<Vec<f64>>,
    pub constellations: Vec<ReceivedConstellation>,
    /// For each receiver, the constellation coordinate of each desired stream.
    desired_slots: Vec<Vec<(StreamLabel, usize)>>,
}

impl Link {
    pub fn new(cfg: &SimConfig) -> Result<Link> {
        let plan = plan_for(cfg.scheme)?;
        Link::with_plan(plan, cfg)
    }

    pub fn with_plan(plan: SignalingPlan, cfg: &SimConfig) -> Result<Link> {
        let (analysis, tx_values, gain_values) = evaluate_plan(&plan, cfg)?;
        let q = q_for_power(cfg.power, analysis.m_eff, cfg.epsilon, cfg.gamma)?;
        let amplitude = tx_values
            .iter()
            .map(|v| amplitude_for_power(cfg.power, v, q))
            .collect::<Result<Vec<f64>>>()?
            .into_iter()
            .fold(f64::INFINITY, f64::min);
        let spec = ConstellationSpec::new(q, amplitude)?;
        Link::assemble(plan, analysis, spec, tx_values, gain_values, cfg)
    }

    /// Same plan and channel with a caller-chosen constellation; `cfg.power`
    /// is ignored.
    pub fn with_spec(
        plan: SignalingPlan,
        cfg: &SimConfig,
        spec: ConstellationSpec,
    ) -> Result<Link> {
        let (analysis, tx_values, gain_values) = evaluate_plan(&plan, cfg)?;
        Link::assemble(plan, analysis, spec, tx_values, gain_values, cfg)
    }

    fn assemble(
        plan: SignalingPlan,
        analysis: PlanAnalysis,
        spec: ConstellationSpec,
        tx_values: Vec<Vec<f64>>,
        gain_values: Vec<Vec<f64>>,
        cfg: &SimConfig,
    ) -> Result<Link> {
        let channel = &cfg.channel;
        let constellations = analysis
            .profiles
            .iter()
            .map(|p| build_received_constellation(p, channel, &spec, cfg.constellation_cap))
            .collect::<Result<Vec<_>>>()?;
        let desired_slots = constellations
            .iter()
            .map(|c| {
                c.streams
                    .iter()
                    .enumerate()
                    .filter_map(|(slot, s)| match s.kind {
                        StreamKind::Desired(label) => Some((label, slot)),
                        StreamKind::Interference(_) => None,
                    })
                    .collect()
            })
            .collect();
        Ok(Link {
            plan,
            analysis,
            spec,
            tx_values,
            gain_values,
            constellations,
            desired_slots,
        })
    }

    /// Transmit signals `x_i = A sum_j T_ij u_ij`.
    pub fn encode(&self, symbols: &[Vec<i64>]) -> Result<Vec<f64>> {
        encode_values(&self.tx_values, &self.spec, symbols)
    }

    /// Noiseless received signals `y_j = sum_i h_ji x_i`.
    pub fn propagate(&self, x: &[f64]) -> Vec<f64> {
        self.gain_values
            .iter()
            .map(|row| row.iter().zip(x).map(|(g, xi)| g * xi).sum())
            .collect()
    }

    /// Desired symbols recovered at `receiver` from the received value.
    pub fn decode_desired(&self, receiver: usize, y: f64) -> Vec<(StreamLabel, i64)> {
        let c = &self.constellations[receiver];
        let labels = c.label(decode_position(y, &c.points));
        self.desired_slots[receiver]
            .iter()
            .map(|&(label, slot)| (label, labels[slot]))
            .collect()
    }
}

type PlanValues = (PlanAnalysis, Vec<Vec<f64>>, Vec<Vec<f64>>);

fn evaluate_plan(plan: &SignalingPlan, cfg: &SimConfig) -> Result<PlanValues> {
    cfg.validate()?;
    let analysis = analyze_plan(plan)?;
    for p in &analysis.profiles {
        p.ensure_c2()?;
    }
    let channel = &cfg.channel;
    let tx_values = plan
        .transmitters
        .iter()
        .map(|t| {
            t.directions
                .iter()
                .map(|d| evaluate_monomial(channel, d))
                .collect()
        })
        .collect::<Result<Vec<Vec<f64>>>>()?;
    let gain_values = plan
        .gains
        .iter()
        .map(|row| row.iter().map(|g| evaluate_monomial(channel, g)).collect())
        .collect::<Result<Vec<Vec<f64>>>>()?;
    Ok((analysis, tx_values, gain_values))
}

/// `x_i = A sum_j value_ij u_ij`, rejecting symbols outside `(-Q, Q)`.
pub fn encode_values(
    tx_values: &[Vec<f64>],
    spec: &ConstellationSpec,
    symbols: &[Vec<i64>],
) -> Result<Vec<f64>> {
    if symbols.len() != tx_values.len() {
        return Err(Error::InvalidParameter(
            "one symbol vector per transmitter".into(),
        ));
    }
    let max = spec.max_symbol();
    tx_values
        .iter()
        .zip(symbols)
        .map(|(vals, syms)| {
            if vals.len() != syms.len() {
                return Err(Error::InvalidParameter("one symbol per stream".into()));
            }
            if let Some(u) = syms.iter().find(|u| u.abs() > max) {
                return Err(Error::InvalidParameter(format!(
                    "symbol {u} outside (-{q}, {q})",
                    q = spec.q
                )));
            }
            Ok(spec.amplitude
                * vals
                    .iter()
                    .zip(syms)
                    .map(|(v, &u)| v * u as f64)
                    .sum::<f64>())
        })
        .collect()
}

/// Encodes with the plan's numeric directions.
pub fn encode(
    plan: &SignalingPlan,
    channel: &impl SymbolSource,
    spec: &ConstellationSpec,
    symbols: &[Vec<i64>],
) -> Result<Vec<f64>> {
    let tx_values = plan
        .transmitters
        .iter()
        .map(|t| {
            t.directions
                .iter()
                .map(|d| evaluate_monomial(channel, d))
                .collect()
        })
        .collect::<Result<Vec<Vec<f64>>>>()?;
    encode_values(&tx_values, spec, symbols)
}

/// Independent generator for trial `t`: the master seed selects the key and
/// the trial index the stream, so results do not depend on how trials are
/// split across workers.
fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

pub fn run_trials(cfg: &SimConfig) -> Result<SimResult> {
    let link = Link::new(cfg)?;
    Ok(run_link(&link, cfg))
}

pub fn run_link(link: &Link, cfg: &SimConfig) -> SimResult {
    let slots: Vec<(usize, StreamLabel)> = link
        .desired_slots
        .iter()
        .enumerate()
        .flat_map(|(rx, s)| s.iter().map(move |&(label, _)| (rx, label)))
        .collect();
    let tasks = cfg.trials.div_ceil(TRIALS_PER_TASK);
    let errors = (0..tasks)
        .into_par_iter()
        .map(|task| {
            let start = task * TRIALS_PER_TASK;
            let end = (start + TRIALS_PER_TASK).min(cfg.trials);
            let mut errors = vec![0u64; slots.len()];
            let mut symbols: Vec<Vec<i64>> =
                link.tx_values.iter().map(|v| vec![0; v.len()]).collect();
            let max = link.spec.max_symbol();
            for t in start..end {
                let mut rng = trial_rng(cfg.seed, t);
                for s in symbols.iter_mut().flatten() {
                    *s = rng.random_range(-max..=max);
                }
                let x = link.encode(&symbols).expect("symbols drawn in range");
                let y = link.propagate(&x);
                let mut k = 0;
                for (rx, &yr) in y.iter().enumerate() {
                    let noise: f64 = rng.sample(StandardNormal);
                    for (label, got) in link.decode_desired(rx, yr + cfg.noise_scale * noise) {
                        if got != symbols[label.tx][label.index] {
                            errors[k] += 1;
                        }
                        k += 1;
                    }
                }
            }
            errors
        })
        .reduce(
            || vec![0u64; slots.len()],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                a
            },
        );

    let rate = rate_of(link.spec.q);
    let streams: Vec<StreamResult> = slots
        .iter()
        .zip(errors)
        .map(|(&(receiver, label), errors)| {
            let ser = errors as f64 / cfg.trials as f64;
            StreamResult {
                receiver,
                label,
                errors,
                ser,
                rate_bits: if ser <= cfg.ser_target { rate } else { 0.0 },
            }
        })
        .collect();
    let sum_rate = streams.iter().map(|s| s.rate_bits).sum();
    SimResult {
        power: cfg.power,
        q: link.spec.q,
        amplitude: link.spec.amplitude,
        m: link.analysis.m,
        m_eff: link.analysis.m_eff,
        trials: cfg.trials,
        streams,
        sum_rate,
        min_distances: link.constellations.iter().map(|c| c.min_gap()).collect(),
    }
}
