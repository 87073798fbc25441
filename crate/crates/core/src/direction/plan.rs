//! Signaling plans and per-receiver direction inventories.

use std::collections::BTreeMap;
use std::fmt;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use super::kuser::{generate_kuser_directions, interference_hull_count};
use super::monomial::{DirectionSet, GainSymbol, Generator, Monomial};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Scheme {
    Mac,
    XChannel,
    ThreeUser { n: u32 },
    KUser { k: usize, n: u32 },
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scheme::Mac => f.write_str("mac"),
            Scheme::XChannel => f.write_str("x-channel"),
            Scheme::ThreeUser { n } => write!(f, "three-user(n={n})"),
            Scheme::KUser { k, n } => write!(f, "kuser(K={k}, n={n})"),
        }
    }
}

/// Identifies one data stream: transmitter (0-based) and its position in the
/// transmitter's direction set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct StreamLabel {
    pub tx: usize,
    pub index: usize,
}

impl fmt::Display for StreamLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "u{}_{}", self.tx + 1, self.index)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Transmitter {
    pub directions: DirectionSet,
    /// Intended receiver (0-based) of the stream sent along each direction.
    pub intended: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SignalingPlan {
    pub scheme: Scheme,
    pub transmitters: Vec<Transmitter>,
    /// `gains[rx][tx]`: the channel coefficient as a monomial (often a single
    /// symbol, or `1` in the reduced models).
    pub gains: Vec<Vec<Monomial>>,
}

impl SignalingPlan {
    pub fn new(
        scheme: Scheme,
        transmitters: Vec<Transmitter>,
        gains: Vec<Vec<Monomial>>,
    ) -> Result<Self> {
        let plan = SignalingPlan {
            scheme,
            transmitters,
            gains,
        };
        plan.validate()?;
        Ok(plan)
    }

    fn validate(&self) -> Result<()> {
        let receivers = self.gains.len();
        if receivers == 0 || self.transmitters.is_empty() {
            return Err(Error::InvalidParameter(
                "plan needs receivers and transmitters".into(),
            ));
        }
        for row in &self.gains {
            if row.len() != self.transmitters.len() {
                return Err(Error::InvalidParameter(
                    "gain matrix is not receivers x transmitters".into(),
                ));
            }
        }
        for (t, tx) in self.transmitters.iter().enumerate() {
            if tx.intended.len() != tx.directions.len() {
                return Err(Error::InvalidParameter(format!(
                    "transmitter {}: {} directions but {} stream labels",
                    t + 1,
                    tx.directions.len(),
                    tx.intended.len()
                )));
            }
            if let Some(&r) = tx.intended.iter().find(|&&r| r >= receivers) {
                return Err(Error::InvalidParameter(format!(
                    "transmitter {} addresses receiver {} of {receivers}",
                    t + 1,
                    r + 1
                )));
            }
        }
        Ok(())
    }

    pub fn receivers(&self) -> usize {
        self.gains.len()
    }

    pub fn total_streams(&self) -> usize {
        self.transmitters.iter().map(|t| t.directions.len()).sum()
    }

    pub fn streams(&self) -> impl Iterator<Item = (StreamLabel, &Monomial, usize)> + '_ {
        self.transmitters.iter().enumerate().flat_map(|(tx, t)| {
            t.directions
                .iter()
                .zip(&t.intended)
                .enumerate()
                .map(move |(index, (dir, &rx))| (StreamLabel { tx, index }, dir, rx))
        })
    }

    pub fn direction(&self, label: StreamLabel) -> &Monomial {
        &self.transmitters[label.tx].directions.as_slice()[label.index]
    }

    /// Every gain symbol appearing in the plan.
    pub fn symbols(&self) -> Vec<GainSymbol> {
        let mut out: Vec<GainSymbol> = self
            .gains
            .iter()
            .flatten()
            .chain(self.transmitters.iter().flat_map(|t| t.directions.iter()))
            .flat_map(|m| m.symbols())
            .collect();
        out.sort();
        out.dedup();
        out
    }
}

fn unit_set() -> DirectionSet {
    std::iter::once(Monomial::unit()).collect()
}

fn g0_powers(count: u32) -> DirectionSet {
    (0..count)
        .map(|e| Monomial::power(Generator::G0, e))
        .collect()
}

/// Three users sending one stream each along direction `1` to a single
/// receiver `y = x1 + a x2 + b x3 + z`.
pub fn mac_plan() -> SignalingPlan {
    let tx = Transmitter {
        directions: unit_set(),
        intended: vec![0],
    };
    SignalingPlan::new(
        Scheme::Mac,
        vec![tx.clone(), tx.clone(), tx],
        vec![vec![
            Monomial::unit(),
            Monomial::symbol(Generator::A),
            Monomial::symbol(Generator::B),
        ]],
    )
    .expect("mac plan is well formed")
}

/// Two-user X channel: `x1 = h22 u1 + h12 v1`, `x2 = h21 u2 + h11 v2`.
pub fn x_channel_plan() -> SignalingPlan {
    let h = |j, l| Monomial::symbol(GainSymbol::h(j, l));
    let tx = |for_rx1: Monomial, for_rx2: Monomial| {
        let directions: DirectionSet = [for_rx1.clone(), for_rx2].into_iter().collect();
        let intended = directions
            .iter()
            .map(|d| if *d == for_rx1 { 0 } else { 1 })
            .collect();
        Transmitter {
            directions,
            intended,
        }
    };
    SignalingPlan::new(
        Scheme::XChannel,
        vec![tx(h(2, 2), h(1, 2)), tx(h(2, 1), h(1, 1))],
        vec![vec![h(1, 1), h(1, 2)], vec![h(2, 1), h(2, 2)]],
    )
    .expect("x-channel plan is well formed")
}

/// Asymmetric design for the standard three-user channel: transmitter 1 uses
/// `{1, G0, ..., G0^n}`, transmitters 2 and 3 use `{1, ..., G0^{n-1}}`.
pub fn three_user_plan(n: u32) -> Result<SignalingPlan> {
    if n < 1 {
        return Err(Error::InvalidParameter(format!(
            "n must be at least 1, got {n}"
        )));
    }
    let tx = |count: u32, rx: usize| Transmitter {
        directions: g0_powers(count),
        intended: vec![rx; count as usize],
    };
    let one = Monomial::unit;
    let g = |gen| Monomial::symbol(gen);
    SignalingPlan::new(
        Scheme::ThreeUser { n },
        vec![tx(n + 1, 0), tx(n, 1), tx(n, 2)],
        vec![
            vec![g(Generator::G1), one(), one()],
            vec![one(), g(Generator::G2), one()],
            vec![one(), g(Generator::G0), g(Generator::G3)],
        ],
    )
}

/// K-user plan with the monomial direction sets of [`generate_kuser_directions`].
pub fn kuser_plan(k: usize, n: u32, cap: u128) -> Result<SignalingPlan> {
    let transmitters = (1..=k)
        .map(|i| {
            let directions = generate_kuser_directions(k, n, i, cap)?;
            let intended = vec![i - 1; directions.len()];
            Ok(Transmitter {
                directions,
                intended,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let gains = (1..=k)
        .map(|j| {
            (1..=k)
                .map(|l| Monomial::symbol(GainSymbol::h(j, l)))
                .collect()
        })
        .collect();
    SignalingPlan::new(Scheme::KUser { k, n }, transmitters, gains)
}

/// Direction inventory seen by one receiver.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReceivedProfile {
    pub receiver: usize,
    pub desired_directions: DirectionSet,
    /// Streams arriving along each desired direction (one each when C2 holds).
    pub desired_streams: Vec<Vec<StreamLabel>>,
    /// Effective interference directions after merging aligned arrivals.
    pub interference_directions: DirectionSet,
    /// Streams summed into each effective interference stream.
    pub contributors: Vec<Vec<StreamLabel>>,
    #[serde(rename = "L")]
    pub l: usize,
    #[serde(rename = "L_prime")]
    pub l_prime: usize,
    pub m: usize,
    pub has_unit_direction: bool,
    pub c2_ok: bool,
    /// Directions carrying more than one desired stream, or both desired and
    /// interfering streams.
    pub conflicts: Vec<Monomial>,
}

impl ReceivedProfile {
    /// Received directions counted by the rate schedule: `m`, plus a virtual
    /// unit stream when no direction equals `1`.
    pub fn m_eff(&self) -> usize {
        self.m + usize::from(!self.has_unit_direction)
    }

    pub fn ensure_c2(&self) -> Result<()> {
        if self.c2_ok {
            return Ok(());
        }
        let listed: Vec<String> = self.conflicts.iter().map(|m| m.to_string()).collect();
        Err(Error::Violation {
            receiver: self.receiver + 1,
            details: format!(
                "directions shared by distinct streams: {}",
                listed.join(", ")
            ),
        })
    }
}

/// Propagates every stream of `plan` to `receiver` (0-based) and merges
/// aligned interference.
pub fn analyze_receiver(plan: &SignalingPlan, receiver: usize) -> Result<ReceivedProfile> {
    if receiver >= plan.receivers() {
        return Err(Error::InvalidParameter(format!(
            "receiver {} outside 1..={}",
            receiver + 1,
            plan.receivers()
        )));
    }
    let mut desired: BTreeMap<Monomial, Vec<StreamLabel>> = BTreeMap::new();
    let mut interference: BTreeMap<Monomial, Vec<StreamLabel>> = BTreeMap::new();
    for (label, dir, intended) in plan.streams() {
        let arrival = &plan.gains[receiver][label.tx] * dir;
        let bucket = if intended == receiver {
            &mut desired
        } else {
            &mut interference
        };
        bucket.entry(arrival).or_default().push(label);
    }

    let mut conflicts: Vec<Monomial> = desired
        .iter()
        .filter(|(d, labels)| labels.len() > 1 || interference.contains_key(*d))
        .map(|(d, _)| d.clone())
        .collect();
    conflicts.sort();

    let desired_directions: DirectionSet = desired.keys().cloned().collect();
    let interference_directions: DirectionSet = interference.keys().cloned().collect();
    // BTreeMap iterates in canonical order, matching the sets.
    let desired_streams: Vec<Vec<StreamLabel>> = desired.into_values().collect();
    let contributors: Vec<Vec<StreamLabel>> = interference.into_values().collect();

    let l = desired_directions.len();
    let l_prime = interference_directions.len();
    Ok(ReceivedProfile {
        receiver,
        has_unit_direction: desired_directions.contains_unit()
            || interference_directions.contains_unit(),
        c2_ok: conflicts.is_empty(),
        conflicts,
        desired_directions,
        desired_streams,
        interference_directions,
        contributors,
        l,
        l_prime,
        m: l + l_prime,
    })
}

/// All receiver profiles plus the plan-level quantities of the rate schedule.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlanAnalysis {
    pub profiles: Vec<ReceivedProfile>,
    /// `max_i L_i + L'_i`.
    pub m: usize,
    /// `max_i` of each receiver's [`ReceivedProfile::m_eff`].
    pub m_eff: usize,
    /// Sum of `L_i` over receivers.
    pub total_desired: usize,
    /// Size of the interference hull for the K-user construction.
    pub hull_size: Option<u128>,
}

impl PlanAnalysis {
    pub fn c3_holds(&self) -> bool {
        self.profiles.iter().all(|p| p.has_unit_direction)
    }

    /// `sum L_i / m`, the sum DOF when every receiver has a unit direction.
    pub fn dof(&self) -> Ratio<u64> {
        Ratio::new(self.total_desired as u64, self.m as u64)
    }

    /// `sum L_i / m_eff`, accounting for the virtual unit stream.
    pub fn dof_effective(&self) -> Ratio<u64> {
        Ratio::new(self.total_desired as u64, self.m_eff as u64)
    }
}

pub fn analyze_plan(plan: &SignalingPlan) -> Result<PlanAnalysis> {
    let profiles = (0..plan.receivers())
        .map(|r| analyze_receiver(plan, r))
        .collect::<Result<Vec<_>>>()?;
    let m = profiles.iter().map(|p| p.m).max().unwrap_or(0);
    let m_eff = profiles.iter().map(|p| p.m_eff()).max().unwrap_or(0);
    let total_desired = profiles.iter().map(|p| p.l).sum();
    let hull_size = match plan.scheme {
        Scheme::KUser { k, n } => interference_hull_count(k, n),
        _ => None,
    };
    Ok(PlanAnalysis {
        profiles,
        m,
        m_eff,
        total_desired,
        hull_size,
    })
}
