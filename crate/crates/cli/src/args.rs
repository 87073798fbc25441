use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

#[derive(Debug, Parser)]
#[command(
    name = "realign",
    version,
    about = "Real interference alignment experiments"
)]
#[command(args_override_self = true)]
pub struct Cli {
    /// Worker threads for searches and Monte Carlo runs.
    #[arg(long, global = true, env = "REALIGN_WORKERS")]
    pub workers: Option<usize>,

    /// JSON file of flag values for the subcommand; explicit flags win.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<String>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Enumerate transmit direction sets and check their sizes.
    Directions(DirectionsArgs),
    /// Per-receiver alignment profile of a signaling plan.
    Analyze(AnalyzeArgs),
    /// Diophantine minima |p + v.q| and the empirical kappa.
    Kappa(KappaArgs),
    /// Received-constellation minimum distance over a range of Q.
    Mindist(MindistArgs),
    /// Monte Carlo symbol error rates at one power.
    Simulate(SimulateArgs),
    /// Sum-rate sweep over power and the fitted DOF slope.
    Dof(DofArgs),
    /// Re-run the command recorded in a manifest.
    Replay(ReplayArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SchemeKind {
    Mac,
    XChannel,
    ThreeUser,
    Kuser,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    #[default]
    Text,
    Json,
}

/// Plan selection shared by several commands.
#[derive(Debug, Clone, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct PlanArgs {
    #[arg(long, value_enum, default_value = "kuser")]
    pub scheme: SchemeKind,
    /// Number of users for the K-user construction.
    #[arg(long = "K", default_value_t = 3)]
    #[serde(rename = "K")]
    pub k: usize,
    /// Exponent bound of the construction.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..))]
    pub n: u32,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct DirectionsArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub plan: PlanArgs,
    /// Only this transmitter (1-based).
    #[arg(long)]
    pub i: Option<usize>,
    /// Print every direction, not just the counts.
    #[arg(long)]
    pub list: bool,
    #[arg(long, value_enum, default_value = "text")]
    pub format: Format,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct AnalyzeArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub plan: PlanArgs,
    /// Check the directions of a sampled realization for coincidences.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, value_enum, default_value = "text")]
    pub format: Format,
}

/// Output locations; not part of the recorded parameters.
#[derive(Debug, Clone, Default, Args)]
pub struct OutputArgs {
    /// CSV destination; stdout when absent.
    #[arg(long)]
    pub out: Option<String>,
    /// Where to write the experiment manifest.
    #[arg(long)]
    pub manifest: Option<String>,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct KappaArgs {
    /// Explicit direction values, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, conflicts_with_all = ["seeds", "seed"])]
    pub v: Option<Vec<f64>>,
    /// Dimension of sampled direction vectors.
    #[arg(long, default_value_t = 2)]
    pub dims: usize,
    /// Single sampled vector.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Batch over this many seeds starting at --seed-start.
    #[arg(long)]
    pub seeds: Option<u64>,
    #[arg(long, default_value_t = 0)]
    pub seed_start: u64,
    #[arg(long = "Q-max", default_value_t = 30)]
    #[serde(rename = "Q-max")]
    pub q_max: u64,
    #[arg(long, default_value_t = 0.1)]
    pub epsilon: f64,
    #[command(flatten)]
    #[serde(skip)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct MindistArgs {
    /// Shorthand for --scheme mac.
    #[arg(long)]
    pub mac: bool,
    #[arg(long, value_enum)]
    pub scheme: Option<SchemeKind>,
    #[arg(long = "K", default_value_t = 3)]
    #[serde(rename = "K")]
    pub k: usize,
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..))]
    pub n: u32,
    /// Receiver (1-based).
    #[arg(long, default_value_t = 1)]
    pub receiver: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Channel realization as JSON, or a path to one.
    #[arg(long)]
    pub channel: Option<String>,
    /// MAC gain `a`; requires --b and overrides the sampled channel.
    #[arg(long, allow_hyphen_values = true, requires = "b")]
    pub a: Option<f64>,
    /// MAC gain `b`.
    #[arg(long, allow_hyphen_values = true, requires = "a")]
    pub b: Option<f64>,
    /// Range of Q, e.g. 2..40.
    #[arg(long = "Q", default_value = "2..40")]
    #[serde(rename = "Q")]
    pub q: IntRange,
    #[arg(long, default_value_t = 1.0)]
    pub amplitude: f64,
    #[arg(long, default_value_t = 0.1)]
    pub epsilon: f64,
    #[command(flatten)]
    #[serde(skip)]
    pub output: OutputArgs,
}

/// Parameters shared by `simulate` and `dof`.
#[derive(Debug, Clone, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct LinkArgs {
    #[arg(long, value_enum)]
    pub scheme: SchemeKind,
    #[arg(long = "K", default_value_t = 3)]
    #[serde(rename = "K")]
    pub k: usize,
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..))]
    pub n: u32,
    #[arg(long, default_value = "10000")]
    pub trials: Count,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Channel realization as JSON, or a path to one; sampled from --seed
    /// when absent.
    #[arg(long)]
    pub channel: Option<String>,
    #[arg(long, default_value_t = 0.1)]
    pub epsilon: f64,
    #[arg(long, default_value_t = 1.0)]
    pub gamma: f64,
    #[arg(long, default_value_t = 1e-2)]
    pub ser_target: f64,
    #[arg(long, default_value_t = 1.0)]
    pub noise_scale: f64,
    #[arg(long, default_value = "4000000")]
    pub constellation_cap: Count,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct SimulateArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub link: LinkArgs,
    /// Transmit power (linear; noise variance is 1).
    #[arg(long = "P")]
    #[serde(rename = "P")]
    pub p: f64,
    #[command(flatten)]
    #[serde(skip)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct DofArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub link: LinkArgs,
    /// Closed-form DOF only; no simulation.
    #[arg(long)]
    pub formula_only: bool,
    /// Power grid, e.g. 1e4..1e12.
    #[arg(long = "P", required_unless_present = "formula_only")]
    #[serde(rename = "P")]
    pub p: Option<PowerRange>,
    #[arg(long, default_value_t = 1)]
    pub per_decade: u32,
    #[command(flatten)]
    #[serde(skip)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct ReplayArgs {
    pub manifest: String,
    /// Write outputs into this directory instead of the recorded paths.
    #[arg(long)]
    pub out_dir: Option<String>,
    /// Compare regenerated outputs with the recorded files instead of
    /// writing them.
    #[arg(long)]
    pub check: bool,
}

/// Non-negative integer that also accepts `1e4` style input.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub struct Count(pub u64);

impl FromStr for Count {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if let Ok(n) = s.parse::<u64>() {
            return Ok(Count(n));
        }
        let x: f64 = s.parse().map_err(|_| format!("not a count: {s}"))?;
        if x >= 0.0 && x.fract() == 0.0 && x <= u64::MAX as f64 {
            Ok(Count(x as u64))
        } else {
            Err(format!("not a non-negative integer: {s}"))
        }
    }
}

impl From<Count> for String {
    fn from(c: Count) -> String {
        c.0.to_string()
    }
}

impl TryFrom<String> for Count {
    type Error = String;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

/// Inclusive integer range `lo..hi`, or a single value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub struct IntRange {
    pub lo: u64,
    pub hi: u64,
}

impl FromStr for IntRange {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (lo, hi) = match s.split_once("..") {
            Some((a, b)) => (a.parse::<Count>()?.0, b.parse::<Count>()?.0),
            None => {
                let v = s.parse::<Count>()?.0;
                (v, v)
            }
        };
        if lo < 1 || hi < lo {
            return Err(format!("bad range {s}: need 1 <= lo <= hi"));
        }
        Ok(IntRange { lo, hi })
    }
}

impl From<IntRange> for String {
    fn from(r: IntRange) -> String {
        format!("{}..{}", r.lo, r.hi)
    }
}

impl TryFrom<String> for IntRange {
    type Error = String;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

/// Power range `lo..hi`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub struct PowerRange {
    pub lo: f64,
    pub hi: f64,
}

impl FromStr for PowerRange {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (a, b) = s
            .split_once("..")
            .ok_or_else(|| format!("expected lo..hi, got {s}"))?;
        let lo: f64 = a.parse().map_err(|_| format!("bad power {a}"))?;
        let hi: f64 = b.parse().map_err(|_| format!("bad power {b}"))?;
        if !(lo > 0.0 && hi >= lo && hi.is_finite()) {
            return Err(format!("bad power range {s}"));
        }
        Ok(PowerRange { lo, hi })
    }
}

impl From<PowerRange> for String {
    fn from(r: PowerRange) -> String {
        format!("{:e}..{:e}", r.lo, r.hi)
    }
}

impl TryFrom<String> for PowerRange {
    type Error = String;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_and_ranges() {
        assert_eq!("1e4".parse::<Count>().unwrap(), Count(10_000));
        assert_eq!("250".parse::<Count>().unwrap(), Count(250));
        assert!("1.5".parse::<Count>().is_err());
        assert_eq!(
            "2..40".parse::<IntRange>().unwrap(),
            IntRange { lo: 2, hi: 40 }
        );
        assert_eq!("7".parse::<IntRange>().unwrap(), IntRange { lo: 7, hi: 7 });
        assert!("5..2".parse::<IntRange>().is_err());
        let p: PowerRange = "1e4..1e12".parse().unwrap();
        assert_eq!((p.lo, p.hi), (1e4, 1e12));
        assert_eq!(String::from(p), "1e4..1e12");
        assert!("1e4".parse::<PowerRange>().is_err());
    }
}
