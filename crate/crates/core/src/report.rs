//! CSV writers and the experiment manifest.
//!
//! Floats are written with Rust's shortest round-trip formatting, so equal
//! values always produce equal bytes.

use std::io::{self, Write};

use serde::{Deserialize, Serialize};

use crate::lattice::KappaRow;
use crate::sim::{SimResult, SweepResult};

pub const SWEEP_HEADER: &str =
    "P,Q,A,receiver,stream,SER,rate_bits,sum_rate,scheduled_slope,empirical_slope";
pub const KAPPA_HEADER: &str = "Q,min_value,scaled_value,argmin";

/// Integer tuple as `a;b;c`.
pub fn format_tuple(t: &[i64]) -> String {
    t.iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join(";")
}

fn opt(x: Option<f64>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

/// One row per desired stream per power point. Receivers are 1-based.
pub fn write_sim_rows<W: Write>(
    w: &mut W,
    points: &[SimResult],
    scheduled_slope: Option<f64>,
    empirical_slope: Option<f64>,
) -> io::Result<()> {
    writeln!(w, "{SWEEP_HEADER}")?;
    for r in points {
        for s in &r.streams {
            writeln!(
                w,
                "{},{},{},{},{},{},{},{},{},{}",
                r.power,
                r.q,
                r.amplitude,
                s.receiver + 1,
                s.label,
                s.ser,
                s.rate_bits,
                r.sum_rate,
                opt(scheduled_slope),
                opt(empirical_slope),
            )?;
        }
    }
    Ok(())
}

pub fn write_sweep_csv<W: Write>(w: &mut W, sweep: &SweepResult) -> io::Result<()> {
    write_sim_rows(
        w,
        &sweep.points,
        Some(sweep.scheduled_slope),
        Some(sweep.empirical_slope),
    )
}

/// Writes the header, with a leading `seed` column when `with_seed` is set.
pub fn write_kappa_header<W: Write>(w: &mut W, with_seed: bool) -> io::Result<()> {
    if with_seed {
        writeln!(w, "seed,{KAPPA_HEADER}")
    } else {
        writeln!(w, "{KAPPA_HEADER}")
    }
}

pub fn write_kappa_rows<W: Write>(
    w: &mut W,
    seed: Option<u64>,
    rows: &[KappaRow],
) -> io::Result<()> {
    for r in rows {
        if let Some(s) = seed {
            write!(w, "{s},")?;
        }
        writeln!(
            w,
            "{},{},{},{}",
            r.q,
            r.min_value,
            r.scaled_value,
            format_tuple(&r.argmin)
        )?;
    }
    Ok(())
}

/// Everything needed to reproduce a command's outputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentManifest {
    pub command: String,
    /// Full parameter set of the command.
    pub params: serde_json::Value,
    /// Channel realizations the command used, if any.
    #[serde(default)]
    pub channels: Vec<crate::channel::Channel>,
    pub tool_version: String,
    pub outputs: Vec<String>,
}

impl ExperimentManifest {
    pub fn new(command: &str, params: serde_json::Value) -> ExperimentManifest {
        ExperimentManifest {
            command: command.to_string(),
            params,
            channels: Vec::new(),
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            outputs: Vec::new(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("manifest serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{sample_mac, Channel};
    use crate::direction::Scheme;
    use crate::lattice::empirical_kappa;
    use crate::sim::{run_trials, SimConfig};

    #[test]
    fn kappa_csv_layout() {
        let k = empirical_kappa(&[0.5], 2, 0.1).unwrap();
        let mut out = Vec::new();
        write_kappa_header(&mut out, false).unwrap();
        write_kappa_rows(&mut out, None, &k.rows).unwrap();
        let text = String::from_utf8(out).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], KAPPA_HEADER);
        assert_eq!(lines[1], "1,0.5,0.5,-1;1");
        assert_eq!(lines[2], "2,0,0,-1;2");

        let mut out = Vec::new();
        write_kappa_header(&mut out, true).unwrap();
        write_kappa_rows(&mut out, Some(9), &k.rows[..1]).unwrap();
        assert_eq!(
            String::from_utf8(out).unwrap(),
            "seed,Q,min_value,scaled_value,argmin\n9,1,0.5,0.5,-1;1\n"
        );
    }

    #[test]
    fn sim_csv_has_one_row_per_stream() {
        let mut cfg = SimConfig::new(Scheme::Mac, Channel::Mac(sample_mac(3)), 1e6);
        cfg.trials = 100;
        let r = run_trials(&cfg).unwrap();
        let mut out = Vec::new();
        write_sim_rows(&mut out, &[r], Some(0.5), None).unwrap();
        let text = String::from_utf8(out).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 4);
        assert!(lines[1].starts_with("1000000,7,"));
        assert!(lines[1].ends_with(",0.5,"));
        assert_eq!(lines[1].split(',').count(), 10);
    }

    #[test]
    fn manifest_round_trip() {
        let mut m = ExperimentManifest::new("kappa", serde_json::json!({"q_max": 30}));
        m.channels.push(Channel::Mac(sample_mac(1)));
        m.outputs.push("out.csv".into());
        let back: ExperimentManifest = serde_json::from_str(&m.to_json()).unwrap();
        assert_eq!(back, m);
    }
}
