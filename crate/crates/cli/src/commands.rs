use std::fmt::Write as _;

use rayon::prelude::*;
use realign_core::channel::{
    degeneracy_check, evaluate_monomial, sample_channel, sample_direction_values, sample_mac,
    sample_standard_three_user, Channel, MacChannel, DEFAULT_DEGENERACY_TOL,
};
use realign_core::direction::{
    analyze_plan, dof_formula_kuser, dof_formula_three_user, generate_kuser_directions,
    interference_hull, interference_hull_count, kuser_direction_count, PlanAnalysis, Scheme,
    DEFAULT_ENUMERATION_CAP,
};
use realign_core::lattice::{empirical_kappa, min_distance, ConstellationSpec, KappaRow};
use realign_core::report::{write_kappa_header, write_kappa_rows, write_sim_rows, write_sweep_csv};
use realign_core::sim::{
    dof_sweep, log_grid, ls_slope, plan_for, run_link, scheduled_slope, stream_ranges, Link,
    SimConfig,
};
use realign_core::Error;
use serde_json::json;

use crate::args::{
    AnalyzeArgs, DirectionsArgs, DofArgs, Format, KappaArgs, LinkArgs, MindistArgs, SchemeKind,
    SimulateArgs,
};
use crate::error::CliError;

/// What a command produced besides its console report.
#[derive(Debug, Default)]
pub struct Outcome {
    pub csv: Option<Vec<u8>>,
    pub channels: Vec<Channel>,
}

pub fn scheme_of(kind: SchemeKind, k: usize, n: u32) -> Scheme {
    match kind {
        SchemeKind::Mac => Scheme::Mac,
        SchemeKind::XChannel => Scheme::XChannel,
        SchemeKind::ThreeUser => Scheme::ThreeUser { n },
        SchemeKind::Kuser => Scheme::KUser { k, n },
    }
}

/// Channel from `--channel` (inline JSON or a file), else sampled from the
/// seed with the model the scheme needs.
pub fn channel_for(scheme: Scheme, seed: u64, source: Option<&str>) -> Result<Channel, CliError> {
    if let Some(src) = source {
        let text = if src.trim_start().starts_with('{') {
            src.to_string()
        } else {
            std::fs::read_to_string(src).map_err(|e| CliError::Io(format!("reading {src}: {e}")))?
        };
        return serde_json::from_str(&text)
            .map_err(|e| CliError::Usage(format!("bad channel: {e}")));
    }
    Ok(match scheme {
        Scheme::Mac => Channel::Mac(sample_mac(seed)),
        Scheme::XChannel => Channel::Gains(sample_channel(seed, 2)?),
        Scheme::ThreeUser { .. } => Channel::StandardThreeUser(sample_standard_three_user(seed)),
        Scheme::KUser { k, .. } => Channel::Gains(sample_channel(seed, k)?),
    })
}

fn inline(channel: &Channel) -> String {
    serde_json::to_string(channel).expect("channel serializes")
}

pub fn directions(args: &DirectionsArgs, out: &mut String) -> Result<(), CliError> {
    let (k, n) = (args.plan.k, args.plan.n);
    match args.plan.scheme {
        SchemeKind::Kuser => kuser_directions(k, n, args, out),
        kind => {
            let plan = plan_for(scheme_of(kind, k, n))?;
            if args.i.is_some_and(|i| i < 1 || i > plan.transmitters.len()) {
                return Err(CliError::Usage(format!(
                    "--i must be in 1..={}",
                    plan.transmitters.len()
                )));
            }
            if let Scheme::ThreeUser { n } = plan.scheme {
                let expected = [n + 1, n, n];
                for (t, &e) in plan.transmitters.iter().zip(&expected) {
                    if t.directions.len() != e as usize {
                        return Err(CliError::Mismatch(format!(
                            "expected |T| = {e}, got {}",
                            t.directions.len()
                        )));
                    }
                }
            }
            let selected: Vec<usize> = match args.i {
                Some(i) => vec![i - 1],
                None => (0..plan.transmitters.len()).collect(),
            };
            match args.format {
                Format::Json => {
                    let items: Vec<_> = selected
                        .iter()
                        .map(|&t| {
                            let d = &plan.transmitters[t].directions;
                            json!({"i": t + 1, "count": d.len(), "directions": args.list.then_some(d)})
                        })
                        .collect();
                    let v = json!({"scheme": plan.scheme.to_string(), "transmitters": items});
                    writeln!(out, "{}", serde_json::to_string_pretty(&v).expect("json")).unwrap();
                }
                Format::Text => {
                    writeln!(out, "scheme {}", plan.scheme).unwrap();
                    for &t in &selected {
                        let d = &plan.transmitters[t].directions;
                        writeln!(out, "T{} size {}", t + 1, d.len()).unwrap();
                        if args.list {
                            for m in d.iter() {
                                writeln!(out, "  {m}").unwrap();
                            }
                        }
                    }
                }
            }
            Ok(())
        }
    }
}

fn kuser_directions(
    k: usize,
    n: u32,
    args: &DirectionsArgs,
    out: &mut String,
) -> Result<(), CliError> {
    let users: Vec<usize> = match args.i {
        Some(i) => vec![i],
        None => (1..=k).collect(),
    };
    let expected_l = kuser_direction_count(k, n);
    let expected_hull = interference_hull_count(k, n);
    let mut sets = Vec::new();
    for &i in &users {
        let set = generate_kuser_directions(k, n, i, DEFAULT_ENUMERATION_CAP)?;
        if Some(set.len() as u128) != expected_l {
            return Err(CliError::Mismatch(format!(
                "user {i}: enumerated {} directions, formula gives {expected_l:?}",
                set.len()
            )));
        }
        sets.push((i, set));
    }
    let hull = interference_hull(k, n, DEFAULT_ENUMERATION_CAP)?;
    if Some(hull.len() as u128) != expected_hull {
        return Err(CliError::Mismatch(format!(
            "hull: enumerated {}, formula gives {expected_hull:?}",
            hull.len()
        )));
    }
    match args.format {
        Format::Json => {
            let items: Vec<_> = sets
                .iter()
                .map(|(i, d)| json!({"i": i, "count": d.len(), "directions": args.list.then_some(d)}))
                .collect();
            let v = json!({
                "K": k,
                "n": n,
                "transmitters": items,
                "hull": {"count": hull.len(), "directions": args.list.then_some(&hull)},
            });
            writeln!(out, "{}", serde_json::to_string_pretty(&v).expect("json")).unwrap();
        }
        Format::Text => {
            writeln!(out, "K={k} n={n}").unwrap();
            for (i, d) in &sets {
                writeln!(out, "L_{i} = {}", d.len()).unwrap();
                if args.list {
                    for m in d.iter() {
                        writeln!(out, "  {m}").unwrap();
                    }
                }
            }
            writeln!(out, "L' = {}", hull.len()).unwrap();
            if args.list {
                for m in hull.iter() {
                    writeln!(out, "  {m}").unwrap();
                }
            }
            writeln!(
                out,
                "counts match n^(K-1)(n+1)^((K-1)^2) and (n+1)^(K(K-1))"
            )
            .unwrap();
        }
    }
    Ok(())
}

fn formula_dof(scheme: Scheme) -> Result<Option<String>, CliError> {
    Ok(match scheme {
        Scheme::ThreeUser { n } => Some(dof_formula_three_user(n)?.to_string()),
        Scheme::KUser { k, n } => Some(dof_formula_kuser(k, n)?.to_string()),
        Scheme::Mac | Scheme::XChannel => None,
    })
}

pub fn analyze(args: &AnalyzeArgs, out: &mut String) -> Result<(), CliError> {
    let scheme = scheme_of(args.plan.scheme, args.plan.k, args.plan.n);
    let plan = plan_for(scheme)?;
    let analysis = analyze_plan(&plan)?;
    if let Some(seed) = args.seed {
        let channel = channel_for(scheme, seed, None)?;
        check_realization(&analysis, &channel)?;
    }
    match args.format {
        Format::Json => {
            let v = json!({
                "scheme": scheme,
                "analysis": analysis,
                "c3_holds": analysis.c3_holds(),
                "dof_profile": analysis.dof().to_string(),
                "dof_effective": analysis.dof_effective().to_string(),
                "dof_formula": formula_dof(scheme)?,
            });
            writeln!(out, "{}", serde_json::to_string_pretty(&v).expect("json")).unwrap();
        }
        Format::Text => {
            writeln!(out, "scheme {scheme}").unwrap();
            writeln!(out, "rx  L  L'  m  C2  C3  m_eff").unwrap();
            for p in &analysis.profiles {
                writeln!(
                    out,
                    "{}  {}  {}  {}  {}  {}  {}",
                    p.receiver + 1,
                    p.l,
                    p.l_prime,
                    p.m,
                    if p.c2_ok { "ok" } else { "FAIL" },
                    if p.has_unit_direction { "yes" } else { "no" },
                    p.m_eff()
                )
                .unwrap();
            }
            writeln!(
                out,
                "m = {}  m_eff = {}  sum L = {}",
                analysis.m, analysis.m_eff, analysis.total_desired
            )
            .unwrap();
            if let Some(h) = analysis.hull_size {
                writeln!(out, "interference hull size = {h}").unwrap();
            }
            if !analysis.c3_holds() {
                writeln!(out, "C3 fails: denominator m+1").unwrap();
            }
            writeln!(out, "profile DOF = {}", analysis.dof()).unwrap();
            writeln!(out, "effective DOF = {}", analysis.dof_effective()).unwrap();
            if let Some(f) = formula_dof(scheme)? {
                writeln!(out, "formula DOF = {f}").unwrap();
            }
            if let Some(seed) = args.seed {
                writeln!(
                    out,
                    "seed {seed}: received directions distinct at every receiver"
                )
                .unwrap();
            }
        }
    }
    Ok(())
}

fn check_realization(analysis: &PlanAnalysis, channel: &Channel) -> Result<(), CliError> {
    for p in &analysis.profiles {
        let dirs: Vec<_> = p
            .desired_directions
            .iter()
            .chain(p.interference_directions.iter())
            .collect();
        let values = dirs
            .iter()
            .map(|d| evaluate_monomial(channel, d))
            .collect::<Result<Vec<_>, _>>()?;
        let report = degeneracy_check(&values, DEFAULT_DEGENERACY_TOL);
        if let Some(&(i, j, rel)) = report.collisions.first() {
            return Err(Error::Degenerate(format!(
                "receiver {}: directions {} and {} coincide (relative difference {rel:e})",
                p.receiver + 1,
                dirs[i],
                dirs[j]
            ))
            .into());
        }
    }
    Ok(())
}

pub fn kappa(args: &KappaArgs, log: &mut String) -> Result<Outcome, CliError> {
    if args.q_max < 1 {
        return Err(CliError::Usage("--Q-max must be at least 1".into()));
    }
    let mut csv = Vec::new();
    if let Some(count) = args.seeds {
        if args.dims < 1 {
            return Err(CliError::Usage("--dims must be at least 1".into()));
        }
        let seeds: Vec<u64> = (args.seed_start..args.seed_start + count).collect();
        let results = seeds
            .par_iter()
            .map(|&s| {
                empirical_kappa(
                    &sample_direction_values(s, args.dims),
                    args.q_max,
                    args.epsilon,
                )
            })
            .collect::<Result<Vec<_>, _>>()?;
        write_kappa_header(&mut csv, true)?;
        for (s, k) in seeds.iter().zip(&results) {
            write_kappa_rows(&mut csv, Some(*s), &k.rows)?;
        }
        let positive = results.iter().filter(|k| k.is_positive()).count();
        writeln!(log, "positive envelope: {positive}/{count} seeds").unwrap();
    } else {
        let v = match (&args.v, args.seed) {
            (Some(v), _) => v.clone(),
            (None, Some(s)) => sample_direction_values(s, args.dims),
            (None, None) => return Err(CliError::Usage("give --v, --seed or --seeds".into())),
        };
        let k = empirical_kappa(&v, args.q_max, args.epsilon)?;
        write_kappa_header(&mut csv, false)?;
        write_kappa_rows(&mut csv, None, &k.rows)?;
        if k.is_positive() {
            writeln!(log, "kappa_hat = {}", k.kappa_hat).unwrap();
        } else {
            writeln!(log, "kappa_hat = 0: v admits an exact integer relation").unwrap();
        }
    }
    Ok(Outcome {
        csv: Some(csv),
        channels: Vec::new(),
    })
}

pub fn mindist(args: &mut MindistArgs, log: &mut String) -> Result<Outcome, CliError> {
    let kind = match (args.mac, args.scheme) {
        (true, None) | (true, Some(SchemeKind::Mac)) => SchemeKind::Mac,
        (false, Some(k)) => k,
        (false, None) => return Err(CliError::Usage("give --mac or --scheme".into())),
        (true, Some(_)) => return Err(CliError::Usage("--mac conflicts with --scheme".into())),
    };
    if args.q.lo < 2 {
        return Err(CliError::Usage(
            "Q must start at 2; Q = 1 has a single point".into(),
        ));
    }
    let scheme = scheme_of(kind, args.k, args.n);
    let mut channel = channel_for(scheme, args.seed, args.channel.as_deref())?;
    if args.a.is_some() || args.b.is_some() {
        let Channel::Mac(mac) = channel else {
            return Err(CliError::Usage("--a/--b apply to the MAC only".into()));
        };
        channel = Channel::Mac(MacChannel::new(
            args.a.unwrap_or(mac.a),
            args.b.unwrap_or(mac.b),
        )?);
    }
    if args.channel.is_some() {
        args.channel = Some(inline(&channel));
    }
    let plan = plan_for(scheme)?;
    let analysis = analyze_plan(&plan)?;
    let rx = args
        .receiver
        .checked_sub(1)
        .filter(|&r| r < analysis.profiles.len())
        .ok_or_else(|| {
            CliError::Usage(format!(
                "--receiver must be in 1..={}",
                analysis.profiles.len()
            ))
        })?;
    let profile = &analysis.profiles[rx];

    let rows = (args.q.lo..=args.q.hi)
        .map(|q| {
            let spec = ConstellationSpec::new(q, args.amplitude)?;
            let ranges = stream_ranges(profile, &channel, &spec)?;
            let d = min_distance(&ranges, args.amplitude)?;
            let exponent = (ranges.len() - 1) as f64 + args.epsilon;
            Ok(KappaRow {
                q,
                min_value: d.value,
                scaled_value: d.value * (q as f64).powf(exponent),
                argmin: d.argmin,
            })
        })
        .collect::<Result<Vec<_>, Error>>()?;
    let mut csv = Vec::new();
    write_kappa_header(&mut csv, false)?;
    write_kappa_rows(&mut csv, None, &rows)?;
    let (x, y): (Vec<f64>, Vec<f64>) = rows
        .iter()
        .map(|r| ((r.q as f64).ln(), r.min_value.ln()))
        .unzip();
    if let Some(s) = ls_slope(&x, &y) {
        writeln!(log, "log-log slope of d_min against Q: {s}").unwrap();
    }
    Ok(Outcome {
        csv: Some(csv),
        channels: vec![channel],
    })
}

fn sim_config(link: &mut LinkArgs, power: f64) -> Result<SimConfig, CliError> {
    let scheme = scheme_of(link.scheme, link.k, link.n);
    let channel = channel_for(scheme, link.seed, link.channel.as_deref())?;
    if link.channel.is_some() {
        link.channel = Some(inline(&channel));
    }
    let mut cfg = SimConfig::new(scheme, channel, power);
    cfg.epsilon = link.epsilon;
    cfg.gamma = link.gamma;
    cfg.trials = link.trials.0;
    cfg.seed = link.seed;
    cfg.ser_target = link.ser_target;
    cfg.noise_scale = link.noise_scale;
    cfg.constellation_cap = link.constellation_cap.0;
    cfg.validate()?;
    Ok(cfg)
}

pub fn simulate(args: &mut SimulateArgs, log: &mut String) -> Result<Outcome, CliError> {
    let cfg = sim_config(&mut args.link, args.p)?;
    let link = Link::new(&cfg)?;
    let r = run_link(&link, &cfg);
    let slope = scheduled_slope(
        link.analysis.total_desired,
        link.analysis.m_eff,
        cfg.epsilon,
    );
    let mut csv = Vec::new();
    write_sim_rows(&mut csv, std::slice::from_ref(&r), Some(slope), None)?;
    writeln!(
        log,
        "P = {:e}  Q = {}  A = {}  max SER = {}  sum rate = {} bits",
        r.power,
        r.q,
        r.amplitude,
        r.max_ser(),
        r.sum_rate
    )
    .unwrap();
    Ok(Outcome {
        csv: Some(csv),
        channels: vec![cfg.channel],
    })
}

pub fn dof(args: &mut DofArgs, out: &mut String, log: &mut String) -> Result<Outcome, CliError> {
    let scheme = scheme_of(args.link.scheme, args.link.k, args.link.n);
    if args.formula_only {
        match formula_dof(scheme)? {
            Some(f) => writeln!(out, "dof_formula {scheme} = {f}").unwrap(),
            None => {
                let analysis = analyze_plan(&plan_for(scheme)?)?;
                writeln!(out, "dof_profile {scheme} = {}", analysis.dof()).unwrap();
            }
        }
        return Ok(Outcome::default());
    }
    let range = args
        .p
        .ok_or_else(|| CliError::Usage("--P lo..hi is required".into()))?;
    let grid = log_grid(range.lo, range.hi, args.per_decade)?;
    let cfg = sim_config(&mut args.link, range.lo)?;
    let sweep = dof_sweep(&cfg, &grid)?;
    let mut csv = Vec::new();
    write_sweep_csv(&mut csv, &sweep)?;
    writeln!(
        log,
        "scheduled slope = {}  empirical slope = {}  fitted points = {}/{}",
        sweep.scheduled_slope,
        sweep.empirical_slope,
        sweep.fitted.iter().filter(|&&f| f).count(),
        sweep.fitted.len()
    )
    .unwrap();
    Ok(Outcome {
        csv: Some(csv),
        channels: vec![cfg.channel],
    })
}
