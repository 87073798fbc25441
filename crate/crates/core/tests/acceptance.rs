//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use realign_core::channel::{sample_channel, sample_direction_values, sample_mac, Channel};
use realign_core::direction::{
    alignment_efficiency, analyze_plan, dof_formula_kuser, dof_formula_three_user,
    interference_hull_count, kuser_direction_count, kuser_layout, packed_interference_hull,
    packed_kuser_directions, shifted_disjoint, shifted_subset, three_user_plan, Scheme,
};
use realign_core::lattice::{empirical_kappa, min_distance, ConstellationSpec, StreamRange};
use realign_core::report::write_sweep_csv;
use realign_core::sim::{
    decode_position, decode_position_linear, dof_sweep, log_grid, plan_for, run_trials,
    scheduled_slope, Link, SimConfig,
};

use common::{
    all_symbol_vectors, attained, cases, exact_rational, mac_dmin_slope, pairwise_min,
    round_trip_error,
};

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check, Option<Duration>);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

const GRID_K: [usize; 3] = [2, 3, 4];
const GRID_N: [u32; 3] = [1, 2, 3];
const PACKED_CAP: u128 = 20_000_000;

fn c1_combinatorics() -> Check {
    for k in GRID_K {
        for n in GRID_N {
            let layout = kuser_layout(k, n).map_err(|e| e.to_string())?;
            let expected_t =
                (n as u128).pow(k as u32 - 1) * (n as u128 + 1).pow(((k - 1) * (k - 1)) as u32);
            let expected_r = (n as u128 + 1).pow((k * (k - 1)) as u32);
            for i in 1..=k {
                let t = packed_kuser_directions(&layout, n, i, PACKED_CAP)
                    .map_err(|e| e.to_string())?;
                ensure(t.len() as u128 == expected_t, || {
                    format!("K={k} n={n} |T_{i}| = {} != {expected_t}", t.len())
                })?;
            }
            let hull =
                packed_interference_hull(&layout, n, PACKED_CAP).map_err(|e| e.to_string())?;
            ensure(hull.len() as u128 == expected_r, || {
                format!("K={k} n={n} |T_r| = {} != {expected_r}", hull.len())
            })?;
        }
    }
    Ok("|T_i| and |T_r| exact on K in {2,3,4}, n in {1,2,3}".into())
}

fn c2_alignment() -> Check {
    for k in GRID_K {
        for n in GRID_N {
            let layout = kuser_layout(k, n).map_err(|e| e.to_string())?;
            let hull =
                packed_interference_hull(&layout, n, PACKED_CAP).map_err(|e| e.to_string())?;
            for l in 1..=k {
                let t = packed_kuser_directions(&layout, n, l, PACKED_CAP)
                    .map_err(|e| e.to_string())?;
                for j in 1..=k {
                    let shift = layout.symbol(j, l);
                    if j == l {
                        ensure(shifted_disjoint(&t, shift, &hull), || {
                            format!("K={k} n={n}: h{j}{j} T_{j} meets T_r")
                        })?;
                    } else {
                        ensure(shifted_subset(&t, shift, &hull), || {
                            format!("K={k} n={n}: h{j}{l} T_{l} not inside T_r")
                        })?;
                    }
                }
            }
        }
    }
    for n in 1..=8u32 {
        let plan = three_user_plan(n).map_err(|e| e.to_string())?;
        let a = analyze_plan(&plan).map_err(|e| e.to_string())?;
        let lp: Vec<usize> = a.profiles.iter().map(|p| p.l_prime).collect();
        let want = vec![n as usize, n as usize + 1, n as usize + 1];
        ensure(lp == want, || {
            format!("three-user n={n}: L' = {lp:?}, want {want:?}")
        })?;
        ensure(a.m == 2 * n as usize + 1, || {
            format!("three-user n={n}: m = {}", a.m)
        })?;
    }
    Ok("interference inside T_r, desired disjoint; three-user L' = (n, n+1, n+1), m = 2n+1 for n 1..8".into())
}

fn c3_efficiency() -> Check {
    let e1 = alignment_efficiency(1).map_err(|e| e.to_string())?;
    ensure(e1.eta == Ratio::new(1, 3), || {
        format!("eta(1) = {}", e1.eta)
    })?;
    let e2 = alignment_efficiency(2).map_err(|e| e.to_string())?;
    ensure(e2.eta == Ratio::new(8, 19), || {
        format!("eta(2) = {}", e2.eta)
    })?;
    for n in 1..=10u32 {
        let e = alignment_efficiency(n).map_err(|e| e.to_string())?;
        let bound = Ratio::new((n as u64).pow(3), (n as u64 + 1).pow(3));
        ensure(e.eta > bound, || {
            format!("eta({n}) = {} not above {bound}", e.eta)
        })?;
        ensure(e.l2 <= (n as u64 + 1).pow(3), || {
            format!("L2({n}) = {}", e.l2)
        })?;
    }
    Ok("eta(1) = 1/3, eta(2) = 8/19, eta(n) > (n/(n+1))^3 and L2 <= (n+1)^3 for n 1..10".into())
}

fn c4_closed_form() -> Check {
    for n in 1..=200u32 {
        let got = dof_formula_three_user(n).map_err(|e| e.to_string())?;
        let want = Ratio::new(3 * n as u64 + 1, 2 * n as u64 + 1);
        ensure(got == want, || format!("three-user n={n}: {got} != {want}"))?;
    }
    let mut failures = Vec::new();
    for k in 2..=6usize {
        let half = k as f64 / 2.0;
        let mut prev = f64::NEG_INFINITY;
        for n in 1..=100u32 {
            let d = dof_formula_kuser(k, n).map_err(|e| e.to_string())?;
            ensure(d > prev, || format!("K={k}: not increasing at n={n}"))?;
            ensure(d < half, || format!("K={k} n={n}: {d} not below K/2"))?;
            prev = d;
        }
        let gap = (half - prev) / half;
        if gap > 0.02 {
            failures.push(format!("K={k} n=100 is {:.3}% below K/2", 100.0 * gap));
        }
    }
    for k in GRID_K {
        for n in GRID_N {
            let layout = kuser_layout(k, n).map_err(|e| e.to_string())?;
            let l = packed_kuser_directions(&layout, n, 1, PACKED_CAP)
                .map_err(|e| e.to_string())?
                .len() as f64;
            let lp = packed_interference_hull(&layout, n, PACKED_CAP)
                .map_err(|e| e.to_string())?
                .len() as f64;
            let cross = k as f64 * l / (l + lp + 1.0);
            let d = dof_formula_kuser(k, n).map_err(|e| e.to_string())?;
            ensure((d - cross).abs() / cross < 1e-12, || {
                format!("K={k} n={n}: formula {d} vs enumerated {cross}")
            })?;
            ensure(
                Some(l as u128) == kuser_direction_count(k, n)
                    && Some(lp as u128) == interference_hull_count(k, n),
                || format!("K={k} n={n}: count mismatch"),
            )?;
        }
    }
    if failures.is_empty() {
        Ok("three-user rationals exact; K-user increasing, below and within 2% of K/2; cross-check < 1e-12".into())
    } else {
        Err(failures.join("; "))
    }
}

fn c5_khintchine() -> Check {
    let positive = (0..100u64)
        .filter(|&s| {
            empirical_kappa(&sample_direction_values(s, 2), 30, 0.1)
                .map(|k| k.is_positive())
                .unwrap_or(false)
        })
        .count();
    let (a, b) = (2f64.sqrt(), 3f64.sqrt());
    let slope = mac_dmin_slope(a, b);
    let mut slopes: Vec<f64> = (0..100)
        .map(|s| {
            let c = sample_mac(s);
            mac_dmin_slope(c.a, c.b)
        })
        .collect();
    slopes.sort_by(f64::total_cmp);
    let median = 0.5 * (slopes[49] + slopes[50]);
    let inside = slopes.iter().filter(|s| (*s + 2.0).abs() <= 0.4).count();
    let summary = format!(
        "positive envelope on {positive}/100 seeds; MAC slope at (sqrt2, sqrt3) = {slope:.4}; \
         over 100 sampled channels median {median:.4}, {inside}/100 within 0.4"
    );
    ensure(positive >= 95, || summary.clone())?;
    ensure((slope + 2.0).abs() <= 0.4, || summary.clone())?;
    Ok(summary)
}

fn c6_oracles() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut checked = 0;
    while checked < 100 {
        let m = rng.random_range(1..=3usize);
        let q = rng.random_range(2..=4u64);
        let mut streams = Vec::new();
        let mut ranges = Vec::new();
        let mut values = Vec::new();
        for j in 0..m {
            let unit = j == 0 && rng.random_bool(0.5);
            let value = if unit {
                1.0
            } else {
                rng.random_range(0.25..4.0) * if rng.random() { 1.0 } else { -1.0 }
            };
            let contributors = rng.random_range(1..=2usize);
            streams.push(StreamRange::new(value, q, contributors, unit));
            ranges.push(contributors as i64 * (q as i64 - 1));
            values.push(value);
        }
        if ranges.iter().map(|r| 2 * r + 1).product::<i64>() > 2000 {
            continue;
        }
        let got = min_distance(&streams, 1.0).map_err(|e| e.to_string())?;
        let oracle = pairwise_min(&values, &ranges);
        ensure(
            exact_rational(got.exact) == oracle && attained(&values, &got.argmin) == oracle,
            || format!("min_distance differs from the pairwise scan for {values:?} {ranges:?}"),
        )?;
        checked += 1;
    }

    for _ in 0..1000 {
        let n = rng.random_range(1..60);
        let mut points: Vec<f64> = (0..n)
            .map(|_| rng.random_range(-40..40) as f64 * 0.25)
            .collect();
        points.sort_by(f64::total_cmp);
        points.dedup();
        let rx = match rng.random_range(0..3) {
            0 => points[rng.random_range(0..points.len())],
            1 => rng.random_range(-90..90) as f64 * 0.125,
            _ => rng.random_range(-12.0..12.0),
        };
        ensure(
            decode_position(rx, &points) == decode_position_linear(rx, &points),
            || format!("decode differs at {rx} over {points:?}"),
        )?;
    }

    let mut links = 0;
    let mut vectors = 0u64;
    for seed in 0..5 {
        for (plan, cfg) in cases(seed) {
            for q in 2..=3 {
                let spec = ConstellationSpec::new(q, 1.7).map_err(|e| e.to_string())?;
                let link = Link::with_spec(plan.clone(), &cfg, spec).map_err(|e| e.to_string())?;
                if link.constellations.iter().any(|c| c.len() > 10_000) {
                    continue;
                }
                links += 1;
                for symbols in all_symbol_vectors(&link) {
                    if let Some(e) = round_trip_error(&link, &symbols) {
                        return Err(format!("round trip: {e}"));
                    }
                    vectors += 1;
                }
            }
        }
    }
    Ok(format!(
        "100 min_distance oracles, 1000 decode oracles, {vectors} noiseless round trips over {links} constellations"
    ))
}

/// Pinned error-free runs at P = 1e10 with gamma = 0.25: (scheme, seed, Q).
const GOLDEN: [(Scheme, u64, u64); 6] = [
    (Scheme::Mac, 1, 7),
    (Scheme::Mac, 7, 7),
    (Scheme::Mac, 42, 7),
    (Scheme::XChannel, 1, 3),
    (Scheme::XChannel, 7, 3),
    (Scheme::XChannel, 42, 3),
];
const LINK_GAMMA: f64 = 0.25;

fn channel_of(scheme: Scheme, seed: u64) -> Result<Channel, String> {
    match scheme {
        Scheme::Mac => Ok(Channel::Mac(sample_mac(seed))),
        Scheme::XChannel => sample_channel(seed, 2)
            .map(Channel::Gains)
            .map_err(|e| e.to_string()),
        other => Err(format!("no link run for {other:?}")),
    }
}

fn c7_link() -> Check {
    let mut notes = Vec::new();
    for (scheme, seed, q) in GOLDEN {
        let mut cfg = SimConfig::new(scheme, channel_of(scheme, seed)?, 1e10);
        cfg.gamma = LINK_GAMMA;
        cfg.trials = 100_000;
        cfg.seed = seed;
        let r = run_trials(&cfg).map_err(|e| e.to_string())?;
        let errors: u64 = r.streams.iter().map(|s| s.errors).sum();
        ensure(r.max_ser() <= 1e-2, || {
            format!("{scheme:?} seed {seed}: SER {}", r.max_ser())
        })?;
        ensure(r.q == q && errors == 0, || {
            format!(
                "{scheme:?} seed {seed}: Q = {} errors = {errors}, golden Q = {q} errors = 0",
                r.q
            )
        })?;
    }
    notes.push("SER 0 at P = 1e10 for MAC and X channel, seeds 1/7/42".to_string());

    for (scheme, lo, hi) in [(Scheme::Mac, 1e13, 1e17), (Scheme::XChannel, 1e16, 1e21)] {
        let plan = plan_for(scheme).map_err(|e| e.to_string())?;
        let analysis = analyze_plan(&plan).map_err(|e| e.to_string())?;
        let expected = analysis.total_desired as f64 * 0.9 / (analysis.m_eff as f64 + 0.1);
        ensure(
            scheduled_slope(analysis.total_desired, analysis.m_eff, 0.1) == expected,
            || format!("{scheme:?}: scheduled slope arithmetic"),
        )?;
        let grid = log_grid(lo, hi, 1).map_err(|e| e.to_string())?;
        for seed in [1u64, 7, 42] {
            let mut cfg = SimConfig::new(scheme, channel_of(scheme, seed)?, lo);
            cfg.gamma = LINK_GAMMA;
            cfg.trials = 20_000;
            cfg.seed = seed;
            let sweep = dof_sweep(&cfg, &grid).map_err(|e| e.to_string())?;
            ensure(sweep.scheduled_slope == expected, || {
                format!(
                    "{scheme:?} seed {seed}: reported {} != {expected}",
                    sweep.scheduled_slope
                )
            })?;
            let rel = (sweep.empirical_slope - expected).abs() / expected;
            let used = sweep.fitted.iter().filter(|&&f| f).count();
            ensure(rel <= 0.05, || {
                format!(
                    "{scheme:?} seed {seed}: empirical {} vs scheduled {expected} ({:.2}%)",
                    sweep.empirical_slope,
                    100.0 * rel
                )
            })?;
            notes.push(format!(
                "{scheme:?} seed {seed} {:.2}% on {used}/{} points",
                100.0 * rel,
                grid.len()
            ));
        }
    }
    Ok(notes.join("; "))
}

fn c8_determinism() -> Check {
    let mut cfg = SimConfig::new(Scheme::XChannel, channel_of(Scheme::XChannel, 3)?, 1e6);
    cfg.gamma = 0.5;
    cfg.trials = 30_001;
    cfg.seed = 3;
    let manifest = serde_json::to_string(&cfg).map_err(|e| e.to_string())?;
    let grid = log_grid(1e6, 1e10, 1).map_err(|e| e.to_string())?;
    let run = |threads: usize| -> Result<Vec<u8>, String> {
        let cfg: SimConfig = serde_json::from_str(&manifest).map_err(|e| e.to_string())?;
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .map_err(|e| e.to_string())?;
        let sweep = pool
            .install(|| dof_sweep(&cfg, &grid))
            .map_err(|e| e.to_string())?;
        let mut csv = Vec::new();
        write_sweep_csv(&mut csv, &sweep).map_err(|e| e.to_string())?;
        Ok(csv)
    };
    let one = run(1)?;
    for threads in [2, 4, 7] {
        ensure(run(threads)? == one, || {
            format!("CSV differs between 1 and {threads} workers")
        })?;
    }
    Ok(format!(
        "{} CSV bytes identical for 1, 2, 4 and 7 workers",
        one.len()
    ))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        (
            "exact combinatorics",
            c1_combinatorics,
            Some(Duration::from_secs(10)),
        ),
        ("alignment subset/disjointness", c2_alignment, None),
        ("partial-alignment efficiency", c3_efficiency, None),
        ("closed-form DOF", c4_closed_form, None),
        (
            "Khintchine-Groshev scaling",
            c5_khintchine,
            Some(Duration::from_secs(300)),
        ),
        ("oracle equivalences", c6_oracles, None),
        ("link behavior", c7_link, Some(Duration::from_secs(900))),
        ("determinism", c8_determinism, None),
    ];
    let mut failed = 0;
    for (i, (name, check, limit)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let result =
            catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|_| Err("panicked".into()));
        let elapsed = start.elapsed();
        let result = match (result, limit) {
            (Ok(_), Some(limit)) if elapsed > limit => {
                Err(format!("took {elapsed:.1?}, limit {limit:?}"))
            }
            (r, _) => r,
        };
        let (tag, detail) = match result {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failed += 1;
                ("FAIL", d)
            }
        };
        println!(
            "{tag} {} {name} ({:.2} s): {detail}",
            i + 1,
            elapsed.as_secs_f64()
        );
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
