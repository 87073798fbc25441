mod args;
mod commands;
mod config;
mod error;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;
use realign_core::report::ExperimentManifest;
use serde::Serialize;

use args::{Cli, Command, OutputArgs, ReplayArgs};
use commands::Outcome;
use error::CliError;

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().collect();
    match run(argv) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            if !matches!(e, CliError::Parse) {
                eprintln!("error: {e}");
            }
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn parse(argv: Vec<String>) -> Result<Option<Cli>, CliError> {
    let argv = config::expand_config(argv)?;
    match Cli::try_parse_from(argv) {
        Ok(cli) => Ok(Some(cli)),
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            print!("{e}");
            Ok(None)
        }
        Err(e) => {
            eprint!("{}", e.render());
            Err(CliError::Parse)
        }
    }
}

fn run(argv: Vec<String>) -> Result<(), CliError> {
    let Some(cli) = parse(argv)? else {
        return Ok(());
    };
    if let Some(w) = cli.workers {
        if w == 0 {
            return Err(CliError::Usage("--workers must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(w)
            .build_global()
            .map_err(|e| CliError::Usage(e.to_string()))?;
    }
    match cli.command {
        Command::Replay(r) => replay(&r),
        command => execute(command, Destination::Recorded),
    }
}

/// Where CSV output goes.
enum Destination {
    /// The command's own `--out`, or stdout.
    Recorded,
    /// Compare against this file instead of writing.
    Check(PathBuf),
    Path(PathBuf),
}

fn execute(command: Command, dest: Destination) -> Result<(), CliError> {
    let mut out = String::new();
    let mut log = String::new();
    let result = match command {
        Command::Directions(a) => commands::directions(&a, &mut out).map(|_| None),
        Command::Analyze(a) => commands::analyze(&a, &mut out).map(|_| None),
        Command::Kappa(a) => {
            commands::kappa(&a, &mut log).map(|o| Some(("kappa", params(&a), a.output, o)))
        }
        Command::Mindist(mut a) => commands::mindist(&mut a, &mut log)
            .map(|o| Some(("mindist", params(&a), a.output.clone(), o))),
        Command::Simulate(mut a) => commands::simulate(&mut a, &mut log)
            .map(|o| Some(("simulate", params(&a), a.output.clone(), o))),
        Command::Dof(mut a) => commands::dof(&mut a, &mut out, &mut log)
            .map(|o| (!a.formula_only).then(|| ("dof", params(&a), a.output.clone(), o))),
        Command::Replay(_) => return Err(CliError::Usage("replay cannot be nested".into())),
    };
    print!("{out}");
    eprint!("{log}");
    let Some((name, params, output, outcome)) = result? else {
        return Ok(());
    };
    emit(name, params, &output, outcome, dest)
}

fn params<T: Serialize>(args: &T) -> serde_json::Value {
    serde_json::to_value(args).expect("arguments serialize")
}

fn emit(
    name: &str,
    params: serde_json::Value,
    output: &OutputArgs,
    outcome: Outcome,
    dest: Destination,
) -> Result<(), CliError> {
    let Some(csv) = outcome.csv else {
        return Ok(());
    };
    let target = match dest {
        Destination::Check(path) => {
            let recorded = std::fs::read(&path)
                .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
            if recorded != csv {
                return Err(CliError::Mismatch(format!(
                    "{} differs from the regenerated output",
                    path.display()
                )));
            }
            eprintln!("{}: identical", path.display());
            return Ok(());
        }
        Destination::Path(p) => Some(p),
        Destination::Recorded => output.out.as_ref().map(PathBuf::from),
    };
    match &target {
        Some(path) => std::fs::write(path, &csv)
            .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?,
        None => std::io::stdout().write_all(&csv)?,
    }
    if let Some(m) = &output.manifest {
        let mut manifest = ExperimentManifest::new(name, params);
        manifest.channels = outcome.channels;
        manifest.outputs = target.iter().map(|p| p.display().to_string()).collect();
        std::fs::write(m, manifest.to_json() + "\n")
            .map_err(|e| CliError::Io(format!("{m}: {e}")))?;
    }
    Ok(())
}

fn replay(args: &ReplayArgs) -> Result<(), CliError> {
    let text = std::fs::read_to_string(&args.manifest)
        .map_err(|e| CliError::Io(format!("{}: {e}", args.manifest)))?;
    let manifest: ExperimentManifest =
        serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("bad manifest: {e}")))?;
    if manifest.tool_version != env!("CARGO_PKG_VERSION") {
        eprintln!(
            "warning: manifest written by version {}, running {}",
            manifest.tool_version,
            env!("CARGO_PKG_VERSION")
        );
    }
    let mut argv = vec!["realign".to_string(), manifest.command.clone()];
    argv.extend(config::flags_from_json(&manifest.params)?);
    let cli = Cli::try_parse_from(&argv)
        .map_err(|e| CliError::Usage(format!("manifest parameters: {e}")))?;
    let recorded = manifest.outputs.first().map(PathBuf::from);
    let dest = match (&recorded, &args.out_dir, args.check) {
        (None, _, _) => return Err(CliError::Usage("manifest records no output file".into())),
        (Some(p), _, true) => Destination::Check(p.clone()),
        (Some(p), Some(dir), false) => {
            Destination::Path(Path::new(dir).join(p.file_name().unwrap_or_default()))
        }
        (Some(p), None, false) => Destination::Path(p.clone()),
    };
    execute(cli.command, dest)
}
