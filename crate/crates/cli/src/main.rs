mod commands;
mod error;
mod output;
mod spec;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{CommandFactory, FromArgMatches, Parser};

use commands::{execute, Cmd};
use error::{CliError, CliResult};
use output::{extract_manifest, write_atomic, Manifest};
use spec::{sha256_hex, Inputs};

/// Beta random scaling of distributions: forward maps, inversion, tail checks,
/// elliptical conditional limits and tail estimation.
///
/// Thread count comes from BETASCALE_THREADS (default: all cores); it never changes values.
/// The manifest timestamp is taken from SOURCE_DATE_EPOCH when set.
#[derive(Debug, Parser)]
#[command(name = "betascale", version)]
struct Cli {
    /// Output file; stdout when absent, `-`, `csv` or `json`.
    #[arg(long, global = true)]
    out: Option<String>,
    /// Rerun the command recorded in an output file and compare bytes.
    #[arg(long, value_name = "FILE", conflicts_with = "out")]
    check: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Option<Cmd>,
}

const EXIT_USAGE: u8 = 64;

/// Every value may be negative; range checks belong to the library.
fn command() -> clap::Command {
    fn negatives(c: clap::Command) -> clap::Command {
        c.mut_args(|a| {
            if a.get_action().takes_values() {
                a.allow_negative_numbers(true)
            } else {
                a
            }
        })
        .mut_subcommands(negatives)
    }
    negatives(Cli::command())
}

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().collect();
    let cli = match command().try_get_matches_from(&argv).and_then(|m| Cli::from_arg_matches(&m)) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Err(e) = configure_threads() {
        eprintln!("betascale: {e}");
        return ExitCode::from(e.exit_code() as u8);
    }
    match run(cli, &argv[1..]) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("betascale: {e}");
            if matches!(e, CliError::Usage(_)) {
                let _ = command().print_help();
            }
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn configure_threads() -> CliResult<()> {
    let Ok(v) = std::env::var("BETASCALE_THREADS") else { return Ok(()) };
    let n: usize = v
        .trim()
        .parse()
        .map_err(|_| CliError::Usage(format!("BETASCALE_THREADS must be a positive integer, got '{v}'")))?;
    if n == 0 {
        return Err(CliError::Usage("BETASCALE_THREADS must be positive".into()));
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Usage(e.to_string()))
}

fn run(cli: Cli, args: &[String]) -> CliResult<()> {
    if let Some(file) = &cli.check {
        if cli.cmd.is_some() {
            return Err(CliError::Usage("--check takes no subcommand".into()));
        }
        return check(file);
    }
    let Some(cmd) = &cli.cmd else {
        return Err(CliError::Usage("a subcommand or --check is required".into()));
    };
    let bytes = produce(cmd, strip_out(args), Manifest::timestamp_from_env())?;
    match cli.out.as_deref() {
        None | Some("-") | Some("csv") | Some("json") => {
            let mut so = std::io::stdout().lock();
            so.write_all(&bytes)?;
            so.flush()?;
        }
        Some(path) => write_atomic(Path::new(path), &bytes)?,
    }
    Ok(())
}

/// Runs `cmd` and renders it with its manifest.
fn produce(cmd: &Cmd, args: Vec<String>, timestamp: Option<String>) -> CliResult<Vec<u8>> {
    let mut inputs = Inputs::default();
    let r = execute(cmd, &mut inputs)?;
    let manifest = Manifest {
        tool: env!("CARGO_PKG_NAME").into(),
        version: env!("CARGO_PKG_VERSION").into(),
        subcommand: r.name.into(),
        args,
        params: serde_json::to_value(cmd).map_err(|e| CliError::Input(e.to_string()))?,
        seeds: r.seeds,
        inputs: inputs.digests,
        timestamp,
    };
    r.output.render(&manifest)
}

/// The argument list without `--out` and its value.
fn strip_out(args: &[String]) -> Vec<String> {
    let mut out = Vec::with_capacity(args.len());
    let mut skip = false;
    for a in args {
        if skip {
            skip = false;
        } else if a == "--out" {
            skip = true;
        } else if !a.starts_with("--out=") {
            out.push(a.clone());
        }
    }
    out
}

fn check(file: &Path) -> CliResult<()> {
    let stored = std::fs::read(file).map_err(|e| CliError::Input(format!("{}: {e}", file.display())))?;
    let manifest = extract_manifest(&stored)?;
    for d in &manifest.inputs {
        let now = std::fs::read(&d.path).map_err(|e| CliError::Input(format!("{}: {e}", d.path)))?;
        if sha256_hex(&now) != d.sha256 {
            return Err(CliError::Mismatch(format!("input {} changed since the run", d.path)));
        }
    }
    let mut argv = vec!["betascale".to_string()];
    argv.extend(manifest.args.iter().cloned());
    let cli = command()
        .try_get_matches_from(&argv)
        .and_then(|m| Cli::from_arg_matches(&m))
        .map_err(|e| CliError::Input(format!("recorded arguments do not parse: {e}")))?;
    let cmd = cli.cmd.ok_or_else(|| CliError::Input("recorded arguments name no subcommand".into()))?;
    let fresh = produce(&cmd, manifest.args.clone(), manifest.timestamp.clone())?;
    if fresh != stored {
        let line = fresh
            .split(|&b| b == b'\n')
            .zip(stored.split(|&b| b == b'\n'))
            .position(|(a, b)| a != b)
            .map_or_else(|| "length differs".to_string(), |i| format!("first difference on line {}", i + 1));
        return Err(CliError::Mismatch(format!("{}: {line}", file.display())));
    }
    println!("ok: {} reproduced ({} bytes)", file.display(), stored.len());
    Ok(())
}
