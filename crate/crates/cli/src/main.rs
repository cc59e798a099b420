//! Scenario runner: reads a JSON scenario, executes it against the verify
//! engine, and prints the report as text tables or pretty JSON.
//!
//! Exit codes: 0 when every verdict agrees with the oracle, 1 when the run
//! finished but something disagreed, 2 on bad input or an internal error.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use anyhow::{bail, Context, Result};
use clap::{Parser, ValueEnum};

use fitzcert::scenario::{parse_scenario, run, Scenario};

/// Environment defaults, consulted only when neither the flag nor the
/// scenario file sets the value.
const ENV_BOX: &str = "FITZCERT_BOX";
const ENV_GRID_N: &str = "FITZCERT_GRID_N";

#[derive(Parser)]
#[command(name = "fitzcert", version, about = "Range certificates for sums of monotone operators")]
struct Args {
    /// Scenario file (JSON)
    #[arg(long, value_name = "FILE")]
    scenario: PathBuf,

    /// Report format
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,

    /// Override the scenario's dual-grid node count
    #[arg(long, value_name = "INT")]
    grid_n: Option<usize>,

    /// Override the scenario's evaluation box half-width
    #[arg(long, value_name = "REAL")]
    r#box: Option<f64>,

    /// Override the scenario's grid-route tolerance
    #[arg(long, value_name = "REAL")]
    tol: Option<f64>,

    /// Override the scenario's random seed
    #[arg(long, value_name = "INT")]
    seed: Option<u64>,

    /// Write the report to a file instead of stdout
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Text,
}

fn env_default<T: FromStr>(name: &str) -> Result<Option<T>> {
    match std::env::var(name) {
        Ok(raw) => match raw.trim().parse() {
            Ok(v) => Ok(Some(v)),
            Err(_) => bail!("{name}: cannot parse `{raw}`"),
        },
        Err(_) => Ok(None),
    }
}

/// Flags beat scenario fields; environment defaults fill fields the
/// scenario left unset. `tol` and `seed` have no environment default.
fn apply_overrides(sc: &mut Scenario, args: &Args) -> Result<()> {
    if args.grid_n.is_some() {
        sc.grid_n = args.grid_n;
    } else if sc.grid_n.is_none() {
        sc.grid_n = env_default(ENV_GRID_N)?;
    }
    if args.r#box.is_some() {
        sc.box_half = args.r#box;
    } else if sc.box_half.is_none() {
        sc.box_half = env_default(ENV_BOX)?;
    }
    if args.tol.is_some() {
        sc.tol = args.tol;
    }
    if args.seed.is_some() {
        sc.seed = args.seed;
    }
    Ok(())
}

fn execute(args: &Args) -> Result<bool> {
    let text = fs::read_to_string(&args.scenario)
        .with_context(|| format!("reading {}", args.scenario.display()))?;
    let mut sc = parse_scenario(&text)
        .with_context(|| format!("parsing {}", args.scenario.display()))?;
    apply_overrides(&mut sc, args)?;

    let report = run(&sc).context("running scenario")?;
    let rendered = match args.format {
        Format::Json => {
            let mut s = report.to_json();
            s.push('\n');
            s
        }
        Format::Text => report.render_text(),
    };
    match &args.out {
        Some(path) => fs::write(path, &rendered)
            .with_context(|| format!("writing {}", path.display()))?,
        None => print!("{rendered}"),
    }
    Ok(report.ok)
}

fn main() -> ExitCode {
    let args = Args::parse();
    match execute(&args) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
