use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use qsg_core::builders::{build, ExperimentConfig, Variant};
use qsg_core::experiment::{run_sweep, OutputFormat, Overrides, SweepConfig};
use qsg_core::verify::{run_suite, Suite};
use qsg_core::{cost, lower};

#[derive(Parser)]
#[command(
    name = "qsg",
    version,
    about = "Skip-gate Grover sweeps and verification"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a configuration sweep and write one row per (R, variant).
    Run {
        /// TOML or JSON sweep configuration.
        #[arg(long)]
        config: PathBuf,
        /// Output file; defaults to the config's output.path, else stdout.
        #[arg(long)]
        output: Option<PathBuf>,
        #[arg(long, value_parser = parse_format)]
        format: Option<OutputFormat>,
        #[arg(long)]
        shots: Option<u64>,
        #[arg(long)]
        seed: Option<u64>,
        /// Run only this variant.
        #[arg(long, value_parser = parse_variant)]
        variant: Option<Variant>,
    },
    /// Run an invariant battery; `all` runs every suite.
    Verify {
        /// unitarity, swap-equivalence, ancilla, block-structure, metrics or all
        suite: String,
    },
    /// Print a benchmark circuit as JSON, or its cost report.
    Circuit {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = 1)]
        reps: usize,
        #[arg(long, value_parser = parse_variant)]
        variant: Variant,
        /// Emit the circuit lowered to the native basis.
        #[arg(long)]
        lowered: bool,
        /// Emit the cost report instead of the gates.
        #[arg(long)]
        cost: bool,
    },
}

fn parse_format(s: &str) -> Result<OutputFormat, String> {
    s.parse().map_err(|e: qsg_core::Error| e.to_string())
}

fn parse_variant(s: &str) -> Result<Variant, String> {
    s.parse().map_err(|e: qsg_core::Error| e.to_string())
}

fn main() -> ExitCode {
    match dispatch(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn dispatch(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Run {
            config,
            output,
            format,
            shots,
            seed,
            variant,
        } => {
            let mut sweep = SweepConfig::load(&config)?;
            sweep.apply(&Overrides {
                shots,
                seed,
                variant,
            })?;
            let format = format.unwrap_or(sweep.output.format);
            let report = run_sweep(&sweep)?;
            let text = report.render(format)?;
            match output.or_else(|| sweep.output.path.clone()) {
                Some(path) => {
                    fs::write(&path, text)
                        .with_context(|| format!("writing {}", path.display()))?;
                    eprintln!("wrote {} rows to {}", report.points.len(), path.display());
                }
                None => print!("{text}"),
            }
            Ok(true)
        }
        Command::Verify { suite } => {
            let suites = if suite == "all" {
                Suite::ALL.to_vec()
            } else {
                vec![suite.parse::<Suite>()?]
            };
            let mut ok = true;
            for s in suites {
                let report = run_suite(s)?;
                println!("{report}");
                ok &= report.passed();
            }
            Ok(ok)
        }
        Command::Circuit {
            n,
            k,
            reps,
            variant,
            lowered,
            cost: want_cost,
        } => {
            let cfg = ExperimentConfig::new(n, k, reps, variant)?;
            let mut circuit = build(&cfg)?;
            if lowered || want_cost {
                circuit = lower(&circuit)?;
            }
            if want_cost {
                println!("{}", serde_json::to_string_pretty(&cost(&circuit))?);
            } else {
                println!("{}", circuit.to_json()?);
            }
            Ok(true)
        }
    }
}
