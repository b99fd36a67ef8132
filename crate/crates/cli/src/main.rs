use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};

use nonlocal_lab::commands;
use nonlocal_lab::config::{ExperimentConfig, Format};
use nonlocal_lab::error::CliError;
use nonlocal_lab::report::Report;

#[derive(Parser, Debug)]
#[command(name = "nonlocal-lab", version, about = "Experiments on nonlocal difference-quotient functionals")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// TOML configuration; defaults apply to anything it leaves out.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Depth of the Cantor partial sums.
    #[arg(long, global = true)]
    jmax: Option<u32>,

    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[arg(long, global = true, value_enum)]
    format: Option<Format>,

    /// Worker threads for cell-level work (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum Command {
    /// Sequence conditions, quotient bounds and partial sums for the Cantor staircase.
    Counterexample,
    /// Finite/divergent classification of the Heaviside jump across weights.
    Heaviside,
    /// Region integral surrogate against the measure defect of the image.
    Locvsglob,
    /// Band densities against `J ω(μ)/μ²`.
    Gamma,
    /// Fuzzing of the pairwise-product inequality.
    Olimpico,
}

fn run(cli: &Cli) -> Result<Report, CliError> {
    let mut cfg = match &cli.config {
        Some(p) => ExperimentConfig::load(p)?,
        None => ExperimentConfig::default(),
    };
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if let Some(j) = cli.jmax {
        cfg.counterexample.j_max = j;
    }
    if let Some(o) = &cli.out {
        cfg.output.dir = o.clone();
    }
    if let Some(f) = cli.format {
        cfg.output.format = f;
    }
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Config(e.to_string()))?;
    }
    let start = Instant::now();
    let mut report = match cli.command {
        Command::Counterexample => commands::counterexample(&cfg)?,
        Command::Heaviside => commands::heaviside_dichotomy(&cfg)?,
        Command::Locvsglob => commands::locvsglob(&cfg)?,
        Command::Gamma => commands::gamma(&cfg)?,
        Command::Olimpico => commands::olimpico(&cfg)?,
    };
    report.wall_time_ms = start.elapsed().as_millis() as u64;
    for path in report.write(&cfg.output.dir, cfg.output.format)? {
        log::info!("wrote {}", path.display());
    }
    Ok(report)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(report) => {
            for c in &report.checks {
                println!("{} {}: {}", if c.pass { "PASS" } else { "FAIL" }, c.name, c.detail);
            }
            for n in &report.notes {
                println!("note: {n}");
            }
            if report.pass {
                ExitCode::SUCCESS
            } else {
                for c in report.failures() {
                    eprintln!("failed: {} (margin {:?}): {}", c.name, c.margin, c.detail);
                }
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
