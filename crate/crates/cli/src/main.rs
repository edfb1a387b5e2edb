use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context as _;
use clap::{Args, Parser, Subcommand};
use ewald1d::experiment::BoundaryMode;
use ewald1d::io::{parse_sources, simulate, ConfigOverrides, FieldTable, GridSpec, RunConfig, MANIFEST_FILE};
use ewald1d::spectral::FourierTruncation;
use ewald1d::validation::{run_validation, ValidationTier};

/// Periodic one-dimensional self-gravitating sheets.
#[derive(Debug, Parser)]
#[command(name = "ewald1d", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run a configuration and write snapshots, diagnostics and a manifest.
    Simulate {
        /// Path to a `key = value` run configuration.
        config: PathBuf,
        #[command(flatten)]
        overrides: OverrideArgs,
    },
    /// Run the built-in self-checks and print a JSON report.
    Validate {
        #[arg(long, default_value = "fast")]
        tier: ValidationTier,
        /// Also write the report to this file.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Tabulate closed-form and series potentials and fields on a grid.
    Field {
        config: PathBuf,
        /// Source positions, one per line.
        sources: PathBuf,
        /// `xmin:xmax:count`, endpoints included.
        #[arg(long, allow_hyphen_values = true)]
        grid: GridSpec,
        /// Highest harmonic in the series columns.
        #[arg(long, default_value_t = 1000)]
        n_max: usize,
        /// Output file; standard output if omitted.
        #[arg(long, short)]
        output: Option<PathBuf>,
        #[command(flatten)]
        overrides: OverrideArgs,
    },
}

#[derive(Debug, Args)]
struct OverrideArgs {
    #[arg(long)]
    n_pairs: Option<usize>,
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long)]
    t_end: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    mode: Option<BoundaryMode>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    tolerance: Option<f64>,
}

impl From<OverrideArgs> for ConfigOverrides {
    fn from(a: OverrideArgs) -> Self {
        ConfigOverrides {
            n_pairs: a.n_pairs,
            gamma: a.gamma,
            t_end: a.t_end,
            seed: a.seed,
            mode: a.mode,
            output_dir: a.out,
            tolerance: a.tolerance,
        }
    }
}

/// Bad input (exit 2) versus a failed run or check (exit 1).
enum Failure {
    Usage(anyhow::Error),
    Run(anyhow::Error),
}

impl Failure {
    fn usage(e: impl Into<anyhow::Error>) -> Self {
        Failure::Usage(e.into())
    }

    fn run(e: impl Into<anyhow::Error>) -> Self {
        Failure::Run(e.into())
    }
}

fn load_config(path: &Path, overrides: OverrideArgs) -> Result<RunConfig, Failure> {
    RunConfig::load(path, &overrides.into()).map_err(Failure::usage)
}

fn cmd_simulate(config: &Path, overrides: OverrideArgs) -> Result<ExitCode, Failure> {
    let cfg = load_config(config, overrides)?;
    log::info!(
        "simulating 2N = {} sheets in {} mode to t = {}",
        cfg.domain.particle_count(),
        cfg.mode,
        cfg.t_end
    );
    let summary = simulate(&cfg)
        .with_context(|| format!("partial output in {}", cfg.output_dir.join(MANIFEST_FILE).display()))
        .map_err(Failure::run)?;
    println!(
        "wrote {} snapshots to {} ({} events)",
        summary.snapshots.len(),
        summary.output_dir.display(),
        summary.manifest.events
    );
    Ok(ExitCode::SUCCESS)
}

fn cmd_validate(tier: ValidationTier, report_path: Option<&Path>) -> Result<ExitCode, Failure> {
    let report = run_validation(tier).map_err(Failure::run)?;
    let json = report.to_json().map_err(Failure::run)?;
    if let Some(path) = report_path {
        std::fs::write(path, &json)
            .with_context(|| format!("writing {}", path.display()))
            .map_err(Failure::run)?;
    }
    println!("{json}");
    for c in report.checks.iter().filter(|c| !c.passed) {
        eprintln!("FAILED {}: measured {:e}, tolerance {:e}", c.name, c.measured, c.tolerance);
    }
    Ok(if report.passed { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn cmd_field(
    config: &Path,
    sources: &Path,
    grid: &GridSpec,
    n_max: usize,
    output: Option<&Path>,
    overrides: OverrideArgs,
) -> Result<ExitCode, Failure> {
    let cfg = load_config(config, overrides)?;
    let text = std::fs::read_to_string(sources)
        .with_context(|| format!("reading {}", sources.display()))
        .map_err(Failure::usage)?;
    let positions = parse_sources(&text, sources, &cfg.domain).map_err(Failure::usage)?;
    let trunc = FourierTruncation::new(n_max).map_err(Failure::usage)?;
    let table = FieldTable::compute(&positions, grid, trunc, &cfg.domain);
    match output {
        Some(path) => table.write(path).map_err(Failure::run)?,
        None => std::io::stdout()
            .write_all(table.to_text().as_bytes())
            .context("writing to standard output")
            .map_err(Failure::run)?,
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Simulate { config, overrides } => cmd_simulate(&config, overrides),
        Command::Validate { tier, report } => cmd_validate(tier, report.as_deref()),
        Command::Field {
            config,
            sources,
            grid,
            n_max,
            output,
            overrides,
        } => cmd_field(&config, &sources, &grid, n_max, output.as_deref(), overrides),
    };
    match outcome {
        Ok(code) => code,
        Err(Failure::Usage(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
        Err(Failure::Run(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
