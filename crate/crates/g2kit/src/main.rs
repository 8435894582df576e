use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use g2kit::compare::ANALYTIC_TOLERANCE;
use g2kit::config::DEFAULT_TOLERANCE;
use g2kit::{compare_curves, compute_curve, io, thread_count, CliError, Format, Method, Overrides, RunConfig};
use g2kit_core::regression::classify;

#[derive(Parser)]
#[command(name = "g2kit", version)]
#[command(about = "First- and second-order correlation curves of a damped, noise-driven bosonic mode")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Default)]
struct GridFlags {
    /// Replace the ensemble seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Replace grid.tau_max.
    #[arg(long)]
    tau_max: Option<f64>,
    /// Replace grid.steps.
    #[arg(long)]
    steps: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Compute a correlation curve and write it as CSV or JSON.
    Correlate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, value_enum)]
        method: Option<Method>,
        #[command(flatten)]
        grid: GridFlags,
        /// Output file; standard output when neither this nor output.path is set.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum)]
        format: Option<Format>,
    },
    /// Run two configurations on the same parameters and grid and compare them.
    Compare {
        config_a: PathBuf,
        config_b: PathBuf,
        #[command(flatten)]
        grid: GridFlags,
        /// Absolute tolerance when neither curve carries standard errors.
        #[arg(long, default_value_t = ANALYTIC_TOLERANCE)]
        tolerance: f64,
    },
    /// Label a curve file as bunched/antibunched/flat and by photon statistics.
    Classify {
        curve: PathBuf,
        #[arg(long, default_value_t = DEFAULT_TOLERANCE)]
        tolerance: f64,
    },
}

fn load(path: &Path, overrides: &Overrides) -> Result<RunConfig, CliError> {
    let mut cfg = RunConfig::from_path(path)?;
    cfg.apply(overrides)?;
    cfg.validate()?;
    Ok(cfg)
}

fn correlate(config: PathBuf, overrides: Overrides) -> Result<(), CliError> {
    let cfg = load(&config, &overrides)?;
    let curve = compute_curve(&cfg, thread_count()?)?;
    let format = cfg.output_format();
    match &cfg.output.path {
        Some(path) => {
            let failed = |source| CliError::Output { path: path.clone(), source };
            let mut w = BufWriter::new(File::create(path).map_err(failed)?);
            io::write_curve(&curve, format, &mut w).and_then(|_| w.flush()).map_err(failed)?;
            eprintln!("{} rows ({}) written to {}", curve.len(), cfg.method, path.display());
        }
        None => {
            let stdout = std::io::stdout();
            io::write_curve(&curve, format, stdout.lock())
                .map_err(|source| CliError::Output { path: "<stdout>".into(), source })?;
        }
    }
    Ok(())
}

fn compare(a: PathBuf, b: PathBuf, overrides: Overrides, tolerance: f64) -> Result<(), CliError> {
    let (cfg_a, cfg_b) = (load(&a, &overrides)?, load(&b, &overrides)?);
    if cfg_a.params != cfg_b.params {
        return Err(CliError::Config("configurations have different params".into()));
    }
    if cfg_a.grid != cfg_b.grid {
        return Err(CliError::Config("configurations have different grids".into()));
    }
    let threads = thread_count()?;
    let (curve_a, curve_b) = (compute_curve(&cfg_a, threads)?, compute_curve(&cfg_b, threads)?);
    let result = compare_curves(&curve_a, &curve_b, tolerance)?;
    println!("{} vs {}", cfg_a.method, cfg_b.method);
    print!("{}", result.report());
    if result.passed {
        Ok(())
    } else {
        Err(CliError::Mismatch(format!("{} vs {} outside tolerance", cfg_a.method, cfg_b.method)))
    }
}

fn classify_file(path: PathBuf, tolerance: f64) -> Result<(), CliError> {
    let curve = io::read_curve(&path)?;
    let label = classify(&curve, tolerance).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    let g2 = curve.g2.as_deref().expect("classified curves have g2");
    println!("{label}");
    println!("g2(0) = {}", io::format_number(g2[0]));
    println!(
        "g2(tail) = {} at tau = {}",
        io::format_number(g2[g2.len() - 1]),
        io::format_number(curve.tau_grid[g2.len() - 1])
    );
    println!("tolerance = {tolerance:e}");
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Correlate { config, method, grid, out, format } => correlate(
            config,
            Overrides { method, seed: grid.seed, tau_max: grid.tau_max, steps: grid.steps, out, format },
        ),
        Command::Compare { config_a, config_b, grid, tolerance } => compare(
            config_a,
            config_b,
            Overrides { seed: grid.seed, tau_max: grid.tau_max, steps: grid.steps, ..Overrides::default() },
            tolerance,
        ),
        Command::Classify { curve, tolerance } => classify_file(curve, tolerance),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("g2kit: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
