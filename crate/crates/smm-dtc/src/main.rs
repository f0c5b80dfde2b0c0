//! Command-line front end. All physics lives in the library; this binary
//! only parses arguments, applies flag overrides, and dispatches.

use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};

use smm_dtc::analysis::{dtc_susceptibility, f_dtc_analytic, f_dtc_gap};
use smm_dtc::config::{load_config, LoadedConfig, RunConfig};
use smm_dtc::error::{Error, Result};
use smm_dtc::evolution::Backend;
use smm_dtc::model::single_smm_spectrum;
use smm_dtc::output;
use smm_dtc::pipeline::{execute_run, execute_sweep};

#[derive(Parser)]
#[command(
    name = "smm-dtc",
    version,
    about = "Discrete time crystals in driven chains of single-molecule magnets"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Flag overrides applied on top of the loaded config (for sweeps, on the
/// base config before axis expansion).
#[derive(Args, Default)]
struct Overrides {
    /// Evolution backend: stepping | spectral.
    #[arg(long)]
    backend: Option<String>,
    /// Output directory (beats the environment variable and the config).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Number of drive periods to evolve.
    #[arg(long)]
    periods: Option<usize>,
    /// Expectation-value samples per drive period.
    #[arg(long)]
    samples_per_period: Option<usize>,
    /// RNG seed for the random product initial state.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Execute a single run and write its artifacts.
    Run {
        config: PathBuf,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Execute a parameter sweep (config must declare axes).
    Sweep {
        config: PathBuf,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Write analytic-only artifacts: single-SMM levels and f_DTC(B)
    /// curves, no dynamics.
    Spectrum {
        config: PathBuf,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Parse and validate a config, printing the resolved form.
    Validate { config: PathBuf },
}

fn apply_overrides(run: &mut RunConfig, o: &Overrides) -> Result<()> {
    if let Some(b) = &o.backend {
        run.evolution.backend = Backend::from_str(b)?;
    }
    if let Some(p) = o.periods {
        run.evolution.periods = p;
    }
    if let Some(s) = o.samples_per_period {
        run.evolution.samples_per_period = s;
    }
    if let Some(seed) = o.seed {
        run.initial_state.seed = Some(seed);
    }
    Ok(())
}

fn print_warnings(warnings: &[String]) {
    for w in warnings {
        eprintln!("warning: {w}");
    }
}

fn cmd_run(config: &PathBuf, overrides: &Overrides) -> Result<()> {
    let mut run = match load_config(config)? {
        LoadedConfig::Run(r) => *r,
        LoadedConfig::Sweep(_) => {
            return Err(Error::Config(
                "config declares sweep axes; use the `sweep` subcommand".into(),
            ))
        }
    };
    apply_overrides(&mut run, overrides)?;
    let executed = execute_run(&run, overrides.out.as_deref())?;
    print_warnings(&executed.products.report.warnings);
    let report = &executed.products.report;
    match &report.detection {
        Some(d) => println!(
            "{}: f_dtc = {:.6} omega (bin width {:.6}), peak/median = {:.2}",
            report.detection_status, d.f_dtc, report.bin_width, d.threshold_ratio
        ),
        None => println!("{}", report.detection_status),
    }
    for path in &executed.written {
        println!("wrote {}", path.display());
    }
    Ok(())
}

fn cmd_sweep(config: &PathBuf, overrides: &Overrides) -> Result<()> {
    let mut sweep = match load_config(config)? {
        LoadedConfig::Sweep(s) => *s,
        LoadedConfig::Run(_) => {
            return Err(Error::Config(
                "config has no sweep axes; use the `run` subcommand".into(),
            ))
        }
    };
    apply_overrides(&mut sweep.base, overrides)?;
    let rows = execute_sweep(&sweep, overrides.out.as_deref())?;
    let dir = sweep.base.output_directory(overrides.out.as_deref());
    println!(
        "swept {} points; summary at {}",
        rows.len(),
        dir.join("summary.csv").display()
    );
    Ok(())
}

/// Analytic artifacts: the configured single-SMM spectrum at the run's
/// field, and the f_DTC(B) curve over B/omega in (0, 1.5].
fn cmd_spectrum(config: &PathBuf, overrides: &Overrides) -> Result<()> {
    let mut run = match load_config(config)? {
        LoadedConfig::Run(r) => *r,
        LoadedConfig::Sweep(s) => s.base,
    };
    apply_overrides(&mut run, overrides)?;
    let resolved = run.resolve()?;
    print_warnings(&resolved.warnings);
    let p = &resolved.params;
    let config_json = serde_json::to_string(&resolved)?;
    let dir = run.output_directory(overrides.out.as_deref());

    let spec = single_smm_spectrum(p.spin, p.d_axial, p.b_drive)?;
    let mut levels = format!(
        "# schema_version = {}\n# config = {}\nlevel_index,energy\n",
        output::SCHEMA_VERSION,
        config_json
    );
    for (i, e) in spec.levels.iter().enumerate() {
        levels.push_str(&format!("{i},{e}\n"));
    }
    let levels_path = dir.join("levels.csv");
    output::atomic_write(&levels_path, levels.as_bytes())?;

    let mut curve = format!(
        "# schema_version = {}\n# config = {}\n\
         b_over_omega,f_dtc_analytic_over_omega,f_dtc_gap_over_omega,chi_dtc\n",
        output::SCHEMA_VERSION,
        config_json
    );
    for k in 1..=150 {
        let b = 0.01 * k as f64 * p.omega;
        let f_analytic = f_dtc_analytic(b, p.d_axial) / p.omega;
        let f_gap = f_dtc_gap(p.spin, p.d_axial, b)? / p.omega;
        let chi = dtc_susceptibility(p.d_axial, b);
        curve.push_str(&format!("{},{f_analytic},{f_gap},{chi}\n", 0.01 * k as f64));
    }
    let curve_path = dir.join("f_dtc_curve.csv");
    output::atomic_write(&curve_path, curve.as_bytes())?;

    println!(
        "single-SMM gap at B = {:.6}: {:.12} (f_dtc/omega = {:.12})",
        p.b_drive,
        spec.gap,
        spec.gap / p.omega
    );
    println!("wrote {}", levels_path.display());
    println!("wrote {}", curve_path.display());
    Ok(())
}

fn cmd_validate(config: &PathBuf) -> Result<()> {
    match load_config(config)? {
        LoadedConfig::Run(run) => {
            let resolved = run.resolve()?;
            print_warnings(&resolved.warnings);
            println!("config valid: single run");
            println!("{}", serde_json::to_string_pretty(&resolved)?);
        }
        LoadedConfig::Sweep(sweep) => {
            let runs = smm_dtc::config::expand_sweep(&sweep)?;
            let mut warned = Vec::new();
            for r in &runs {
                let resolved = r.resolve()?;
                for w in resolved.warnings {
                    if !warned.contains(&w) {
                        warned.push(w);
                    }
                }
            }
            print_warnings(&warned);
            println!("config valid: sweep with {} points", runs.len());
        }
    }
    Ok(())
}

fn dispatch(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Run { config, overrides } => cmd_run(config, overrides),
        Command::Sweep { config, overrides } => cmd_sweep(config, overrides),
        Command::Spectrum { config, overrides } => cmd_spectrum(config, overrides),
        Command::Validate { config } => cmd_validate(config),
    }
}

fn main() -> ExitCode {
    // Die silently on a closed pipe (`smm-dtc run ... | head`) instead of
    // panicking; Rust ignores SIGPIPE by default.
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    let cli = Cli::parse();
    match dispatch(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
