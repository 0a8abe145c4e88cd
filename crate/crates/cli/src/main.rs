use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};
use secbeam::channel::ReceiverType;
use secbeam::experiment::{
    parse_config, run_sweep, summarize, write_csv, write_csv_to, ExperimentConfig, ResultRecord, Sweep,
};
use secbeam::schemes::Scheme;
use secbeam::Error;

/// Secure hybrid beamforming experiments for near-field SWIPT.
#[derive(Debug, Parser)]
#[command(name = "secbeam", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Repeated trials at the configured operating point.
    Run(Common),
    /// Sweep the energy target (fractions of the per-trial maximum by default).
    SweepQ0 {
        #[command(flatten)]
        common: Common,
        /// Interpret the grid as absolute targets in watts.
        #[arg(long)]
        absolute: bool,
    },
    /// Sweep the visibility-region size (antennas).
    SweepVr(Common),
    /// Sweep the IR angle in the three-ER angle-study geometry.
    SweepAngle(Common),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Scale {
    /// N = 32, N_RF = 6, K = 2, M = 2, G = 2.
    Desk,
}

#[derive(Debug, Args)]
struct Common {
    /// JSON configuration file; omitted fields take their defaults.
    #[arg(long)]
    config: Option<PathBuf>,
    /// CSV destination (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Master seed.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    trials: Option<usize>,
    /// proposed, fully-digital, no-an, full-vr or ff-baseline.
    #[arg(long)]
    scheme: Option<Scheme>,
    /// type-i or type-ii.
    #[arg(long)]
    receiver_type: Option<ReceiverType>,
    #[arg(long, value_enum)]
    scale: Option<Scale>,
    /// Comma-separated sweep grid.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    grid: Option<Vec<f64>>,
    /// Energy target as a fraction of the per-trial maximum (overrides q0_watts).
    #[arg(long)]
    q0_fraction: Option<f64>,
}

impl Common {
    fn config(&self) -> anyhow::Result<ExperimentConfig> {
        let mut cfg = match &self.config {
            Some(path) => parse_config(path).with_context(|| format!("loading {}", path.display()))?,
            None => ExperimentConfig::default(),
        };
        if let Some(Scale::Desk) = self.scale {
            cfg.apply_desk_scale();
        }
        if let Some(seed) = self.seed {
            cfg.master_seed = seed;
        }
        if let Some(trials) = self.trials {
            cfg.trials = trials;
        }
        if let Some(scheme) = self.scheme {
            cfg.scheme = scheme;
        }
        if let Some(rtype) = self.receiver_type {
            cfg.receiver_type = rtype;
        }
        if self.q0_fraction.is_some() {
            cfg.q0_fraction = self.q0_fraction;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn execute(common: &Common, sweep: Sweep) -> anyhow::Result<Vec<ResultRecord>> {
    let cfg = common.config()?;
    let grid = common.grid.clone().unwrap_or_else(|| sweep.default_grid());
    eprintln!(
        "{} {} | N={} N_RF={} K={} M={} | {} point(s) x {} trial(s)",
        cfg.scheme,
        cfg.receiver_type.label(),
        cfg.n_antennas,
        cfg.n_rf,
        cfg.k(),
        cfg.m(),
        grid.len(),
        cfg.trials,
    );
    let records = run_sweep(&cfg, sweep, &grid, cfg.trials)?;
    match &common.out {
        Some(path) => write_csv(&records, path).with_context(|| format!("writing {}", path.display()))?,
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            write_csv_to(&records, &mut lock)?;
            lock.flush()?;
        }
    }
    Ok(records)
}

fn report(records: &[ResultRecord]) -> usize {
    let param = records.first().map_or("", |r| r.sweep_param.as_str());
    for p in summarize(records) {
        eprintln!(
            "  {param}={:<10} wssr {:>8.4} +- {:.4} bps/Hz  ({} ok, {} failed)",
            p.sweep_value, p.mean_wssr, p.stderr_wssr, p.succeeded, p.failed
        );
    }
    let failed: Vec<&ResultRecord> = records.iter().filter(|r| !r.is_ok()).collect();
    if let Some(first) = failed.first() {
        eprintln!("{} run(s) failed; first: {}", failed.len(), first.status);
    }
    failed.len()
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Run(c) => execute(c, Sweep::Fixed),
        Command::SweepQ0 { common, absolute } => {
            execute(common, if *absolute { Sweep::Q0Watts } else { Sweep::Q0Fraction })
        }
        Command::SweepVr(c) => execute(c, Sweep::VrSize),
        Command::SweepAngle(c) => execute(c, Sweep::IrAngle),
    };
    match outcome {
        Ok(records) if report(&records) == 0 => ExitCode::SUCCESS,
        // the CSV is written; the failures are in its status column
        Ok(_) => ExitCode::from(3),
        Err(e) => {
            eprintln!("error: {e:#}");
            match e.downcast_ref::<Error>() {
                Some(Error::Config { .. }) | Some(Error::InvalidArgument(_)) => ExitCode::from(2),
                Some(Error::Infeasible(_)) => ExitCode::from(3),
                _ => ExitCode::FAILURE,
            }
        }
    }
}
