//! Experiment configuration, Monte-Carlo sweeps and CSV output.

mod config;
mod output;
mod stats;
mod sweep;

pub use config::{parse_config, parse_config_str, ExperimentConfig, Position, SolverSettings};
pub use output::{fmt_float, write_csv, write_csv_to, CSV_HEADER};
pub use stats::{dip_half_depth_width, dip_half_width, dip_width_below, mean_stderr, spearman, summarize, PointSummary};
pub use sweep::{
    init_seed, point_config, run_sweep, run_trial, solver_options, trial_seed, ResultRecord, Sweep, STATUS_CLAMPED,
    STATUS_OK,
};
