//! Initial data, the aspect-ratio sweep, rate fits, plots, configuration and the CLI.

pub mod cli;
pub mod config;
pub mod fit;
pub mod initial;
pub mod plot;
pub mod sweep;

pub use config::Settings;
pub use fit::{fit_rate, RateFit};
pub use initial::{generate_initial_data, Spectrum};
pub use plot::{Chart, Series};
pub use sweep::{run_tau_sweep, ConvergenceReport, Slopes, SweepConfig, TauEntry};
