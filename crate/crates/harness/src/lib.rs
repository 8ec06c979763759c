//! Seeded Monte Carlo experiments over the mapsolve solvers: paired algorithm
//! comparisons, parameter sweeps and CSV reports.

pub mod config;
pub mod error;
pub mod experiment;
pub mod report;

pub use config::{Algorithm, ExperimentConfig, InstanceSource};
pub use error::{HarnessError, Result};
pub use experiment::{
    monte_carlo, rounds_vs_area, run_trial, run_trials, summarize, sweep, sweep_theta,
    trial_instance, trial_seed, AlgRun, MonteCarlo, RoundsPoint, SummaryRow, Sweep, SweepParam,
    ThetaPoint, ThetaSweep, TrialRecord, TrialStatus,
};
