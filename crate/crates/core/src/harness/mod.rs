//! Seeded batch experiments: instance generation, parallel runs, metrics and output files.

mod config;
mod emit;
mod runner;

pub use config::{
    Algorithm, Budget, ExperimentConfig, GameSource, ModelConfig, Smoothness, SPITFIRE_MODEL_NOISE,
};
pub use emit::{
    emit, read_eps_plot_csv, read_runs_csv, write_eps_plot_csv, write_eps_runs_csv, write_runs_csv,
    write_summary_json, OutputPaths,
};
pub use runner::{
    budget_for, build_instances, eps_runs, eps_series, eps_table, eps_theoretical, run_experiment,
    run_seed, solve_instance, EpsPoint, EpsRunRecord, ExperimentOutput, Instance, InstanceInfo,
    RunRecord, Summary,
};
