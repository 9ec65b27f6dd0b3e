//! Experiment configs, seeded sweeps and their CSV/JSON output.

pub mod config;
pub mod grid;
pub mod output;
pub mod run;

pub use config::{Algorithm, ExperimentConfig, SweepAxis};
pub use grid::{entangled_grid, run_grid_check, GridCheckReport};
pub use run::{
    build_instance, run_fidelity, run_instance, run_single, run_sweep, run_sweep_with, sample_demands, AggregateRow,
    Execution, Instance, ResultRow, SweepResult,
};
