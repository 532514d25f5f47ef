//! Library surface of the benchmark CLI: configuration, orchestration, and
//! report emission. The binary in `main.rs` is a thin wrapper over these.

pub mod config;
pub mod orchestrate;
pub mod report;

pub use config::{load_config, ExperimentConfig, Overrides, OUT_DIR_ENV};
pub use orchestrate::{
    evaluate_method, oracle_complete, reduce_scene, run_bench, run_sweep, run_theory,
    run_theory_task, scenario_set, train_task, BenchOutput, BenchRow, Method, ScenarioResult,
    TheoryReport,
};
pub use report::{markdown_summary, read_csv, rows_to_csv, svg_success_chart, write_csv, CSV_HEADER};
