//! Convergence studies: scenarios, error norms, rate fits and report output.

mod metrics;
mod output;
mod scenario;
mod study;

pub use metrics::{error_l2_linf, fit_rate, RateFit};
pub use output::{csv_string, summary_json, write_csv, CSV_COLUMNS};
pub use scenario::{
    dt_ladder, study_parameters, pde_scenarios, preset, sde_scenarios, Evaluation, Method,
    MonteCarloSettings, Scenario, StepRule, H_LADDER, PRESET_NAMES, SDE_POINTS,
};
pub use study::{run_studies, run_study, ConvergenceReport, Diagnostics, ReportRow};
