//! Scenarios, repeated trials, metrics, the robustness study and result
//! files.

pub mod check;
pub mod emit;
pub mod metrics;
pub mod robustness;
pub mod runner;
pub mod scenario;

pub use check::{bisect_speed, check_path, CheckReport};
pub use emit::{emit_results, read_path_csv};
pub use metrics::{compute_metrics, mean_std, sig6, Metrics};
pub use robustness::{
    map_environment, map_setting, robustness_experiment, tally, MapOutcome, MapSetting, RobustnessConfig,
    RobustnessFamily, RobustnessReport,
};
pub use runner::{child_seed, run_scenario, run_trial, run_trials, splitmix64, PathRow, RunRecord};
pub use scenario::{scenario, EnvironmentSource, ScenarioSpec};
