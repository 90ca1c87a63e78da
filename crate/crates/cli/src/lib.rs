//! Configuration loading, scenario orchestration and output files for the
//! `collarbound` command-line tool.

pub mod config;
pub mod error;
pub mod output;
pub mod scenario;
pub mod steps;

pub use config::{load_space, LoadedSpace, SpaceConfig};
pub use error::{CliError, CliResult};
pub use output::{emit_plot_data, PlotKind, Row, RunResults, Series, StepRecord};
pub use scenario::{run_scenario, step_seed, RunOutcome, Scenario};
pub use steps::{Action, CompareSpec, Step};

/// Runs a single step against a space file, outside any scenario. The step
/// seed is derived as if the step belonged to a scenario named after it.
pub fn run_single(space_path: &std::path::Path, step: Step, seed: u64) -> CliResult<RunResults> {
    let tol = scenario::resolve_tolerances(&Default::default(), space_path)?;
    let loaded = load_space(space_path, &tol)?;
    let step_seed = step_seed(seed, &step.name, &step.name);
    let rec = step.execute(&loaded.space, step_seed);
    Ok(RunResults {
        scenario: step.name.clone(),
        seed,
        space: loaded.space.label(),
        audit: loaded.audit_report(),
        steps: vec![rec],
    })
}
