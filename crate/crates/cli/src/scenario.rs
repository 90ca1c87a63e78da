//! Scenario files: a space, a global seed and a list of steps.
//!
//! ```toml
//! name = "ball_equality"
//! space = "spaces/ball3.toml"     # relative to this file
//! seed = 7
//! output_dir = "out/ball"         # optional, relative to the working directory
//!
//! [tolerances]
//! sigma = 3.0
//!
//! [[steps]]
//! name = "claims"
//! command = "compare"
//! claims = ["all"]
//! r = [0.25, 0.5]
//! ```
//!
//! Each step draws its own seed from a hash of the global seed, the scenario
//! name and the step name, so adding or reordering steps leaves the others'
//! random streams untouched.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use collarbound::Tolerances;
use serde::Deserialize;
use sha2::{Digest, Sha256};

use crate::config::load_space;
use crate::error::{CliError, CliResult};
use crate::output::RunResults;
use crate::steps::Step;

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    pub space: PathBuf,
    pub seed: u64,
    pub output_dir: Option<PathBuf>,
    #[serde(default)]
    pub tolerances: BTreeMap<String, f64>,
    pub steps: Vec<Step>,
}

/// Prefix of environment variables overriding tolerances, e.g.
/// `COLLARBOUND_TOL_SIGMA=4`.
pub const TOL_ENV_PREFIX: &str = "COLLARBOUND_TOL_";

pub fn step_seed(global: u64, scenario: &str, step: &str) -> u64 {
    let mut h = Sha256::new();
    h.update(global.to_le_bytes());
    h.update(scenario.as_bytes());
    h.update([0u8]);
    h.update(step.as_bytes());
    let digest = h.finalize();
    let mut bytes = [0u8; 8];
    bytes.copy_from_slice(&digest[..8]);
    u64::from_le_bytes(bytes)
}

/// Applies named overrides, then any `COLLARBOUND_TOL_<NAME>` variables.
pub fn resolve_tolerances(overrides: &BTreeMap<String, f64>, origin: &Path) -> CliResult<Tolerances> {
    let mut tol = Tolerances::default();
    for (k, v) in overrides {
        if !tol.set(k, *v) {
            return Err(CliError::config(origin, format!("unknown tolerance `{k}`")));
        }
    }
    for name in Tolerances::NAMES {
        let var = format!("{TOL_ENV_PREFIX}{}", name.to_uppercase());
        if let Ok(s) = std::env::var(&var) {
            let v: f64 = s.trim().parse().map_err(|_| CliError::config(origin, format!("{var}={s} is not a number")))?;
            tol.set(name, v);
        }
    }
    Ok(tol)
}

pub fn load_scenario(path: &Path) -> CliResult<Scenario> {
    let text = fs::read_to_string(path).map_err(|e| CliError::config(path, e))?;
    let sc: Scenario = toml::from_str(&text).map_err(|e| CliError::config(path, e))?;
    let mut names = std::collections::HashSet::new();
    for s in &sc.steps {
        if !names.insert(s.name.as_str()) {
            return Err(CliError::config(path, format!("duplicate step name `{}`", s.name)));
        }
    }
    Ok(sc)
}

/// Outcome of a scenario run.
#[derive(Debug)]
pub struct RunOutcome {
    pub results: RunResults,
    pub out_dir: PathBuf,
    pub files: Vec<PathBuf>,
}

impl RunOutcome {
    pub fn exit_code(&self) -> i32 {
        self.results.exit_code()
    }
}

/// Runs every step of the scenario at `path` and writes the output files.
/// `out` overrides the scenario's output directory.
pub fn run_scenario(path: &Path, out: Option<&Path>) -> CliResult<RunOutcome> {
    let sc = load_scenario(path)?;
    let base = path.parent().unwrap_or(Path::new("."));
    let tol = resolve_tolerances(&sc.tolerances, path)?;
    let loaded = load_space(&base.join(&sc.space), &tol)?;
    let mut results = RunResults {
        scenario: sc.name.clone(),
        seed: sc.seed,
        space: loaded.space.label(),
        audit: loaded.audit_report(),
        steps: Vec::new(),
    };
    for step in &sc.steps {
        let seed = step_seed(sc.seed, &sc.name, &step.name);
        results.steps.push(step.execute(&loaded.space, seed));
    }
    let out_dir = match (out, &sc.output_dir) {
        (Some(o), _) => o.to_path_buf(),
        (None, Some(d)) => d.clone(),
        (None, None) => PathBuf::from("out").join(&sc.name),
    };
    let files = results.write_all(&out_dir)?;
    Ok(RunOutcome { results, out_dir, files })
}
