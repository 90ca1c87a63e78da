use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use collarbound_cli::{run_scenario, run_single, Action, CompareSpec, RunResults, Step};

#[derive(Parser)]
#[command(name = "collarbound", version, about = "Comparison-geometry validators for spaces with boundary")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Space configuration file.
    #[arg(long)]
    space: PathBuf,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Directory for results, summary, timings and plot data.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Volume of the space, a collar B(∂X, r) or a sublevel set.
    Volume {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value = "whole", value_parser = ["whole", "collar", "sublevel"])]
        region: String,
        #[arg(long)]
        depth: Option<f64>,
        #[arg(long)]
        samples: Option<usize>,
        /// Sample even when a closed form exists.
        #[arg(long)]
        monte_carlo: bool,
    },
    /// Level-set areas A(t) on a grid of levels.
    Profile {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_delimiter = ',', required = true)]
        levels: Vec<f64>,
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long)]
        coarea: bool,
    },
    /// Greedy ε-packings and the rough-volume trend ε^n β(ε).
    Pack {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_delimiter = ',', required = true)]
        eps: Vec<f64>,
    },
    /// Gradient curves from sampled boundary points to a target level.
    Flow {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        target: f64,
        #[arg(long, default_value_t = 16)]
        count: usize,
        #[arg(long, value_parser = ["kappa0", "kappa1", "sharafutdinov"])]
        profile: Option<String>,
        #[arg(long)]
        step: Option<f64>,
    },
    /// Base-angle estimates on the boundary or on a level set.
    BaseAngle {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        level: Option<f64>,
        #[arg(long, default_value_t = 16)]
        count: usize,
        #[arg(long, value_delimiter = ',')]
        radii: Option<Vec<f64>>,
        #[arg(long)]
        directions: Option<usize>,
    },
    /// Run comparison claims; exits nonzero if a non-control claim fails.
    Compare {
        #[command(flatten)]
        common: Common,
        /// Claim names, comma separated, or `all`.
        #[arg(long, value_delimiter = ',')]
        claims: Option<Vec<String>>,
        #[arg(long, value_delimiter = ',')]
        r: Option<Vec<f64>>,
        #[arg(long = "flow-t")]
        flow_t: Option<f64>,
        #[arg(long, value_delimiter = ',')]
        levels: Option<Vec<f64>>,
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long)]
        pairs: Option<usize>,
        #[arg(long)]
        points: Option<usize>,
        #[arg(long)]
        monte_carlo: bool,
    },
    /// Run a scenario file.
    Run {
        scenario: PathBuf,
        /// Overrides the scenario's output directory.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn single(name: &str, common: Common, action: Action) -> anyhow::Result<i32> {
    let step = Step { name: name.to_string(), action };
    let results = run_single(&common.space, step, common.seed)?;
    report(&results, common.out)
}

fn report(results: &RunResults, out: Option<PathBuf>) -> anyhow::Result<i32> {
    print!("{}", results.render_results());
    eprint!("{}", results.render_summary());
    if let Some(dir) = out {
        results.write_all(&dir)?;
    }
    Ok(results.exit_code())
}

fn run(cli: Cli) -> anyhow::Result<i32> {
    match cli.command {
        Command::Volume { common, region, depth, samples, monte_carlo } => {
            single("volume", common, Action::Volume { region, depth, samples, monte_carlo })
        }
        Command::Profile { common, levels, samples, coarea } => {
            single("profile", common, Action::Profile { levels, samples, coarea })
        }
        Command::Pack { common, eps } => single("pack", common, Action::Pack { eps }),
        Command::Flow { common, target, count, profile, step } => {
            single("flow", common, Action::Flow { target, count, profile, step })
        }
        Command::BaseAngle { common, level, count, radii, directions } => {
            single("base-angle", common, Action::BaseAngle { level, count, radii, directions })
        }
        Command::Compare { common, claims, r, flow_t, levels, samples, pairs, points, monte_carlo } => {
            let spec = CompareSpec { claims, r, flow_t, levels, samples, pairs, points, monte_carlo };
            single("compare", common, Action::Compare(spec))
        }
        Command::Run { scenario, out } => {
            let outcome = run_scenario(&scenario, out.as_deref())?;
            eprint!("{}", outcome.results.render_summary());
            eprintln!("wrote {} files to {}", outcome.files.len(), outcome.out_dir.display());
            Ok(outcome.exit_code())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
