//! `lfield`: runs mapping/planning scenarios and the comparison experiments,
//! emitting plot-ready CSVs and map images.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use lambda_field::planner::PlannerMode;
use lambda_field::scenario::{
    run_convergence_experiment, run_fence_experiment, run_scenario, ConvergenceParams, RunOutcome,
};
use lambda_field::Scenario64;

#[derive(Parser)]
#[command(name = "lfield", version, about)]
struct Cli {
    #[command(subcommand)]
    command: CommandLine,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Lambda,
    Reachability,
}

#[derive(Subcommand)]
enum CommandLine {
    /// Run a scenario: map, plan and drive until the goal or a permanent
    /// stop. Exit code 0 when the goal is reached, 2 otherwise.
    Run {
        #[arg(long)]
        scenario: PathBuf,
        /// Output directory for maps and logs.
        #[arg(long, default_value = "out")]
        out: PathBuf,
        /// Override the scenario seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Override the planner mode.
        #[arg(long, value_enum)]
        mode: Option<ModeArg>,
    },
    /// Emit the single-cell convergence and recovery curves plus the
    /// speed-parametrized reachability demo.
    Converge {
        #[arg(long, default_value = "out")]
        out: PathBuf,
        /// Fill ratios, comma separated.
        #[arg(long, default_value = "0.4,0.6", value_delimiter = ',')]
        ratios: Vec<f64>,
        #[arg(long, default_value_t = 200)]
        n_max: usize,
        /// Symmetric sensor models as P(occupied | hit), comma separated.
        #[arg(long, default_value = "0.7,0.9", value_delimiter = ',')]
        hit_probs: Vec<f64>,
    },
    /// Map a sparse obstacle from two viewpoints and emit the recall time
    /// series of both grids.
    Fence {
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
    },
}

fn load(path: &PathBuf, seed: Option<u64>, mode: Option<ModeArg>) -> Result<Scenario64, String> {
    let mut scenario = Scenario64::load(path).map_err(|e| e.to_string())?;
    if let Some(seed) = seed {
        scenario.set_seed(seed);
    }
    if let Some(mode) = mode {
        scenario.set_mode(match mode {
            ModeArg::Lambda => PlannerMode::LambdaRisk,
            ModeArg::Reachability => PlannerMode::Reachability,
        });
    }
    Ok(scenario)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result: Result<ExitCode, String> = match cli.command {
        CommandLine::Run {
            scenario,
            out,
            seed,
            mode,
        } => load(&scenario, seed, mode).and_then(|s| {
            let report = run_scenario(&s, &out).map_err(|e| e.to_string())?;
            let label = match report.outcome {
                RunOutcome::GoalReached => "goal reached",
                RunOutcome::Stopped => "permanent stop",
                RunOutcome::TimedOut => "time budget exhausted",
            };
            println!(
                "{}: {} after {:.2} s ({} replans); artifacts in {}",
                s.scenario_id,
                label,
                report.sim_time,
                report.replans,
                out.display()
            );
            Ok(ExitCode::from(report.outcome.exit_code() as u8))
        }),
        CommandLine::Converge {
            out,
            ratios,
            n_max,
            hit_probs,
        } => {
            let params = ConvergenceParams {
                ratios,
                n_max,
                hit_probs,
                ..ConvergenceParams::default()
            };
            run_convergence_experiment(&params, &out)
                .map_err(|e| e.to_string())
                .map(|()| {
                    println!("convergence curves written to {}", out.display());
                    ExitCode::SUCCESS
                })
        }
        CommandLine::Fence {
            scenario,
            out,
            seed,
        } => load(&scenario, seed, None).and_then(|s| {
            run_fence_experiment(&s, &out).map_err(|e| e.to_string())?;
            println!("fence recall series written to {}", out.display());
            Ok(ExitCode::SUCCESS)
        }),
    };
    match result {
        Ok(code) => code,
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::from(1)
        }
    }
}
