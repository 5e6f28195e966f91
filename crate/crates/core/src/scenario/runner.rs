//! The mapping-and-planning loop behind the `run` subcommand.

use std::fs;
use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::Scenario;
use crate::baseline::BayesGrid;
use crate::error::ScenarioError;
use crate::field::{estimate_scan_normals, LambdaGrid};
use crate::geom::Vec2;
use crate::io;
use crate::planner::{
    evaluate_lambda, evaluate_reachability, sample_commands, select, sweep_cells, PlannerMode,
};
use crate::risk::FieldSnapshot;
use crate::scalar::{cast, Real};
use crate::sim::{scan, step, Command};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RunOutcome {
    GoalReached,
    /// The planner found no feasible command over several consecutive cycles
    /// with the robot at rest.
    Stopped,
    /// The time budget ran out before the goal.
    TimedOut,
}

impl RunOutcome {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunOutcome::GoalReached => 0,
            RunOutcome::Stopped | RunOutcome::TimedOut => 2,
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct TrajectoryPoint<T> {
    pub t: T,
    pub position: Vec2<T>,
    pub heading: T,
    pub speed: T,
    /// Point intensity estimate of the cell under the robot, as mapped at
    /// this instant.
    pub lambda_at_pose: T,
}

#[derive(Debug)]
pub struct RunReport<T> {
    pub outcome: RunOutcome,
    pub sim_time: T,
    pub trajectory: Vec<TrajectoryPoint<T>>,
    pub replans: usize,
}

fn write_file(out_dir: &Path, name: &str, bytes: &[u8]) -> Result<(), ScenarioError> {
    let path = out_dir.join(name);
    fs::write(&path, bytes).map_err(|source| ScenarioError::Io {
        path: path.display().to_string(),
        source,
    })
}

/// Runs the scenario to completion, writing the map exports, the planner log
/// and the risk trace into `out_dir`.
pub fn run_scenario<T: Real>(
    scenario: &Scenario<T>,
    out_dir: &Path,
) -> Result<RunReport<T>, ScenarioError> {
    fs::create_dir_all(out_dir).map_err(|source| ScenarioError::Io {
        path: out_dir.display().to_string(),
        source,
    })?;
    let hash_comment = format!("scenario_hash=0x{:016x}", scenario.hash());

    let config = scenario.planner;
    let mut robot = scenario.robot;
    let mut lambda = LambdaGrid::new(scenario.grid, robot.position);
    let mut bayes = BayesGrid::new(scenario.grid, scenario.bayes_model, robot.position);
    let mut planner_rng = ChaCha8Rng::seed_from_u64(scenario.seed);
    planner_rng.set_stream(u64::MAX);

    let dt = T::one() / scenario.lidar.scan_rate;
    let normal_gap = scenario.grid.cell_size * cast(3.0);
    let mut t = T::zero();
    let mut scan_index: u64 = 0;
    let mut current = Command::stop(config.command_duration);
    let mut next_replan = T::zero();
    let mut stop_streak = 0usize;
    let mut replans = 0usize;

    let mut planner_log = String::from("t,speed,curvature,expected,lower,upper,feasible_count\n");
    let mut risk_trace = String::from("scenario_id,t,expected,lower,upper,p_coll\n");
    let mut trajectory_csv = String::from("t,x,y,heading,speed,lambda_at_pose\n");
    let mut trajectory = Vec::new();

    let record = |t: T,
                      robot: &crate::sim::RobotState<T>,
                      lambda: &LambdaGrid<T>,
                      trajectory: &mut Vec<TrajectoryPoint<T>>,
                      csv: &mut String| {
        let cell = lambda.geometry().cell_at(robot.position);
        let point = TrajectoryPoint {
            t,
            position: robot.position,
            heading: robot.heading,
            speed: robot.speed,
            lambda_at_pose: lambda.lambda_at(cell),
        };
        csv.push_str(&format!(
            "{},{},{},{},{},{}\n",
            point.t, point.position.x, point.position.y, point.heading, point.speed,
            point.lambda_at_pose
        ));
        trajectory.push(point);
    };

    record(t, &robot, &lambda, &mut trajectory, &mut trajectory_csv);

    let outcome = loop {
        if t >= scenario.duration {
            break RunOutcome::TimedOut;
        }

        // sense and map
        let beams = scan(&scenario.world, &robot, &scenario.lidar, scan_index);
        scan_index += 1;
        let mut hit_points = Vec::with_capacity(beams.len());
        for beam in &beams {
            lambda
                .integrate_beam(beam)
                .expect("scan beams are non-degenerate");
            bayes
                .integrate_beam(beam)
                .expect("scan beams are non-degenerate");
            if beam.hit {
                hit_points.push(Some(beam.endpoint));
                // camera stand-in: the scenario's label table tells the robot
                // what kind of obstacle it just ranged
                if let Some(name) = scenario
                    .world
                    .label_name(scenario.world.cell_at(beam.endpoint))
                {
                    if let Some(&id) = scenario.label_ids.get(name) {
                        lambda.set_mass_label(lambda.geometry().cell_at(beam.endpoint), id);
                    }
                }
            } else {
                hit_points.push(None);
            }
        }
        for (point, angle) in estimate_scan_normals(robot.position, &hit_points, normal_gap) {
            let cell = lambda.geometry().cell_at(point);
            if let Some(state) = lambda.cell_mut(cell) {
                state.add_normal(angle);
            }
        }

        // replan on a fixed cadence
        if t >= next_replan {
            let commands = sample_commands(&robot, &config, &mut planner_rng);
            let view = FieldSnapshot {
                grid: &lambda,
                trust: scenario.trust,
                masses: &scenario.masses,
            };
            let evaluations: Vec<_> = commands
                .into_iter()
                .map(|cmd| {
                    let (trace, end) = sweep_cells(&robot, &cmd, config.horizon, lambda.geometry());
                    match config.mode {
                        PlannerMode::LambdaRisk => {
                            evaluate_lambda(cmd, &trace, &end, &view, robot.mass, &config)
                        }
                        PlannerMode::Reachability => {
                            evaluate_reachability(cmd, &trace, &end, &bayes, &config)
                                .expect("grid occupancies are probabilities")
                        }
                    }
                })
                .collect();
            let feasible_count = evaluations.iter().filter(|e| e.feasible).count();
            let logged = match select(&evaluations) {
                Some(chosen) => {
                    current = chosen.command;
                    stop_streak = 0;
                    chosen
                }
                None => {
                    current = Command::stop(config.command_duration);
                    stop_streak += 1;
                    // log the stop candidate, which is always evaluated first
                    &evaluations[0]
                }
            };
            planner_log.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                t,
                current.target_speed,
                current.curvature,
                logged.report.expected,
                logged.report.expected_lower,
                logged.report.expected_upper,
                feasible_count
            ));
            risk_trace.push_str(&logged.report.csv_row(&scenario.scenario_id, t));
            risk_trace.push('\n');
            next_replan = next_replan + config.command_duration;
            replans += 1;
            if stop_streak >= 4 && robot.speed <= cast(1e-9) {
                break RunOutcome::Stopped;
            }
        }

        // act
        let before = robot.position;
        robot = step(&robot, &current, dt);
        let displacement = robot.position - before;
        lambda.recenter(displacement);
        bayes.recenter(displacement);
        t = t + dt;
        record(t, &robot, &lambda, &mut trajectory, &mut trajectory_csv);
        if (robot.position - config.goal).norm() <= scenario.goal_tolerance {
            break RunOutcome::GoalReached;
        }
    };

    let mut lambda_pgm = Vec::new();
    io::write_lambda_pgm(&lambda, &mut lambda_pgm).expect("in-memory write");
    write_file(out_dir, "lambda_grid.pgm", &lambda_pgm)?;
    let mut lambda_csv = Vec::new();
    io::write_lambda_csv(&lambda, &scenario.trust, &mut lambda_csv, Some(&hash_comment))
        .expect("in-memory write");
    write_file(out_dir, "lambda_grid.csv", &lambda_csv)?;
    let mut bayes_pgm = Vec::new();
    io::write_bayes_pgm(&bayes, &mut bayes_pgm).expect("in-memory write");
    write_file(out_dir, "bayes_grid.pgm", &bayes_pgm)?;
    let mut bayes_csv = Vec::new();
    io::write_bayes_csv(&bayes, &mut bayes_csv, Some(&hash_comment)).expect("in-memory write");
    write_file(out_dir, "bayes_grid.csv", &bayes_csv)?;
    write_file(
        out_dir,
        "planner_log.csv",
        format!("# {hash_comment}\n{planner_log}").as_bytes(),
    )?;
    write_file(
        out_dir,
        "risk_trace.csv",
        format!("# {hash_comment}\n{risk_trace}").as_bytes(),
    )?;
    write_file(
        out_dir,
        "trajectory.csv",
        format!("# {hash_comment}\n{trajectory_csv}").as_bytes(),
    )?;

    Ok(RunReport {
        outcome,
        sim_time: t,
        trajectory,
        replans,
    })
}
