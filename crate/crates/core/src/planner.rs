//! Risk-bounded local planner: samples feasible constant-curvature commands,
//! rasterizes the swept footprint into a path trace, evaluates the risk on a
//! field snapshot and picks the feasible command ending closest to the goal.

use std::collections::HashSet;

use rand::Rng;

use crate::baseline::BayesGrid;
use crate::error::BaselineError;
use crate::field::GridGeometry;
use crate::geom::Vec2;
use crate::risk::{expected_mass_risk, IntensityView, PathGroup, PathTrace, RiskReport};
use crate::scalar::{cast, Real};
use crate::sim::{step, Command, RobotState};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PlannerMode {
    /// Expected and upper momentum risk on the intensity field.
    LambdaRisk,
    /// Reachability threshold on the Bayesian grid.
    Reachability,
}

#[derive(Clone, Copy, Debug)]
pub struct PlannerConfig<T> {
    /// Commands sampled per planning cycle, including the stop command.
    pub samples: usize,
    /// How long the chosen command is applied, seconds.
    pub command_duration: T,
    /// How far ahead the risk is evaluated, seconds. At least the command
    /// duration; the excess vetoes dead ends.
    pub horizon: T,
    pub max_expected_risk: T,
    pub max_upper_risk: T,
    /// Reachability slack: a path is feasible when `R >= 1 - epsilon`.
    pub epsilon: T,
    pub goal: Vec2<T>,
    pub mode: PlannerMode,
    /// Curvature sampling bound, 1/m.
    pub kappa_max: T,
    /// Obstacle mass above which a collision stops the robot, kg.
    pub mass_threshold: T,
}

/// Samples candidate commands: target speeds uniform between zero and the
/// highest speed reachable within the command duration, curvatures uniform
/// in the bound. The full-stop command is always included, so the set is
/// never empty. Deterministic for a given generator state.
pub fn sample_commands<T: Real, R: Rng>(
    robot: &RobotState<T>,
    config: &PlannerConfig<T>,
    rng: &mut R,
) -> Vec<Command<T>> {
    let mut commands = vec![Command::stop(config.command_duration)];
    let high = robot
        .max_speed
        .min(robot.speed + robot.max_accel * config.command_duration);
    for _ in 1..config.samples.max(1) {
        let u: T = cast(rng.gen::<f64>());
        let v: T = cast(rng.gen::<f64>());
        commands.push(Command {
            target_speed: high * u,
            curvature: config.kappa_max * (v + v - T::one()),
            duration: config.command_duration,
        });
    }
    commands
}

/// Rasterizes the footprint swept by a command held over the horizon.
///
/// The arc is integrated at steps no longer than half a cell; at each sampled
/// pose the robot front of width `W` is rasterized, and cells not seen before
/// (and not behind the start pose) form the group at that abscissa. Returns
/// the trace and the pose at the end of the command itself, where the goal
/// distance is measured.
pub fn sweep_cells<T: Real>(
    robot: &RobotState<T>,
    command: &Command<T>,
    horizon: T,
    geom: &GridGeometry<T>,
) -> (PathTrace<T>, RobotState<T>) {
    let half = cast::<T>(0.5);
    let dt = half * geom.cell_size / robot.max_speed;
    let start_pos = robot.position;
    let start_dir = Vec2::from_angle(robot.heading);
    let behind = -half * geom.cell_size;

    let mut seen: HashSet<crate::geom::CellIndex> = HashSet::new();
    let mut groups: Vec<PathGroup<T>> = Vec::new();
    let mut state = *robot;
    let mut end_state = *robot;
    let mut end_recorded = false;
    let mut abscissa = T::zero();
    let mut t = T::zero();
    let mut moved = false;

    let emit = |state: &RobotState<T>, abscissa: T, seen: &mut HashSet<_>, groups: &mut Vec<PathGroup<T>>| {
        let normal = Vec2::new(-state.heading.sin(), state.heading.cos());
        let offset = normal * (state.width * half);
        let spans = geom.segment_spans_world(state.position - offset, state.position + offset);
        let mut cells = Vec::new();
        for span in spans {
            if !seen.insert(span.cell) {
                continue;
            }
            let center = geom.cell_center(span.cell);
            if (center - start_pos).dot(start_dir) < behind {
                continue;
            }
            cells.push(span.cell);
        }
        if !cells.is_empty() {
            groups.push(PathGroup {
                abscissa,
                speed: state.speed,
                heading: state.heading,
                cells,
            });
        }
    };

    // The initial front only counts once the robot actually moves.
    let mut pending_initial = true;
    while t < horizon {
        let next = step(&state, command, dt);
        let dist = (next.position - state.position).norm();
        t = t + dt;
        if !end_recorded && t >= command.duration {
            end_state = next;
            end_recorded = true;
        }
        state = next;
        if dist <= T::zero() {
            continue;
        }
        if pending_initial {
            let mut initial = state;
            initial.position = start_pos;
            initial.heading = robot.heading;
            initial.speed = robot.speed;
            emit(&initial, T::zero(), &mut seen, &mut groups);
            pending_initial = false;
        }
        moved = true;
        abscissa = abscissa + dist;
        emit(&state, abscissa, &mut seen, &mut groups);
    }
    if !end_recorded {
        end_state = state;
    }
    if !moved {
        return (PathTrace::empty(robot.width), end_state);
    }
    let trace = PathTrace::new(robot.width, groups).expect("sweep produces a valid trace");
    (trace, end_state)
}

/// Outcome of evaluating one candidate command on a snapshot.
#[derive(Clone, Debug)]
pub struct Evaluation<T> {
    pub command: Command<T>,
    pub report: RiskReport<T>,
    pub reachability: Option<T>,
    /// Distance from the pose at the end of the command to the goal.
    pub goal_distance: T,
    pub feasible: bool,
}

/// Risk-threshold evaluation on the intensity field.
pub fn evaluate_lambda<T: Real, V: IntensityView<T>>(
    command: Command<T>,
    trace: &PathTrace<T>,
    end_state: &RobotState<T>,
    view: &V,
    robot_mass: T,
    config: &PlannerConfig<T>,
) -> Evaluation<T> {
    let report = expected_mass_risk(trace, view, robot_mass, config.mass_threshold);
    let feasible = report.expected <= config.max_expected_risk
        && report.expected_upper <= config.max_upper_risk;
    Evaluation {
        command,
        report,
        reachability: None,
        goal_distance: (end_state.position - config.goal).norm(),
        feasible,
    }
}

/// Reachability-threshold evaluation on the Bayesian grid.
pub fn evaluate_reachability<T: Real>(
    command: Command<T>,
    trace: &PathTrace<T>,
    end_state: &RobotState<T>,
    grid: &BayesGrid<T>,
    config: &PlannerConfig<T>,
) -> Result<Evaluation<T>, BaselineError> {
    let cells: Vec<_> = trace.iter_cells().map(|(_, c)| c).collect();
    let reachability = grid.reachability_of(&cells)?;
    Ok(Evaluation {
        command,
        report: RiskReport::zero(),
        reachability: Some(reachability),
        goal_distance: (end_state.position - config.goal).norm(),
        feasible: reachability >= T::one() - config.epsilon,
    })
}

/// Picks the feasible candidate ending closest to the goal; ties break
/// toward lower expected risk, then lower speed. `None` means stop.
pub fn select<'a, T: Real>(evaluations: &'a [Evaluation<T>]) -> Option<&'a Evaluation<T>> {
    evaluations
        .iter()
        .filter(|e| e.feasible)
        .min_by(|a, b| {
            let key = |e: &Evaluation<T>| (e.goal_distance, e.report.expected, e.command.target_speed);
            let (ka, kb) = (key(a), key(b));
            ka.0
                .partial_cmp(&kb.0)
                .unwrap_or(std::cmp::Ordering::Equal)
                .then(ka.1.partial_cmp(&kb.1).unwrap_or(std::cmp::Ordering::Equal))
                .then(ka.2.partial_cmp(&kb.2).unwrap_or(std::cmp::Ordering::Equal))
        })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{GridConfig, LambdaGrid};
    use crate::geom::CellIndex;
    use crate::risk::{SyntheticCell, SyntheticField};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn config() -> PlannerConfig<f64> {
        PlannerConfig {
            samples: 50,
            command_duration: 3.0,
            horizon: 8.0,
            max_expected_risk: 0.0,
            max_upper_risk: 5.0,
            epsilon: 0.1,
            goal: Vec2::new(5.0, 1.0),
            mode: PlannerMode::LambdaRisk,
            kappa_max: 0.8,
            mass_threshold: 10.0,
        }
    }

    fn robot(speed: f64) -> RobotState<f64> {
        RobotState {
            position: Vec2::new(1.0, 1.0),
            heading: 0.0,
            speed,
            mass: 50.0,
            width: 0.3,
            max_speed: 0.5,
            max_accel: 0.05,
        }
    }

    fn geom() -> GridGeometry<f64> {
        *LambdaGrid::new(GridConfig::standard(40, 40), Vec2::new(2.0, 2.0)).geometry()
    }

    #[test]
    fn sampled_speeds_respect_the_limits() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let r = robot(0.5);
        let cmds = sample_commands(&r, &config(), &mut rng);
        assert_eq!(cmds.len(), 50);
        assert!(cmds.iter().all(|c| c.target_speed <= 0.5));
        assert!(cmds.iter().all(|c| c.curvature.abs() <= 0.8));
        assert!(cmds[0].is_stop());
    }

    #[test]
    fn one_sample_is_the_stop_command() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut cfg = config();
        cfg.samples = 1;
        let cmds = sample_commands(&robot(0.2), &cfg, &mut rng);
        assert_eq!(cmds, vec![Command::stop(3.0)]);
    }

    #[test]
    fn sampling_is_deterministic_per_seed() {
        let a = sample_commands(&robot(0.3), &config(), &mut ChaCha8Rng::seed_from_u64(9));
        let b = sample_commands(&robot(0.3), &config(), &mut ChaCha8Rng::seed_from_u64(9));
        assert_eq!(a, b);
    }

    #[test]
    fn zero_speed_sweep_is_empty() {
        let r = robot(0.0);
        let cmd = Command::stop(3.0);
        let (trace, _) = sweep_cells(&r, &cmd, 8.0, &geom());
        assert!(trace.is_empty());
    }

    #[test]
    fn straight_single_cell_sweep() {
        // Front of one cell width starting on a cell boundary: one new cell
        // per cell length, abscissae at multiples of the cell size.
        let mut r = robot(0.5);
        r.width = 0.1;
        r.position = Vec2::new(1.0, 1.05);
        let cmd = Command {
            target_speed: 0.5,
            curvature: 0.0,
            duration: 1.9,
        };
        // 0.5 m/s for 1.9 s = 0.95 m: cells 10..19 of the row
        let (trace, end) = sweep_cells(&r, &cmd, 1.9, &geom());
        let groups = trace.groups();
        assert_eq!(groups.len(), 10);
        for (k, g) in groups.iter().enumerate() {
            assert!((g.abscissa - 0.1 * k as f64).abs() < 1e-9);
            assert_eq!(g.cells.len(), 1);
            assert_eq!(g.cells[0], CellIndex::new(10 + k as i32, 10));
        }
        assert!((end.position.x - 1.95).abs() < 1e-9);
    }

    #[test]
    fn three_cell_front_sweep_has_no_duplicates() {
        let mut r = robot(0.5);
        r.width = 0.3;
        r.position = Vec2::new(1.0, 1.15);
        let cmd = Command {
            target_speed: 0.5,
            curvature: 0.0,
            duration: 1.9,
        };
        let (trace, _) = sweep_cells(&r, &cmd, 1.9, &geom());
        let groups = trace.groups();
        assert_eq!(groups.len(), 10);
        for g in groups {
            assert_eq!(g.cells.len(), 3, "group at {}: {:?}", g.abscissa, g.cells);
        }
        let mut all: Vec<_> = trace.iter_cells().map(|(_, c)| c).collect();
        let before = all.len();
        all.sort();
        all.dedup();
        assert_eq!(all.len(), before);
    }

    #[test]
    fn horizon_reaches_past_the_command() {
        // A wall two meters ahead: the 3 s command never gets there, the 8 s
        // horizon does, so the command is rejected under a zero threshold.
        let mut view = SyntheticField::new(0.01);
        for y in 0..40 {
            let mut cell = SyntheticCell::exact(500.0);
            cell.normal = Some(std::f64::consts::PI);
            view.set(CellIndex::new(30, y), cell);
        }
        let r = robot(0.5);
        let cmd = Command {
            target_speed: 0.5,
            curvature: 0.0,
            duration: 3.0,
        };
        let (trace, end) = sweep_cells(&r, &cmd, 8.0, &geom());
        let eval = evaluate_lambda(cmd, &trace, &end, &view, 50.0, &config());
        assert!(eval.report.expected > 0.0);
        assert!(!eval.feasible);

        // the same command evaluated only to its own duration looks safe
        let (short, end) = sweep_cells(&r, &cmd, 3.0, &geom());
        let eval_short = evaluate_lambda(cmd, &short, &end, &view, 50.0, &config());
        assert_eq!(eval_short.report.expected, 0.0);
    }

    #[test]
    fn selection_prefers_distance_then_risk() {
        let view = SyntheticField::<f64>::new(0.01);
        let geom = geom();
        let r = robot(0.3);
        let cfg = config();
        let mk = |target: f64| {
            let cmd = Command {
                target_speed: target,
                curvature: 0.0,
                duration: 3.0,
            };
            let (trace, end) = sweep_cells(&r, &cmd, 8.0, &geom);
            evaluate_lambda(cmd, &trace, &end, &view, 50.0, &cfg)
        };
        let evals = vec![mk(0.1), mk(0.35)];
        let chosen = select(&evals).unwrap();
        assert_eq!(chosen.command.target_speed, 0.35);
    }

    #[test]
    fn infeasible_everything_means_stop() {
        let mut view = SyntheticField::new(0.01);
        for x in 0..40 {
            for y in 0..40 {
                view.set(CellIndex::new(x, y), SyntheticCell::exact(800.0));
            }
        }
        let geom = geom();
        let r = robot(0.3);
        let cfg = config();
        let cmd = Command {
            target_speed: 0.4,
            curvature: 0.0,
            duration: 3.0,
        };
        let (trace, end) = sweep_cells(&r, &cmd, 8.0, &geom);
        let evals = vec![evaluate_lambda(cmd, &trace, &end, &view, 50.0, &cfg)];
        assert!(select(&evals).is_none());
    }

    #[test]
    fn shrinking_the_upper_cap_shrinks_the_feasible_set() {
        let mut view = SyntheticField::new(0.01);
        for x in 0..40 {
            for y in 0..40 {
                let mut cell = SyntheticCell::exact(0.0);
                cell.upper = 0.3;
                view.set(CellIndex::new(x, y), cell);
            }
        }
        let geom = geom();
        let r = robot(0.5);
        let mut cfg = config();
        cfg.max_expected_risk = 1.0;
        let mut feasible_at = |cap: f64| {
            cfg.max_upper_risk = cap;
            (1..=5)
                .filter(|&i| {
                    let cmd = Command {
                        target_speed: 0.1 * i as f64,
                        curvature: 0.0,
                        duration: 3.0,
                    };
                    let (trace, end) = sweep_cells(&r, &cmd, 8.0, &geom);
                    evaluate_lambda(cmd, &trace, &end, &view, 50.0, &cfg).feasible
                })
                .count()
        };
        assert!(feasible_at(0.5) <= feasible_at(2.0));
    }
}
