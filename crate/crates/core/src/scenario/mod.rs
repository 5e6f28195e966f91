//! Scenario loading and the experiment drivers behind the CLI.

mod config;
mod experiments;
mod runner;

use std::collections::HashMap;
use std::path::{Path, PathBuf};

pub use experiments::{
    run_convergence_experiment, run_fence_experiment, ConvergenceParams, FencePhase,
};
pub use runner::{run_scenario, RunOutcome, RunReport, TrajectoryPoint};

use crate::baseline::BayesModel;
use crate::error::ScenarioError;
use crate::field::{GridConfig, SensorTrust};
use crate::geom::Vec2;
use crate::io::fnv1a;
use crate::planner::{PlannerConfig, PlannerMode};
use crate::risk::{MassPdf, MassTable};
use crate::scalar::{cast, Real};
use crate::sim::{LidarSpec, RobotState, World};
use config::ConfigDoc;

/// Declarative world + robot + sensor + planner configuration for one run.
pub struct Scenario<T> {
    pub scenario_id: String,
    pub world: World<T>,
    pub world_path: PathBuf,
    pub robot: RobotState<T>,
    pub lidar: LidarSpec<T>,
    pub grid: GridConfig<T>,
    pub trust: SensorTrust<T>,
    pub planner: PlannerConfig<T>,
    pub bayes_model: BayesModel<T>,
    pub masses: MassTable<T>,
    /// Mass label name to table id, for labels that carry a distribution.
    pub label_ids: HashMap<String, u16>,
    pub duration: T,
    pub seed: u64,
    pub goal_tolerance: T,
    /// Phase description for the fence mapping experiment, when present.
    pub fence: Option<FencePhase<T>>,
    file_hash: u64,
}

impl<T: Real> Scenario<T> {
    pub fn load(path: &Path) -> Result<Self, ScenarioError> {
        let text = std::fs::read_to_string(path).map_err(|source| ScenarioError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Scenario::parse(&text, path.parent().unwrap_or(Path::new(".")))
    }

    pub fn parse(text: &str, base_dir: &Path) -> Result<Self, ScenarioError> {
        let doc = ConfigDoc::parse(text)?;

        let grid_sec = doc.section("grid")?;
        let grid = GridConfig::new(
            cast(grid_sec.f64("cell_size")?),
            grid_sec.usize("width")?,
            grid_sec.usize("height")?,
            cast(grid_sec.f64_or("lambda_max", 1000.0)?),
            cast(grid_sec.f64_or("z_score", 1.96)?),
            cast(grid_sec.f64("error_area")?),
        )
        .map_err(|e| ScenarioError::field("grid", e.to_string()))?;

        let world_sec = doc.section("world")?;
        let world_path = base_dir.join(world_sec.raw("file")?);
        let world = World::load(&world_path, grid.cell_size)?;

        let robot_sec = doc.section("robot")?;
        let robot = RobotState {
            position: Vec2::new(cast(robot_sec.f64("x")?), cast(robot_sec.f64("y")?)),
            heading: cast(robot_sec.f64_or("heading", 0.0)?),
            speed: cast(robot_sec.f64_or("speed", 0.0)?),
            mass: cast(robot_sec.f64_or("mass", 50.0)?),
            width: cast(robot_sec.f64("width")?),
            max_speed: cast(robot_sec.f64_or("max_speed", 0.5)?),
            max_accel: cast(robot_sec.f64_or("max_accel", 0.05)?),
        };
        if !world.contains_point(robot.position) {
            return Err(robot_sec.err("x", "robot starts outside the world"));
        }

        let lidar_sec = doc.section("lidar")?;
        let trust = SensorTrust::new(
            cast::<T>(lidar_sec.f64_or("p_hit", 0.99)?),
            cast::<T>(lidar_sec.f64_or("p_miss", 0.9999)?),
        )
        .map_err(|e| lidar_sec.err("p_hit", e.to_string()))?;
        let run_sec = doc.section("run")?;
        let seed = run_sec.u64("seed")?;
        let lidar = LidarSpec {
            beam_count: lidar_sec.usize("beams")?,
            fov: cast(lidar_sec.f64("fov")?),
            max_range: cast(lidar_sec.f64("max_range")?),
            scan_rate: cast(lidar_sec.f64_or("scan_rate", 12.5)?),
            error_area: cast(lidar_sec.f64_or("error_area", 0.01)?),
            trust,
            rng_seed: seed,
        };
        if lidar.beam_count == 0 {
            return Err(lidar_sec.err("beams", "must be at least 1"));
        }

        let plan_sec = doc.section("planner")?;
        let mode = match plan_sec.raw_or("mode", "lambda") {
            "lambda" => PlannerMode::LambdaRisk,
            "reachability" => PlannerMode::Reachability,
            other => {
                return Err(plan_sec.err("mode", format!("expected lambda|reachability, got `{other}`")))
            }
        };
        let planner: PlannerConfig<T> = PlannerConfig {
            samples: plan_sec.usize("samples").unwrap_or(300),
            command_duration: cast(plan_sec.f64_or("command_duration", 3.0)?),
            horizon: cast(plan_sec.f64_or("horizon", 8.0)?),
            max_expected_risk: cast(plan_sec.f64("max_expected_risk")?),
            max_upper_risk: cast(plan_sec.f64("max_upper_risk")?),
            epsilon: cast(plan_sec.f64_or("epsilon", 0.1)?),
            goal: Vec2::new(cast(plan_sec.f64("goal_x")?), cast(plan_sec.f64("goal_y")?)),
            mode,
            kappa_max: cast(plan_sec.f64_or("kappa_max", 0.8)?),
            mass_threshold: cast(plan_sec.f64_or("mass_threshold", 10.0)?),
        };
        if planner.horizon < planner.command_duration {
            return Err(plan_sec.err("horizon", "must be at least the command duration"));
        }
        let eps = planner.epsilon.to_f64().unwrap_or(0.0);
        if !(0.0..1.0).contains(&eps) || eps == 0.0 {
            return Err(plan_sec.err("epsilon", "must lie in (0, 1)"));
        }

        let bayes_model = {
            let p: T = match doc.optional_section("baseline") {
                Some(sec) => cast(sec.f64_or("p_occ_given_hit", 0.7)?),
                None => cast(0.7),
            };
            BayesModel::symmetric(p)
                .map_err(|e| ScenarioError::field("baseline.p_occ_given_hit", e.to_string()))?
        };

        let mut masses = MassTable::default();
        let mut label_ids = HashMap::new();
        for (label, section) in doc.sections_with_prefix("mass") {
            let delta_m = section.f64_or("delta_m", 1.0)?;
            let mut atoms = Vec::new();
            let mut alpha_inf = 0.0f64;
            for token in section.raw("atoms")?.split_whitespace() {
                let Some((k, p)) = token.split_once(':') else {
                    return Err(section.err("atoms", format!("expected k:prob, got `{token}`")));
                };
                let p: f64 = p
                    .parse()
                    .map_err(|_| section.err("atoms", format!("bad probability `{p}`")))?;
                if k == "inf" {
                    alpha_inf += p;
                } else {
                    let k: u32 = k
                        .parse()
                        .map_err(|_| section.err("atoms", format!("bad atom index `{k}`")))?;
                    atoms.push((k, cast::<T>(p)));
                }
            }
            let pdf = MassPdf::new(cast(delta_m), atoms, cast(alpha_inf))
                .map_err(|e| section.err("atoms", e.to_string()))?;
            let id = masses.insert(label.clone(), pdf);
            label_ids.insert(label, id);
        }

        let fence = match doc.optional_section("fence") {
            Some(sec) => Some(FencePhase {
                pose2: Vec2::new(cast(sec.f64("pose2_x")?), cast(sec.f64("pose2_y")?)),
                pose2_heading: cast(sec.f64_or("pose2_heading", 0.0)?),
                switch_t: cast(sec.f64("switch_t")?),
                patch_label: sec.raw_or("label", "fence").to_string(),
            }),
            None => None,
        };

        Ok(Scenario {
            scenario_id: run_sec.raw_or("scenario_id", "scenario").to_string(),
            world,
            world_path,
            robot,
            lidar,
            grid,
            trust,
            planner,
            bayes_model,
            masses,
            label_ids,
            duration: cast(run_sec.f64("duration")?),
            seed,
            goal_tolerance: cast(run_sec.f64_or("goal_tolerance", 0.4)?),
            fence,
            file_hash: fnv1a(text.as_bytes()),
        })
    }

    /// Replaces the random seed (CLI `--seed` override).
    pub fn set_seed(&mut self, seed: u64) {
        self.seed = seed;
        self.lidar.rng_seed = seed;
    }

    /// Overrides the planner mode (CLI `--mode` flag).
    pub fn set_mode(&mut self, mode: PlannerMode) {
        self.planner.mode = mode;
    }

    /// Hash of the scenario file and the effective seed, stamped into every
    /// output file.
    pub fn hash(&self) -> u64 {
        self.file_hash ^ self.seed.wrapping_mul(0x9e3779b97f4a7c15)
    }
}
