//! Data-emitting comparison experiments: single-cell convergence and
//! recovery curves, the speed-parametrized reachability demonstration, and
//! the fence mapping-error time series.

use std::collections::BTreeSet;
use std::fs;
use std::path::Path;

use super::Scenario;
use crate::baseline::{
    occupancy_from_log_odds, recall_bayes, recall_lambda, BayesGrid, BayesModel,
};
use crate::error::ScenarioError;
use crate::field::{estimate_scan_normals, LambdaGrid};
use crate::geom::{CellIndex, Vec2};
use crate::io::fnv1a;
use crate::scalar::{cast, Real};
use crate::sim::scan;

fn write_file(out_dir: &Path, name: &str, contents: &str) -> Result<(), ScenarioError> {
    let path = out_dir.join(name);
    fs::write(&path, contents).map_err(|source| ScenarioError::Io {
        path: path.display().to_string(),
        source,
    })
}

/// Parameters of the convergence/recovery experiment. Everything is computed
/// from the closed forms with fractional counters, so no clamping or
/// simulation noise enters the curves.
#[derive(Clone, Debug)]
pub struct ConvergenceParams {
    /// Cell fill ratios to sweep.
    pub ratios: Vec<f64>,
    /// Measurement counts 1..=n_max.
    pub n_max: usize,
    /// Symmetric sensor models, as occupancy probability given a hit.
    pub hit_probs: Vec<f64>,
    /// Miss prefix of the recovery curves.
    pub recovery_misses: usize,
    /// Hit measurements 0..=recovery_hits in the recovery curves.
    pub recovery_hits: usize,
    /// Cell-area to error-area ratios for the intensity-side recovery.
    pub area_ratios: Vec<f64>,
}

impl Default for ConvergenceParams {
    fn default() -> Self {
        ConvergenceParams {
            ratios: vec![0.4, 0.6],
            n_max: 200,
            hit_probs: vec![0.7, 0.9],
            recovery_misses: 50,
            recovery_hits: 100,
            area_ratios: vec![1.0, 0.5],
        }
    }
}

/// Bayesian occupancy of a cell filled at ratio `r` after `n` measurements
/// under a symmetric model; counters are fractional.
fn bayes_occupancy(r: f64, n: f64, model: &BayesModel<f64>) -> f64 {
    occupancy_from_log_odds(n * (r * model.l_occ + (1.0 - r) * model.l_free))
}

/// Collision probability of one cell filled at ratio `r` under the intensity
/// estimate, for a cell-area to error-area ratio. Independent of the
/// measurement count.
fn lambda_occupancy(r: f64, area_ratio: f64) -> f64 {
    if r >= 1.0 {
        return 1.0;
    }
    1.0 - (1.0 + r / (1.0 - r)).powf(-area_ratio)
}

/// Emits `convergence.csv`, `recovery.csv` and `rt_demo.csv`.
///
/// Convergence: per measurement count, the Bayesian occupancy drifts to an
/// extremum while the intensity-side collision probability stays at the fill
/// ratio. Recovery: occupancy growth after a long run of misses. The
/// reachability demo contrasts the time-parametrized product integral, which
/// rewards speed, with the distance-parametrized one, which does not.
pub fn run_convergence_experiment(
    params: &ConvergenceParams,
    out_dir: &Path,
) -> Result<(), ScenarioError> {
    fs::create_dir_all(out_dir).map_err(|source| ScenarioError::Io {
        path: out_dir.display().to_string(),
        source,
    })?;
    let hash = fnv1a(format!("{params:?}").as_bytes());
    let comment = format!("# scenario_hash=0x{hash:016x}\n");
    let models: Vec<(f64, BayesModel<f64>)> = params
        .hit_probs
        .iter()
        .map(|&p| {
            BayesModel::symmetric(p)
                .map(|m| (p, m))
                .map_err(|e| ScenarioError::field("hit_probs", e.to_string()))
        })
        .collect::<Result<_, _>>()?;

    let mut convergence = comment.clone();
    convergence.push('N');
    for &r in &params.ratios {
        for (p, _) in &models {
            convergence.push_str(&format!(",bayes_r{r}_p{p}"));
        }
        convergence.push_str(&format!(",lambda_r{r}"));
    }
    convergence.push('\n');
    for n in 1..=params.n_max {
        convergence.push_str(&n.to_string());
        for &r in &params.ratios {
            for (_, model) in &models {
                convergence.push_str(&format!(",{}", bayes_occupancy(r, n as f64, model)));
            }
            convergence.push_str(&format!(",{}", lambda_occupancy(r, 1.0)));
        }
        convergence.push('\n');
    }
    write_file(out_dir, "convergence.csv", &convergence)?;

    let mut recovery = comment.clone();
    recovery.push('h');
    for (p, _) in &models {
        recovery.push_str(&format!(",bayes_p{p}"));
    }
    for &ratio in &params.area_ratios {
        recovery.push_str(&format!(",lambda_e{ratio}"));
    }
    recovery.push('\n');
    let m = params.recovery_misses as f64;
    for h in 0..=params.recovery_hits {
        let h = h as f64;
        recovery.push_str(&format!("{h}"));
        for (_, model) in &models {
            let occ = occupancy_from_log_odds(m * model.l_free + h * model.l_occ);
            recovery.push_str(&format!(",{occ}"));
        }
        for &ratio in &params.area_ratios {
            let occ = 1.0 - (1.0 + h / m).powf(-ratio);
            recovery.push_str(&format!(",{occ}"));
        }
        recovery.push('\n');
    }
    write_file(out_dir, "recovery.csv", &recovery)?;

    // Straight run of 5 m through occupancy 0.1: the time-parametrized
    // reachability grows with speed, the distance-parametrized one is flat.
    let mut rt = comment;
    rt.push_str("speed,r_t,r_l\n");
    let (distance, p_occ) = (5.0f64, 0.1f64);
    for i in 1..=10 {
        let v = 0.1 * i as f64;
        let r_t = (1.0 - p_occ).powf(distance / v);
        let r_l = (1.0 - p_occ).powf(distance);
        rt.push_str(&format!("{v},{r_t},{r_l}\n"));
    }
    write_file(out_dir, "rt_demo.csv", &rt)?;
    Ok(())
}

/// Two-phase pose schedule of the fence experiment.
#[derive(Clone, Debug)]
pub struct FencePhase<T> {
    pub pose2: Vec2<T>,
    pub pose2_heading: T,
    pub switch_t: T,
    pub patch_label: String,
}

/// Maps a fence-like obstacle from two viewpoints and emits the recall time
/// series of both grids over ground-truth 4x4 patches
/// (`fence_recall.csv`: t, lambda mean/sd, bayes mean/sd).
pub fn run_fence_experiment<T: Real>(
    scenario: &Scenario<T>,
    out_dir: &Path,
) -> Result<(), ScenarioError> {
    let phases = scenario
        .fence
        .as_ref()
        .ok_or_else(|| ScenarioError::field("fence", "scenario has no [fence] section"))?;
    fs::create_dir_all(out_dir).map_err(|source| ScenarioError::Io {
        path: out_dir.display().to_string(),
        source,
    })?;

    // 4x4 patch tiles over the labeled ground-truth cells
    let labeled = scenario.world.cells_with_label(&phases.patch_label);
    if labeled.is_empty() {
        return Err(ScenarioError::field(
            "fence.label",
            format!("no world cells carry label `{}`", phases.patch_label),
        ));
    }
    let tiles: BTreeSet<(i32, i32)> = labeled
        .iter()
        .map(|c| (c.x.div_euclid(4), c.y.div_euclid(4)))
        .collect();
    let world_patches: Vec<Vec<CellIndex>> = tiles
        .iter()
        .map(|&(tx, ty)| {
            (0..4)
                .flat_map(|dy| (0..4).map(move |dx| CellIndex::new(tx * 4 + dx, ty * 4 + dy)))
                .collect()
        })
        .collect();

    let mut robot = scenario.robot;
    let mut lambda = LambdaGrid::new(scenario.grid, robot.position);
    let mut bayes = BayesGrid::new(scenario.grid, scenario.bayes_model, robot.position);
    let normal_gap = scenario.grid.cell_size * cast(3.0);

    let grid_patches = |lambda: &LambdaGrid<T>| -> Vec<Vec<CellIndex>> {
        world_patches
            .iter()
            .map(|patch| {
                patch
                    .iter()
                    .map(|&c| lambda.geometry().cell_at(scenario.world.cell_center(c)))
                    .collect()
            })
            .collect()
    };

    let mut rows = format!(
        "# scenario_hash=0x{:016x}\nt,recall_lambda,sd_lambda,recall_bayes,sd_bayes\n",
        scenario.hash()
    );
    let emit = |t: T, lambda: &LambdaGrid<T>, bayes: &BayesGrid<T>, rows: &mut String| {
        let patches = grid_patches(lambda);
        let (rl, sl) = recall_lambda(lambda, &patches).expect("patches nonempty");
        let (rb, sb) = recall_bayes(bayes, &patches).expect("patches nonempty");
        rows.push_str(&format!("{t},{rl},{sl},{rb},{sb}\n"));
    };

    let dt = T::one() / scenario.lidar.scan_rate;
    let mut t = T::zero();
    let mut scan_index: u64 = 0;
    let mut switched = false;
    emit(t, &lambda, &bayes, &mut rows);
    while t < scenario.duration {
        if !switched && t >= phases.switch_t {
            let displacement = phases.pose2 - robot.position;
            robot.position = phases.pose2;
            robot.heading = phases.pose2_heading;
            lambda.recenter(displacement);
            bayes.recenter(displacement);
            switched = true;
        }
        let beams = scan(&scenario.world, &robot, &scenario.lidar, scan_index);
        scan_index += 1;
        let mut hit_points = Vec::with_capacity(beams.len());
        for beam in &beams {
            lambda.integrate_beam(beam).expect("non-degenerate");
            bayes.integrate_beam(beam).expect("non-degenerate");
            hit_points.push(beam.hit.then_some(beam.endpoint));
        }
        for (point, angle) in estimate_scan_normals(robot.position, &hit_points, normal_gap) {
            let cell = lambda.geometry().cell_at(point);
            if let Some(state) = lambda.cell_mut(cell) {
                state.add_normal(angle);
            }
        }
        t = t + dt;
        emit(t, &lambda, &bayes, &mut rows);
    }
    write_file(out_dir, "fence_recall.csv", &rows)
}
