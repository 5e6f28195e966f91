//! Bayesian log-odds occupancy baseline: grid updates, the width-aware
//! reachability metric, conversions between occupancies and collision
//! intensities, and the convergence and recall analyses used to compare the
//! two representations.

use crate::error::{BaselineError, FieldError};
use crate::field::{beam_cells, Beam, GridConfig, GridGeometry, LambdaGrid};
use crate::geom::{CellIndex, Vec2};
use crate::scalar::{cast, Real};

/// Log-odds measurement model of the occupancy grid.
#[derive(Clone, Copy, Debug)]
pub struct BayesModel<T> {
    /// Log odds of occupancy given a 'hit'. Positive for an informative
    /// sensor.
    pub l_occ: T,
    /// Log odds of occupancy given a 'miss'. Negative for an informative
    /// sensor.
    pub l_free: T,
}

impl<T: Real> BayesModel<T> {
    pub fn new(l_occ: T, l_free: T) -> Result<Self, BaselineError> {
        if l_occ > T::zero() && l_free < T::zero() {
            Ok(BayesModel { l_occ, l_free })
        } else {
            Err(BaselineError::UninformativeModel)
        }
    }

    /// Symmetric model: a hit carries as much information as a miss.
    /// `p` is the occupancy probability given a hit, in (0.5, 1).
    pub fn symmetric(p: T) -> Result<Self, BaselineError> {
        if p <= cast(0.5) || p >= T::one() {
            return Err(BaselineError::UninformativeModel);
        }
        let l = (p / (T::one() - p)).ln();
        BayesModel::new(l, -l)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Measurement {
    Hit,
    Miss,
}

/// One clamped log-odds update.
pub fn bayes_update<T: Real>(
    log_odds: T,
    z: Measurement,
    model: &BayesModel<T>,
    clamp: (T, T),
) -> T {
    let delta = match z {
        Measurement::Hit => model.l_occ,
        Measurement::Miss => model.l_free,
    };
    (log_odds + delta).max(clamp.0).min(clamp.1)
}

/// Occupancy probability from log odds: `1 - 1/(1 + exp(l))`, evaluated on
/// the branch that avoids cancellation for large magnitudes.
pub fn occupancy_from_log_odds<T: Real>(log_odds: T) -> T {
    if log_odds < T::zero() {
        let e = log_odds.exp();
        e / (T::one() + e)
    } else {
        T::one() / (T::one() + (-log_odds).exp())
    }
}

/// Limiting occupancy of a cell filled at ratio `r` as the measurement count
/// grows: the sign of `r*l_occ + (1-r)*l_free` decides whether the posterior
/// converges to occupied, free, or stays at one half.
pub fn limit_class<T: Real>(r: T, model: &BayesModel<T>) -> T {
    let drift = r * model.l_occ + (T::one() - r) * model.l_free;
    if drift > T::zero() {
        T::one()
    } else if drift < T::zero() {
        T::zero()
    } else {
        cast(0.5)
    }
}

/// Initial recovery rate of the Bayesian occupancy after `m` misses:
/// derivative of the occupancy in the hit count at zero hits,
/// `l_occ / (2 (cosh(m l_free) + 1))`. Vanishes exponentially in `m`.
pub fn recovery_slope_bayes<T: Real>(misses: T, model: &BayesModel<T>) -> T {
    let two = cast::<T>(2.0);
    model.l_occ / (two * ((misses * model.l_free).cosh() + T::one()))
}

/// Initial recovery rate of the intensity-based collision probability after
/// `m` misses: `(cell_area / error_area) / m`. Vanishes only linearly in `m`.
pub fn recovery_slope_lambda<T: Real>(misses: T, cell_area: T, error_area: T) -> T {
    (cell_area / error_area) / misses
}

/// Probability of crossing the given occupancies without collision, each
/// weighted by the crossed area: the product of `(1 - p)^area`. An occupancy
/// of one forces zero. Invariant to subdividing cells at constant density.
pub fn reachability<T, I>(cells: I) -> Result<T, BaselineError>
where
    T: Real,
    I: IntoIterator<Item = (T, T)>,
{
    let mut r = T::one();
    for (p, area) in cells {
        if p < T::zero() || p > T::one() {
            return Err(BaselineError::OccupancyOutOfRange(
                p.to_f64().unwrap_or(f64::NAN),
            ));
        }
        if p == T::one() {
            return Ok(T::zero());
        }
        r = r * (T::one() - p).powf(area);
    }
    Ok(r)
}

/// Occupancy of a unit-area cell to collision intensity: `-ln(1 - p)`,
/// clamped at `lambda_max` as `p` approaches one.
pub fn occupancy_to_lambda<T: Real>(p: T, lambda_max: T) -> Result<T, BaselineError> {
    if p < T::zero() || p > T::one() {
        return Err(BaselineError::OccupancyOutOfRange(
            p.to_f64().unwrap_or(f64::NAN),
        ));
    }
    if p == T::one() {
        return Ok(lambda_max);
    }
    Ok((-(T::one() - p).ln()).min(lambda_max))
}

/// Collision intensity to the occupancy of a unit-area cell.
pub fn lambda_to_occupancy<T: Real>(lambda: T) -> T {
    T::one() - (-lambda).exp()
}

/// Log-odds occupancy grid sharing the lambda grid's geometry and beam
/// handling so the two representations are fed identically.
#[derive(Clone, Debug)]
pub struct BayesGrid<T> {
    pub config: GridConfig<T>,
    pub model: BayesModel<T>,
    pub clamp: (T, T),
    geom: GridGeometry<T>,
    cells: Vec<T>,
}

impl<T: Real> BayesGrid<T> {
    pub fn new(config: GridConfig<T>, model: BayesModel<T>, center: Vec2<T>) -> Self {
        let geom = GridGeometry::new(config.cell_size, config.width, config.height, center);
        let ten = cast::<T>(10.0);
        BayesGrid {
            config,
            model,
            clamp: (-ten, ten),
            geom,
            cells: vec![T::zero(); config.width * config.height],
        }
    }

    pub fn geometry(&self) -> &GridGeometry<T> {
        &self.geom
    }

    pub fn log_odds(&self, cell: CellIndex) -> T {
        if self.geom.contains(cell) {
            self.cells[self.geom.linear(cell)]
        } else {
            T::zero()
        }
    }

    /// Occupancy probability; unmeasured and out-of-grid cells sit at the
    /// 0.5 prior.
    pub fn occupancy(&self, cell: CellIndex) -> T {
        occupancy_from_log_odds(self.log_odds(cell))
    }

    pub fn update(&mut self, cell: CellIndex, z: Measurement) {
        if self.geom.contains(cell) {
            let idx = self.geom.linear(cell);
            self.cells[idx] = bayes_update(self.cells[idx], z, &self.model, self.clamp);
        }
    }

    /// Same beam geometry as the lambda grid: error-region cells are hits,
    /// cells crossed before it are misses.
    pub fn integrate_beam(&mut self, beam: &Beam<T>) -> Result<(), FieldError> {
        let update = beam_cells(&self.geom, beam)?;
        for c in update.missed {
            self.update(c, Measurement::Miss);
        }
        for c in update.region {
            self.update(c, Measurement::Hit);
        }
        Ok(())
    }

    pub fn recenter(&mut self, displacement: Vec2<T>) {
        let shift = self.geom.recenter(displacement);
        crate::field::shift_grid_cells(
            &mut self.cells,
            self.geom.width,
            self.geom.height,
            shift,
            T::zero(),
        );
    }

    /// Width-aware reachability of a swept cell list, each cell crossed over
    /// its full area.
    pub fn reachability_of(&self, cells: &[CellIndex]) -> Result<T, BaselineError> {
        let area = self.config.cell_area();
        reachability(cells.iter().map(|&c| (self.occupancy(c), area)))
    }

    pub fn iter_cells(&self) -> impl Iterator<Item = (CellIndex, T)> + '_ {
        let width = self.geom.width;
        self.cells.iter().enumerate().map(move |(i, &l)| {
            (
                CellIndex::new((i % width) as i32, (i / width) as i32),
                l,
            )
        })
    }
}

fn patch_stats<T: Real>(values: Vec<T>) -> (T, T) {
    let n = cast::<T>(values.len() as f64);
    let mut mean = T::zero();
    for &v in &values {
        mean = mean + v;
    }
    mean = mean / n;
    let mut var = T::zero();
    for &v in &values {
        var = var + (v - mean) * (v - mean);
    }
    (mean, (var / n).sqrt())
}

/// Mean and spread over patches of the probability of not colliding inside
/// each patch, Bayesian flavor. Zero means every patch is confidently
/// detected.
pub fn recall_bayes<T: Real>(
    grid: &BayesGrid<T>,
    patches: &[Vec<CellIndex>],
) -> Result<(T, T), BaselineError> {
    if patches.is_empty() {
        return Err(BaselineError::EmptyPatchList);
    }
    let values = patches
        .iter()
        .map(|p| {
            let mut prod = T::one();
            for &c in p {
                prod = prod * (T::one() - grid.occupancy(c));
            }
            prod
        })
        .collect();
    Ok(patch_stats(values))
}

/// Intensity-field flavor of the recall: per patch, `exp(-cell_area * sum of
/// intensities)`.
pub fn recall_lambda<T: Real>(
    grid: &LambdaGrid<T>,
    patches: &[Vec<CellIndex>],
) -> Result<(T, T), BaselineError> {
    if patches.is_empty() {
        return Err(BaselineError::EmptyPatchList);
    }
    let area = grid.config.cell_area();
    let values = patches
        .iter()
        .map(|p| {
            let mut total = T::zero();
            for &c in p {
                total = total + area * grid.lambda_at(c);
            }
            (-total).exp()
        })
        .collect();
    Ok(patch_stats(values))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    fn model() -> BayesModel<f64> {
        BayesModel::symmetric(0.7).unwrap()
    }

    #[test]
    fn zero_log_odds_is_the_uninformed_prior() {
        assert_eq!(occupancy_from_log_odds(0.0), 0.5);
    }

    #[test]
    fn partially_filled_cells_converge_to_an_extremum() {
        let m = model();
        let occ = |r: f64, n: u32| {
            let l = (r * m.l_occ + (1.0 - r) * m.l_free) * n as f64;
            occupancy_from_log_odds(l)
        };
        assert!(occ(0.4, 200) < 1e-6);
        assert!(occ(0.6, 200) > 1.0 - 1e-6);
        assert_eq!(limit_class(0.4, &m), 0.0);
        assert_eq!(limit_class(0.5, &m), 0.5);
        assert_eq!(limit_class(0.6, &m), 1.0);
    }

    #[test]
    fn bayes_slope_formula_and_edge_cases() {
        let m = model();
        // cosh(0) = 1
        assert_relative_eq!(recovery_slope_bayes(0.0, &m), m.l_occ / 4.0, max_relative = 1e-12);
        // exponential decay in the miss count
        let s10 = recovery_slope_bayes(10.0, &m);
        let s50 = recovery_slope_bayes(50.0, &m);
        assert!(s50 < s10 * (-30.0f64 * m.l_occ).exp());
    }

    #[test]
    fn bayes_slope_matches_finite_difference_for_a_weak_sensor() {
        // First-order Taylor check needs a weakly informative sensor so the
        // unit hit step stays in the linear regime.
        let m = BayesModel::new(0.15, -0.15).unwrap();
        let misses = 10.0;
        let occ = |h: f64| occupancy_from_log_odds(misses * m.l_free + h * m.l_occ);
        let fd = occ(1.0) - occ(0.0);
        let slope = recovery_slope_bayes(misses, &m);
        assert!((fd / slope - 1.0).abs() < 0.1);
    }

    #[test]
    fn lambda_slope_is_linear_in_inverse_misses() {
        assert_relative_eq!(recovery_slope_lambda(50.0, 0.01, 0.01), 0.02, max_relative = 1e-12);
        assert_relative_eq!(
            recovery_slope_lambda(100.0, 0.01, 0.01),
            recovery_slope_lambda(50.0, 0.01, 0.01) / 2.0,
            max_relative = 1e-12
        );
        // calculus check against the closed-form probability
        let m = 50.0;
        let ratio: f64 = 1.0; // cell_area / error_area
        let p = |h: f64| 1.0 - (1.0 + h / m).powf(-ratio);
        let eps = 1e-6;
        let fd = (p(eps) - p(0.0)) / eps;
        assert_abs_diff_eq!(fd, recovery_slope_lambda(m, 0.01, 0.01), epsilon = 1e-6);
    }

    #[test]
    fn reachability_examples() {
        // free space
        let r: f64 = reachability((0..5).map(|_| (0.0, 0.01))).unwrap();
        assert_eq!(r, 1.0);
        // homogeneous field of total crossed area D with unit width
        let d = 3.0;
        let p = 0.2;
        let r: f64 = reachability(vec![(p, d)]).unwrap();
        assert_relative_eq!(r, (1.0 - p).powf(d), max_relative = 1e-12);
        // a certainly occupied cell blocks the path
        let r: f64 = reachability(vec![(0.3, 1.0), (1.0, 1.0)]).unwrap();
        assert_eq!(r, 0.0);
        assert!(reachability::<f64, _>(vec![(1.2, 1.0)]).is_err());
    }

    #[test]
    fn occupancy_lambda_round_trip() {
        assert_eq!(occupancy_to_lambda(0.0, 1000.0).unwrap(), 0.0);
        assert_eq!(lambda_to_occupancy(0.0), 0.0);
        let lambda = occupancy_to_lambda(0.5, 1000.0).unwrap();
        assert_relative_eq!(lambda, std::f64::consts::LN_2, max_relative = 1e-12);
        for p in [0.0, 0.1, 0.5, 0.9, 0.999] {
            let back = lambda_to_occupancy(occupancy_to_lambda(p, 1e9).unwrap());
            assert_abs_diff_eq!(back, p, epsilon = 1e-12);
        }
        assert_eq!(occupancy_to_lambda(1.0, 1000.0).unwrap(), 1000.0);
    }

    #[test]
    fn naive_joint_product_depends_on_tessellation() {
        // The joint no-occupancy product over two cells at 0.1 gives 0.19;
        // re-tessellating the same region into four cells gives 0.3439. The
        // area-weighted form is invariant.
        let two: f64 = 1.0 - 0.9f64.powi(2);
        let four: f64 = 1.0 - 0.9f64.powi(4);
        assert_abs_diff_eq!(two, 0.19, epsilon = 1e-12);
        assert_abs_diff_eq!(four, 0.3439, epsilon = 1e-12);

        let coarse: f64 = reachability(vec![(0.1, 1.0), (0.1, 1.0)]).unwrap();
        let fine: f64 = reachability((0..4).map(|_| (0.1, 0.5))).unwrap();
        assert_abs_diff_eq!(coarse, fine, epsilon = 1e-12);
    }

    #[test]
    fn clamped_updates_stay_bounded() {
        let cfg = GridConfig::standard(4, 4);
        let mut grid = BayesGrid::new(cfg, model(), Vec2::zero());
        let c = CellIndex::new(1, 1);
        for _ in 0..100 {
            grid.update(c, Measurement::Hit);
        }
        assert_eq!(grid.log_odds(c), 10.0);
        for _ in 0..300 {
            grid.update(c, Measurement::Miss);
        }
        assert_eq!(grid.log_odds(c), -10.0);
    }

    #[test]
    fn recall_flavors() {
        let cfg = GridConfig::standard(8, 8);
        let mut bayes = BayesGrid::new(cfg, model(), Vec2::zero());
        let mut lambda = crate::field::LambdaGrid::new(cfg, Vec2::zero());

        let patch: Vec<CellIndex> = (0..4)
            .flat_map(|y| (0..4).map(move |x| CellIndex::new(x, y)))
            .collect();

        // all free
        assert_eq!(recall_lambda(&lambda, &[patch.clone()]).unwrap().0, 1.0);

        // fully confident obstacle patch
        for &c in &patch {
            for _ in 0..200 {
                bayes.update(c, Measurement::Hit);
            }
        }
        assert!(recall_bayes(&bayes, &[patch.clone()]).unwrap().0 < 1e-6);

        // single intensity atom at ln2 / cell area
        *lambda.cell_mut(CellIndex::new(0, 0)).unwrap() =
            crate::field::CellState::with_counts(1.0, 1.0, 0.01);
        let (mean, _sd) = recall_lambda(&lambda, &[patch.clone()]).unwrap();
        assert_relative_eq!(mean, 0.5, max_relative = 1e-12);

        assert!(recall_bayes(&bayes, &[]).is_err());
    }
}
