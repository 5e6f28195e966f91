use std::collections::HashMap;

use super::mass::stopping_probability;
use super::trace::PathTrace;
use super::view::IntensityView;
use crate::geom::CellIndex;
use crate::scalar::Real;

/// Which per-cell intensity enters the first-collision weights.
#[derive(Clone, Copy, Debug)]
pub enum IntensityMode<T> {
    /// Every collision counts.
    Plain,
    /// Collisions are thinned by the per-cell stopping probability, so only
    /// collisions able to stop the robot (mass above `m_max`) count.
    MassWeighted { m_max: T },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Estimate {
    Point,
    Lower,
    Upper,
}

/// Probability weight of the first (counted) collision happening in a cell.
#[derive(Clone, Debug)]
pub struct PathCoefficient<T> {
    pub group: usize,
    pub cell: CellIndex,
    /// Area crossed when the front reaches the cell's group, m^2.
    pub crossed_area: T,
    pub weight: T,
}

#[derive(Clone, Debug)]
pub struct PathCoefficients<T> {
    pub coefficients: Vec<PathCoefficient<T>>,
    /// Probability of traversing the whole trace without a counted collision.
    pub survival: T,
}

fn coefficients_with<T: Real, V: IntensityView<T>>(
    trace: &PathTrace<T>,
    view: &V,
    mode: IntensityMode<T>,
    estimate: Estimate,
) -> PathCoefficients<T> {
    let area = view.cell_area();
    let mut cumulative = T::zero();
    let mut coefficients = Vec::with_capacity(trace.cell_count());
    for (group, cell) in trace.iter_cells() {
        let lambda = match estimate {
            Estimate::Point => view.lambda(cell),
            Estimate::Lower => view.lambda_bounds(cell).0,
            Estimate::Upper => view.lambda_bounds(cell).1,
        };
        let weight = match mode {
            IntensityMode::Plain => T::one(),
            IntensityMode::MassWeighted { m_max } => {
                stopping_probability(view.mass_pdf(cell), m_max)
            }
        };
        let delta = area * (lambda * weight);
        let k = (-cumulative).exp() * (T::one() - (-delta).exp());
        coefficients.push(PathCoefficient {
            group,
            cell,
            crossed_area: trace.crossed_area(&trace.groups()[group]),
            weight: k,
        });
        cumulative = cumulative + delta;
    }
    PathCoefficients {
        coefficients,
        survival: (-cumulative).exp(),
    }
}

/// First-collision weights along the trace using the point intensity
/// estimates. The weights plus the survival probability sum to one.
pub fn path_coefficients<T: Real, V: IntensityView<T>>(
    trace: &PathTrace<T>,
    view: &V,
    mode: IntensityMode<T>,
) -> PathCoefficients<T> {
    coefficients_with(trace, view, mode, Estimate::Point)
}

/// Risk evaluated at the first collision: a function of the crossed area and
/// the cell, constant inside each cell.
pub trait RiskFunction<T> {
    fn risk(&self, crossed_area: T, cell: CellIndex) -> T;
}

impl<T, F> RiskFunction<T> for F
where
    F: Fn(T, CellIndex) -> T,
{
    fn risk(&self, crossed_area: T, cell: CellIndex) -> T {
        self(crossed_area, cell)
    }
}

/// Speed component toward an obstacle of the given normal; an unknown normal
/// assumes a head-on collision.
pub fn normal_velocity<T: Real>(speed: T, heading: T, normal: Option<T>) -> T {
    match normal {
        Some(n) => (speed * (heading - n).cos()).abs(),
        None => speed.abs(),
    }
}

/// Momentum lost when colliding with an immovable obstacle:
/// `m_R * |v cos(theta)|` with `theta` the angle between heading and the
/// obstacle normal.
pub struct MomentumRisk<T> {
    robot_mass: T,
    per_cell: HashMap<CellIndex, (T, T, Option<T>)>,
}

impl<T: Real> RiskFunction<T> for MomentumRisk<T> {
    fn risk(&self, _crossed_area: T, cell: CellIndex) -> T {
        let &(speed, heading, normal) = self
            .per_cell
            .get(&cell)
            .expect("momentum risk queried outside its trace");
        self.robot_mass * normal_velocity(speed, heading, normal)
    }
}

/// Builds the momentum-loss risk for a trace, caching per-cell speed, heading
/// and obstacle normal.
pub fn momentum_risk<T: Real, V: IntensityView<T>>(
    trace: &PathTrace<T>,
    view: &V,
    robot_mass: T,
) -> MomentumRisk<T> {
    let mut per_cell = HashMap::with_capacity(trace.cell_count());
    for group in trace.groups() {
        for &cell in &group.cells {
            per_cell.insert(cell, (group.speed, group.heading, view.normal(cell)));
        }
    }
    MomentumRisk {
        robot_mass,
        per_cell,
    }
}

/// Path risk expectation with the point estimate and both confidence-bound
/// variants. No ordering between the three is asserted anywhere: evaluating
/// with lower intensities can legitimately raise the risk when it shifts
/// collision weight toward heavier cells.
#[derive(Clone, Copy, Debug)]
pub struct RiskReport<T> {
    pub expected: T,
    pub expected_lower: T,
    pub expected_upper: T,
    /// Plain probability of any collision along the trace.
    pub collision_probability: T,
}

impl<T: Real> RiskReport<T> {
    pub fn zero() -> Self {
        RiskReport {
            expected: T::zero(),
            expected_lower: T::zero(),
            expected_upper: T::zero(),
            collision_probability: T::zero(),
        }
    }

    /// CSV row for the metric traces: scenario, time, expectation, bounds,
    /// collision probability.
    pub fn csv_row(&self, scenario_id: &str, t: T) -> String {
        format!(
            "{},{},{},{},{},{}",
            scenario_id, t, self.expected, self.expected_lower, self.expected_upper,
            self.collision_probability
        )
    }
}

fn plain_collision_probability<T: Real, V: IntensityView<T>>(
    trace: &PathTrace<T>,
    view: &V,
) -> T {
    let area = view.cell_area();
    let mut total = T::zero();
    for (_, cell) in trace.iter_cells() {
        total = total + area * view.lambda(cell);
    }
    T::one() - (-total).exp()
}

fn expectation<T: Real, V: IntensityView<T>, R: RiskFunction<T> + ?Sized>(
    trace: &PathTrace<T>,
    view: &V,
    mode: IntensityMode<T>,
    estimate: Estimate,
    risk: &R,
) -> T {
    let coeffs = coefficients_with(trace, view, mode, estimate);
    let mut expected = T::zero();
    for c in &coeffs.coefficients {
        expected = expected + c.weight * risk.risk(c.crossed_area, c.cell);
    }
    expected
}

/// Expectation of a risk function over the first collision of the path.
/// With `risk = 1` this reduces to the collision probability.
pub fn expected_risk<T: Real, V: IntensityView<T>, R: RiskFunction<T>>(
    trace: &PathTrace<T>,
    view: &V,
    risk: &R,
) -> RiskReport<T> {
    RiskReport {
        expected: expectation(trace, view, IntensityMode::Plain, Estimate::Point, risk),
        expected_lower: expectation(trace, view, IntensityMode::Plain, Estimate::Lower, risk),
        expected_upper: expectation(trace, view, IntensityMode::Plain, Estimate::Upper, risk),
        collision_probability: plain_collision_probability(trace, view),
    }
}

struct MassMomentum<T> {
    robot_mass: T,
    per_cell: HashMap<CellIndex, (T, T, Option<T>)>,
}

impl<T: Real> MassMomentum<T> {
    fn risk_with<V: IntensityView<T>>(&self, view: &V, cell: CellIndex) -> T {
        let &(speed, heading, normal) = self
            .per_cell
            .get(&cell)
            .expect("mass risk queried outside its trace");
        let base = self.robot_mass * normal_velocity(speed, heading, normal);
        let pdf = view.mass_pdf(cell);
        let mut total = T::zero();
        for &(k, alpha) in pdf.atoms() {
            let mass = pdf.mass_of_atom(k);
            total = total + alpha * (base * (mass / (self.robot_mass + mass)));
        }
        // The infinite-mass atom is the limit of the momentum transfer and is
        // handled symbolically.
        total + pdf.alpha_inf() * base
    }
}

/// Expected momentum loss at the first stopping collision, with per-cell
/// probabilistic obstacle masses. The first-collision weights are thinned by
/// the stopping probabilities, and each cell's momentum transfer averages
/// over its mass distribution. Setting a certainly-infinite mass everywhere
/// reproduces `expected_risk` with `momentum_risk` exactly.
pub fn expected_mass_risk<T: Real, V: IntensityView<T>>(
    trace: &PathTrace<T>,
    view: &V,
    robot_mass: T,
    m_max: T,
) -> RiskReport<T> {
    let mut per_cell = HashMap::with_capacity(trace.cell_count());
    for group in trace.groups() {
        for &cell in &group.cells {
            per_cell.insert(cell, (group.speed, group.heading, view.normal(cell)));
        }
    }
    let rm = MassMomentum {
        robot_mass,
        per_cell,
    };
    let mode = IntensityMode::MassWeighted { m_max };
    let eval = |estimate| {
        let coeffs = coefficients_with(trace, view, mode, estimate);
        let mut expected = T::zero();
        for c in &coeffs.coefficients {
            expected = expected + c.weight * rm.risk_with(view, c.cell);
        }
        expected
    };
    RiskReport {
        expected: eval(Estimate::Point),
        expected_lower: eval(Estimate::Lower),
        expected_upper: eval(Estimate::Upper),
        collision_probability: plain_collision_probability(trace, view),
    }
}
