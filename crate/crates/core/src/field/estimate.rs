//! Per-cell intensity estimates and confidence bounds.

use super::{CellState, GridConfig, SensorTrust};
use crate::scalar::Real;

/// Closed-form intensity estimate for a homogeneous error area `e`:
/// `ln(1 + h/m) / e`, capped at `lambda_max`. A cell hit but never missed
/// saturates at the cap; a cell never hit is free.
pub fn lambda_of<T: Real>(cell: &CellState<T>, config: &GridConfig<T>) -> T {
    let (h, m) = (cell.hit_weight, cell.miss_weight);
    if h <= T::zero() {
        return T::zero();
    }
    if m <= T::zero() {
        return config.lambda_max;
    }
    let lambda = (T::one() + h / m).ln() / config.default_error_area;
    lambda.min(config.lambda_max)
}

/// Intensity estimate when each hit carried its own error area:
/// `sum(1/e_k) / m`, capped. Over-estimates the homogeneous closed form when
/// the areas are all equal, which errs on the safe side.
pub fn lambda_heterogeneous<T: Real>(cell: &CellState<T>, lambda_max: T) -> T {
    if cell.inv_error_sum <= T::zero() {
        return T::zero();
    }
    if cell.miss_weight <= T::zero() {
        return lambda_max;
    }
    (cell.inv_error_sum / cell.miss_weight).min(lambda_max)
}

/// Confidence bounds on the intensity of a cell.
///
/// The rightful hit count behind `M` noisy readings is a sum of Bernoulli
/// variables with success probabilities given by the sensor trust; its
/// Poisson-binomial distribution is approximated by a Gaussian of the same
/// mean and variance, and the `z`-interval on the count is mapped through the
/// monotone count-to-intensity function. An unmeasured cell returns the prior
/// `(0, lambda_max)`.
pub fn confidence_bounds<T: Real>(
    cell: &CellState<T>,
    trust: &SensorTrust<T>,
    config: &GridConfig<T>,
) -> (T, T) {
    let (h, m) = (cell.hit_weight, cell.miss_weight);
    let total = h + m;
    if total <= T::zero() {
        return (T::zero(), config.lambda_max);
    }

    let mean = h * trust.p_hit + m * (T::one() - trust.p_miss);
    let var = h * trust.p_hit * (T::one() - trust.p_hit)
        + m * trust.p_miss * (T::one() - trust.p_miss);
    let dev = config.z_score * var.sqrt();
    let k_low = (mean - dev).max(T::zero());
    let k_high = (mean + dev).min(total);

    let to_lambda = |k: T| {
        if k >= total {
            return config.lambda_max;
        }
        let lambda = (k / (total - k) + T::one()).ln() / config.default_error_area;
        lambda.min(config.lambda_max)
    };
    (to_lambda(k_low), to_lambda(k_high))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    fn cfg() -> GridConfig<f64> {
        GridConfig::standard(10, 10)
    }

    #[test]
    fn never_hit_cell_is_free() {
        let cell = CellState::with_counts(0.0, 10.0, 0.01);
        assert_eq!(lambda_of(&cell, &cfg()), 0.0);
    }

    #[test]
    fn one_hit_one_miss_closed_form() {
        let cell = CellState::with_counts(1.0, 1.0, 0.01);
        assert_relative_eq!(
            lambda_of(&cell, &cfg()),
            100.0 * std::f64::consts::LN_2,
            max_relative = 1e-12
        );
    }

    #[test]
    fn hit_only_cell_saturates() {
        let cell = CellState::with_counts(3.0, 0.0, 0.01);
        assert_eq!(lambda_of(&cell, &cfg()), 1000.0);
    }

    #[test]
    fn heterogeneous_without_hits_is_free() {
        let cell = CellState::<f64>::default();
        assert_eq!(lambda_heterogeneous(&cell, 1000.0), 0.0);
    }

    #[test]
    fn heterogeneous_dominates_closed_form_for_equal_areas() {
        let cell = CellState::with_counts(1.0, 1.0, 0.01);
        let hom = lambda_of(&cell, &cfg());
        let het = lambda_heterogeneous(&cell, 1000.0);
        assert_relative_eq!(het, 100.0, max_relative = 1e-12);
        assert!(het >= hom);
    }

    #[test]
    fn heterogeneous_mixed_areas() {
        let mut cell = CellState::<f64>::default();
        cell.record_hit(0.01);
        cell.record_hit(0.02);
        for _ in 0..4 {
            cell.record_miss();
        }
        assert_relative_eq!(lambda_heterogeneous(&cell, 1000.0), 37.5, max_relative = 1e-12);
    }

    #[test]
    fn perfect_sensor_collapses_the_interval() {
        let cell = CellState::with_counts(7.0, 13.0, 0.01);
        let trust = SensorTrust::perfect();
        let (lo, hi) = confidence_bounds(&cell, &trust, &cfg());
        let point = lambda_of(&cell, &cfg());
        assert_abs_diff_eq!(lo, point, epsilon = 1e-12);
        assert_abs_diff_eq!(hi, point, epsilon = 1e-12);
    }

    #[test]
    fn fifty_miss_cell_upper_bound() {
        let cell = CellState::with_counts(0.0, 50.0, 0.01);
        let trust = SensorTrust::new(0.99, 0.9999).unwrap();
        let (lo, hi) = confidence_bounds(&cell, &trust, &cfg());
        assert_eq!(lo, 0.0);
        // mean 0.005, var 50 * 0.9999 * 0.0001, K_U ~ 0.1436
        let mean: f64 = 0.005;
        let dev = 1.96 * (50.0f64 * 0.9999 * 0.0001).sqrt();
        let expected = 100.0 * ((mean + dev) / (50.0 - mean - dev) + 1.0f64).ln();
        assert_relative_eq!(hi, expected, max_relative = 1e-12);
        assert_abs_diff_eq!(hi, 0.2877, epsilon = 5e-4);
    }

    #[test]
    fn unmeasured_cell_returns_the_prior() {
        let cell = CellState::<f64>::default();
        let trust = SensorTrust::new(0.99, 0.9999).unwrap();
        assert_eq!(confidence_bounds(&cell, &trust, &cfg()), (0.0, 1000.0));
    }
}
