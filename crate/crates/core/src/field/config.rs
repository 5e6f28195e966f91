use crate::error::FieldError;
use crate::scalar::{cast, Real};

/// Geometry and estimation parameters of a robot-centered grid.
#[derive(Clone, Copy, Debug)]
pub struct GridConfig<T> {
    /// Side of the square cells, meters.
    pub cell_size: T,
    /// Number of columns.
    pub width: usize,
    /// Number of rows.
    pub height: usize,
    /// Cap applied to every intensity estimate, 1/m^2.
    pub lambda_max: T,
    /// Confidence multiplier for the interval bounds.
    pub z_score: T,
    /// Default per-beam error-region area, m^2.
    pub default_error_area: T,
}

impl<T: Real> GridConfig<T> {
    pub fn new(
        cell_size: T,
        width: usize,
        height: usize,
        lambda_max: T,
        z_score: T,
        default_error_area: T,
    ) -> Result<Self, FieldError> {
        fn check<T: Real>(ok: bool, field: &'static str, reason: &str) -> Result<(), FieldError> {
            if ok {
                Ok(())
            } else {
                Err(FieldError::InvalidConfig {
                    field,
                    reason: reason.to_string(),
                })
            }
        }
        check::<T>(cell_size > T::zero(), "cell_size", "must be positive")?;
        check::<T>(width >= 1, "width", "must be at least 1")?;
        check::<T>(height >= 1, "height", "must be at least 1")?;
        check::<T>(lambda_max > T::zero(), "lambda_max", "must be positive")?;
        check::<T>(z_score >= T::zero(), "z_score", "must be non-negative")?;
        check::<T>(
            default_error_area > T::zero(),
            "default_error_area",
            "must be positive",
        )?;
        Ok(GridConfig {
            cell_size,
            width,
            height,
            lambda_max,
            z_score,
            default_error_area,
        })
    }

    /// 0.1 m cells, intensity cap 1000/m^2, 95% bounds, error area of one cell.
    pub fn standard(width: usize, height: usize) -> Self {
        GridConfig::new(
            cast(0.1),
            width,
            height,
            cast(1000.0),
            cast(1.96),
            cast(0.01),
        )
        .expect("standard config is valid")
    }

    /// Cell area, m^2.
    pub fn cell_area(&self) -> T {
        self.cell_size * self.cell_size
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cell_area_is_side_squared() {
        let cfg = GridConfig::<f64>::standard(10, 10);
        assert_eq!(cfg.cell_area(), 0.1 * 0.1);
    }

    #[test]
    fn rejects_non_positive_dimensions() {
        assert!(GridConfig::<f64>::new(0.0, 10, 10, 1000.0, 1.96, 0.01).is_err());
        assert!(GridConfig::<f64>::new(0.1, 0, 10, 1000.0, 1.96, 0.01).is_err());
        assert!(GridConfig::<f64>::new(0.1, 10, 10, 1000.0, 1.96, 0.0).is_err());
    }
}
