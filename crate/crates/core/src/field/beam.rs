use crate::error::FieldError;
use crate::geom::{CellIndex, Vec2};
use crate::scalar::Real;

/// Per-measurement trust of the range sensor.
#[derive(Clone, Copy, Debug)]
pub struct SensorTrust<T> {
    /// Probability that a reported 'hit' is right.
    pub p_hit: T,
    /// Probability that a reported 'miss' is right.
    pub p_miss: T,
}

impl<T: Real> SensorTrust<T> {
    pub fn new(p_hit: T, p_miss: T) -> Result<Self, FieldError> {
        let ok = |p: T| p > T::zero() && p <= T::one();
        if ok(p_hit) && ok(p_miss) {
            Ok(SensorTrust { p_hit, p_miss })
        } else {
            Err(FieldError::InvalidTrust)
        }
    }

    /// A sensor that never misreads.
    pub fn perfect() -> Self {
        SensorTrust {
            p_hit: T::one(),
            p_miss: T::one(),
        }
    }
}

/// One range reading in world coordinates. A miss runs to max range; a hit
/// ends at the measured point and carries the error-region area that is
/// guaranteed to contain the obstacle.
#[derive(Clone, Debug)]
pub struct Beam<T> {
    pub origin: Vec2<T>,
    pub endpoint: Vec2<T>,
    pub hit: bool,
    /// Error-region area, m^2. Ignored for misses.
    pub error_area: T,
    /// Explicit error-region cells in grid coordinates. When absent the grid
    /// snaps an axis-aligned square of `error_area` centered on the endpoint.
    pub error_cells: Option<Vec<CellIndex>>,
}

impl<T: Real> Beam<T> {
    pub fn miss(origin: Vec2<T>, endpoint: Vec2<T>) -> Self {
        Beam {
            origin,
            endpoint,
            hit: false,
            error_area: T::one(),
            error_cells: None,
        }
    }

    pub fn hit(origin: Vec2<T>, endpoint: Vec2<T>, error_area: T) -> Self {
        Beam {
            origin,
            endpoint,
            hit: true,
            error_area,
            error_cells: None,
        }
    }

    pub fn with_error_cells(mut self, cells: Vec<CellIndex>) -> Self {
        self.error_cells = Some(cells);
        self
    }
}
