use crate::scalar::Real;

/// Per-cell measurement counters. Weights are stored as reals so that the
/// probabilistic error-region variant can accumulate fractional memberships
/// with the same representation.
#[derive(Clone, Copy, Debug)]
pub struct CellState<T> {
    /// Accumulated hit weight (membership in beam error regions).
    pub hit_weight: T,
    /// Accumulated miss weight (clear traversals).
    pub miss_weight: T,
    /// Sum of reciprocal error-region areas over the hits, 1/m^2.
    /// Equals `hit_weight / e` exactly when all error areas are `e`.
    pub inv_error_sum: T,
    /// Optional mass-distribution label resolved through a `MassTable`.
    pub mass_label: Option<u16>,
    normal_cos_sum: T,
    normal_sin_sum: T,
    normal_count: u32,
}

impl<T: Real> Default for CellState<T> {
    fn default() -> Self {
        CellState {
            hit_weight: T::zero(),
            miss_weight: T::zero(),
            inv_error_sum: T::zero(),
            mass_label: None,
            normal_cos_sum: T::zero(),
            normal_sin_sum: T::zero(),
            normal_count: 0,
        }
    }
}

impl<T: Real> CellState<T> {
    /// Counters set directly; useful for synthetic states in tests and
    /// experiments. Assumes a homogeneous error area.
    pub fn with_counts(hit: T, miss: T, error_area: T) -> Self {
        CellState {
            hit_weight: hit,
            miss_weight: miss,
            inv_error_sum: hit / error_area,
            ..CellState::default()
        }
    }

    pub fn record_hit(&mut self, error_area: T) {
        self.hit_weight = self.hit_weight + T::one();
        self.inv_error_sum = self.inv_error_sum + T::one() / error_area;
    }

    pub fn record_miss(&mut self) {
        self.miss_weight = self.miss_weight + T::one();
    }

    /// Fractional update: membership probability `q` of the cell lying in the
    /// error region contributes `q` to the hit weight and `1 - q` to the miss
    /// weight.
    pub fn record_membership(&mut self, q: T, error_area: T) {
        self.hit_weight = self.hit_weight + q;
        self.miss_weight = self.miss_weight + (T::one() - q);
        self.inv_error_sum = self.inv_error_sum + q / error_area;
    }

    /// Total measurement weight.
    pub fn measurement_count(&self) -> T {
        self.hit_weight + self.miss_weight
    }

    pub fn is_measured(&self) -> bool {
        self.measurement_count() > T::zero()
    }

    /// Folds one surface-normal observation into the circular-mean
    /// accumulators.
    pub fn add_normal(&mut self, theta: T) {
        debug_assert!(theta.is_finite());
        self.normal_cos_sum = self.normal_cos_sum + theta.cos();
        self.normal_sin_sum = self.normal_sin_sum + theta.sin();
        self.normal_count += 1;
    }

    /// Circular-mean obstacle normal: `atan(S/C)`, shifted by pi when the
    /// cosine accumulator is negative. `None` when no observation was folded
    /// in or the accumulators cancel out.
    pub fn normal(&self) -> Option<T> {
        if self.normal_count == 0 {
            return None;
        }
        let (c, s) = (self.normal_cos_sum, self.normal_sin_sum);
        if c == T::zero() && s == T::zero() {
            return None;
        }
        let base = (s / c).atan();
        if c < T::zero() {
            Some(base + T::from_f64(std::f64::consts::PI).unwrap())
        } else {
            Some(base)
        }
    }

    pub fn normal_count(&self) -> u32 {
        self.normal_count
    }
}
