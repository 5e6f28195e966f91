use crate::error::RiskError;
use crate::scalar::{cast, Real};

/// Discrete obstacle-mass distribution of one cell: Dirac atoms at integer
/// multiples of `delta_m` plus an explicit atom at infinite mass.
#[derive(Clone, Debug, PartialEq)]
pub struct MassPdf<T> {
    delta_m: T,
    atoms: Vec<(u32, T)>,
    alpha_inf: T,
}

impl<T: Real> MassPdf<T> {
    pub fn new(delta_m: T, atoms: Vec<(u32, T)>, alpha_inf: T) -> Result<Self, RiskError> {
        if delta_m <= T::zero() {
            return Err(RiskError::InvalidMassPdf("delta_m must be positive".into()));
        }
        let mut total = alpha_inf;
        if alpha_inf < T::zero() {
            return Err(RiskError::InvalidMassPdf("negative probability".into()));
        }
        let mut seen = std::collections::HashSet::new();
        for &(k, alpha) in &atoms {
            if alpha < T::zero() {
                return Err(RiskError::InvalidMassPdf("negative probability".into()));
            }
            if !seen.insert(k) {
                return Err(RiskError::InvalidMassPdf(format!("duplicate atom {k}")));
            }
            total = total + alpha;
        }
        if (total - T::one()).abs() > cast(1e-9) {
            return Err(RiskError::InvalidMassPdf(format!(
                "probabilities sum to {total}, expected 1"
            )));
        }
        Ok(MassPdf {
            delta_m,
            atoms,
            alpha_inf,
        })
    }

    /// The worst case: the obstacle mass is certainly infinite. Default for
    /// unlabeled cells so risk is never under-estimated.
    pub fn infinite() -> Self {
        MassPdf {
            delta_m: T::one(),
            atoms: Vec::new(),
            alpha_inf: T::one(),
        }
    }

    pub fn delta_m(&self) -> T {
        self.delta_m
    }

    pub fn atoms(&self) -> &[(u32, T)] {
        &self.atoms
    }

    pub fn alpha_inf(&self) -> T {
        self.alpha_inf
    }

    pub fn mass_of_atom(&self, k: u32) -> T {
        cast::<T>(k as f64) * self.delta_m
    }
}

/// Probability that a collision in a cell with this mass distribution stops
/// the robot: the mass exceeds `m_max` (strictly), including the infinite
/// atom.
pub fn stopping_probability<T: Real>(pdf: &MassPdf<T>, m_max: T) -> T {
    let mut p = pdf.alpha_inf();
    for &(k, alpha) in pdf.atoms() {
        if pdf.mass_of_atom(k) > m_max {
            p = p + alpha;
        }
    }
    p.min(T::one())
}

/// Label-indexed mass distributions. Unlabeled lookups resolve to the
/// worst case.
#[derive(Clone, Debug)]
pub struct MassTable<T> {
    names: Vec<String>,
    pdfs: Vec<MassPdf<T>>,
    worst: MassPdf<T>,
}

impl<T: Real> Default for MassTable<T> {
    fn default() -> Self {
        MassTable {
            names: Vec::new(),
            pdfs: Vec::new(),
            worst: MassPdf::infinite(),
        }
    }
}

impl<T: Real> MassTable<T> {
    pub fn insert(&mut self, name: impl Into<String>, pdf: MassPdf<T>) -> u16 {
        let name = name.into();
        if let Some(id) = self.id_of(&name) {
            self.pdfs[id as usize] = pdf;
            return id;
        }
        self.names.push(name);
        self.pdfs.push(pdf);
        (self.pdfs.len() - 1) as u16
    }

    pub fn id_of(&self, name: &str) -> Option<u16> {
        self.names.iter().position(|n| n == name).map(|i| i as u16)
    }

    pub fn get(&self, label: Option<u16>) -> &MassPdf<T> {
        match label {
            Some(id) => self.pdfs.get(id as usize).unwrap_or(&self.worst),
            None => &self.worst,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn certainly_infinite_mass_always_stops() {
        let pdf = MassPdf::<f64>::infinite();
        assert_eq!(stopping_probability(&pdf, 100.0), 1.0);
    }

    #[test]
    fn grass_distribution_stops_at_the_infinite_atom() {
        let pdf = MassPdf::new(1.0, vec![(0, 0.95)], 0.05).unwrap();
        assert_eq!(stopping_probability(&pdf, 0.5), 0.05);
        assert_eq!(stopping_probability(&pdf, 1000.0), 0.05);
    }

    #[test]
    fn light_obstacles_never_stop() {
        let pdf = MassPdf::new(1.0, vec![(1, 0.4), (2, 0.6)], 0.0).unwrap();
        assert_eq!(stopping_probability(&pdf, 5.0), 0.0);
        assert_eq!(stopping_probability(&pdf, 1.5), 0.6);
    }

    #[test]
    fn probabilities_must_sum_to_one() {
        assert!(MassPdf::new(1.0, vec![(0, 0.5)], 0.4).is_err());
        assert!(MassPdf::new(1.0, vec![(0, 0.95)], 0.05).is_ok());
    }
}
