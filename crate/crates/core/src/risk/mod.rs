//! Path risk over a collision-intensity field: first-collision probability
//! weights, generic risk expectations, momentum loss and probabilistic
//! obstacle masses.

mod eval;
mod mass;
mod trace;
mod view;

pub use eval::{
    expected_mass_risk, expected_risk, momentum_risk, normal_velocity, path_coefficients,
    IntensityMode, MomentumRisk, PathCoefficient, PathCoefficients, RiskFunction, RiskReport,
};
pub use mass::{stopping_probability, MassPdf, MassTable};
pub use trace::{PathGroup, PathTrace};
pub use view::{FieldSnapshot, IntensityView, SyntheticCell, SyntheticField};
