//! Occupancy mapping on a field of collision intensities, with a generic
//! path-risk framework, a Bayesian log-odds baseline, a deterministic 2D
//! lidar simulator and a risk-bounded sampling planner.
//!
//! All numerics are generic over the scalar type ([`scalar::Real`], `f32` or
//! `f64`); concrete aliases for both precisions live at the crate root.

pub mod baseline;
pub mod error;
pub mod field;
pub mod geom;
pub mod io;
pub mod planner;
pub mod risk;
pub mod scalar;
pub mod scenario;
pub mod sim;

pub use error::{BaselineError, FieldError, RiskError, ScenarioError, WorldError};
pub use geom::{CellIndex, Vec2};
pub use scalar::Real;

/// Double-precision aliases; the CLI and the experiments run on these.
pub type LambdaGrid64 = field::LambdaGrid<f64>;
pub type BayesGrid64 = baseline::BayesGrid<f64>;
pub type PathTrace64 = risk::PathTrace<f64>;
pub type MassPdf64 = risk::MassPdf<f64>;
pub type World64 = sim::World<f64>;
pub type Scenario64 = scenario::Scenario<f64>;

/// Single-precision aliases.
pub type LambdaGrid32 = field::LambdaGrid<f32>;
pub type BayesGrid32 = baseline::BayesGrid<f32>;
pub type PathTrace32 = risk::PathTrace<f32>;
pub type MassPdf32 = risk::MassPdf<f32>;
pub type World32 = sim::World<f32>;
