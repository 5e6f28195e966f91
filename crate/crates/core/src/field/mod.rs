//! Collision-intensity field: grid storage, beam integration, per-cell
//! intensity estimates, confidence bounds and obstacle normals.

mod beam;
mod cell;
mod config;
mod estimate;
mod grid;
mod normals;

pub use beam::{Beam, SensorTrust};
pub use cell::CellState;
pub use config::GridConfig;
pub use estimate::{confidence_bounds, lambda_heterogeneous, lambda_of};
pub use grid::{GridGeometry, LambdaGrid};
pub use normals::estimate_scan_normals;

pub(crate) use grid::{beam_cells, shift_cells as shift_grid_cells};
