//! Deterministic 2D world, lidar and robot-kinematics simulator.

mod lidar;
mod robot;
mod world;

pub use lidar::{cast_beam, scan, LidarSpec};
pub use robot::{step, Command, RobotState};
pub use world::{GroundTruthCell, World};
