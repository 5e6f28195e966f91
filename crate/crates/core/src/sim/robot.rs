use crate::geom::{wrap_angle, Vec2};
use crate::scalar::{cast, Real};

/// Kinematic state and physical limits of the robot.
#[derive(Clone, Copy, Debug)]
pub struct RobotState<T> {
    pub position: Vec2<T>,
    pub heading: T,
    pub speed: T,
    /// Robot mass, kg.
    pub mass: T,
    /// Front width, meters.
    pub width: T,
    pub max_speed: T,
    pub max_accel: T,
}

/// Constant-curvature command held for a fixed duration.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Command<T> {
    pub target_speed: T,
    /// Arc curvature, 1/m. Zero drives straight.
    pub curvature: T,
    pub duration: T,
}

impl<T: Real> Command<T> {
    pub fn stop(duration: T) -> Self {
        Command {
            target_speed: T::zero(),
            curvature: T::zero(),
            duration,
        }
    }

    pub fn is_stop(&self) -> bool {
        self.target_speed == T::zero()
    }
}

/// Advances the robot along a constant-curvature arc for `dt`. Speed slews
/// toward the command target under the acceleration limit; heading advances
/// by curvature times distance.
pub fn step<T: Real>(robot: &RobotState<T>, command: &Command<T>, dt: T) -> RobotState<T> {
    let target = command
        .target_speed
        .max(T::zero())
        .min(robot.max_speed);
    let max_dv = robot.max_accel * dt;
    let dv = (target - robot.speed).max(-max_dv).min(max_dv);
    let next_speed = robot.speed + dv;
    let distance = (robot.speed + next_speed) * cast::<T>(0.5) * dt;
    let dtheta = command.curvature * distance;

    let position = if dtheta.abs() < cast(1e-12) {
        robot.position + Vec2::from_angle(robot.heading) * distance
    } else {
        let k = command.curvature;
        let theta = robot.heading;
        robot.position
            + Vec2::new(
                ((theta + dtheta).sin() - theta.sin()) / k,
                (theta.cos() - (theta + dtheta).cos()) / k,
            )
    };

    RobotState {
        position,
        heading: wrap_angle(robot.heading + dtheta),
        speed: next_speed,
        ..*robot
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn robot() -> RobotState<f64> {
        RobotState {
            position: Vec2::zero(),
            heading: 0.0,
            speed: 0.4,
            mass: 50.0,
            width: 0.6,
            max_speed: 0.5,
            max_accel: 0.05,
        }
    }

    #[test]
    fn straight_displacement() {
        let mut r = robot();
        r.speed = 0.5;
        let cmd = Command {
            target_speed: 0.5,
            curvature: 0.0,
            duration: 3.0,
        };
        let next = step(&r, &cmd, 1.0);
        assert_abs_diff_eq!(next.position.x, 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(next.position.y, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn speed_slews_under_the_acceleration_limit() {
        let r = robot();
        let cmd = Command {
            target_speed: 0.5,
            curvature: 0.0,
            duration: 3.0,
        };
        let next = step(&r, &cmd, 1.0);
        assert_abs_diff_eq!(next.speed, 0.45, epsilon = 1e-12);
    }

    #[test]
    fn full_circle_returns_to_the_start() {
        let mut r = robot();
        r.speed = 0.4;
        let curvature = std::f64::consts::PI / 8.0;
        let cmd = Command {
            target_speed: 0.4,
            curvature,
            duration: 1.0,
        };
        // 800 steps of 0.02 m close the circle of circumference 16.
        for _ in 0..800 {
            r = step(&r, &cmd, 0.05);
        }
        assert_abs_diff_eq!(r.position.x, 0.0, epsilon = 1e-6);
        assert_abs_diff_eq!(r.position.y, 0.0, epsilon = 1e-6);
    }
}
