use crate::geom::{wrap_angle, Vec2};
use crate::scalar::{cast, Real};

/// Estimates surface normals from the hit points of one scan.
///
/// Consecutive hit points closer than `max_gap` define a local surface
/// tangent; the normal is its perpendicular oriented toward the sensor. Both
/// endpoints of each pair receive the estimate, so isolated hits yield none.
pub fn estimate_scan_normals<T: Real>(
    sensor: Vec2<T>,
    hits: &[Option<Vec2<T>>],
    max_gap: T,
) -> Vec<(Vec2<T>, T)> {
    let half_pi = cast::<T>(std::f64::consts::FRAC_PI_2);
    let pi = cast::<T>(std::f64::consts::PI);
    let mut out = Vec::new();
    for pair in hits.windows(2) {
        let (Some(p), Some(q)) = (pair[0], pair[1]) else {
            continue;
        };
        let tangent = q - p;
        if tangent.norm() > max_gap || tangent.norm() == T::zero() {
            continue;
        }
        let mut normal = wrap_angle(tangent.y.atan2(tangent.x) + half_pi);
        let mid = (p + q) * cast(0.5);
        let toward_sensor = sensor - mid;
        if Vec2::from_angle(normal).dot(toward_sensor) < T::zero() {
            normal = wrap_angle(normal + pi);
        }
        out.push((p, normal));
        out.push((q, normal));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn wall_normals_face_the_sensor() {
        // Vertical wall at x = 2, sensor on the left: normals point along -x.
        let sensor = Vec2::new(0.0, 0.0);
        let hits = vec![
            Some(Vec2::new(2.0, -0.1)),
            Some(Vec2::new(2.0, 0.0)),
            Some(Vec2::new(2.0, 0.1)),
        ];
        let normals: Vec<(Vec2<f64>, f64)> = estimate_scan_normals(sensor, &hits, 0.3);
        assert_eq!(normals.len(), 4);
        for (_, n) in normals {
            assert_abs_diff_eq!(n.abs(), std::f64::consts::PI, epsilon = 1e-9);
        }
    }

    #[test]
    fn distant_points_are_not_paired() {
        let sensor = Vec2::new(0.0, 0.0);
        let hits = vec![Some(Vec2::new(2.0, 0.0)), Some(Vec2::new(2.0, 5.0))];
        assert!(estimate_scan_normals(sensor, &hits, 0.3).is_empty());
    }
}
