use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{RobotState, World};
use crate::field::{Beam, SensorTrust};
use crate::geom::Vec2;
use crate::scalar::{cast, Real};

/// Lidar model: beam fan, range, error-region area and read trust. All
/// randomness derives from the seed, so identical seeds give identical
/// scans.
#[derive(Clone, Copy, Debug)]
pub struct LidarSpec<T> {
    pub beam_count: usize,
    /// Field of view, radians, centered on the robot heading.
    pub fov: T,
    pub max_range: T,
    /// Scans per second.
    pub scan_rate: T,
    /// Error-region area attached to each hit, m^2.
    pub error_area: T,
    pub trust: SensorTrust<T>,
    pub rng_seed: u64,
}

/// Dedicated random stream for one beam of one scan.
fn beam_rng(seed: u64, scan_index: u64, beam_count: usize, beam_index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(scan_index * beam_count as u64 + beam_index as u64);
    rng
}

/// Casts one ray through the ground truth.
///
/// The ray walks every crossed cell in order and draws one interception
/// Bernoulli per crossing with the cell's fill ratio; the first interception
/// places the physical hit at the midpoint of the ray's chord through that
/// cell. Sensor noise then applies: a physical hit is reported with
/// probability `p_hit` (otherwise the return is a max-range miss), and a
/// clear ray misreads as a hit with probability `1 - p_miss`, placed
/// uniformly on one of the traversed cells.
pub fn cast_beam<T: Real, R: Rng>(
    world: &World<T>,
    origin: Vec2<T>,
    angle: T,
    spec: &LidarSpec<T>,
    rng: &mut R,
) -> Beam<T> {
    let end = origin + Vec2::from_angle(angle) * spec.max_range;
    let spans = world.segment_spans(origin, end);

    let mut interception: Option<Vec2<T>> = None;
    for span in &spans {
        let r = world.fill_ratio(span.cell);
        if r <= T::zero() {
            continue;
        }
        let p = r.to_f64().unwrap_or(0.0).clamp(0.0, 1.0);
        if rng.gen_bool(p) {
            let t = span.mid();
            interception = Some(origin + (end - origin) * t);
            break;
        }
    }

    match interception {
        Some(point) => {
            if rng.gen_bool(spec.trust.p_hit.to_f64().unwrap_or(1.0)) {
                Beam::hit(origin, point, spec.error_area)
            } else {
                // dropout: the return is lost and the sensor reads max range
                Beam::miss(origin, end)
            }
        }
        None => {
            if rng.gen_bool(spec.trust.p_miss.to_f64().unwrap_or(1.0)) {
                Beam::miss(origin, end)
            } else {
                let span = &spans[rng.gen_range(0..spans.len())];
                let point = origin + (end - origin) * span.mid();
                Beam::hit(origin, point, spec.error_area)
            }
        }
    }
}

/// One full scan: `beam_count` beams evenly spaced over the field of view,
/// each on its own deterministic random stream.
pub fn scan<T: Real>(
    world: &World<T>,
    robot: &RobotState<T>,
    spec: &LidarSpec<T>,
    scan_index: u64,
) -> Vec<Beam<T>> {
    let n = spec.beam_count;
    let mut beams = Vec::with_capacity(n);
    for i in 0..n {
        let angle = if n == 1 {
            robot.heading
        } else {
            let frac = cast::<T>(i as f64 / (n - 1) as f64) - cast(0.5);
            robot.heading + spec.fov * frac
        };
        let mut rng = beam_rng(spec.rng_seed, scan_index, n, i);
        beams.push(cast_beam(world, robot.position, angle, spec, &mut rng));
    }
    beams
}
