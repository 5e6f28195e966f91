//! Plane geometry: 2D vectors, cell indices and grid-line segment traversal.

use std::cmp::Ordering;
use std::ops::{Add, Mul, Neg, Sub};

use crate::scalar::{cast, Real};

/// 2D vector in meters.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Vec2<T> {
    pub x: T,
    pub y: T,
}

impl<T: Real> Vec2<T> {
    pub fn new(x: T, y: T) -> Self {
        Vec2 { x, y }
    }

    pub fn zero() -> Self {
        Vec2 {
            x: T::zero(),
            y: T::zero(),
        }
    }

    /// Unit vector at the given angle from the x axis.
    pub fn from_angle(theta: T) -> Self {
        Vec2 {
            x: theta.cos(),
            y: theta.sin(),
        }
    }

    pub fn dot(self, other: Self) -> T {
        self.x * other.x + self.y * other.y
    }

    pub fn norm(self) -> T {
        self.dot(self).sqrt()
    }

    pub fn scale(self, k: T) -> Self {
        Vec2 {
            x: self.x * k,
            y: self.y * k,
        }
    }
}

impl<T: Real> Add for Vec2<T> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Vec2::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl<T: Real> Sub for Vec2<T> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Vec2::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl<T: Real> Mul<T> for Vec2<T> {
    type Output = Self;
    fn mul(self, k: T) -> Self {
        self.scale(k)
    }
}

impl<T: Real> Neg for Vec2<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Vec2::new(-self.x, -self.y)
    }
}

/// Integer cell coordinates. May be negative or out of a grid's bounds;
/// containers validate before indexing.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct CellIndex {
    pub x: i32,
    pub y: i32,
}

impl CellIndex {
    pub fn new(x: i32, y: i32) -> Self {
        CellIndex { x, y }
    }
}

/// Row-major order: by row (`y`) first, then column (`x`).
impl Ord for CellIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.y, self.x).cmp(&(other.y, other.x))
    }
}

impl PartialOrd for CellIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// One cell crossed by a segment, with the chord parametrized on `[0, 1]`
/// along the segment.
#[derive(Clone, Copy, Debug)]
pub struct SegmentSpan<T> {
    pub cell: CellIndex,
    pub enter: T,
    pub exit: T,
}

impl<T: Real> SegmentSpan<T> {
    /// Chord midpoint parameter.
    pub fn mid(&self) -> T {
        (self.enter + self.exit) * cast(0.5)
    }
}

fn cell_of<T: Real>(p: Vec2<T>, cell_size: T) -> CellIndex {
    CellIndex::new(
        (p.x / cell_size).floor().to_i32().expect("cell index overflow"),
        (p.y / cell_size).floor().to_i32().expect("cell index overflow"),
    )
}

/// Enumerates, in traversal order, every cell whose intersection with the
/// segment `[a, b]` has positive length. Cells are half-open squares
/// `[i*s, (i+1)*s) x [j*s, (j+1)*s)`, so a segment lying exactly on a grid
/// line belongs to the upper/right column, and corner or endpoint touches of
/// zero length are not reported. A degenerate segment yields its containing
/// cell.
pub fn segment_spans<T: Real>(a: Vec2<T>, b: Vec2<T>, cell_size: T) -> Vec<SegmentSpan<T>> {
    let inv = T::one() / cell_size;
    let (ax, ay) = (a.x * inv, a.y * inv);
    let (bx, by) = (b.x * inv, b.y * inv);
    let dx = bx - ax;
    let dy = by - ay;

    if dx == T::zero() && dy == T::zero() {
        return vec![SegmentSpan {
            cell: cell_of(a, cell_size),
            enter: T::zero(),
            exit: T::one(),
        }];
    }

    let mut ts: Vec<T> = vec![T::zero(), T::one()];
    let mut push_axis_crossings = |p0: T, d: T| {
        if d == T::zero() {
            return;
        }
        let (lo, hi) = if d > T::zero() { (p0, p0 + d) } else { (p0 + d, p0) };
        let mut k = lo.floor() + T::one();
        while k < hi {
            let t = (k - p0) / d;
            if t > T::zero() && t < T::one() {
                ts.push(t);
            }
            k = k + T::one();
        }
    };
    push_axis_crossings(ax, dx);
    push_axis_crossings(ay, dy);

    ts.sort_by(|p, q| p.partial_cmp(q).expect("finite traversal parameter"));
    ts.dedup();

    let mut spans: Vec<SegmentSpan<T>> = Vec::with_capacity(ts.len());
    for w in ts.windows(2) {
        let (t0, t1) = (w[0], w[1]);
        if t1 <= t0 {
            continue;
        }
        let mid = (t0 + t1) * cast(0.5);
        let cell = CellIndex::new(
            (ax + mid * dx).floor().to_i32().expect("cell index overflow"),
            (ay + mid * dy).floor().to_i32().expect("cell index overflow"),
        );
        match spans.last_mut() {
            Some(last) if last.cell == cell => last.exit = t1,
            _ => spans.push(SegmentSpan { cell, enter: t0, exit: t1 }),
        }
    }
    spans
}

/// Wraps an angle into `(-pi, pi]`.
pub fn wrap_angle<T: Real>(theta: T) -> T {
    let two_pi = cast::<T>(std::f64::consts::TAU);
    let pi = cast::<T>(std::f64::consts::PI);
    let mut a = theta % two_pi;
    if a > pi {
        a = a - two_pi;
    } else if a <= -pi {
        a = a + two_pi;
    }
    a
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cells(a: (f64, f64), b: (f64, f64), s: f64) -> Vec<(i32, i32)> {
        segment_spans(Vec2::new(a.0, a.1), Vec2::new(b.0, b.1), s)
            .into_iter()
            .map(|sp| (sp.cell.x, sp.cell.y))
            .collect()
    }

    #[test]
    fn horizontal_run_visits_every_cell_once() {
        assert_eq!(
            cells((0.05, 0.05), (0.45, 0.05), 0.1),
            vec![(0, 0), (1, 0), (2, 0), (3, 0), (4, 0)]
        );
    }

    #[test]
    fn segment_on_grid_line_stays_in_one_column() {
        assert_eq!(cells((0.2, 0.03), (0.2, 0.27), 0.1), vec![(2, 0), (2, 1), (2, 2)]);
    }

    #[test]
    fn endpoint_on_boundary_is_a_zero_length_touch() {
        // [0.0, 0.3] spans exactly rows 0..2; row 3 is touched at one point only.
        assert_eq!(cells((0.05, 0.0), (0.05, 0.3), 0.1), vec![(0, 0), (0, 1), (0, 2)]);
    }

    #[test]
    fn diagonal_through_corners_skips_touch_only_neighbors() {
        assert_eq!(
            cells((0.05, 0.05), (0.25, 0.25), 0.1),
            vec![(0, 0), (1, 1), (2, 2)]
        );
    }

    #[test]
    fn spans_cover_the_whole_segment() {
        let spans = segment_spans(Vec2::new(-0.32_f64, 0.11), Vec2::new(0.77, -0.45), 0.1);
        assert_eq!(spans.first().unwrap().enter, 0.0);
        assert_eq!(spans.last().unwrap().exit, 1.0);
        for w in spans.windows(2) {
            assert_eq!(w[0].exit, w[1].enter);
        }
    }

    #[test]
    fn degenerate_segment_reports_its_cell() {
        assert_eq!(cells((0.15, 0.25), (0.15, 0.25), 0.1), vec![(1, 2)]);
    }
}
