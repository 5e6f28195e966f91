use std::collections::HashSet;

use super::estimate::{confidence_bounds, lambda_of};
use super::{Beam, CellState, GridConfig, SensorTrust};
use crate::error::FieldError;
use crate::geom::{segment_spans, CellIndex, SegmentSpan, Vec2};
use crate::scalar::{cast, Real};

/// Placement of a grid in the world: cell size, extent, the world position of
/// the grid center and the sub-cell residual left over by recentering.
#[derive(Clone, Copy, Debug)]
pub struct GridGeometry<T> {
    pub cell_size: T,
    pub width: usize,
    pub height: usize,
    /// World position of the grid center.
    pub origin: Vec2<T>,
    /// Sub-cell displacement not yet absorbed into a whole-cell shift.
    pub offset: Vec2<T>,
}

impl<T: Real> GridGeometry<T> {
    pub fn new(cell_size: T, width: usize, height: usize, center: Vec2<T>) -> Self {
        GridGeometry {
            cell_size,
            width,
            height,
            origin: center,
            offset: Vec2::zero(),
        }
    }

    /// World coordinates of the lower-left corner of cell (0, 0).
    pub fn anchor(&self) -> Vec2<T> {
        let half_w = cast::<T>(self.width as f64 * 0.5) * self.cell_size;
        let half_h = cast::<T>(self.height as f64 * 0.5) * self.cell_size;
        Vec2::new(self.origin.x - half_w, self.origin.y - half_h)
    }

    pub fn contains(&self, cell: CellIndex) -> bool {
        cell.x >= 0
            && cell.y >= 0
            && (cell.x as usize) < self.width
            && (cell.y as usize) < self.height
    }

    pub fn linear(&self, cell: CellIndex) -> usize {
        debug_assert!(self.contains(cell));
        cell.y as usize * self.width + cell.x as usize
    }

    /// Cell containing a world point, which may lie outside the grid.
    pub fn cell_at(&self, p: Vec2<T>) -> CellIndex {
        let a = self.anchor();
        let fx = ((p.x - a.x) / self.cell_size).floor();
        let fy = ((p.y - a.y) / self.cell_size).floor();
        CellIndex::new(
            fx.to_i32().expect("cell index overflow"),
            fy.to_i32().expect("cell index overflow"),
        )
    }

    pub fn cell_center(&self, cell: CellIndex) -> Vec2<T> {
        let a = self.anchor();
        let half = cast::<T>(0.5);
        Vec2::new(
            a.x + (cast::<T>(cell.x as f64) + half) * self.cell_size,
            a.y + (cast::<T>(cell.y as f64) + half) * self.cell_size,
        )
    }

    /// Cells crossed by a world segment, in traversal order, grid coordinates.
    pub fn segment_spans_world(&self, from: Vec2<T>, to: Vec2<T>) -> Vec<SegmentSpan<T>> {
        let a = self.anchor();
        segment_spans(from - a, to - a, self.cell_size)
    }

    /// Absorbs a displacement: accumulates it into the sub-cell offset and
    /// returns the whole-cell shift (nearest-cell rounding) to apply to the
    /// stored cells. The residual offset stays below half a cell per axis.
    pub fn recenter(&mut self, displacement: Vec2<T>) -> (i32, i32) {
        let pending = self.offset + displacement;
        let sx = (pending.x / self.cell_size).round();
        let sy = (pending.y / self.cell_size).round();
        self.offset = Vec2::new(
            pending.x - sx * self.cell_size,
            pending.y - sy * self.cell_size,
        );
        self.origin = Vec2::new(
            self.origin.x + sx * self.cell_size,
            self.origin.y + sy * self.cell_size,
        );
        (
            sx.to_i32().expect("recenter shift overflow"),
            sy.to_i32().expect("recenter shift overflow"),
        )
    }
}

/// Shifts a dense row-major cell array by whole cells, resetting vacated
/// cells to the empty state.
pub(crate) fn shift_cells<C: Copy>(
    cells: &mut Vec<C>,
    width: usize,
    height: usize,
    shift: (i32, i32),
    empty: C,
) {
    if shift == (0, 0) {
        return;
    }
    let mut next = vec![empty; cells.len()];
    for y in 0..height as i32 {
        for x in 0..width as i32 {
            let sx = x + shift.0;
            let sy = y + shift.1;
            if sx >= 0 && sy >= 0 && (sx as usize) < width && (sy as usize) < height {
                next[y as usize * width + x as usize] = cells[sy as usize * width + sx as usize];
            }
        }
    }
    *cells = next;
}

/// Cells updated by one beam: clear traversals and, for hits, the
/// error-region cells. A cell both crossed and inside the error region only
/// counts as hit.
pub(crate) struct BeamCells {
    pub missed: Vec<CellIndex>,
    pub region: Vec<CellIndex>,
}

pub(crate) fn beam_cells<T: Real>(
    geom: &GridGeometry<T>,
    beam: &Beam<T>,
) -> Result<BeamCells, FieldError> {
    if beam.origin == beam.endpoint {
        return Err(FieldError::DegenerateBeam);
    }
    let crossed: Vec<CellIndex> = geom
        .segment_spans_world(beam.origin, beam.endpoint)
        .into_iter()
        .map(|s| s.cell)
        .collect();

    if !beam.hit {
        return Ok(BeamCells {
            missed: crossed,
            region: Vec::new(),
        });
    }

    let region = match &beam.error_cells {
        Some(cells) => {
            if cells.is_empty() {
                return Err(FieldError::EmptyErrorRegion);
            }
            if !cells.contains(&geom.cell_at(beam.endpoint)) {
                return Err(FieldError::RegionMissesEndpoint);
            }
            cells.clone()
        }
        None => error_region(geom, beam.endpoint, beam.error_area),
    };
    let in_region: HashSet<CellIndex> = region.iter().copied().collect();
    let missed = crossed
        .into_iter()
        .filter(|c| !in_region.contains(c))
        .collect();
    Ok(BeamCells { missed, region })
}

/// Snaps an axis-aligned square of the given area centered on a point to the
/// grid: the cells whose centers lie inside the square, always including the
/// cell containing the point itself.
fn error_region<T: Real>(geom: &GridGeometry<T>, point: Vec2<T>, area: T) -> Vec<CellIndex> {
    let half = area.sqrt() * cast(0.5);
    let a = geom.anchor();
    let s = geom.cell_size;
    let range = |p: T, base: T| {
        let lo = ((p - half - base) / s - cast(0.5)).ceil();
        let hi = ((p + half - base) / s - cast(0.5)).floor();
        (
            lo.to_i32().expect("error region overflow"),
            hi.to_i32().expect("error region overflow"),
        )
    };
    let (x0, x1) = range(point.x, a.x);
    let (y0, y1) = range(point.y, a.y);
    let mut cells = Vec::new();
    for y in y0..=y1 {
        for x in x0..=x1 {
            cells.push(CellIndex::new(x, y));
        }
    }
    let own = geom.cell_at(point);
    if !cells.contains(&own) {
        cells.push(own);
        cells.sort();
    }
    cells
}

/// Robot-centered field of per-cell collision intensities.
///
/// Mutation is single-writer: one integration or recenter at a time. All
/// reads are pure and safe to run concurrently on a snapshot.
#[derive(Clone, Debug)]
pub struct LambdaGrid<T> {
    pub config: GridConfig<T>,
    geom: GridGeometry<T>,
    cells: Vec<CellState<T>>,
}

impl<T: Real> LambdaGrid<T> {
    pub fn new(config: GridConfig<T>, center: Vec2<T>) -> Self {
        let geom = GridGeometry::new(config.cell_size, config.width, config.height, center);
        let cells = vec![CellState::default(); config.width * config.height];
        LambdaGrid { config, geom, cells }
    }

    pub fn geometry(&self) -> &GridGeometry<T> {
        &self.geom
    }

    pub fn cell(&self, cell: CellIndex) -> Option<&CellState<T>> {
        self.geom.contains(cell).then(|| &self.cells[self.geom.linear(cell)])
    }

    pub fn cell_mut(&mut self, cell: CellIndex) -> Option<&mut CellState<T>> {
        if self.geom.contains(cell) {
            let idx = self.geom.linear(cell);
            Some(&mut self.cells[idx])
        } else {
            None
        }
    }

    /// Point intensity estimate; out-of-grid cells are unmeasured and report
    /// zero.
    pub fn lambda_at(&self, cell: CellIndex) -> T {
        match self.cell(cell) {
            Some(state) => lambda_of(state, &self.config),
            None => T::zero(),
        }
    }

    /// Confidence bounds; out-of-grid cells carry the unmeasured prior
    /// `(0, lambda_max)`.
    pub fn bounds_at(&self, cell: CellIndex, trust: &SensorTrust<T>) -> (T, T) {
        match self.cell(cell) {
            Some(state) => confidence_bounds(state, trust, &self.config),
            None => (T::zero(), self.config.lambda_max),
        }
    }

    pub fn normal_at(&self, cell: CellIndex) -> Option<T> {
        self.cell(cell).and_then(|c| c.normal())
    }

    pub fn set_mass_label(&mut self, cell: CellIndex, label: u16) {
        if let Some(state) = self.cell_mut(cell) {
            state.mass_label = Some(label);
        }
    }

    /// Folds one beam into the counters. Cells crossed before the error
    /// region are misses; for a hit every error-region cell takes one hit
    /// weight. Cells outside the grid are skipped silently.
    pub fn integrate_beam(&mut self, beam: &Beam<T>) -> Result<(), FieldError> {
        let update = beam_cells(&self.geom, beam)?;
        for c in update.missed {
            if let Some(state) = self.cell_mut(c) {
                state.record_miss();
            }
        }
        let area = beam.error_area;
        for c in update.region {
            if let Some(state) = self.cell_mut(c) {
                state.record_hit(area);
            }
        }
        Ok(())
    }

    /// Probabilistic error-region variant: each candidate cell carries the
    /// probability of containing the obstacle and receives fractional hit and
    /// miss weight; crossed cells outside the candidate set are plain misses.
    pub fn integrate_beam_probabilistic(
        &mut self,
        beam: &Beam<T>,
        memberships: &[(CellIndex, T)],
    ) -> Result<(), FieldError> {
        if !beam.hit {
            return self.integrate_beam(beam);
        }
        if beam.origin == beam.endpoint {
            return Err(FieldError::DegenerateBeam);
        }
        let mut total = T::zero();
        for &(_, q) in memberships {
            if q < T::zero() || q > T::one() {
                return Err(FieldError::MembershipOutOfRange(
                    q.to_f64().unwrap_or(f64::NAN),
                ));
            }
            total = total + q;
        }
        if total <= T::zero() {
            return Err(FieldError::NoMembershipMass);
        }

        let candidates: HashSet<CellIndex> = memberships.iter().map(|&(c, _)| c).collect();
        let crossed = self.geom.segment_spans_world(beam.origin, beam.endpoint);
        for span in crossed {
            if !candidates.contains(&span.cell) {
                if let Some(state) = self.cell_mut(span.cell) {
                    state.record_miss();
                }
            }
        }
        let area = beam.error_area;
        for &(c, q) in memberships {
            if let Some(state) = self.cell_mut(c) {
                state.record_membership(q, area);
            }
        }
        Ok(())
    }

    /// Probability of at least one collision when sweeping the listed cells:
    /// `1 - exp(-cell_area * sum(lambda))`. Invariant under permutation and
    /// regrouping of the list.
    pub fn collision_probability(&self, cells: &[CellIndex]) -> T {
        let area = self.config.cell_area();
        let mut total = T::zero();
        for &c in cells {
            total = total + area * self.lambda_at(c);
        }
        T::one() - (-total).exp()
    }

    /// Shifts the grid so it stays centered on the robot. Whole-cell moves
    /// relocate the stored cells (vacated cells become unmeasured); the
    /// sub-cell residual accumulates so small displacements are never lost.
    pub fn recenter(&mut self, displacement: Vec2<T>) {
        let shift = self.geom.recenter(displacement);
        shift_cells(
            &mut self.cells,
            self.geom.width,
            self.geom.height,
            shift,
            CellState::default(),
        );
    }

    pub fn iter_cells(&self) -> impl Iterator<Item = (CellIndex, &CellState<T>)> {
        let width = self.geom.width;
        self.cells.iter().enumerate().map(move |(i, state)| {
            (
                CellIndex::new((i % width) as i32, (i / width) as i32),
                state,
            )
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    fn grid() -> LambdaGrid<f64> {
        LambdaGrid::new(GridConfig::standard(20, 20), Vec2::new(1.0, 1.0))
    }

    #[test]
    fn miss_beam_marks_every_crossed_cell() {
        let mut g = grid();
        // Anchor is (0,0); run through five cells of row 9.
        let beam = Beam::miss(Vec2::new(0.05, 0.95), Vec2::new(0.45, 0.95));
        g.integrate_beam(&beam).unwrap();
        for x in 0..5 {
            let c = g.cell(CellIndex::new(x, 9)).unwrap();
            assert_eq!(c.miss_weight, 1.0);
            assert_eq!(c.hit_weight, 0.0);
        }
        assert_eq!(g.cell(CellIndex::new(5, 9)).unwrap().miss_weight, 0.0);
    }

    #[test]
    fn single_cell_error_region_hit() {
        let mut g = grid();
        let beam = Beam::hit(Vec2::new(0.05, 0.95), Vec2::new(0.45, 0.95), 0.01);
        g.integrate_beam(&beam).unwrap();
        let c = g.cell(CellIndex::new(4, 9)).unwrap();
        assert_eq!(c.hit_weight, 1.0);
        assert_eq!(c.miss_weight, 0.0);
        assert_relative_eq!(c.inv_error_sum, 100.0, max_relative = 1e-12);
        // crossed cells before the region are misses
        assert_eq!(g.cell(CellIndex::new(3, 9)).unwrap().miss_weight, 1.0);
    }

    #[test]
    fn repeated_measurements_accumulate() {
        let mut g = grid();
        let miss = Beam::miss(Vec2::new(0.02, 0.55), Vec2::new(0.08, 0.55));
        let hit = Beam::hit(Vec2::new(0.02, 0.55), Vec2::new(0.08, 0.55), 0.01);
        for _ in 0..50 {
            g.integrate_beam(&miss).unwrap();
        }
        for _ in 0..50 {
            g.integrate_beam(&hit).unwrap();
        }
        let c = g.cell(CellIndex::new(0, 5)).unwrap();
        assert_eq!(c.hit_weight, 50.0);
        assert_eq!(c.miss_weight, 50.0);
    }

    #[test]
    fn degenerate_beam_is_rejected() {
        let mut g = grid();
        let p = Vec2::new(0.5, 0.5);
        assert_eq!(
            g.integrate_beam(&Beam::miss(p, p)),
            Err(FieldError::DegenerateBeam)
        );
    }

    #[test]
    fn error_region_of_one_cell_area_is_the_endpoint_cell() {
        let g = grid();
        let cells = error_region(g.geometry(), Vec2::new(0.43, 0.97), 0.01);
        assert_eq!(cells, vec![CellIndex::new(4, 9)]);
    }

    #[test]
    fn larger_error_region_covers_a_block() {
        let g = grid();
        let cells = error_region(g.geometry(), Vec2::new(0.43, 0.97), 0.04);
        assert_eq!(cells.len(), 4);
        assert!(cells.contains(&CellIndex::new(4, 9)));
    }

    #[test]
    fn probabilistic_unit_membership_matches_deterministic_exactly() {
        let mut a = grid();
        let mut b = grid();
        let beam = Beam::hit(Vec2::new(0.05, 0.95), Vec2::new(0.45, 0.95), 0.01);
        a.integrate_beam(&beam).unwrap();
        let region = vec![(CellIndex::new(4, 9), 1.0)];
        b.integrate_beam_probabilistic(&beam, &region).unwrap();
        for (ca, cb) in a.cells.iter().zip(b.cells.iter()) {
            assert_eq!(ca.hit_weight.to_bits(), cb.hit_weight.to_bits());
            assert_eq!(ca.miss_weight.to_bits(), cb.miss_weight.to_bits());
            assert_eq!(ca.inv_error_sum.to_bits(), cb.inv_error_sum.to_bits());
        }
    }

    #[test]
    fn split_membership_shares_the_weight() {
        let mut g = grid();
        let beam = Beam::hit(Vec2::new(0.05, 0.95), Vec2::new(0.45, 0.95), 0.01);
        let q = vec![
            (CellIndex::new(4, 9), 0.5),
            (CellIndex::new(5, 9), 0.5),
        ];
        g.integrate_beam_probabilistic(&beam, &q).unwrap();
        for c in [CellIndex::new(4, 9), CellIndex::new(5, 9)] {
            let state = g.cell(c).unwrap();
            assert_eq!(state.hit_weight, 0.5);
            assert_eq!(state.miss_weight, 0.5);
        }
    }

    #[test]
    fn zero_membership_hit_is_contradictory() {
        let mut g = grid();
        let beam = Beam::hit(Vec2::new(0.05, 0.95), Vec2::new(0.45, 0.95), 0.01);
        let q = vec![(CellIndex::new(4, 9), 0.0)];
        assert_eq!(
            g.integrate_beam_probabilistic(&beam, &q),
            Err(FieldError::NoMembershipMass)
        );
    }

    #[test]
    fn collision_probability_examples() {
        let mut g = grid();
        assert_eq!(
            g.collision_probability(&[CellIndex::new(1, 1), CellIndex::new(2, 2)]),
            0.0
        );
        // one cell at ln 2 / cell area => probability one half
        let target = CellIndex::new(3, 3);
        *g.cell_mut(target).unwrap() = CellState::with_counts(1.0, 1.0, 0.01);
        assert_relative_eq!(
            g.collision_probability(&[target]),
            0.5,
            max_relative = 1e-12
        );
    }

    #[test]
    fn recenter_identity_and_sub_cell_offsets() {
        let mut g = grid();
        let before = g.geometry().origin;
        g.recenter(Vec2::zero());
        assert_eq!(g.geometry().origin, before);
        assert_eq!(g.geometry().offset, Vec2::zero());

        g.recenter(Vec2::new(0.03, 0.0));
        assert_eq!(g.geometry().origin, before);
        assert_abs_diff_eq!(g.geometry().offset.x, 0.03, epsilon = 1e-15);

        g.recenter(Vec2::new(0.03, 0.0));
        assert_abs_diff_eq!(g.geometry().origin.x, before.x + 0.1, epsilon = 1e-15);
        assert_abs_diff_eq!(g.geometry().offset.x, -0.04, epsilon = 1e-12);
    }

    #[test]
    fn recenter_moves_cell_contents_with_the_world() {
        let mut g = grid();
        let p = Vec2::new(0.55, 0.55);
        let before = g.geometry().cell_at(p);
        g.cell_mut(before).unwrap().record_hit(0.01);
        g.recenter(Vec2::new(0.3, -0.2));
        let after = g.geometry().cell_at(p);
        assert_eq!(g.cell(after).unwrap().hit_weight, 1.0);
    }
}
