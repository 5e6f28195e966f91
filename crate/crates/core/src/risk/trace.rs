use std::collections::HashSet;

use crate::error::RiskError;
use crate::geom::CellIndex;
use crate::scalar::Real;

/// Cells discovered by the robot front at one abscissa, with the speed and
/// heading the robot has there.
#[derive(Clone, Debug)]
pub struct PathGroup<T> {
    /// Curvilinear abscissa of the front, meters from the start of the path.
    pub abscissa: T,
    /// Robot speed at this abscissa, m/s.
    pub speed: T,
    /// Robot heading at this abscissa, radians.
    pub heading: T,
    /// Cells newly swept at this abscissa, row-major.
    pub cells: Vec<CellIndex>,
}

/// Ordered sequence of cell groups swept by the robot front along a path.
///
/// Groups are ordered by strictly increasing abscissa, cells within a group
/// row-major, and no cell appears twice; the crossed area at a group is
/// `width * abscissa`.
#[derive(Clone, Debug)]
pub struct PathTrace<T> {
    width: T,
    groups: Vec<PathGroup<T>>,
}

impl<T: Real> PathTrace<T> {
    pub fn new(width: T, mut groups: Vec<PathGroup<T>>) -> Result<Self, RiskError> {
        if width <= T::zero() {
            return Err(RiskError::NonPositiveWidth);
        }
        let mut seen = HashSet::new();
        let mut last: Option<T> = None;
        for group in &mut groups {
            if let Some(prev) = last {
                if group.abscissa <= prev {
                    return Err(RiskError::NonIncreasingAbscissa);
                }
            }
            last = Some(group.abscissa);
            group.cells.sort();
            for &c in &group.cells {
                if !seen.insert(c) {
                    return Err(RiskError::DuplicateCell(c.x, c.y));
                }
            }
        }
        Ok(PathTrace { width, groups })
    }

    pub fn empty(width: T) -> Self {
        PathTrace {
            width,
            groups: Vec::new(),
        }
    }

    pub fn width(&self) -> T {
        self.width
    }

    pub fn groups(&self) -> &[PathGroup<T>] {
        &self.groups
    }

    pub fn is_empty(&self) -> bool {
        self.groups.iter().all(|g| g.cells.is_empty())
    }

    /// Area crossed when the front reaches a group.
    pub fn crossed_area(&self, group: &PathGroup<T>) -> T {
        self.width * group.abscissa
    }

    /// All cells in evaluation order with their group index.
    pub fn iter_cells(&self) -> impl Iterator<Item = (usize, CellIndex)> + '_ {
        self.groups
            .iter()
            .enumerate()
            .flat_map(|(i, g)| g.cells.iter().map(move |&c| (i, c)))
    }

    pub fn cell_count(&self) -> usize {
        self.groups.iter().map(|g| g.cells.len()).sum()
    }
}
