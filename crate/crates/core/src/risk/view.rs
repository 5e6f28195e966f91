use crate::field::{LambdaGrid, SensorTrust};
use crate::geom::CellIndex;
use crate::risk::mass::{MassPdf, MassTable};
use crate::scalar::Real;

/// Read-only view of a field snapshot as risk evaluation needs it: point and
/// interval intensities, obstacle normals and mass distributions per cell.
pub trait IntensityView<T: Real> {
    fn cell_area(&self) -> T;
    fn lambda(&self, cell: CellIndex) -> T;
    /// Lower and upper confidence bounds.
    fn lambda_bounds(&self, cell: CellIndex) -> (T, T);
    fn normal(&self, cell: CellIndex) -> Option<T>;
    fn mass_pdf(&self, cell: CellIndex) -> &MassPdf<T>;
}

/// Snapshot of a lambda grid together with the sensor trust and the mass
/// table labels resolve through.
pub struct FieldSnapshot<'a, T> {
    pub grid: &'a LambdaGrid<T>,
    pub trust: SensorTrust<T>,
    pub masses: &'a MassTable<T>,
}

impl<'a, T: Real> IntensityView<T> for FieldSnapshot<'a, T> {
    fn cell_area(&self) -> T {
        self.grid.config.cell_area()
    }

    fn lambda(&self, cell: CellIndex) -> T {
        self.grid.lambda_at(cell)
    }

    fn lambda_bounds(&self, cell: CellIndex) -> (T, T) {
        self.grid.bounds_at(cell, &self.trust)
    }

    fn normal(&self, cell: CellIndex) -> Option<T> {
        self.grid.normal_at(cell)
    }

    fn mass_pdf(&self, cell: CellIndex) -> &MassPdf<T> {
        match self.grid.cell(cell) {
            Some(state) => self.masses.get(state.mass_label),
            None => self.masses.get(None),
        }
    }
}

/// Fixed-value cell entry of a [`SyntheticField`].
#[derive(Clone, Debug)]
pub struct SyntheticCell<T> {
    pub lambda: T,
    pub lower: T,
    pub upper: T,
    pub normal: Option<T>,
    pub pdf: Option<MassPdf<T>>,
}

impl<T: Real> SyntheticCell<T> {
    /// Exact intensity with a collapsed confidence interval and worst-case
    /// mass.
    pub fn exact(lambda: T) -> Self {
        SyntheticCell {
            lambda,
            lower: lambda,
            upper: lambda,
            normal: None,
            pdf: None,
        }
    }
}

/// Intensity view with directly assigned per-cell values. Used by tests and
/// oracles that need full control over the intensities rather than counter
/// states.
pub struct SyntheticField<T> {
    cell_area: T,
    cells: std::collections::HashMap<CellIndex, SyntheticCell<T>>,
    worst: MassPdf<T>,
}

impl<T: Real> SyntheticField<T> {
    pub fn new(cell_area: T) -> Self {
        SyntheticField {
            cell_area,
            cells: std::collections::HashMap::new(),
            worst: MassPdf::infinite(),
        }
    }

    pub fn set(&mut self, cell: CellIndex, entry: SyntheticCell<T>) -> &mut Self {
        self.cells.insert(cell, entry);
        self
    }
}

impl<T: Real> IntensityView<T> for SyntheticField<T> {
    fn cell_area(&self) -> T {
        self.cell_area
    }

    fn lambda(&self, cell: CellIndex) -> T {
        self.cells.get(&cell).map_or(T::zero(), |c| c.lambda)
    }

    fn lambda_bounds(&self, cell: CellIndex) -> (T, T) {
        self.cells
            .get(&cell)
            .map_or((T::zero(), T::zero()), |c| (c.lower, c.upper))
    }

    fn normal(&self, cell: CellIndex) -> Option<T> {
        self.cells.get(&cell).and_then(|c| c.normal)
    }

    fn mass_pdf(&self, cell: CellIndex) -> &MassPdf<T> {
        self.cells
            .get(&cell)
            .and_then(|c| c.pdf.as_ref())
            .unwrap_or(&self.worst)
    }
}
