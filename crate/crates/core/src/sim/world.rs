use std::path::Path;

use crate::error::WorldError;
use crate::geom::{segment_spans, CellIndex, SegmentSpan, Vec2};
use crate::scalar::{cast, Real};

/// Ground truth of one world cell.
#[derive(Clone, Copy, Debug)]
pub struct GroundTruthCell<T> {
    /// Fraction of beam crossings this cell physically intercepts.
    pub fill_ratio: T,
    /// Index into the world's label list.
    pub label: u16,
    /// Reference surface normal, when the obstacle has a meaningful one.
    pub true_normal: Option<T>,
}

/// Static 2D world on the same tessellation as the mapped grids, anchored at
/// the origin: cell (0, 0) covers `[0, s) x [0, s)`.
#[derive(Clone, Debug)]
pub struct World<T> {
    cell_size: T,
    width: usize,
    height: usize,
    cells: Vec<GroundTruthCell<T>>,
    labels: Vec<String>,
}

struct CodeEntry<T> {
    code: char,
    fill: T,
    label: String,
    normal: Option<T>,
}

fn default_codes<T: Real>() -> Vec<CodeEntry<T>> {
    let entry = |code, fill: f64, label: &str| CodeEntry {
        code,
        fill: cast(fill),
        label: label.to_string(),
        normal: None,
    };
    vec![
        entry('.', 0.0, "free"),
        entry('#', 1.0, "wall"),
        entry('g', 0.3, "grass"),
        entry('b', 0.6, "bush"),
        entry('t', 1.0, "tree"),
        entry('f', 0.5, "fence"),
    ]
}

impl<T: Real> World<T> {
    /// Parses the world text format: `code <char> <fill> <label> <normal|->`
    /// header lines overriding the built-in codes, then a line `grid`
    /// followed by the rows, top row first.
    pub fn parse(text: &str, cell_size: T) -> Result<Self, WorldError> {
        let mut codes = default_codes::<T>();
        let mut rows: Vec<&str> = Vec::new();
        let mut in_grid = false;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim_end();
            if in_grid {
                if !line.is_empty() {
                    rows.push(line);
                }
                continue;
            }
            if line.trim().is_empty() {
                continue;
            }
            if line.trim() == "grid" {
                in_grid = true;
                continue;
            }
            let parts: Vec<&str> = line.split_whitespace().collect();
            let err = |reason: String| WorldError::Parse {
                line: lineno + 1,
                reason,
            };
            if parts.len() != 5 || parts[0] != "code" {
                return Err(err(format!(
                    "expected `code <char> <fill> <label> <normal|->`, got `{line}`"
                )));
            }
            let mut chars = parts[1].chars();
            let (Some(code), None) = (chars.next(), chars.next()) else {
                return Err(err(format!("code must be a single character: `{}`", parts[1])));
            };
            let fill: f64 = parts[2]
                .parse()
                .map_err(|_| err(format!("bad fill ratio `{}`", parts[2])))?;
            if !(0.0..=1.0).contains(&fill) {
                return Err(err(format!("fill ratio {fill} outside [0, 1]")));
            }
            let normal = match parts[4] {
                "-" => None,
                s => Some(cast::<T>(s.parse::<f64>().map_err(|_| {
                    err(format!("bad normal `{s}`"))
                })?)),
            };
            let entry = CodeEntry {
                code,
                fill: cast(fill),
                label: parts[3].to_string(),
                normal,
            };
            if let Some(existing) = codes.iter_mut().find(|c| c.code == code) {
                *existing = entry;
            } else {
                codes.push(entry);
            }
        }

        if rows.is_empty() {
            return Err(WorldError::Parse {
                line: 0,
                reason: "world has no grid rows".to_string(),
            });
        }
        let width = rows[0].chars().count();
        let height = rows.len();
        let mut labels: Vec<String> = Vec::new();
        let mut label_id = |name: &str| -> u16 {
            if let Some(i) = labels.iter().position(|l| l == name) {
                i as u16
            } else {
                labels.push(name.to_string());
                (labels.len() - 1) as u16
            }
        };
        let mut cells =
            vec![
                GroundTruthCell {
                    fill_ratio: T::zero(),
                    label: 0,
                    true_normal: None
                };
                width * height
            ];
        for (r, row) in rows.iter().enumerate() {
            if row.chars().count() != width {
                return Err(WorldError::Parse {
                    line: 0,
                    reason: format!("grid row {} has ragged width", r + 1),
                });
            }
            let y = height - 1 - r;
            for (x, ch) in row.chars().enumerate() {
                let entry = codes.iter().find(|c| c.code == ch).ok_or_else(|| {
                    WorldError::Parse {
                        line: 0,
                        reason: format!("unknown cell code `{ch}`"),
                    }
                })?;
                cells[y * width + x] = GroundTruthCell {
                    fill_ratio: entry.fill,
                    label: label_id(&entry.label),
                    true_normal: entry.normal,
                };
            }
        }
        Ok(World {
            cell_size,
            width,
            height,
            cells,
            labels,
        })
    }

    pub fn load(path: &Path, cell_size: T) -> Result<Self, WorldError> {
        let text = std::fs::read_to_string(path)?;
        World::parse(&text, cell_size)
    }

    pub fn cell_size(&self) -> T {
        self.cell_size
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    /// World extent, meters.
    pub fn size(&self) -> Vec2<T> {
        Vec2::new(
            cast::<T>(self.width as f64) * self.cell_size,
            cast::<T>(self.height as f64) * self.cell_size,
        )
    }

    pub fn contains_point(&self, p: Vec2<T>) -> bool {
        let s = self.size();
        p.x >= T::zero() && p.y >= T::zero() && p.x < s.x && p.y < s.y
    }

    fn cell(&self, c: CellIndex) -> Option<&GroundTruthCell<T>> {
        (c.x >= 0 && c.y >= 0 && (c.x as usize) < self.width && (c.y as usize) < self.height)
            .then(|| &self.cells[c.y as usize * self.width + c.x as usize])
    }

    /// Interception ratio; outside the world everything is free.
    pub fn fill_ratio(&self, c: CellIndex) -> T {
        self.cell(c).map_or(T::zero(), |g| g.fill_ratio)
    }

    pub fn label_name(&self, c: CellIndex) -> Option<&str> {
        self.cell(c).map(|g| self.labels[g.label as usize].as_str())
    }

    pub fn true_normal(&self, c: CellIndex) -> Option<T> {
        self.cell(c).and_then(|g| g.true_normal)
    }

    pub fn cell_at(&self, p: Vec2<T>) -> CellIndex {
        CellIndex::new(
            (p.x / self.cell_size).floor().to_i32().expect("world index"),
            (p.y / self.cell_size).floor().to_i32().expect("world index"),
        )
    }

    pub fn cell_center(&self, c: CellIndex) -> Vec2<T> {
        let half = cast::<T>(0.5);
        Vec2::new(
            (cast::<T>(c.x as f64) + half) * self.cell_size,
            (cast::<T>(c.y as f64) + half) * self.cell_size,
        )
    }

    /// Traversal of a world segment; the world is anchored at the origin.
    pub fn segment_spans(&self, a: Vec2<T>, b: Vec2<T>) -> Vec<SegmentSpan<T>> {
        segment_spans(a, b, self.cell_size)
    }

    /// All cells carrying the given label.
    pub fn cells_with_label(&self, label: &str) -> Vec<CellIndex> {
        let Some(id) = self.labels.iter().position(|l| l == label) else {
            return Vec::new();
        };
        let id = id as u16;
        self.cells
            .iter()
            .enumerate()
            .filter(|(_, g)| g.label == id)
            .map(|(i, _)| CellIndex::new((i % self.width) as i32, (i / self.width) as i32))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const WORLD: &str = "\
code g 0.25 grass -
grid
.#.
.g.
...
";

    #[test]
    fn parses_rows_top_down() {
        let w: World<f64> = World::parse(WORLD, 0.1).unwrap();
        assert_eq!(w.width(), 3);
        assert_eq!(w.height(), 3);
        // '#' is in the top row => y = 2
        assert_eq!(w.fill_ratio(CellIndex::new(1, 2)), 1.0);
        // grass override
        assert_eq!(w.fill_ratio(CellIndex::new(1, 1)), 0.25);
        assert_eq!(w.label_name(CellIndex::new(1, 1)), Some("grass"));
        assert_eq!(w.fill_ratio(CellIndex::new(0, 0)), 0.0);
        // outside is free
        assert_eq!(w.fill_ratio(CellIndex::new(-1, 0)), 0.0);
    }

    #[test]
    fn rejects_unknown_codes_and_ragged_rows() {
        assert!(World::<f64>::parse("grid\n.q.\n", 0.1).is_err());
        assert!(World::<f64>::parse("grid\n...\n..\n", 0.1).is_err());
    }
}
