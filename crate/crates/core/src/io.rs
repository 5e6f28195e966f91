//! Map export and import: binary PGM images and CSV cell dumps.

use std::io::{self, BufRead, Write};

use crate::baseline::BayesGrid;
use crate::field::{CellState, GridConfig, LambdaGrid, SensorTrust};
use crate::geom::{CellIndex, Vec2};
use crate::scalar::{cast, Real};

/// FNV-1a over raw bytes; used for the scenario-hash comment in output files.
pub fn fnv1a(bytes: &[u8]) -> u64 {
    let mut hash: u64 = 0xcbf29ce484222325;
    for &b in bytes {
        hash ^= b as u64;
        hash = hash.wrapping_mul(0x100000001b3);
    }
    hash
}

fn write_pgm<W, F>(w: &mut W, width: usize, height: usize, mut value: F) -> io::Result<()>
where
    W: Write,
    F: FnMut(usize, usize) -> u8,
{
    write!(w, "P5\n{} {}\n255\n", width, height)?;
    let mut row = vec![0u8; width];
    // row 0 of the image is the top of the map
    for y in (0..height).rev() {
        for (x, px) in row.iter_mut().enumerate() {
            *px = value(x, y);
        }
        w.write_all(&row)?;
    }
    Ok(())
}

fn byte_of<T: Real>(p: T) -> u8 {
    let v = (cast::<T>(255.0) * p).round();
    v.to_u8().unwrap_or(if v > T::zero() { 255 } else { 0 })
}

/// P5 image of the per-cell collision probability `1 - exp(-area * lambda)`.
pub fn write_lambda_pgm<T: Real, W: Write>(grid: &LambdaGrid<T>, w: &mut W) -> io::Result<()> {
    let area = grid.config.cell_area();
    write_pgm(w, grid.config.width, grid.config.height, |x, y| {
        let lambda = grid.lambda_at(CellIndex::new(x as i32, y as i32));
        byte_of(T::one() - (-area * lambda).exp())
    })
}

/// P5 image of the occupancy probabilities.
pub fn write_bayes_pgm<T: Real, W: Write>(grid: &BayesGrid<T>, w: &mut W) -> io::Result<()> {
    write_pgm(w, grid.config.width, grid.config.height, |x, y| {
        byte_of(grid.occupancy(CellIndex::new(x as i32, y as i32)))
    })
}

fn write_comment<W: Write>(w: &mut W, comment: Option<&str>) -> io::Result<()> {
    if let Some(c) = comment {
        writeln!(w, "# {c}")?;
    }
    Ok(())
}

/// Cell dump: counters, intensity estimate, bounds and normal per cell.
pub fn write_lambda_csv<T: Real, W: Write>(
    grid: &LambdaGrid<T>,
    trust: &SensorTrust<T>,
    w: &mut W,
    comment: Option<&str>,
) -> io::Result<()> {
    write_comment(w, comment)?;
    writeln!(w, "x_index,y_index,h,m,lambda,lambda_low,lambda_high,normal")?;
    for (cell, state) in grid.iter_cells() {
        let (low, high) = grid.bounds_at(cell, trust);
        let normal = match state.normal() {
            Some(n) => format!("{n}"),
            None => "NaN".to_string(),
        };
        writeln!(
            w,
            "{},{},{},{},{},{},{},{}",
            cell.x,
            cell.y,
            state.hit_weight,
            state.miss_weight,
            grid.lambda_at(cell),
            low,
            high,
            normal
        )?;
    }
    Ok(())
}

/// Occupancy dump of the Bayesian grid.
pub fn write_bayes_csv<T: Real, W: Write>(
    grid: &BayesGrid<T>,
    w: &mut W,
    comment: Option<&str>,
) -> io::Result<()> {
    write_comment(w, comment)?;
    writeln!(w, "x_index,y_index,log_odds,occupancy")?;
    for (cell, log_odds) in grid.iter_cells() {
        writeln!(
            w,
            "{},{},{},{}",
            cell.x,
            cell.y,
            log_odds,
            crate::baseline::occupancy_from_log_odds(log_odds)
        )?;
    }
    Ok(())
}

/// Rebuilds a grid from its CSV dump. Counters are restored exactly; the
/// normal column folds back in as a single observation.
pub fn read_lambda_csv<T: Real, R: BufRead>(
    r: R,
    config: GridConfig<T>,
    center: Vec2<T>,
) -> io::Result<LambdaGrid<T>> {
    let mut grid = LambdaGrid::new(config, center);
    for line in r.lines() {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') || trimmed.starts_with("x_index") {
            continue;
        }
        let fields: Vec<&str> = trimmed.split(',').collect();
        if fields.len() != 8 {
            return Err(io::Error::new(
                io::ErrorKind::InvalidData,
                format!("expected 8 columns, got {}", fields.len()),
            ));
        }
        let parse = |s: &str| -> io::Result<f64> {
            s.parse()
                .map_err(|e| io::Error::new(io::ErrorKind::InvalidData, format!("{e}: `{s}`")))
        };
        let cell = CellIndex::new(parse(fields[0])? as i32, parse(fields[1])? as i32);
        let h = parse(fields[2])?;
        let m = parse(fields[3])?;
        let normal = parse(fields[7])?;
        if let Some(state) = grid.cell_mut(cell) {
            *state = CellState::with_counts(cast(h), cast(m), config.default_error_area);
            if normal.is_finite() {
                state.add_normal(cast(normal));
            }
        }
    }
    Ok(grid)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Beam;

    #[test]
    fn lambda_csv_round_trip_preserves_counters() {
        let config = GridConfig::standard(12, 12);
        let center = Vec2::new(0.6, 0.6);
        let mut grid = LambdaGrid::new(config, center);
        let trust = SensorTrust::new(0.99, 0.9999).unwrap();
        grid.integrate_beam(&Beam::hit(
            Vec2::new(0.05, 0.55),
            Vec2::new(0.85, 0.55),
            0.01,
        ))
        .unwrap();
        grid.cell_mut(CellIndex::new(8, 5)).unwrap().add_normal(0.4);

        let mut buf = Vec::new();
        write_lambda_csv(&grid, &trust, &mut buf, Some("scenario_hash=0xdead")).unwrap();
        let restored = read_lambda_csv(&buf[..], config, center).unwrap();

        for (cell, state) in grid.iter_cells() {
            let other = restored.cell(cell).unwrap();
            assert_eq!(state.hit_weight, other.hit_weight);
            assert_eq!(state.miss_weight, other.miss_weight);
            assert_eq!(restored.lambda_at(cell), grid.lambda_at(cell));
        }
        let normal: f64 = restored.normal_at(CellIndex::new(8, 5)).unwrap();
        assert!((normal - 0.4).abs() < 1e-12);
    }

    #[test]
    fn pgm_header_and_payload_size() {
        let config = GridConfig::standard(6, 4);
        let grid = LambdaGrid::<f64>::new(config, Vec2::zero());
        let mut buf = Vec::new();
        write_lambda_pgm(&grid, &mut buf).unwrap();
        let header = b"P5\n6 4\n255\n";
        assert_eq!(&buf[..header.len()], header);
        assert_eq!(buf.len(), header.len() + 24);
    }
}
