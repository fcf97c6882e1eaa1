//! Uniform grids and the CSV export shared by the reference solvers.

use std::io::Write;

use crate::error::{Error, Result};

/// Uniform 1D grid including both endpoints.
#[derive(Debug, Clone)]
pub struct Grid1D {
    pub lo: f64,
    pub hi: f64,
    pub n: usize,
}

impl Grid1D {
    pub fn new(lo: f64, hi: f64, n: usize) -> Result<Grid1D> {
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(Error::SolverInput(format!("bad interval [{lo}, {hi}]")));
        }
        if n < 3 {
            return Err(Error::SolverInput(format!(
                "grid needs at least 3 points, got {n}"
            )));
        }
        Ok(Grid1D { lo, hi, n })
    }

    pub fn h(&self) -> f64 {
        (self.hi - self.lo) / (self.n - 1) as f64
    }

    pub fn x(&self, i: usize) -> f64 {
        self.lo + self.h() * i as f64
    }
}

/// Uniform tensor grid on a rectangle, both boundaries included.
/// Node (i, j) is at index j·nx + i: the x index varies fastest.
#[derive(Debug, Clone)]
pub struct Grid2D {
    pub xs: Grid1D,
    pub ys: Grid1D,
}

impl Grid2D {
    pub fn new(rect: [f64; 4], nx: usize, ny: usize) -> Result<Grid2D> {
        Ok(Grid2D {
            xs: Grid1D::new(rect[0], rect[1], nx)?,
            ys: Grid1D::new(rect[2], rect[3], ny)?,
        })
    }

    pub fn nx(&self) -> usize {
        self.xs.n
    }

    pub fn ny(&self) -> usize {
        self.ys.n
    }

    pub fn idx(&self, i: usize, j: usize) -> usize {
        j * self.nx() + i
    }

    /// Maps an interior node to its unknown index in row-major interior
    /// ordering (x fastest), the ordering every banded system here uses.
    pub fn interior_idx(&self, i: usize, j: usize) -> usize {
        debug_assert!(i >= 1 && i < self.nx() - 1 && j >= 1 && j < self.ny() - 1);
        (j - 1) * (self.nx() - 2) + (i - 1)
    }

    pub fn n_interior(&self) -> usize {
        (self.nx() - 2) * (self.ny() - 2)
    }
}

/// Writes a 1D profile as `x,y,value` rows with y pinned to 0, matching
/// the plane export shape so downstream tooling reads both.
pub fn write_csv_1d(out: &mut dyn Write, grid: &Grid1D, values: &[f64]) -> Result<()> {
    if values.len() != grid.n {
        return Err(Error::SolverInput(format!(
            "value count {} does not match grid size {}",
            values.len(),
            grid.n
        )));
    }
    writeln!(out, "x,y,value")?;
    for (i, v) in values.iter().enumerate() {
        writeln!(out, "{:.17e},{:.17e},{:.17e}", grid.x(i), 0.0, v)?;
    }
    Ok(())
}

/// Writes a plane field as `x,y,value` rows, row-major: the outer loop
/// walks y, the inner loop walks x.
pub fn write_csv_2d(out: &mut dyn Write, grid: &Grid2D, values: &[f64]) -> Result<()> {
    if values.len() != grid.nx() * grid.ny() {
        return Err(Error::SolverInput(format!(
            "value count {} does not match grid size {}",
            values.len(),
            grid.nx() * grid.ny()
        )));
    }
    writeln!(out, "x,y,value")?;
    for j in 0..grid.ny() {
        for i in 0..grid.nx() {
            writeln!(
                out,
                "{:.17e},{:.17e},{:.17e}",
                grid.xs.x(i),
                grid.ys.x(j),
                values[grid.idx(i, j)]
            )?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_spacing_and_layout() {
        let g = Grid2D::new([0.0, 1.0, 2.0, 4.0], 5, 3).unwrap();
        assert!((g.xs.h() - 0.25).abs() < 1e-15);
        assert!((g.ys.h() - 1.0).abs() < 1e-15);
        assert_eq!(g.idx(0, 0), 0);
        assert_eq!(g.idx(4, 0), 4);
        assert_eq!(g.idx(0, 1), 5);
        assert_eq!(g.interior_idx(1, 1), 0);
        assert_eq!(g.interior_idx(3, 1), 2);
        assert_eq!(g.n_interior(), 3);
    }

    #[test]
    fn rejects_degenerate_grids() {
        assert!(Grid1D::new(1.0, 1.0, 5).is_err());
        assert!(Grid1D::new(0.0, 1.0, 2).is_err());
        assert!(Grid2D::new([0.0, 1.0, 1.0, 0.0], 5, 5).is_err());
    }

    #[test]
    fn csv_rows_walk_x_fastest() {
        let g = Grid2D::new([0.0, 2.0, 0.0, 2.0], 3, 3).unwrap();
        let values: Vec<f64> = (1..=9).map(f64::from).collect();
        let mut buf = Vec::new();
        write_csv_2d(&mut buf, &g, &values).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "x,y,value");
        assert_eq!(lines.len(), 10);
        // Second data row is (x=1, y=0) with value 2: x varies first.
        assert!(lines[2].starts_with("1.0"));
        assert!(lines[2].ends_with("2.00000000000000000e0"));
        // Row 4 starts the y=1 stripe at x=0 with value 4.
        assert!(lines[4].contains(",1.00000000000000000e0,"));
        assert!(lines[4].ends_with("4.00000000000000000e0"));
    }
}
