//! The 6×6 partition of the wide camera's image.

use crate::{Error, Result};

/// Cells per axis.
pub const GRID: usize = 6;

/// Cell index: `col` counts from the left, `row` from the top.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Region {
    pub col: usize,
    pub row: usize,
}

impl Region {
    pub fn new(col: usize, row: usize) -> Result<Self> {
        if col >= GRID || row >= GRID {
            return Err(Error::invalid(format!(
                "region ({col}, {row}) is off the grid"
            )));
        }
        Ok(Self { col, row })
    }

    /// All 36 cells in row-major order.
    pub fn all() -> impl Iterator<Item = Region> {
        (0..GRID).flat_map(|row| (0..GRID).map(move |col| Region { col, row }))
    }
}

/// Pixel `x` belongs to column `floor(6x / W)`, so column `i` starts at
/// `ceil(i W / 6)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FovPartition {
    width: usize,
    height: usize,
    col_starts: [usize; GRID + 1],
    row_starts: [usize; GRID + 1],
}

fn starts(len: usize) -> [usize; GRID + 1] {
    std::array::from_fn(|i| (i * len).div_ceil(GRID))
}

impl FovPartition {
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    /// Half-open pixel bounds `(x0, y0, x1, y1)` of a cell.
    pub fn cell_bounds(&self, r: Region) -> (usize, usize, usize, usize) {
        (
            self.col_starts[r.col],
            self.row_starts[r.row],
            self.col_starts[r.col + 1],
            self.row_starts[r.row + 1],
        )
    }

    /// Cell center in continuous image coordinates, `((i + ½) W / 6, (j + ½) H / 6)`.
    pub fn cell_center(&self, r: Region) -> (f64, f64) {
        (
            (r.col as f64 + 0.5) * self.width as f64 / GRID as f64,
            (r.row as f64 + 0.5) * self.height as f64 / GRID as f64,
        )
    }
}

pub fn partition_fov(width: usize, height: usize) -> Result<FovPartition> {
    if width < GRID || height < GRID {
        return Err(Error::invalid(format!(
            "{width}x{height} is too small to split into {GRID}x{GRID} cells"
        )));
    }
    Ok(FovPartition {
        width,
        height,
        col_starts: starts(width),
        row_starts: starts(height),
    })
}

/// Cell containing pixel coordinates `(x, y)`, which may be fractional.
/// Points on the right or bottom edge belong to the last cell.
pub fn locate_region(x: f64, y: f64, part: &FovPartition) -> Result<Region> {
    let (w, h) = (part.width as f64, part.height as f64);
    if !(0.0..=w).contains(&x) || !(0.0..=h).contains(&y) {
        return Err(Error::invalid(format!(
            "point ({x}, {y}) is outside the {}x{} image",
            part.width, part.height
        )));
    }
    let cell = |v: f64, len: f64| ((GRID as f64 * v / len).floor() as usize).min(GRID - 1);
    Ok(Region {
        col: cell(x, w),
        row: cell(y, h),
    })
}
