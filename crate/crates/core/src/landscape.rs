//! Two-axis slices through the objective, for plotting fitness landscapes and
//! counting their local minima.

use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::objective::Objective;
use crate::space::{ShapeVector, SpaceSpec};

/// How the components off the two sliced axes are set.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum SliceFill {
    /// Every remaining component is `-(x_i + x_j) / (n - 2)`, restoring the
    /// zero sum.
    EqualSplit,
    /// Remaining components take these values, in axis order.
    Fixed(Vec<f64>),
}

impl SliceFill {
    pub fn name(&self) -> &'static str {
        match self {
            SliceFill::EqualSplit => "equal_split",
            SliceFill::Fixed(_) => "fixed",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SliceCell {
    pub xi: f64,
    pub xj: f64,
    /// `None` when the filled vector is infeasible.
    pub f: Option<f64>,
}

/// Cells in row-major order: `x_i` is the outer (slow) coordinate.
#[derive(Debug, Clone, PartialEq)]
pub struct SliceTable {
    /// 0-based.
    pub axis_i: usize,
    /// 0-based.
    pub axis_j: usize,
    pub resolution: usize,
    pub fill: SliceFill,
    pub cells: Vec<SliceCell>,
}

impl SliceTable {
    pub fn cell(&self, row: usize, col: usize) -> &SliceCell {
        &self.cells[row * self.resolution + col]
    }
}

/// Evenly spaced coordinates from `-bound` to `bound` inclusive.
pub fn slice_coordinates(bound: f64, resolution: usize) -> Vec<f64> {
    (0..resolution)
        .map(|k| {
            let t = k as f64 / (resolution - 1) as f64;
            -bound * (1.0 - t) + bound * t
        })
        .collect()
}

fn check_axes(space: &SpaceSpec, axis_i: usize, axis_j: usize, fill: &SliceFill) -> Result<()> {
    if axis_i == axis_j {
        return Err(Error::Contract("axes must differ".into()));
    }
    if axis_i >= space.n || axis_j >= space.n {
        return Err(Error::Contract(format!(
            "axes ({axis_i}, {axis_j}) out of range for dimension {}",
            space.n
        )));
    }
    match fill {
        SliceFill::EqualSplit if space.n == 2 => Err(Error::Contract(
            "equal-split fill needs at least one component off the sliced axes".into(),
        )),
        SliceFill::Fixed(v) if v.len() != space.n - 2 => Err(Error::Contract(format!(
            "fixed fill needs {} values, got {}",
            space.n - 2,
            v.len()
        ))),
        _ => Ok(()),
    }
}

/// The full vector for the cell `(xi, xj)` under `fill` (not checked for
/// feasibility).
pub fn fill_vector(
    space: &SpaceSpec,
    axis_i: usize,
    axis_j: usize,
    xi: f64,
    xj: f64,
    fill: &SliceFill,
) -> Result<ShapeVector> {
    check_axes(space, axis_i, axis_j, fill)?;
    let split = -(xi + xj) / (space.n - 2).max(1) as f64;
    let mut rest = 0;
    let v: Vec<f64> = (0..space.n)
        .map(|k| {
            if k == axis_i {
                xi
            } else if k == axis_j {
                xj
            } else {
                let value = match fill {
                    SliceFill::EqualSplit => split,
                    SliceFill::Fixed(vals) => vals[rest],
                };
                rest += 1;
                value
            }
        })
        .collect();
    Ok(v.into())
}

/// Evaluates a `resolution x resolution` grid over `(x_i, x_j) in [-bound, bound]^2`.
pub fn slice_grid<O: Objective + ?Sized>(
    space: &SpaceSpec,
    obj: &mut O,
    axis_i: usize,
    axis_j: usize,
    resolution: usize,
    fill: &SliceFill,
) -> Result<SliceTable> {
    space.validate()?;
    check_axes(space, axis_i, axis_j, fill)?;
    if resolution < 2 {
        return Err(Error::Contract(format!(
            "resolution must be >= 2, got {resolution}"
        )));
    }
    let coords = slice_coordinates(space.bound, resolution);
    let mut cells = Vec::with_capacity(resolution * resolution);
    for &xi in &coords {
        for &xj in &coords {
            let v = fill_vector(space, axis_i, axis_j, xi, xj, fill)?;
            let f = if space.is_feasible(&v)? {
                Some(obj.evaluate(&v)?.value())
            } else {
                None
            };
            cells.push(SliceCell { xi, xj, f });
        }
    }
    Ok(SliceTable {
        axis_i,
        axis_j,
        resolution,
        fill: fill.clone(),
        cells,
    })
}

/// Present cells strictly lower than every present 8-neighbour.
pub fn count_local_minima(table: &SliceTable) -> usize {
    let r = table.resolution as isize;
    let mut count = 0;
    for row in 0..r {
        for col in 0..r {
            let Some(f) = table.cell(row as usize, col as usize).f else {
                continue;
            };
            let mut is_min = true;
            'scan: for dr in -1..=1 {
                for dc in -1..=1 {
                    let (nr, nc) = (row + dr, col + dc);
                    if (dr == 0 && dc == 0) || nr < 0 || nc < 0 || nr >= r || nc >= r {
                        continue;
                    }
                    if let Some(g) = table.cell(nr as usize, nc as usize).f {
                        if g <= f {
                            is_min = false;
                            break 'scan;
                        }
                    }
                }
            }
            if is_min {
                count += 1;
            }
        }
    }
    count
}
