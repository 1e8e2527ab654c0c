//! The feasible design region: the zero-sum slice of the box `[-bound, bound]^n`.

use alloc::format;
use alloc::vec::Vec;
use core::ops::Deref;

use rand::Rng;

use crate::error::{Error, Result};

/// Maximum number of clamp/recenter rounds before [`SpaceSpec::repair`] falls
/// back to a fresh uniform sample.
pub const REPAIR_MAX_ITERATIONS: usize = 100;

/// A design vector of signed offsets in feet.
#[derive(Debug, Clone, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(transparent))]
pub struct ShapeVector(Vec<f64>);

impl ShapeVector {
    pub fn new(values: Vec<f64>) -> Self {
        ShapeVector(values)
    }

    pub fn zeros(n: usize) -> Self {
        ShapeVector(alloc::vec![0.0; n])
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    /// Left-to-right sum; the same summation order [`SpaceSpec::is_feasible`] uses.
    pub fn sum(&self) -> f64 {
        self.0.iter().fold(0.0, |acc, x| acc + x)
    }
}

impl Deref for ShapeVector {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl From<Vec<f64>> for ShapeVector {
    fn from(values: Vec<f64>) -> Self {
        ShapeVector(values)
    }
}

impl From<&[f64]> for ShapeVector {
    fn from(values: &[f64]) -> Self {
        ShapeVector(values.to_vec())
    }
}

/// Uniform lattice used by grid search: every axis takes the values
/// `anchor + j * step` that fall inside `[-bound, bound]`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct GridSpec {
    pub step: f64,
    pub anchor: f64,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            step: 1.6,
            anchor: 0.0,
        }
    }
}

impl GridSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.step.is_finite() && self.step > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "grid.step must be > 0, got {}",
                self.step
            )));
        }
        if !self.anchor.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "grid.anchor must be finite, got {}",
                self.anchor
            )));
        }
        Ok(())
    }

    /// Ascending per-axis values inside `[-bound, bound]`.
    pub fn axis_values(&self, bound: f64) -> Vec<f64> {
        let lo = libm::ceil((-bound - self.anchor) / self.step) as i64;
        let hi = libm::floor((bound - self.anchor) / self.step) as i64;
        // Widen by one on each side and filter, so rounding in the division
        // can neither drop nor admit a value.
        (lo - 1..=hi + 1)
            .map(|j| self.anchor + j as f64 * self.step)
            .filter(|v| v.abs() <= bound)
            .collect()
    }
}

/// Dimension, bounds and tolerances of the design space.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SpaceSpec {
    pub n: usize,
    /// Half-width of the box, feet.
    pub bound: f64,
    /// Absolute tolerance on `|sum(x)|`, feet.
    pub zero_sum_tol: f64,
    pub grid: GridSpec,
}

impl Default for SpaceSpec {
    fn default() -> Self {
        SpaceSpec::new(4, 11.5, GridSpec::default())
    }
}

impl SpaceSpec {
    /// Space with the default zero-sum tolerance `1e-9 * n * bound`.
    pub fn new(n: usize, bound: f64, grid: GridSpec) -> Self {
        SpaceSpec {
            n,
            bound,
            zero_sum_tol: Self::default_zero_sum_tol(n, bound),
            grid,
        }
    }

    pub fn default_zero_sum_tol(n: usize, bound: f64) -> f64 {
        1e-9 * n as f64 * bound
    }

    pub fn with_zero_sum_tol(mut self, tol: f64) -> Self {
        self.zero_sum_tol = tol;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::InvalidConfig(format!(
                "space.n must be >= 2, got {}",
                self.n
            )));
        }
        if !(self.bound.is_finite() && self.bound > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "space.bound must be > 0, got {}",
                self.bound
            )));
        }
        if !(self.zero_sum_tol.is_finite() && self.zero_sum_tol >= 0.0) {
            return Err(Error::InvalidConfig(format!(
                "space.zero_sum_tol must be >= 0, got {}",
                self.zero_sum_tol
            )));
        }
        self.grid.validate()
    }

    fn check_dim(&self, v: &[f64]) -> Result<()> {
        if v.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: v.len(),
            });
        }
        Ok(())
    }

    /// True iff `|sum(v)| <= zero_sum_tol` and every component is in `[-bound, bound]`.
    pub fn is_feasible(&self, v: &[f64]) -> Result<bool> {
        self.check_dim(v)?;
        Ok(self.feasible_unchecked(v))
    }

    fn feasible_unchecked(&self, v: &[f64]) -> bool {
        let mut sum = 0.0;
        for &x in v {
            if x.is_nan() || x.abs() > self.bound {
                return false;
            }
            sum += x;
        }
        sum.abs() <= self.zero_sum_tol
    }

    /// Draws a point uniformly from `{x : sum(x) = 0, |x_i| <= bound}`.
    ///
    /// The first `n - 1` components are free and uniform on the box; the last
    /// one closes the sum. That map has a constant Jacobian onto the polytope,
    /// so rejecting draws whose last component leaves the box is exactly
    /// uniform.
    pub fn sample_uniform<R: Rng + ?Sized>(&self, rng: &mut R) -> ShapeVector {
        let mut values = Vec::with_capacity(self.n);
        loop {
            values.clear();
            let mut partial = 0.0;
            for _ in 0..self.n - 1 {
                let x = rng.random_range(-self.bound..=self.bound);
                partial += x;
                values.push(x);
            }
            let last = -partial;
            if last.abs() <= self.bound {
                values.push(last);
                return ShapeVector(values);
            }
        }
    }

    /// Maps `v` back into the feasible region.
    ///
    /// Feasible inputs are returned unchanged. Otherwise alternately clamp to
    /// the box and subtract the mean, up to [`REPAIR_MAX_ITERATIONS`] rounds,
    /// then fall back to a uniform sample.
    pub fn repair<R: Rng + ?Sized>(&self, v: &[f64], rng: &mut R) -> Result<ShapeVector> {
        self.repair_with_limit(v, REPAIR_MAX_ITERATIONS, rng)
    }

    /// [`SpaceSpec::repair`] with an explicit round limit.
    pub fn repair_with_limit<R: Rng + ?Sized>(
        &self,
        v: &[f64],
        max_iterations: usize,
        rng: &mut R,
    ) -> Result<ShapeVector> {
        self.check_dim(v)?;
        if self.feasible_unchecked(v) {
            return Ok(ShapeVector(v.to_vec()));
        }
        let mut work = v.to_vec();
        for _ in 0..max_iterations {
            for x in work.iter_mut() {
                // NaN collapses to 0 so one bad gene cannot poison the mean.
                *x = if x.is_nan() {
                    0.0
                } else {
                    x.clamp(-self.bound, self.bound)
                };
            }
            let mean = work.iter().sum::<f64>() / self.n as f64;
            for x in work.iter_mut() {
                *x -= mean;
            }
            if self.feasible_unchecked(&work) {
                return Ok(ShapeVector(work));
            }
        }
        Ok(self.sample_uniform(rng))
    }

    /// Every feasible lattice point, in lexicographic order of components.
    pub fn grid_points(&self) -> Result<Vec<ShapeVector>> {
        let axis = self.grid.axis_values(self.bound);
        let mut out = Vec::new();
        if !axis.is_empty() {
            let lo = axis[0];
            let hi = axis[axis.len() - 1];
            let mut current = Vec::with_capacity(self.n);
            self.enumerate(&axis, lo, hi, 0.0, &mut current, &mut out);
        }
        if out.is_empty() {
            return Err(Error::EmptyGrid);
        }
        Ok(out)
    }

    fn enumerate(
        &self,
        axis: &[f64],
        lo: f64,
        hi: f64,
        partial: f64,
        current: &mut Vec<f64>,
        out: &mut Vec<ShapeVector>,
    ) {
        let depth = current.len();
        if depth + 1 == self.n {
            for &x in axis {
                current.push(x);
                if self.feasible_unchecked(current) {
                    out.push(ShapeVector(current.clone()));
                }
                current.pop();
            }
            return;
        }
        let remaining = (self.n - depth - 1) as f64;
        // Loose slack: pruning only skips branches that are infeasible by a
        // wide margin; the leaf check is authoritative.
        let slack = self.zero_sum_tol + 1e-6 * self.bound * self.n as f64;
        for &x in axis {
            let s = partial + x;
            if s + remaining * hi < -slack || s + remaining * lo > slack {
                continue;
            }
            current.push(x);
            self.enumerate(axis, lo, hi, s, current, out);
            current.pop();
        }
    }
}
