//! Uniform grids, cell-wise constant signals and the discrete BV calculus on them.
//!
//! A grid splits `(a, b)` into `n` cells of width `h`. Signals hold one value per
//! cell. The discrete derivative `Du` is the array of neighbour differences
//! `d_i = u_{i+1} - u_i` and lives on the `n - 1` interior edges. Node `k` sits at
//! `a + k h` for `k = 0..=n`; interior edge `i` (zero based) is node `i + 1`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Uniform partition of `(a, b)` into `n >= 2` cells.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    a: f64,
    b: f64,
    n: usize,
    h: f64,
}

impl Grid {
    pub fn new(a: f64, b: f64, n: usize) -> Result<Self> {
        if !(a.is_finite() && b.is_finite()) {
            return Err(Error::InvalidGrid(format!("endpoints must be finite, got ({a}, {b})")));
        }
        if a >= b {
            return Err(Error::InvalidGrid(format!("need a < b, got a = {a}, b = {b}")));
        }
        if n < 2 {
            return Err(Error::InvalidGrid(format!("need at least 2 cells, got {n}")));
        }
        Ok(Self { a, b, n, h: (b - a) / n as f64 })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    /// Number of cells.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Cell width.
    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn length(&self) -> f64 {
        self.b - self.a
    }

    /// Number of interior edges, `n - 1`.
    pub fn n_edges(&self) -> usize {
        self.n - 1
    }

    /// Centre of cell `j` (zero based).
    pub fn center(&self, j: usize) -> f64 {
        self.a + (j as f64 + 0.5) * self.h
    }

    pub fn centers(&self) -> Vec<f64> {
        (0..self.n).map(|j| self.center(j)).collect()
    }

    /// Coordinate of node `k`, `0 <= k <= n`.
    pub fn node(&self, k: usize) -> f64 {
        if k == self.n {
            self.b
        } else {
            self.a + k as f64 * self.h
        }
    }

    /// Coordinate of interior edge `i` (zero based), i.e. node `i + 1`.
    pub fn edge(&self, i: usize) -> f64 {
        self.node(i + 1)
    }

    pub fn edges(&self) -> Vec<f64> {
        (0..self.n_edges()).map(|i| self.edge(i)).collect()
    }

    /// Index of the interior edge closest to `x`.
    pub fn nearest_edge(&self, x: f64) -> usize {
        let k = ((x - self.a) / self.h).round();
        (k.max(1.0) as usize).min(self.n - 1) - 1
    }

    /// Index of the cell containing `x` (clamped to the grid).
    pub fn cell_of(&self, x: f64) -> usize {
        let j = ((x - self.a) / self.h).floor();
        (j.max(0.0) as usize).min(self.n - 1)
    }

    pub fn same_as(&self, other: &Grid) -> bool {
        self.n == other.n && self.a == other.a && self.b == other.b
    }

    pub(crate) fn check_same(&self, other: &Grid) -> Result<()> {
        if self.same_as(other) {
            Ok(())
        } else {
            Err(Error::GridMismatch)
        }
    }
}

/// Convenience constructor mirroring `Grid::new`.
pub fn make_grid(a: f64, b: f64, n: usize) -> Result<Grid> {
    Grid::new(a, b, n)
}

/// Cell-wise constant signal on a grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Signal {
    grid: Grid,
    values: Vec<f64>,
}

impl Signal {
    pub fn new(grid: Grid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.n() {
            return Err(Error::LengthMismatch { expected: grid.n(), got: values.len() });
        }
        if let Some((index, &value)) = values.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(Error::NonFinite { index, value });
        }
        Ok(Self { grid, values })
    }

    pub fn constant(grid: Grid, value: f64) -> Result<Self> {
        Self::new(grid, vec![value; grid.n()])
    }

    pub fn zeros(grid: Grid) -> Self {
        Self { grid, values: vec![0.0; grid.n()] }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Edge differences `d_i = u_{i+1} - u_i`, length `n - 1`.
    pub fn differences(&self) -> Vec<f64> {
        self.values.windows(2).map(|w| w[1] - w[0]).collect()
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn range(&self) -> f64 {
        self.max() - self.min()
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Mean with respect to the cell measure.
    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    pub fn scaled(&self, s: f64) -> Result<Signal> {
        Signal::new(self.grid, self.values.iter().map(|v| s * v).collect())
    }

    pub fn add(&self, other: &Signal) -> Result<Signal> {
        self.grid.check_same(&other.grid)?;
        Signal::new(self.grid, self.values.iter().zip(&other.values).map(|(x, y)| x + y).collect())
    }

    /// Max-norm distance to another signal on the same grid.
    pub fn distance(&self, other: &Signal) -> Result<f64> {
        self.grid.check_same(&other.grid)?;
        Ok(self.values.iter().zip(&other.values).fold(0.0, |m, (x, y)| m.max((x - y).abs())))
    }

    /// Max-norm distance ignoring the listed cells.
    pub fn distance_excluding(&self, other: &Signal, skip: &[usize]) -> Result<f64> {
        self.grid.check_same(&other.grid)?;
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .enumerate()
            .filter(|(j, _)| !skip.contains(j))
            .fold(0.0, |m, (_, (x, y))| m.max((x - y).abs())))
    }
}

/// Samples `spec` at the cell centres.
pub fn sample<F: Fn(f64) -> f64>(grid: &Grid, spec: F) -> Result<Signal> {
    Signal::new(*grid, grid.centers().into_iter().map(spec).collect())
}

/// Discrete total variation `sum |u_{i+1} - u_i|`.
pub fn total_variation(u: &Signal) -> f64 {
    u.values.windows(2).map(|w| (w[1] - w[0]).abs()).sum()
}

/// Default threshold separating genuine jumps from rounding noise:
/// `10 sqrt(eps) (max u - min u)`.
pub fn default_jump_threshold(u: &Signal) -> f64 {
    10.0 * f64::EPSILON.sqrt() * u.range()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Jump {
    pub edge: usize,
    pub location: f64,
    pub jump: f64,
    pub magnitude: f64,
}

/// Discrete jump set: edges whose difference exceeds a threshold.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JumpReport {
    pub threshold: f64,
    pub jumps: Vec<Jump>,
}

impl JumpReport {
    pub fn is_empty(&self) -> bool {
        self.jumps.is_empty()
    }

    pub fn len(&self) -> usize {
        self.jumps.len()
    }

    pub fn edges(&self) -> Vec<usize> {
        self.jumps.iter().map(|j| j.edge).collect()
    }
}

pub fn jump_set(u: &Signal, threshold: f64) -> JumpReport {
    let grid = u.grid();
    let jumps = u
        .differences()
        .into_iter()
        .enumerate()
        .filter(|(_, d)| d.abs() > threshold)
        .map(|(edge, jump)| Jump { edge, location: grid.edge(edge), jump, magnitude: jump.abs() })
        .collect();
    JumpReport { threshold, jumps }
}
