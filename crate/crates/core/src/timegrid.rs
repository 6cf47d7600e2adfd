//! Geometric time grids on `(0, T]` and step functions on the half line.
//!
//! A grid with edges `0 = e_0 < e_1 < ... < e_M = T` has cells `(e_{k-1}, e_k]`.
//! The sample time of cell `k` is its right edge `e_k` and its quadrature weight
//! is the width `e_k - e_{k-1}`.

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct TimeGrid {
    edges: Vec<f64>,
}

impl TimeGrid {
    /// Geometric grid: the first cell is `(0, first]`, the remaining `cells - 1`
    /// edges grow by a constant ratio up to `t_max`.
    pub fn geometric(t_max: f64, cells: usize, first: f64) -> Result<Self> {
        if cells == 0 {
            return Err(Error::EmptyTimeGrid);
        }
        if !(t_max > 0.0 && t_max.is_finite()) || !(first > 0.0) || (cells > 1 && first >= t_max) {
            return Err(Error::Parameter(format!(
                "geometric time grid needs 0 < first < T, got first={first}, T={t_max}"
            )));
        }
        let mut edges = Vec::with_capacity(cells + 1);
        edges.push(0.0);
        if cells == 1 {
            edges.push(t_max);
            return Ok(Self { edges });
        }
        let ratio = (t_max / first).ln() / (cells - 1) as f64;
        for k in 0..cells {
            edges.push(first * (ratio * k as f64).exp());
        }
        edges[cells] = t_max;
        Ok(Self { edges })
    }

    /// Default grid: `T = 64`, 512 cells, first cell `1e-5`.
    pub fn standard() -> Self {
        Self::geometric(64.0, 512, 1e-5).expect("valid defaults")
    }

    pub fn from_edges(edges: Vec<f64>) -> Result<Self> {
        if edges.len() < 2 {
            return Err(Error::EmptyTimeGrid);
        }
        if edges[0] != 0.0 || edges.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Parameter("time edges must start at 0 and increase".into()));
        }
        Ok(Self { edges })
    }

    /// Same span and first-cell-to-span ratio with twice the cells; the first cell
    /// is halved.
    pub fn refined(&self) -> Self {
        let first = self.edges[1] / 2.0;
        Self::geometric(self.t_max(), 2 * self.cells(), first).expect("refinement of valid grid")
    }

    /// Same cell count and first cell, span multiplied by `factor`.
    pub fn extended(&self, factor: f64) -> Result<Self> {
        Self::geometric(self.t_max() * factor, self.cells(), self.edges[1])
    }

    pub fn cells(&self) -> usize {
        self.edges.len() - 1
    }

    pub fn edges(&self) -> &[f64] {
        &self.edges
    }

    /// Sample times `e_1, ..., e_M`.
    pub fn times(&self) -> &[f64] {
        &self.edges[1..]
    }

    pub fn weights(&self) -> Vec<f64> {
        self.edges.windows(2).map(|w| w[1] - w[0]).collect()
    }

    pub fn width(&self, k: usize) -> f64 {
        self.edges[k + 1] - self.edges[k]
    }

    pub fn t_max(&self) -> f64 {
        *self.edges.last().expect("non-empty")
    }

    /// Midpoint of cell `k`.
    pub fn midpoint(&self, k: usize) -> f64 {
        0.5 * (self.edges[k] + self.edges[k + 1])
    }
}

/// Non-negative step function on `(0, T]`, extended by zero beyond `T`.
#[derive(Debug, Clone, PartialEq)]
pub struct HalfLineFunction {
    grid: TimeGrid,
    values: Vec<f64>,
}

impl HalfLineFunction {
    pub fn new(grid: TimeGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.cells() {
            return Err(Error::Parameter(format!(
                "expected {} cell values, got {}",
                grid.cells(),
                values.len()
            )));
        }
        if values.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(Error::Parameter(
                "half-line values must be finite and non-negative".into(),
            ));
        }
        Ok(Self { grid, values })
    }

    pub fn constant(grid: TimeGrid, c: f64) -> Result<Self> {
        let n = grid.cells();
        Self::new(grid, vec![c; n])
    }

    /// Cell averages of `f` computed from its values at cell midpoints.
    pub fn from_midpoints<F: Fn(f64) -> f64>(grid: TimeGrid, f: F) -> Result<Self> {
        let values = (0..grid.cells()).map(|k| f(grid.midpoint(k))).collect();
        Self::new(grid, values)
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn times(&self) -> &[f64] {
        self.grid.times()
    }

    pub fn weights(&self) -> Vec<f64> {
        self.grid.weights()
    }

    /// `∫_0^{e_k} f` for every edge index `k = 0..=M`.
    pub fn cumulative(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.values.len() + 1);
        let mut acc = 0.0;
        out.push(0.0);
        for (k, v) in self.values.iter().enumerate() {
            acc += v * self.grid.width(k);
            out.push(acc);
        }
        out
    }

    pub fn add(&self, other: &HalfLineFunction) -> Result<Self> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch(
                "half-line functions on different time grids".into(),
            ));
        }
        Self::new(
            self.grid.clone(),
            self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect(),
        )
    }
}
