//! Uniform periodic grid on `[0, 2π)` and nodal grid functions.
//!
//! Indices are 0-based; node `k` sits at `x_k = k·Δx` with `Δx = 2π/K`, and
//! every wraparound is taken modulo `K`.

use alloc::vec::Vec;
use core::f64::consts::TAU;
use core::ops::{Add, Index, Mul, Neg, Sub};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeriodicGrid {
    nodes: usize,
    dx: f64,
}

impl PeriodicGrid {
    pub fn new(nodes: usize) -> Result<Self> {
        if nodes < 2 {
            return Err(Error::InvalidGrid(nodes));
        }
        Ok(Self { nodes, dx: TAU / nodes as f64 })
    }

    /// Number of nodes `K`.
    #[inline]
    pub fn len(&self) -> usize {
        self.nodes
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        false
    }

    #[inline]
    pub fn dx(&self) -> f64 {
        self.dx
    }

    #[inline]
    pub fn node(&self, k: usize) -> f64 {
        k as f64 * self.dx
    }

    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.nodes).map(move |k| self.node(k))
    }

    /// Reduces any integer index to `0..K`.
    #[inline]
    pub fn wrap(&self, k: i64) -> usize {
        k.rem_euclid(self.nodes as i64) as usize
    }

    pub(crate) fn check_same(&self, other: &PeriodicGrid) -> Result<()> {
        if self.nodes == other.nodes {
            Ok(())
        } else {
            Err(Error::GridMismatch { left: self.nodes, right: other.nodes })
        }
    }
}

/// Nodal values `u_0, …, u_{K-1}` on a [`PeriodicGrid`].
///
/// Values are finite by construction. Arithmetic operators panic on grid
/// mismatch, like shape mismatches in array libraries; the checked pairing
/// is [`inner`].
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    grid: PeriodicGrid,
    values: Vec<f64>,
}

impl GridFunction {
    pub fn new(grid: PeriodicGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::LengthMismatch { expected: grid.len(), got: values.len() });
        }
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        Ok(Self { grid, values })
    }

    /// Builds a grid function from values known to be finite and of the right
    /// length (internal producers only).
    pub(crate) fn from_raw(grid: PeriodicGrid, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), grid.len());
        Self { grid, values }
    }

    pub fn zeros(grid: PeriodicGrid) -> Self {
        Self::constant(grid, 0.0)
    }

    pub fn constant(grid: PeriodicGrid, c: f64) -> Self {
        Self { grid, values: alloc::vec![c; grid.len()] }
    }

    /// Samples `f` at the grid nodes.
    pub fn from_fn(grid: PeriodicGrid, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new(grid, grid.nodes().map(f).collect())
    }

    #[inline]
    pub fn grid(&self) -> PeriodicGrid {
        self.grid
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.values.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    #[inline]
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    /// Value at any integer index, reduced modulo `K`.
    #[inline]
    pub fn at(&self, k: i64) -> f64 {
        self.values[self.grid.wrap(k)]
    }

    /// Pointwise image under `f`.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self::from_raw(self.grid, self.values.iter().map(|&v| f(v)).collect())
    }

    /// Pointwise combination with another grid function on the same grid.
    pub fn zip_map(&self, other: &GridFunction, f: impl Fn(f64, f64) -> f64) -> Self {
        assert_eq!(self.grid.len(), other.grid.len(), "grid mismatch");
        let values = self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect();
        Self::from_raw(self.grid, values)
    }

    /// Cyclic shift: `(shift(u, s))_k = u_{k+s}`.
    pub fn shift(&self, s: i64) -> Self {
        let k = self.len() as i64;
        Self::from_raw(self.grid, (0..k).map(|i| self.at(i + s)).collect())
    }

    pub fn sum(&self) -> f64 {
        self.values.iter().sum()
    }

    /// Plain Euclidean dot product `Σ u_k v_k` (no Δx weight).
    pub fn dot(&self, other: &GridFunction) -> f64 {
        assert_eq!(self.grid.len(), other.grid.len(), "grid mismatch");
        self.values.iter().zip(&other.values).map(|(a, b)| a * b).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(libm::fabs(*v)))
    }

    pub fn l1(&self) -> f64 {
        self.values.iter().map(|v| libm::fabs(*v)).sum()
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }
}

impl Index<usize> for GridFunction {
    type Output = f64;
    fn index(&self, k: usize) -> &f64 {
        &self.values[k]
    }
}

impl Add for &GridFunction {
    type Output = GridFunction;
    fn add(self, rhs: &GridFunction) -> GridFunction {
        self.zip_map(rhs, |a, b| a + b)
    }
}

impl Sub for &GridFunction {
    type Output = GridFunction;
    fn sub(self, rhs: &GridFunction) -> GridFunction {
        self.zip_map(rhs, |a, b| a - b)
    }
}

impl Mul<f64> for &GridFunction {
    type Output = GridFunction;
    fn mul(self, c: f64) -> GridFunction {
        self.map(|v| v * c)
    }
}

impl Neg for &GridFunction {
    type Output = GridFunction;
    fn neg(self) -> GridFunction {
        self.map(|v| -v)
    }
}

/// Discrete L² pairing `Δx Σ u_k v_k`.
pub fn inner(u: &GridFunction, v: &GridFunction) -> Result<f64> {
    u.grid.check_same(&v.grid)?;
    Ok(u.grid.dx() * u.dot(v))
}

/// `(1/K) Σ u_k`.
pub fn mean(u: &GridFunction) -> f64 {
    u.sum() / u.len() as f64
}

/// Orthogonal projection onto zero-mean vectors, `u - mean(u)·1`.
pub fn project_zero_mean(u: &GridFunction) -> GridFunction {
    let m = mean(u);
    u.map(|v| v - m)
}
