use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{ConfigError, Result};

/// Uniform periodic grid in R (bohr) with wavenumbers in standard FFT order.
#[derive(Debug, Clone, PartialEq)]
pub struct SpatialGrid {
    r_min: f64,
    r_max: f64,
    n: usize,
    dr: f64,
    k: Vec<f64>,
}

pub const MIN_GRID_POINTS: usize = 64;

impl SpatialGrid {
    /// Builds a grid over `[r_min, r_max)` with `n` points, `n` a power of two
    /// and at least [`MIN_GRID_POINTS`].
    pub fn new(r_min: f64, r_max: f64, n: usize) -> Result<Self> {
        Self::with_floor(r_min, r_max, n, MIN_GRID_POINTS)
    }

    pub(crate) fn with_floor(r_min: f64, r_max: f64, n: usize, floor: usize) -> Result<Self> {
        if !(r_min.is_finite() && r_max.is_finite()) || r_max <= r_min {
            return Err(ConfigError::Invalid(format!(
                "grid requires r_max > r_min (got r_min = {r_min}, r_max = {r_max})"
            ))
            .into());
        }
        if !n.is_power_of_two() || n < floor {
            return Err(ConfigError::Invalid(format!(
                "grid point count must be a power of two >= {floor} (got {n})"
            ))
            .into());
        }
        let dr = (r_max - r_min) / n as f64;
        let span = n as f64 * dr;
        let k = (0..n)
            .map(|j| {
                let m = if j < n / 2 { j as f64 } else { j as f64 - n as f64 };
                2.0 * PI * m / span
            })
            .collect();
        Ok(Self {
            r_min,
            r_max,
            n,
            dr,
            k,
        })
    }

    pub fn r_min(&self) -> f64 {
        self.r_min
    }

    pub fn r_max(&self) -> f64 {
        self.r_max
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn dr(&self) -> f64 {
        self.dr
    }

    pub fn point(&self, j: usize) -> f64 {
        self.r_min + j as f64 * self.dr
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.n).map(|j| self.point(j)).collect()
    }

    pub fn wavenumbers(&self) -> &[f64] {
        &self.k
    }

    /// Largest representable |k|, π/dr.
    pub fn k_max(&self) -> f64 {
        PI / self.dr
    }

    /// True when both grids discretize the same interval with the same spacing.
    pub fn same_as(&self, other: &SpatialGrid) -> bool {
        self.n == other.n && self.r_min == other.r_min && self.dr == other.dr
    }
}

/// Kinetic propagator factors exp(−i k² dt / 2m), one per wavenumber.
pub fn kinetic_phase(grid: &SpatialGrid, mass: f64, dt: f64) -> Vec<Complex64> {
    grid.wavenumbers()
        .iter()
        .map(|&k| Complex64::from_polar(1.0, -k * k * dt / (2.0 * mass)))
        .collect()
}
