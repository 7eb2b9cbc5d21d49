use num_complex::Complex64;

use crate::error::{Error, Result};

/// Uniform grid `x_j = x_min + j·h`, `j = 0..n_points`, both ends included.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub x_min: f64,
    pub x_max: f64,
    pub n_points: usize,
}

impl Grid {
    pub fn new(x_min: f64, x_max: f64, n_points: usize) -> Result<Self> {
        if !(x_min.is_finite() && x_max.is_finite()) {
            return Err(Error::NanInput("Grid::new"));
        }
        if n_points < 2 || x_max <= x_min {
            return Err(Error::Grid(format!(
                "need n_points >= 2 and x_max > x_min, got {n_points} on [{x_min}, {x_max}]"
            )));
        }
        Ok(Grid { x_min, x_max, n_points })
    }

    /// Grid with spacing `h` starting at `x_min`.
    pub fn with_spacing(x_min: f64, h: f64, n_points: usize) -> Result<Self> {
        Self::new(x_min, x_min + h * (n_points - 1) as f64, n_points)
    }

    pub fn spacing(&self) -> f64 {
        (self.x_max - self.x_min) / (self.n_points - 1) as f64
    }

    pub fn x(&self, j: usize) -> f64 {
        self.x_min + j as f64 * self.spacing()
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.n_points).map(|j| self.x(j)).collect()
    }
}

/// Grid plus the time step and δ-regularization width of a grid solver.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub grid: Grid,
    pub dt: f64,
    pub regularization_width: f64,
}

impl GridSpec {
    /// Checks `dt > 0` and that the regularized δ is resolved (`σ ≥ 2h`).
    pub fn new(grid: Grid, dt: f64, regularization_width: f64) -> Result<Self> {
        if !(dt.is_finite() && dt > 0.0) {
            return Err(Error::Grid(format!("time step must be positive, got {dt}")));
        }
        if !(regularization_width >= 2.0 * grid.spacing()) {
            return Err(Error::Grid(format!(
                "regularization width {regularization_width} is below two grid spacings ({})",
                2.0 * grid.spacing()
            )));
        }
        Ok(GridSpec { grid, dt, regularization_width })
    }
}

/// Sampled multi-channel field; `psi[j][c]` is channel `c` at grid point `j`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridState {
    pub grid: Grid,
    pub psi: Vec<Vec<Complex64>>,
    pub t: f64,
}

impl GridState {
    pub fn new(grid: Grid, psi: Vec<Vec<Complex64>>, t: f64) -> Result<Self> {
        if psi.len() != grid.n_points {
            return Err(Error::Grid(format!(
                "field has {} samples for {} grid points",
                psi.len(),
                grid.n_points
            )));
        }
        let n = psi.first().map_or(0, Vec::len);
        if n == 0 || psi.iter().any(|p| p.len() != n) {
            return Err(Error::Grid("every sample needs the same nonzero number of channels".into()));
        }
        if psi.iter().flatten().any(|z| !z.is_finite()) {
            return Err(Error::Grid("field contains non-finite values".into()));
        }
        Ok(GridState { grid, psi, t })
    }

    /// Samples `f` on the grid.
    pub fn sample(grid: Grid, t: f64, f: impl Fn(f64) -> Vec<Complex64>) -> Result<Self> {
        Self::new(grid, grid.points().into_iter().map(f).collect(), t)
    }

    pub fn n_levels(&self) -> usize {
        self.psi[0].len()
    }

    pub fn channel(&self, c: usize) -> Vec<Complex64> {
        self.psi.iter().map(|p| p[c]).collect()
    }

    /// `h·Σ|ψ|²` per channel.
    pub fn channel_norms(&self) -> Vec<f64> {
        let h = self.grid.spacing();
        (0..self.n_levels())
            .map(|c| h * self.psi.iter().map(|p| p[c].norm_sqr()).sum::<f64>())
            .collect()
    }

    pub fn norm(&self) -> f64 {
        self.channel_norms().iter().sum()
    }
}

/// `‖a − b‖ / ‖b‖` of two sampled curves.
pub fn relative_l2(a: &[f64], b: &[f64]) -> f64 {
    let num: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum();
    let den: f64 = b.iter().map(|y| y * y).sum();
    (num / den).sqrt()
}
