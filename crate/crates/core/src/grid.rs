//! Periodic-channel MAC grid and the field containers that live on it.
//!
//! Layout (row-major, `j` is the wall-normal row):
//! - scalars at cell centers `((i + 1/2) dx, (j + 1/2) dy)`, `nx * ny` values;
//! - `u_x` on vertical faces `(i dx, (j + 1/2) dy)`, `nx * ny` values, periodic in `i`;
//! - `u_y` on horizontal faces `((i + 1/2) dx, j dy)`, `nx * (ny + 1)` values, rows
//!   `j = 0` and `j = ny` are the walls and must stay zero.

use std::fmt;
use std::sync::Arc;

use crate::error::{ChnsError, Result};
use crate::spectral::Plans;

#[derive(Clone)]
pub struct Grid {
    nx: usize,
    ny: usize,
    lx: f64,
    ly: f64,
    plans: Arc<Plans>,
}

impl fmt::Debug for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Grid")
            .field("nx", &self.nx)
            .field("ny", &self.ny)
            .field("lx", &self.lx)
            .field("ly", &self.ly)
            .finish()
    }
}

impl PartialEq for Grid {
    fn eq(&self, other: &Self) -> bool {
        self.nx == other.nx && self.ny == other.ny && self.lx == other.lx && self.ly == other.ly
    }
}

impl Grid {
    pub fn new(nx: usize, ny: usize, lx: f64, ly: f64) -> Result<Self> {
        if nx < 4 || ny < 4 {
            return Err(ChnsError::InvalidGrid(format!(
                "need nx >= 4 and ny >= 4, got {nx} x {ny}"
            )));
        }
        if !nx.is_multiple_of(2) {
            return Err(ChnsError::InvalidGrid(format!("nx must be even, got {nx}")));
        }
        if !(lx > 0.0 && ly > 0.0 && lx.is_finite() && ly.is_finite()) {
            return Err(ChnsError::InvalidGrid(format!(
                "domain lengths must be positive, got {lx} x {ly}"
            )));
        }
        Ok(Self {
            nx,
            ny,
            lx,
            ly,
            plans: Arc::new(Plans::new(nx, ny)),
        })
    }

    /// Square `n x n` grid on the unit square.
    pub fn unit(n: usize) -> Result<Self> {
        Self::new(n, n, 1.0, 1.0)
    }

    pub fn nx(&self) -> usize {
        self.nx
    }
    pub fn ny(&self) -> usize {
        self.ny
    }
    pub fn lx(&self) -> f64 {
        self.lx
    }
    pub fn ly(&self) -> f64 {
        self.ly
    }
    pub fn dx(&self) -> f64 {
        self.lx / self.nx as f64
    }
    pub fn dy(&self) -> f64 {
        self.ly / self.ny as f64
    }
    pub fn cell_area(&self) -> f64 {
        self.dx() * self.dy()
    }
    pub fn area(&self) -> f64 {
        self.lx * self.ly
    }
    pub(crate) fn plans(&self) -> &Plans {
        &self.plans
    }

    pub fn x_center(&self, i: usize) -> f64 {
        (i as f64 + 0.5) * self.dx()
    }
    pub fn y_center(&self, j: usize) -> f64 {
        (j as f64 + 0.5) * self.dy()
    }
    pub fn x_face(&self, i: usize) -> f64 {
        i as f64 * self.dx()
    }
    pub fn y_face(&self, j: usize) -> f64 {
        j as f64 * self.dy()
    }

    #[inline]
    pub(crate) fn im(&self, i: usize) -> usize {
        if i == 0 {
            self.nx - 1
        } else {
            i - 1
        }
    }
    #[inline]
    pub(crate) fn ip(&self, i: usize) -> usize {
        if i + 1 == self.nx {
            0
        } else {
            i + 1
        }
    }

    /// Smallest eigenvalue of the homogeneous-Dirichlet discrete vector Laplacian
    /// (the `u_y` node operator has the smallest wall-normal symbol).
    pub fn poincare_lambda1(&self) -> f64 {
        let dy = self.dy();
        2.0 / (dy * dy) * (1.0 - (std::f64::consts::PI / self.ny as f64).cos())
    }
}

/// Cell-centered scalar field.
#[derive(Clone, Debug, PartialEq)]
pub struct ScalarField {
    grid: Grid,
    values: Vec<f64>,
}

impl ScalarField {
    pub fn zeros(grid: &Grid) -> Self {
        Self {
            grid: grid.clone(),
            values: vec![0.0; grid.nx() * grid.ny()],
        }
    }

    pub fn constant(grid: &Grid, c: f64) -> Self {
        Self {
            grid: grid.clone(),
            values: vec![c; grid.nx() * grid.ny()],
        }
    }

    pub fn from_fn(grid: &Grid, f: impl Fn(f64, f64) -> f64) -> Self {
        let mut values = Vec::with_capacity(grid.nx() * grid.ny());
        for j in 0..grid.ny() {
            for i in 0..grid.nx() {
                values.push(f(grid.x_center(i), grid.y_center(j)));
            }
        }
        Self {
            grid: grid.clone(),
            values,
        }
    }

    pub fn from_vec(grid: &Grid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.nx() * grid.ny() {
            return Err(ChnsError::ShapeMismatch(format!(
                "scalar field needs {} values, got {}",
                grid.nx() * grid.ny(),
                values.len()
            )));
        }
        Ok(Self {
            grid: grid.clone(),
            values,
        })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }
    pub fn values(&self) -> &[f64] {
        &self.values
    }
    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }
    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.values[j * self.grid.nx() + i]
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self {
            grid: self.grid.clone(),
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn zip_with(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Self {
        debug_assert_eq!(self.grid, other.grid);
        Self {
            grid: self.grid.clone(),
            values: self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a + b)
    }
    pub fn sub(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a - b)
    }
    pub fn scale(&self, c: f64) -> Self {
        self.map(|v| c * v)
    }

    /// `self += c * other`
    pub fn axpy(&mut self, c: f64, other: &Self) {
        for (a, b) in self.values.iter_mut().zip(&other.values) {
            *a += c * b;
        }
    }

    /// Midpoint-quadrature inner product.
    pub fn dot(&self, other: &Self) -> f64 {
        self.values.iter().zip(&other.values).map(|(a, b)| a * b).sum::<f64>() * self.grid.cell_area()
    }

    pub(crate) fn check_grid(&self, grid: &Grid) -> Result<()> {
        if &self.grid != grid || self.values.len() != grid.nx() * grid.ny() {
            return Err(ChnsError::ShapeMismatch(format!(
                "scalar field on {:?} used with {:?}",
                self.grid, grid
            )));
        }
        Ok(())
    }
}

/// Face-staggered velocity field.
#[derive(Clone, Debug, PartialEq)]
pub struct VectorField {
    grid: Grid,
    ux: Vec<f64>,
    uy: Vec<f64>,
}

impl VectorField {
    pub fn zeros(grid: &Grid) -> Self {
        Self {
            grid: grid.clone(),
            ux: vec![0.0; grid.nx() * grid.ny()],
            uy: vec![0.0; grid.nx() * (grid.ny() + 1)],
        }
    }

    /// Samples `f` at the face locations; the wall rows of `u_y` are forced to zero.
    pub fn from_fn(grid: &Grid, f: impl Fn(f64, f64) -> (f64, f64)) -> Self {
        let (nx, ny) = (grid.nx(), grid.ny());
        let mut out = Self::zeros(grid);
        for j in 0..ny {
            for i in 0..nx {
                out.ux[j * nx + i] = f(grid.x_face(i), grid.y_center(j)).0;
            }
        }
        for j in 1..ny {
            for i in 0..nx {
                out.uy[j * nx + i] = f(grid.x_center(i), grid.y_face(j)).1;
            }
        }
        out
    }

    /// Builds a field from raw component arrays, rejecting nonzero wall-normal rows.
    pub fn from_components(grid: &Grid, ux: Vec<f64>, uy: Vec<f64>) -> Result<Self> {
        let (nx, ny) = (grid.nx(), grid.ny());
        if ux.len() != nx * ny || uy.len() != nx * (ny + 1) {
            return Err(ChnsError::ShapeMismatch(format!(
                "velocity needs {} + {} values, got {} + {}",
                nx * ny,
                nx * (ny + 1),
                ux.len(),
                uy.len()
            )));
        }
        let v = Self {
            grid: grid.clone(),
            ux,
            uy,
        };
        v.check_walls()?;
        Ok(v)
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }
    pub fn ux(&self) -> &[f64] {
        &self.ux
    }
    pub fn uy(&self) -> &[f64] {
        &self.uy
    }
    pub fn ux_mut(&mut self) -> &mut [f64] {
        &mut self.ux
    }
    /// Interior rows only are meant to be written; callers must keep wall rows zero.
    pub fn uy_mut(&mut self) -> &mut [f64] {
        &mut self.uy
    }

    #[inline]
    pub fn ux_at(&self, i: usize, j: usize) -> f64 {
        self.ux[j * self.grid.nx() + i]
    }
    #[inline]
    pub fn uy_at(&self, i: usize, j: usize) -> f64 {
        self.uy[j * self.grid.nx() + i]
    }

    pub fn wall_normal_max(&self) -> f64 {
        let (nx, ny) = (self.grid.nx(), self.grid.ny());
        self.uy[..nx]
            .iter()
            .chain(&self.uy[ny * nx..])
            .fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn check_walls(&self) -> Result<()> {
        let w = self.wall_normal_max();
        if w != 0.0 {
            return Err(ChnsError::WallNormalNonzero(w));
        }
        Ok(())
    }

    pub(crate) fn check_grid(&self, grid: &Grid) -> Result<()> {
        if &self.grid != grid {
            return Err(ChnsError::ShapeMismatch(format!(
                "vector field on {:?} used with {:?}",
                self.grid, grid
            )));
        }
        Ok(())
    }

    pub fn is_finite(&self) -> bool {
        self.ux.iter().chain(&self.uy).all(|v| v.is_finite())
    }

    pub fn max_abs(&self) -> f64 {
        self.ux.iter().chain(&self.uy).fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn zip_with(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Self {
        debug_assert_eq!(self.grid, other.grid);
        Self {
            grid: self.grid.clone(),
            ux: self.ux.iter().zip(&other.ux).map(|(&a, &b)| f(a, b)).collect(),
            uy: self.uy.iter().zip(&other.uy).map(|(&a, &b)| f(a, b)).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a + b)
    }
    pub fn sub(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a - b)
    }
    pub fn scale(&self, c: f64) -> Self {
        Self {
            grid: self.grid.clone(),
            ux: self.ux.iter().map(|v| c * v).collect(),
            uy: self.uy.iter().map(|v| c * v).collect(),
        }
    }

    pub fn axpy(&mut self, c: f64, other: &Self) {
        for (a, b) in self.ux.iter_mut().zip(&other.ux) {
            *a += c * b;
        }
        for (a, b) in self.uy.iter_mut().zip(&other.uy) {
            *a += c * b;
        }
    }

    /// Face-weighted inner product (each face carries one cell area).
    pub fn dot(&self, other: &Self) -> f64 {
        let sx: f64 = self.ux.iter().zip(&other.ux).map(|(a, b)| a * b).sum();
        let sy: f64 = self.uy.iter().zip(&other.uy).map(|(a, b)| a * b).sum();
        (sx + sy) * self.grid.cell_area()
    }
}

/// Tangential velocity on the two walls, sampled at the `u_x` face abscissae `i dx`.
#[derive(Clone, Debug, PartialEq)]
pub struct WallTrace {
    pub bottom: Vec<f64>,
    pub top: Vec<f64>,
}

impl WallTrace {
    pub fn zeros(nx: usize) -> Self {
        Self {
            bottom: vec![0.0; nx],
            top: vec![0.0; nx],
        }
    }

    pub fn uniform(nx: usize, bottom: f64, top: f64) -> Self {
        Self {
            bottom: vec![bottom; nx],
            top: vec![top; nx],
        }
    }

    pub fn scale(&self, c: f64) -> Self {
        Self {
            bottom: self.bottom.iter().map(|v| c * v).collect(),
            top: self.top.iter().map(|v| c * v).collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.bottom.iter().chain(&self.top).all(|&v| v == 0.0)
    }
}
