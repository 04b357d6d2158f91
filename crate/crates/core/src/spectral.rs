//! Fast trigonometric transforms on the channel grid.
//!
//! The x direction is a plain complex DFT. The y direction uses one of three
//! real transforms built on a length-`2 ny` FFT:
//! - `Cos`: DCT-II on cell centers (homogeneous Neumann, modes `k = 0..ny`),
//! - `SinCell`: DST-II on cell centers (homogeneous Dirichlet at the wall faces, `k = 1..=ny`),
//! - `SinNode`: DST-I on interior face rows `j = 1..ny` (`k = 1..ny`).
//!
//! Every y-mode is an eigenvector of the matching 3-point second difference with
//! eigenvalue `-(2/dy^2)(1 - cos(pi k / ny))`.

use std::f64::consts::PI;
use std::sync::Arc;

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{ChnsError, Result};
use crate::grid::{Grid, ScalarField, VectorField};

pub(crate) struct Plans {
    fft_x: Arc<dyn Fft<f64>>,
    ifft_x: Arc<dyn Fft<f64>>,
    fft_y: Arc<dyn Fft<f64>>,
    ifft_y: Arc<dyn Fft<f64>>,
}

impl Plans {
    pub(crate) fn new(nx: usize, ny: usize) -> Self {
        let mut planner = FftPlanner::new();
        Self {
            fft_x: planner.plan_fft_forward(nx),
            ifft_x: planner.plan_fft_inverse(nx),
            fft_y: planner.plan_fft_forward(2 * ny),
            ifft_y: planner.plan_fft_inverse(2 * ny),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum YKind {
    Cos,
    SinCell,
    SinNode,
}

impl YKind {
    pub(crate) fn rows(self, ny: usize) -> usize {
        match self {
            YKind::Cos | YKind::SinCell => ny,
            YKind::SinNode => ny - 1,
        }
    }

    /// Wavenumber `k` of coefficient row `r`.
    pub(crate) fn k_of(self, r: usize) -> usize {
        match self {
            YKind::Cos => r,
            YKind::SinCell | YKind::SinNode => r + 1,
        }
    }
}

/// Spectral coefficients, `rows x nx`, row `r` is y-mode `kind.k_of(r)`, column `c`
/// is the DFT bin of signed wavenumber `signed_m(c)`.
pub(crate) struct Coeffs {
    pub kind: YKind,
    pub nx: usize,
    pub data: Vec<Complex64>,
}

pub(crate) fn signed_m(c: usize, nx: usize) -> i64 {
    if c <= nx / 2 {
        c as i64
    } else {
        c as i64 - nx as i64
    }
}

/// Positive symbol of `-d^2/dx^2` on DFT bin `c`.
pub(crate) fn lambda_x(grid: &Grid, c: usize) -> f64 {
    let dx = grid.dx();
    2.0 / (dx * dx) * (1.0 - (2.0 * PI * c as f64 / grid.nx() as f64).cos())
}

/// Positive symbol of `-d^2/dy^2` on y-mode `k`.
pub(crate) fn lambda_y(grid: &Grid, k: usize) -> f64 {
    let dy = grid.dy();
    2.0 / (dy * dy) * (1.0 - (PI * k as f64 / grid.ny() as f64).cos())
}

fn run(fft: &Arc<dyn Fft<f64>>, buf: &mut [Complex64]) {
    let mut scratch = vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
    fft.process_with_scratch(buf, &mut scratch);
}

/// Forward transform of `kind.rows(ny)` rows of length `nx`.
pub(crate) fn forward(grid: &Grid, kind: YKind, data: &[f64]) -> Coeffs {
    let (nx, ny) = (grid.nx(), grid.ny());
    let rows = kind.rows(ny);
    debug_assert_eq!(data.len(), rows * nx);
    let n2 = 2 * ny;
    let zero = Complex64::new(0.0, 0.0);
    let mut ext = vec![zero; nx * n2];
    for i in 0..nx {
        let col = &mut ext[i * n2..(i + 1) * n2];
        match kind {
            YKind::Cos => {
                for j in 0..ny {
                    let v = data[j * nx + i];
                    col[j].re = v;
                    col[n2 - 1 - j].re = v;
                }
            }
            YKind::SinCell => {
                for j in 0..ny {
                    let v = data[j * nx + i];
                    col[j].re = v;
                    col[n2 - 1 - j].re = -v;
                }
            }
            YKind::SinNode => {
                for r in 0..rows {
                    let v = data[r * nx + i];
                    col[r + 1].re = v;
                    col[n2 - 1 - r].re = -v;
                }
            }
        }
    }
    run(&grid.plans().fft_y, &mut ext);

    let mut out = vec![zero; rows * nx];
    for i in 0..nx {
        let col = &ext[i * n2..(i + 1) * n2];
        for r in 0..rows {
            let k = kind.k_of(r);
            let y = col[k];
            let v = match kind {
                YKind::Cos => (Complex64::from_polar(1.0, -PI * k as f64 / n2 as f64) * y).re / 2.0,
                YKind::SinCell => -(Complex64::from_polar(1.0, -PI * k as f64 / n2 as f64) * y).im / 2.0,
                YKind::SinNode => -y.im / 2.0,
            };
            out[r * nx + i] = Complex64::new(v, 0.0);
        }
    }
    run(&grid.plans().fft_x, &mut out);
    Coeffs { kind, nx, data: out }
}

/// Inverse of [`forward`]; returns `kind.rows(ny)` real rows.
pub(crate) fn inverse(grid: &Grid, coeffs: Coeffs) -> Vec<f64> {
    let (nx, ny) = (grid.nx(), grid.ny());
    let kind = coeffs.kind;
    let rows = kind.rows(ny);
    let mut data = coeffs.data;
    run(&grid.plans().ifft_x, &mut data);
    let inv_nx = 1.0 / nx as f64;

    let n2 = 2 * ny;
    let zero = Complex64::new(0.0, 0.0);
    let mut ext = vec![zero; nx * n2];
    for i in 0..nx {
        let col = &mut ext[i * n2..(i + 1) * n2];
        for r in 0..rows {
            let k = kind.k_of(r);
            let x = data[r * nx + i].re * inv_nx;
            match kind {
                YKind::Cos => {
                    let y = Complex64::from_polar(2.0 * x, PI * k as f64 / n2 as f64);
                    col[k] = y;
                    if k > 0 {
                        col[n2 - k] = y.conj();
                    }
                }
                YKind::SinCell => {
                    let y = Complex64::new(0.0, -2.0 * x) * Complex64::from_polar(1.0, PI * k as f64 / n2 as f64);
                    if k == ny {
                        col[k] = Complex64::new(y.re, 0.0);
                    } else {
                        col[k] = y;
                        col[n2 - k] = y.conj();
                    }
                }
                YKind::SinNode => {
                    col[k] = Complex64::new(0.0, -2.0 * x);
                    col[n2 - k] = Complex64::new(0.0, 2.0 * x);
                }
            }
        }
    }
    run(&grid.plans().ifft_y, &mut ext);

    let scale = 1.0 / n2 as f64;
    let mut out = vec![0.0; rows * nx];
    for i in 0..nx {
        let col = &ext[i * n2..(i + 1) * n2];
        for r in 0..rows {
            let j = match kind {
                YKind::Cos | YKind::SinCell => r,
                YKind::SinNode => r + 1,
            };
            out[r * nx + i] = col[j].re * scale;
        }
    }
    out
}

/// Applies the real diagonal multiplier `m(c, k)` in transform space.
pub(crate) fn apply_symbol(grid: &Grid, kind: YKind, data: &[f64], symbol: impl Fn(usize, usize) -> f64) -> Vec<f64> {
    let mut coeffs = forward(grid, kind, data);
    let nx = coeffs.nx;
    for (idx, v) in coeffs.data.iter_mut().enumerate() {
        let (r, c) = (idx / nx, idx % nx);
        *v *= symbol(c, kind.k_of(r));
    }
    inverse(grid, coeffs)
}

/// Solves `(a - b Laplacian_N) s = rhs` with periodic x and homogeneous Neumann walls.
pub fn helmholtz_solve_neumann(rhs: &ScalarField, a: f64, b: f64) -> Result<ScalarField> {
    if !(a >= 0.0 && a.is_finite()) || !(b > 0.0 && b.is_finite()) {
        return Err(ChnsError::InvalidParameter(format!(
            "helmholtz coefficients need a >= 0, b > 0, got a = {a}, b = {b}"
        )));
    }
    let grid = rhs.grid();
    if a == 0.0 {
        let mean = rhs.mean();
        let scale = rhs.max_abs().max(1.0);
        let tol = 1e-10 * scale;
        if mean.abs() > tol {
            return Err(ChnsError::IncompatibleRhs { mean, tol });
        }
    }
    let out = apply_symbol(grid, YKind::Cos, rhs.values(), |c, k| {
        let den = a + b * (lambda_x(grid, c) + lambda_y(grid, k));
        if den == 0.0 {
            0.0
        } else {
            1.0 / den
        }
    });
    ScalarField::from_vec(grid, out)
}

/// Inverse of `-Laplacian_N` on zero-mean fields; the mean of `rhs` is discarded.
pub(crate) fn inverse_neg_laplacian(rhs: &ScalarField) -> ScalarField {
    let grid = rhs.grid();
    let out = apply_symbol(grid, YKind::Cos, rhs.values(), |c, k| {
        let den = lambda_x(grid, c) + lambda_y(grid, k);
        if c == 0 && k == 0 {
            0.0
        } else {
            1.0 / den
        }
    });
    ScalarField::from_vec(grid, out).expect("transform preserves shape")
}

/// Solves `(a - b Laplacian_0) w = f` componentwise for a velocity field with
/// homogeneous tangential Dirichlet data and zero normal wall rows.
pub(crate) fn vector_helmholtz_dirichlet(f: &VectorField, a: f64, b: f64) -> VectorField {
    let grid = f.grid();
    let (nx, ny) = (grid.nx(), grid.ny());
    let sym = |c: usize, k: usize| 1.0 / (a + b * (lambda_x(grid, c) + lambda_y(grid, k)));
    let ux = apply_symbol(grid, YKind::SinCell, f.ux(), sym);
    let inner = apply_symbol(grid, YKind::SinNode, &f.uy()[nx..ny * nx], sym);
    let mut uy = vec![0.0; nx * (ny + 1)];
    uy[nx..ny * nx].copy_from_slice(&inner);
    VectorField::from_components(grid, ux, uy).expect("transform preserves shape")
}

/// Zeroes every coefficient with `|m| > n_x` or `k >= n_y` (periodic modes in x,
/// cosine modes in y).
pub fn spectral_truncate(s: &ScalarField, n_x: usize, n_y: usize) -> Result<ScalarField> {
    let grid = s.grid();
    if n_x > grid.nx() / 2 || n_y > grid.ny() {
        return Err(ChnsError::CutoffOutOfRange(format!(
            "cutoffs ({n_x}, {n_y}) exceed ({}, {})",
            grid.nx() / 2,
            grid.ny()
        )));
    }
    let nx = grid.nx();
    let out = apply_symbol(grid, YKind::Cos, s.values(), |c, k| {
        if signed_m(c, nx).unsigned_abs() as usize <= n_x && k < n_y {
            1.0
        } else {
            0.0
        }
    });
    ScalarField::from_vec(grid, out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dense_forward(kind: YKind, nx: usize, ny: usize, data: &[f64]) -> Vec<Complex64> {
        let rows = kind.rows(ny);
        let mut y = vec![0.0; rows * nx];
        for r in 0..rows {
            let k = kind.k_of(r) as f64;
            for i in 0..nx {
                let mut acc = 0.0;
                for q in 0..rows {
                    let v = data[q * nx + i];
                    acc += v * match kind {
                        YKind::Cos => (PI * k * (q as f64 + 0.5) / ny as f64).cos(),
                        YKind::SinCell => (PI * k * (q as f64 + 0.5) / ny as f64).sin(),
                        YKind::SinNode => (PI * k * (q as f64 + 1.0) / ny as f64).sin(),
                    };
                }
                y[r * nx + i] = acc;
            }
        }
        let mut out = vec![Complex64::new(0.0, 0.0); rows * nx];
        for r in 0..rows {
            for c in 0..nx {
                let mut acc = Complex64::new(0.0, 0.0);
                for i in 0..nx {
                    acc += y[r * nx + i] * Complex64::from_polar(1.0, -2.0 * PI * (c * i) as f64 / nx as f64);
                }
                out[r * nx + c] = acc;
            }
        }
        out
    }

    fn sample(n: usize, seed: u64) -> Vec<f64> {
        (0..n)
            .map(|q| ((q as f64 + 1.0) * 0.7381 + seed as f64).sin() * 1.3)
            .collect()
    }

    #[test]
    fn transforms_match_dense_oracle_and_invert() {
        let grid = Grid::new(6, 5, 1.0, 1.3).unwrap();
        for kind in [YKind::Cos, YKind::SinCell, YKind::SinNode] {
            let rows = kind.rows(grid.ny());
            let data = sample(rows * grid.nx(), 3);
            let fast = forward(&grid, kind, &data);
            let dense = dense_forward(kind, grid.nx(), grid.ny(), &data);
            for (a, b) in fast.data.iter().zip(&dense) {
                assert!((a - b).norm() < 1e-11, "{kind:?}: {a} vs {b}");
            }
            let back = inverse(&grid, fast);
            for (a, b) in back.iter().zip(&data) {
                assert!((a - b).abs() < 1e-12, "{kind:?}");
            }
        }
    }

    #[test]
    fn helmholtz_single_mode() {
        let grid = Grid::unit(16).unwrap();
        let rhs = ScalarField::from_fn(&grid, |x, _| (2.0 * PI * x).cos());
        let s = helmholtz_solve_neumann(&rhs, 1.0, 1.0).unwrap();
        let lam = lambda_x(&grid, 1);
        for (a, b) in s.values().iter().zip(rhs.values()) {
            assert!((a - b / (1.0 + lam)).abs() < 1e-13);
        }
    }

    #[test]
    fn helmholtz_constant_and_incompatible() {
        let grid = Grid::unit(8).unwrap();
        let c = ScalarField::constant(&grid, 0.3);
        let s = helmholtz_solve_neumann(&c, 1.0, 1.0).unwrap();
        assert!(s.values().iter().all(|v| (v - 0.3).abs() < 1e-14));
        let bad = ScalarField::constant(&grid, 0.1);
        assert!(matches!(
            helmholtz_solve_neumann(&bad, 0.0, 1.0),
            Err(ChnsError::IncompatibleRhs { .. })
        ));
    }

    #[test]
    fn truncate_bounds() {
        let grid = Grid::unit(8).unwrap();
        let s = ScalarField::constant(&grid, 1.0);
        assert!(spectral_truncate(&s, 5, 2).is_err());
        assert!(spectral_truncate(&s, 4, 9).is_err());
        let full = spectral_truncate(&s, 4, 8).unwrap();
        assert!(full.sub(&s).max_abs() < 1e-14);
    }
}
