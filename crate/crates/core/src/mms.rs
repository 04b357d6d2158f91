//! Manufactured solution on the unit channel used for convergence studies.
//!
//! `phi = A(t) cos(2 pi x) cos(pi y)`, stream function
//! `psi = a(t) y^2 / 2 + b(t) sin(2 pi x) sin^2(pi y)`, zero pressure, so the
//! bottom wall is at rest and the top wall moves with `a(t) = 1 - exp(-t)`.

use std::f64::consts::PI;
use std::sync::Arc;

use crate::boundary::{Amplitude, WallData, WallProfile};
use crate::error::{ChnsError, Result};
use crate::grid::{Grid, ScalarField, VectorField};
use crate::initial::from_stream;
use crate::norms::{l2, l2_vec};
use crate::potential::{eval_d2f, eval_d3f, eval_df, ViscositySpec};
use crate::solver::{Forcing, Mode, SimState, Simulation, SolverConfig};

#[derive(Clone, Debug)]
pub struct ManufacturedSolution {
    pub viscosity: ViscositySpec,
    pub phi_amp: f64,
    pub stream_amp: f64,
}

/// Exact fields and derivatives at one point.
struct Point {
    phi: f64,
    phi_t: f64,
    phi_x: f64,
    phi_y: f64,
    u: [f64; 2],
    u_t: [f64; 2],
    /// `grad[i][j] = d u_i / d x_j`
    grad: [[f64; 2]; 2],
    lap: [f64; 2],
}

impl ManufacturedSolution {
    pub fn new(viscosity: ViscositySpec) -> Self {
        Self {
            viscosity,
            phi_amp: 0.4,
            stream_amp: 0.05,
        }
    }

    fn amp_phi(&self, t: f64) -> (f64, f64) {
        let a = self.phi_amp;
        (a * (1.0 + 0.5 * (2.0 * t).sin()), a * (2.0 * t).cos())
    }

    fn amp_stream(&self, t: f64) -> (f64, f64) {
        let b = self.stream_amp;
        (b * (3.0 * t).cos(), -3.0 * b * (3.0 * t).sin())
    }

    fn amp_wall(t: f64) -> (f64, f64) {
        ((1.0 - (-t).exp()), (-t).exp())
    }

    pub fn wall_data(&self, grid: &Grid) -> Result<WallData> {
        check_unit(grid)?;
        WallData::from_profiles(
            grid,
            &WallProfile::Zero,
            &WallProfile::Uniform(1.0),
            Amplitude::CouetteRamp {
                a0: 0.0,
                a_inf: 1.0,
                lambda: 1.0,
            },
        )
    }

    fn point(&self, x: f64, y: f64, t: f64) -> Point {
        let (am, am_t) = self.amp_phi(t);
        let (b, b_t) = self.amp_stream(t);
        let (a, a_t) = Self::amp_wall(t);
        let (sx, cx) = (2.0 * PI * x).sin_cos();
        let (sy, cy) = (PI * y).sin_cos();
        let (s2y, c2y) = (2.0 * PI * y).sin_cos();
        let pi2 = PI * PI;
        let pi3 = pi2 * PI;

        let dxux = 2.0 * pi2 * b * cx * s2y;
        Point {
            phi: am * cx * cy,
            phi_t: am_t * cx * cy,
            phi_x: -2.0 * PI * am * sx * cy,
            phi_y: -PI * am * cx * sy,
            u: [a * y + PI * b * sx * s2y, -2.0 * PI * b * cx * sy * sy],
            u_t: [a_t * y + PI * b_t * sx * s2y, -2.0 * PI * b_t * cx * sy * sy],
            grad: [
                [dxux, a + 2.0 * pi2 * b * sx * c2y],
                [4.0 * pi2 * b * sx * sy * sy, -dxux],
            ],
            lap: [-8.0 * pi3 * b * sx * s2y, 4.0 * pi3 * b * cx * (1.0 - 2.0 * c2y)],
        }
    }

    pub fn phi(&self, grid: &Grid, t: f64) -> ScalarField {
        ScalarField::from_fn(grid, |x, y| self.point(x, y, t).phi)
    }

    /// Exact velocity sampled at the faces.
    pub fn velocity(&self, grid: &Grid, t: f64) -> VectorField {
        VectorField::from_fn(grid, |x, y| {
            let p = self.point(x, y, t);
            (p.u[0], p.u[1])
        })
    }

    /// Discretely divergence-free interpolant built from the stream function.
    pub fn initial_velocity(&self, grid: &Grid, t: f64) -> VectorField {
        let (a, _) = Self::amp_wall(t);
        let (b, _) = self.amp_stream(t);
        from_stream(grid, |x, y| {
            let s = (PI * y).sin();
            0.5 * a * y * y + b * (2.0 * PI * x).sin() * s * s
        })
    }
}

fn check_unit(grid: &Grid) -> Result<()> {
    if grid.lx() != 1.0 || grid.ly() != 1.0 {
        return Err(ChnsError::InvalidGrid(
            "the manufactured solution is defined on the unit channel".into(),
        ));
    }
    Ok(())
}

impl Forcing for ManufacturedSolution {
    /// `phi_t + u . grad phi - Laplacian mu`.
    fn ch_source(&self, grid: &Grid, t: f64) -> ScalarField {
        let pi2 = PI * PI;
        ScalarField::from_fn(grid, |x, y| {
            let p = self.point(x, y, t);
            let grad_sq = p.phi_x * p.phi_x + p.phi_y * p.phi_y;
            let lap_mu = -25.0 * pi2 * pi2 * p.phi - 5.0 * pi2 * eval_d2f(p.phi) * p.phi + eval_d3f(p.phi) * grad_sq;
            p.phi_t + p.u[0] * p.phi_x + p.u[1] * p.phi_y - lap_mu
        })
    }

    /// `u_t + (u . grad) u - div(nu(phi) D u) - mu grad phi`.
    fn momentum_source(&self, grid: &Grid, t: f64) -> VectorField {
        let pi2 = PI * PI;
        let f = |x: f64, y: f64| -> [f64; 2] {
            let p = self.point(x, y, t);
            let nu = self.viscosity.eval(p.phi);
            let dnu = self.viscosity.eval_derivative(p.phi);
            let gnu = [dnu * p.phi_x, dnu * p.phi_y];
            let g = p.grad;
            let d = [
                [g[0][0], 0.5 * (g[0][1] + g[1][0])],
                [0.5 * (g[0][1] + g[1][0]), g[1][1]],
            ];
            let mu = 5.0 * pi2 * p.phi + eval_df(p.phi);
            let gphi = [p.phi_x, p.phi_y];
            let mut out = [0.0; 2];
            for (i, o) in out.iter_mut().enumerate() {
                let adv = p.u[0] * g[i][0] + p.u[1] * g[i][1];
                let visc = 0.5 * nu * p.lap[i] + d[i][0] * gnu[0] + d[i][1] * gnu[1];
                *o = p.u_t[i] + adv - visc - mu * gphi[i];
            }
            out
        };
        VectorField::from_fn(grid, |x, y| {
            let v = f(x, y);
            (v[0], v[1])
        })
    }
}

/// Discrete errors at the final time of one manufactured-solution run.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct MmsErrors {
    pub phi_l2: f64,
    pub u_l2: f64,
}

impl ManufacturedSolution {
    /// Runs the forced problem on an `n x n` unit grid from the exact initial data,
    /// with incremental pressure correction.
    pub fn run(&self, n: usize, dt: f64, t_end: f64, mode: Mode) -> Result<(SimState, MmsErrors)> {
        self.run_with(n, dt, t_end, mode, true)
    }

    pub fn run_with(
        &self,
        n: usize,
        dt: f64,
        t_end: f64,
        mode: Mode,
        incremental: bool,
    ) -> Result<(SimState, MmsErrors)> {
        let grid = Grid::unit(n)?;
        let mut cfg = SolverConfig::new(dt, t_end, self.viscosity.clone());
        cfg.mode = mode;
        cfg.record_every = usize::MAX;
        cfg.incremental = incremental;
        let sim = Simulation::new(&grid, cfg, self.wall_data(&grid)?)?.with_forcing(Arc::new(self.clone()));
        let s0 = sim.initial_state(self.phi(&grid, 0.0), self.initial_velocity(&grid, 0.0))?;
        let mut s = s0;
        for _ in 0..sim.config().n_steps() {
            s = sim.step(&s)?;
        }
        let errors = MmsErrors {
            phi_l2: l2(&s.phi.sub(&self.phi(&grid, s.t))),
            u_l2: l2_vec(&s.u.sub(&self.velocity(&grid, s.t))),
        };
        Ok((s, errors))
    }
}

/// `log2(e_coarse / e_fine)` for consecutive entries.
pub fn observed_orders(errors: &[f64]) -> Vec<f64> {
    errors.windows(2).map(|w| (w[0] / w[1]).log2()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Finite-difference check of the hand derivatives.
    #[test]
    fn derivatives_match_differences() {
        let m = ManufacturedSolution::new(ViscositySpec::new(1.0, 1.2).unwrap());
        let e = 1e-6;
        for &(x, y, t) in &[(0.13, 0.37, 0.2), (0.71, 0.91, 1.3)] {
            let p = m.point(x, y, t);
            let px = |dx: f64, dy: f64, dt: f64| m.point(x + dx, y + dy, t + dt);
            let d = |a: f64, b: f64| (a - b) / (2.0 * e);
            assert!((d(px(e, 0.0, 0.0).phi, px(-e, 0.0, 0.0).phi) - p.phi_x).abs() < 1e-6);
            assert!((d(px(0.0, e, 0.0).phi, px(0.0, -e, 0.0).phi) - p.phi_y).abs() < 1e-6);
            assert!((d(px(0.0, 0.0, e).phi, px(0.0, 0.0, -e).phi) - p.phi_t).abs() < 1e-6);
            for i in 0..2 {
                assert!((d(px(e, 0.0, 0.0).u[i], px(-e, 0.0, 0.0).u[i]) - p.grad[i][0]).abs() < 1e-5);
                assert!((d(px(0.0, e, 0.0).u[i], px(0.0, -e, 0.0).u[i]) - p.grad[i][1]).abs() < 1e-5);
                assert!((d(px(0.0, 0.0, e).u[i], px(0.0, 0.0, -e).u[i]) - p.u_t[i]).abs() < 1e-6);
                let h = 1e-4;
                let lap = (px(h, 0.0, 0.0).u[i] + px(-h, 0.0, 0.0).u[i] + px(0.0, h, 0.0).u[i] + px(0.0, -h, 0.0).u[i]
                    - 4.0 * p.u[i])
                    / (h * h);
                assert!((lap - p.lap[i]).abs() < 1e-3, "lap {i}: {lap} vs {}", p.lap[i]);
            }
            assert!((p.grad[0][0] + p.grad[1][1]).abs() < 1e-14);
        }
    }

    #[test]
    fn wall_values() {
        let m = ManufacturedSolution::new(ViscositySpec::new(1.0, 1.2).unwrap());
        for &x in &[0.0, 0.3, 0.8] {
            let t = 0.7;
            let top = m.point(x, 1.0, t);
            let bottom = m.point(x, 0.0, t);
            assert!((top.u[0] - (1.0 - (-t).exp())).abs() < 1e-14);
            assert!(bottom.u[0].abs() < 1e-14 && top.u[1].abs() < 1e-14 && bottom.u[1].abs() < 1e-14);
            assert!(top.phi_y.abs() < 1e-14 && bottom.phi_y.abs() < 1e-14);
        }
    }
}
