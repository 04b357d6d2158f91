//! Discrete generalized Stokes problem
//! `(a - b Laplacian_h) u + grad p = f`, `div u = 0`, `u = h` on the walls,
//! solved by preconditioned conjugate gradients on the pressure Schur complement.

use crate::error::{ChnsError, Result};
use crate::grid::{Grid, ScalarField, VectorField, WallTrace};
use crate::ops::{check_walls, divergence_unchecked, gradient, wall_source};
use crate::spectral::{inverse_neg_laplacian, vector_helmholtz_dirichlet};

#[derive(Clone, Debug)]
pub struct StokesSolver {
    a: f64,
    b: f64,
    rtol: f64,
    max_iter: usize,
}

#[derive(Clone, Debug)]
pub struct StokesSolution {
    pub u: VectorField,
    pub p: ScalarField,
    pub iterations: usize,
}

impl StokesSolver {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !(a >= 0.0 && a.is_finite() && b > 0.0 && b.is_finite()) {
            return Err(ChnsError::InvalidParameter(format!(
                "stokes coefficients need a >= 0 and b > 0, got a = {a}, b = {b}"
            )));
        }
        Ok(Self {
            a,
            b,
            rtol: 1e-12,
            max_iter: 500,
        })
    }

    pub fn with_tolerance(mut self, rtol: f64, max_iter: usize) -> Self {
        self.rtol = rtol;
        self.max_iter = max_iter;
        self
    }

    fn velocity(&self, f: &VectorField, p: &ScalarField) -> VectorField {
        let mut rhs = f.clone();
        rhs.axpy(-1.0, &gradient(p));
        vector_helmholtz_dirichlet(&rhs, self.a, self.b)
    }

    /// Schur operator `S p = -div M^{-1} grad p` (symmetric positive on zero-mean p).
    fn schur(&self, p: &ScalarField) -> ScalarField {
        let w = vector_helmholtz_dirichlet(&gradient(p), self.a, self.b);
        divergence_unchecked(&w).scale(-1.0)
    }

    fn precondition(&self, r: &ScalarField) -> ScalarField {
        let mut z = r.scale(self.b);
        if self.a > 0.0 {
            z.axpy(self.a, &inverse_neg_laplacian(r));
        }
        let m = z.mean();
        z.map(|v| v - m)
    }

    pub fn solve(&self, f: &VectorField, walls: &WallTrace) -> Result<StokesSolution> {
        self.solve_with_guess(f, walls, None)
    }

    /// Solves with an optional initial pressure guess (warm start).
    pub fn solve_with_guess(
        &self,
        f: &VectorField,
        walls: &WallTrace,
        guess: Option<&ScalarField>,
    ) -> Result<StokesSolution> {
        let grid: &Grid = f.grid();
        f.check_walls()?;
        check_walls(grid, walls)?;
        let mut forcing = f.clone();
        if !walls.is_zero() {
            forcing.axpy(self.b, &wall_source(grid, walls));
        }

        let mut p = match guess {
            Some(g) => {
                g.check_grid(grid)?;
                let m = g.mean();
                g.map(|v| v - m)
            }
            None => ScalarField::zeros(grid),
        };
        // S p = -div M^{-1} f
        let u0 = vector_helmholtz_dirichlet(&forcing, self.a, self.b);
        let rhs = divergence_unchecked(&u0).scale(-1.0);
        let rhs_norm = rhs.dot(&rhs).sqrt();
        let mut r = rhs.sub(&self.schur(&p));
        let scale = rhs_norm.max(1e-300);
        let target = self.rtol * rhs_norm.max(self.rtol * grid.area().sqrt() * f.max_abs().max(1.0));

        let mut iterations = 0;
        let mut rn = r.dot(&r).sqrt();
        if rn > target {
            let mut z = self.precondition(&r);
            let mut d = z.clone();
            let mut rz = r.dot(&z);
            loop {
                iterations += 1;
                let sd = self.schur(&d);
                let dsd = d.dot(&sd);
                if !(dsd > 0.0) {
                    break;
                }
                let alpha = rz / dsd;
                p.axpy(alpha, &d);
                r.axpy(-alpha, &sd);
                rn = r.dot(&r).sqrt();
                if !rn.is_finite() {
                    return Err(ChnsError::SolverDiverged("non-finite Stokes residual".into()));
                }
                if rn <= target || iterations >= self.max_iter {
                    break;
                }
                z = self.precondition(&r);
                let rz_new = r.dot(&z);
                let beta = rz_new / rz;
                rz = rz_new;
                let mut nd = z.clone();
                nd.axpy(beta, &d);
                d = nd;
            }
        }
        // accept stagnation a few digits above the target, reject anything worse
        if rn > target && rn > 1e-9 * scale {
            return Err(ChnsError::SolverDiverged(format!(
                "Stokes pressure iteration stalled at relative residual {:.3e} after {iterations} iterations",
                rn / scale
            )));
        }
        let u = self.velocity(&forcing, &p);
        if !u.is_finite() {
            return Err(ChnsError::SolverDiverged("non-finite Stokes velocity".into()));
        }
        Ok(StokesSolution { u, p, iterations })
    }
}
