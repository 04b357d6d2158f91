//! Initial-condition builders.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{ChnsError, Result};
use crate::grid::{Grid, ScalarField, VectorField};

/// `coef cos(2 pi mx x / Lx) cos(pi ky y / Ly)`, compatible with the Neumann walls.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhiMode {
    pub mx: u32,
    pub ky: u32,
    pub coef: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PhiInit {
    Constant {
        value: f64,
    },
    Modes {
        #[serde(default)]
        mean: f64,
        modes: Vec<PhiMode>,
    },
    /// `mean + amplitude * U(-1, 1)` per cell from a seeded ChaCha stream.
    Noise {
        #[serde(default)]
        mean: f64,
        amplitude: f64,
        seed: u64,
    },
    /// Flat interface `tanh((y - y0) / (sqrt(2) eps))`.
    Interface {
        y0: f64,
        eps: f64,
    },
}

impl PhiInit {
    pub fn build(&self, grid: &Grid) -> Result<ScalarField> {
        let field = match self {
            PhiInit::Constant { value } => ScalarField::constant(grid, *value),
            PhiInit::Modes { mean, modes } => {
                let (lx, ly) = (grid.lx(), grid.ly());
                ScalarField::from_fn(grid, |x, y| {
                    mean + modes
                        .iter()
                        .map(|m| m.coef * (2.0 * PI * m.mx as f64 * x / lx).cos() * (PI * m.ky as f64 * y / ly).cos())
                        .sum::<f64>()
                })
            }
            PhiInit::Noise { mean, amplitude, seed } => {
                let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                let values = (0..grid.nx() * grid.ny())
                    .map(|_| mean + amplitude * rng.gen_range(-1.0..=1.0))
                    .collect();
                ScalarField::from_vec(grid, values)?
            }
            PhiInit::Interface { y0, eps } => {
                if !(*eps > 0.0) {
                    return Err(ChnsError::InvalidParameter("interface width must be positive".into()));
                }
                ScalarField::from_fn(grid, |_, y| ((y - y0) / (2f64.sqrt() * eps)).tanh())
            }
        };
        if !field.is_finite() {
            return Err(ChnsError::InvalidParameter("initial phi is not finite".into()));
        }
        Ok(field)
    }

    /// Replaces the noise seed, if any.
    pub fn with_seed(self, new_seed: u64) -> Self {
        match self {
            PhiInit::Noise { mean, amplitude, .. } => PhiInit::Noise {
                mean,
                amplitude,
                seed: new_seed,
            },
            other => other,
        }
    }
}

/// Stream-function mode `coef sin(2 pi mx x / Lx) sin^2(pi ky y / Ly)`; zero
/// tangential and normal velocity on the walls.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StreamMode {
    pub mx: u32,
    pub ky: u32,
    pub coef: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum VelocityInit {
    #[default]
    Zero,
    /// `(u_top y / Ly, 0)`
    Couette {
        u_top: f64,
    },
    Stream {
        modes: Vec<StreamMode>,
    },
}

impl VelocityInit {
    pub fn build(&self, grid: &Grid) -> VectorField {
        match self {
            VelocityInit::Zero => VectorField::zeros(grid),
            VelocityInit::Couette { u_top } => {
                let ly = grid.ly();
                VectorField::from_fn(grid, |_, y| (u_top * y / ly, 0.0))
            }
            VelocityInit::Stream { modes } => {
                let (lx, ly) = (grid.lx(), grid.ly());
                from_stream(grid, |x, y| {
                    modes
                        .iter()
                        .map(|m| {
                            let s = (PI * m.ky as f64 * y / ly).sin();
                            m.coef * (2.0 * PI * m.mx as f64 * x / lx).sin() * s * s
                        })
                        .sum()
                })
            }
        }
    }
}

/// Discretely divergence-free velocity `(d psi/dy, -d psi/dx)` from a stream
/// function sampled at cell corners. `psi` must be constant along each wall.
pub fn from_stream(grid: &Grid, psi: impl Fn(f64, f64) -> f64) -> VectorField {
    let (nx, ny, dx, dy) = (grid.nx(), grid.ny(), grid.dx(), grid.dy());
    let corner: Vec<f64> = (0..=ny)
        .flat_map(|j| (0..nx).map(move |i| (i, j)))
        .map(|(i, j)| psi(grid.x_face(i), grid.y_face(j)))
        .collect();
    let at = |i: usize, j: usize| corner[j * nx + i];
    let mut ux = vec![0.0; nx * ny];
    for j in 0..ny {
        for i in 0..nx {
            ux[j * nx + i] = (at(i, j + 1) - at(i, j)) / dy;
        }
    }
    let mut uy = vec![0.0; nx * (ny + 1)];
    for j in 1..ny {
        for i in 0..nx {
            uy[j * nx + i] = -(at(grid.ip(i), j) - at(i, j)) / dx;
        }
    }
    VectorField::from_components(grid, ux, uy).expect("interior rows only")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ops::divergence;

    #[test]
    fn noise_is_seeded() {
        let g = Grid::unit(8).unwrap();
        let p = PhiInit::Noise {
            mean: 0.0,
            amplitude: 0.01,
            seed: 7,
        };
        assert_eq!(p.build(&g).unwrap(), p.build(&g).unwrap());
        let q = p.clone().with_seed(8);
        assert_ne!(p.build(&g).unwrap(), q.build(&g).unwrap());
        assert!(p.build(&g).unwrap().max_abs() <= 0.01);
    }

    #[test]
    fn stream_field_is_divergence_free() {
        let g = Grid::new(16, 12, 2.0, 1.0).unwrap();
        let v = VelocityInit::Stream {
            modes: vec![
                StreamMode {
                    mx: 1,
                    ky: 1,
                    coef: 0.3,
                },
                StreamMode {
                    mx: 3,
                    ky: 2,
                    coef: -0.1,
                },
            ],
        }
        .build(&g);
        assert!(divergence(&v).unwrap().max_abs() < 1e-12);
        assert!(v.max_abs() > 0.1);
    }
}
