//! Discrete differential operators on the MAC grid.

use crate::error::{ChnsError, Result};
use crate::grid::{Grid, ScalarField, VectorField, WallTrace};
use crate::spectral::inverse_neg_laplacian;

fn same_grid(a: &Grid, b: &Grid) -> Result<()> {
    if a != b {
        return Err(ChnsError::ShapeMismatch(format!(
            "fields live on different grids: {a:?} vs {b:?}"
        )));
    }
    Ok(())
}

pub(crate) fn check_walls(grid: &Grid, walls: &WallTrace) -> Result<()> {
    if walls.bottom.len() != grid.nx() || walls.top.len() != grid.nx() {
        return Err(ChnsError::ShapeMismatch(format!(
            "wall data needs {} samples per wall, got {} and {}",
            grid.nx(),
            walls.bottom.len(),
            walls.top.len()
        )));
    }
    Ok(())
}

/// Centered MAC divergence at cell centers.
pub fn divergence(v: &VectorField) -> Result<ScalarField> {
    v.check_walls()?;
    Ok(divergence_unchecked(v))
}

pub(crate) fn divergence_unchecked(v: &VectorField) -> ScalarField {
    let g = v.grid();
    let (nx, ny, dx, dy) = (g.nx(), g.ny(), g.dx(), g.dy());
    let (ux, uy) = (v.ux(), v.uy());
    let mut out = ScalarField::zeros(g);
    let d = out.values_mut();
    for j in 0..ny {
        for i in 0..nx {
            d[j * nx + i] = (ux[j * nx + g.ip(i)] - ux[j * nx + i]) / dx + (uy[(j + 1) * nx + i] - uy[j * nx + i]) / dy;
        }
    }
    out
}

/// Face-centered gradient; the wall-normal faces carry zero (Neumann closure).
pub fn gradient(s: &ScalarField) -> VectorField {
    let g = s.grid();
    let (nx, ny, dx, dy) = (g.nx(), g.ny(), g.dx(), g.dy());
    let v = s.values();
    let mut out = VectorField::zeros(g);
    {
        let gx = out.ux_mut();
        for j in 0..ny {
            for i in 0..nx {
                gx[j * nx + i] = (v[j * nx + i] - v[j * nx + g.im(i)]) / dx;
            }
        }
    }
    let gy = out.uy_mut();
    for j in 1..ny {
        for i in 0..nx {
            gy[j * nx + i] = (v[j * nx + i] - v[(j - 1) * nx + i]) / dy;
        }
    }
    out
}

/// Five-point Laplacian, periodic in x, homogeneous Neumann at the walls.
pub fn laplacian_neumann(s: &ScalarField) -> ScalarField {
    divergence_unchecked(&gradient(s))
}

/// Conservative centered discretization of `div(v s)`, equal to `v . grad s` for
/// divergence-free `v`.
pub fn advect_scalar(v: &VectorField, s: &ScalarField) -> Result<ScalarField> {
    same_grid(v.grid(), s.grid())?;
    let g = s.grid();
    let (nx, ny, dx, dy) = (g.nx(), g.ny(), g.dx(), g.dy());
    let (ux, uy, sv) = (v.ux(), v.uy(), s.values());
    let flux_x = |i: usize, j: usize| ux[j * nx + i] * 0.5 * (sv[j * nx + g.im(i)] + sv[j * nx + i]);
    let flux_y = |i: usize, j: usize| {
        if j == 0 || j == ny {
            0.0
        } else {
            uy[j * nx + i] * 0.5 * (sv[(j - 1) * nx + i] + sv[j * nx + i])
        }
    };
    let mut out = ScalarField::zeros(g);
    let d = out.values_mut();
    for j in 0..ny {
        for i in 0..nx {
            d[j * nx + i] = (flux_x(g.ip(i), j) - flux_x(i, j)) / dx + (flux_y(i, j + 1) - flux_y(i, j)) / dy;
        }
    }
    Ok(out)
}

/// Energy-conserving MAC form of `(v . grad) w`: skew-symmetric in `w` whenever
/// `v` is discretely divergence-free. Wall values of `w` never enter because the
/// wall-normal mass flux vanishes.
pub fn advect_velocity(v: &VectorField, w: &VectorField) -> Result<VectorField> {
    same_grid(v.grid(), w.grid())?;
    let g = v.grid();
    let (nx, ny, dx, dy) = (g.nx(), g.ny(), g.dx(), g.dy());
    let (vx, vy, wx, wy) = (v.ux(), v.uy(), w.ux(), w.uy());
    let at = |a: &[f64], i: usize, j: usize| a[j * nx + i];
    let mut out = VectorField::zeros(g);

    {
        // x-momentum control volume around face (i, j)
        let uc = |i: usize, j: usize| 0.5 * (at(vx, i, j) + at(vx, g.ip(i), j));
        let wc = |i: usize, j: usize| 0.5 * (at(wx, i, j) + at(wx, g.ip(i), j));
        // corner (i, j) at (i dx, j dy)
        let vk = |i: usize, j: usize| 0.5 * (at(vy, g.im(i), j) + at(vy, i, j));
        let wk = |i: usize, j: usize| {
            if j == 0 || j == ny {
                0.0
            } else {
                0.5 * (at(wx, i, j - 1) + at(wx, i, j))
            }
        };
        let ox = out.ux_mut();
        for j in 0..ny {
            for i in 0..nx {
                let im = g.im(i);
                ox[j * nx + i] = (uc(i, j) * wc(i, j) - uc(im, j) * wc(im, j)) / dx
                    + (vk(i, j + 1) * wk(i, j + 1) - vk(i, j) * wk(i, j)) / dy;
            }
        }
    }
    {
        // y-momentum control volume around face (i, j), interior rows only
        let uk = |i: usize, j: usize| 0.5 * (at(vx, i, j - 1) + at(vx, i, j));
        let wk = |i: usize, j: usize| 0.5 * (at(wy, g.im(i), j) + at(wy, i, j));
        let vc = |i: usize, j: usize| 0.5 * (at(vy, i, j) + at(vy, i, j + 1));
        let wc = |i: usize, j: usize| 0.5 * (at(wy, i, j) + at(wy, i, j + 1));
        let oy = out.uy_mut();
        for j in 1..ny {
            for i in 0..nx {
                let ip = g.ip(i);
                oy[j * nx + i] = (uk(ip, j) * wk(ip, j) - uk(i, j) * wk(i, j)) / dx
                    + (vc(i, j) * wc(i, j) - vc(i, j - 1) * wc(i, j - 1)) / dy;
            }
        }
    }
    Ok(out)
}

/// `u_x` ghost value below row 0 (`top = false`) or above row `ny - 1`.
#[inline]
fn ghost(v: &VectorField, walls: &WallTrace, i: usize, top: bool) -> f64 {
    let g = v.grid();
    if top {
        2.0 * walls.top[i] - v.ux_at(i, g.ny() - 1)
    } else {
        2.0 * walls.bottom[i] - v.ux_at(i, 0)
    }
}

/// `d u_x / dy` at corner `(i, j)`, `j = 0..=ny`, using wall ghosts.
#[inline]
fn dy_ux_corner(v: &VectorField, walls: &WallTrace, i: usize, j: usize) -> f64 {
    let g = v.grid();
    let ny = g.ny();
    let below = if j == 0 {
        ghost(v, walls, i, false)
    } else {
        v.ux_at(i, j - 1)
    };
    let above = if j == ny {
        ghost(v, walls, i, true)
    } else {
        v.ux_at(i, j)
    };
    (above - below) / g.dy()
}

/// `div(nu D v)` with `D = (grad v + grad v^T)/2`, homogeneous tangential wall data.
pub fn viscous_term(nu: &ScalarField, v: &VectorField) -> Result<VectorField> {
    viscous_term_with_walls(nu, v, &WallTrace::zeros(v.grid().nx()))
}

/// `div(nu D v)` with tangential wall data imposed through ghost cells.
pub fn viscous_term_with_walls(nu: &ScalarField, v: &VectorField, walls: &WallTrace) -> Result<VectorField> {
    if let Some(bad) = nu.values().iter().find(|&&x| !(x > 0.0)) {
        return Err(ChnsError::NonpositiveViscosity(*bad));
    }
    viscous_term_nonneg(nu, v, walls)
}

/// Same as [`viscous_term_with_walls`] but admits `nu >= 0` (used for the explicit
/// excess viscosity `nu(phi) - nu1`).
pub(crate) fn viscous_term_nonneg(nu: &ScalarField, v: &VectorField, walls: &WallTrace) -> Result<VectorField> {
    same_grid(nu.grid(), v.grid())?;
    check_walls(v.grid(), walls)?;
    if let Some(bad) = nu.values().iter().find(|&&x| !(x >= 0.0 && x.is_finite())) {
        return Err(ChnsError::NonpositiveViscosity(*bad));
    }
    let g = v.grid();
    let (nx, ny, dx, dy) = (g.nx(), g.ny(), g.dx(), g.dy());
    let n = nu.values();
    let (ux, uy) = (v.ux(), v.uy());

    // nu * exx and nu * eyy at cell centers
    let mut sxx = vec![0.0; nx * ny];
    let mut syy = vec![0.0; nx * ny];
    for j in 0..ny {
        for i in 0..nx {
            let c = j * nx + i;
            sxx[c] = n[c] * (ux[j * nx + g.ip(i)] - ux[c]) / dx;
            syy[c] = n[c] * (uy[(j + 1) * nx + i] - uy[c]) / dy;
        }
    }
    // nu * exy at corners, rows 0..=ny
    let mut sxy = vec![0.0; nx * (ny + 1)];
    for j in 0..=ny {
        for i in 0..nx {
            let im = g.im(i);
            let nu_k = if j == 0 {
                0.5 * (n[im] + n[i])
            } else if j == ny {
                0.5 * (n[(ny - 1) * nx + im] + n[(ny - 1) * nx + i])
            } else {
                0.25 * (n[(j - 1) * nx + im] + n[(j - 1) * nx + i] + n[j * nx + im] + n[j * nx + i])
            };
            let dxuy = if j == 0 || j == ny {
                0.0
            } else {
                (uy[j * nx + i] - uy[j * nx + im]) / dx
            };
            sxy[j * nx + i] = nu_k * 0.5 * (dy_ux_corner(v, walls, i, j) + dxuy);
        }
    }

    let mut out = VectorField::zeros(g);
    {
        let fx = out.ux_mut();
        for j in 0..ny {
            for i in 0..nx {
                let im = g.im(i);
                fx[j * nx + i] =
                    (sxx[j * nx + i] - sxx[j * nx + im]) / dx + (sxy[(j + 1) * nx + i] - sxy[j * nx + i]) / dy;
            }
        }
    }
    let fy = out.uy_mut();
    for j in 1..ny {
        for i in 0..nx {
            fy[j * nx + i] =
                (sxy[j * nx + g.ip(i)] - sxy[j * nx + i]) / dx + (syy[j * nx + i] - syy[(j - 1) * nx + i]) / dy;
        }
    }
    Ok(out)
}

/// Componentwise vector Laplacian with tangential wall data through ghosts and
/// zero normal velocity on the walls.
pub fn vector_laplacian(v: &VectorField, walls: &WallTrace) -> Result<VectorField> {
    check_walls(v.grid(), walls)?;
    let g = v.grid();
    let (nx, ny, dx, dy) = (g.nx(), g.ny(), g.dx(), g.dy());
    let (ux, uy) = (v.ux(), v.uy());
    let mut out = VectorField::zeros(g);
    {
        let ox = out.ux_mut();
        for j in 0..ny {
            for i in 0..nx {
                let c = ux[j * nx + i];
                let xx = (ux[j * nx + g.ip(i)] - 2.0 * c + ux[j * nx + g.im(i)]) / (dx * dx);
                let below = if j == 0 {
                    ghost(v, walls, i, false)
                } else {
                    ux[(j - 1) * nx + i]
                };
                let above = if j == ny - 1 {
                    ghost(v, walls, i, true)
                } else {
                    ux[(j + 1) * nx + i]
                };
                ox[j * nx + i] = xx + (above - 2.0 * c + below) / (dy * dy);
            }
        }
    }
    let oy = out.uy_mut();
    for j in 1..ny {
        for i in 0..nx {
            let c = uy[j * nx + i];
            oy[j * nx + i] = (uy[j * nx + g.ip(i)] - 2.0 * c + uy[j * nx + g.im(i)]) / (dx * dx)
                + (uy[(j + 1) * nx + i] - 2.0 * c + uy[(j - 1) * nx + i]) / (dy * dy);
        }
    }
    Ok(out)
}

/// Ghost-cell boundary contribution: `vector_laplacian(v, h) = vector_laplacian(v, 0) + wall_source(h)`.
pub(crate) fn wall_source(grid: &Grid, walls: &WallTrace) -> VectorField {
    let (nx, ny, dy) = (grid.nx(), grid.ny(), grid.dy());
    let mut out = VectorField::zeros(grid);
    let ox = out.ux_mut();
    for i in 0..nx {
        ox[i] += 2.0 * walls.bottom[i] / (dy * dy);
        ox[(ny - 1) * nx + i] += 2.0 * walls.top[i] / (dy * dy);
    }
    out
}

/// Korteweg force on the faces, either `mu grad phi` (default) or `-phi grad mu`.
pub fn korteweg_force(mu: &ScalarField, phi: &ScalarField, phi_grad_mu: bool) -> Result<VectorField> {
    same_grid(mu.grid(), phi.grid())?;
    let (a, b, sign) = if phi_grad_mu { (phi, mu, -1.0) } else { (mu, phi, 1.0) };
    let g = a.grid();
    let (nx, ny) = (g.nx(), g.ny());
    let mut out = gradient(b);
    let av = a.values();
    {
        let ox = out.ux_mut();
        for j in 0..ny {
            for i in 0..nx {
                ox[j * nx + i] *= sign * 0.5 * (av[j * nx + g.im(i)] + av[j * nx + i]);
            }
        }
    }
    let oy = out.uy_mut();
    for j in 1..ny {
        for i in 0..nx {
            oy[j * nx + i] *= sign * 0.5 * (av[(j - 1) * nx + i] + av[j * nx + i]);
        }
    }
    Ok(out)
}

/// Helmholtz-Hodge projection onto discretely divergence-free fields.
/// Returns `(P v, q)` with `P v = v - grad q` and `q` of zero mean.
pub fn leray_project(v: &VectorField) -> Result<(VectorField, ScalarField)> {
    v.check_walls()?;
    let div = divergence_unchecked(v);
    let q = inverse_neg_laplacian(&div).scale(-1.0);
    let mut pv = v.clone();
    pv.axpy(-1.0, &gradient(&q));
    Ok((pv, q))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn divergence_of_sine_matches_stencil() {
        let g = Grid::unit(16).unwrap();
        let v = VectorField::from_fn(&g, |x, _| ((2.0 * PI * x).sin(), 0.0));
        let d = divergence(&v).unwrap();
        let dx = g.dx();
        for j in 0..g.ny() {
            for i in 0..g.nx() {
                let xc = g.x_center(i);
                let exact = (2.0 / dx) * (PI * dx).sin() * (2.0 * PI * xc).cos();
                assert!((d.at(i, j) - exact).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn wall_rows_rejected() {
        let g = Grid::unit(8).unwrap();
        let mut uy = vec![0.0; 8 * 9];
        uy[3] = 1.0;
        assert!(VectorField::from_components(&g, vec![0.0; 64], uy).is_err());
    }

    #[test]
    fn linear_in_y_gradient_constant() {
        let g = Grid::unit(8).unwrap();
        let s = ScalarField::from_fn(&g, |_, y| 3.0 * y);
        let gr = gradient(&s);
        for j in 1..g.ny() {
            for i in 0..g.nx() {
                assert!((gr.uy_at(i, j) - 3.0).abs() < 1e-12);
            }
        }
        assert!(gr.ux().iter().all(|v| v.abs() < 1e-12));
    }

    #[test]
    fn laplacian_eigenvalues() {
        let g = Grid::new(16, 12, 1.0, 1.0).unwrap();
        let (dx, dy) = (g.dx(), g.dy());
        let s = ScalarField::from_fn(&g, |_, y| (PI * y).cos());
        let l = laplacian_neumann(&s);
        let lam = -(2.0 / (dy * dy)) * (1.0 - (PI * dy).cos());
        assert!(l.sub(&s.scale(lam)).max_abs() < 1e-10);
        let s = ScalarField::from_fn(&g, |x, _| (2.0 * PI * x).cos());
        let l = laplacian_neumann(&s);
        let lam = -(2.0 / (dx * dx)) * (1.0 - (2.0 * PI * dx).cos());
        assert!(l.sub(&s.scale(lam)).max_abs() < 1e-10);
    }

    #[test]
    fn advect_scalar_single_mode() {
        let g = Grid::unit(16).unwrap();
        let v = VectorField::from_fn(&g, |_, _| (1.0, 0.0));
        let s = ScalarField::from_fn(&g, |x, _| (2.0 * PI * x).cos());
        let a = advect_scalar(&v, &s).unwrap();
        for j in 0..g.ny() {
            for i in 0..g.nx() {
                let d = (s.at(g.ip(i), j) - s.at(g.im(i), j)) / (2.0 * g.dx());
                assert!((a.at(i, j) - d).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn advect_velocity_single_mode() {
        let g = Grid::unit(16).unwrap();
        let v = VectorField::from_fn(&g, |_, _| (1.0, 0.0));
        let w = VectorField::from_fn(&g, |x, _| ((2.0 * PI * x).cos(), 0.0));
        let a = advect_velocity(&v, &w).unwrap();
        for j in 0..g.ny() {
            for i in 0..g.nx() {
                let d = (w.ux_at(g.ip(i), j) - w.ux_at(g.im(i), j)) / (2.0 * g.dx());
                assert!((a.ux_at(i, j) - d).abs() < 1e-12);
            }
        }
        assert!(a.uy().iter().all(|v| v.abs() < 1e-14));
    }

    #[test]
    fn viscous_linear_profile_interior_zero() {
        let g = Grid::unit(8).unwrap();
        let nu = ScalarField::constant(&g, 1.0);
        let v = VectorField::from_fn(&g, |_, y| (y, 0.0));
        let f = viscous_term(&nu, &v).unwrap();
        for j in 1..g.ny() - 1 {
            for i in 0..g.nx() {
                assert!(f.ux_at(i, j).abs() < 1e-10);
            }
        }
        let walls = WallTrace::uniform(8, 0.0, 1.0);
        let f = viscous_term_with_walls(&nu, &v, &walls).unwrap();
        assert!(f.max_abs() < 1e-10);
    }

    #[test]
    fn viscous_rejects_zero() {
        let g = Grid::unit(8).unwrap();
        let mut nu = ScalarField::constant(&g, 1.0);
        nu.values_mut()[5] = 0.0;
        assert!(matches!(
            viscous_term(&nu, &VectorField::zeros(&g)),
            Err(ChnsError::NonpositiveViscosity(_))
        ));
    }
}
