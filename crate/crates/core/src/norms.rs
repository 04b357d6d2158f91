//! Discrete norms (midpoint quadrature throughout).

use crate::error::Result;
use crate::grid::{ScalarField, VectorField, WallTrace};
use crate::ops::{check_walls, gradient, vector_laplacian};
use crate::spectral::helmholtz_solve_neumann;

pub fn l2(s: &ScalarField) -> f64 {
    s.dot(s).sqrt()
}

pub fn l2_vec(v: &VectorField) -> f64 {
    v.dot(v).sqrt()
}

/// `||grad s||^2` with homogeneous Neumann closure.
pub fn grad_sq(s: &ScalarField) -> f64 {
    let g = gradient(s);
    g.dot(&g)
}

pub fn h1(s: &ScalarField) -> f64 {
    (s.dot(s) + grad_sq(s)).sqrt()
}

/// Dual norm `sqrt(<s, (I - Laplacian_N)^{-1} s>)`.
pub fn hminus1(s: &ScalarField) -> f64 {
    let w = helmholtz_solve_neumann(s, 1.0, 1.0).expect("a = 1 is always solvable");
    s.dot(&w).max(0.0).sqrt()
}

/// `||grad v||^2` for a velocity field, tangential wall data entering through the
/// ghost cells. Wall corners carry half weight so that, for homogeneous data,
/// `grad_sq_vec(v) = -<vector_laplacian(v, 0), v>`.
pub fn grad_sq_vec(v: &VectorField, walls: &WallTrace) -> Result<f64> {
    check_walls(v.grid(), walls)?;
    let g = v.grid();
    let (nx, ny, dx, dy) = (g.nx(), g.ny(), g.dx(), g.dy());
    let (ux, uy) = (v.ux(), v.uy());
    let mut acc = 0.0;
    for j in 0..ny {
        for i in 0..nx {
            let a = (ux[j * nx + g.ip(i)] - ux[j * nx + i]) / dx;
            let b = (uy[(j + 1) * nx + i] - uy[j * nx + i]) / dy;
            acc += a * a + b * b;
        }
    }
    for j in 1..ny {
        for i in 0..nx {
            let a = (ux[j * nx + i] - ux[(j - 1) * nx + i]) / dy;
            let b = (uy[j * nx + i] - uy[j * nx + g.im(i)]) / dx;
            acc += a * a + b * b;
        }
    }
    for i in 0..nx {
        let bottom = 2.0 * (ux[i] - walls.bottom[i]) / dy;
        let top = 2.0 * (walls.top[i] - ux[(ny - 1) * nx + i]) / dy;
        acc += 0.5 * (bottom * bottom + top * top);
    }
    Ok(acc * g.cell_area())
}

/// Discrete `V^1` norm with the given wall data.
pub fn v1(v: &VectorField, walls: &WallTrace) -> Result<f64> {
    Ok((v.dot(v) + grad_sq_vec(v, walls)?).sqrt())
}

/// Discrete `V^2` norm: `V^1` plus the vector Laplacian with ghosts.
pub fn v2(v: &VectorField, walls: &WallTrace) -> Result<f64> {
    let lap = vector_laplacian(v, walls)?;
    Ok((v.dot(v) + grad_sq_vec(v, walls)? + lap.dot(&lap)).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid;
    use crate::spectral::lambda_x;
    use std::f64::consts::PI;

    #[test]
    fn constant_and_cosine_l2() {
        let g = Grid::unit(16).unwrap();
        assert!((l2(&ScalarField::constant(&g, 1.0)) - 1.0).abs() < 1e-14);
        let c = ScalarField::from_fn(&g, |x, _| (2.0 * PI * x).cos());
        assert!((l2(&c) - 0.5f64.sqrt()).abs() < 1e-14);
        let lam = lambda_x(&g, 1);
        assert!((hminus1(&c) - l2(&c) / (1.0 + lam).sqrt()).abs() < 1e-13);
    }

    #[test]
    fn vector_gradient_matches_laplacian_form() {
        let g = Grid::new(8, 6, 1.0, 1.0).unwrap();
        let v = VectorField::from_fn(&g, |x, y| ((3.0 * x + y).sin() + 0.2, (x * 5.0).cos() * (PI * y).sin()));
        let w = WallTrace::zeros(8);
        let lap = vector_laplacian(&v, &w).unwrap();
        let lhs = grad_sq_vec(&v, &w).unwrap();
        assert!((lhs + lap.dot(&v)).abs() < 1e-12 * lhs.max(1.0));
    }

    #[test]
    fn couette_gradient_is_one() {
        let g = Grid::unit(8).unwrap();
        let v = VectorField::from_fn(&g, |_, y| (y, 0.0));
        let w = WallTrace::uniform(8, 0.0, 1.0);
        assert!((grad_sq_vec(&v, &w).unwrap() - 1.0).abs() < 1e-12);
    }
}
