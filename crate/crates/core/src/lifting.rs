//! Elliptic and parabolic Stokes lifts of the wall data.

use serde::Serialize;

use crate::boundary::{extrapolated_trace, WallData};
use crate::error::{ChnsError, Result};
use crate::grid::{Grid, ScalarField, VectorField, WallTrace};
use crate::norms::{grad_sq_vec, v1};
use crate::ops::vector_laplacian;
use crate::stokes::StokesSolver;

/// Stationary lift `-nu1 Laplacian u + grad p = 0`, `div u = 0`, `u = h` on the walls.
pub fn elliptic_lift_trace(grid: &Grid, walls: &WallTrace, nu1: f64) -> Result<(VectorField, ScalarField)> {
    if walls.is_zero() {
        return Ok((VectorField::zeros(grid), ScalarField::zeros(grid)));
    }
    let sol = StokesSolver::new(0.0, nu1)?.solve(&VectorField::zeros(grid), walls)?;
    Ok((sol.u, sol.p))
}

pub fn elliptic_lift(grid: &Grid, data: &WallData, t: f64, nu1: f64) -> Result<(VectorField, ScalarField)> {
    elliptic_lift_trace(grid, &data.eval_wall(t)?, nu1)
}

/// `d/dt` of the elliptic lift, by linearity a lift of `dh/dt`.
pub fn elliptic_lift_dt(grid: &Grid, data: &WallData, t: f64, nu1: f64) -> Result<VectorField> {
    Ok(elliptic_lift_trace(grid, &data.eval_wall_dt(t)?, nu1)?.0)
}

/// Elliptic lift of the extrapolated tangential trace of `u0`.
pub fn initial_lift(u0: &VectorField, nu1: f64) -> Result<(VectorField, ScalarField)> {
    u0.check_walls()?;
    elliptic_lift_trace(u0.grid(), &extrapolated_trace(u0), nu1)
}

/// Elliptic lift of the unit-amplitude profile; the lift at time `t` is `a(t)` times it.
#[derive(Clone, Debug)]
pub struct EllipticLift {
    u_g: VectorField,
    p_g: ScalarField,
}

impl EllipticLift {
    pub fn new(grid: &Grid, data: &WallData, nu1: f64) -> Result<Self> {
        let (u_g, p_g) = elliptic_lift_trace(grid, data.profile(), nu1)?;
        Ok(Self { u_g, p_g })
    }

    pub fn velocity(&self, data: &WallData, t: f64) -> Result<VectorField> {
        Ok(self.u_g.scale(data.amplitude().value(check_time(t)?)))
    }

    pub fn pressure(&self, data: &WallData, t: f64) -> Result<ScalarField> {
        Ok(self.p_g.scale(data.amplitude().value(check_time(t)?)))
    }

    pub fn velocity_dt(&self, data: &WallData, t: f64) -> Result<VectorField> {
        Ok(self.u_g.scale(data.amplitude().derivative(check_time(t)?)))
    }

    pub fn unit_velocity(&self) -> &VectorField {
        &self.u_g
    }
}

fn check_time(t: f64) -> Result<f64> {
    if !(t >= 0.0) {
        return Err(ChnsError::NegativeTime(t));
    }
    Ok(t)
}

/// Lift fields at one time level.
#[derive(Clone, Debug)]
pub struct LiftState {
    pub t: f64,
    pub u_e: VectorField,
    pub p_e: ScalarField,
    pub du_e_dt: VectorField,
    pub u_p: VectorField,
    pub p_p: ScalarField,
    /// Backward difference of `u_p` over the last step (zero at start).
    pub du_p_dt: VectorField,
}

impl LiftState {
    /// Both lifts start from the elliptic lift of `h(t0)`, so they agree exactly.
    pub fn initialize(lift: &EllipticLift, data: &WallData, t0: f64) -> Result<Self> {
        let u_e = lift.velocity(data, t0)?;
        let p_e = lift.pressure(data, t0)?;
        Ok(Self {
            t: t0,
            du_e_dt: lift.velocity_dt(data, t0)?,
            u_p: u_e.clone(),
            p_p: p_e.clone(),
            du_p_dt: VectorField::zeros(u_e.grid()),
            u_e,
            p_e,
        })
    }
}

/// One backward-Euler step of `du/dt - nu1 Laplacian u + grad p = 0`, `u = h(t + dt)`,
/// written for the increment so that a stationary lift is a fixed point to round-off.
pub fn parabolic_lift_step(
    state: &LiftState,
    lift: &EllipticLift,
    data: &WallData,
    dt: f64,
    nu1: f64,
) -> Result<LiftState> {
    if !(dt > 0.0) {
        return Err(ChnsError::InvalidParameter(format!("dt must be positive, got {dt}")));
    }
    let t1 = state.t + dt;
    let h1 = data.eval_wall(t1)?;
    let grid = state.u_p.grid();
    let (u_p, p_p, du_p_dt) = if data.is_zero() {
        (state.u_p.clone(), state.p_p.clone(), VectorField::zeros(grid))
    } else {
        let mut g = vector_laplacian(&state.u_p, &h1)?.scale(nu1);
        g.axpy(-1.0, &crate::ops::gradient(&state.p_p));
        let sol = StokesSolver::new(1.0 / dt, nu1)?.solve(&g, &WallTrace::zeros(grid.nx()))?;
        let mut u = state.u_p.clone();
        u.axpy(1.0, &sol.u);
        let p = state.p_p.add(&sol.p);
        (u, p, sol.u.scale(1.0 / dt))
    };
    Ok(LiftState {
        t: t1,
        u_e: lift.velocity(data, t1)?,
        p_e: lift.pressure(data, t1)?,
        du_e_dt: lift.velocity_dt(data, t1)?,
        u_p,
        p_p,
        du_p_dt,
    })
}

/// Per-step scalars needed for the lift-difference estimate.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LiftSample {
    pub t: f64,
    /// `||u_p - u_e||_{V^1}^2`
    pub diff_v1_sq: f64,
    /// `||Laplacian (u_p - u_e)||^2`
    pub diff_lap_sq: f64,
    /// `||dh/dt||_{V^{-1/2}}^2`
    pub dh_sq: f64,
    /// `||du_p/dt||`
    pub du_p_dt: f64,
}

impl LiftSample {
    pub fn from_state(state: &LiftState, data: &WallData) -> Result<Self> {
        let zero = WallTrace::zeros(state.u_p.grid().nx());
        let d = state.u_p.sub(&state.u_e);
        let lap = vector_laplacian(&d, &zero)?;
        let n = v1(&d, &zero)?;
        Ok(Self {
            t: state.t,
            diff_v1_sq: n * n,
            diff_lap_sq: lap.dot(&lap),
            dh_sq: data.dh_norm(state.t, -0.5)?.powi(2),
            du_p_dt: state.du_p_dt.dot(&state.du_p_dt).sqrt(),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LiftDifferenceReport {
    /// `sup_t LHS(t) / RHS(t)`; `None` when both sides vanish identically.
    pub ratio: Option<f64>,
    pub degenerate: bool,
    pub lhs_final: f64,
    pub rhs_final: f64,
    /// `||du_p/dt||` at the sample nearest `T/2` and at `T`.
    pub du_p_dt_half: f64,
    pub du_p_dt_final: f64,
}

/// Evaluates `||u_p - u_e||_{V^1}^2 + int ||Laplacian(u_p - u_e)||^2` against
/// `int ||dh/dt||^2_{V^{-1/2}}` along a uniformly sampled history (trapezoid rule).
pub fn lift_difference_report(samples: &[LiftSample]) -> Result<LiftDifferenceReport> {
    if samples.len() < 2 {
        return Err(ChnsError::Misaligned("need at least two lift samples".into()));
    }
    let h = samples[1].t - samples[0].t;
    if !(h > 0.0)
        || samples
            .windows(2)
            .any(|w| ((w[1].t - w[0].t) - h).abs() > 1e-9 * h.max(1.0))
    {
        return Err(ChnsError::Misaligned(
            "lift samples must be uniformly spaced in time".into(),
        ));
    }
    let mut int_lap = 0.0;
    let mut int_dh = 0.0;
    let mut ratio: f64 = 0.0;
    let mut lhs = samples[0].diff_v1_sq;
    let mut rhs = 0.0;
    let mut any_nonzero = lhs > 0.0;
    let tiny = 1e-300;
    for w in samples.windows(2) {
        int_lap += 0.5 * h * (w[0].diff_lap_sq + w[1].diff_lap_sq);
        int_dh += 0.5 * h * (w[0].dh_sq + w[1].dh_sq);
        lhs = w[1].diff_v1_sq + int_lap;
        rhs = int_dh;
        any_nonzero |= lhs > 0.0 || rhs > 0.0;
        if rhs > tiny {
            ratio = ratio.max(lhs / rhs);
        } else if lhs > tiny {
            ratio = f64::INFINITY;
        }
    }
    let t_end = samples.last().expect("non-empty").t;
    let t0 = samples[0].t;
    let half = samples
        .iter()
        .min_by(|a, b| {
            let ta = (a.t - 0.5 * (t0 + t_end)).abs();
            let tb = (b.t - 0.5 * (t0 + t_end)).abs();
            ta.total_cmp(&tb)
        })
        .expect("non-empty");
    Ok(LiftDifferenceReport {
        ratio: if any_nonzero { Some(ratio) } else { None },
        degenerate: !any_nonzero,
        lhs_final: lhs,
        rhs_final: rhs,
        du_p_dt_half: half.du_p_dt,
        du_p_dt_final: samples.last().expect("non-empty").du_p_dt,
    })
}

/// Evolves the parabolic lift alone from `t = 0` to `t_end` and samples it every
/// `every` steps (and at step 0).
pub fn lift_history(
    grid: &Grid,
    data: &WallData,
    nu1: f64,
    dt: f64,
    t_end: f64,
    every: usize,
) -> Result<Vec<LiftSample>> {
    if every == 0 {
        return Err(ChnsError::InvalidParameter(
            "sampling interval must be at least 1".into(),
        ));
    }
    let lift = EllipticLift::new(grid, data, nu1)?;
    let mut state = LiftState::initialize(&lift, data, 0.0)?;
    let n = ((t_end / dt) - 1e-9).ceil().max(0.0) as usize;
    let mut out = vec![LiftSample::from_state(&state, data)?];
    for k in 1..=n {
        state = parabolic_lift_step(&state, &lift, data, dt, nu1)?;
        // keep the clock on the step grid
        state.t = k as f64 * dt;
        if k % every == 0 {
            out.push(LiftSample::from_state(&state, data)?);
        }
    }
    Ok(out)
}

/// `||u||_{V^2}`-type size of the elliptic lift relative to `||h||_{V^{3/2}}`.
pub fn lift_regularity_ratio(u_e: &VectorField, walls: &WallTrace, lx: f64) -> Result<f64> {
    let lap = vector_laplacian(u_e, walls)?;
    let v2 = (u_e.dot(u_e) + grad_sq_vec(u_e, walls)? + lap.dot(&lap)).sqrt();
    let h = crate::boundary::wall_norm(walls, lx, 1.5);
    Ok(if h > 0.0 { v2 / h } else { 0.0 })
}
