//! Coupled IMEX time stepping for the Cahn-Hilliard-Navier-Stokes system.
//!
//! One step:
//! 1. lift update (lifted modes),
//! 2. Cahn-Hilliard with the lagged total velocity, stabilized linear solve,
//! 3. momentum predictor with implicit `(nu1/2) Laplacian`, explicit excess viscosity,
//!    advection and Korteweg force, followed by a Leray projection.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::boundary::WallData;
use crate::diagnostics::{continuous_dependence_metric, DependenceReport, Diagnostics, EnergyRecord, TrajectorySample};
use crate::error::{ChnsError, Result};
use crate::grid::{Grid, ScalarField, VectorField, WallTrace};
use crate::lifting::{parabolic_lift_step, EllipticLift, LiftState};
use crate::norms::h1;
use crate::ops::{
    advect_scalar, advect_velocity, divergence_unchecked, gradient, korteweg_force, laplacian_neumann, leray_project,
    vector_laplacian, viscous_term_nonneg, wall_source,
};
use crate::potential::{eval_df, PotentialSpec, ViscositySpec};
use crate::spectral::{apply_symbol, lambda_x, lambda_y, spectral_truncate, vector_helmholtz_dirichlet, YKind};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    #[default]
    Direct,
    LiftedElliptic,
    LiftedParabolic,
}

impl Mode {
    pub fn is_lifted(self) -> bool {
        self != Mode::Direct
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum ForceForm {
    #[default]
    MuGradPhi,
    PhiGradMu,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolverConfig {
    pub dt: f64,
    pub t_end: f64,
    /// Stabilization constant `S` of the Cahn-Hilliard step.
    pub stabilization: f64,
    pub mode: Mode,
    /// Spectral cutoffs `(n_x, n_y)` applied to `phi` and `mu` after every CH step.
    pub galerkin: Option<(usize, usize)>,
    pub cfl_safety: f64,
    pub force_form: ForceForm,
    pub viscosity: ViscositySpec,
    pub potential: PotentialSpec,
    pub record_every: usize,
    /// Largest admissible `||div u||_inf` after a step.
    pub div_tol: f64,
    /// Pressure-correction form: lag `grad p^n` in the predictor.
    pub incremental: bool,
}

impl SolverConfig {
    pub fn new(dt: f64, t_end: f64, viscosity: ViscositySpec) -> Self {
        Self {
            dt,
            t_end,
            stabilization: 2.0,
            mode: Mode::Direct,
            galerkin: None,
            cfl_safety: 0.4,
            force_form: ForceForm::MuGradPhi,
            viscosity,
            potential: PotentialSpec::default(),
            record_every: 1,
            div_tol: 1e-8,
            incremental: true,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(ChnsError::InvalidParameter(m));
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return bad(format!("dt must be positive, got {}", self.dt));
        }
        if !(self.t_end >= 0.0 && self.t_end.is_finite()) {
            return bad(format!("T_end must be non-negative, got {}", self.t_end));
        }
        if !(self.stabilization >= 0.0) {
            return bad(format!("stabilization must be >= 0, got {}", self.stabilization));
        }
        if !(self.cfl_safety > 0.0) {
            return bad(format!("CFL safety factor must be positive, got {}", self.cfl_safety));
        }
        if self.record_every == 0 {
            return bad("record_every must be at least 1".into());
        }
        self.viscosity.validate()
    }

    pub fn n_steps(&self) -> u64 {
        ((self.t_end / self.dt) - 1e-9).ceil().max(0.0) as u64
    }
}

/// Manufactured source terms, evaluated at the new time level.
pub trait Forcing: Send + Sync {
    fn ch_source(&self, grid: &Grid, t: f64) -> ScalarField;
    fn momentum_source(&self, grid: &Grid, t: f64) -> VectorField;
}

#[derive(Clone, Debug)]
pub struct SimState {
    pub t: f64,
    pub step: u64,
    /// Total velocity.
    pub u: VectorField,
    pub phi: ScalarField,
    pub mu: ScalarField,
    pub p: ScalarField,
    pub lift: Option<LiftState>,
    /// `u` minus the active lift (lifted modes only).
    pub ubar: Option<VectorField>,
}

/// Receives every emitted record; used for streaming output.
pub trait Observer {
    fn on_record(&mut self, state: &SimState, record: &EnergyRecord) -> Result<()>;
}

/// Stores trajectory snapshots at the record cadence.
#[derive(Debug, Default)]
pub struct TrajectoryRecorder {
    pub samples: Vec<TrajectorySample>,
    data: Option<WallData>,
}

impl TrajectoryRecorder {
    pub fn new(data: &WallData) -> Self {
        Self {
            samples: Vec::new(),
            data: Some(data.clone()),
        }
    }
}

impl Observer for TrajectoryRecorder {
    fn on_record(&mut self, state: &SimState, _record: &EnergyRecord) -> Result<()> {
        let nx = state.u.grid().nx();
        let (h, dh) = match &self.data {
            Some(d) => (d.eval_wall(state.t)?, d.eval_wall_dt(state.t)?),
            None => (WallTrace::zeros(nx), WallTrace::zeros(nx)),
        };
        self.samples.push(TrajectorySample {
            t: state.t,
            u: state.u.clone(),
            phi: state.phi.clone(),
            h,
            dh,
        });
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct RunOutput {
    pub state: SimState,
    pub records: Vec<EnergyRecord>,
}

#[derive(Clone)]
pub struct Simulation {
    grid: Grid,
    config: SolverConfig,
    data: WallData,
    lift: EllipticLift,
    diagnostics: Diagnostics,
    forcing: Option<Arc<dyn Forcing>>,
}

impl std::fmt::Debug for Simulation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Simulation")
            .field("grid", &self.grid)
            .field("config", &self.config)
            .field("forcing", &self.forcing.is_some())
            .finish()
    }
}

impl Simulation {
    pub fn new(grid: &Grid, config: SolverConfig, data: WallData) -> Result<Self> {
        config.validate()?;
        if data.profile().bottom.len() != grid.nx() || data.lx() != grid.lx() {
            return Err(ChnsError::ShapeMismatch("wall data built for another grid".into()));
        }
        let lift = EllipticLift::new(grid, &data, config.viscosity.nu1)?;
        let diagnostics = Diagnostics::new(
            data.clone(),
            lift.clone(),
            config.mode,
            config.viscosity.nu_gap,
            config.potential.q,
        );
        Ok(Self {
            grid: grid.clone(),
            config,
            data,
            lift,
            diagnostics,
            forcing: None,
        })
    }

    pub fn with_forcing(mut self, forcing: Arc<dyn Forcing>) -> Self {
        self.forcing = Some(forcing);
        self
    }

    /// Same setup with a different configuration (the lift is reused when `nu1` matches).
    pub fn with_config(&self, config: SolverConfig) -> Result<Self> {
        if config.viscosity.nu1 != self.config.viscosity.nu1 {
            let mut s = Self::new(&self.grid, config, self.data.clone())?;
            s.forcing = self.forcing.clone();
            return Ok(s);
        }
        config.validate()?;
        let diagnostics = Diagnostics::new(
            self.data.clone(),
            self.lift.clone(),
            config.mode,
            config.viscosity.nu_gap,
            config.potential.q,
        );
        Ok(Self {
            grid: self.grid.clone(),
            config,
            data: self.data.clone(),
            lift: self.lift.clone(),
            diagnostics,
            forcing: self.forcing.clone(),
        })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }
    pub fn config(&self) -> &SolverConfig {
        &self.config
    }
    pub fn data(&self) -> &WallData {
        &self.data
    }
    pub fn elliptic_lift(&self) -> &EllipticLift {
        &self.lift
    }
    pub fn diagnostics(&self) -> &Diagnostics {
        &self.diagnostics
    }

    /// Builds the state at `t = 0`, with `mu = -Laplacian phi + F'(phi)`.
    pub fn initial_state(&self, phi0: ScalarField, u0: VectorField) -> Result<SimState> {
        phi0.check_grid(&self.grid)?;
        u0.check_grid(&self.grid)?;
        u0.check_walls()?;
        if !phi0.is_finite() || !u0.is_finite() {
            return Err(ChnsError::InvalidParameter("initial data must be finite".into()));
        }
        let mu = chemical_potential(&phi0);
        let (lift, ubar) = if self.config.mode.is_lifted() {
            let l = LiftState::initialize(&self.lift, &self.data, 0.0)?;
            let ubar = u0.sub(&l.u_p);
            (Some(l), Some(ubar))
        } else {
            (None, None)
        };
        Ok(SimState {
            t: 0.0,
            step: 0,
            u: u0,
            phi: phi0,
            mu,
            p: ScalarField::zeros(&self.grid),
            lift,
            ubar,
        })
    }

    /// `c min(h^2 / (nu - nu1)_max, h / ||u||_inf)`.
    pub fn cfl_limit(&self, u: &VectorField) -> f64 {
        let h = self.grid.dx().min(self.grid.dy());
        let c = self.config.cfl_safety;
        let visc = c * h * h / self.config.viscosity.max_excess();
        let speed = u.max_abs();
        if speed > 0.0 {
            visc.min(c * h / speed)
        } else {
            visc
        }
    }

    fn check_cfl(&self, u: &VectorField) -> Result<()> {
        let dt = self.config.dt;
        let h = self.grid.dx().min(self.grid.dy());
        let c = self.config.cfl_safety;
        let visc = c * h * h / self.config.viscosity.max_excess();
        if dt > visc {
            return Err(ChnsError::CflViolation {
                dt,
                limit: visc,
                reason: "explicit excess viscosity".into(),
            });
        }
        let speed = u.max_abs();
        if speed > 0.0 && dt > c * h / speed {
            return Err(ChnsError::CflViolation {
                dt,
                limit: c * h / speed,
                reason: format!("advection with |u|_inf = {speed:.3e}"),
            });
        }
        Ok(())
    }

    /// Cahn-Hilliard step with advecting velocity `v`:
    /// `(phi1 - phi)/dt + div(v phi) = Laplacian mu1 + s`,
    /// `mu1 = -Laplacian phi1 + F'(phi) + S (phi1 - phi)`.
    pub fn ch_substep(&self, phi: &ScalarField, v: &VectorField, t1: f64) -> Result<(ScalarField, ScalarField)> {
        let dt = self.config.dt;
        let s = self.config.stabilization;
        let grid = &self.grid;
        let adv = advect_scalar(v, phi)?;
        let g = phi.map(|p| eval_df(p) - s * p);
        // rhs = phi/dt - adv + src, with the -K g part applied in transform space
        let mut rhs = phi.scale(1.0 / dt);
        rhs.axpy(-1.0, &adv);
        if let Some(f) = &self.forcing {
            rhs.axpy(1.0, &f.ch_source(grid, t1));
        }
        let lap_g = laplacian_neumann(&g);
        rhs.axpy(1.0, &lap_g);
        let phi1 = apply_symbol(grid, YKind::Cos, rhs.values(), |c, k| {
            let kk = lambda_x(grid, c) + lambda_y(grid, k);
            1.0 / (1.0 / dt + kk * kk + s * kk)
        });
        let phi1 = ScalarField::from_vec(grid, phi1)?;
        let lap1 = laplacian_neumann(&phi1);
        let mut mu1 = g.sub(&lap1);
        mu1.axpy(s, &phi1);
        if !phi1.is_finite() || !mu1.is_finite() {
            return Err(ChnsError::SolverDiverged("non-finite phi or mu".into()));
        }
        Ok((phi1, mu1))
    }

    /// Explicit right-hand side shared by both momentum forms.
    fn momentum_explicit(
        &self,
        state: &SimState,
        phi1: &ScalarField,
        mu1: &ScalarField,
        t1: f64,
    ) -> Result<VectorField> {
        let nu1 = self.config.viscosity.nu1;
        let h0 = self.data.eval_wall(state.t)?;
        let excess = self.config.viscosity.eval_field(&state.phi).map(|n| (n - nu1).max(0.0));
        let mut rhs = viscous_term_nonneg(&excess, &state.u, &h0)?;
        rhs.axpy(-1.0, &advect_velocity(&state.u, &state.u)?);
        rhs.axpy(
            1.0,
            &korteweg_force(mu1, phi1, self.config.force_form == ForceForm::PhiGradMu)?,
        );
        if let Some(f) = &self.forcing {
            rhs.axpy(1.0, &f.momentum_source(&self.grid, t1));
        }
        if self.config.incremental {
            rhs.axpy(-1.0, &gradient(&state.p));
        }
        Ok(rhs)
    }

    fn finish_velocity(&self, w: &VectorField, p0: &ScalarField) -> Result<(VectorField, ScalarField)> {
        let (w1, q) = leray_project(w)?;
        let mut p = q.scale(1.0 / self.config.dt);
        if self.config.incremental {
            p.axpy(1.0, p0);
        }
        Ok((w1, p))
    }

    /// Momentum step for the total velocity with wall data `h(t1)` through ghosts.
    pub fn ns_substep_direct(
        &self,
        state: &SimState,
        phi1: &ScalarField,
        mu1: &ScalarField,
    ) -> Result<(VectorField, ScalarField)> {
        let dt = self.config.dt;
        let nu1 = self.config.viscosity.nu1;
        let t1 = state.t + dt;
        let h1 = self.data.eval_wall(t1)?;
        let mut f = self.momentum_explicit(state, phi1, mu1, t1)?;
        f.axpy(1.0 / dt, &state.u);
        f.axpy(0.5 * nu1, &wall_source(&self.grid, &h1));
        let star = vector_helmholtz_dirichlet(&f, 1.0 / dt, 0.5 * nu1);
        self.finish_velocity(&star, &state.p)
    }

    /// Momentum step for `ubar = u - L` with homogeneous wall data, `L` the lift
    /// at the new time level. Returns `(ubar1, p1)`.
    pub fn ns_substep_lifted(
        &self,
        state: &SimState,
        lift1: &LiftState,
        phi1: &ScalarField,
        mu1: &ScalarField,
    ) -> Result<(VectorField, ScalarField)> {
        let dt = self.config.dt;
        let nu1 = self.config.viscosity.nu1;
        let t1 = state.t + dt;
        let ubar = state
            .ubar
            .as_ref()
            .ok_or_else(|| ChnsError::ModeMismatch("lifted step needs ubar in the state".into()))?;
        let h1 = self.data.eval_wall(t1)?;
        let (l1, dl) = match self.config.mode {
            Mode::LiftedElliptic => (&lift1.u_e, &lift1.du_e_dt),
            Mode::LiftedParabolic => (&lift1.u_p, &lift1.du_p_dt),
            Mode::Direct => return Err(ChnsError::ModeMismatch("direct mode has no lift".into())),
        };
        let mut f = self.momentum_explicit(state, phi1, mu1, t1)?;
        f.axpy(1.0 / dt, ubar);
        f.axpy(0.5 * nu1, &vector_laplacian(l1, &h1)?);
        f.axpy(-1.0, dl);
        let star = vector_helmholtz_dirichlet(&f, 1.0 / dt, 0.5 * nu1);
        self.finish_velocity(&star, &state.p)
    }

    fn next_lift(&self, state: &SimState, t1: f64) -> Result<Option<LiftState>> {
        let nu1 = self.config.viscosity.nu1;
        Ok(match (self.config.mode, &state.lift) {
            (Mode::Direct, _) => None,
            (Mode::LiftedElliptic, _) => Some(LiftState::initialize(&self.lift, &self.data, t1)?),
            (Mode::LiftedParabolic, Some(l)) => {
                Some(parabolic_lift_step(l, &self.lift, &self.data, self.config.dt, nu1)?)
            }
            (Mode::LiftedParabolic, None) => {
                return Err(ChnsError::ModeMismatch("parabolic mode needs a lift state".into()))
            }
        })
    }

    pub fn step(&self, state: &SimState) -> Result<SimState> {
        self.check_cfl(&state.u)?;
        let step = state.step + 1;
        let t1 = step as f64 * self.config.dt;
        let lift1 = self.next_lift(state, t1)?;

        let (mut phi1, mut mu1) = self.ch_substep(&state.phi, &state.u, t1)?;
        if let Some((nx_cut, ny_cut)) = self.config.galerkin {
            phi1 = spectral_truncate(&phi1, nx_cut, ny_cut)?;
            mu1 = spectral_truncate(&mu1, nx_cut, ny_cut)?;
        }

        let (u1, p1, ubar1) = match &lift1 {
            None => {
                let (u, p) = self.ns_substep_direct(state, &phi1, &mu1)?;
                (u, p, None)
            }
            Some(l) => {
                let (w, p) = self.ns_substep_lifted(state, l, &phi1, &mu1)?;
                let base = if self.config.mode == Mode::LiftedParabolic {
                    &l.u_p
                } else {
                    &l.u_e
                };
                (w.add(base), p, Some(w))
            }
        };
        if !u1.is_finite() {
            return Err(ChnsError::SolverDiverged(format!("non-finite velocity at t = {t1}")));
        }
        let div = divergence_unchecked(&u1).max_abs();
        if div > self.config.div_tol {
            return Err(ChnsError::SolverDiverged(format!(
                "divergence {div:.3e} exceeds {:.1e} at t = {t1}",
                self.config.div_tol
            )));
        }
        Ok(SimState {
            t: t1,
            step,
            u: u1,
            phi: phi1,
            mu: mu1,
            p: p1,
            lift: lift1,
            ubar: ubar1,
        })
    }

    /// Advances to `T_end`, emitting a record at step 0, every `record_every`
    /// steps and at the final step. Records stream to the observers as they are
    /// produced, so a failure leaves every earlier record delivered.
    pub fn run(&self, initial: SimState, observers: &mut [&mut dyn Observer]) -> Result<RunOutput> {
        let n = self.config.n_steps();
        let mut records = Vec::new();
        let mut state = initial;
        if n == 0 {
            return Ok(RunOutput { state, records });
        }
        let emit = |state: &SimState, records: &mut Vec<EnergyRecord>, obs: &mut [&mut dyn Observer]| -> Result<()> {
            let rec = self.diagnostics.energy(state)?;
            for o in obs.iter_mut() {
                o.on_record(state, &rec)?;
            }
            records.push(rec);
            Ok(())
        };
        emit(&state, &mut records, observers)?;
        for k in 1..=n {
            state = self.step(&state)?;
            if k % self.config.record_every as u64 == 0 || k == n {
                emit(&state, &mut records, observers)?;
            }
        }
        Ok(RunOutput { state, records })
    }

    /// Runs the untruncated problem and one truncated run per cutoff `n`, the
    /// cutoff mapping to `(min(n, nx/2), min(n, ny))`, and reports
    /// `||phi_n(T) - phi(T)||_{H^1}`.
    pub fn galerkin_study(&self, initial: &SimState, cutoffs: &[usize], threads: usize) -> Result<GalerkinReport> {
        if cutoffs.is_empty() || cutoffs.windows(2).any(|w| w[1] <= w[0]) {
            return Err(ChnsError::InvalidParameter(
                "cutoffs must be strictly increasing".into(),
            ));
        }
        let (nx, ny) = (self.grid.nx(), self.grid.ny());
        let mut configs = vec![None];
        configs.extend(cutoffs.iter().map(|&n| Some((n.min(nx / 2), n.min(ny)))));
        let finals = run_members(&configs, threads.max(1), |cut| {
            let mut cfg = self.config.clone();
            cfg.galerkin = *cut;
            let sim = self.with_config(cfg)?;
            Ok(sim.run(initial.clone(), &mut [])?.state.phi)
        })?;
        let full = &finals[0];
        let errors: Vec<f64> = finals[1..].iter().map(|p| h1(&p.sub(full))).collect();
        Ok(GalerkinReport {
            cutoffs: cutoffs.to_vec(),
            errors,
        })
    }
}

/// What the perturbation pair changes relative to the base run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Perturbation {
    /// Wall data scaled by `1 + eps`.
    #[default]
    Boundary,
    /// `eps cos(2 pi x / Lx) cos(pi y / Ly)` added to the initial `phi`.
    InitialPhi,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PairReport {
    pub eps: f64,
    pub full: DependenceReport,
    pub half: DependenceReport,
    /// `lhs(eps) / lhs(eps / 2)`, `None` when both vanish.
    pub lhs_ratio: Option<f64>,
}

impl Simulation {
    /// Same configuration with other wall data.
    pub fn with_data(&self, data: WallData) -> Result<Self> {
        let mut s = Self::new(&self.grid, self.config.clone(), data)?;
        s.forcing = self.forcing.clone();
        Ok(s)
    }

    /// Runs the base problem and two perturbed copies (`eps`, `eps / 2`) and
    /// compares each perturbed trajectory with the base one.
    pub fn pair_study(
        &self,
        phi0: &ScalarField,
        u0: &VectorField,
        kind: Perturbation,
        eps: f64,
        threads: usize,
    ) -> Result<PairReport> {
        if !eps.is_finite() {
            return Err(ChnsError::InvalidParameter("perturbation size must be finite".into()));
        }
        let (lx, ly) = (self.grid.lx(), self.grid.ly());
        let bump = ScalarField::from_fn(&self.grid, |x, y| {
            (2.0 * std::f64::consts::PI * x / lx).cos() * (std::f64::consts::PI * y / ly).cos()
        });
        let members = [0.0, eps, 0.5 * eps];
        let runs = run_members(&members, threads, |&e| {
            let (sim, phi) = match kind {
                Perturbation::Boundary if e != 0.0 => (self.with_data(self.data.scaled(1.0 + e))?, phi0.clone()),
                Perturbation::InitialPhi => {
                    let mut p = phi0.clone();
                    p.axpy(e, &bump);
                    (self.clone(), p)
                }
                Perturbation::Boundary => (self.clone(), phi0.clone()),
            };
            let mut rec = TrajectoryRecorder::new(sim.data());
            sim.run(sim.initial_state(phi, u0.clone())?, &mut [&mut rec])?;
            Ok(rec.samples)
        })?;
        let full = continuous_dependence_metric(&runs[0], &runs[1], lx)?;
        let half = continuous_dependence_metric(&runs[0], &runs[2], lx)?;
        let lhs_ratio = if half.lhs > 0.0 {
            Some(full.lhs / half.lhs)
        } else {
            None
        };
        Ok(PairReport {
            eps,
            full,
            half,
            lhs_ratio,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GalerkinReport {
    pub cutoffs: Vec<usize>,
    pub errors: Vec<f64>,
}

impl GalerkinReport {
    /// Errors are non-increasing (within relative `tol`) for cutoffs `>= from`.
    pub fn non_increasing_from(&self, from: usize, tol: f64) -> bool {
        let tail: Vec<f64> = self
            .cutoffs
            .iter()
            .zip(&self.errors)
            .filter(|(c, _)| **c >= from)
            .map(|(_, e)| *e)
            .collect();
        tail.windows(2).all(|w| w[1] <= w[0] * (1.0 + tol) + 1e-14)
    }
}

/// Evaluates `job` on every item with at most `threads` concurrent workers;
/// results keep the input order.
pub fn run_members<T: Sync, R: Send>(
    items: &[T],
    threads: usize,
    job: impl Fn(&T) -> Result<R> + Sync,
) -> Result<Vec<R>> {
    let mut out = Vec::with_capacity(items.len());
    for chunk in items.chunks(threads.max(1)) {
        let results: Vec<Result<R>> = std::thread::scope(|s| {
            let handles: Vec<_> = chunk.iter().map(|it| s.spawn(|| job(it))).collect();
            handles
                .into_iter()
                .map(|h| {
                    h.join()
                        .unwrap_or_else(|_| Err(ChnsError::SolverDiverged("worker panicked".into())))
                })
                .collect()
        });
        for r in results {
            out.push(r?);
        }
    }
    Ok(out)
}

pub fn chemical_potential(phi: &ScalarField) -> ScalarField {
    let lap = laplacian_neumann(phi);
    phi.zip_with(&lap, |p, l| -l + eval_df(p))
}

/// Per-step amplification of a single `K`-mode of the linearized CH step about
/// `phi = 0` with `F''(0) = -4`.
pub fn linear_amplification(k: f64, dt: f64, s: f64) -> f64 {
    (1.0 / dt + (4.0 + s) * k) / (1.0 / dt + k * k + s * k)
}
