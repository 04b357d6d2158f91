//! TOML run configuration.
//!
//! Only `[grid]` and `[time]` are required; every other section falls back to
//! the defaults listed in the README.

use std::path::Path;

use chns_core::boundary::{Amplitude, WallData, WallProfile};
use chns_core::initial::{PhiInit, VelocityInit};
use chns_core::potential::{PotentialSpec, ViscositySpec};
use chns_core::solver::{ForceForm, Mode, Perturbation, SolverConfig};
use chns_core::Grid;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub grid: GridSection,
    pub time: TimeSection,
    #[serde(default)]
    pub solver: SolverSection,
    #[serde(default)]
    pub potential: PotentialSpec,
    #[serde(default)]
    pub viscosity: ViscositySpec,
    #[serde(default)]
    pub boundary: BoundarySection,
    #[serde(default)]
    pub initial: InitialSection,
    #[serde(default)]
    pub output: OutputSection,
    #[serde(default)]
    pub experiment: Experiment,
    #[serde(default)]
    pub checks: CheckSection,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    pub nx: usize,
    pub ny: usize,
    #[serde(default = "one")]
    pub lx: f64,
    #[serde(default = "one")]
    pub ly: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeSection {
    pub dt: f64,
    pub t_end: f64,
    #[serde(default = "one_usize")]
    pub record_every: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverSection {
    pub mode: Mode,
    pub stabilization: f64,
    pub cfl_safety: f64,
    pub force_form: ForceForm,
    pub incremental: bool,
    pub div_tol: f64,
    /// `[n_x, n_y]` spectral cutoffs applied after every CH step.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub galerkin: Option<[usize; 2]>,
}

impl Default for SolverSection {
    fn default() -> Self {
        Self {
            mode: Mode::Direct,
            stabilization: 2.0,
            cfl_safety: 0.4,
            force_form: ForceForm::MuGradPhi,
            incremental: true,
            div_tol: 1e-8,
            galerkin: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BoundarySection {
    pub bottom: WallProfile,
    pub top: WallProfile,
    pub amplitude: Amplitude,
}

impl Default for BoundarySection {
    fn default() -> Self {
        Self {
            bottom: WallProfile::Zero,
            top: WallProfile::Zero,
            amplitude: Amplitude::CustomStatic { a: 1.0 },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct InitialSection {
    pub phi: PhiInit,
    pub u: VelocityInit,
}

impl Default for InitialSection {
    fn default() -> Self {
        Self {
            phi: PhiInit::Noise {
                mean: 0.0,
                amplitude: 1e-2,
                seed: 0,
            },
            u: VelocityInit::Zero,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputSection {
    pub directory: String,
    /// Snapshot cadence in steps (checked at record steps); 0 writes only the final state.
    pub snapshot_every: usize,
}

impl Default for OutputSection {
    fn default() -> Self {
        Self {
            directory: "out".into(),
            snapshot_every: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Experiment {
    #[default]
    Single,
    Pair {
        #[serde(default)]
        perturbation: Perturbation,
        eps: f64,
    },
    Galerkin {
        cutoffs: Vec<usize>,
    },
    Longtime {
        #[serde(default = "one")]
        gamma: f64,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CheckSection {
    pub mass_tol: f64,
    pub energy_slack: f64,
    /// Admissible `lhs(eps) / lhs(eps / 2)` window for `pair`.
    pub pair_window: [f64; 2],
    /// Relative slack for the Galerkin monotonicity check.
    pub galerkin_tol: f64,
    /// Largest admissible Couette lift error for `lift-check`.
    pub lift_tol: f64,
    pub assumption_range: [f64; 2],
    pub assumption_samples: usize,
}

impl Default for CheckSection {
    fn default() -> Self {
        Self {
            mass_tol: 1e-10,
            energy_slack: 1e-10,
            pair_window: [1.6, 2.4],
            galerkin_tol: 1e-3,
            lift_tol: 1e-10,
            assumption_range: [-5.0, 5.0],
            assumption_samples: 10_001,
        }
    }
}

fn one() -> f64 {
    1.0
}

fn one_usize() -> usize {
    1
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| CliError::Parse(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Parse(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> Result<String, CliError> {
        toml::to_string(self).map_err(|e| CliError::Parse(format!("cannot serialize config: {e}")))
    }

    /// Collects every violation instead of stopping at the first.
    pub fn validate(&self) -> Result<(), CliError> {
        let mut errs = Vec::new();
        let grid = match self.grid() {
            Ok(g) => Some(g),
            Err(e) => {
                errs.push(format!("grid: {e}"));
                None
            }
        };
        if let Err(e) = self.solver_config().validate() {
            errs.push(format!("solver: {e}"));
        }
        if let Err(e) = self.boundary.amplitude.validate() {
            errs.push(format!("boundary.amplitude: {e}"));
        }
        if let Some(g) = &grid {
            if let Some([cx, cy]) = self.solver.galerkin {
                if cx > g.nx() / 2 || cy > g.ny() {
                    errs.push(format!(
                        "solver.galerkin: cutoffs must satisfy n_x <= {} and n_y <= {}",
                        g.nx() / 2,
                        g.ny()
                    ));
                }
            }
            if let Err(e) = self.initial.phi.build(g) {
                errs.push(format!("initial.phi: {e}"));
            }
        }
        match &self.experiment {
            Experiment::Single => {}
            Experiment::Pair { eps, .. } => {
                if !eps.is_finite() || *eps < 0.0 {
                    errs.push(format!("experiment.eps must be finite and >= 0, got {eps}"));
                }
            }
            Experiment::Galerkin { cutoffs } => {
                if cutoffs.is_empty() || cutoffs.windows(2).any(|w| w[1] <= w[0]) || cutoffs[0] == 0 {
                    errs.push("experiment.cutoffs must be positive and strictly increasing".into());
                }
            }
            Experiment::Longtime { gamma } => {
                if !(*gamma > 0.0) {
                    errs.push(format!("experiment.gamma must be positive, got {gamma}"));
                }
                if self.solver.mode != Mode::LiftedParabolic {
                    errs.push("longtime experiments need solver.mode = \"lifted_parabolic\"".into());
                }
                if !self.viscosity.is_constant() {
                    errs.push("longtime experiments need viscosity.law = \"constant\"".into());
                }
            }
        }
        let c = &self.checks;
        if !(c.mass_tol >= 0.0 && c.energy_slack >= 0.0 && c.galerkin_tol >= 0.0 && c.lift_tol >= 0.0) {
            errs.push("checks: tolerances must be non-negative".into());
        }
        if !(c.pair_window[0] <= c.pair_window[1]) {
            errs.push("checks.pair_window must be ordered".into());
        }
        if errs.is_empty() {
            Ok(())
        } else {
            Err(CliError::Validation(errs))
        }
    }

    pub fn grid(&self) -> chns_core::Result<Grid> {
        Grid::new(self.grid.nx, self.grid.ny, self.grid.lx, self.grid.ly)
    }

    pub fn solver_config(&self) -> SolverConfig {
        let mut c = SolverConfig::new(self.time.dt, self.time.t_end, self.viscosity.clone());
        c.stabilization = self.solver.stabilization;
        c.mode = self.solver.mode;
        c.galerkin = self.solver.galerkin.map(|[x, y]| (x, y));
        c.cfl_safety = self.solver.cfl_safety;
        c.force_form = self.solver.force_form;
        c.potential = self.potential.clone();
        c.record_every = self.time.record_every;
        c.div_tol = self.solver.div_tol;
        c.incremental = self.solver.incremental;
        c
    }

    pub fn wall_data(&self, grid: &Grid) -> chns_core::Result<WallData> {
        WallData::from_profiles(
            grid,
            &self.boundary.bottom,
            &self.boundary.top,
            self.boundary.amplitude.clone(),
        )
    }

    /// Replaces the noise seed of the initial `phi`, if it has one.
    pub fn with_seed(mut self, seed: Option<u64>) -> Self {
        if let Some(s) = seed {
            self.initial.phi = self.initial.phi.with_seed(s);
        }
        self
    }
}
