//! Subcommand implementations. Each writes `summary.json` into the output
//! directory and turns failed checks into [`CliError::CheckFailed`].

use std::path::{Path, PathBuf};

use chns_core::boundary::{certify_decay, check_compatibility, WallData};
use chns_core::diagnostics::{energy_inequality_report, zlem_tail_check, EnergyRecord};
use chns_core::lifting::{elliptic_lift, lift_difference_report, lift_history};
use chns_core::norms::{l2, l2_vec};
use chns_core::ops::divergence;
use chns_core::potential::assess_assumptions;
use chns_core::solver::{RunOutput, SimState, Simulation};
use chns_core::{ChnsError, VectorField};
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::{Experiment, RunConfig};
use crate::error::CliError;
use crate::output::{validate_records, write_json, write_state, RunWriter};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

impl Check {
    fn new(name: &str, pass: bool, detail: String) -> Self {
        Self {
            name: name.into(),
            pass,
            detail,
        }
    }
}

/// Everything a subcommand needs besides the config itself.
#[derive(Clone, Debug)]
pub struct Context {
    pub out_dir: PathBuf,
    pub threads: usize,
}

impl Context {
    pub fn new(cfg: &RunConfig, out: Option<PathBuf>) -> Self {
        Self {
            out_dir: out.unwrap_or_else(|| PathBuf::from(&cfg.output.directory)),
            threads: thread_budget(),
        }
    }
}

/// Available parallelism, capped by `CHNS_THREADS` when set.
pub fn thread_budget() -> usize {
    let avail = std::thread::available_parallelism().map_or(1, |n| n.get());
    match std::env::var("CHNS_THREADS")
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
    {
        Some(cap) if cap > 0 => cap.min(avail),
        _ => avail,
    }
}

fn finish(dir: &Path, command: &str, mut body: Value, checks: Vec<Check>) -> Result<(), CliError> {
    let failed: Vec<String> = checks
        .iter()
        .filter(|c| !c.pass)
        .map(|c| format!("{}: {}", c.name, c.detail))
        .collect();
    body["command"] = json!(command);
    body["passed"] = json!(failed.is_empty());
    body["checks"] = serde_json::to_value(&checks).expect("checks serialize");
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    write_json(&dir.join("summary.json"), &body)?;
    for c in &checks {
        println!("[{}] {}: {}", if c.pass { "pass" } else { "FAIL" }, c.name, c.detail);
    }
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::CheckFailed(failed))
    }
}

struct Setup {
    sim: Simulation,
    initial: SimState,
    u0: VectorField,
}

fn setup(cfg: &RunConfig) -> Result<Setup, CliError> {
    let grid = cfg.grid()?;
    let data = cfg.wall_data(&grid)?;
    let sim = Simulation::new(&grid, cfg.solver_config(), data)?;
    let phi0 = cfg.initial.phi.build(&grid)?;
    let u0 = cfg.initial.u.build(&grid);
    if !check_compatibility(&u0, sim.data(), 1e-8) {
        eprintln!("warning: initial velocity does not match the wall data at t = 0");
    }
    let initial = sim.initial_state(phi0, u0.clone())?;
    Ok(Setup { sim, initial, u0 })
}

fn archive_config(cfg: &RunConfig, dir: &Path) -> Result<(), CliError> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let path = dir.join("config.toml");
    std::fs::write(&path, cfg.to_toml()?).map_err(|e| CliError::io(&path, e))
}

/// Runs the configured problem with streamed output.
fn simulate(cfg: &RunConfig, ctx: &Context, s: &Setup) -> Result<RunOutput, CliError> {
    archive_config(cfg, &ctx.out_dir)?;
    let mut writer = RunWriter::create(&ctx.out_dir, cfg.output.snapshot_every)?;
    let out = s.sim.run(s.initial.clone(), &mut [&mut writer]);
    if let Some(e) = writer.take_failure() {
        return Err(e);
    }
    let out = out?;
    write_state(&ctx.out_dir.join("snapshots"), "final", &out.state)?;
    Ok(out)
}

fn final_norms(state: &SimState) -> Result<Value, ChnsError> {
    Ok(json!({
        "t": state.t,
        "steps": state.step,
        "phi_l2": l2(&state.phi),
        "u_l2": l2_vec(&state.u),
        "max_div": divergence(&state.u)?.max_abs(),
        "mass": state.phi.mean(),
    }))
}

fn record_checks(cfg: &RunConfig, sim: &Simulation, records: &[EnergyRecord]) -> Result<(Vec<Check>, Value), CliError> {
    let mut checks = Vec::new();
    if let (Some(first), Some(last)) = (records.first(), records.last()) {
        let drift = (last.mass - first.mass).abs();
        checks.push(Check::new(
            "mass",
            drift < cfg.checks.mass_tol,
            format!("|mass(T) - mass(0)| = {drift:.3e} (tol {:.1e})", cfg.checks.mass_tol),
        ));
    }
    let bad = records.iter().filter(|r| !r.is_additive()).count();
    checks.push(Check::new(
        "additivity",
        bad == 0,
        format!(
            "{bad} of {} records break total = kinetic + interfacial + bulk",
            records.len()
        ),
    ));
    if records.len() < 2 {
        return Ok((checks, Value::Null));
    }
    let report = energy_inequality_report(records, sim.data(), cfg.viscosity.nu_gap, cfg.checks.energy_slack)?;
    if sim.data().is_zero() {
        checks.push(Check::new(
            "energy_monotone",
            report.max_increase <= cfg.checks.energy_slack,
            format!("max record-to-record increase {:.3e}", report.max_increase),
        ));
        // the trapezoid rule overestimates a decaying rate on coarse records
        if cfg.time.record_every == 1 {
            if let Some(ok) = report.balance_ok {
                checks.push(Check::new(
                    "dissipation_balance",
                    ok,
                    format!("int dissipation = {:.6e}", report.dissipation_integral),
                ));
            }
        }
    }
    Ok((checks, serde_json::to_value(&report).expect("report serializes")))
}

pub fn run(cfg: &RunConfig, ctx: &Context) -> Result<(), CliError> {
    let s = setup(cfg)?;
    let out = simulate(cfg, ctx, &s)?;
    let (checks, report) = record_checks(cfg, &s.sim, &out.records)?;
    let body = json!({
        "records": out.records.len(),
        "final": final_norms(&out.state)?,
        "final_energy": out.records.last(),
        "energy_inequality": report,
    });
    finish(&ctx.out_dir, "run", body, checks)
}

pub fn pair(cfg: &RunConfig, ctx: &Context) -> Result<(), CliError> {
    let Experiment::Pair { perturbation, eps } = &cfg.experiment else {
        return Err(CliError::Validation(vec![
            "pair needs experiment.kind = \"pair\"".into()
        ]));
    };
    let s = setup(cfg)?;
    let report = s
        .sim
        .pair_study(&s.initial.phi, &s.u0, *perturbation, *eps, ctx.threads)?;
    let mut checks = Vec::new();
    if *eps == 0.0 {
        let all_zero = report.full.lhs == 0.0 && report.half.lhs == 0.0 && report.full.rhs == 0.0;
        checks.push(Check::new(
            "zero_perturbation",
            all_zero,
            format!("lhs = {:e}, rhs = {:e}", report.full.lhs, report.full.rhs),
        ));
    } else {
        let [lo, hi] = cfg.checks.pair_window;
        let ok = report.lhs_ratio.is_some_and(|r| r >= lo && r <= hi);
        checks.push(Check::new(
            "halving_ratio",
            ok,
            format!("lhs(eps)/lhs(eps/2) = {:?} (window [{lo}, {hi}])", report.lhs_ratio),
        ));
    }
    let body = json!({ "pair": report });
    finish(&ctx.out_dir, "pair", body, checks)
}

pub fn galerkin(cfg: &RunConfig, ctx: &Context) -> Result<(), CliError> {
    let Experiment::Galerkin { cutoffs } = &cfg.experiment else {
        return Err(CliError::Validation(vec![
            "galerkin needs experiment.kind = \"galerkin\"".into(),
        ]));
    };
    let s = setup(cfg)?;
    let report = s.sim.galerkin_study(&s.initial, cutoffs, ctx.threads)?;
    // the coarsest cutoff is allowed to be pre-asymptotic
    let from = if cutoffs.len() >= 3 { cutoffs[1] } else { cutoffs[0] };
    let ok = report.non_increasing_from(from, cfg.checks.galerkin_tol);
    let checks = vec![Check::new(
        "non_increasing",
        ok,
        format!(
            "H1 errors {:?} for cutoffs {:?}, checked from n = {from}",
            report.errors, report.cutoffs
        ),
    )];
    finish(&ctx.out_dir, "galerkin", json!({ "galerkin": report }), checks)
}

fn nearest(records: &[EnergyRecord], t: f64) -> Option<&EnergyRecord> {
    records
        .iter()
        .min_by(|a, b| (a.t - t).abs().total_cmp(&(b.t - t).abs()))
}

pub fn longtime(cfg: &RunConfig, ctx: &Context) -> Result<(), CliError> {
    let Experiment::Longtime { gamma } = &cfg.experiment else {
        return Err(CliError::Validation(vec![
            "longtime needs experiment.kind = \"longtime\"".into(),
        ]));
    };
    let s = setup(cfg)?;
    let t_grid: Vec<f64> = (0..=cfg.time.t_end.ceil().max(1.0) as usize)
        .map(|k| k as f64)
        .collect();
    let decay = certify_decay(s.sim.data(), *gamma, &t_grid)?;
    let out = simulate(cfg, ctx, &s)?;
    let recs = &out.records;
    let mut checks = vec![Check::new(
        "decay_certificate",
        decay.all_pass(),
        format!("{} with gamma = {gamma}", decay.family),
    )];
    let t_end = out.state.t;
    match (nearest(recs, 1.0), recs.last(), nearest(recs, 0.5 * t_end)) {
        (Some(early), Some(last), Some(mid)) if recs.len() >= 4 => {
            checks.push(Check::new(
                "res_phi_decay",
                last.res_phi < 0.1 * early.res_phi,
                format!(
                    "res_phi({}) = {:.3e}, res_phi({}) = {:.3e}",
                    last.t, last.res_phi, early.t, early.res_phi
                ),
            ));
            checks.push(Check::new(
                "res_u_decay",
                last.res_u < 0.1 * early.res_u,
                format!(
                    "res_u({}) = {:.3e}, res_u({}) = {:.3e}",
                    last.t, last.res_u, early.t, early.res_u
                ),
            ));
            let (a_end, a_mid) = (last.a.unwrap_or(f64::NAN), mid.a.unwrap_or(f64::NAN));
            checks.push(Check::new(
                "A_decreasing",
                a_end < a_mid,
                format!("A({}) = {a_end:.3e}, A({}) = {a_mid:.3e}", last.t, mid.t),
            ));
        }
        _ => checks.push(Check::new("records", false, "need at least four records".into())),
    }
    let t: Vec<f64> = recs.iter().map(|r| r.t).collect();
    let y: Vec<f64> = recs.iter().map(|r| r.a.unwrap_or(f64::NAN)).collect();
    let g: Vec<f64> = recs.iter().map(|r| r.g.unwrap_or(f64::NAN)).collect();
    let zlem = zlem_tail_check(&t, &y, &g).ok();
    if let Some(z) = &zlem {
        checks.push(Check::new(
            "zlem_integrable",
            z.integrable,
            format!(
                "int A = {:.3e}, int G = {:.3e}, tail ratio {:.3e}",
                z.int_y, z.int_g, z.tail_ratio
            ),
        ));
    }
    let h_inf = s.sim.data().amplitude().limit();
    let body = json!({
        "final": final_norms(&out.state)?,
        "h_inf_amplitude": h_inf,
        "decay": decay,
        "zlem": zlem,
    });
    finish(&ctx.out_dir, "longtime", body, checks)
}

pub fn verify_assumptions(cfg: &RunConfig, ctx: &Context) -> Result<(), CliError> {
    let [lo, hi] = cfg.checks.assumption_range;
    let report = assess_assumptions(
        &cfg.potential,
        Some(&cfg.viscosity),
        (lo, hi),
        cfg.checks.assumption_samples,
    )?;
    let checks = report
        .items
        .iter()
        .map(|i| {
            Check::new(
                &format!("assumption_{}", i.item),
                i.pass,
                format!("stored {:.4}, tightest {:.4} {}", i.stored, i.tightest, i.note),
            )
        })
        .collect();
    finish(
        &ctx.out_dir,
        "verify-assumptions",
        json!({ "assumptions": report }),
        checks,
    )
}

pub fn lift_check(cfg: &RunConfig, ctx: &Context) -> Result<(), CliError> {
    let grid = cfg.grid()?;
    let nu1 = cfg.viscosity.nu1;
    let couette = WallData::couette(&grid, 1.0);
    let (u, _) = elliptic_lift(&grid, &couette, 0.0, nu1)?;
    let ly = grid.ly();
    let exact = VectorField::from_fn(&grid, |_, y| (y / ly, 0.0));
    let err = u.sub(&exact).max_abs();
    let mut checks = vec![Check::new(
        "couette_exact",
        err < cfg.checks.lift_tol,
        format!("max |u_e - (y/Ly, 0)| = {err:.3e} (tol {:.1e})", cfg.checks.lift_tol),
    )];
    let data = cfg.wall_data(&grid)?;
    let history = if data.is_zero() || cfg.time.t_end <= 0.0 {
        None
    } else {
        let samples = lift_history(&grid, &data, nu1, cfg.time.dt, cfg.time.t_end, cfg.time.record_every)?;
        let r = lift_difference_report(&samples)?;
        checks.push(Check::new(
            "lift_difference_finite",
            r.degenerate || r.ratio.is_some_and(f64::is_finite),
            format!("sup LHS/RHS = {:?}", r.ratio),
        ));
        Some(r)
    };
    let body = json!({ "couette_max_error": err, "lift_difference": history });
    finish(&ctx.out_dir, "lift-check", body, checks)
}

pub fn validate(_cfg: &RunConfig, ctx: &Context) -> Result<(), CliError> {
    let path = ctx.out_dir.join("records.csv");
    let (rows, bad) = validate_records(&path)?;
    let checks = vec![Check::new(
        "csv_additivity",
        bad.is_empty(),
        format!("{} of {rows} rows break additivity {:?}", bad.len(), bad),
    )];
    let dir = ctx.out_dir.join("validate");
    finish(&dir, "validate", json!({ "rows": rows, "bad_rows": bad }), checks)
}
