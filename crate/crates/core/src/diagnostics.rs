//! Energy bookkeeping, higher-order functionals, steady-state residuals and the
//! certificate-style checks built on them.

use serde::Serialize;

use crate::boundary::{wall_norm, WallData};
use crate::error::{ChnsError, Result};
use crate::grid::{ScalarField, VectorField, WallTrace};
use crate::lifting::EllipticLift;
use crate::norms::{grad_sq, grad_sq_vec, h1, hminus1, l2, l2_vec, v1, v2};
use crate::ops::{laplacian_neumann, leray_project, vector_laplacian};
use crate::potential::{eval_df, eval_f};
use crate::solver::{Mode, SimState};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EnergyRecord {
    pub t: f64,
    /// `1/2 ||u - u_e||^2`
    pub kinetic: f64,
    /// `1/2 ||u||^2`
    pub kinetic_total: f64,
    pub interfacial: f64,
    pub bulk: f64,
    pub total: f64,
    /// `||grad (u - u_e)||^2`
    pub diss_u: f64,
    /// `||grad mu||^2`
    pub diss_mu: f64,
    pub mass: f64,
    pub a: Option<f64>,
    pub b: Option<f64>,
    pub g: Option<f64>,
    pub res_phi: f64,
    pub res_u: f64,
}

impl EnergyRecord {
    pub const CSV_HEADER: &'static str = "t,kinetic,interfacial,bulk,total,diss_u,diss_mu,mass,A,B,G,res_phi,res_u";

    pub fn csv_row(&self) -> String {
        let opt = |v: Option<f64>| v.map_or_else(|| "nan".to_string(), |x| format!("{x:.17e}"));
        format!(
            "{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{},{},{},{:.17e},{:.17e}",
            self.t,
            self.kinetic,
            self.interfacial,
            self.bulk,
            self.total,
            self.diss_u,
            self.diss_mu,
            self.mass,
            opt(self.a),
            opt(self.b),
            opt(self.g),
            self.res_phi,
            self.res_u
        )
    }

    /// `total == kinetic + interfacial + bulk` to round-off.
    pub fn is_additive(&self) -> bool {
        let sum = self.kinetic + self.interfacial + self.bulk;
        (self.total - sum).abs() <= 1e-12 * sum.abs().max(1.0)
    }
}

/// Factors appearing in the `G` functional.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GFactor {
    /// `||u_p||_{V^1}`
    UpV1,
    /// `||u_p||_{V^2}`
    UpV2,
    GradMu,
    GradPhi,
    /// `||u - u_p||`
    UbarL2,
    PhiL2,
    UpL2,
    GradUp,
    PhiH1,
    PhiH2,
}

/// Exponent `(a q + b) / d` in terms of the growth exponent `q`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GExponent {
    pub a: f64,
    pub b: f64,
    pub d: f64,
}

impl GExponent {
    pub fn eval(&self, q: f64) -> f64 {
        (self.a * q + self.b) / self.d
    }
}

const fn ex(a: f64, b: f64, d: f64) -> GExponent {
    GExponent { a, b, d }
}

/// Every term of `G` as a product of factor powers. The fifth term uses the
/// `||u_p||^{8/5}` exponent.
pub const G_TERMS: &[&[(GFactor, GExponent)]] = &[
    &[(GFactor::UpV1, ex(0.0, 4.0, 1.0))],
    &[(GFactor::UpV1, ex(0.0, 2.0, 1.0)), (GFactor::UpV2, ex(0.0, 2.0, 1.0))],
    &[
        (GFactor::GradMu, ex(0.0, 2.0, 1.0)),
        (GFactor::GradPhi, ex(0.0, 1.0, 1.0)),
    ],
    &[
        (GFactor::UbarL2, ex(0.0, 8.0, 3.0)),
        (GFactor::PhiL2, ex(0.0, 4.0, 3.0)),
    ],
    &[
        (GFactor::UpL2, ex(0.0, 8.0, 5.0)),
        (GFactor::GradUp, ex(0.0, 8.0, 5.0)),
        (GFactor::PhiL2, ex(0.0, 4.0, 5.0)),
    ],
    &[
        (GFactor::PhiH1, ex(4.0, -4.0, 1.0)),
        (GFactor::PhiH2, ex(4.0, -8.0, 1.0)),
    ],
    &[
        (GFactor::PhiH1, ex(2.0, -2.0, 1.0)),
        (GFactor::PhiH2, ex(2.0, -2.0, 1.0)),
    ],
    &[
        (GFactor::UbarL2, ex(0.0, 8.0, 7.0)),
        (GFactor::PhiH1, ex(8.0, -4.0, 7.0)),
        (GFactor::PhiH2, ex(8.0, -8.0, 7.0)),
    ],
    &[
        (GFactor::PhiH2, ex(8.0, -4.0, 7.0)),
        (GFactor::PhiH1, ex(8.0, -8.0, 7.0)),
        (GFactor::UpL2, ex(0.0, 16.0, 9.0)),
    ],
];

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct HigherOrder {
    pub a: f64,
    pub b: f64,
    pub g: f64,
}

fn h2(s: &ScalarField) -> f64 {
    let lap = laplacian_neumann(s);
    (s.dot(s) + grad_sq(s) + lap.dot(&lap)).sqrt()
}

/// Evaluation context shared by every record of one run.
#[derive(Clone, Debug)]
pub struct Diagnostics {
    data: WallData,
    lift: EllipticLift,
    mode: Mode,
    nu_gap: f64,
    q: f64,
    u_inf: VectorField,
    h_inf: WallTrace,
}

impl Diagnostics {
    pub fn new(data: WallData, lift: EllipticLift, mode: Mode, nu_gap: f64, q: f64) -> Self {
        let h_inf = data.h_inf();
        let u_inf = lift.unit_velocity().scale(data.amplitude().limit());
        Self {
            data,
            lift,
            mode,
            nu_gap,
            q,
            u_inf,
            h_inf,
        }
    }

    pub fn data(&self) -> &WallData {
        &self.data
    }

    pub fn energy(&self, state: &SimState) -> Result<EnergyRecord> {
        let grid = state.u.grid();
        let u_e = self.lift.velocity(&self.data, state.t)?;
        let ubar = state.u.sub(&u_e);
        let zero = WallTrace::zeros(grid.nx());
        let kinetic = 0.5 * ubar.dot(&ubar);
        let interfacial = 0.5 * grad_sq(&state.phi);
        let bulk = state.phi.values().iter().map(|&s| eval_f(s)).sum::<f64>() * grid.cell_area();
        let (res_phi, res_u) = self.steady_state_residuals(state)?;
        let ho = if self.mode == Mode::LiftedParabolic {
            Some(self.higher_order(state)?)
        } else {
            None
        };
        Ok(EnergyRecord {
            t: state.t,
            kinetic,
            kinetic_total: 0.5 * state.u.dot(&state.u),
            interfacial,
            bulk,
            total: kinetic + interfacial + bulk,
            diss_u: grad_sq_vec(&ubar, &zero)?,
            diss_mu: grad_sq(&state.mu),
            mass: state.phi.mean(),
            a: ho.map(|h| h.a),
            b: ho.map(|h| h.b),
            g: ho.map(|h| h.g),
            res_phi,
            res_u,
        })
    }

    /// `A`, `B`, `G` with `ubar_p = u - u_p`.
    pub fn higher_order(&self, state: &SimState) -> Result<HigherOrder> {
        let lift = match (&state.lift, self.mode) {
            (Some(l), Mode::LiftedParabolic) => l,
            _ => {
                return Err(ChnsError::ModeMismatch(
                    "higher-order functionals need the parabolic lift".into(),
                ))
            }
        };
        let grid = state.u.grid();
        let zero = WallTrace::zeros(grid.nx());
        let h = self.data.eval_wall(state.t)?;
        let u_p = &lift.u_p;
        let ubar = state.u.sub(u_p);
        let lap_phi = laplacian_neumann(&state.phi);
        let bilap_phi = laplacian_neumann(&lap_phi);
        let lap_mu = laplacian_neumann(&state.mu);
        let (stokes, _) = leray_project(&vector_laplacian(&ubar, &zero)?.scale(-1.0))?;

        let a = grad_sq_vec(&ubar, &zero)? + lap_phi.dot(&lap_phi) + state.mu.dot(&state.mu);
        let b = self.nu_gap * stokes.dot(&stokes) + bilap_phi.dot(&bilap_phi) + lap_mu.dot(&lap_mu);

        let factor = |f: GFactor| -> Result<f64> {
            Ok(match f {
                GFactor::UpV1 => v1(u_p, &h)?,
                GFactor::UpV2 => v2(u_p, &h)?,
                GFactor::GradMu => grad_sq(&state.mu).sqrt(),
                GFactor::GradPhi => grad_sq(&state.phi).sqrt(),
                GFactor::UbarL2 => l2_vec(&ubar),
                GFactor::PhiL2 => l2(&state.phi),
                GFactor::UpL2 => l2_vec(u_p),
                GFactor::GradUp => grad_sq_vec(u_p, &h)?.sqrt(),
                GFactor::PhiH1 => h1(&state.phi),
                GFactor::PhiH2 => h2(&state.phi),
            })
        };
        let mut g = 0.0;
        for term in G_TERMS {
            let mut prod = 1.0;
            for &(f, e) in term.iter() {
                prod *= factor(f)?.powf(e.eval(self.q));
            }
            g += prod;
        }
        Ok(HigherOrder { a, b, g })
    }

    /// `(||-Laplacian phi + F'(phi)||_{(H^1)'}, ||u - u_inf||_{V^1})`.
    pub fn steady_state_residuals(&self, state: &SimState) -> Result<(f64, f64)> {
        let lap = laplacian_neumann(&state.phi);
        let r = state.phi.zip_with(&lap, |p, l| -l + eval_df(p));
        let h = self.data.eval_wall(state.t)?;
        let dh = WallTrace {
            bottom: h.bottom.iter().zip(&self.h_inf.bottom).map(|(a, b)| a - b).collect(),
            top: h.top.iter().zip(&self.h_inf.top).map(|(a, b)| a - b).collect(),
        };
        Ok((hminus1(&r), v1(&state.u.sub(&self.u_inf), &dh)?))
    }
}

/// Integrates `f` over `[t0, t1]` with composite Simpson on `n` (even) panels.
fn simpson(f: impl Fn(f64) -> f64, t0: f64, t1: f64, n: usize) -> f64 {
    if t1 <= t0 {
        return 0.0;
    }
    let h = (t1 - t0) / n as f64;
    let mut acc = f(t0) + f(t1);
    for k in 1..n {
        acc += f(t0 + k as f64 * h) * if k % 2 == 1 { 4.0 } else { 2.0 };
    }
    acc * h / 3.0
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EnergyInequalityReport {
    /// `max_n (E^{n+1} - E^n)` over consecutive records.
    pub max_increase: f64,
    /// `max_n (E^{n+1} - E^n) / (t^{n+1} - t^n)`.
    pub max_increase_rate: f64,
    /// `sup_t K(t)`.
    pub gronwall_sup: f64,
    /// `int (nu ||grad ubar||^2 + ||grad mu||^2)`, trapezoid on the records.
    pub dissipation_integral: f64,
    pub dissipation_finite: bool,
    /// For homogeneous data: `dissipation_integral <= E(0) + slack`.
    pub balance_ok: Option<bool>,
}

/// Energy-inequality checks along a record series.
pub fn energy_inequality_report(
    records: &[EnergyRecord],
    data: &WallData,
    nu_gap: f64,
    slack: f64,
) -> Result<EnergyInequalityReport> {
    if records.is_empty() {
        return Err(ChnsError::Misaligned("no energy records".into()));
    }
    let mut max_increase = f64::NEG_INFINITY;
    let mut max_rate = f64::NEG_INFINITY;
    let mut diss = 0.0;
    let e0 = records[0].total;
    let mut int_data = 0.0;
    let mut int_exp = 0.0;
    let mut sup_k: f64 = if e0 > 0.0 { 1.0 } else { 0.0 };
    let norm_m = data.profile_norm(-0.5).powi(2);
    let norm_3 = data.profile_norm(1.5).powi(2);
    let norm_1 = data.profile_norm(0.5).powi(2);
    let amp = data.amplitude();
    for w in records.windows(2) {
        let (a, b) = (&w[0], &w[1]);
        let dt = b.t - a.t;
        if !(dt > 0.0) {
            return Err(ChnsError::Misaligned("record times must increase".into()));
        }
        max_increase = max_increase.max(b.total - a.total);
        max_rate = max_rate.max((b.total - a.total) / dt);
        diss += 0.5 * dt * (nu_gap * a.diss_u + a.diss_mu + nu_gap * b.diss_u + b.diss_mu);
        int_data += simpson(
            |t| norm_m * amp.derivative(t).powi(2) + norm_3 * amp.value(t).powi(2),
            a.t,
            b.t,
            16,
        );
        int_exp += simpson(|t| norm_1 * amp.value(t).powi(2), a.t, b.t, 16);
        let den = (e0 + int_data) * int_exp.exp();
        let k = if den > 0.0 {
            b.total / den
        } else if b.total > 0.0 {
            f64::INFINITY
        } else {
            0.0
        };
        sup_k = sup_k.max(k);
    }
    if records.len() == 1 {
        max_increase = 0.0;
        max_rate = 0.0;
    }
    Ok(EnergyInequalityReport {
        max_increase,
        max_increase_rate: max_rate,
        gronwall_sup: sup_k,
        dissipation_integral: diss,
        dissipation_finite: diss.is_finite(),
        balance_ok: if data.is_zero() { Some(diss <= e0 + slack) } else { None },
    })
}

/// Snapshot of one trajectory for the continuous-dependence comparison.
#[derive(Clone, Debug)]
pub struct TrajectorySample {
    pub t: f64,
    pub u: VectorField,
    pub phi: ScalarField,
    pub h: WallTrace,
    pub dh: WallTrace,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DependenceReport {
    pub lhs: f64,
    pub rhs: f64,
    /// `lhs / rhs`, `None` when the data coincide.
    pub ratio: Option<f64>,
}

fn trace_diff(a: &WallTrace, b: &WallTrace) -> WallTrace {
    WallTrace {
        bottom: a.bottom.iter().zip(&b.bottom).map(|(x, y)| x - y).collect(),
        top: a.top.iter().zip(&b.top).map(|(x, y)| x - y).collect(),
    }
}

/// Difference norms of two aligned trajectories against the size of their data
/// difference (boundary norms plus initial-data difference).
pub fn continuous_dependence_metric(
    run1: &[TrajectorySample],
    run2: &[TrajectorySample],
    lx: f64,
) -> Result<DependenceReport> {
    if run1.len() != run2.len() || run1.is_empty() {
        return Err(ChnsError::Misaligned(format!(
            "trajectories have {} and {} samples",
            run1.len(),
            run2.len()
        )));
    }
    for (a, b) in run1.iter().zip(run2) {
        if (a.t - b.t).abs() > 1e-12 * a.t.abs().max(1.0) || a.u.grid() != b.u.grid() {
            return Err(ChnsError::Misaligned(format!("sample times {} and {}", a.t, b.t)));
        }
    }
    let mut sup_u: f64 = 0.0;
    let mut sup_phi: f64 = 0.0;
    let mut sup_h: f64 = 0.0;
    let mut prev: Option<(f64, f64, f64, f64, f64)> = None;
    let (mut int_grad_u, mut int_phi_h2, mut int_h32, mut int_dh) = (0.0, 0.0, 0.0, 0.0);
    for (a, b) in run1.iter().zip(run2) {
        let du = a.u.sub(&b.u);
        let dphi = a.phi.sub(&b.phi);
        let dh = trace_diff(&a.h, &b.h);
        let ddh = trace_diff(&a.dh, &b.dh);
        sup_u = sup_u.max(l2_vec(&du));
        sup_phi = sup_phi.max(h1(&dphi));
        sup_h = sup_h.max(wall_norm(&dh, lx, 0.5));
        let cur = (
            a.t,
            grad_sq_vec(&du, &dh)?,
            h2(&dphi).powi(2),
            wall_norm(&dh, lx, 1.5).powi(2),
            wall_norm(&ddh, lx, -0.5).powi(2),
        );
        if let Some(p) = prev {
            let w = 0.5 * (cur.0 - p.0);
            int_grad_u += w * (p.1 + cur.1);
            int_phi_h2 += w * (p.2 + cur.2);
            int_h32 += w * (p.3 + cur.3);
            int_dh += w * (p.4 + cur.4);
        }
        prev = Some(cur);
    }
    let lhs = sup_u + int_grad_u.sqrt() + sup_phi + int_phi_h2.sqrt();
    let du0 = l2_vec(&run1[0].u.sub(&run2[0].u));
    let dphi0 = h1(&run1[0].phi.sub(&run2[0].phi));
    let rhs = sup_h + int_h32.sqrt() + int_dh.sqrt() + du0 + dphi0;
    Ok(DependenceReport {
        lhs,
        rhs,
        ratio: if rhs > 0.0 { Some(lhs / rhs) } else { None },
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ZlemReport {
    pub int_y: f64,
    pub int_g: f64,
    pub integrable: bool,
    /// `y(T) / y(T/2)` at the nearest samples.
    pub tail_ratio: f64,
    /// `max y on [3T/4, T] < max y on [T/4, T/2]`.
    pub decaying: bool,
}

/// Hypothesis integrals and tail behaviour of `y` (with companion `g`) on a uniform grid.
pub fn zlem_tail_check(t: &[f64], y: &[f64], g: &[f64]) -> Result<ZlemReport> {
    if t.len() < 4 || t.len() != y.len() || t.len() != g.len() {
        return Err(ChnsError::Misaligned("zlem series need equal lengths >= 4".into()));
    }
    let trap = |v: &[f64]| {
        t.windows(2)
            .zip(v.windows(2))
            .map(|(tw, vw)| 0.5 * (tw[1] - tw[0]) * (vw[0] + vw[1]))
            .sum::<f64>()
    };
    let int_y = trap(y);
    let int_g = trap(g);
    let (t0, t_end) = (t[0], t[t.len() - 1]);
    let span = t_end - t0;
    let max_on = |lo: f64, hi: f64| {
        t.iter()
            .zip(y)
            .filter(|(s, _)| **s >= t0 + lo * span - 1e-12 && **s <= t0 + hi * span + 1e-12)
            .map(|(_, v)| *v)
            .fold(f64::NEG_INFINITY, f64::max)
    };
    let nearest = |target: f64| {
        t.iter()
            .zip(y)
            .min_by(|a, b| (a.0 - target).abs().total_cmp(&(b.0 - target).abs()))
            .map(|(_, v)| *v)
            .expect("non-empty")
    };
    let half = nearest(t0 + 0.5 * span);
    Ok(ZlemReport {
        int_y,
        int_g,
        integrable: int_y.is_finite() && int_g.is_finite(),
        tail_ratio: y[y.len() - 1] / half,
        decaying: max_on(0.75, 1.0) < max_on(0.25, 0.5),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn g_table_exponents_at_q3() {
        let q = 3.0;
        let got: Vec<Vec<f64>> = G_TERMS
            .iter()
            .map(|t| t.iter().map(|(_, e)| e.eval(q)).collect())
            .collect();
        let want: Vec<Vec<f64>> = vec![
            vec![4.0],
            vec![2.0, 2.0],
            vec![2.0, 1.0],
            vec![8.0 / 3.0, 4.0 / 3.0],
            vec![8.0 / 5.0, 8.0 / 5.0, 4.0 / 5.0],
            vec![8.0, 4.0],
            vec![4.0, 4.0],
            vec![8.0 / 7.0, 20.0 / 7.0, 16.0 / 7.0],
            vec![20.0 / 7.0, 16.0 / 7.0, 16.0 / 9.0],
        ];
        assert_eq!(got.len(), want.len());
        for (g, w) in got.iter().zip(&want) {
            assert_eq!(g.len(), w.len());
            for (a, b) in g.iter().zip(w) {
                assert!((a - b).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn zlem_exponential_and_constant() {
        let t: Vec<f64> = (0..=200).map(|k| k as f64 * 0.1).collect();
        let y: Vec<f64> = t.iter().map(|s| (-s).exp()).collect();
        let r = zlem_tail_check(&t, &y, &y).unwrap();
        assert!(r.decaying && r.integrable);
        assert!((r.tail_ratio - (-10.0f64).exp()).abs() < 1e-12);
        let one = vec![1.0; t.len()];
        assert!(!zlem_tail_check(&t, &one, &one).unwrap().decaying);
    }

    #[test]
    fn zlem_spiky_series() {
        let t: Vec<f64> = (0..=400).map(|k| k as f64 * 0.05).collect();
        let y: Vec<f64> = t
            .iter()
            .enumerate()
            .map(|(k, s)| (-s).exp() + if k == 388 { 0.5 } else { 0.0 })
            .collect();
        let r = zlem_tail_check(&t, &y, &y).unwrap();
        assert!(r.integrable);
        // a late spike dominates the last quarter
        assert!(!r.decaying);
    }
}
