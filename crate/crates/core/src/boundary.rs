//! Tangential wall data `h(t, x) = a(t) g(x)`, trace norms and decay certificates.

use std::f64::consts::PI;

use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{ChnsError, Result};
use crate::grid::{Grid, VectorField, WallTrace};

/// Time amplitude `a(t)` with closed-form derivative.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum Amplitude {
    /// `a_inf + (a0 - a_inf) exp(-lambda t)`
    CouetteRamp { a0: f64, a_inf: f64, lambda: f64 },
    /// `a_inf + a0 exp(-lambda t) cos(omega t)`
    DecayingOscillation {
        a0: f64,
        a_inf: f64,
        lambda: f64,
        omega: f64,
    },
    /// `a0 (1 + t)^(-p)`
    Algebraic { a0: f64, p: f64 },
    /// constant `a`
    CustomStatic { a: f64 },
    /// piecewise-linear table, held constant past the last knot
    Tabulated { times: Vec<f64>, values: Vec<f64> },
}

impl Amplitude {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(ChnsError::InvalidParameter(m.to_string()));
        match self {
            Amplitude::CouetteRamp { a0, a_inf, lambda } => {
                if !(a0.is_finite() && a_inf.is_finite() && *lambda >= 0.0) {
                    return bad("couette_ramp needs finite a0, a_inf and lambda >= 0");
                }
            }
            Amplitude::DecayingOscillation {
                a0,
                a_inf,
                lambda,
                omega,
            } => {
                if !(a0.is_finite() && a_inf.is_finite() && *lambda > 0.0 && omega.is_finite()) {
                    return bad("decaying_oscillation needs lambda > 0 and finite parameters");
                }
            }
            Amplitude::Algebraic { a0, p } => {
                if !(a0.is_finite() && *p > 0.0) {
                    return bad("algebraic needs p > 0");
                }
            }
            Amplitude::CustomStatic { a } => {
                if !a.is_finite() {
                    return bad("custom_static needs a finite value");
                }
            }
            Amplitude::Tabulated { times, values } => {
                if times.is_empty()
                    || times.len() != values.len()
                    || times[0] != 0.0
                    || times.windows(2).any(|w| w[1] <= w[0])
                {
                    return bad("tabulated needs strictly increasing times starting at 0");
                }
            }
        }
        Ok(())
    }

    pub fn value(&self, t: f64) -> f64 {
        match *self {
            Amplitude::CouetteRamp { a0, a_inf, lambda } => a_inf + (a0 - a_inf) * (-lambda * t).exp(),
            Amplitude::DecayingOscillation {
                a0,
                a_inf,
                lambda,
                omega,
            } => a_inf + a0 * (-lambda * t).exp() * (omega * t).cos(),
            Amplitude::Algebraic { a0, p } => a0 * (1.0 + t).powf(-p),
            Amplitude::CustomStatic { a } => a,
            Amplitude::Tabulated { ref times, ref values } => {
                let k = times.partition_point(|&s| s <= t);
                if k >= times.len() {
                    return *values.last().expect("validated non-empty");
                }
                let (t0, t1) = (times[k - 1], times[k]);
                let w = (t - t0) / (t1 - t0);
                values[k - 1] * (1.0 - w) + values[k] * w
            }
        }
    }

    pub fn derivative(&self, t: f64) -> f64 {
        match *self {
            Amplitude::CouetteRamp { a0, a_inf, lambda } => -lambda * (a0 - a_inf) * (-lambda * t).exp(),
            Amplitude::DecayingOscillation { a0, lambda, omega, .. } => {
                -a0 * (-lambda * t).exp() * (lambda * (omega * t).cos() + omega * (omega * t).sin())
            }
            Amplitude::Algebraic { a0, p } => -p * a0 * (1.0 + t).powf(-p - 1.0),
            Amplitude::CustomStatic { .. } => 0.0,
            Amplitude::Tabulated { ref times, ref values } => {
                let k = times.partition_point(|&s| s <= t);
                if k >= times.len() {
                    return 0.0;
                }
                (values[k] - values[k - 1]) / (times[k] - times[k - 1])
            }
        }
    }

    /// `lim_{t -> inf} a(t)`.
    pub fn limit(&self) -> f64 {
        match *self {
            Amplitude::CouetteRamp { a_inf, lambda, a0 } => {
                if lambda > 0.0 {
                    a_inf
                } else {
                    a0
                }
            }
            Amplitude::DecayingOscillation { a_inf, .. } => a_inf,
            Amplitude::Algebraic { .. } => 0.0,
            Amplitude::CustomStatic { a } => a,
            Amplitude::Tabulated { ref values, .. } => *values.last().expect("validated non-empty"),
        }
    }

    pub fn family(&self) -> &'static str {
        match self {
            Amplitude::CouetteRamp { .. } => "couette_ramp",
            Amplitude::DecayingOscillation { .. } => "decaying_oscillation",
            Amplitude::Algebraic { .. } => "algebraic",
            Amplitude::CustomStatic { .. } => "custom_static",
            Amplitude::Tabulated { .. } => "tabulated",
        }
    }
}

/// Spatial wall profile `g`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum WallProfile {
    Zero,
    /// constant value
    Uniform(f64),
    /// `coef cos(2 pi m x / Lx)`
    SingleMode {
        m: u32,
        coef: f64,
    },
    /// sum of `coef cos(2 pi m x / Lx)` terms
    Modes(Vec<(u32, f64)>),
}

impl WallProfile {
    pub fn sample(&self, grid: &Grid) -> Vec<f64> {
        let lx = grid.lx();
        (0..grid.nx())
            .map(|i| {
                let x = grid.x_face(i);
                let mode = |m: u32, c: f64| c * (2.0 * PI * m as f64 * x / lx).cos();
                match self {
                    WallProfile::Zero => 0.0,
                    WallProfile::Uniform(c) => *c,
                    WallProfile::SingleMode { m, coef } => mode(*m, *coef),
                    WallProfile::Modes(list) => list.iter().map(|&(m, c)| mode(m, c)).sum(),
                }
            })
            .collect()
    }
}

/// Separable wall data `h(t) = a(t) (g_bottom, g_top)`.
#[derive(Clone, Debug, PartialEq)]
pub struct WallData {
    g: WallTrace,
    amplitude: Amplitude,
    lx: f64,
}

impl WallData {
    pub fn new(grid: &Grid, g_bottom: Vec<f64>, g_top: Vec<f64>, amplitude: Amplitude) -> Result<Self> {
        if g_bottom.len() != grid.nx() || g_top.len() != grid.nx() {
            return Err(ChnsError::ShapeMismatch(format!(
                "wall profiles need {} samples",
                grid.nx()
            )));
        }
        if g_bottom.iter().chain(&g_top).any(|v| !v.is_finite()) {
            return Err(ChnsError::InvalidParameter("wall profile must be finite".into()));
        }
        amplitude.validate()?;
        Ok(Self {
            g: WallTrace {
                bottom: g_bottom,
                top: g_top,
            },
            amplitude,
            lx: grid.lx(),
        })
    }

    pub fn from_profiles(grid: &Grid, bottom: &WallProfile, top: &WallProfile, amplitude: Amplitude) -> Result<Self> {
        Self::new(grid, bottom.sample(grid), top.sample(grid), amplitude)
    }

    /// Homogeneous data.
    pub fn zero(grid: &Grid) -> Self {
        Self {
            g: WallTrace::zeros(grid.nx()),
            amplitude: Amplitude::CustomStatic { a: 0.0 },
            lx: grid.lx(),
        }
    }

    /// Static Couette data `h_top = u_top`, `h_bottom = 0`.
    pub fn couette(grid: &Grid, u_top: f64) -> Self {
        Self {
            g: WallTrace::uniform(grid.nx(), 0.0, 1.0),
            amplitude: Amplitude::CustomStatic { a: u_top },
            lx: grid.lx(),
        }
    }

    pub fn profile(&self) -> &WallTrace {
        &self.g
    }
    pub fn amplitude(&self) -> &Amplitude {
        &self.amplitude
    }
    pub fn lx(&self) -> f64 {
        self.lx
    }

    /// Same profile with amplitude multiplied by `c`.
    pub fn scaled(&self, c: f64) -> Self {
        Self {
            g: self.g.scale(c),
            amplitude: self.amplitude.clone(),
            lx: self.lx,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.g.is_zero()
    }

    pub fn is_static(&self) -> bool {
        matches!(self.amplitude, Amplitude::CustomStatic { .. }) || self.g.is_zero()
    }

    fn check_time(t: f64) -> Result<()> {
        if !(t >= 0.0) {
            return Err(ChnsError::NegativeTime(t));
        }
        Ok(())
    }

    pub fn eval_wall(&self, t: f64) -> Result<WallTrace> {
        Self::check_time(t)?;
        Ok(self.g.scale(self.amplitude.value(t)))
    }

    pub fn eval_wall_dt(&self, t: f64) -> Result<WallTrace> {
        Self::check_time(t)?;
        Ok(self.g.scale(self.amplitude.derivative(t)))
    }

    /// Limit data `h_inf`.
    pub fn h_inf(&self) -> WallTrace {
        self.g.scale(self.amplitude.limit())
    }

    /// `||g||_{V^s}` over both walls.
    pub fn profile_norm(&self, s: f64) -> f64 {
        wall_norm(&self.g, self.lx, s)
    }

    pub fn h_norm(&self, t: f64, s: f64) -> Result<f64> {
        Self::check_time(t)?;
        Ok(self.amplitude.value(t).abs() * self.profile_norm(s))
    }

    pub fn dh_norm(&self, t: f64, s: f64) -> Result<f64> {
        Self::check_time(t)?;
        Ok(self.amplitude.derivative(t).abs() * self.profile_norm(s))
    }
}

/// `||h||_{V^s}^2 = Lx sum_m (1 + kappa_m^2)^s |h_m|^2` with `h_m` the normalized
/// DFT coefficients and `kappa_m = 2 pi m / Lx`. Intended for `s` in `[-2, 3]`.
pub fn trace_norm(data: &[f64], lx: f64, s: f64) -> f64 {
    let n = data.len();
    if n == 0 {
        return 0.0;
    }
    let mut buf: Vec<Complex64> = data.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    let mut acc = 0.0;
    for (c, v) in buf.iter().enumerate() {
        let m = if c <= n / 2 { c as f64 } else { c as f64 - n as f64 };
        let kappa = 2.0 * PI * m / lx;
        acc += (1.0 + kappa * kappa).powf(s) * (v / n as f64).norm_sqr();
    }
    (lx * acc).sqrt()
}

/// Both walls summed in quadrature.
pub fn wall_norm(w: &WallTrace, lx: f64, s: f64) -> f64 {
    let b = trace_norm(&w.bottom, lx, s);
    let t = trace_norm(&w.top, lx, s);
    (b * b + t * t).sqrt()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DecayCondition {
    pub name: String,
    /// Smallest `C` with `tail(t) <= C (1 + t)^(-1-gamma)` on the sample grid.
    pub constant: f64,
    /// Whether the bound holds for all `t >= 0` (checked on the closed form).
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DecayReport {
    pub family: String,
    pub gamma: f64,
    pub conditions: Vec<DecayCondition>,
}

impl DecayReport {
    pub fn all_pass(&self) -> bool {
        self.conditions.iter().all(|c| c.pass)
    }
}

/// Asymptotic form of an amplitude tail integral.
enum Tail {
    Zero,
    Exponential,
    /// behaves like `(1 + t)^(-rate)`
    Power(f64),
    Infinite,
}

/// `int_t^inf exp(-2 lambda s) cos^2(omega s - delta) ds`
fn osc_tail(t: f64, lambda: f64, omega: f64, delta: f64) -> f64 {
    let base = (-2.0 * lambda * t).exp() / (4.0 * lambda);
    let z = Complex64::new(-2.0 * lambda * t, 2.0 * omega * t - 2.0 * delta).exp()
        / Complex64::new(2.0 * lambda, -2.0 * omega);
    base + 0.5 * z.re
}

/// Closed-form `(int_t^inf a'^2, int_t^inf a^2)` along with their asymptotic type.
type TailFn = Box<dyn Fn(f64) -> f64>;

fn amplitude_tails(amp: &Amplitude) -> Result<(TailFn, Tail, TailFn, Tail)> {
    Ok(match *amp {
        Amplitude::CouetteRamp { a0, a_inf, lambda } => {
            let c = a0 - a_inf;
            if lambda == 0.0 || c == 0.0 {
                let a = if lambda == 0.0 { a0 } else { a_inf };
                let sq = if a == 0.0 { Tail::Zero } else { Tail::Infinite };
                (
                    Box::new(|_| 0.0),
                    Tail::Zero,
                    Box::new(move |_| if a == 0.0 { 0.0 } else { f64::INFINITY }),
                    sq,
                )
            } else {
                let d = Box::new(move |t: f64| 0.5 * lambda * c * c * (-2.0 * lambda * t).exp());
                if a_inf == 0.0 {
                    let s = Box::new(move |t: f64| c * c * (-2.0 * lambda * t).exp() / (2.0 * lambda));
                    (d, Tail::Exponential, s, Tail::Exponential)
                } else {
                    (d, Tail::Exponential, Box::new(|_| f64::INFINITY), Tail::Infinite)
                }
            }
        }
        Amplitude::DecayingOscillation {
            a0,
            a_inf,
            lambda,
            omega,
        } => {
            let r2 = lambda * lambda + omega * omega;
            let delta = omega.atan2(lambda);
            let (dt, dk): (TailFn, Tail) = if a0 == 0.0 {
                (Box::new(|_| 0.0), Tail::Zero)
            } else {
                (
                    Box::new(move |t| a0 * a0 * r2 * osc_tail(t, lambda, omega, delta)),
                    Tail::Exponential,
                )
            };
            if a_inf == 0.0 {
                let s = Box::new(move |t| a0 * a0 * osc_tail(t, lambda, omega, 0.0));
                let k = if a0 == 0.0 { Tail::Zero } else { Tail::Exponential };
                (dt, dk, s, k)
            } else {
                (dt, dk, Box::new(|_| f64::INFINITY), Tail::Infinite)
            }
        }
        Amplitude::Algebraic { a0, p } => {
            if a0 == 0.0 {
                (Box::new(|_| 0.0), Tail::Zero, Box::new(|_| 0.0), Tail::Zero)
            } else {
                let d = Box::new(move |t: f64| p * p * a0 * a0 * (1.0 + t).powf(-2.0 * p - 1.0) / (2.0 * p + 1.0));
                let (s, k): (TailFn, Tail) = if p > 0.5 {
                    (
                        Box::new(move |t: f64| a0 * a0 * (1.0 + t).powf(1.0 - 2.0 * p) / (2.0 * p - 1.0)),
                        Tail::Power(2.0 * p - 1.0),
                    )
                } else {
                    (Box::new(|_| f64::INFINITY), Tail::Infinite)
                };
                (d, Tail::Power(2.0 * p + 1.0), s, k)
            }
        }
        Amplitude::CustomStatic { a } => {
            let k = if a == 0.0 { Tail::Zero } else { Tail::Infinite };
            (
                Box::new(|_| 0.0),
                Tail::Zero,
                Box::new(move |_| if a == 0.0 { 0.0 } else { f64::INFINITY }),
                k,
            )
        }
        Amplitude::Tabulated { .. } => {
            return Err(ChnsError::UnsupportedFamily(
                "tabulated amplitudes have no closed-form tail integrals".into(),
            ))
        }
    })
}

/// Checks the three tail-integral decay bounds with exponent `gamma` using exact
/// tail integrals. `constant` is the sup of `tail(t) (1 + t)^(1 + gamma)` over `t_grid`.
pub fn certify_decay(data: &WallData, gamma: f64, t_grid: &[f64]) -> Result<DecayReport> {
    if !(gamma > 0.0) {
        return Err(ChnsError::InvalidParameter(format!(
            "gamma must be positive, got {gamma}"
        )));
    }
    if let Some(t) = t_grid.iter().find(|&&t| !(t >= 0.0)) {
        return Err(ChnsError::NegativeTime(*t));
    }
    let (dtail, dkind, stail, skind) = amplitude_tails(&data.amplitude)?;
    let weights = [
        ("dt_h_minus_half", data.profile_norm(-0.5).powi(2), &dtail, &dkind),
        ("dt_h_half", data.profile_norm(0.5).powi(2), &dtail, &dkind),
        ("h_three_halves", data.profile_norm(1.5).powi(2), &stail, &skind),
    ];
    let conditions = weights
        .into_iter()
        .map(|(name, w, tail, kind)| {
            if w == 0.0 {
                return DecayCondition {
                    name: name.into(),
                    constant: 0.0,
                    pass: true,
                };
            }
            let pass = match kind {
                Tail::Zero | Tail::Exponential => true,
                Tail::Power(rate) => *rate >= 1.0 + gamma,
                Tail::Infinite => false,
            };
            let constant = t_grid
                .iter()
                .map(|&t| w * tail(t) * (1.0 + t).powf(1.0 + gamma))
                .fold(0.0, f64::max);
            DecayCondition {
                name: name.into(),
                constant,
                pass: pass && constant.is_finite(),
            }
        })
        .collect();
    Ok(DecayReport {
        family: data.amplitude.family().into(),
        gamma,
        conditions,
    })
}

/// Linearly extrapolated tangential wall trace of `u` (bottom, top).
pub fn extrapolated_trace(u: &VectorField) -> WallTrace {
    let g = u.grid();
    let (nx, ny) = (g.nx(), g.ny());
    WallTrace {
        bottom: (0..nx).map(|i| 1.5 * u.ux_at(i, 0) - 0.5 * u.ux_at(i, 1)).collect(),
        top: (0..nx)
            .map(|i| 1.5 * u.ux_at(i, ny - 1) - 0.5 * u.ux_at(i, ny - 2))
            .collect(),
    }
}

/// `u0|walls == h(0)` in max norm up to `tol`.
pub fn check_compatibility(u0: &VectorField, data: &WallData, tol: f64) -> bool {
    let h0 = match data.eval_wall(0.0) {
        Ok(h) => h,
        Err(_) => return false,
    };
    if h0.bottom.len() != u0.grid().nx() {
        return false;
    }
    let tr = extrapolated_trace(u0);
    let err = tr
        .bottom
        .iter()
        .zip(&h0.bottom)
        .chain(tr.top.iter().zip(&h0.top))
        .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
    err <= tol
}
