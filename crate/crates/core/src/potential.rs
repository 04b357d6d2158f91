//! Double-well potential, viscosity laws and the numeric assumption checks.

use serde::{Deserialize, Serialize};

use crate::error::{ChnsError, Result};
use crate::grid::ScalarField;

pub fn eval_f(s: f64) -> f64 {
    let t = s * s - 1.0;
    t * t
}

pub fn eval_df(s: f64) -> f64 {
    4.0 * s * (s * s - 1.0)
}

pub fn eval_d2f(s: f64) -> f64 {
    12.0 * s * s - 4.0
}

pub fn eval_d3f(s: f64) -> f64 {
    24.0 * s
}

/// Stored growth constants for the default quartic well.
///
/// The bounds checked are
/// `|F'| <= c1 |s|^q + c2`, `F'' >= -c3`, `|F''| <= c4 |s|^(q-1) + c4p`,
/// `|F'''| <= c5 (1 + |s|^(q-2))`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PotentialSpec {
    pub q: f64,
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    pub c4: f64,
    pub c4p: f64,
    pub c5: f64,
}

impl Default for PotentialSpec {
    fn default() -> Self {
        Self {
            q: 3.0,
            c1: 8.0,
            c2: 4.0,
            c3: 4.0,
            c4: 12.0,
            c4p: 4.0,
            c5: 24.0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum ViscosityLaw {
    /// Smooth profile strictly inside `(nu1, nu2)`.
    #[default]
    Tanh,
    /// Piecewise linear in `s` on `[-1, 1]`, attains the bounds (not strict).
    ClampedLinear,
    /// Constant `nu1 + nu_gap`, for the constant-viscosity runs.
    Constant,
}

/// Margin kept from the bounds so that `nu1 < nu < nu2` survives `tanh` saturation.
pub const VISCOSITY_MARGIN: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ViscositySpec {
    pub nu1: f64,
    pub nu2: f64,
    #[serde(default = "default_nu_gap")]
    pub nu_gap: f64,
    #[serde(default)]
    pub law: ViscosityLaw,
}

fn default_nu_gap() -> f64 {
    0.01
}

impl Default for ViscositySpec {
    /// `nu1 = 1`, `nu2 = 2`, tanh law.
    fn default() -> Self {
        Self {
            nu1: 1.0,
            nu2: 2.0,
            nu_gap: default_nu_gap(),
            law: ViscosityLaw::Tanh,
        }
    }
}

impl ViscositySpec {
    pub fn new(nu1: f64, nu2: f64) -> Result<Self> {
        let spec = Self {
            nu1,
            nu2,
            nu_gap: default_nu_gap(),
            law: ViscosityLaw::Tanh,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn constant(nu1: f64, nu_gap: f64) -> Result<Self> {
        let spec = Self {
            nu1,
            nu2: nu1 + 2.0 * nu_gap,
            nu_gap,
            law: ViscosityLaw::Constant,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.nu1 > 0.0 && self.nu1.is_finite()) {
            return Err(ChnsError::InvalidParameter(format!(
                "nu1 must be positive, got {}",
                self.nu1
            )));
        }
        if !(self.nu2 > self.nu1 && self.nu2.is_finite()) {
            return Err(ChnsError::InvalidParameter(format!(
                "nu2 must exceed nu1, got nu1 = {}, nu2 = {}",
                self.nu1, self.nu2
            )));
        }
        if !(self.nu_gap > 0.0) {
            return Err(ChnsError::InvalidParameter(format!(
                "nu_gap must be positive, got {}",
                self.nu_gap
            )));
        }
        if self.law == ViscosityLaw::Constant && self.nu1 + self.nu_gap >= self.nu2 {
            return Err(ChnsError::InvalidParameter(
                "constant law needs nu1 + nu_gap < nu2".into(),
            ));
        }
        Ok(())
    }

    pub fn eval(&self, s: f64) -> f64 {
        let mid = 0.5 * (self.nu1 + self.nu2);
        let half = 0.5 * (self.nu2 - self.nu1);
        match self.law {
            ViscosityLaw::Tanh => {
                (mid + half * s.tanh()).clamp(self.nu1 + VISCOSITY_MARGIN, self.nu2 - VISCOSITY_MARGIN)
            }
            ViscosityLaw::ClampedLinear => mid + half * s.clamp(-1.0, 1.0),
            ViscosityLaw::Constant => self.nu1 + self.nu_gap,
        }
    }

    /// `d nu / ds` (zero where the law is clamped).
    pub fn eval_derivative(&self, s: f64) -> f64 {
        let half = 0.5 * (self.nu2 - self.nu1);
        match self.law {
            ViscosityLaw::Tanh => {
                let th = s.tanh();
                half * (1.0 - th * th)
            }
            ViscosityLaw::ClampedLinear if s.abs() < 1.0 => half,
            ViscosityLaw::ClampedLinear | ViscosityLaw::Constant => 0.0,
        }
    }

    pub fn eval_field(&self, phi: &ScalarField) -> ScalarField {
        phi.map(|s| self.eval(s))
    }

    /// Largest value of `nu - nu1` the law can produce.
    pub fn max_excess(&self) -> f64 {
        match self.law {
            ViscosityLaw::Tanh => self.nu2 - self.nu1 - VISCOSITY_MARGIN,
            ViscosityLaw::ClampedLinear => self.nu2 - self.nu1,
            ViscosityLaw::Constant => self.nu_gap,
        }
    }

    pub fn is_constant(&self) -> bool {
        self.law == ViscosityLaw::Constant
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AssumptionItem {
    pub item: String,
    pub pass: bool,
    /// Stored constant being checked.
    pub stored: f64,
    /// Smallest constant compatible with the samples.
    pub tightest: f64,
    pub note: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AssumptionReport {
    pub samples: usize,
    pub range: (f64, f64),
    pub items: Vec<AssumptionItem>,
}

impl AssumptionReport {
    pub fn all_pass(&self) -> bool {
        self.items.iter().all(|i| i.pass)
    }
}

/// Evaluates each bound on a uniform sample set (plus `0` and `+-1`) and reports
/// the tightest constants observed. Never fails on a violated bound; see
/// [`verify_assumptions`] for the strict form.
pub fn assess_assumptions(
    spec: &PotentialSpec,
    viscosity: Option<&ViscositySpec>,
    range: (f64, f64),
    n_samples: usize,
) -> Result<AssumptionReport> {
    let (lo, hi) = range;
    if !(lo <= -3.0 && hi >= 3.0) {
        return Err(ChnsError::RangeTooSmall { lo, hi });
    }
    if n_samples < 2 {
        return Err(ChnsError::InvalidParameter("need at least 2 samples".into()));
    }
    let mut samples: Vec<f64> = (0..n_samples)
        .map(|k| lo + (hi - lo) * k as f64 / (n_samples - 1) as f64)
        .collect();
    samples.extend([0.0, 1.0, -1.0]);

    let q = spec.q;
    let mut t3: f64 = 0.0;
    let mut t4: f64 = 0.0;
    let mut t5: f64 = 0.0;
    let mut t6: f64 = 0.0;
    let mut ok3 = true;
    let mut ok5 = true;
    let mut ok6 = true;
    for &s in &samples {
        let a = s.abs();
        let d1 = eval_df(s).abs();
        let d2 = eval_d2f(s);
        let d3 = eval_d3f(s).abs();
        ok3 &= d1 <= spec.c1 * a.powf(q) + spec.c2 + 1e-12 * (1.0 + d1);
        ok5 &= d2.abs() <= spec.c4 * a.powf(q - 1.0) + spec.c4p + 1e-12 * (1.0 + d2.abs());
        ok6 &= d3 <= spec.c5 * (1.0 + a.powf(q - 2.0)) + 1e-12 * (1.0 + d3);
        if a > 0.0 {
            t3 = t3.max((d1 - spec.c2).max(0.0) / a.powf(q));
            t5 = t5.max((d2.abs() - spec.c4p).max(0.0) / a.powf(q - 1.0));
        }
        t4 = t4.max(-d2);
        t6 = t6.max(d3 / (1.0 + a.powf(q - 2.0)));
    }

    let mut items = vec![
        AssumptionItem {
            item: "smoothness".into(),
            pass: samples
                .iter()
                .all(|&s| eval_f(s).is_finite() && eval_d2f(s).is_finite()),
            stored: 0.0,
            tightest: 0.0,
            note: "closed-form derivatives up to third order".into(),
        },
        AssumptionItem {
            item: "df_growth".into(),
            pass: ok3 && spec.c1 > 0.0 && spec.c2 >= 0.0,
            stored: spec.c1,
            tightest: t3,
            note: format!("|F'(s)| <= C1 |s|^{q} + C2 with C2 = {}", spec.c2),
        },
        AssumptionItem {
            item: "d2f_lower_bound".into(),
            pass: spec.c3 > 0.0 && t4 <= spec.c3,
            stored: spec.c3,
            tightest: t4,
            note: "F''(s) >= -C3".into(),
        },
        AssumptionItem {
            item: "d2f_growth".into(),
            pass: ok5 && spec.c4 > 0.0 && spec.c4p > 0.0,
            stored: spec.c4,
            tightest: t5,
            note: format!("|F''(s)| <= C4 |s|^{} + C4' with C4' = {}", q - 1.0, spec.c4p),
        },
        AssumptionItem {
            item: "d3f_growth".into(),
            pass: ok6 && spec.c5 > 0.0,
            stored: spec.c5,
            tightest: t6,
            note: format!("|F'''(s)| <= C5 (1 + |s|^{})", q - 2.0),
        },
    ];

    if let Some(v) = viscosity {
        let eps = 1e-6;
        let mut inside = true;
        let mut lip: f64 = 0.0;
        for &s in &samples {
            let nu = v.eval(s);
            inside &= v.nu1 < nu && nu < v.nu2;
            lip = lip.max((v.eval(s + eps) - v.eval(s - eps)).abs() / (2.0 * eps));
        }
        let bound = 0.5 * (v.nu2 - v.nu1);
        items.push(AssumptionItem {
            item: "viscosity_bounds".into(),
            pass: inside && v.nu1 > 0.0 && lip <= bound * (1.0 + 1e-6),
            stored: bound,
            tightest: lip,
            note: "nu1 < nu(s) < nu2 and |nu'| <= (nu2 - nu1)/2".into(),
        });
    }

    Ok(AssumptionReport {
        samples: samples.len(),
        range,
        items,
    })
}

/// Strict form of [`assess_assumptions`]: a violated bound is an error.
pub fn verify_assumptions(
    spec: &PotentialSpec,
    viscosity: Option<&ViscositySpec>,
    range: (f64, f64),
    n_samples: usize,
) -> Result<AssumptionReport> {
    let report = assess_assumptions(spec, viscosity, range, n_samples)?;
    let failed: Vec<&AssumptionItem> = report.items.iter().filter(|i| !i.pass).collect();
    if let Some(first) = failed.first() {
        return Err(ChnsError::AssumptionViolated {
            item: failed.iter().map(|i| i.item.as_str()).collect::<Vec<_>>().join(","),
            detail: format!(
                "{}: stored {} but samples need {}",
                first.item, first.stored, first.tightest
            ),
        });
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn well_values() {
        assert_eq!(eval_f(1.0), 0.0);
        assert_eq!(eval_f(-1.0), 0.0);
        assert_eq!(eval_f(0.0), 1.0);
        assert_eq!(eval_d2f(0.0), -4.0);
        assert_eq!(eval_df(2.0), 24.0);
        assert_eq!(eval_d3f(2.0), 48.0);
    }

    #[test]
    fn tanh_law() {
        let v = ViscositySpec::new(0.5, 1.5).unwrap();
        assert_eq!(v.eval(0.0), 1.0);
        assert!(v.eval(20.0) < 1.5);
        assert!((v.eval(1.0) - 1.380_797_077_977_882_3).abs() < 1e-14);
        assert!(v.eval(50.0) <= 1.5 - VISCOSITY_MARGIN);
        assert!(v.eval(-50.0) >= 0.5 + VISCOSITY_MARGIN);
    }

    #[test]
    fn default_constants_pass() {
        let r = verify_assumptions(&PotentialSpec::default(), None, (-3.0, 3.0), 601).unwrap();
        assert!(r.all_pass());
        let a4 = r.items.iter().find(|i| i.item == "d2f_lower_bound").unwrap();
        assert_eq!(a4.tightest, 4.0);
    }

    #[test]
    fn small_c3_fails() {
        let spec = PotentialSpec {
            c3: 1.0,
            ..PotentialSpec::default()
        };
        match verify_assumptions(&spec, None, (-3.0, 3.0), 100) {
            Err(ChnsError::AssumptionViolated { item, .. }) => assert_eq!(item, "d2f_lower_bound"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn narrow_range_rejected() {
        assert!(matches!(
            verify_assumptions(&PotentialSpec::default(), None, (-0.1, 0.1), 10),
            Err(ChnsError::RangeTooSmall { .. })
        ));
    }

    #[test]
    fn nu2_must_exceed_nu1() {
        assert!(ViscositySpec::new(1.0, 1.0).is_err());
        assert!(ViscositySpec::new(0.0, 1.0).is_err());
    }
}
