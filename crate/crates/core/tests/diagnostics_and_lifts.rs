use std::f64::consts::PI;

use chns_core::boundary::{certify_decay, trace_norm, Amplitude, WallData, WallProfile};
use chns_core::diagnostics::{
    continuous_dependence_metric, energy_inequality_report, zlem_tail_check, Diagnostics, TrajectorySample,
};
use chns_core::initial::PhiInit;
use chns_core::lifting::{elliptic_lift, EllipticLift, LiftState};
use chns_core::potential::{eval_f, verify_assumptions, PotentialSpec, ViscositySpec};
use chns_core::solver::{chemical_potential, Mode, SimState, Simulation, SolverConfig};
use chns_core::{Grid, ScalarField, VectorField, WallTrace};
use proptest::prelude::*;

fn state(grid: &Grid, phi: ScalarField, mu: ScalarField, lift: Option<LiftState>) -> SimState {
    SimState {
        t: 0.0,
        step: 0,
        u: VectorField::zeros(grid),
        phi,
        mu,
        p: ScalarField::zeros(grid),
        ubar: lift.as_ref().map(|_| VectorField::zeros(grid)),
        lift,
    }
}

fn diagnostics(grid: &Grid, data: &WallData, mode: Mode) -> Diagnostics {
    let lift = EllipticLift::new(grid, data, 1.0).unwrap();
    Diagnostics::new(data.clone(), lift, mode, 0.01, 3.0)
}

#[test]
fn energy_at_well_minimum_and_maximum() {
    let g = Grid::unit(8).unwrap();
    let d = diagnostics(&g, &WallData::zero(&g), Mode::Direct);
    let one = ScalarField::constant(&g, 1.0);
    let rec = d
        .energy(&state(&g, one.clone(), chemical_potential(&one), None))
        .unwrap();
    assert_eq!(rec.total, 0.0);
    let zero = ScalarField::zeros(&g);
    let rec = d
        .energy(&state(&g, zero.clone(), chemical_potential(&zero), None))
        .unwrap();
    assert!((rec.total - 1.0).abs() < 1e-14);
    assert!((rec.bulk - 1.0).abs() < 1e-14);
    assert!(rec.is_additive());
}

#[test]
fn interface_energy_matches_fine_quadrature() {
    let ly = 4.0;
    let g = Grid::new(8, 128, 1.0, ly).unwrap();
    let phi = PhiInit::Interface { y0: 0.5 * ly, eps: 0.5 }.build(&g).unwrap();
    let d = diagnostics(&g, &WallData::zero(&g), Mode::Direct);
    let rec = d
        .energy(&state(&g, phi.clone(), chemical_potential(&phi), None))
        .unwrap();

    // composite Simpson on the continuous profile
    let f = |y: f64| {
        let z = (y - 0.5 * ly) * 2f64.sqrt();
        let th = z.tanh();
        let dphi = 2f64.sqrt() * (1.0 - th * th);
        0.5 * dphi * dphi + eval_f(th)
    };
    let n = 200_000;
    let h = ly / n as f64;
    let mut acc = f(0.0) + f(ly);
    for k in 1..n {
        acc += f(k as f64 * h) * if k % 2 == 1 { 4.0 } else { 2.0 };
    }
    let oracle = acc * h / 3.0;
    let got = rec.interfacial + rec.bulk;
    assert!(((got - oracle) / oracle).abs() < 1e-3, "got {got}, oracle {oracle}");
}

#[test]
fn equilibrium_record_series_is_all_zero() {
    let g = Grid::unit(8).unwrap();
    let data = WallData::zero(&g);
    let cfg = SolverConfig::new(1e-3, 0.01, ViscositySpec::new(1.0, 1.5).unwrap());
    let sim = Simulation::new(&g, cfg, data.clone()).unwrap();
    let s0 = sim
        .initial_state(ScalarField::constant(&g, 1.0), VectorField::zeros(&g))
        .unwrap();
    let out = sim.run(s0, &mut []).unwrap();
    let r = energy_inequality_report(&out.records, &data, 0.01, 1e-10).unwrap();
    assert_eq!(r.max_increase, 0.0);
    assert_eq!(r.dissipation_integral, 0.0);
    assert_eq!(r.gronwall_sup, 0.0);
    assert_eq!(r.balance_ok, Some(true));
}

#[test]
fn higher_order_trivial_states() {
    let g = Grid::unit(8).unwrap();
    let data = WallData::zero(&g);
    let d = diagnostics(&g, &data, Mode::LiftedParabolic);
    let lift = LiftState::initialize(&EllipticLift::new(&g, &data, 1.0).unwrap(), &data, 0.0).unwrap();
    for c in [1.0, 0.0] {
        let phi = ScalarField::constant(&g, c);
        let ho = d
            .higher_order(&state(&g, phi.clone(), chemical_potential(&phi), Some(lift.clone())))
            .unwrap();
        assert_eq!(ho.a, 0.0);
        assert_eq!(ho.b, 0.0);
    }
    let direct = diagnostics(&g, &data, Mode::Direct);
    let phi = ScalarField::constant(&g, 1.0);
    assert!(direct.higher_order(&state(&g, phi.clone(), phi, None)).is_err());
}

#[test]
fn higher_order_single_mode_eigen_algebra() {
    let g = Grid::new(16, 12, 1.0, 1.0).unwrap();
    let data = WallData::zero(&g);
    let d = diagnostics(&g, &data, Mode::LiftedParabolic);
    let lift = LiftState::initialize(&EllipticLift::new(&g, &data, 1.0).unwrap(), &data, 0.0).unwrap();
    let eps = 0.3;
    let phi = ScalarField::from_fn(&g, |x, y| eps * (2.0 * PI * x).cos() * (PI * y).cos());
    let (dx, dy) = (g.dx(), g.dy());
    let k = (2.0 / (dx * dx)) * (1.0 - (2.0 * PI * dx).cos()) + (2.0 / (dy * dy)) * (1.0 - (PI * dy).cos());
    // mu := phi so every term is a multiple of the same mode
    let ho = d.higher_order(&state(&g, phi.clone(), phi, Some(lift))).unwrap();
    let n2 = eps * eps / 4.0;
    let a = k * k * n2 + n2;
    let b = k.powi(4) * n2 + k * k * n2;
    assert!(((ho.a - a) / a).abs() < 1e-12, "{} vs {a}", ho.a);
    assert!(((ho.b - b) / b).abs() < 1e-12, "{} vs {b}", ho.b);
}

#[test]
fn steady_residuals() {
    let g = Grid::unit(16).unwrap();
    let data = WallData::from_profiles(
        &g,
        &WallProfile::Zero,
        &WallProfile::SingleMode { m: 1, coef: 1.0 },
        Amplitude::CustomStatic { a: 0.5 },
    )
    .unwrap();
    let d = diagnostics(&g, &data, Mode::Direct);
    let (u_inf, _) = elliptic_lift(&g, &data, 0.0, 1.0).unwrap();
    let one = ScalarField::constant(&g, 1.0);
    let mut s = state(&g, one.clone(), one, None);
    s.u = u_inf;
    let (rp, ru) = d.steady_state_residuals(&s).unwrap();
    assert_eq!(rp, 0.0);
    assert!(ru < 1e-12);
    let zero = ScalarField::zeros(&g);
    s.phi = zero;
    assert_eq!(d.steady_state_residuals(&s).unwrap().0, 0.0);
    // res_phi ignores mu
    s.mu = ScalarField::constant(&g, 7.0);
    assert_eq!(d.steady_state_residuals(&s).unwrap().0, 0.0);
}

#[test]
fn identical_trajectories_have_zero_distance() {
    let g = Grid::unit(8).unwrap();
    let sample = |t: f64| TrajectorySample {
        t,
        u: VectorField::from_fn(&g, |x, y| (x * y, 0.0)),
        phi: ScalarField::from_fn(&g, |x, _| x),
        h: WallTrace::uniform(8, 0.0, t),
        dh: WallTrace::uniform(8, 0.0, 1.0),
    };
    let run: Vec<_> = (0..5).map(|k| sample(k as f64 * 0.1)).collect();
    let r = continuous_dependence_metric(&run, &run, 1.0).unwrap();
    assert_eq!(r.lhs, 0.0);
    assert!(r.ratio.is_none());
    assert!(continuous_dependence_metric(&run, &run[1..], 1.0).is_err());
}

#[test]
fn zlem_exponential_tail() {
    let t: Vec<f64> = (0..=400).map(|k| k as f64 * 0.05).collect();
    let y: Vec<f64> = t.iter().map(|s| (-s).exp()).collect();
    let r = zlem_tail_check(&t, &y, &y).unwrap();
    let t_end: f64 = 20.0;
    assert!((r.tail_ratio - (-t_end / 2.0).exp()).abs() < 1e-12);
    assert!(r.decaying && r.integrable);
}

#[test]
fn decaying_oscillation_is_certified() {
    let g = Grid::unit(16).unwrap();
    let data = WallData::from_profiles(
        &g,
        &WallProfile::Zero,
        &WallProfile::Modes(vec![(0, 1.0), (1, 0.5)]),
        Amplitude::DecayingOscillation {
            a0: 1.0,
            a_inf: 0.0,
            lambda: 0.1,
            omega: 2.0 * PI,
        },
    )
    .unwrap();
    let grid: Vec<f64> = (0..=100).map(|k| k as f64).collect();
    assert!(certify_decay(&data, 1.0, &grid).unwrap().all_pass());
    let steady = WallData::couette(&g, 1.0);
    assert!(!certify_decay(&steady, 1.0, &grid).unwrap().all_pass());
}

#[test]
fn couette_lift_is_exact_on_several_grids() {
    for (nx, ny, lx, ly) in [(8, 4, 1.0, 1.0), (32, 32, 1.0, 1.0), (16, 40, 3.0, 2.0)] {
        let g = Grid::new(nx, ny, lx, ly).unwrap();
        let data = WallData::couette(&g, 1.7);
        let (u, _) = elliptic_lift(&g, &data, 0.0, 0.8).unwrap();
        let exact = VectorField::from_fn(&g, |_, y| (1.7 * y / ly, 0.0));
        assert!(u.sub(&exact).max_abs() < 1e-10);
    }
}

#[test]
fn default_potential_passes_assumptions() {
    let visc = ViscositySpec::new(1.0, 2.0).unwrap();
    assert!(verify_assumptions(&PotentialSpec::default(), Some(&visc), (-5.0, 5.0), 2001).is_ok());
    assert!(ViscositySpec::new(1.0, 1.0).is_err());
}

proptest! {
    #[test]
    fn trace_norm_is_monotone_in_order(vals in proptest::collection::vec(-1.0f64..1.0, 8), s in -1.0f64..1.0, ds in 0.0f64..1.0) {
        let lo = trace_norm(&vals, 1.0, s);
        let hi = trace_norm(&vals, 1.0, s + ds);
        prop_assert!(lo <= hi * (1.0 + 1e-12) + 1e-300);
    }

    #[test]
    fn trace_norm_is_homogeneous(vals in proptest::collection::vec(-1.0f64..1.0, 8), c in -5.0f64..5.0, s in -1.0f64..2.0) {
        let scaled: Vec<f64> = vals.iter().map(|v| c * v).collect();
        let a = trace_norm(&scaled, 2.0, s);
        let b = c.abs() * trace_norm(&vals, 2.0, s);
        prop_assert!((a - b).abs() <= 1e-12 * b.max(1e-12));
    }

    #[test]
    fn lift_is_linear_in_amplitude(c in -3.0f64..3.0, t in 0.0f64..5.0) {
        let g = Grid::unit(8).unwrap();
        let data = WallData::from_profiles(
            &g,
            &WallProfile::Zero,
            &WallProfile::SingleMode { m: 1, coef: 1.0 },
            Amplitude::CouetteRamp { a0: 0.0, a_inf: 1.0, lambda: 1.0 },
        )
        .unwrap();
        let lift = EllipticLift::new(&g, &data, 1.0).unwrap();
        let u1 = lift.velocity(&data, t).unwrap();
        let scaled = data.scaled(c);
        let u2 = EllipticLift::new(&g, &scaled, 1.0).unwrap().velocity(&scaled, t).unwrap();
        prop_assert!(u2.sub(&u1.scale(c)).max_abs() < 1e-12 * (1.0 + c.abs()));
    }
}
