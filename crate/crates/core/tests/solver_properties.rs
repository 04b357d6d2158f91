use std::f64::consts::PI;

use chns_core::boundary::{extrapolated_trace, Amplitude, WallData, WallProfile};
use chns_core::initial::{PhiInit, PhiMode, StreamMode, VelocityInit};
use chns_core::norms::{l2, l2_vec};
use chns_core::ops::divergence;
use chns_core::potential::ViscositySpec;
use chns_core::solver::{Mode, SimState, Simulation, SolverConfig};
use chns_core::{ChnsError, Grid, ScalarField, VectorField};
use proptest::prelude::*;

fn tanh_visc() -> ViscositySpec {
    ViscositySpec::new(1.0, 2.0).unwrap()
}

fn spinodal(n: usize, t_end: f64) -> (Simulation, SimState) {
    let g = Grid::new(n, n, 10.0, 10.0).unwrap();
    let sim = Simulation::new(&g, SolverConfig::new(1e-3, t_end, tanh_visc()), WallData::zero(&g)).unwrap();
    let phi = PhiInit::Noise {
        mean: 0.0,
        amplitude: 1e-2,
        seed: 7,
    }
    .build(&g)
    .unwrap();
    let s0 = sim.initial_state(phi, VectorField::zeros(&g)).unwrap();
    (sim, s0)
}

fn couette_ramp(g: &Grid) -> WallData {
    WallData::from_profiles(
        g,
        &WallProfile::Zero,
        &WallProfile::Uniform(1.0),
        Amplitude::CouetteRamp {
            a0: 0.0,
            a_inf: 1.0,
            lambda: 1.0,
        },
    )
    .unwrap()
}

#[test]
fn mass_drift_under_random_advection() {
    let g = Grid::unit(32).unwrap();
    let sim = Simulation::new(&g, SolverConfig::new(1e-3, 1.0, tanh_visc()), WallData::zero(&g)).unwrap();
    let v = VelocityInit::Stream {
        modes: vec![
            StreamMode {
                mx: 1,
                ky: 1,
                coef: 0.05,
            },
            StreamMode {
                mx: 3,
                ky: 2,
                coef: -0.02,
            },
        ],
    }
    .build(&g);
    let mut phi = PhiInit::Noise {
        mean: 0.1,
        amplitude: 0.5,
        seed: 3,
    }
    .build(&g)
    .unwrap();
    let m0 = phi.mean();
    for k in 1..=1000 {
        phi = sim.ch_substep(&phi, &v, k as f64 * 1e-3).unwrap().0;
    }
    assert!((phi.mean() - m0).abs() < 1e-11, "drift {}", (phi.mean() - m0).abs());
}

#[test]
fn couette_relaxes_to_exact_profile() {
    let g = Grid::unit(16).unwrap();
    let data = WallData::couette(&g, 1.0);
    let cfg = SolverConfig::new(1e-2, 20.0, ViscositySpec::constant(1.0, 0.01).unwrap());
    let sim = Simulation::new(&g, cfg, data).unwrap();
    let s0 = sim
        .initial_state(ScalarField::constant(&g, 1.0), VectorField::zeros(&g))
        .unwrap();
    let out = sim.run(s0, &mut []).unwrap();
    let exact = VectorField::from_fn(&g, |_, y| (y, 0.0));
    let dev = out.state.u.sub(&exact).max_abs();
    assert!(dev < 1e-6, "deviation {dev}");
}

#[test]
fn zero_data_lifted_matches_direct() {
    let g = Grid::unit(16).unwrap();
    let phi = PhiInit::Modes {
        mean: 0.0,
        modes: vec![PhiMode {
            mx: 1,
            ky: 1,
            coef: 0.5,
        }],
    }
    .build(&g)
    .unwrap();
    let mut finals = Vec::new();
    for mode in [Mode::Direct, Mode::LiftedElliptic, Mode::LiftedParabolic] {
        let mut cfg = SolverConfig::new(1e-3, 0.05, tanh_visc());
        cfg.mode = mode;
        let sim = Simulation::new(&g, cfg, WallData::zero(&g)).unwrap();
        let out = sim
            .run(sim.initial_state(phi.clone(), VectorField::zeros(&g)).unwrap(), &mut [])
            .unwrap();
        finals.push(out.state);
    }
    for s in &finals[1..] {
        assert!(s.u.sub(&finals[0].u).max_abs() < 1e-14);
        assert!(s.phi.sub(&finals[0].phi).max_abs() < 1e-14);
    }
}

#[test]
fn runs_are_deterministic_and_time_increases() {
    let (sim, s0) = spinodal(16, 0.02);
    let a = sim.run(s0.clone(), &mut []).unwrap();
    let b = sim.run(s0, &mut []).unwrap();
    let rows = |o: &chns_core::solver::RunOutput| o.records.iter().map(|r| r.csv_row()).collect::<Vec<_>>();
    assert_eq!(rows(&a), rows(&b));
    assert!(a.records.windows(2).all(|w| w[1].t > w[0].t));
}

#[test]
fn one_step_change_scales_with_dt() {
    let g = Grid::unit(16).unwrap();
    let data = couette_ramp(&g);
    let phi = PhiInit::Modes {
        mean: 0.0,
        modes: vec![PhiMode {
            mx: 1,
            ky: 1,
            coef: 0.5,
        }],
    }
    .build(&g)
    .unwrap();
    let u0 = VelocityInit::Stream {
        modes: vec![StreamMode {
            mx: 1,
            ky: 1,
            coef: 0.1,
        }],
    }
    .build(&g);
    let change = |dt: f64| {
        let sim = Simulation::new(&g, SolverConfig::new(dt, dt, tanh_visc()), data.clone()).unwrap();
        let s0 = sim.initial_state(phi.clone(), u0.clone()).unwrap();
        let s1 = sim.step(&s0).unwrap();
        (l2(&s1.phi.sub(&s0.phi)), l2_vec(&s1.u.sub(&s0.u)))
    };
    // dt K^2 must be small for the stiffest mode present
    let (p1, u1) = change(1e-6);
    let (p2, u2) = change(5e-7);
    assert!((p1 / p2 - 2.0).abs() < 0.1, "phi ratio {}", p1 / p2);
    assert!((u1 / u2 - 2.0).abs() < 0.1, "u ratio {}", u1 / u2);
}

#[test]
fn spinodal_energy_non_increasing() {
    let (sim, s0) = spinodal(32, 0.2);
    let out = sim.run(s0, &mut []).unwrap();
    assert!(out.records.windows(2).all(|w| w[1].total <= w[0].total + 1e-10));
    assert!(out.records.iter().all(|r| r.is_additive()));
}

#[test]
fn direct_mode_wall_trace_is_second_order() {
    let mut errs = Vec::new();
    for n in [16, 32] {
        let g = Grid::unit(n).unwrap();
        let data = WallData::from_profiles(
            &g,
            &WallProfile::Zero,
            &WallProfile::SingleMode { m: 1, coef: 1.0 },
            Amplitude::CustomStatic { a: 1.0 },
        )
        .unwrap();
        let cfg = SolverConfig::new(2e-3, 0.1, ViscositySpec::constant(1.0, 0.01).unwrap());
        let sim = Simulation::new(&g, cfg, data.clone()).unwrap();
        let s0 = sim
            .initial_state(ScalarField::constant(&g, 1.0), VectorField::zeros(&g))
            .unwrap();
        let out = sim.run(s0, &mut []).unwrap();
        let tr = extrapolated_trace(&out.state.u);
        let h = data.eval_wall(out.state.t).unwrap();
        let e = tr
            .top
            .iter()
            .zip(&h.top)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        errs.push(e);
    }
    assert!(errs[1] < errs[0] / 3.0, "trace errors {errs:?}");
}

#[test]
fn unstable_dt_is_a_cfl_error() {
    let g = Grid::unit(64).unwrap();
    let sim = Simulation::new(&g, SolverConfig::new(0.05, 1.0, tanh_visc()), WallData::zero(&g)).unwrap();
    let s0 = sim
        .initial_state(ScalarField::constant(&g, 0.0), VectorField::zeros(&g))
        .unwrap();
    assert!(matches!(sim.run(s0, &mut []), Err(ChnsError::CflViolation { .. })));
}

#[test]
fn full_resolution_cutoff_matches_untruncated() {
    let (sim, s0) = spinodal(16, 0.02);
    let r = sim.galerkin_study(&s0, &[8, 64], 2).unwrap();
    assert!(r.errors[1] < 1e-12, "{:?}", r.errors);
}

#[test]
fn bandlimited_linear_regime_is_invariant() {
    let g = Grid::unit(16).unwrap();
    let sim = Simulation::new(&g, SolverConfig::new(1e-3, 0.02, tanh_visc()), WallData::zero(&g)).unwrap();
    let phi = ScalarField::from_fn(&g, |x, y| 1e-6 * (2.0 * PI * x).cos() * (PI * y).cos());
    let s0 = sim.initial_state(phi, VectorField::zeros(&g)).unwrap();
    let r = sim.galerkin_study(&s0, &[2, 4, 8], 3).unwrap();
    // cubic terms leak O(amp^3) energy outside the band
    assert!(r.errors.iter().all(|&e| e < 1e-15), "{:?}", r.errors);
}

#[test]
fn incompressible_after_each_step() {
    let g = Grid::unit(32).unwrap();
    let mut cfg = SolverConfig::new(1e-3, 0.0, ViscositySpec::new(1.0, 1.2).unwrap());
    cfg.mode = Mode::LiftedParabolic;
    let sim = Simulation::new(&g, cfg, couette_ramp(&g)).unwrap();
    let phi = PhiInit::Modes {
        mean: 0.0,
        modes: vec![PhiMode {
            mx: 2,
            ky: 1,
            coef: 0.7,
        }],
    }
    .build(&g)
    .unwrap();
    let mut s = sim.initial_state(phi, VectorField::zeros(&g)).unwrap();
    for _ in 0..20 {
        s = sim.step(&s).unwrap();
        assert!(divergence(&s.u).unwrap().max_abs() < 1e-8);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn mass_is_conserved(seed in any::<u64>(), mean in -0.8f64..0.8, amp in 0.0f64..0.5, mode in 0usize..3) {
        let g = Grid::new(16, 8, 2.0, 1.0).unwrap();
        let mut cfg = SolverConfig::new(5e-4, 0.0, tanh_visc());
        cfg.mode = [Mode::Direct, Mode::LiftedElliptic, Mode::LiftedParabolic][mode];
        let sim = Simulation::new(&g, cfg, couette_ramp(&g)).unwrap();
        let phi = PhiInit::Noise { mean, amplitude: amp, seed }.build(&g).unwrap();
        let mut s = sim.initial_state(phi, VectorField::zeros(&g)).unwrap();
        let m0 = s.phi.mean();
        for _ in 0..5 {
            s = sim.step(&s).unwrap();
            prop_assert!((s.phi.mean() - m0).abs() < 1e-12);
            prop_assert_eq!(s.u.wall_normal_max(), 0.0);
            let rec = sim.diagnostics().energy(&s).unwrap();
            prop_assert!(rec.is_additive());
        }
    }
}
