use chns_cli::config::{Experiment, RunConfig};
use chns_core::boundary::{Amplitude, WallProfile};
use chns_core::initial::{PhiInit, PhiMode, StreamMode, VelocityInit};
use chns_core::potential::ViscosityLaw;
use chns_core::solver::{Mode, Perturbation};
use proptest::prelude::*;

fn profile() -> impl Strategy<Value = WallProfile> {
    prop_oneof![
        Just(WallProfile::Zero),
        (-3.0f64..3.0).prop_map(WallProfile::Uniform),
        (0u32..4, -2.0f64..2.0).prop_map(|(m, coef)| WallProfile::SingleMode { m, coef }),
        proptest::collection::vec((0u32..4, -2.0f64..2.0), 1..4).prop_map(WallProfile::Modes),
    ]
}

fn amplitude() -> impl Strategy<Value = Amplitude> {
    prop_oneof![
        (-2.0f64..2.0, -2.0f64..2.0, 0.0f64..3.0).prop_map(|(a0, a_inf, lambda)| Amplitude::CouetteRamp {
            a0,
            a_inf,
            lambda
        }),
        (-2.0f64..2.0, 0.01f64..3.0, 0.0f64..10.0).prop_map(|(a0, lambda, omega)| Amplitude::DecayingOscillation {
            a0,
            a_inf: 0.0,
            lambda,
            omega
        }),
        (-2.0f64..2.0, 0.1f64..3.0).prop_map(|(a0, p)| Amplitude::Algebraic { a0, p }),
        (-2.0f64..2.0).prop_map(|a| Amplitude::CustomStatic { a }),
    ]
}

fn phi_init() -> impl Strategy<Value = PhiInit> {
    prop_oneof![
        (-1.0f64..1.0).prop_map(|value| PhiInit::Constant { value }),
        (-0.5f64..0.5, 0.0f64..0.5, any::<u64>()).prop_map(|(mean, amplitude, seed)| PhiInit::Noise {
            mean,
            amplitude,
            seed
        }),
        (
            -0.5f64..0.5,
            proptest::collection::vec((0u32..4, 0u32..4, -1.0f64..1.0), 1..3)
        )
            .prop_map(|(mean, m)| PhiInit::Modes {
                mean,
                modes: m.into_iter().map(|(mx, ky, coef)| PhiMode { mx, ky, coef }).collect()
            }),
    ]
}

fn velocity_init() -> impl Strategy<Value = VelocityInit> {
    prop_oneof![
        Just(VelocityInit::Zero),
        (-2.0f64..2.0).prop_map(|u_top| VelocityInit::Couette { u_top }),
        (1u32..3, 1u32..3, -0.5f64..0.5).prop_map(|(mx, ky, coef)| VelocityInit::Stream {
            modes: vec![StreamMode { mx, ky, coef }]
        }),
    ]
}

fn experiment() -> impl Strategy<Value = Experiment> {
    prop_oneof![
        Just(Experiment::Single),
        (0.0f64..0.1, any::<bool>()).prop_map(|(eps, b)| Experiment::Pair {
            perturbation: if b {
                Perturbation::Boundary
            } else {
                Perturbation::InitialPhi
            },
            eps
        }),
        Just(Experiment::Galerkin { cutoffs: vec![2, 4, 8] }),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn serialize_then_parse_is_identity(
        hx in 2usize..16, ny in 2usize..32, lx in 0.5f64..10.0, ly in 0.5f64..10.0,
        dt in 1e-5f64..1e-2, t_end in 0.0f64..10.0, every in 1usize..100,
        mode in 0usize..3, s in 0.0f64..4.0, incremental in any::<bool>(),
        nu1 in 0.1f64..2.0, dnu in 0.05f64..2.0, law in 0usize..3,
        bottom in profile(), top in profile(), amp in amplitude(),
        phi in phi_init(), u in velocity_init(), exp in experiment(),
        snap in 0usize..50,
    ) {
        let text = "[grid]\nnx = 8\nny = 8\n\n[time]\ndt = 1e-3\nt_end = 0.0\n";
        let mut c = RunConfig::from_toml(text).unwrap();
        c.grid.nx = 2 * hx;
        c.grid.ny = ny;
        c.grid.lx = lx;
        c.grid.ly = ly;
        c.time.dt = dt;
        c.time.t_end = t_end;
        c.time.record_every = every;
        c.solver.mode = [Mode::Direct, Mode::LiftedElliptic, Mode::LiftedParabolic][mode];
        c.solver.stabilization = s;
        c.solver.incremental = incremental;
        c.viscosity.nu1 = nu1;
        c.viscosity.nu2 = nu1 + dnu;
        c.viscosity.law = [ViscosityLaw::Tanh, ViscosityLaw::ClampedLinear, ViscosityLaw::Constant][law];
        c.boundary.bottom = bottom;
        c.boundary.top = top;
        c.boundary.amplitude = amp;
        c.initial.phi = phi;
        c.initial.u = u;
        c.experiment = exp;
        c.output.snapshot_every = snap;
        prop_assume!(c.validate().is_ok());
        let again = RunConfig::from_toml(&c.to_toml().unwrap()).unwrap();
        prop_assert_eq!(c, again);
    }
}
