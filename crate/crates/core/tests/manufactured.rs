use chns_core::mms::{observed_orders, ManufacturedSolution};
use chns_core::potential::ViscositySpec;
use chns_core::solver::Mode;

#[test]
fn observed_orders_of_exact_powers() {
    let e: Vec<f64> = (0..4).map(|k| 3.0 * 0.25f64.powi(k)).collect();
    assert!(observed_orders(&e).iter().all(|o| (o - 2.0).abs() < 1e-12));
}

#[test]
fn spatial_error_is_second_order_in_every_mode() {
    let m = ManufacturedSolution::new(ViscositySpec::new(1.0, 1.2).unwrap());
    for mode in [Mode::Direct, Mode::LiftedElliptic, Mode::LiftedParabolic] {
        let errs: Vec<_> = [8, 16, 32]
            .iter()
            .map(|&n| {
                let dx = 1.0 / n as f64;
                m.run(n, 0.5 * dx * dx, 0.02, mode).unwrap().1
            })
            .collect();
        let op = observed_orders(&errs.iter().map(|e| e.phi_l2).collect::<Vec<_>>());
        let ou = observed_orders(&errs.iter().map(|e| e.u_l2).collect::<Vec<_>>());
        assert!(op[1] > 1.8 && ou[1] > 1.8, "{mode:?}: phi {op:?}, u {ou:?}");
    }
}
