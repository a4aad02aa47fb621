use coupled_nls::cli::verify::symmetric_params;
use coupled_nls::solver::{
    mass_saturation_check, minimize_ground, verify_strict_inequality, Init, Prediction, SeedMode, SolveConfig,
};

#[test]
fn symmetric_instance_is_a_strict_ground_state() {
    let p = symmetric_params(1.0, 1.0, 1.0);
    let r = minimize_ground(&SolveConfig::new(p)).unwrap();
    assert!(r.converged && !r.semitrivial);
    assert!(r.residual <= 1e-4);
    assert!(r.lambda1 > 0.0 && r.lambda2 > 0.0);
    assert!((r.masses.0 - 1.0).abs() < 1e-6 && (r.masses.1 - 1.0).abs() < 1e-6);
    assert!(r.pair.u.values().iter().chain(r.pair.v.values()).all(|x| *x >= 0.0));

    let rep = verify_strict_inequality(&p, &r).unwrap();
    assert_eq!(rep.prediction, Prediction::Strict);
    assert!(rep.observed_strict);
    assert!(rep.discrete_margin.unwrap() > 0.0);
    assert!(mass_saturation_check(&p, &r, 1e-6).passed);
}

#[test]
fn swapping_components_mirrors_the_level() {
    let ab = minimize_ground(&SolveConfig::new(symmetric_params(0.5, 2.0, 1.0))).unwrap();
    let ba = minimize_ground(&SolveConfig::new(symmetric_params(2.0, 0.5, 1.0))).unwrap();
    assert!(ab.converged && ba.converged);
    assert!((ab.energy / ba.energy - 1.0).abs() < 1e-9);
    assert!((ab.lambda1 / ba.lambda2 - 1.0).abs() < 1e-6);
}

#[test]
fn restarting_from_a_solution_stays_there() {
    let p = symmetric_params(1.0, 1.0, 1.0);
    let first = minimize_ground(&SolveConfig::new(p)).unwrap();
    let mut cfg = SolveConfig::new(p);
    cfg.init = Init::Custom(first.pair.clone());
    let again = minimize_ground(&cfg).unwrap();
    assert!(again.converged);
    assert!((again.energy / first.energy - 1.0).abs() < 1e-10);
}

#[test]
fn single_seed_modes_run() {
    let p = symmetric_params(1.0, 1.0, 10.0);
    for mode in [SeedMode::Scalar, SeedMode::Gaussian] {
        let mut cfg = SolveConfig::new(p);
        cfg.init = Init::Seed(mode);
        let r = minimize_ground(&cfg).unwrap();
        assert!(r.converged, "{mode:?}");
        assert!(r.strict_margin > 0.0);
    }
}
