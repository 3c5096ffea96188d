use dispersionlab::ode::{
    analytic_solution, run_ode_experiment, solve_central_fd, solve_forward_euler, verify_nonmatching, AuxStencil,
    GaussianSource, NonmatchingSetup, OdeConfig, ToySystem, CENTRAL_FD, CORRECTED, FORWARD_EULER,
};
use dispersionlab::TimeSeries;
use num_complex::Complex64;

/// `int_0^t f(s) exp(-(t - s)) ds` by composite Simpson on a fine grid.
fn simpson_oracle(src: &GaussianSource, t: f64) -> Complex64 {
    let m = 200_000;
    let h = t / m as f64;
    let g = |s: f64| src.eval(s) * (-(t - s)).exp();
    let mut acc = g(0.0) + g(t);
    for k in 1..m {
        acc += g(k as f64 * h) * if k % 2 == 1 { 4.0 } else { 2.0 };
    }
    acc * h / 3.0
}

#[test]
fn analytic_solution_agrees_with_simpson() {
    for a in [0.0, 4.0] {
        let src = GaussianSource::new(5.0, 0.1, a).unwrap();
        for t in [4.5, 5.0, 5.3, 7.0, 10.0] {
            let err = (analytic_solution(&src, t).unwrap() - simpson_oracle(&src, t)).norm();
            assert!(err < 1e-12, "a {a} t {t}: {err:e}");
        }
    }
}

#[test]
fn oracle_value_after_the_pulse() {
    // for t well past the pulse u(t) = exp(-(t - mu) + sigma2 / 2)
    let src = GaussianSource::new(5.0, 0.1, 0.0).unwrap();
    let u = analytic_solution(&src, 10.0).unwrap();
    assert!((u.re - (-4.95f64).exp()).abs() < 1e-15);
    assert!((u.re - 7.0834e-3).abs() < 1e-7);
}

#[test]
fn forward_euler_approaches_the_fixed_point() {
    let dt = 0.1;
    let f = TimeSeries::new(vec![1.0; 200], dt).unwrap();
    let v = solve_forward_euler(&f);
    for (n, &x) in v.samples().iter().enumerate() {
        assert!((x - (1.0 - (1.0 - dt).powi(n as i32))).abs() < 1e-14);
    }
}

#[test]
fn central_fd_of_zero_is_zero() {
    let g = TimeSeries::new(vec![Complex64::default(); 64], 0.02).unwrap();
    assert!(solve_central_fd(&g).samples().iter().all(|z| *z == Complex64::default()));
}

fn cfg(a: f64, dt: f64) -> OdeConfig {
    OdeConfig { mu: 5.0, sigma2: 0.1, a, dt, t_max: 20.0, taper_fraction: Some(0.1) }
}

#[test]
fn corrected_beats_both_baselines() {
    let r = run_ode_experiment(&cfg(4.0, 0.02)).unwrap();
    let e = |m| r.report.method(m).unwrap().max_error_window;
    assert!(e(CORRECTED) < 1e-9);
    assert!(e(CENTRAL_FD) > 1e-3 && e(FORWARD_EULER) > 1e-3);
}

#[test]
fn breakdown_above_the_band_and_recovery_after_refinement() {
    let coarse = run_ode_experiment(&cfg(7.5, 0.02)).unwrap();
    assert!(coarse.report.method(CORRECTED).unwrap().max_error_window > 1e-2);
    let fine = run_ode_experiment(&cfg(7.5, 0.01)).unwrap();
    assert!(fine.report.separation(FORWARD_EULER, CORRECTED).unwrap() > 1e8);
    assert!(fine.report.separation(CENTRAL_FD, CORRECTED).unwrap() > 1e8);
}

#[test]
fn halving_dt_does_not_increase_the_corrected_error() {
    let errs: Vec<f64> = [0.04, 0.02, 0.01]
        .iter()
        .map(|&dt| run_ode_experiment(&cfg(0.0, dt)).unwrap().report.method(CORRECTED).unwrap().max_error_window)
        .collect();
    assert!(errs.windows(2).all(|w| w[1] <= w[0]), "{errs:?}");
}

#[test]
fn invalid_configs_are_rejected() {
    assert!(run_ode_experiment(&OdeConfig { dt: 0.03, ..cfg(0.0, 0.02) }).is_err());
    assert!(run_ode_experiment(&OdeConfig { sigma2: -1.0, ..cfg(0.0, 0.02) }).is_err());
    assert!(run_ode_experiment(&OdeConfig { taper_fraction: Some(1.5), ..cfg(0.0, 0.02) }).is_err());
}

#[test]
fn nonmatching_convolution_closes_the_aux_equation() {
    let r = verify_nonmatching(&NonmatchingSetup::default()).unwrap();
    assert!(r.residual_aux_with_g < 1e-8);
    assert!(r.residual_aux_without_g > 10.0 * r.residual_aux_with_g);
    assert!(r.residual_main < 1e-8);
}

#[test]
fn matching_aux_scheme_needs_no_convolution() {
    let r = verify_nonmatching(&NonmatchingSetup { aux: AuxStencil::Central, ..Default::default() }).unwrap();
    assert!((r.residual_aux_with_g - r.residual_aux_without_g).abs() < 1e-12);
}

#[test]
fn zero_forcing_gives_zero_residuals() {
    let r = verify_nonmatching(&NonmatchingSetup { amplitude: 0.0, ..Default::default() }).unwrap();
    assert_eq!((r.residual_main, r.residual_aux_with_g, r.residual_aux_without_g), (0.0, 0.0, 0.0));
}

#[test]
fn unstable_toy_system_is_rejected() {
    assert!(ToySystem::default().eigenvalues().iter().all(|l| l.re < 0.0));
    let unstable = ToySystem { l11: 1.0, ..ToySystem::default() };
    assert!(unstable.eigenvalues().iter().any(|l| l.re > 0.0));
    assert!(verify_nonmatching(&NonmatchingSetup { system: unstable, ..Default::default() }).is_err());
}
