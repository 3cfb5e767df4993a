use avf_core::calibration::*;
use avf_core::config::RunConfig;
use avf_core::error::Error;
use avf_core::material::{blocked_recovery_force, frozen_fraction, MaterialParams, ProgrammedState};
use avf_core::mechanics::Gains;

fn truth() -> MaterialParams {
    MaterialParams {
        e_glassy_mpa: 8.0,
        e_rubbery_mpa: 5.0,
        ..MaterialParams::sme25()
    }
}

fn state(p: &MaterialParams, test: &ForceTest) -> ProgrammedState {
    ProgrammedState {
        eps_prog: test.eps_prog,
        t_fix: test.t_fix,
        phi_fix: frozen_fraction(test.t_fix, p),
        eps_retained_at_fix: p.r_f * test.eps_prog,
    }
}

fn curve(p: &MaterialParams, n: usize) -> Vec<ForceSample> {
    let test = ForceTest::default();
    let st = state(p, &test);
    (0..n)
        .map(|i| {
            let t_c = 20.0 + 60.0 * i as f64 / (n - 1) as f64;
            ForceSample {
                t_c,
                f_n: blocked_recovery_force(t_c, &st, p, test.area_mm2).unwrap(),
            }
        })
        .collect()
}

fn perturbed(p: &MaterialParams) -> MaterialParams {
    MaterialParams {
        t_sw_c: p.t_sw_c * 1.1,
        w_c: p.w_c * 0.8,
        e_rubbery_mpa: p.e_rubbery_mpa * 1.1,
        ..p.clone()
    }
}

#[test]
fn residuals_of_exact_curve_vanish() {
    let p = truth();
    let test = ForceTest::default();
    let samples = curve(&p, 31);
    let r = residuals(&p, &state(&p, &test), test.area_mm2, &samples).unwrap();
    assert_eq!(r.len(), samples.len());
    assert!(r.iter().all(|x| x.abs() < 1e-15));
}

#[test]
fn residuals_are_model_minus_data_in_order() {
    let p = truth();
    let test = ForceTest::default();
    let mut samples = curve(&p, 7);
    for (i, s) in samples.iter_mut().enumerate() {
        s.f_n += 0.01 * i as f64;
    }
    let r = residuals(&p, &state(&p, &test), test.area_mm2, &samples).unwrap();
    for (i, x) in r.iter().enumerate() {
        assert!((x + 0.01 * i as f64).abs() < 1e-12);
    }
}

#[test]
fn plateau_force() {
    let p = truth();
    let expected = 5.0 * 0.36 * (p.r_f - (1.0 - p.r_r)) * 0.40;
    assert!((ForceTest::default().plateau(&p) - expected).abs() < 1e-15);
}

#[test]
fn recovers_noiseless_parameters() {
    let p = truth();
    let init = perturbed(&p);
    let test = ForceTest::default();
    let fit = fit_material(&curve(&p, 61), &init, &test, &FitBounds::around(&init, &test)).unwrap();
    assert!(fit.converged);
    assert!(fit.rss <= fit.rss_init);
    assert!((fit.params.t_sw_c - p.t_sw_c).abs() / p.t_sw_c < 1e-3);
    assert!((fit.params.w_c - p.w_c).abs() / p.w_c < 1e-3);
    assert!((fit.params.e_rubbery_mpa - p.e_rubbery_mpa).abs() / p.e_rubbery_mpa < 1e-3);
    assert!((fit.plateau_n - test.plateau(&fit.params)).abs() < 1e-12);
    assert_eq!(fit.params.e_glassy_mpa, init.e_glassy_mpa);
    assert_eq!(fit.params.r_f, init.r_f);
}

#[test]
fn fit_is_deterministic() {
    let p = truth();
    let init = perturbed(&p);
    let test = ForceTest::default();
    let bounds = FitBounds::around(&init, &test);
    let samples = curve(&p, 25);
    assert_eq!(fit_material(&samples, &init, &test, &bounds).unwrap(), fit_material(&samples, &init, &test, &bounds).unwrap());
}

#[test]
fn flat_data_is_not_identifiable() {
    // Samples all far above the transition carry no information about T_sw or w.
    let p = truth();
    let test = ForceTest::default();
    let plateau = test.plateau(&p);
    let samples: Vec<ForceSample> = (0..10).map(|i| ForceSample { t_c: 150.0 + i as f64, f_n: plateau }).collect();
    let fit = fit_material(&samples, &p, &test, &FitBounds::around(&p, &test)).unwrap();
    assert!(!fit.converged);
    assert!(fit.rss <= fit.rss_init);
}

#[test]
fn input_errors() {
    let p = truth();
    let test = ForceTest::default();
    let bounds = FitBounds::around(&p, &test);
    let few = curve(&p, 3);
    assert!(matches!(fit_material(&few, &p, &test, &bounds), Err(Error::Config { .. })));

    let mut cold = curve(&p, 10);
    cold[4].t_c = 15.0;
    assert!(matches!(fit_material(&cold, &p, &test, &bounds), Err(Error::Domain { .. })));

    let outside = MaterialParams {
        t_sw_c: p.t_sw_c + 30.0,
        ..p.clone()
    };
    assert!(matches!(fit_material(&curve(&p, 10), &outside, &test, &bounds), Err(Error::Config { .. })));
}

fn defaults() -> (f64, f64, f64) {
    let g = Gains::default();
    (g.beta, RunConfig::preset("bidir_diamond").unwrap().demonstrator.strand.gamma, g.c_geom)
}

#[test]
fn single_point_grid_returns_that_point() {
    let (beta, gamma, c_geom) = defaults();
    let grid = GainGrid {
        beta: vec![beta],
        gamma: vec![gamma],
        c_geom: vec![c_geom],
    };
    let tuned = tune_gains(&BehaviorTargets::default(), &grid, &RunConfig::preset("L20_mono").unwrap(), 0).unwrap();
    assert_eq!((tuned.beta, tuned.gamma, tuned.c_geom), (beta, gamma, c_geom));
    assert!(tuned.score.is_finite() && tuned.score < 10.0, "{}", tuned.score);
}

#[test]
fn impossible_snap_flags_are_infeasible() {
    let (beta, gamma, c_geom) = defaults();
    let grid = GainGrid {
        beta: vec![beta],
        gamma: vec![gamma],
        c_geom: vec![c_geom],
    };
    let targets = BehaviorTargets {
        l20_snaps: true,
        ..Default::default()
    };
    let err = tune_gains(&targets, &grid, &RunConfig::preset("L20_mono").unwrap(), 0).unwrap_err();
    assert!(matches!(err, Error::Infeasible(_)));
    assert!(err.is_solver());
}

#[test]
fn empty_grid_rejected() {
    let grid = GainGrid {
        beta: vec![],
        gamma: vec![0.1],
        c_geom: vec![1.0],
    };
    assert!(matches!(
        tune_gains(&BehaviorTargets::default(), &grid, &RunConfig::preset("L20_mono").unwrap(), 0),
        Err(Error::Config { .. })
    ));
}
