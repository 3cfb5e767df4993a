use avf_core::error::Error;
use avf_core::material::*;
use proptest::prelude::*;

fn mat(t_sw: f64, w: f64) -> MaterialParams {
    MaterialParams {
        name: "probe".into(),
        e_glassy_mpa: 300.0,
        e_rubbery_mpa: 3.0,
        t_sw_c: t_sw,
        w_c: w,
        r_f: 0.97,
        r_r: 0.99,
        eps_max: 4.0,
    }
}

fn programmed(p: &MaterialParams, eps: f64) -> ProgrammedState {
    program(p, eps, p.t_sw_c + 10.0 * p.w_c, 20.0).unwrap()
}

/// Logistic evaluated without sharing code with the library.
fn logistic(x: f64) -> f64 {
    1.0 / (1.0 + x.exp())
}

#[test]
fn frozen_fraction_values() {
    let p = mat(38.1, 2.0);
    assert!((frozen_fraction(38.1, &p) - 0.5).abs() < 1e-15);
    assert!((frozen_fraction(18.1, &p) - 0.9999546).abs() < 1e-6);
    assert!((frozen_fraction(58.1, &p) - 4.54e-5).abs() < 1e-7);
    assert!((frozen_fraction(18.1, &p) - logistic(-10.0)).abs() < 1e-15);
}

#[test]
fn modulus_values() {
    let p = mat(38.1, 2.0);
    assert!((modulus(38.1, &p) - 151.5).abs() < 1e-12);
    assert!((modulus(38.1 - 20.0, &p) - 299.99).abs() < 0.01);
    let flat = MaterialParams {
        e_glassy_mpa: 5.0,
        e_rubbery_mpa: 5.0,
        ..p
    };
    for t in [0.0, 38.1, 90.0] {
        assert_eq!(modulus(t, &flat), 5.0);
    }
}

#[test]
fn programming_fixity() {
    let perfect = MaterialParams { r_f: 1.0, ..mat(38.1, 2.0) };
    assert!((programmed(&perfect, 0.40).eps_retained_at_fix - 0.40).abs() < 1e-15);
    let s = programmed(&mat(38.1, 2.0), 0.40);
    assert!((s.eps_retained_at_fix - 0.388).abs() < 1e-12);
    assert!((s.phi_fix - frozen_fraction(20.0, &mat(38.1, 2.0))).abs() < 1e-15);
}

#[test]
fn programming_errors() {
    let p = mat(38.1, 2.0);
    assert!(matches!(program(&p, 4.5, 80.0, 20.0), Err(Error::Overstrain { .. })));
    assert!(matches!(program(&p, 0.4, 39.0, 20.0), Err(Error::Protocol(_))));
    assert!(matches!(program(&p, 0.4, 80.0, 37.0), Err(Error::Protocol(_))));
}

#[test]
fn retained_strain_values() {
    let p = mat(38.1, 2.0);
    let s = programmed(&p, 0.40);
    assert!((retained_strain(20.0, &s, &p).unwrap() - 0.388).abs() < 1e-12);
    assert!((retained_strain(58.1, &s, &p).unwrap() - 0.004).abs() < 1e-4);
    // Temperature where φ(T)/φ_fix = 0.5.
    let target = 0.5 * s.phi_fix;
    let t_half = p.t_sw_c + p.w_c * (1.0 / target - 1.0).ln();
    assert!((retained_strain(t_half, &s, &p).unwrap() - 0.196).abs() < 1e-9);
    assert!(matches!(retained_strain(19.0, &s, &p), Err(Error::Domain { .. })));
}

#[test]
fn release_ratio_values() {
    let p = mat(38.1, 2.0);
    let s = programmed(&p, 0.40);
    assert_eq!(release_ratio(20.0, &s, &p).unwrap(), 0.0);
    assert!((release_ratio(38.1, &s, &p).unwrap() - 0.5).abs() < 1e-3);
    assert!((release_ratio(58.1, &s, &p).unwrap() - 1.0).abs() < 1e-4);
    assert!(release_ratio(10.0, &s, &p).is_err());
}

/// Blocked force rises monotonically only while the glassy modulus is at most
/// twice the rubbery one; beyond that it peaks near T_sw.
fn soft_glass(t_sw: f64, w: f64) -> MaterialParams {
    MaterialParams {
        e_glassy_mpa: 8.0,
        e_rubbery_mpa: 5.0,
        ..mat(t_sw, w)
    }
}

#[test]
fn blocked_force_values() {
    let p = soft_glass(38.1, 2.0);
    let s = programmed(&p, 0.40);
    assert_eq!(blocked_recovery_force(20.0, &s, &p, 0.36).unwrap(), 0.0);
    let plateau = blocked_recovery_force(120.0, &s, &p, 0.36).unwrap();
    assert!((plateau - 0.6912).abs() / 0.6912 < 0.01, "{plateau}");
    assert!(blocked_recovery_force(38.1, &s, &p, 0.36).unwrap() < blocked_recovery_force(48.1, &s, &p, 0.36).unwrap());
}

#[test]
fn plateau_flattens() {
    let p = soft_glass(38.1, 2.0);
    let s = programmed(&p, 0.40);
    let f = |t: f64| blocked_recovery_force(t, &s, &p, 0.36).unwrap();
    let t = p.t_sw_c + 5.0 * p.w_c;
    assert!(((f(t + 1.0) - f(t)) / f(t)).abs() < 0.01);
}

#[test]
fn stiff_glass_force_peaks() {
    let p = mat(38.1, 2.0);
    let s = programmed(&p, 0.40);
    let f = |t: f64| blocked_recovery_force(t, &s, &p, 0.36).unwrap();
    assert!(f(38.1) > f(58.1));
    assert!((f(120.0) - 3.0 * 0.36 * 0.96 * 0.40).abs() < 1e-6);
}

#[test]
fn cycle_phases_advance_in_order() {
    let mut phase = CyclePhase::Deformation;
    let mut seen = vec![phase];
    while let Some(next) = phase.next() {
        seen.push(next);
        phase = next;
    }
    assert_eq!(
        seen,
        [CyclePhase::Deformation, CyclePhase::CoolingFixing, CyclePhase::Unloading, CyclePhase::Recovery]
    );
}

#[test]
fn presets_are_valid() {
    for name in ["L20", "SME25", "SME40"] {
        let p = MaterialParams::builtin(name).unwrap();
        p.validate().unwrap();
        assert_eq!(p.name, name);
    }
    assert_eq!(MaterialParams::sme25().eps_max, 4.0);
    assert_eq!(MaterialParams::l20().t_sw_c, 38.1);
    assert!(MaterialParams::builtin("L30").is_none());
}

fn params_with(ratio: std::ops::Range<f64>) -> impl Strategy<Value = MaterialParams> {
    (25.0..70.0f64, 0.5..4.0f64, 1.0..50.0f64, ratio, 0.9..1.0f64, 0.9..1.0f64).prop_map(|(t_sw, w, er, ratio, rf, rr)| MaterialParams {
        name: "p".into(),
        e_glassy_mpa: er * ratio,
        e_rubbery_mpa: er,
        t_sw_c: t_sw.max(20.0 + 1.5 * w),
        w_c: w,
        r_f: rf,
        r_r: rr,
        eps_max: 4.0,
    })
}

fn params() -> impl Strategy<Value = MaterialParams> {
    params_with(1.0..400.0)
}

proptest! {
    #[test]
    fn frozen_fraction_decreasing(p in params(), z in -20.0..20.0f64, dz in 1e-3..5.0f64) {
        let t = p.t_sw_c + z * p.w_c;
        prop_assert!(frozen_fraction(t + dz * p.w_c, &p) < frozen_fraction(t, &p));
        prop_assert!((frozen_fraction(p.t_sw_c, &p) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn modulus_bounded(p in params(), t in -50.0..150.0f64) {
        let e = modulus(t, &p);
        prop_assert!(e >= p.e_rubbery_mpa && e <= p.e_glassy_mpa);
    }

    #[test]
    fn modulus_endpoints(p in params_with(1.0..20.0)) {
        let lo = modulus(p.t_sw_c - 10.0 * p.w_c, &p);
        let hi = modulus(p.t_sw_c + 10.0 * p.w_c, &p);
        prop_assert!((lo - p.e_glassy_mpa).abs() / p.e_glassy_mpa < 1e-3);
        prop_assert!((hi - p.e_rubbery_mpa).abs() / p.e_rubbery_mpa < 1e-3);
    }

    #[test]
    fn cycle_round_trip_residual(p in params(), eps in 0.01..1.0f64) {
        let s = program(&p, eps, p.t_sw_c + 10.0 * p.w_c, 20.0).unwrap();
        let residual = retained_strain(p.t_sw_c + 10.0 * p.w_c, &s, &p).unwrap();
        // The logistic tail leaves φ(T_sw + 10w)/φ_fix of the recoverable part.
        let tail = (p.r_f - (1.0 - p.r_r)) * eps * frozen_fraction(p.t_sw_c + 10.0 * p.w_c, &p) / s.phi_fix;
        prop_assert!((residual - (1.0 - p.r_r) * eps - tail).abs() < 1e-12);
        prop_assert!(tail < 1e-4 * eps);
    }

    #[test]
    fn force_non_negative_and_non_decreasing(p in params_with(1.0..2.0)) {
        let s = program(&p, 0.40, p.t_sw_c + 10.0 * p.w_c, 20.0).unwrap();
        let hi = p.t_sw_c + 10.0 * p.w_c;
        let n = 10_000;
        let mut last = 0.0;
        for i in 0..=n {
            let t = 20.0 + (hi - 20.0) * i as f64 / n as f64;
            let f = blocked_recovery_force(t, &s, &p, 0.36).unwrap();
            prop_assert!(f >= 0.0);
            prop_assert!(f >= last - 1e-12, "F dropped at {} °C", t);
            last = f;
        }
        let f = |t: f64| blocked_recovery_force(t, &s, &p, 0.36).unwrap();
        prop_assert!(f(p.t_sw_c) < f(p.t_sw_c + 5.0 * p.w_c));
    }

    #[test]
    fn force_non_negative_for_any_stiffness(p in params(), z in -10.0..30.0f64) {
        let s = program(&p, 0.40, p.t_sw_c + 10.0 * p.w_c, 20.0).unwrap();
        let t = (p.t_sw_c + z * p.w_c).max(20.0);
        prop_assert!(blocked_recovery_force(t, &s, &p, 0.36).unwrap() >= 0.0);
    }
}
