use std::f64::consts::{FRAC_PI_2, PI};

use hardy_cones::closed_forms::{
    ball_inequality_scan, cone_weak_superharmonicity, diff_ineq_field, eta, ftt_classify, ftt_derive,
    ftt_integrability_check, ftt_residual_check, random_ball_bumps, supersolution_identity_check, BallBump,
    BallSpec, DeltaEvaluator, FieldMethod, FttClass, IntegrabilityVerdict, FD_STEP,
};
use hardy_cones::geometry::ConeSpec;
use hardy_cones::report::ftt_samples;

#[test]
fn derived_coefficients() {
    let s = ftt_derive(3, &[-0.3, -0.2, 0.0]).unwrap();
    let expected_b = [0.25 - 0.09, (-0.3f64 - 0.5).powi(2) - 0.04, (-0.2f64 - 0.5).powi(2)];
    let expected_g = [-0.8, -0.2 + 0.3 + 0.5, 0.0 + 0.2 + 0.5];
    for i in 0..3 {
        assert!((s.betas[i] - expected_b[i]).abs() < 1e-15);
        assert!((s.gammas[i] - expected_g[i]).abs() < 1e-15);
    }
    let bridge = ftt_derive(2, &[-0.5, 0.0]).unwrap();
    assert_eq!(bridge.betas.iter().sum::<f64>(), 1.0);
    assert!(ftt_derive(2, &[0.1, 0.0]).is_err());
    assert!(ftt_derive(3, &[0.0, 0.0]).is_err());
    assert!(ftt_derive(1, &[0.0]).is_err());
}

#[test]
fn potential_is_minus_laplacian_ratio() {
    for alphas in [vec![0.0, 0.0], vec![-0.7, -0.1], vec![-0.3, -0.2, 0.0], vec![-0.1, -0.4, -0.2, -0.3]] {
        let s = ftt_derive(alphas.len(), &alphas).unwrap();
        let r = ftt_residual_check(&s, &ftt_samples(alphas.len(), 50, 9), FD_STEP).unwrap();
        assert_eq!(r.checked, 50);
        assert!(r.fd_residual <= 1e-5, "{alphas:?}: {r:?}");
        assert!(r.analytic_residual <= 1e-12, "{alphas:?}: {r:?}");
    }
}

#[test]
fn classification() {
    let class = |a: &[f64]| ftt_classify(&ftt_derive(a.len(), a).unwrap());
    assert_eq!(class(&[-0.3, -0.2, 0.0]), FttClass::Critical);
    assert_eq!(class(&[-0.2, -0.2, 0.0]), FttClass::Critical);
    assert_eq!(class(&[0.0, 0.0, -0.1]), FttClass::Subcritical);
    assert_eq!(class(&[0.0, 0.0, 0.0]), FttClass::CriticalConjectured);
    assert!(FttClass::Subcritical.description().contains("Sobolev"));
}

#[test]
fn integrability_near_the_axis() {
    for a in [vec![0.0, 0.0], vec![-0.5, 0.0], vec![-0.3, -0.2, 0.0]] {
        let r = ftt_integrability_check(&ftt_derive(a.len(), &a).unwrap(), 8).unwrap();
        assert_eq!(r.verdict, IntegrabilityVerdict::Finite, "{a:?}: {r:?}");
    }
    let r = ftt_integrability_check(&ftt_derive(3, &[0.0, 0.0, 0.0]).unwrap(), 9).unwrap();
    assert_ne!(r.verdict, IntegrabilityVerdict::Finite);
    assert!(r.partial_integrals.windows(2).all(|w| w[1] - w[0] > 2.0));
    assert!(ftt_integrability_check(&ftt_derive(3, &[0.0, 0.0, -0.1]).unwrap(), 8).is_err());
}

#[test]
fn half_space_field_vanishes() {
    for n in [2, 3, 5] {
        let ev = DeltaEvaluator::HalfSpace { n };
        for mu in [-1.0, 0.0, 0.25] {
            let mut x = vec![0.3; n];
            x[0] = 0.7;
            let s = diff_ineq_field(&ev, mu, &x, FieldMethod::ClosedForm).unwrap();
            assert!(s.e_value.abs() < 1e-12);
        }
    }
    assert!(eta(3, 0.3).is_err());
    assert_eq!(eta(3, 0.25).unwrap(), 2.0);
}

#[test]
fn balls_touching_the_origin() {
    for n in [2, 3, 4] {
        let mut c = vec![0.0; n];
        c[n - 1] = 1.5;
        let ball = BallSpec::new(1.5, c, 0.25).unwrap();
        let r = ball_inequality_scan(&ball, 2000, 5).unwrap();
        assert_eq!(r.samples, 2000);
        assert!(r.min_e >= -1e-12 && r.min_margin >= -1e-12, "n = {n}: {r:?}");
    }
    assert!(BallSpec::new(1.0, vec![0.5, 0.0], 0.25).is_err());
}

#[test]
fn closed_form_and_difference_jets_agree() {
    let spec = ConeSpec::sector(2.0).unwrap();
    let ev = DeltaEvaluator::Cone { spec };
    let x = [0.8f64.cos(), 0.8f64.sin()];
    let a = ev.closed_form(&x).unwrap();
    let b = ev.finite_difference(&x, 1e-4).unwrap();
    assert!((a.value - b.value).abs() < 1e-14);
    for i in 0..2 {
        assert!((a.gradient[i] - b.gradient[i]).abs() < 1e-7);
    }
    assert!((a.laplacian - b.laplacian).abs() < 1e-5);
    // on the bisector the two rays are equidistant
    assert!(ev.finite_difference(&[1.0f64.cos(), 1.0f64.sin()], 1e-4).is_err());
}

#[test]
fn supersolution_identity_on_a_cap() {
    let ev = DeltaEvaluator::Cone { spec: ConeSpec::cap(3, 1.0).unwrap() };
    let pts: Vec<Vec<f64>> = (1..10).map(|i| vec![0.05 * i as f64, 0.1, 1.0]).collect();
    let r = supersolution_identity_check(&ev, 0.2, &pts, FD_STEP).unwrap();
    assert!(r.checked > 0 && r.max_residual <= 1e-4, "{r:?}");
}

#[test]
fn superharmonicity_separates_convex_and_reflex_sectors() {
    let quarter = ConeSpec::sector(FRAC_PI_2).unwrap();
    let bumps = random_ball_bumps(&quarter, 20, 1).unwrap();
    assert_eq!(bumps, random_ball_bumps(&quarter, 20, 1).unwrap());
    assert!(cone_weak_superharmonicity(&quarter, &bumps).unwrap().nonnegative);

    let reflex = ConeSpec::sector(1.5 * PI).unwrap();
    let t = 0.75 * PI;
    let bump = BallBump { center: vec![t.cos(), t.sin()], radius: 0.3 };
    let r = cone_weak_superharmonicity(&reflex, &[bump]).unwrap();
    assert!(!r.nonnegative && r.min < 0.0, "{r:?}");
}
