use std::f64::consts::{FRAC_PI_2, PI};

use hardy_cones::geometry::ConeSpec;
use hardy_cones::hardy::{
    derive_constants, ground_state_eval, halfspace_closed_form, supersolution_weight_identity,
    MultiplicativeSolution,
};
use hardy_cones::spectral::sigma_of_mu;
use hardy_cones::Error;

#[test]
fn exponents_and_constant() {
    let c = derive_constants(3, 2.0, 0.0, 0.25).unwrap();
    assert_eq!((c.gamma_plus, c.gamma_minus, c.lambda), (1.0, -2.0, 2.25));
    assert!(c.identity_residual() < 1e-15);
    let c = derive_constants(2, 4.0, 0.0, 0.25).unwrap();
    assert_eq!((c.gamma_plus, c.gamma_minus, c.lambda), (2.0, -2.0, 4.0));
}

#[test]
fn sigma_below_the_bound() {
    let c = derive_constants(4, -1.0 - 5e-7, 0.2, 0.2).unwrap();
    assert!(c.sigma_clamped && c.lambda == 0.0);
    assert_eq!(c.gamma_plus, c.gamma_minus);
    assert!(!c.flags.is_empty());
    assert!(matches!(derive_constants(4, -1.1, 0.2, 0.25), Err(Error::InconsistentSpectrum(_))));
    assert!(derive_constants(1, 0.0, 0.0, 0.25).is_err());
}

#[test]
fn half_space_formulas() {
    let h = halfspace_closed_form(3, 0.25).unwrap();
    assert_eq!((h.alpha_plus, h.eta, h.lambda), (0.5, 2.0, 1.0));
    let h = halfspace_closed_form(2, 0.0).unwrap();
    assert_eq!(h.lambda, 1.0);
    assert_eq!(h.v0(&[4.0, -3.0]), 4.0);
    assert!(halfspace_closed_form(2, 0.3).is_err());
}

#[test]
fn ratio_of_solutions_gives_the_weight() {
    let spec = ConeSpec::sector(FRAC_PI_2).unwrap();
    let phi = sigma_of_mu(&spec, 0.1, 2).unwrap();
    let c = derive_constants(2, phi.sigma, 0.1, 0.25).unwrap();
    let (up, um) = MultiplicativeSolution::pair(&c, &phi);
    let samples: Vec<Vec<f64>> = (1..20)
        .map(|i| {
            let t = FRAC_PI_2 * i as f64 / 20.0;
            let r = 0.1 * i as f64;
            vec![r * t.cos(), r * t.sin()]
        })
        .collect();
    let res = supersolution_weight_identity(&up, &um, c.lambda, &samples).unwrap();
    assert!(res < 1e-10, "{res}");
}

#[test]
fn ground_state_scales_with_the_critical_exponent() {
    let spec = ConeSpec::cap(3, 0.4 * PI).unwrap();
    let phi = sigma_of_mu(&spec, 0.0, 2).unwrap();
    let c = derive_constants(3, phi.sigma, 0.0, 0.25).unwrap();
    let x = [0.1, 0.2, 0.9];
    let v = ground_state_eval(&c, &phi, &x).unwrap();
    assert!(v > 0.0);
    let y: Vec<f64> = x.iter().map(|t| 4.0 * t).collect();
    let w = ground_state_eval(&c, &phi, &y).unwrap();
    assert!((w - 0.5 * v).abs() < 1e-13);
    assert!(ground_state_eval(&c, &phi, &[1.0, 0.0]).is_err());
}
