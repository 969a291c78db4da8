use std::f64::consts::{FRAC_PI_2, PI};
use std::sync::Arc;

use hardy_cones::geometry::ConeSpec;
use hardy_cones::hardy::derive_constants;
use hardy_cones::spectral::sigma_of_mu;
use hardy_cones::verification::{
    hardy_margin, one_dimensional_hardy_margin, random_angular_bump, random_radial_bump,
    separable_decomposition_check, sharpness_probe, spherical_null_sequence_energy, upper_bound_witness,
    AngularProfile, NullSequenceSpec, QuadratureGrid, RadialProfile, TestFunction, Verdict,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn random_bumps_respect_the_optimal_constant() {
    let spec = ConeSpec::sector(FRAC_PI_2).unwrap();
    let mu = 0.1;
    let sigma = sigma_of_mu(&spec, mu, 3).unwrap().sigma;
    let lambda = derive_constants(2, sigma, mu, 0.25).unwrap().lambda;
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..10 {
        let test = TestFunction::new(random_radial_bump(&mut rng), random_angular_bump(&spec, &mut rng).unwrap());
        let r = hardy_margin(&spec, mu, lambda, &test, &QuadratureGrid::default()).unwrap();
        assert!(r.passed(), "{r:?}");
    }
}

#[test]
fn a_larger_constant_is_violated() {
    let spec = ConeSpec::cap(3, FRAC_PI_2).unwrap();
    let phi = sigma_of_mu(&spec, 0.0, 3).unwrap();
    let c = derive_constants(3, phi.sigma, 0.0, 0.25).unwrap();
    let r = sharpness_probe(&spec, &c, &phi, 1.05, &QuadratureGrid::default()).unwrap();
    assert_eq!(r.verdict, Verdict::Pass, "{r:?}");
    assert!(r.margins[0] < 0.0);
    assert!(sharpness_probe(&spec, &c, &phi, 0.9, &QuadratureGrid::default()).is_err());
}

#[test]
fn radial_hardy_inequality() {
    for n in [2, 3, 5] {
        let f = RadialProfile::Bump { center: 1.0, half_width: 0.6 };
        let r = one_dimensional_hardy_margin(n, &f, 64).unwrap();
        assert!(r.passed() && r.margins[0] > 0.0);
    }
    assert!(RadialProfile::Bump { center: 1.0, half_width: 2.0 }.validate().is_err());
}

#[test]
fn separated_and_cartesian_forms_agree() {
    let spec = ConeSpec::sector(2.0).unwrap();
    let f = RadialProfile::Bump { center: 1.0, half_width: 0.5 };
    let g = AngularProfile::CoordinateBump { center: 1.0, half_width: 0.6 };
    let r = separable_decomposition_check(&spec, 0.15, &f, &g, &QuadratureGrid::default()).unwrap();
    assert!(r.passed(), "{r:?}");
}

#[test]
fn collar_energies_shrink() {
    let spec = ConeSpec::sector(PI).unwrap();
    let phi = sigma_of_mu(&spec, 0.0, 2).unwrap();
    let r = spherical_null_sequence_energy(&spec, 0.0, &phi.phi, &[10, 100, 1000]).unwrap();
    assert!(r.decreasing && r.cutoff_bounded, "{r:?}");
    let v = NullSequenceSpec::new(10).unwrap();
    assert_eq!(v.value(0.5), 1.0);
    assert_eq!(v.value(1e-3), 0.0);
    assert!((v.value(0.01 * 10f64.sqrt()) - 0.5).abs() < 1e-12);
}

#[test]
fn witness_approaches_the_half_space_constant() {
    let eps = [1e-2, 1e-4, 1e-8, 1e-16, 1e-32];
    let mu: f64 = 0.1;
    let bound = (1.0 + (1.0 - 4.0 * mu).sqrt()).powi(2) / 4.0;
    let r = upper_bound_witness(&ConeSpec::sector(PI).unwrap(), mu, &eps).unwrap();
    assert!((r.bound - bound).abs() < 1e-15);
    assert!(r.within_bound, "{r:?}");
    assert!(r.quotients.windows(2).all(|w| w[1] < w[0]));

    // a corner cone has λ(μ) above the half-space value
    let quarter = ConeSpec::sector(FRAC_PI_2).unwrap();
    let r = upper_bound_witness(&quarter, mu, &eps).unwrap();
    let lambda = sigma_of_mu(&quarter, mu, 3).unwrap().sigma;
    assert!(!r.within_bound);
    assert!(r.quotients.iter().all(|q| *q >= lambda));

    let reflex = ConeSpec::sector(1.5 * PI).unwrap();
    assert!(upper_bound_witness(&reflex, mu, &[1e-2]).is_err());
}

#[test]
fn principal_angular_profile_needs_the_same_cone() {
    let a = ConeSpec::sector(1.0).unwrap();
    let b = ConeSpec::sector(2.0).unwrap();
    let phi = sigma_of_mu(&a, 0.0, 1).unwrap();
    let g = AngularProfile::Principal { phi: Arc::new(phi.phi) };
    assert!(g.validate(&a).is_ok());
    assert!(g.validate(&b).is_err());
}
