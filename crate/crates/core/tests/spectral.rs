use std::f64::consts::{FRAC_PI_2, PI};

use hardy_cones::geometry::ConeSpec;
use hardy_cones::spectral::{
    divergence_diagnostic, exhaustion_monotonicity, mu0_compute, richardson, sigma_of_mu, sigma_of_mu_with,
    Mu0Method, Scheme, SolverOptions,
};

fn half_plane_sigma(mu: f64) -> f64 {
    (1.0 + (1.0 - 4.0 * mu).sqrt()).powi(2) / 4.0
}

#[test]
fn dirichlet_sectors_at_zero_potential() {
    for alpha in [PI / 3.0, 2.0 * PI / 3.0, 1.5 * PI] {
        let r = sigma_of_mu(&ConeSpec::sector(alpha).unwrap(), 0.0, 3).unwrap();
        let exact = (PI / alpha).powi(2);
        assert!((r.sigma - exact).abs() < 1e-6 * exact, "alpha = {alpha}: {}", r.sigma);
    }
}

#[test]
fn hemispheres_in_three_and_four_dimensions() {
    let r3 = sigma_of_mu(&ConeSpec::cap(3, FRAC_PI_2).unwrap(), 0.0, 3).unwrap();
    let r4 = sigma_of_mu(&ConeSpec::cap(4, FRAC_PI_2).unwrap(), 0.0, 3).unwrap();
    assert!((r3.sigma - 2.0).abs() < 1e-6);
    assert!((r4.sigma - 3.0).abs() < 1e-6);
}

#[test]
fn half_plane_against_closed_form() {
    let spec = ConeSpec::sector(PI).unwrap();
    for mu in [-1.0, -0.2, 0.1, 0.2, 0.25] {
        let s = sigma_of_mu(&spec, mu, 3).unwrap().sigma;
        assert!((s - half_plane_sigma(mu)).abs() < 1e-4, "mu = {mu}: {s}");
    }
}

#[test]
fn hemisphere_against_closed_form() {
    let spec = ConeSpec::cap(3, FRAC_PI_2).unwrap();
    for mu in [-0.5, 0.15] {
        let s = sigma_of_mu(&spec, mu, 3).unwrap().sigma;
        let exact = (2.0 + (1.0 - 4.0 * mu).sqrt()).powi(2) / 4.0 - 0.25;
        assert!((s - exact).abs() < 1e-4, "mu = {mu}: {s} vs {exact}");
    }
}

#[test]
fn schemes_agree() {
    let spec = ConeSpec::sector(PI).unwrap();
    let exact = half_plane_sigma(0.1);
    for scheme in [Scheme::GroundState, Scheme::FiniteDifference, Scheme::Galerkin] {
        let opts = SolverOptions { scheme: Some(scheme), ..SolverOptions::default() };
        let s = sigma_of_mu_with(&spec, 0.1, &opts).unwrap().sigma;
        assert!((s - exact).abs() < 1e-3, "{scheme:?}: {s}");
    }
}

#[test]
fn octant_surface_elements() {
    let spec = ConeSpec::polygon(vec![[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]).unwrap();
    let r = sigma_of_mu(&spec, 0.0, 3).unwrap();
    assert_eq!(r.scheme, Scheme::SurfaceElements);
    assert!((r.sigma - 12.0).abs() < 1e-2, "{}", r.sigma);
    assert!(r.levels.windows(2).all(|w| w[1].sigma > w[0].sigma));
}

#[test]
fn result_diagnostics() {
    let r = sigma_of_mu(&ConeSpec::sector(1.0).unwrap(), 0.05, 3).unwrap();
    assert_eq!(r.levels.len(), 3);
    assert!(r.levels.windows(2).all(|w| w[1].unknowns > w[0].unknowns));
    assert!(r.backward_error < 1e-10);
    assert!(r.phi.values().iter().all(|v| *v >= 0.0));
}

#[test]
fn mu0_for_convex_and_reflex_sectors() {
    let convex = mu0_compute(&ConeSpec::sector(FRAC_PI_2).unwrap(), 3).unwrap();
    assert_eq!(convex.mu0, 0.25);
    let reflex = mu0_compute(&ConeSpec::sector(1.75 * PI).unwrap(), 3).unwrap();
    assert!(reflex.mu0 < 0.25);
    assert_eq!(reflex.method, Mu0Method::SigmaRootBisection);
    assert!(reflex.cross_check_gap.unwrap() < 1e-3, "{reflex:?}");
    let at = sigma_of_mu(&ConeSpec::sector(1.75 * PI).unwrap(), reflex.mu0, 3).unwrap().sigma;
    assert!(at.abs() < 1e-6, "{at}");
}

#[test]
fn supercritical_potential_diverges() {
    let r = divergence_diagnostic(&ConeSpec::cap(3, FRAC_PI_2).unwrap(), 0.3, 6).unwrap();
    assert!(r.strictly_decreasing);
    assert!(r.final_value < -1e3 && r.divergent);
    assert!(sigma_of_mu(&ConeSpec::sector(PI).unwrap(), 0.5, 2).is_err());
}

#[test]
fn shrinking_cross_sections_raise_sigma() {
    let spec = ConeSpec::sector(1.5 * PI).unwrap();
    let r = exhaustion_monotonicity(&spec, 0.1, &[0.5, 0.75, 1.0], &SolverOptions::default()).unwrap();
    assert!(r.strictly_decreasing && r.above_full);
    assert!((r.values[2] - r.full).abs() < 1e-3);
}

#[test]
fn richardson_removes_second_order_error() {
    let values: Vec<f64> = [1.0, 0.5, 0.25, 0.125].iter().map(|h| 3.0 + 0.7 * h * h).collect();
    let r = richardson(&values);
    assert!(r.extrapolated && r.monotone);
    assert!((r.value - 3.0).abs() < 1e-12);
    assert!((r.observed_order.unwrap() - 2.0).abs() < 1e-9);
    let noisy = richardson(&[1.0, 1.1, 1.05]);
    assert!(!noisy.extrapolated && !noisy.monotone);
}
