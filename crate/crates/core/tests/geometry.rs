use std::f64::consts::{FRAC_PI_2, PI};

use hardy_cones::geometry::{euler_identity_check, ray_distance, ConeSpec, PointOnSphere};
use hardy_cones::Error;

#[test]
fn sector_distance_is_distance_to_nearest_ray() {
    let spec = ConeSpec::sector(FRAC_PI_2).unwrap();
    for (theta, r) in [(0.1, 1.0), (0.7, 2.5), (1.4, 0.3)] {
        let x = [r * f64::cos(theta), r * f64::sin(theta)];
        let expected = r * f64::min(theta, FRAC_PI_2 - theta).sin();
        assert!((spec.delta(&x).unwrap() - expected).abs() < 1e-14);
    }
}

#[test]
fn reflex_sector_uses_the_vertex_beyond_a_right_angle() {
    let spec = ConeSpec::sector(1.5 * PI).unwrap();
    assert!((spec.delta(&[-1.0, 1.0]).unwrap() - 2f64.sqrt()).abs() < 1e-14);
    assert!((spec.delta(&[-1.0, -1.0]).unwrap() - 1.0).abs() < 1e-14);
    assert_eq!(ray_distance(2.0), 1.0);
    assert!((ray_distance(0.3) - 0.3f64.sin()).abs() < 1e-16);
}

#[test]
fn hemisphere_distance_is_last_coordinate() {
    let spec = ConeSpec::cap(3, FRAC_PI_2).unwrap();
    for x in [[0.3, -0.2, 0.9], [1.0, 1.0, 0.01], [0.0, 0.0, 4.0]] {
        assert!((spec.delta(&x).unwrap() - x[2]).abs() < 1e-13);
    }
}

#[test]
fn octant_distance_is_smallest_coordinate() {
    let spec = ConeSpec::polygon(vec![[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]).unwrap();
    for x in [[0.3, 0.2, 0.9], [1.0, 2.0, 0.5], [3.0, 3.0, 3.0]] {
        let m = x.iter().copied().fold(f64::INFINITY, f64::min);
        assert!((spec.delta(&x).unwrap() - m).abs() < 1e-12);
    }
}

#[test]
fn homogeneous_of_degree_one() {
    let spec = ConeSpec::cap(4, 1.2).unwrap();
    let x = [0.2, -0.1, 0.3, 0.8];
    let d = spec.delta(&x).unwrap();
    for c in [1e-3, 0.5, 7.0, 1e4] {
        let y: Vec<f64> = x.iter().map(|v| c * v).collect();
        assert!((spec.delta(&y).unwrap() - c * d).abs() <= 1e-13 * c);
    }
}

#[test]
fn euler_identity_holds_away_from_ridges() {
    let spec = ConeSpec::sector(2.0).unwrap();
    let samples: Vec<Vec<f64>> = (1..40)
        .map(|i| {
            let t = 2.0 * i as f64 / 40.0;
            vec![1.5 * t.cos(), 1.5 * t.sin()]
        })
        .collect();
    let e = euler_identity_check(&spec, &samples, 1e-6).unwrap();
    assert!(e.max_residual < 1e-8, "{e:?}");
    assert!(e.checked + e.ridge_flagged == samples.len());
    assert!(e.ridge_flagged >= 1);
}

#[test]
fn invalid_cones_are_rejected() {
    assert!(ConeSpec::sector(0.0).is_err());
    assert!(matches!(ConeSpec::sector(2.0 * PI), Err(Error::InvalidCone(_))));
    assert!(ConeSpec::cap(3, 3.5).is_err());
    assert!(ConeSpec::cap(1, 1.0).is_err());
    assert!(ConeSpec::polygon(vec![[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]]).is_err());
    assert!(PointOnSphere::new(vec![1.0, 1.0]).is_err());
}

#[test]
fn labels_and_areas() {
    assert!((ConeSpec::sector(1.25).unwrap().cross_section_area() - 1.25).abs() < 1e-14);
    let hemi = ConeSpec::cap(3, FRAC_PI_2).unwrap();
    assert!((hemi.cross_section_area() - 2.0 * PI).abs() < 1e-10);
    assert!(hemi.label().starts_with("cap"));
}
