use hardy_cones::closed_forms::ftt_derive;
use hardy_cones::geometry::ConeSpec;
use hardy_cones::hardy::derive_constants;
use hardy_cones::report::format_sig12;
use proptest::prelude::*;

fn point(n: usize) -> impl Strategy<Value = Vec<f64>> {
    (0.1f64..2.0, prop::collection::vec(-2.0f64..2.0, n - 1)).prop_map(|(x1, rest)| {
        let mut x = vec![x1];
        x.extend(rest);
        x
    })
}

proptest! {
    #[test]
    fn constants_identities(n in 2usize..8, excess in 0.0f64..20.0, mu in -2.0f64..0.25) {
        let sigma = -((n as f64 - 2.0).powi(2)) / 4.0 + excess;
        let c = derive_constants(n, sigma, mu, 0.25).unwrap();
        prop_assert!(c.identity_residual() <= 1e-12 * (1.0 + excess));
        prop_assert!(c.gamma_plus >= c.gamma_minus);
        prop_assert!((c.lambda - excess).abs() <= 1e-12 * (1.0 + excess));
    }

    #[test]
    fn ftt_coefficient_identities(alphas in prop::collection::vec(-2.0f64..0.0, 2..6)) {
        let s = ftt_derive(alphas.len(), &alphas).unwrap();
        prop_assert!((s.betas[0] - (0.25 - alphas[0] * alphas[0])).abs() < 1e-14);
        prop_assert!((s.gammas[0] - (alphas[0] - 0.5)).abs() < 1e-14);
        for i in 1..alphas.len() {
            let b = (alphas[i - 1] - 0.5).powi(2) - alphas[i] * alphas[i];
            prop_assert!((s.betas[i] - b).abs() < 1e-13);
            prop_assert!((s.gammas[i] - (alphas[i] - alphas[i - 1] + 0.5)).abs() < 1e-14);
        }
    }

    #[test]
    fn ftt_homogeneity(alphas in prop::collection::vec(-1.0f64..0.0, 3), x in point(3), c in 0.1f64..10.0) {
        let s = ftt_derive(3, &alphas).unwrap();
        let y: Vec<f64> = x.iter().map(|v| c * v).collect();
        let (p, q) = (s.psi(&x).unwrap(), s.psi(&y).unwrap());
        prop_assert!((q / p / c.powf(s.degree()) - 1.0).abs() < 1e-10);
        let (v, w) = (s.potential(&x, 3).unwrap(), s.potential(&y, 3).unwrap());
        prop_assert!((w * c * c - v).abs() <= 1e-10 * v.abs().max(1e-300));
    }

    #[test]
    fn sector_distance_homogeneity(alpha in 0.2f64..6.2, t in 0.0f64..1.0, r in 0.01f64..100.0, c in 0.01f64..100.0) {
        let spec = ConeSpec::sector(alpha).unwrap();
        let theta = alpha * t;
        let x = [r * theta.cos(), r * theta.sin()];
        let y = [c * x[0], c * x[1]];
        let (d, e) = (spec.delta(&x).unwrap(), spec.delta(&y).unwrap());
        prop_assert!(d >= 0.0 && d <= r * (1.0 + 1e-15));
        prop_assert!((e - c * d).abs() <= 1e-12 * c * r);
    }

    #[test]
    fn twelve_digit_output_round_trips(v in prop::num::f64::NORMAL) {
        let back: f64 = format_sig12(v).parse().unwrap();
        prop_assert!((back - v).abs() <= 1e-11 * v.abs());
    }
}
