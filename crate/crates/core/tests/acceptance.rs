//! Acceptance criteria, one PASS/FAIL line each. Exits nonzero on any failure.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::Instant;

use hardy_cones::closed_forms::{ftt_derive, ftt_residual_check, BallSpec, FttClass, FD_STEP};
use hardy_cones::geometry::{ConeSpec, RegionKind};
use hardy_cones::hardy::derive_constants;
use hardy_cones::report::{
    body_json, domain_summary, ftt_samples, parse_config, run_pipeline, CheckKind, FIELD_TOLERANCE,
    FTT_RESIDUAL_TOLERANCE, IDENTITY_TOLERANCE,
};
use hardy_cones::spectral::{divergence_diagnostic, mu0_compute, sigma_of_mu, sigma_on_fixed_grid};
use hardy_cones::verification::{
    annulus_scale_invariance, best_constant_localized, radial_null_sequence_energy, LocalizedOptions,
};
use hardy_cones::Result;

type Outcome = Result<(bool, String)>;
type Criterion = (&'static str, fn() -> Outcome);

fn rel(value: f64, target: f64) -> f64 {
    (value - target).abs() / target.abs()
}

fn sector(alpha: f64) -> ConeSpec {
    ConeSpec::sector(alpha).expect("valid sector")
}

fn hemisphere() -> ConeSpec {
    ConeSpec::cap(3, PI / 2.0).expect("valid cap")
}

fn c1() -> Outcome {
    let t = Instant::now();
    let r = sigma_of_mu(&sector(PI / 2.0), 0.0, 3)?;
    let lambda = derive_constants(2, r.sigma, 0.0, 0.25)?.lambda;
    let secs = t.elapsed().as_secs_f64();
    let unknowns: Vec<usize> = r.levels.iter().map(|l| l.unknowns).collect();
    let ok = (r.sigma - 4.0).abs() <= 1e-5 && (lambda - 4.0).abs() <= 1e-5 && secs < 5.0;
    Ok((ok, format!("sigma = {:.10}, lambda = {lambda:.10}, unknowns {unknowns:?}, {secs:.2} s", r.sigma)))
}

fn c2() -> Outcome {
    let t = Instant::now();
    let r = sigma_of_mu(&sector(PI), 0.25, 3)?;
    let lambda = derive_constants(2, r.sigma, 0.25, 0.25)?.lambda;
    let secs = t.elapsed().as_secs_f64();
    Ok((rel(lambda, 0.25) <= 0.01 && secs < 30.0, format!("lambda(1/4) = {lambda:.8}, {secs:.2} s")))
}

fn c3() -> Outcome {
    let r = sigma_of_mu(&hemisphere(), 0.0, 3)?;
    let lambda = derive_constants(3, r.sigma, 0.0, 0.25)?.lambda;
    let ok = (r.sigma - 2.0).abs() <= 1e-3 && (lambda - 2.25).abs() <= 1e-3;
    Ok((ok, format!("sigma = {:.8}, lambda = {lambda:.8}", r.sigma)))
}

fn c4() -> Outcome {
    let r = sigma_of_mu(&hemisphere(), 0.25, 3)?;
    let lambda = derive_constants(3, r.sigma, 0.25, 0.25)?.lambda;
    let ok = rel(lambda, 1.0) <= 0.01 && rel(r.sigma, 0.75) <= 0.01;
    Ok((ok, format!("sigma(1/4) = {:.8}, lambda(1/4) = {lambda:.8}", r.sigma)))
}

fn c5() -> Outcome {
    let half = mu0_compute(&sector(PI), 3)?.mu0;
    let hemi = mu0_compute(&hemisphere(), 3)?.mu0;
    let ok = rel(half, 0.25) <= 0.01 && rel(hemi, 0.25) <= 0.01;
    Ok((ok, format!("mu0 half-plane = {half:.8}, hemisphere = {hemi:.8}")))
}

fn c6() -> Outcome {
    let spec = sector(1.5 * PI);
    let m = mu0_compute(&spec, 3)?;
    let root = m.root.unwrap_or(f64::NAN);
    let gap = (m.generalized - root).abs();
    let sigma = sigma_of_mu(&spec, m.mu0, 3)?.sigma;
    let lambda = derive_constants(2, sigma, m.mu0, m.mu0)?.lambda;
    let ok = m.mu0 < 0.25 && gap <= 1e-3 && lambda.abs() <= 1e-2;
    Ok((
        ok,
        format!(
            "mu0 = {:.8} (generalized {:.8}, root {root:.8}, gap {gap:.1e}), lambda(mu0) = {lambda:.6}",
            m.mu0, m.generalized
        ),
    ))
}

fn c7() -> Outcome {
    let cones = [sector(PI / 2.0), hemisphere(), sector(1.75 * PI)];
    let mut worst_increase = f64::NEG_INFINITY;
    let mut worst_second = f64::NEG_INFINITY;
    let mut parts = Vec::new();
    for spec in &cones {
        let mu0 = mu0_compute(spec, 3)?.mu0;
        let mus: Vec<f64> = (0..20).map(|i| -1.0 + (mu0 + 1.0) * i as f64 / 19.0).collect();
        let s = sigma_on_fixed_grid(spec, &mus, 2048, 1.0, 0.1)?;
        let inc = s.windows(2).map(|w| w[1] - w[0]).fold(f64::NEG_INFINITY, f64::max);
        let sec = s.windows(3).map(|w| w[0] - 2.0 * w[1] + w[2]).fold(f64::NEG_INFINITY, f64::max);
        worst_increase = worst_increase.max(inc);
        worst_second = worst_second.max(sec);
        parts.push(format!("{} mu0 = {mu0:.6}", spec.label()));
    }
    let ok = worst_increase <= 0.0 && worst_second <= 1e-10;
    Ok((
        ok,
        format!("max step {worst_increase:.3e}, max second difference {worst_second:.3e}; {}", parts.join(", ")),
    ))
}

fn c8() -> Outcome {
    let r = divergence_diagnostic(&sector(PI), 0.3, 7)?;
    let sizes: Vec<usize> = r.levels.iter().map(|l| l.unknowns).collect();
    Ok((
        r.strictly_decreasing && r.final_value < -1e3,
        format!("final sigma_h = {:.4e}, strictly decreasing: {}, unknowns {sizes:?}", r.final_value, r.strictly_decreasing),
    ))
}

fn c9() -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for alphas in [vec![0.0, 0.0], vec![-0.5, 0.0], vec![-0.3, -0.2, 0.0]] {
        let spec = ftt_derive(alphas.len(), &alphas)?;
        let r = ftt_residual_check(&spec, &ftt_samples(alphas.len(), 100, 42), FD_STEP)?;
        ok &= r.checked == 100 && r.fd_residual <= FTT_RESIDUAL_TOLERANCE;
        parts.push(format!("{alphas:?}: {:.2e} over {}", r.fd_residual, r.checked));
    }
    let cases: [(&[f64], FttClass); 6] = [
        (&[-0.3, -0.2, 0.0], FttClass::Critical),
        (&[0.0, 0.0, -0.1], FttClass::Subcritical),
        (&[-0.2, -0.2, 0.0], FttClass::Critical),
        (&[0.0, 0.0, 0.0], FttClass::CriticalConjectured),
        (&[0.0, -0.2, -0.2, 0.0], FttClass::CriticalConjectured),
        (&[-0.5, 0.0], FttClass::Critical),
    ];
    let mut classified = 0;
    for (alphas, expected) in cases {
        if ftt_derive(alphas.len(), alphas)?.classify() == expected {
            classified += 1;
        }
    }
    ok &= classified == cases.len();
    let bridge: f64 = ftt_derive(2, &[-0.5, 0.0])?.betas.iter().sum();
    ok &= (bridge - 1.0).abs() <= 1e-15;
    Ok((ok, format!("{}; classifier {classified}/{}; beta total {bridge}", parts.join(", "), cases.len())))
}

fn c10() -> Outcome {
    let ball = BallSpec::new(1.0, vec![1.0, 0.0, 0.0], 0.25)?;
    let s = domain_summary(&ball, 10_000, 42, None)?;
    let ok = s.half_space_max_e <= FIELD_TOLERANCE
        && s.ball_scan.samples == 10_000
        && s.ball_scan.min_e >= -FIELD_TOLERANCE
        && s.ball_scan.min_margin >= -FIELD_TOLERANCE
        && s.ball_identity.max_residual <= IDENTITY_TOLERANCE;
    Ok((
        ok,
        format!(
            "half-space max |E| = {:.1e}, ball min E = {:.3e}, min margin = {:.3e}, identity residual = {:.1e}",
            s.half_space_max_e, s.ball_scan.min_e, s.ball_scan.min_margin, s.ball_identity.max_residual
        ),
    ))
}

fn c11() -> Outcome {
    let mut ok = true;
    let mut worst: f64 = 0.0;
    for n in [2, 3] {
        for k in [10u64, 100, 1000] {
            let q = radial_null_sequence_energy(n, k)?;
            let d = rel(q, 2.0 / (k as f64).ln());
            worst = worst.max(d);
            ok &= d <= 0.01;
        }
    }
    let mut spreads = Vec::new();
    for spec in [hemisphere(), sector(PI / 2.0)] {
        let phi = sigma_of_mu(&spec, 0.0, 3)?;
        let c = derive_constants(spec.dim(), phi.sigma, 0.0, 0.25)?;
        let a = annulus_scale_invariance(&spec, &c, &phi, &[0.25, 1.0, 4.0, 16.0])?;
        ok &= a.spread < 0.01;
        spreads.push(format!("{} spread {:.1e}", spec.label(), a.spread));
    }
    Ok((ok, format!("q_R max relative deviation {worst:.2e}; {}", spreads.join(", "))))
}

fn c12() -> Outcome {
    let spec = sector(PI);
    let opts = LocalizedOptions::default();
    let mut ok = true;
    let mut parts = Vec::new();
    for mu in [0.0, 0.2] {
        let sigma = sigma_of_mu(&spec, mu, 3)?.sigma;
        let lambda = derive_constants(2, sigma, mu, 0.25)?.lambda;
        for kind in [RegionKind::Inner, RegionKind::Outer] {
            let e = best_constant_localized(&spec, mu, kind, 1.0, &opts)?;
            let d = rel(e.estimate, lambda);
            ok &= d <= 0.05;
            parts.push(format!("mu = {mu} {kind:?} {:.6} vs {lambda:.6}", e.estimate));
        }
    }
    Ok((ok, parts.join(", ")))
}

fn c13() -> Outcome {
    let text = "mu = [0, 0.1, 0.25]\n[cone]\nkind = \"cap\"\nn = 3\nalpha_over_pi = 0.5\n[verify]\nseed = 7\n";
    let mut config = parse_config(text)?;
    config.verify.checks = CheckKind::ALL.to_vec();
    let a = body_json(&run_pipeline(&config))?;
    let b = body_json(&run_pipeline(&config))?;
    Ok((a == b, format!("{} bytes, identical: {}", a.len(), a == b)))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 13] = [
        ("quarter-plane sigma and lambda at mu = 0", c1),
        ("half-plane lambda at mu = 1/4", c2),
        ("hemisphere sigma and lambda at mu = 0", c3),
        ("hemisphere sigma and lambda at mu = 1/4", c4),
        ("mu0 = 1/4 for half-plane and hemisphere", c5),
        ("non-convex sector 3pi/2: mu0 < 1/4, methods agree, lambda(mu0) = 0", c6),
        ("sigma(mu) nonincreasing and concave on a 20-point grid", c7),
        ("divergence of sigma_h at mu = 0.3", c8),
        ("product weights: residuals, classifier, beta total", c9),
        ("inequality field on half-space and ball, identity residual", c10),
        ("null-sequence energies and annulus scale invariance", c11),
        ("localized best constants on the half-plane", c12),
        ("byte-identical report bodies", c13),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let (ok, detail) = match run() {
            Ok(r) => r,
            Err(e) => (false, format!("error: {e}")),
        };
        let secs = t.elapsed().as_secs_f64();
        println!("{} criterion {:>2}: {name} [{detail}] ({secs:.2} s)", if ok { "PASS" } else { "FAIL" }, i + 1);
        failed += usize::from(!ok);
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 { ExitCode::SUCCESS } else { ExitCode::FAILURE }
}
