use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::closed_forms::{
    ball_inequality_scan, cone_weak_superharmonicity, diff_ineq_field, ftt_derive,
    ftt_integrability_check, ftt_residual_check, random_ball_bumps, supersolution_identity_check,
    BallScanReport, BallSpec, DeltaEvaluator, FieldMethod, FttClass, FttResidual, FttSpec,
    IdentityReport, IntegrabilityReport, SuperharmonicityReport, FD_STEP,
};
use crate::error::Result;
use crate::geometry::ConeSpec;

/// Residual target of the finite-difference check.
pub const FTT_RESIDUAL_TOLERANCE: f64 = 1e-5;
pub const IDENTITY_TOLERANCE: f64 = 1e-4;
pub const FIELD_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FttSummary {
    pub spec: FttSpec,
    pub class: FttClass,
    pub description: String,
    pub residual: FttResidual,
    /// Present for `n ∈ {2, 3}` with `α_n = 0`.
    pub integrability: Option<IntegrabilityReport>,
    pub passed: bool,
}

/// Seeded points with `x₁ ∈ (0.05, 2)` and the other coordinates in `(-2, 2)`,
/// redrawn while `x₁` (the smallest partial norm `|X_i|`) is below `10³·FD_STEP·|x|`, the
/// collar rejected by the residual check.
pub fn ftt_samples(n: usize, count: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let x: Vec<f64> =
            (0..n).map(|i| if i == 0 { rng.random_range(0.05..2.0) } else { rng.random_range(-2.0..2.0) }).collect();
        let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        // |X_i| >= x₁ for every i
        if x[0] >= 1e3 * FD_STEP * norm {
            out.push(x);
        }
    }
    out
}

pub fn ftt_summary(n: usize, alphas: &[f64], samples: usize, levels: u32, seed: u64) -> Result<FttSummary> {
    let spec = ftt_derive(n, alphas)?;
    let class = spec.classify();
    let residual = ftt_residual_check(&spec, &ftt_samples(n, samples, seed), FD_STEP)?;
    let integrability = if (2..=3).contains(&n) && alphas[n - 1] == 0.0 {
        Some(ftt_integrability_check(&spec, levels)?)
    } else {
        None
    };
    let passed = residual.checked > 0 && residual.fd_residual <= FTT_RESIDUAL_TOLERANCE;
    Ok(FttSummary { description: class.description().to_string(), spec, class, residual, integrability, passed })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConeDomainSummary {
    pub label: String,
    pub mu: f64,
    pub superharmonicity: SuperharmonicityReport,
    pub identity: IdentityReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DomainSummary {
    pub ball: BallSpec,
    pub ball_scan: BallScanReport,
    pub ball_identity: IdentityReport,
    /// `max |E|` for the half-space at the ball's samples shifted into `{x₁ > 0}`.
    pub half_space_max_e: f64,
    pub cone: Option<ConeDomainSummary>,
    /// Ball and half-space contracts; the ball sign is only asserted at `μ = 1/4`.
    pub passed: bool,
}

fn interior_ball_points(ball: &BallSpec, count: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let r = ball.radius;
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let y: Vec<f64> = (0..ball.dim()).map(|_| rng.random_range(-r..r)).collect();
        let rho = y.iter().map(|v| v * v).sum::<f64>().sqrt();
        if rho > 0.95 * r || rho < 0.05 * r {
            continue;
        }
        let x: Vec<f64> = y.iter().zip(&ball.center).map(|(a, b)| a + b).collect();
        if x.iter().map(|v| v * v).sum::<f64>().sqrt() < 0.05 * r {
            continue;
        }
        out.push(x);
    }
    out
}

/// Ball scan and identity, the half-space equality case, and optionally the
/// superharmonicity and identity checks on a cone.
pub fn domain_summary(ball: &BallSpec, samples: usize, seed: u64, cone: Option<(&ConeSpec, f64, usize)>) -> Result<DomainSummary> {
    let ball_scan = ball_inequality_scan(ball, samples, seed)?;
    let points = interior_ball_points(ball, 200, seed);
    let ball_identity = supersolution_identity_check(&ball.evaluator(), ball.mu, &points, FD_STEP)?;

    let n = ball.dim();
    let half = DeltaEvaluator::HalfSpace { n };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut half_space_max_e: f64 = 0.0;
    for _ in 0..samples {
        let x: Vec<f64> = (0..n).map(|i| if i == 0 { rng.random_range(1e-3..2.0) } else { rng.random_range(-2.0..2.0) }).collect();
        half_space_max_e = half_space_max_e.max(diff_ineq_field(&half, ball.mu, &x, FieldMethod::ClosedForm)?.e_value.abs());
    }

    let cone = match cone {
        Some((spec, mu, bumps)) => {
            let family = random_ball_bumps(spec, bumps, seed)?;
            let superharmonicity = cone_weak_superharmonicity(spec, &family)?;
            let pts: Vec<Vec<f64>> = family.iter().map(|b| b.center.clone()).collect();
            let identity = supersolution_identity_check(&DeltaEvaluator::Cone { spec: spec.clone() }, mu, &pts, FD_STEP)?;
            Some(ConeDomainSummary { label: spec.label(), mu, superharmonicity, identity })
        }
        None => None,
    };

    let ball_ok = ball.mu != 0.25 || (ball_scan.min_e >= -FIELD_TOLERANCE && ball_scan.min_margin >= -FIELD_TOLERANCE);
    let passed = ball_ok
        && ball_identity.max_residual <= IDENTITY_TOLERANCE
        && half_space_max_e <= FIELD_TOLERANCE
        && cone.as_ref().is_none_or(|c| c.identity.max_residual <= IDENTITY_TOLERANCE);
    Ok(DomainSummary { ball: ball.clone(), ball_scan, ball_identity, half_space_max_e, cone, passed })
}
