use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{CrossSection, RegionKind};
use crate::hardy::{derive_constants, HardyConstants};
use crate::spectral::{mu0_compute_with, sigma_of_mu_with, Mu0Result, SpectralResult};
use crate::verification::{
    annulus_scale_invariance, best_constant_localized, hardy_margin, radial_null_sequence_energy,
    random_angular_bump, random_radial_bump, separable_decomposition_check, sharpness_probe,
    spherical_null_sequence_energy, upper_bound_witness, AngularProfile, LocalizedOptions,
    QuadratureGrid, RadialProfile, TestFunction, Verdict, VerificationReport,
};

use super::config::{CheckKind, MuEntry, RunConfig};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConeSummary {
    pub label: String,
    pub n: usize,
    pub cross_section: CrossSection,
}

/// One row of a convergence table: the raw value at a level next to the
/// extrapolated value of the whole sequence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    /// `sigma` or `mu0`.
    pub quantity: String,
    pub mu: Option<f64>,
    pub level: usize,
    pub mesh_size: f64,
    pub unknowns: usize,
    pub value: f64,
    /// `(v_{l-1} - v_{l-2}) / (v_l - v_{l-1})` from the third level on.
    pub ratio: Option<f64>,
    pub extrapolated: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationRecord {
    pub mu: Option<f64>,
    pub report: VerificationReport,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ErrorKind {
    NoConvergence,
    InconsistentSpectrum,
    InvalidInput,
}

/// A stage that failed; the pipeline continues with independent items.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ItemError {
    pub mu: Option<f64>,
    pub stage: String,
    pub kind: ErrorKind,
    pub message: String,
}

impl ItemError {
    fn new(mu: Option<f64>, stage: &str, e: &Error) -> Self {
        let kind = match e {
            Error::NoConvergence(_) | Error::SignChange(_) => ErrorKind::NoConvergence,
            Error::InconsistentSpectrum(_) => ErrorKind::InconsistentSpectrum,
            _ => ErrorKind::InvalidInput,
        };
        Self { mu, stage: stage.to_string(), kind, message: e.to_string() }
    }
}

/// Everything that depends only on the configuration and the seed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportBody {
    pub version: String,
    pub seed: u64,
    pub cone: ConeSummary,
    pub config: serde_json::Value,
    pub mu0: Option<Mu0Result>,
    pub constants: Vec<HardyConstants>,
    pub convergence: Vec<ConvergenceRow>,
    pub verification: Vec<VerificationRecord>,
    pub errors: Vec<ItemError>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageTiming {
    pub stage: String,
    pub seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub body: ReportBody,
    /// Wall-clock seconds per stage; excluded from the determinism contract.
    pub timing: Vec<StageTiming>,
}

impl RunReport {
    /// `0` when everything passed, `1` on a failed or unrunnable check,
    /// `3` on a solver failure.
    pub fn exit_code(&self) -> i32 {
        if self.body.errors.iter().any(|e| e.kind == ErrorKind::NoConvergence) {
            3
        } else if !self.body.errors.is_empty()
            || self.body.verification.iter().any(|v| v.report.verdict == Verdict::Fail)
        {
            1
        } else {
            0
        }
    }
}

struct ItemOutcome {
    constants: Option<HardyConstants>,
    convergence: Vec<ConvergenceRow>,
    verification: Vec<VerificationRecord>,
    errors: Vec<ItemError>,
    timing: Vec<StageTiming>,
}

fn convergence_rows(quantity: &str, mu: Option<f64>, levels: &[crate::spectral::LevelValue], extrapolated: f64) -> Vec<ConvergenceRow> {
    levels
        .iter()
        .enumerate()
        .map(|(l, lv)| ConvergenceRow {
            quantity: quantity.to_string(),
            mu,
            level: l,
            mesh_size: lv.mesh_size,
            unknowns: lv.unknowns,
            value: lv.sigma,
            ratio: (l >= 2).then(|| (levels[l - 1].sigma - levels[l - 2].sigma) / (lv.sigma - levels[l - 1].sigma)),
            extrapolated,
        })
        .collect()
}

/// Computes `μ₀` once, then `σ(μ)`, the constants and the requested checks
/// for every `μ` in parallel. Results are assembled in configuration order.
pub fn run_pipeline(config: &RunConfig) -> RunReport {
    let start = Instant::now();
    let spec = &config.spec;
    let mut errors = Vec::new();
    let mut convergence = Vec::new();
    let mut timing = Vec::new();

    let t = Instant::now();
    let mu0 = match mu0_compute_with(spec, &config.solver) {
        Ok(r) => {
            convergence.extend(convergence_rows("mu0", None, &r.generalized_levels, r.generalized));
            Some(r)
        }
        Err(e) => {
            errors.push(ItemError::new(None, "mu0", &e));
            None
        }
    };
    timing.push(StageTiming { stage: "mu0".into(), seconds: t.elapsed().as_secs_f64() });

    let mut verification = Vec::new();
    if config.verify.checks.contains(&CheckKind::RadialNullSequence) {
        match radial_null_report(spec.dim(), &config.verify.null_ks) {
            Ok(r) => verification.push(VerificationRecord { mu: None, report: r }),
            Err(e) => errors.push(ItemError::new(None, "radial_null_sequence", &e)),
        }
    }

    let mu0_value = mu0.as_ref().map(|r| r.mu0);
    let outcomes: Vec<ItemOutcome> = config
        .mu
        .par_iter()
        .enumerate()
        .map(|(i, entry)| run_item(config, i, *entry, mu0_value))
        .collect();

    let mut constants = Vec::new();
    for o in outcomes {
        constants.extend(o.constants);
        convergence.extend(o.convergence);
        verification.extend(o.verification);
        errors.extend(o.errors);
        timing.extend(o.timing);
    }
    timing.push(StageTiming { stage: "total".into(), seconds: start.elapsed().as_secs_f64() });

    let body = ReportBody {
        version: env!("CARGO_PKG_VERSION").to_string(),
        seed: config.verify.seed,
        cone: ConeSummary { label: spec.label(), n: spec.dim(), cross_section: spec.cross_section().clone() },
        config: serde_json::to_value(config).unwrap_or(serde_json::Value::Null),
        mu0,
        constants,
        convergence,
        verification,
        errors,
    };
    RunReport { body, timing }
}

fn run_item(config: &RunConfig, index: usize, entry: MuEntry, mu0: Option<f64>) -> ItemOutcome {
    let mut out = ItemOutcome {
        constants: None,
        convergence: Vec::new(),
        verification: Vec::new(),
        errors: Vec::new(),
        timing: Vec::new(),
    };
    let mu = match (entry, mu0) {
        (MuEntry::Value(v), _) => v,
        (MuEntry::Mu0, Some(m)) => m,
        (MuEntry::Mu0, None) => {
            out.errors.push(ItemError {
                mu: None,
                stage: "sigma".into(),
                kind: ErrorKind::InvalidInput,
                message: "mu0 is unavailable".into(),
            });
            return out;
        }
    };
    let Some(mu0) = mu0 else {
        out.errors.push(ItemError {
            mu: Some(mu),
            stage: "constants".into(),
            kind: ErrorKind::InvalidInput,
            message: "constants need mu0".into(),
        });
        return out;
    };
    let spec = &config.spec;
    let t = Instant::now();
    let result = match sigma_of_mu_with(spec, mu, &config.solver) {
        Ok(r) => r,
        Err(e) => {
            out.errors.push(ItemError::new(Some(mu), "sigma", &e));
            return out;
        }
    };
    out.convergence = convergence_rows("sigma", Some(mu), &result.levels, result.sigma);
    let constants = match derive_constants(spec.dim(), result.sigma, mu, mu0) {
        Ok(c) => c,
        Err(e) => {
            out.errors.push(ItemError::new(Some(mu), "constants", &e));
            return out;
        }
    };
    out.timing.push(StageTiming { stage: format!("sigma[{index}]"), seconds: t.elapsed().as_secs_f64() });

    let t = Instant::now();
    let mut checks = config.verify.checks.clone();
    checks.sort();
    checks.dedup();
    for check in checks {
        if check == CheckKind::RadialNullSequence {
            continue;
        }
        let seed = config.verify.seed.wrapping_add(index as u64);
        match run_check(config, check, &constants, &result, seed) {
            Ok(reports) => out.verification.extend(reports.into_iter().map(|r| VerificationRecord { mu: Some(mu), report: r })),
            Err(e) => out.errors.push(ItemError::new(Some(mu), check_name(check), &e)),
        }
    }
    out.timing.push(StageTiming { stage: format!("verify[{index}]"), seconds: t.elapsed().as_secs_f64() });
    out.constants = Some(constants);
    out
}

fn check_name(c: CheckKind) -> &'static str {
    match c {
        CheckKind::HardyMargin => "hardy_margin",
        CheckKind::Sharpness => "sharpness",
        CheckKind::Annulus => "annulus",
        CheckKind::NullSequence => "null_sequence",
        CheckKind::RadialNullSequence => "radial_null_sequence",
        CheckKind::Localized => "localized",
        CheckKind::Witness => "witness",
        CheckKind::Separable => "separable",
    }
}

/// `q_R(w_k)` against `2/log k`, margin `1% - relative deviation`.
pub fn radial_null_report(n: usize, ks: &[u64]) -> Result<VerificationReport> {
    let mut margins = Vec::with_capacity(ks.len());
    let mut values = Vec::with_capacity(ks.len());
    for &k in ks {
        let q = radial_null_sequence_energy(n, k)?;
        let expected = 2.0 / (k as f64).ln();
        margins.push(0.01 - (q / expected - 1.0).abs());
        values.push((k, q));
    }
    let mut r = VerificationReport::new("radial_null_sequence", margins, 0.0, ks.iter().map(|k| *k as usize).collect());
    for (k, q) in values {
        r = r.with_value(&format!("q_k{k}"), q);
    }
    Ok(r)
}

fn run_check(
    config: &RunConfig,
    check: CheckKind,
    constants: &HardyConstants,
    result: &SpectralResult,
    seed: u64,
) -> Result<Vec<VerificationReport>> {
    let spec = &config.spec;
    let mu = constants.mu;
    let lambda = constants.lambda;
    let grid = QuadratureGrid::default();
    let v = &config.verify;
    Ok(match check {
        CheckKind::HardyMargin => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut margins = Vec::with_capacity(v.samples);
            let mut error: f64 = 0.0;
            let mut flags = Vec::new();
            for _ in 0..v.samples {
                let test = TestFunction::new(random_radial_bump(&mut rng), random_angular_bump(spec, &mut rng)?);
                let r = hardy_margin(spec, mu, lambda, &test, &grid)?;
                margins.extend(r.margins);
                error = error.max(r.quadrature_error);
                flags.extend(r.flags);
            }
            flags.sort();
            flags.dedup();
            let mut r = VerificationReport::new("hardy_margin", margins, error, vec![grid.radial_panels, grid.angular_panels])
                .with_value("lambda", lambda);
            for f in flags {
                r.flag(f);
            }
            vec![r]
        }
        CheckKind::Sharpness => vec![sharpness_probe(spec, constants, result, 1.05, &grid)?],
        CheckKind::Annulus => {
            let a = annulus_scale_invariance(spec, constants, result, &v.annulus_radii)?;
            let mut r = VerificationReport::new("annulus_scale_invariance", vec![0.01 - a.spread], a.quadrature_error, vec![16])
                .with_value("spread", a.spread)
                .with_value("log_rate", a.log_rate);
            for (radius, e) in a.radii.iter().zip(&a.energies) {
                r = r.with_value(&format!("energy_r{radius}"), *e);
            }
            if !a.positive && lambda > 0.0 {
                r.flag("annulus energy is not positive although lambda > 0");
            }
            vec![r]
        }
        CheckKind::NullSequence => {
            let ns = spherical_null_sequence_energy(spec, mu, &result.phi, &v.null_ks)?;
            let margins: Vec<f64> = ns.energies.windows(2).map(|w| w[0] - w[1]).collect();
            let mut r = VerificationReport::new("null_sequence", margins, 0.0, v.null_ks.iter().map(|k| *k as usize).collect());
            for (k, e) in ns.ks.iter().zip(&ns.energies) {
                r = r.with_value(&format!("energy_k{k}"), *e);
            }
            if !ns.cutoff_bounded {
                r.force(false);
            }
            vec![r]
        }
        CheckKind::Localized => {
            if !(lambda > 0.0) {
                return Err(Error::InvalidArgument("localized comparison needs lambda > 0".into()));
            }
            let opts = LocalizedOptions { decades: v.localized_decades, solver: config.solver, ..LocalizedOptions::default() };
            let mut out = Vec::new();
            for (kind, name) in [(RegionKind::Inner, "localized_inner"), (RegionKind::Outer, "localized_outer")] {
                let est = best_constant_localized(spec, mu, kind, 1.0, &opts)?;
                let rel = (est.estimate - lambda) / lambda;
                out.push(
                    VerificationReport::new(name, vec![0.05 - rel.abs()], 0.0, vec![est.radial_nodes])
                        .with_value("estimate", est.estimate)
                        .with_value("lambda", lambda)
                        .with_value("radial_eigenvalue", est.radial_eigenvalue),
                );
            }
            out
        }
        CheckKind::Witness => {
            let w = upper_bound_witness(spec, mu, &v.witness_epsilons)?;
            let last = *w.quotients.last().unwrap_or(&f64::NAN);
            let mut r = VerificationReport::new("upper_bound_witness", vec![0.05 - (last - w.bound) / w.bound], 0.0, vec![w.epsilons.len()])
                .with_value("bound", w.bound)
                .with_value("lambda", lambda);
            for (e, q) in w.epsilons.iter().zip(&w.quotients) {
                r = r.with_value(&format!("quotient_eps{e:e}"), *q);
            }
            vec![r]
        }
        CheckKind::Separable => {
            let f = RadialProfile::Bump { center: 1.0, half_width: 0.5 };
            let g = AngularProfile::Principal { phi: std::sync::Arc::new(result.phi.clone()) };
            vec![separable_decomposition_check(spec, mu, &f, &g, &grid)?]
        }
        CheckKind::RadialNullSequence => Vec::new(),
    })
}
