use std::f64::consts::PI;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{ConeSpec, CrossSection};
use crate::spectral::SolverOptions;
use crate::verification::DEFAULT_SEED;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConeKind {
    Sector,
    Cap,
    Polygon,
}

/// Cone section of a run file. The opening is given either as `alpha` in
/// radians or as `alpha_over_pi`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConeConfig {
    pub kind: ConeKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha_over_pi: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vertices: Option<Vec<[f64; 3]>>,
}

impl ConeConfig {
    pub fn build(&self) -> Result<ConeSpec> {
        let alpha = match (self.alpha, self.alpha_over_pi) {
            (Some(a), None) => Some(a),
            (None, Some(a)) => Some(a * PI),
            (None, None) => None,
            (Some(_), Some(_)) => return Err(Error::Config("give either alpha or alpha_over_pi, not both".into())),
        };
        let need_alpha = || alpha.ok_or_else(|| Error::Config(format!("{:?} cones need an opening angle", self.kind)));
        match self.kind {
            ConeKind::Sector => {
                if self.vertices.is_some() {
                    return Err(Error::Config("sectors take no vertices".into()));
                }
                ConeSpec::new(self.n.unwrap_or(2), CrossSection::Sector { alpha: need_alpha()? })
            }
            ConeKind::Cap => {
                if self.vertices.is_some() {
                    return Err(Error::Config("caps take no vertices".into()));
                }
                ConeSpec::new(self.n.unwrap_or(3), CrossSection::Cap { alpha: need_alpha()? })
            }
            ConeKind::Polygon => {
                if alpha.is_some() {
                    return Err(Error::Config("polygons take vertices, not an angle".into()));
                }
                let vertices = self.vertices.clone().ok_or_else(|| Error::Config("polygons need vertices".into()))?;
                ConeSpec::new(self.n.unwrap_or(3), CrossSection::SphericalPolygon { vertices })
            }
        }
    }
}

/// A `μ` value, or the cone's critical value `μ₀` written as `"mu0"`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MuEntry {
    Value(f64),
    Mu0,
}

impl Serialize for MuEntry {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Self::Value(v) => s.serialize_f64(*v),
            Self::Mu0 => s.serialize_str("mu0"),
        }
    }
}

impl<'de> Deserialize<'de> for MuEntry {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        struct Visitor;
        impl serde::de::Visitor<'_> for Visitor {
            type Value = MuEntry;
            fn expecting(&self, f: &mut std::fmt::Formatter) -> std::fmt::Result {
                f.write_str("a number or the string \"mu0\"")
            }
            fn visit_f64<E: serde::de::Error>(self, v: f64) -> std::result::Result<MuEntry, E> {
                Ok(MuEntry::Value(v))
            }
            fn visit_i64<E: serde::de::Error>(self, v: i64) -> std::result::Result<MuEntry, E> {
                Ok(MuEntry::Value(v as f64))
            }
            fn visit_u64<E: serde::de::Error>(self, v: u64) -> std::result::Result<MuEntry, E> {
                Ok(MuEntry::Value(v as f64))
            }
            fn visit_str<E: serde::de::Error>(self, v: &str) -> std::result::Result<MuEntry, E> {
                if v == "mu0" {
                    Ok(MuEntry::Mu0)
                } else {
                    Err(E::invalid_value(serde::de::Unexpected::Str(v), &self))
                }
            }
        }
        d.deserialize_any(Visitor)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckKind {
    /// Random tensor bumps against `λ(μ)`.
    HardyMargin,
    /// Ground-state test function against `1.05 λ(μ)`.
    Sharpness,
    /// Ground-state energy on dyadic annuli.
    Annulus,
    /// Collar cutoffs of the principal eigenfunction.
    NullSequence,
    /// `q_R(w_k)` against `2/log k`; independent of `μ`.
    RadialNullSequence,
    /// Inner and outer truncated minima against `λ(μ)`.
    Localized,
    /// Concentrating test functions against `η²/4`.
    Witness,
    /// Cartesian versus separated quadratic form.
    Separable,
}

impl CheckKind {
    pub const ALL: [CheckKind; 8] = [
        Self::HardyMargin,
        Self::Sharpness,
        Self::Annulus,
        Self::NullSequence,
        Self::RadialNullSequence,
        Self::Localized,
        Self::Witness,
        Self::Separable,
    ];
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct VerifyConfig {
    pub seed: u64,
    pub checks: Vec<CheckKind>,
    /// Random test functions per `μ` for `hardy_margin`.
    pub samples: usize,
    pub null_ks: Vec<u64>,
    pub annulus_radii: Vec<f64>,
    pub witness_epsilons: Vec<f64>,
    pub localized_decades: f64,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            seed: DEFAULT_SEED,
            checks: Vec::new(),
            samples: 20,
            null_ks: vec![10, 100, 1000],
            annulus_radii: vec![0.25, 1.0, 4.0, 16.0],
            witness_epsilons: vec![1e-2, 1e-4, 1e-8, 1e-16, 1e-32],
            localized_decades: 12.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    Json,
    Csv,
    #[default]
    Both,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields, default)]
pub struct OutputConfig {
    pub dir: Option<PathBuf>,
    pub format: OutputFormat,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    cone: ConeConfig,
    mu: Vec<MuEntry>,
    #[serde(default)]
    solver: SolverOptions,
    #[serde(default)]
    verify: VerifyConfig,
    #[serde(default)]
    output: OutputConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    #[serde(skip)]
    pub spec: ConeSpec,
    pub cone: ConeConfig,
    pub mu: Vec<MuEntry>,
    pub solver: SolverOptions,
    pub verify: VerifyConfig,
    #[serde(skip)]
    pub output: OutputConfig,
}

impl RunConfig {
    /// Minimal configuration with defaults for everything but the cone and `μ`.
    pub fn new(cone: ConeConfig, mu: Vec<MuEntry>) -> Result<Self> {
        let c = Self {
            spec: cone.build()?,
            cone,
            mu,
            solver: SolverOptions::default(),
            verify: VerifyConfig::default(),
            output: OutputConfig::default(),
        };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if self.mu.is_empty() {
            return Err(Error::Config("mu list is empty".into()));
        }
        for m in &self.mu {
            if let MuEntry::Value(v) = m {
                if !v.is_finite() {
                    return Err(Error::Config(format!("mu value {v} is not finite")));
                }
            }
        }
        let s = &self.solver;
        if s.nodes < 8 || s.levels == 0 || !(s.grading >= 1.0) || !(s.mesh_h > 0.0) {
            return Err(Error::Config(
                "solver needs nodes >= 8, levels >= 1, grading >= 1 and mesh_h > 0".into(),
            ));
        }
        let v = &self.verify;
        if v.null_ks.iter().any(|k| *k < 3) {
            return Err(Error::Config("null_ks entries must be at least 3".into()));
        }
        if v.annulus_radii.iter().any(|r| !(*r > 0.0)) {
            return Err(Error::Config("annulus radii must be positive".into()));
        }
        if v.witness_epsilons.iter().any(|e| !(*e > 0.0 && *e <= 0.5)) {
            return Err(Error::Config("witness scales must lie in (0, 1/2]".into()));
        }
        if !(v.localized_decades > 0.0) {
            return Err(Error::Config("localized_decades must be positive".into()));
        }
        Ok(())
    }
}

/// Parses and validates a TOML run file. Unknown and duplicate keys are
/// errors; messages carry the line and column of parse failures.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let raw: RawConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
    let spec = raw.cone.build().map_err(|e| match e {
        Error::Config(m) => Error::Config(m),
        other => Error::Config(other.to_string()),
    })?;
    let config = RunConfig {
        spec,
        cone: raw.cone,
        mu: raw.mu,
        solver: raw.solver,
        verify: raw.verify,
        output: raw.output,
    };
    config.validate()?;
    Ok(config)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_sector() {
        let c = parse_config("mu = [0]\n[cone]\nkind = \"sector\"\nalpha = 1.5707963267948966\n").unwrap();
        assert_eq!(c.spec.dim(), 2);
        assert_eq!(c.mu, vec![MuEntry::Value(0.0)]);
        assert_eq!(c.verify.seed, 42);
        assert_eq!(c.solver, SolverOptions::default());
    }

    #[test]
    fn mu0_symbol_and_multiples_of_pi() {
        let c = parse_config("mu = [0.1, \"mu0\"]\n[cone]\nkind = \"sector\"\nalpha_over_pi = 1.5\n").unwrap();
        assert_eq!(c.mu, vec![MuEntry::Value(0.1), MuEntry::Mu0]);
        assert!((c.spec.alpha().unwrap() - 1.5 * PI).abs() < 1e-15);
        assert!(parse_config("mu = [\"mu1\"]\n[cone]\nkind = \"sector\"\nalpha = 1\n").is_err());
    }

    #[test]
    fn rejections() {
        let e = parse_config("mu = [0]\n[cone]\nkind = \"sector\"\nalpha = 7\n").unwrap_err();
        assert!(e.to_string().contains("alpha < 2π"), "{e}");
        let e = parse_config("mu = [0]\n[cone]\nkind = \"sector\"\nalpha = 1\nalpha = 2\n").unwrap_err();
        assert!(e.to_string().contains("line 5"), "{e}");
        let e = parse_config("mu = [0]\nfoo = 1\n[cone]\nkind = \"sector\"\nalpha = 1\n").unwrap_err();
        assert!(e.to_string().contains("foo"), "{e}");
        assert!(parse_config("mu = []\n[cone]\nkind = \"sector\"\nalpha = 1\n").is_err());
    }
}
