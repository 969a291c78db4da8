use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use hardy_cones::closed_forms::BallSpec;
use hardy_cones::report::{
    body_json, domain_summary, emit_report, ftt_summary, parse_config, run_pipeline, CheckKind,
    OutputFormat, RunConfig,
};
use hardy_cones::spectral::mu0_compute_with;
use hardy_cones::Error;

const EXIT_FAILED: u8 = 1;
const EXIT_CONFIG: u8 = 2;
const EXIT_SOLVER: u8 = 3;

#[derive(Parser)]
#[command(name = "hardy", version, about = "Optimal Hardy constants on cones")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// TOML run file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory; without it results go to stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Grid doublings.
    #[arg(long, global = true)]
    levels: Option<usize>,
    /// Unknowns on the coarsest level.
    #[arg(long, global = true)]
    nodes: Option<usize>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
    Both,
}

impl From<Format> for OutputFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Json => OutputFormat::Json,
            Format::Csv => OutputFormat::Csv,
            Format::Both => OutputFormat::Both,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// σ(μ), γ± and λ(μ) for every μ of the run file.
    Constants,
    /// The critical value μ₀ of the cone.
    Mu0,
    /// Constants plus the configured checks (all checks when none are listed).
    Verify,
    /// Derive, classify and check a half-space product weight.
    Ftt {
        /// Nonpositive exponents α₁,…,α_n.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        alphas: Vec<f64>,
        #[arg(long, default_value_t = 100)]
        samples: usize,
        /// Collar levels of the integrability test.
        #[arg(long = "collar-levels", default_value_t = 8)]
        collar_levels: u32,
    },
    /// Inequality-field scans on a ball touching the origin, and on the
    /// run file's cone when `--config` is given.
    DomainCheck {
        #[arg(long, default_value_t = 3)]
        dim: usize,
        #[arg(long, default_value_t = 1.0)]
        radius: f64,
        #[arg(long, default_value_t = 0.25)]
        mu: f64,
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        /// Bumps for the superharmonicity test on the cone.
        #[arg(long, default_value_t = 50)]
        bumps: usize,
    },
    /// Full pipeline with report files.
    Report,
}

fn fail(code: u8, e: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(code)
}

fn load(global: &Global) -> Result<RunConfig, ExitCode> {
    let Some(path) = &global.config else {
        return Err(fail(EXIT_CONFIG, "this command needs --config"));
    };
    let text = std::fs::read_to_string(path).map_err(|e| fail(EXIT_CONFIG, format!("{}: {e}", path.display())))?;
    let mut config = parse_config(&text).map_err(|e| fail(EXIT_CONFIG, e))?;
    if let Some(s) = global.seed {
        config.verify.seed = s;
    }
    if let Some(l) = global.levels {
        config.solver.levels = l;
    }
    if let Some(n) = global.nodes {
        config.solver.nodes = n;
    }
    if let Some(o) = &global.out {
        config.output.dir = Some(o.clone());
    }
    if let Some(f) = global.format {
        config.output.format = f.into();
    }
    config.validate().map_err(|e| fail(EXIT_CONFIG, e))?;
    Ok(config)
}

/// Writes to stdout, ignoring a closed pipe.
fn emit(text: &str) {
    let _ = writeln!(std::io::stdout().lock(), "{text}");
}

fn print_json<T: serde::Serialize>(value: &T) -> Result<(), ExitCode> {
    emit(&serde_json::to_string_pretty(value).map_err(|e| fail(EXIT_FAILED, e))?);
    Ok(())
}

fn pipeline(config: &RunConfig, require_dir: bool) -> Result<ExitCode, ExitCode> {
    let report = run_pipeline(config);
    match (&config.output.dir, require_dir) {
        (Some(dir), _) => {
            let written = emit_report(&report, dir, config.output.format).map_err(|e| fail(EXIT_FAILED, e))?;
            for p in written {
                eprintln!("wrote {}", p.display());
            }
        }
        (None, true) => return Err(fail(EXIT_CONFIG, "report needs --out or [output] dir")),
        (None, false) => emit(&body_json(&report).map_err(|e| fail(EXIT_FAILED, e))?),
    }
    for e in &report.body.errors {
        eprintln!("{} failed{}: {}", e.stage, e.mu.map(|m| format!(" at mu = {m}")).unwrap_or_default(), e.message);
    }
    Ok(ExitCode::from(report.exit_code() as u8))
}

fn run(cli: Cli) -> Result<ExitCode, ExitCode> {
    let g = &cli.global;
    match cli.command {
        Command::Constants => {
            let mut config = load(g)?;
            config.verify.checks.clear();
            pipeline(&config, false)
        }
        Command::Mu0 => {
            let config = load(g)?;
            match mu0_compute_with(&config.spec, &config.solver) {
                Ok(r) => {
                    print_json(&r)?;
                    Ok(ExitCode::SUCCESS)
                }
                Err(e @ (Error::NoConvergence(_) | Error::SignChange(_))) => Err(fail(EXIT_SOLVER, e)),
                Err(e) => Err(fail(EXIT_FAILED, e)),
            }
        }
        Command::Verify => {
            let mut config = load(g)?;
            if config.verify.checks.is_empty() {
                config.verify.checks = CheckKind::ALL.to_vec();
            }
            pipeline(&config, false)
        }
        Command::Report => {
            let config = load(g)?;
            pipeline(&config, true)
        }
        Command::Ftt { alphas, samples, collar_levels } => {
            let seed = g.seed.unwrap_or(hardy_cones::verification::DEFAULT_SEED);
            let s = ftt_summary(alphas.len(), &alphas, samples, collar_levels, seed).map_err(|e| fail(EXIT_CONFIG, e))?;
            print_json(&s)?;
            Ok(if s.passed { ExitCode::SUCCESS } else { ExitCode::from(EXIT_FAILED) })
        }
        Command::DomainCheck { dim, radius, mu, samples, bumps } => {
            let seed = g.seed.unwrap_or(hardy_cones::verification::DEFAULT_SEED);
            let mut center = vec![0.0; dim.max(1)];
            center[0] = radius;
            let ball = BallSpec::new(radius, center, mu).map_err(|e| fail(EXIT_CONFIG, e))?;
            let config = match &g.config {
                Some(_) => Some(load(g)?),
                None => None,
            };
            let cone = config.as_ref().map(|c| (&c.spec, mu, bumps));
            let s = domain_summary(&ball, samples, seed, cone).map_err(|e| fail(EXIT_FAILED, e))?;
            print_json(&s)?;
            Ok(if s.passed { ExitCode::SUCCESS } else { ExitCode::from(EXIT_FAILED) })
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(c) | Err(c) => c,
    }
}
