//! Command-line front end: scene I/O, figures and one subcommand per operation.

pub mod scene;
pub mod svg;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use pinning_core::balls::{lift_pattern, project_to_pattern, screens_of, validate, BallConfig, BallsError};
use pinning_core::engine::{
    construct_stable, demo_main_theorem, extract_minimal, recheck, verify_pin, DemoOptions, DemoReport,
    EngineError, GrassmannNet, MinimalPinning, PinCertificate, Strength, VerifyOptions,
};
use pinning_core::linespace::{dependent_normals, in_bad_set, strict_transversal_tol, LinespaceError};
use pinning_core::pattern2d::{
    counterexample_along, is_pinning_pattern, is_sigma5, sample_counterexample, search_minimal_patterns,
    signed_normal_order, sigma5, spanning_triples, PatternError, PatternWitness, HalfplanePattern,
};
use serde_json::{json, Value};
use thiserror::Error;

use scene::{balls_document, pattern_document, SceneError, SceneFile};

pub const EXIT_PROVED: i32 = 0;
pub const EXIT_EVIDENCE: i32 = 10;
pub const EXIT_REFUTED: i32 = 20;
pub const EXIT_ERROR: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "pinning", version, about = "Pinning of a line by balls, screens and halfplane patterns")]
pub struct Cli {
    /// Seed for every randomized step (default 0, or the scene's seed).
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Numerical tolerance (default 1e-9, or the scene's tol).
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Oracle trials, samples per sphere, or search starts, depending on the command.
    #[arg(long, global = true)]
    pub trials: Option<usize>,
    /// Comma-separated sampling radii around the axis.
    #[arg(long, global = true, value_delimiter = ',')]
    pub rho_schedule: Option<Vec<f64>>,
    /// Number of flats in the Grassmannian net.
    #[arg(long, global = true)]
    pub resolution: Option<usize>,
    /// Re-validate every emitted certificate from its JSON form.
    #[arg(long, global = true)]
    pub recheck: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Halfplane patterns in the plane.
    #[command(subcommand)]
    Pattern(PatternCmd),
    /// Ball configurations tangent to the axis.
    #[command(subcommand)]
    Balls(BallsCmd),
    /// Screen families and their strict transversals.
    #[command(subcommand)]
    Screens(ScreensCmd),
    /// Pinning certificates.
    #[command(subcommand)]
    Pin(PinCmd),
    /// Stable pinning constructions.
    #[command(subcommand)]
    Construct(ConstructCmd),
    /// End-to-end demonstrations.
    #[command(subcommand)]
    Demo(DemoCmd),
}

#[derive(Debug, Args)]
pub struct SvgArg {
    /// Write a figure of the pattern and its arcs.
    #[arg(long)]
    pub svg: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum PatternCmd {
    /// Decide whether a pattern pins.
    Check {
        file: PathBuf,
        #[command(flatten)]
        svg: SvgArg,
    },
    /// The σ₅ pattern, by default or from five angles in degrees.
    Sigma5 {
        #[arg(long, value_delimiter = ',', num_args = 1)]
        angles: Option<Vec<f64>>,
        #[command(flatten)]
        svg: SvgArg,
    },
    /// Random search for minimal pinning patterns.
    Search {
        #[arg(long, default_value_t = 5)]
        size: usize,
    },
}

#[derive(Debug, Subcommand)]
pub enum BallsCmd {
    /// Congruent tangent balls realizing a pattern.
    Lift {
        file: PathBuf,
        #[arg(long, default_value_t = 1.0)]
        radius: f64,
        #[arg(long, default_value_t = 3.0)]
        gap: f64,
    },
    /// Validate a configuration and project it to a pattern (d = 3).
    Project { file: PathBuf },
}

#[derive(Debug, Subcommand)]
pub enum ScreensCmd {
    /// Strict transversal test on a screen family or on the screens of balls.
    Test { file: PathBuf },
}

#[derive(Debug, Subcommand)]
pub enum PinCmd {
    /// Certify or refute that the balls pin the axis.
    Verify {
        file: PathBuf,
        /// Only re-validate this certificate against the scene.
        #[arg(long)]
        certificate: Option<PathBuf>,
    },
    /// Extract a minimal pinning subfamily of 2d-1 balls.
    Minimal {
        file: PathBuf,
        #[arg(long, default_value_t = 1e-6)]
        eps: f64,
    },
}

#[derive(Debug, Subcommand)]
pub enum ConstructCmd {
    /// σ₅ quintuples over a net of 3-flats through the axis.
    Stable {
        #[arg(long)]
        dim: usize,
        #[arg(long, default_value_t = 1.0)]
        radius: f64,
        #[arg(long, default_value_t = 3.0)]
        gap: f64,
        /// Also run verify_pin on the result.
        #[arg(long)]
        verify: bool,
    },
}

#[derive(Debug, Subcommand)]
pub enum DemoCmd {
    /// 2d-1 balls without a transversal whose (2d-2)-subfamilies all have one.
    MainTheorem {
        #[arg(long, default_value_t = 3)]
        dim: usize,
        #[arg(long, default_value_t = 1e-4)]
        delta: f64,
    },
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Scene(#[from] SceneError),
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    Balls(#[from] BallsError),
    #[error(transparent)]
    Linespace(#[from] LinespaceError),
    #[error(transparent)]
    Pattern(#[from] PatternError),
    #[error("{0}")]
    Usage(String),
    #[error("cannot write {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("certificate failed re-validation: {0}")]
    Recheck(String),
}

impl CliError {
    pub fn kind(&self) -> &'static str {
        match self {
            Self::Scene(_) => "scene",
            Self::Engine(_) => "engine",
            Self::Balls(_) => "balls",
            Self::Linespace(_) => "linespace",
            Self::Pattern(_) => "pattern",
            Self::Usage(_) => "usage",
            Self::Io { .. } => "io",
            Self::Recheck(_) => "recheck",
        }
    }

    pub fn to_json(&self) -> Value {
        json!({ "error": self.kind(), "message": self.to_string() })
    }
}

/// JSON document and exit code of one invocation.
#[derive(Debug)]
pub struct Outcome {
    pub json: Value,
    pub exit: i32,
}

struct Settings {
    seed: u64,
    tol: f64,
}

fn settings(cli: &Cli, scene: Option<&SceneFile>) -> Settings {
    Settings {
        seed: cli.seed.or(scene.and_then(|s| s.seed)).unwrap_or(0),
        tol: cli.tol.or(scene.and_then(|s| s.tol)).unwrap_or(pinning_core::geometry::TOL),
    }
}

fn verify_options(cli: &Cli, s: &Settings) -> VerifyOptions {
    let base = VerifyOptions::default();
    VerifyOptions {
        rho_schedule: cli.rho_schedule.clone().unwrap_or(base.rho_schedule),
        samples: cli.trials.unwrap_or(base.samples),
        seed: s.seed,
        tol: s.tol,
    }
}

fn read_scene(path: &PathBuf) -> Result<SceneFile, CliError> {
    Ok(SceneFile::read(&path.to_string_lossy())?)
}

fn write_file(path: &PathBuf, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|source| CliError::Io { path: path.display().to_string(), source })
}

fn exit_for(strength: Strength) -> i32 {
    match strength {
        Strength::Proved => EXIT_PROVED,
        Strength::Evidence => EXIT_EVIDENCE,
        Strength::Refuted => EXIT_REFUTED,
    }
}

fn strength_name(code: i32) -> &'static str {
    match code {
        EXIT_PROVED => "PROVED",
        EXIT_EVIDENCE => "EVIDENCE",
        EXIT_REFUTED => "REFUTED",
        _ => "OK",
    }
}

/// Serializes the certificate, reads it back and re-validates it against `c`.
fn recheck_json(c: &BallConfig, cert: &PinCertificate, tol: f64) -> Result<Value, CliError> {
    let text = serde_json::to_string(cert).expect("certificates serialize");
    let back: PinCertificate =
        serde_json::from_str(&text).map_err(|e| CliError::Recheck(format!("certificate does not parse: {e}")))?;
    let r = recheck(c, &back, tol)?;
    if !r.valid {
        return Err(CliError::Recheck(format!("{}: {}", r.level, r.detail)));
    }
    Ok(serde_json::to_value(r).expect("rechecks serialize"))
}

pub fn run(cli: &Cli) -> Result<Outcome, CliError> {
    match &cli.command {
        Command::Pattern(cmd) => run_pattern(cli, cmd),
        Command::Balls(cmd) => run_balls(cmd),
        Command::Screens(ScreensCmd::Test { file }) => run_screens(cli, file),
        Command::Pin(cmd) => run_pin(cli, cmd),
        Command::Construct(ConstructCmd::Stable { dim, radius, gap, verify }) => {
            run_construct(cli, *dim, *radius, *gap, *verify)
        }
        Command::Demo(DemoCmd::MainTheorem { dim, delta }) => run_demo(cli, *dim, *delta),
    }
}

fn pattern_report(p: &HalfplanePattern, trials: usize, seed: u64) -> (Value, i32) {
    let verdict = is_pinning_pattern(p);
    let oracle = match &verdict.witness {
        PatternWitness::Cover { .. } => sample_counterexample(p, trials, seed),
        PatternWitness::Uncovered { direction } => counterexample_along(p, direction, trials, seed),
    };
    let order: Vec<String> = signed_normal_order(p).iter().map(|s| s.to_string()).collect();
    let json = json!({
        "pattern": pattern_document(p),
        "is_pinning": verdict.is_pinning,
        "witness": verdict.witness,
        "spanning_triples": spanning_triples(p),
        "signed_order": order,
        "is_sigma5": is_sigma5(p),
        "oracle": { "trials": trials, "counterexample": oracle },
    });
    (json, if verdict.is_pinning { EXIT_PROVED } else { EXIT_REFUTED })
}

fn run_pattern(cli: &Cli, cmd: &PatternCmd) -> Result<Outcome, CliError> {
    match cmd {
        PatternCmd::Check { file, svg } => {
            let scene = read_scene(file)?;
            let s = settings(cli, Some(&scene));
            let p = scene.require_pattern()?;
            let trials = cli.trials.unwrap_or(10_000);
            let (result, exit) = pattern_report(p, trials, s.seed);
            emit_svg(svg, p)?;
            Ok(outcome("pattern check", json!({ "seed": s.seed, "trials": trials }), result, exit))
        }
        PatternCmd::Sigma5 { angles, svg } => {
            let s = settings(cli, None);
            let angles = match angles {
                None => None,
                Some(a) => Some(
                    <[f64; 5]>::try_from(a.as_slice())
                        .map_err(|_| CliError::Usage("--angles takes exactly five values".into()))?,
                ),
            };
            let p = sigma5(angles)?;
            let trials = cli.trials.unwrap_or(10_000);
            let (result, exit) = pattern_report(&p, trials, s.seed);
            emit_svg(svg, &p)?;
            Ok(outcome("pattern sigma5", json!({ "seed": s.seed, "trials": trials, "angles": angles }), result, exit))
        }
        PatternCmd::Search { size } => {
            let s = settings(cli, None);
            let trials = cli.trials.unwrap_or(10_000);
            let found = search_minimal_patterns(*size, trials, s.seed);
            let angles: Vec<Vec<f64>> = found.iter().map(HalfplanePattern::angles_deg).collect();
            Ok(outcome(
                "pattern search",
                json!({ "seed": s.seed, "trials": trials, "size": size }),
                json!({ "found": found.len(), "angles_deg": angles }),
                EXIT_PROVED,
            ))
        }
    }
}

fn emit_svg(svg: &SvgArg, p: &HalfplanePattern) -> Result<(), CliError> {
    if let Some(path) = &svg.svg {
        write_file(path, &svg::pattern_svg(p, &is_pinning_pattern(p)))?;
    }
    Ok(())
}

fn outcome(command: &str, parameters: Value, result: Value, exit: i32) -> Outcome {
    Outcome {
        json: json!({
            "command": command,
            "parameters": parameters,
            "result": result,
            "status": strength_name(exit),
        }),
        exit,
    }
}

fn run_balls(cmd: &BallsCmd) -> Result<Outcome, CliError> {
    match cmd {
        BallsCmd::Lift { file, radius, gap } => {
            let scene = read_scene(file)?;
            let p = scene.require_pattern()?;
            let c = lift_pattern(p, *radius, *gap, None)?;
            let report = validate(&c);
            let mut doc = balls_document(&c);
            doc["validation"] = serde_json::to_value(&report).expect("reports serialize");
            Ok(outcome("balls lift", json!({ "radius": radius, "gap": gap }), doc, EXIT_PROVED))
        }
        BallsCmd::Project { file } => {
            let scene = read_scene(file)?;
            let c = scene.require_balls()?;
            let report = validate(c);
            let pattern = if c.d == 3 && report.all_pass { Some(pattern_document(&project_to_pattern(c)?)) } else { None };
            Ok(outcome(
                "balls project",
                json!({}),
                json!({ "validation": report, "pattern": pattern }),
                EXIT_PROVED,
            ))
        }
    }
}

fn run_screens(cli: &Cli, file: &PathBuf) -> Result<Outcome, CliError> {
    let scene = read_scene(file)?;
    let s = settings(cli, Some(&scene));
    let family = match (&scene.screens, &scene.balls) {
        (Some(f), _) => f.clone(),
        (None, Some(c)) => screens_of(c)?,
        _ => return Err(CliError::Usage("scene has neither \"screens\" nor \"balls\"".into())),
    };
    let verdict = strict_transversal_tol(&family, s.tol)?;
    let (dependent, rank) = dependent_normals(&family);
    let bad = if binomial(family.len(), 2 * family.d - 2) <= 100_000 {
        Some(in_bad_set(&family)?)
    } else {
        None
    };
    let ok = pinning_core::linespace::check_feasibility(&family, &verdict, s.tol.max(1e-9));
    Ok(outcome(
        "screens test",
        json!({ "tol": s.tol }),
        json!({
            "verdict": verdict,
            "certificate_valid": ok,
            "phi_rank": rank,
            "phi_dependent": dependent,
            "small_subfamily_without_strict_transversal": bad,
        }),
        EXIT_PROVED,
    ))
}

fn run_pin(cli: &Cli, cmd: &PinCmd) -> Result<Outcome, CliError> {
    match cmd {
        PinCmd::Verify { file, certificate } => {
            let scene = read_scene(file)?;
            let s = settings(cli, Some(&scene));
            let c = scene.require_balls()?;
            if let Some(path) = certificate {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
                let v: Value = serde_json::from_str(&text).map_err(SceneError::from)?;
                // accept a bare certificate or a full `pin verify` output
                let cert_value = v.pointer("/result/certificate").cloned().unwrap_or(v);
                let cert: PinCertificate = serde_json::from_value(cert_value)
                    .map_err(|e| CliError::Recheck(format!("certificate does not parse: {e}")))?;
                let r = recheck(c, &cert, s.tol)?;
                if !r.valid {
                    return Err(CliError::Recheck(format!("{}: {}", r.level, r.detail)));
                }
                return Ok(outcome(
                    "pin verify",
                    json!({ "tol": s.tol, "certificate": path.display().to_string() }),
                    json!({ "recheck": r }),
                    exit_for(cert.strength()),
                ));
            }
            let opts = verify_options(cli, &s);
            let cert = verify_pin(c, &opts)?;
            let mut result = json!({ "certificate": cert, "strength": cert.strength() });
            if cli.recheck {
                result["recheck"] = recheck_json(c, &cert, s.tol)?;
            }
            Ok(outcome("pin verify", serde_json::to_value(&opts).unwrap(), result, exit_for(cert.strength())))
        }
        PinCmd::Minimal { file, eps } => {
            let scene = read_scene(file)?;
            let s = settings(cli, Some(&scene));
            let c = scene.require_balls()?;
            let opts = verify_options(cli, &s);
            let m = extract_minimal(c, *eps, &opts)?;
            let mut result = serde_json::to_value(&m).expect("results serialize");
            if cli.recheck {
                result["recheck"] = recheck_minimal(&m, s.tol)?;
            }
            let mut params = serde_json::to_value(&opts).unwrap();
            params["eps"] = json!(eps);
            Ok(outcome("pin minimal", params, result, exit_for(m.certificate.strength())))
        }
    }
}

fn recheck_minimal(m: &MinimalPinning, tol: f64) -> Result<Value, CliError> {
    let mut out = vec![recheck_json(&m.config, &m.certificate, tol)?];
    for a in &m.audit {
        let pos: Vec<usize> = a.indices.iter().map(|i| m.indices.iter().position(|j| j == i).unwrap()).collect();
        out.push(recheck_json(&m.config.subfamily(&pos), &a.certificate, tol)?);
    }
    Ok(Value::Array(out))
}

fn run_construct(cli: &Cli, d: usize, r: f64, gap: f64, verify: bool) -> Result<Outcome, CliError> {
    let s = settings(cli, None);
    let resolution = cli.resolution.unwrap_or(if d == 3 { 1 } else { 2 });
    let c = construct_stable(d, resolution, r, gap)?;
    let flats = GrassmannNet::new(d, resolution)?.flats.len();
    let mut result = balls_document(&c);
    result["flats"] = json!(flats);
    let mut exit = EXIT_PROVED;
    let opts = verify_options(cli, &s);
    if verify {
        let cert = verify_pin(&c, &opts)?;
        exit = exit_for(cert.strength());
        result["certificate"] = serde_json::to_value(&cert).unwrap();
        if cli.recheck {
            result["recheck"] = recheck_json(&c, &cert, s.tol)?;
        }
    }
    let mut params = json!({ "dim": d, "resolution": resolution, "radius": r, "gap": gap });
    if verify {
        params["verify"] = serde_json::to_value(&opts).unwrap();
    }
    Ok(outcome("construct stable", params, result, exit))
}

fn run_demo(cli: &Cli, d: usize, delta: f64) -> Result<Outcome, CliError> {
    let s = settings(cli, None);
    let mut opts = DemoOptions { resolution: cli.resolution, ..DemoOptions::default() };
    // --trials counts global search starts here, not samples per sphere
    opts.verify = VerifyOptions { samples: VerifyOptions::default().samples, ..verify_options(cli, &s) };
    if let Some(t) = cli.trials {
        opts.global_starts = t;
    }
    let report = demo_main_theorem(d, delta, &opts)?;
    let mut result = serde_json::to_value(&report).expect("reports serialize");
    if cli.recheck {
        result["recheck"] = recheck_demo(&report, s.tol)?;
    }
    let exit = if report.success { EXIT_EVIDENCE } else { EXIT_REFUTED };
    Ok(outcome("demo main-theorem", json!({ "dim": d, "delta": delta }), result, exit))
}

fn recheck_demo(r: &DemoReport, tol: f64) -> Result<Value, CliError> {
    let mut out = match recheck_minimal(&r.minimal, tol)? {
        Value::Array(v) => v,
        _ => unreachable!(),
    };
    for t in &r.subsets {
        let pos: Vec<usize> =
            t.indices.iter().map(|i| r.minimal.indices.iter().position(|j| j == i).unwrap()).collect();
        let sub = r.balls.subfamily(&pos);
        let f = t.transversal.as_ref().map(|g| pinning_core::engine::clearance_deficit(&sub, g));
        if !f.is_some_and(|f| f <= 0.0) {
            return Err(CliError::Recheck(format!("subfamily {:?} has no valid transversal", t.indices)));
        }
        out.push(json!({ "level": "TRANSVERSAL", "valid": true, "detail": format!("deficit {:e}", f.unwrap()) }));
    }
    Ok(Value::Array(out))
}

fn binomial(n: usize, k: usize) -> usize {
    let k = k.min(n);
    (1..=k).fold(1usize, |acc, i| acc.saturating_mul(n + 1 - i) / i)
}
