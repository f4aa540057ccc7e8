//! Pinning verification, transversal search, minimal-pinning extraction and
//! the stable constructions built from σ₅ quintuples.

use itertools::Itertools;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::balls::{
    lift_pattern_at, project_to_pattern, realize_screens, screens_of, shrink_radii, validate, Ball, BallConfig,
    BallsError,
};
use crate::geometry::{dot, norm, Flat3, GeometryError, LineChart, TOL};
use crate::linespace::{
    check_feasibility, genericize, strict_transversal_tol, FeasibilityVerdict, LinespaceError, ScreenFamily,
};
use crate::optim::NelderMead;
use crate::pattern2d::{
    check_verdict, is_pinning_pattern, sigma5, triple_arc, PatternError, PatternVerdict, PatternWitness, Triple,
};
use crate::sampling::{projective_plane_points, sphere_directions};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EngineError {
    #[error(transparent)]
    Balls(#[from] BallsError),
    #[error(transparent)]
    Linespace(#[from] LinespaceError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Pattern(#[from] PatternError),
    #[error("dimension {0} is not supported here")]
    UnsupportedDimension(usize),
    #[error("the net needs at least one flat")]
    EmptyNet,
    #[error("rho schedule entries must be positive and finite")]
    BadSchedule,
    #[error("first-order test is inconclusive and sampling is disabled")]
    Undecided,
    #[error("quintuples are not pairwise disjoint: {0}")]
    DisjointnessFailure(String),
    #[error("configuration is not pinned to begin with ({0})")]
    NotPinnedInput(String),
    #[error("no minimal subfamily could be certified: {reason}")]
    ExtractionFailed { reason: String, failures: Vec<String> },
}

/// Parameters of [`verify_pin`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyOptions {
    pub rho_schedule: Vec<f64>,
    pub samples: usize,
    pub seed: u64,
    pub tol: f64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self { rho_schedule: vec![1e-3, 1e-4, 1e-5], samples: 4096, seed: 0, tol: TOL }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WitnessSource {
    /// Scaled witness of the strict-transversal program.
    FirstOrder,
    /// A sampled line near the axis, then locally refined.
    Sampling,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Strength {
    Proved,
    Evidence,
    Refuted,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "level", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum PinCertificate {
    /// The planar shadow is a pinning pattern; `triples` (1-based) give covering arcs.
    Pattern { triples: Vec<[usize; 3]>, arcs_deg: Vec<[f64; 2]>, first_order: FeasibilityVerdict },
    /// No strict transversal of the screens; nothing else was sampled.
    FirstOrder { first_order: FeasibilityVerdict },
    /// Every sampled nearby line misses some ball. Not a proof.
    Empirical {
        rho_schedule: Vec<f64>,
        samples: usize,
        seed: u64,
        min_deficit: f64,
        min_deficit_per_rho: Vec<f64>,
        first_order: Option<FeasibilityVerdict>,
        conclusive: bool,
    },
    /// A transversal other than the axis.
    NotPinned { witness: LineChart, deficit: f64, chart_distance: f64, source: WitnessSource },
}

impl PinCertificate {
    pub fn level(&self) -> &'static str {
        match self {
            Self::Pattern { .. } => "PATTERN",
            Self::FirstOrder { .. } => "FIRST_ORDER",
            Self::Empirical { .. } => "EMPIRICAL",
            Self::NotPinned { .. } => "NOT_PINNED",
        }
    }

    /// Pinned according to this certificate (at whatever strength).
    pub fn is_positive(&self) -> bool {
        !matches!(self, Self::NotPinned { .. })
    }

    pub fn strength(&self) -> Strength {
        match self {
            Self::Pattern { .. } => Strength::Proved,
            Self::FirstOrder { .. } | Self::Empirical { .. } => Strength::Evidence,
            Self::NotPinned { .. } => Strength::Refuted,
        }
    }

    fn first_order(&self) -> Option<&FeasibilityVerdict> {
        match self {
            Self::Pattern { first_order, .. } | Self::FirstOrder { first_order } => Some(first_order),
            Self::Empirical { first_order, .. } => first_order.as_ref(),
            Self::NotPinned { .. } => None,
        }
    }
}

/// `max_i (dist(g, c_i) - r_i)` with the ball attaining it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClearanceDeficit {
    pub value: f64,
    pub worst: usize,
}

pub fn clearance(balls: &[Ball], g: &LineChart) -> ClearanceDeficit {
    let v = g.to_flat();
    let mut best = ClearanceDeficit { value: f64::NEG_INFINITY, worst: 0 };
    for (i, b) in balls.iter().enumerate() {
        let f = ball_deficit(b, &v);
        if f > best.value {
            best = ClearanceDeficit { value: f, worst: i };
        }
    }
    best
}

/// Clearance deficit of `g`: nonpositive exactly when `g` meets every ball.
pub fn clearance_deficit(c: &BallConfig, g: &LineChart) -> f64 {
    deficit_flat(&c.balls, &g.to_flat())
}

fn ball_deficit(b: &Ball, v: &[f64]) -> f64 {
    let h = v.len() / 2;
    let (u0, u1) = v.split_at(h);
    let z = b.center[h];
    let mut ww = 0.0;
    let mut wv = 0.0;
    let mut vv = 0.0;
    for j in 0..h {
        let w = b.center[j] - ((1.0 - z) * u0[j] + z * u1[j]);
        let dv = u1[j] - u0[j];
        ww += w * w;
        wv += w * dv;
        vv += dv * dv;
    }
    (ww - wv * wv / (1.0 + vv)).max(0.0).sqrt() - b.radius
}

fn deficit_flat(balls: &[Ball], v: &[f64]) -> f64 {
    balls.iter().map(|b| ball_deficit(b, v)).fold(f64::NEG_INFINITY, f64::max)
}

fn first_order_verdict(f: &ScreenFamily, tol: f64) -> Result<Option<FeasibilityVerdict>, EngineError> {
    match strict_transversal_tol(f, tol) {
        Ok(v) => Ok(Some(v)),
        Err(LinespaceError::ToleranceAmbiguous { .. }) => Ok(None),
        Err(e) => Err(e.into()),
    }
}

fn check_schedule(opts: &VerifyOptions) -> Result<(), EngineError> {
    if opts.rho_schedule.iter().all(|r| *r > 0.0 && r.is_finite()) {
        Ok(())
    } else {
        Err(EngineError::BadSchedule)
    }
}

/// Decides, at the strongest level available, whether the balls pin the axis.
pub fn verify_pin(c: &BallConfig, opts: &VerifyOptions) -> Result<PinCertificate, EngineError> {
    check_schedule(opts)?;
    let dim = 2 * (c.d - 1);
    if c.d < 2 || dim > 40 {
        return Err(EngineError::UnsupportedDimension(c.d));
    }
    let screens = screens_of(c)?;
    let first_order = first_order_verdict(&screens, opts.tol)?;

    if let Some(FeasibilityVerdict::StrictTransversal { witness, .. }) = &first_order {
        if let Some(cert) = witness_along(&c.balls, witness, opts.tol) {
            return Ok(cert);
        }
    }

    if let (3, Some(fo @ FeasibilityVerdict::NoStrictTransversal { .. })) = (c.d, &first_order) {
        let verdict = is_pinning_pattern(&project_to_pattern(c)?);
        if let PatternWitness::Cover { arcs } = &verdict.witness {
            return Ok(PinCertificate::Pattern {
                triples: arcs.iter().map(|(t, _)| t.one_based()).collect(),
                arcs_deg: arcs.iter().map(|(_, a)| [a.start_deg(), a.end_deg()]).collect(),
                first_order: fo.clone(),
            });
        }
    }

    if opts.samples == 0 || opts.rho_schedule.is_empty() {
        return match first_order {
            Some(fo @ FeasibilityVerdict::NoStrictTransversal { .. }) => Ok(PinCertificate::FirstOrder { first_order: fo }),
            _ => Err(EngineError::Undecided),
        };
    }

    let sweep = empirical_sweep(c, opts)?;
    if let Some((g, f, rho)) = sweep.violation {
        return Ok(refine_sampled_witness(&c.balls, g, f, rho));
    }
    Ok(PinCertificate::Empirical {
        rho_schedule: opts.rho_schedule.clone(),
        samples: opts.samples,
        seed: opts.seed,
        min_deficit: sweep.min_deficit,
        min_deficit_per_rho: sweep.min_deficit_per_rho,
        first_order,
        conclusive: false,
    })
}

/// Clearance deficits of quasi-random lines on chart spheres around the axis.
#[derive(Debug, Clone, PartialEq)]
pub struct Sweep {
    pub min_deficit: f64,
    pub min_deficit_per_rho: Vec<f64>,
    /// First sampled transversal (flat chart point, deficit, radius), which ends the sweep.
    pub violation: Option<(Vec<f64>, f64, f64)>,
}

pub fn empirical_sweep(c: &BallConfig, opts: &VerifyOptions) -> Result<Sweep, EngineError> {
    check_schedule(opts)?;
    let dim = 2 * (c.d - 1);
    if c.d < 2 || dim > 40 {
        return Err(EngineError::UnsupportedDimension(c.d));
    }
    let mut min_deficit = f64::INFINITY;
    let mut per_rho = Vec::with_capacity(opts.rho_schedule.len());
    for (k, &rho) in opts.rho_schedule.iter().enumerate() {
        let mut m = f64::INFINITY;
        for u in sphere_directions(dim, opts.samples, mix_seed(opts.seed, k as u64)) {
            let g: Vec<f64> = u.iter().map(|x| rho * x).collect();
            let f = deficit_flat(&c.balls, &g);
            if f <= 0.0 {
                per_rho.push(f);
                return Ok(Sweep { min_deficit: f, min_deficit_per_rho: per_rho, violation: Some((g, f, rho)) });
            }
            m = m.min(f);
        }
        per_rho.push(m);
        min_deficit = min_deficit.min(m);
    }
    Ok(Sweep { min_deficit, min_deficit_per_rho: per_rho, violation: None })
}

fn mix_seed(seed: u64, k: u64) -> u64 {
    seed ^ k.wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

// Scan t = 2^-k along the strict direction and keep the deepest transversal.
fn witness_along(balls: &[Ball], x: &[f64], tol: f64) -> Option<PinCertificate> {
    let xn = norm(x);
    let mut best: Option<(f64, Vec<f64>)> = None;
    let mut t = 1.0;
    for _ in 0..=60 {
        if t * xn <= tol {
            break;
        }
        let g: Vec<f64> = x.iter().map(|v| t * v).collect();
        let f = deficit_flat(balls, &g);
        if f < 0.0 && best.as_ref().is_none_or(|(bf, _)| f < *bf) {
            best = Some((f, g));
        }
        t *= 0.5;
    }
    let (deficit, g) = best?;
    Some(PinCertificate::NotPinned {
        chart_distance: norm(&g),
        witness: LineChart::from_flat(&g),
        deficit,
        source: WitnessSource::FirstOrder,
    })
}

fn refine_sampled_witness(balls: &[Ball], g: Vec<f64>, f: f64, rho: f64) -> PinCertificate {
    let floor = 0.5 * rho;
    let m = NelderMead { max_evals: 2000, ..NelderMead::default() }.minimize(
        |v| if norm(v) < floor { 1.0 } else { deficit_flat(balls, v) },
        &g,
        0.25 * rho,
        None,
    );
    let (deficit, g) = if m.value <= f && norm(&m.x) >= floor { (m.value, m.x) } else { (f, g) };
    PinCertificate::NotPinned {
        chart_distance: norm(&g),
        witness: LineChart::from_flat(&g),
        deficit,
        source: WitnessSource::Sampling,
    }
}

/// Result of re-checking a certificate against a scene.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Recheck {
    pub level: String,
    pub valid: bool,
    pub detail: String,
}

/// Re-validates a certificate from its recorded evidence.
///
/// No optimization is run: witnesses are evaluated, dual combinations are
/// summed, covering arcs are rebuilt from the listed triples, and empirical
/// sweeps are replayed from their recorded parameters.
pub fn recheck(c: &BallConfig, cert: &PinCertificate, tol: f64) -> Result<Recheck, EngineError> {
    let level = cert.level().to_string();
    let first_order_ok = |v: &FeasibilityVerdict| -> Result<bool, EngineError> {
        let f = screens_of(c)?;
        Ok(matches!(v, FeasibilityVerdict::NoStrictTransversal { .. }) && check_feasibility(&f, v, tol))
    };
    let (valid, detail) = match cert {
        PinCertificate::NotPinned { witness, .. } => {
            if witness.ambient_dim() != c.d {
                (false, "witness has the wrong dimension".to_string())
            } else {
                let f = clearance_deficit(c, witness);
                let away = witness.chart_norm();
                (f <= 0.0 && away > tol, format!("deficit {f:e}, chart distance {away:e}"))
            }
        }
        PinCertificate::FirstOrder { first_order } => {
            let ok = first_order_ok(first_order)?;
            (ok, format!("dual combination valid: {ok}"))
        }
        PinCertificate::Pattern { triples, first_order, .. } => {
            let p = project_to_pattern(c)?;
            let arcs: Option<Vec<_>> = triples
                .iter()
                .map(|t| {
                    let t = Triple([t[0].checked_sub(1)?, t[1].checked_sub(1)?, t[2].checked_sub(1)?]);
                    triple_arc(&p, t).ok().map(|a| (t, a))
                })
                .collect();
            let cover = match arcs {
                Some(arcs) => {
                    check_verdict(&p, &PatternVerdict { is_pinning: true, witness: PatternWitness::Cover { arcs } })
                }
                None => false,
            };
            let fo = first_order_ok(first_order)?;
            (cover && fo, format!("arcs cover: {cover}, dual combination valid: {fo}"))
        }
        PinCertificate::Empirical { rho_schedule, samples, seed, min_deficit, first_order, .. } => {
            let fo = match first_order {
                Some(v) => first_order_ok(v)?,
                None => true,
            };
            let opts = VerifyOptions { rho_schedule: rho_schedule.clone(), samples: *samples, seed: *seed, tol };
            let m = empirical_sweep(c, &opts)?.min_deficit;
            let ok = fo && m > 0.0 && m == *min_deficit;
            (ok, format!("replayed min deficit {m:e}, dual combination valid: {fo}"))
        }
    };
    Ok(Recheck { level, valid, detail })
}

/// Outcome of a multistart search, including the best point seen.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SearchOutcome {
    pub found: Option<LineChart>,
    pub best: LineChart,
    pub best_deficit: f64,
    pub starts: usize,
}

/// Multistart local minimization of the clearance deficit.
///
/// Returns the first line meeting every ball, preferring deficits below
/// `-TOL / 2`. Starts cluster around `near` when given; otherwise each start
/// is the line through random points of two random balls.
pub fn find_transversal(c: &BallConfig, starts: usize, seed: u64, near: Option<&LineChart>) -> Option<LineChart> {
    search_transversal(c, starts, seed, near).found
}

pub fn search_transversal(c: &BallConfig, starts: usize, seed: u64, near: Option<&LineChart>) -> SearchOutcome {
    let dim = 2 * (c.d - 1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let nm = NelderMead { max_evals: 1500, x_tol: 1e-13, f_tol: 1e-16 };
    let mean_r = c.balls.iter().map(|b| b.radius).sum::<f64>() / c.len().max(1) as f64;
    let mut best = (f64::INFINITY, vec![0.0; dim]);
    let mut fallback: Option<Vec<f64>> = None;
    for k in 0..starts {
        let (x0, step) = match near {
            Some(g) => {
                let base = g.to_flat();
                if k == 0 {
                    (base, 1e-3)
                } else {
                    let sigma = 10f64.powi(-2 - (k % 4) as i32);
                    (base.iter().map(|b| b + sigma * gaussian(&mut rng)).collect(), sigma)
                }
            }
            None => (global_start(c, &mut rng), 0.1 * mean_r),
        };
        let m = nm.minimize(|v| deficit_flat(&c.balls, v), &x0, step, Some(-0.5 * TOL));
        if m.value < best.0 {
            best = (m.value, m.x.clone());
        }
        if m.value <= -0.5 * TOL {
            return SearchOutcome {
                found: Some(LineChart::from_flat(&m.x)),
                best: LineChart::from_flat(&m.x),
                best_deficit: m.value,
                starts: k + 1,
            };
        }
        if m.value <= 0.0 && fallback.is_none() {
            fallback = Some(m.x);
        }
    }
    SearchOutcome {
        found: fallback.map(|v| LineChart::from_flat(&v)),
        best: LineChart::from_flat(&best.1),
        best_deficit: best.0,
        starts,
    }
}

fn gaussian(rng: &mut ChaCha8Rng) -> f64 {
    let u: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
    let v: f64 = rng.gen();
    (-2.0 * u.ln()).sqrt() * (std::f64::consts::TAU * v).cos()
}

fn point_in_ball(b: &Ball, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let d = b.center.len();
    let dir: Vec<f64> = (0..d).map(|_| gaussian(rng)).collect();
    let n = norm(&dir).max(f64::MIN_POSITIVE);
    let s = b.radius * rng.gen::<f64>().powf(1.0 / d as f64);
    b.center.iter().zip(&dir).map(|(c, x)| c + s * x / n).collect()
}

fn global_start(c: &BallConfig, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let d = c.d;
    loop {
        let i = rng.gen_range(0..c.len());
        let j = if c.len() > 1 { rng.gen_range(0..c.len()) } else { i };
        let p = point_in_ball(&c.balls[i], rng);
        let q = point_in_ball(&c.balls[j], rng);
        let dz = q[d - 1] - p[d - 1];
        if dz.abs() < 1e-9 {
            continue;
        }
        let at = |h: f64| -> Vec<f64> {
            let s = (h - p[d - 1]) / dz;
            (0..d - 1).map(|k| p[k] + s * (q[k] - p[k])).collect()
        };
        let mut v = at(0.0);
        v.extend(at(1.0));
        return v;
    }
}

/// Verdict for one subfamily, by original indices.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SubsetVerdict {
    pub indices: Vec<usize>,
    pub certificate: PinCertificate,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MinimalPinning {
    /// Indices into the input configuration.
    pub indices: Vec<usize>,
    /// The perturbed balls at those indices.
    pub config: BallConfig,
    pub certificate: PinCertificate,
    /// One verdict per subfamily of size `2d - 2`.
    pub audit: Vec<SubsetVerdict>,
    /// Smallest strict-transversal slack over the subfamilies missing one ball.
    pub robustness: f64,
    pub eps_perturb: f64,
}

const EXHAUSTIVE_LIMIT: usize = 500;

fn binomial(n: usize, k: usize) -> usize {
    (0..k.min(n - k)).fold(1usize, |acc, i| acc.saturating_mul(n - i) / (i + 1))
}

/// Smallest strict slack over the subfamilies missing one screen; zero when one of them pins to first order.
pub fn robustness(f: &ScreenFamily, tol: f64) -> Result<f64, EngineError> {
    let mut worst = f64::INFINITY;
    for idx in (0..f.len()).combinations(f.len().saturating_sub(1)) {
        let s = match first_order_verdict(&f.subfamily(&idx), tol)? {
            Some(FeasibilityVerdict::StrictTransversal { slack, .. }) => slack,
            _ => 0.0,
        };
        worst = worst.min(s);
    }
    Ok(worst)
}

/// Perturbs the balls into general position and greedily deletes balls while
/// the rest stays pinned, down to `2d - 1` balls.
pub fn extract_minimal(c: &BallConfig, eps: f64, opts: &VerifyOptions) -> Result<MinimalPinning, EngineError> {
    let initial = verify_pin(c, opts)?;
    if !initial.is_positive() {
        return Err(EngineError::NotPinnedInput(initial.level().to_string()));
    }
    let target = 2 * c.d - 1;
    let screens = genericize(&screens_of(c)?, eps, opts.seed)?;
    let radii: Vec<f64> = c.balls.iter().map(|b| b.radius).collect();
    let perturbed = realize_screens(&screens, &radii)?;

    let mut current: Vec<usize> = (0..c.len()).collect();
    let mut cert = verify_pin(&perturbed, opts)?;
    if !cert.is_positive() {
        return Err(EngineError::ExtractionFailed {
            reason: format!("perturbation by {eps:e} destroyed the pinning"),
            failures: vec![cert.level().to_string()],
        });
    }
    let mut failures = Vec::new();
    while current.len() > target && binomial(current.len(), target) > EXHAUSTIVE_LIMIT {
        // balls outside the support of the dual certificate go first
        let weights: Vec<f64> = match cert.first_order() {
            Some(FeasibilityVerdict::NoStrictTransversal { coefficients, .. }) => coefficients.clone(),
            _ => vec![0.0; current.len()],
        };
        let order: Vec<usize> = (0..current.len())
            .sorted_by(|&a, &b| weights[a].partial_cmp(&weights[b]).unwrap_or(std::cmp::Ordering::Equal))
            .collect();
        let mut removed = false;
        for pos in order {
            let trial: Vec<usize> = current.iter().enumerate().filter(|&(q, _)| q != pos).map(|(_, &i)| i).collect();
            let v = verify_pin(&perturbed.subfamily(&trial), opts)?;
            if v.is_positive() {
                current = trial;
                cert = v;
                removed = true;
                break;
            }
            failures.push(format!("without ball {}: {}", current[pos], v.level()));
        }
        if !removed {
            return Err(EngineError::ExtractionFailed {
                reason: format!("stuck at {} balls, every deletion unpins", current.len()),
                failures,
            });
        }
    }
    if current.len() < target {
        return Err(EngineError::ExtractionFailed {
            reason: format!("input has only {} balls", current.len()),
            failures,
        });
    }
    if current.len() > target {
        // few enough left: take the pinned subfamily whose proper subfamilies are farthest from pinning
        let screens = screens_of(&perturbed)?;
        let mut ranked = Vec::new();
        for idx in current.iter().copied().combinations(target) {
            let sub = screens.subfamily(&idx);
            if let Some(FeasibilityVerdict::NoStrictTransversal { .. }) = first_order_verdict(&sub, opts.tol)? {
                ranked.push((robustness(&sub, opts.tol)?, idx));
            }
        }
        ranked.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap_or(std::cmp::Ordering::Equal));
        let mut chosen = None;
        for (_, idx) in ranked {
            let v = verify_pin(&perturbed.subfamily(&idx), opts)?;
            if v.is_positive() {
                chosen = Some((idx, v));
                break;
            }
            failures.push(format!("subfamily {idx:?}: {}", v.level()));
        }
        let Some((idx, v)) = chosen else {
            return Err(EngineError::ExtractionFailed {
                reason: format!("no subfamily of {target} balls verifies"),
                failures,
            });
        };
        current = idx;
        cert = v;
    }

    let config = perturbed.subfamily(&current);
    let mut audit = Vec::new();
    let mut bad = Vec::new();
    for idx in (0..config.len()).combinations(target - 1) {
        let v = verify_pin(&config.subfamily(&idx), opts)?;
        let indices: Vec<usize> = idx.iter().map(|&q| current[q]).collect();
        if v.is_positive() {
            bad.push(format!("subfamily {indices:?}: {}", v.level()));
        }
        audit.push(SubsetVerdict { indices, certificate: v });
    }
    if !bad.is_empty() {
        return Err(EngineError::ExtractionFailed { reason: "a proper subfamily still pins".into(), failures: bad });
    }
    let robustness = robustness(&screens_of(&config)?, opts.tol)?;
    Ok(MinimalPinning { indices: current, config, certificate: cert, audit, robustness, eps_perturb: eps })
}

/// Finite family of 3-flats through the axis.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GrassmannNet {
    pub d: usize,
    pub resolution: usize,
    pub flats: Vec<Flat3>,
}

impl GrassmannNet {
    /// `resolution` is the number of flats; in ℝ³ there is only one.
    pub fn new(d: usize, resolution: usize) -> Result<Self, EngineError> {
        if resolution == 0 {
            return Err(EngineError::EmptyNet);
        }
        let flats = match d {
            3 => vec![Flat3::canonical(3)],
            4 => projective_plane_points(resolution)
                .iter()
                .map(Flat3::from_normal)
                .collect::<Result<Vec<_>, _>>()?,
            d if d >= 5 && 2 * (d - 1) <= 40 => {
                let dirs = sphere_directions(d - 1, 4 * resolution, resolution as u64);
                let mut flats = Vec::with_capacity(resolution);
                for pair in dirs.chunks(2) {
                    if flats.len() == resolution {
                        break;
                    }
                    let w1 = pair[0].clone();
                    let c = dot(&pair[1], &w1);
                    let w2: Vec<f64> = pair[1].iter().zip(&w1).map(|(b, a)| b - c * a).collect();
                    let n2 = norm(&w2);
                    if n2 > 1e-3 {
                        flats.push(Flat3::new(w1, w2.iter().map(|x| x / n2).collect())?);
                    }
                }
                flats
            }
            _ => return Err(EngineError::UnsupportedDimension(d)),
        };
        Ok(Self { d, resolution, flats })
    }
}

/// Union of σ₅ quintuples, one per flat of the net, stacked along the axis.
pub fn construct_stable(d: usize, resolution: usize, r: f64, gap: f64) -> Result<BallConfig, EngineError> {
    let net = GrassmannNet::new(d, resolution)?;
    let base = sigma5(None)?;
    let mut balls = Vec::with_capacity(5 * net.flats.len());
    for (j, t) in net.flats.iter().enumerate() {
        let p = if j == 0 { base.clone() } else { base.rotated_deg(47.0 * j as f64)? };
        let q = lift_pattern_at(&p, r, gap, Some(t), j as f64 * 6.0 * gap)?;
        balls.extend(q.balls);
    }
    let c = BallConfig::new(d, balls)?;
    let rep = validate(&c);
    if !rep.all_pass {
        return Err(EngineError::DisjointnessFailure(rep.summary()));
    }
    Ok(c)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DemoOptions {
    /// Number of flats; defaults to 1 in ℝ³ and 2 otherwise.
    pub resolution: Option<usize>,
    pub radius: f64,
    pub gap: f64,
    pub eps_perturb: f64,
    pub global_starts: usize,
    pub local_starts: usize,
    pub verify: VerifyOptions,
}

impl Default for DemoOptions {
    fn default() -> Self {
        Self {
            resolution: None,
            radius: 1.0,
            gap: 3.0,
            eps_perturb: 1e-6,
            global_starts: 10_000,
            local_starts: 200,
            verify: VerifyOptions::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SubsetTransversal {
    pub indices: Vec<usize>,
    pub transversal: Option<LineChart>,
    /// Recomputed from the balls, independently of the search.
    pub deficit: Option<f64>,
    pub ok: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GlobalSearch {
    pub starts: usize,
    pub seed: u64,
    pub found: Option<LineChart>,
    pub best_deficit: f64,
    pub conclusive: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DemoReport {
    pub d: usize,
    pub delta: f64,
    pub options: DemoOptions,
    pub constructed_balls: usize,
    pub minimal: MinimalPinning,
    pub balls: BallConfig,
    pub congruent: bool,
    pub disjoint: bool,
    pub axis_deficit: f64,
    pub subsets: Vec<SubsetTransversal>,
    pub global: GlobalSearch,
    pub success: bool,
}

/// Builds a family of `2d - 1` disjoint congruent balls with no transversal
/// whose subfamilies of size `2d - 2` all have one.
pub fn demo_main_theorem(d: usize, delta: f64, opts: &DemoOptions) -> Result<DemoReport, EngineError> {
    if !(delta > 0.0) {
        return Err(BallsError::NonPositiveDelta(delta).into());
    }
    let resolution = opts.resolution.unwrap_or(if d == 3 { 1 } else { 2 });
    let built = construct_stable(d, resolution, opts.radius, opts.gap)?;
    let minimal = extract_minimal(&built, opts.eps_perturb, &opts.verify)?;
    let tangent = &minimal.config;
    let shrunk = shrink_radii(tangent, delta)?;

    let r0 = shrunk.balls[0].radius;
    let congruent = shrunk.balls.iter().all(|b| (b.radius - r0).abs() <= TOL * r0);
    let disjoint = validate(&shrunk).disjointness_ok();
    let axis_deficit = clearance_deficit(&shrunk, &LineChart::axis(d));

    let mut subsets = Vec::new();
    for idx in (0..shrunk.len()).combinations(shrunk.len() - 1) {
        let sub = shrunk.subfamily(&idx);
        let hint = strict_hint(&tangent.subfamily(&idx), &sub, opts.verify.tol)?;
        let found = find_transversal(&sub, opts.local_starts, opts.verify.seed, Some(&hint));
        let deficit = found.as_ref().map(|g| clearance_deficit(&sub, g));
        subsets.push(SubsetTransversal {
            indices: idx.iter().map(|&q| minimal.indices[q]).collect(),
            ok: deficit.is_some_and(|f| f <= 0.0),
            transversal: found,
            deficit,
        });
    }

    let s = search_transversal(&shrunk, opts.global_starts, opts.verify.seed, None);
    let global = GlobalSearch {
        starts: opts.global_starts,
        seed: opts.verify.seed,
        found: s.found,
        best_deficit: s.best_deficit,
        conclusive: false,
    };
    let success = congruent
        && disjoint
        && shrunk.len() == 2 * d - 1
        && subsets.iter().all(|t| t.ok)
        && global.found.is_none();
    Ok(DemoReport {
        d,
        delta,
        options: opts.clone(),
        constructed_balls: built.len(),
        minimal: minimal.clone(),
        balls: shrunk,
        congruent,
        disjoint,
        axis_deficit,
        subsets,
        global,
        success,
    })
}

// Starting line for the subset search: the strict direction of the tangent
// subfamily, scaled to the deepest point for the shrunk balls.
fn strict_hint(tangent: &BallConfig, shrunk: &BallConfig, tol: f64) -> Result<LineChart, EngineError> {
    let dim = 2 * (tangent.d - 1);
    let v = first_order_verdict(&screens_of(tangent)?, tol)?;
    let Some(FeasibilityVerdict::StrictTransversal { witness, .. }) = v else {
        return Ok(LineChart::from_flat(&vec![0.0; dim]));
    };
    let mut best = (deficit_flat(&shrunk.balls, &vec![0.0; dim]), vec![0.0; dim]);
    let mut t = 1.0;
    for _ in 0..60 {
        let g: Vec<f64> = witness.iter().map(|x| t * x).collect();
        let f = deficit_flat(&shrunk.balls, &g);
        if f < best.0 {
            best = (f, g);
        }
        t *= 0.8;
    }
    Ok(LineChart::from_flat(&best.1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::balls::lift_pattern;

    fn sigma5_balls() -> BallConfig {
        lift_pattern(&sigma5(None).unwrap(), 1.0, 3.0, None).unwrap()
    }

    #[test]
    fn deficit_examples() {
        let c = sigma5_balls();
        assert!(clearance_deficit(&c, &LineChart::axis(3)).abs() < 1e-12);
        let s = shrink_radii(&c, 1e-4).unwrap();
        assert!((clearance_deficit(&s, &LineChart::axis(3)) - 1e-4).abs() < 1e-12);
        let far = BallConfig::new(3, vec![Ball::new(vec![3.0, 0.0, 0.5], 1.0).unwrap()]).unwrap();
        assert!((clearance_deficit(&far, &LineChart::axis(3)) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn deficit_matches_generic_distance() {
        let c = sigma5_balls();
        let g = LineChart::new(vec![0.3, -0.2], vec![0.1, 0.4]).unwrap();
        let direct = c
            .balls
            .iter()
            .map(|b| crate::geometry::line_point_distance(&g, &b.center) - b.radius)
            .fold(f64::NEG_INFINITY, f64::max);
        assert!((clearance_deficit(&c, &g) - direct).abs() < 1e-12);
        assert_eq!(clearance(&c.balls, &g).value, clearance_deficit(&c, &g));
    }

    #[test]
    fn sigma5_is_pattern_pinned() {
        let c = sigma5_balls();
        let cert = verify_pin(&c, &VerifyOptions::default()).unwrap();
        assert_eq!(cert.level(), "PATTERN");
        assert!(recheck(&c, &cert, TOL).unwrap().valid);
    }

    #[test]
    fn single_ball_is_not_pinned() {
        let c = BallConfig::new(3, vec![Ball::new(vec![-1.0, 0.0, 2.0], 1.0).unwrap()]).unwrap();
        let cert = verify_pin(&c, &VerifyOptions::default()).unwrap();
        let PinCertificate::NotPinned { witness, deficit, .. } = &cert else { panic!("{cert:?}") };
        assert!(*deficit <= 0.0 && witness.chart_norm() > TOL);
        assert!(recheck(&c, &cert, TOL).unwrap().valid);
    }

    #[test]
    fn four_of_sigma5_are_not_pinned() {
        let c = sigma5_balls();
        for idx in (0..5).combinations(4) {
            let cert = verify_pin(&c.subfamily(&idx), &VerifyOptions::default()).unwrap();
            assert_eq!(cert.level(), "NOT_PINNED", "{idx:?}");
        }
    }

    #[test]
    fn first_order_only_without_samples() {
        let c = sigma5_balls();
        let opts = VerifyOptions { samples: 0, ..VerifyOptions::default() };
        // d = 3 still prefers the pattern
        assert_eq!(verify_pin(&c, &opts).unwrap().level(), "PATTERN");
        let c4 = construct_stable(4, 2, 1.0, 3.0).unwrap();
        let cert = verify_pin(&c4, &opts).unwrap();
        assert_eq!(cert.level(), "FIRST_ORDER");
        assert!(recheck(&c4, &cert, TOL).unwrap().valid);
    }

    #[test]
    fn two_far_balls_have_a_transversal() {
        let c = BallConfig::new(
            3,
            vec![Ball::new(vec![5.0, 5.0, 0.0], 1.0).unwrap(), Ball::new(vec![-7.0, 2.0, 9.0], 1.0).unwrap()],
        )
        .unwrap();
        let g = find_transversal(&c, 10, 0, None).expect("transversal");
        assert!(clearance_deficit(&c, &g) <= 0.0);
    }

    #[test]
    fn net_sizes() {
        assert_eq!(GrassmannNet::new(3, 7).unwrap().flats.len(), 1);
        assert_eq!(GrassmannNet::new(4, 13).unwrap().flats.len(), 13);
        assert_eq!(GrassmannNet::new(5, 4).unwrap().flats.len(), 4);
        assert_eq!(GrassmannNet::new(4, 0), Err(EngineError::EmptyNet));
        assert_eq!(construct_stable(4, 13, 1.0, 3.0).unwrap().len(), 65);
        assert_eq!(construct_stable(3, 1, 1.0, 3.0).unwrap(), sigma5_balls());
    }

    #[test]
    fn demo_rejects_zero_delta() {
        assert!(matches!(
            demo_main_theorem(3, 0.0, &DemoOptions::default()),
            Err(EngineError::Balls(BallsError::NonPositiveDelta(_)))
        ));
    }

    #[test]
    fn certificate_json_round_trip() {
        let c = sigma5_balls();
        let cert = verify_pin(&c, &VerifyOptions::default()).unwrap();
        let s = serde_json::to_string(&cert).unwrap();
        let back: PinCertificate = serde_json::from_str(&s).unwrap();
        assert_eq!(back, cert);
    }
}
