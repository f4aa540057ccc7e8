//! Screens and the halfspaces they cut out of line space.
//!
//! A screen `S(λ, n) = {(x, λ) : <n, x> <= 0}` is a half-hyperplane orthogonal
//! to `ℓ`, tangent to it at height `λ`. A line with chart point `(u0, u1)`
//! meets it iff `<Φ(λ, n), (u0, u1)> <= 0` with `Φ(λ, n) = ((1-λ)n, λn)`, so
//! questions about lines meeting screens become questions about homogeneous
//! halfspaces of ℝ^{2d-2}.

use itertools::Itertools;
use nalgebra::DMatrix;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exact::rational_from_f64;
use crate::geometry::{dot, norm, LineChart, TOL};
use crate::lp::max_uniform_slack;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LinespaceError {
    #[error("screen normal must be a nonzero finite vector")]
    ZeroNormal,
    #[error("screen height must be finite")]
    NonFiniteHeight,
    #[error("dimension must be at least 2, got {0}")]
    BadDimension(usize),
    #[error("screen normal has length {got}, expected {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("the screen family is empty")]
    EmptyFamily,
    #[error("optimal slack {slack:e} is within tolerance of zero; perturb or tighten")]
    ToleranceAmbiguous { slack: f64 },
    #[error("genericize gave up after {0} resamples")]
    GivesUp(usize),
    #[error("perturbation magnitude must be positive")]
    NonPositiveEpsilon,
}

/// `S(λ, n)`; the normal is stored with unit length.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Screen {
    pub lambda: f64,
    pub n: Vec<f64>,
}

impl Screen {
    pub fn new(lambda: f64, n: &[f64]) -> Result<Self, LinespaceError> {
        if !lambda.is_finite() {
            return Err(LinespaceError::NonFiniteHeight);
        }
        let r = norm(n);
        if r == 0.0 || !r.is_finite() {
            return Err(LinespaceError::ZeroNormal);
        }
        Ok(Self { lambda, n: n.iter().map(|c| c / r).collect() })
    }
}

/// An ordered family of screens in ℝ^d.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScreenFamily {
    pub d: usize,
    pub screens: Vec<Screen>,
}

impl ScreenFamily {
    pub fn new(d: usize, screens: Vec<Screen>) -> Result<Self, LinespaceError> {
        if d < 2 {
            return Err(LinespaceError::BadDimension(d));
        }
        for s in &screens {
            if s.n.len() != d - 1 {
                return Err(LinespaceError::DimensionMismatch { expected: d - 1, got: s.n.len() });
            }
        }
        Ok(Self { d, screens })
    }

    pub fn len(&self) -> usize {
        self.screens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.screens.is_empty()
    }

    pub fn subfamily(&self, idx: &[usize]) -> Self {
        Self { d: self.d, screens: idx.iter().map(|&i| self.screens[i].clone()).collect() }
    }

    pub fn phis(&self) -> Vec<PhiVector> {
        self.screens.iter().map(phi).collect()
    }
}

/// Outer normal of the halfspace of lines meeting a screen.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhiVector(pub Vec<f64>);

impl PhiVector {
    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }
}

pub fn phi(s: &Screen) -> PhiVector {
    let mut v: Vec<f64> = s.n.iter().map(|c| (1.0 - s.lambda) * c).collect();
    v.extend(s.n.iter().map(|c| s.lambda * c));
    PhiVector(v)
}

/// `Φ` computed exactly from the stored `f64` height and normal.
pub fn phi_exact(s: &Screen) -> Vec<BigRational> {
    let lam = rational_from_f64(s.lambda).expect("finite height");
    let one_minus = BigRational::from_integer(1.into()) - &lam;
    let n: Vec<BigRational> = s.n.iter().map(|c| rational_from_f64(*c).expect("finite normal")).collect();
    n.iter().map(|c| &one_minus * c).chain(n.iter().map(|c| &lam * c)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Meet {
    Miss,
    Boundary,
    Interior,
}

/// Where the line crosses the screen's hyperplane, relative to the screen.
pub fn line_meets_screen(g: &LineChart, s: &Screen) -> Meet {
    let v = dot(phi(s).as_slice(), &g.to_flat());
    if v.abs() <= TOL {
        Meet::Boundary
    } else if v > 0.0 {
        Meet::Miss
    } else {
        Meet::Interior
    }
}

/// Exactly one of the two Gordan alternatives, with its evidence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum FeasibilityVerdict {
    /// `<Φ_i, witness> <= -slack < 0` for every screen.
    StrictTransversal { witness: Vec<f64>, slack: f64 },
    /// `coefficients >= 0`, summing to 1, with `sum c_i Φ_i = 0`.
    NoStrictTransversal { coefficients: Vec<f64>, residual: f64 },
}

impl FeasibilityVerdict {
    pub fn is_strict(&self) -> bool {
        matches!(self, Self::StrictTransversal { .. })
    }
}

pub fn strict_transversal(f: &ScreenFamily) -> Result<FeasibilityVerdict, LinespaceError> {
    strict_transversal_tol(f, TOL)
}

/// Decides whether some line meets the relative interior of every screen.
///
/// The LP is solved exactly. A positive optimal slack no larger than `tol`
/// is reported as [`LinespaceError::ToleranceAmbiguous`].
pub fn strict_transversal_tol(f: &ScreenFamily, tol: f64) -> Result<FeasibilityVerdict, LinespaceError> {
    if f.is_empty() {
        return Err(LinespaceError::EmptyFamily);
    }
    let rows: Vec<Vec<BigRational>> = f.screens.iter().map(phi_exact).collect();
    let sol = max_uniform_slack(&rows);
    let slack = sol.slack.to_f64().unwrap_or(f64::NAN);
    if sol.slack.is_zero() {
        let total: BigRational = sol.duals.iter().cloned().sum();
        let coefficients: Vec<f64> =
            sol.duals.iter().map(|y| (y / &total).to_f64().unwrap_or(f64::NAN)).collect();
        let residual = combination_norm(f, &coefficients);
        return Ok(FeasibilityVerdict::NoStrictTransversal { coefficients, residual });
    }
    if slack <= tol {
        return Err(LinespaceError::ToleranceAmbiguous { slack });
    }
    let witness = sol.x.iter().map(|v| v.to_f64().unwrap_or(f64::NAN)).collect();
    Ok(FeasibilityVerdict::StrictTransversal { witness, slack })
}

fn combination_norm(f: &ScreenFamily, coefficients: &[f64]) -> f64 {
    let dim = 2 * (f.d - 1);
    let mut acc = vec![0.0; dim];
    for (s, c) in f.screens.iter().zip(coefficients) {
        for (a, p) in acc.iter_mut().zip(phi(s).0) {
            *a += c * p;
        }
    }
    norm(&acc)
}

/// Independent check of a verdict against the family, using only the evidence.
pub fn check_feasibility(f: &ScreenFamily, v: &FeasibilityVerdict, tol: f64) -> bool {
    match v {
        FeasibilityVerdict::StrictTransversal { witness, .. } => {
            witness.len() == 2 * (f.d - 1)
                && f.screens.iter().all(|s| dot(phi(s).as_slice(), witness) < -tol)
        }
        FeasibilityVerdict::NoStrictTransversal { coefficients, .. } => {
            coefficients.len() == f.len()
                && coefficients.iter().all(|c| *c >= 0.0)
                && (coefficients.iter().sum::<f64>() - 1.0).abs() <= tol
                && combination_norm(f, coefficients) <= tol
        }
    }
}

/// Whether the `Φ` vectors are linearly dependent, with the numerical rank.
///
/// Singular values below `TOL` times the largest count as zero.
pub fn dependent_normals(f: &ScreenFamily) -> (bool, usize) {
    let k = f.len();
    if k == 0 {
        return (false, 0);
    }
    let dim = 2 * (f.d - 1);
    let m = DMatrix::from_fn(k, dim, |i, j| phi(&f.screens[i]).0[j]);
    let sv = m.singular_values();
    let top = sv.iter().cloned().fold(0.0, f64::max);
    let rank = sv.iter().filter(|&&s| s > TOL * top).count();
    (rank < k, rank)
}

/// Some subfamily of at most `2d - 2` screens has no strict transversal.
pub fn in_bad_set(f: &ScreenFamily) -> Result<bool, LinespaceError> {
    let cap = (2 * f.d - 2).min(f.len());
    let mut ambiguous = None;
    for size in 1..=cap {
        for idx in (0..f.len()).combinations(size) {
            match strict_transversal(&f.subfamily(&idx)) {
                Ok(FeasibilityVerdict::NoStrictTransversal { .. }) => return Ok(true),
                Ok(_) => {}
                Err(e @ LinespaceError::ToleranceAmbiguous { .. }) => ambiguous = Some(e),
                Err(e) => return Err(e),
            }
        }
    }
    match ambiguous {
        Some(e) => Err(e),
        None => Ok(false),
    }
}

const MAX_RESAMPLES: usize = 10_000;

/// Moves each screen by at most `eps` so that every `2d - 2` or fewer `Φ`
/// vectors are linearly independent.
///
/// Screens are fixed one after the other; a screen that already avoids the
/// spans of all small subsets of its predecessors is kept as is.
pub fn genericize(f: &ScreenFamily, eps: f64, seed: u64) -> Result<ScreenFamily, LinespaceError> {
    if eps <= 0.0 || !eps.is_finite() {
        return Err(LinespaceError::NonPositiveEpsilon);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let max_subset = 2 * f.d - 3;
    let scale = f.screens.iter().map(|s| norm(phi(s).as_slice())).fold(0.0, f64::max);
    let thr = TOL * scale.max(1.0);
    let mut fixed: Vec<Screen> = Vec::with_capacity(f.len());
    let mut fixed_phi: Vec<Vec<f64>> = Vec::with_capacity(f.len());
    for s in &f.screens {
        let mut cand = s.clone();
        let mut tries = 0;
        loop {
            let v = phi(&cand).0;
            if independent_of_small_subsets(&fixed_phi, &v, max_subset, thr) {
                fixed_phi.push(v);
                fixed.push(cand);
                break;
            }
            tries += 1;
            if tries > MAX_RESAMPLES {
                return Err(LinespaceError::GivesUp(MAX_RESAMPLES));
            }
            cand = perturb_screen(s, eps, &mut rng);
        }
    }
    Ok(ScreenFamily { d: f.d, screens: fixed })
}

fn perturb_screen(s: &Screen, eps: f64, rng: &mut ChaCha8Rng) -> Screen {
    let lambda = s.lambda + eps * rng.gen_range(-1.0..1.0);
    // random tangent direction of length < 1, so the normal turns by less than eps
    let mut t: Vec<f64> = s.n.iter().map(|_| rng.gen_range(-1.0..1.0)).collect();
    let c = dot(&t, &s.n);
    for (ti, ni) in t.iter_mut().zip(&s.n) {
        *ti -= c * ni;
    }
    let tn = norm(&t);
    let len = rng.gen_range(0.0..1.0);
    let n: Vec<f64> = if tn > 0.0 {
        s.n.iter().zip(&t).map(|(ni, ti)| ni + eps * len * ti / tn).collect()
    } else {
        s.n.clone()
    };
    Screen::new(lambda, &n).expect("perturbed normal stays nonzero")
}

/// `v` stays outside the span of every subset of `fixed` with at most `max_subset` members.
fn independent_of_small_subsets(fixed: &[Vec<f64>], v: &[f64], max_subset: usize, thr: f64) -> bool {
    if norm(v) <= thr {
        return false;
    }
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(max_subset);
    dfs_span(fixed, 0, &mut basis, v, max_subset, thr)
}

fn dfs_span(
    fixed: &[Vec<f64>],
    start: usize,
    basis: &mut Vec<Vec<f64>>,
    residual: &[f64],
    max_subset: usize,
    thr: f64,
) -> bool {
    if basis.len() == max_subset {
        return true;
    }
    for j in start..fixed.len() {
        let mut q = fixed[j].clone();
        // two passes of Gram-Schmidt
        for _ in 0..2 {
            for b in basis.iter() {
                let c = dot(&q, b);
                for (qi, bi) in q.iter_mut().zip(b) {
                    *qi -= c * bi;
                }
            }
        }
        let qn = norm(&q);
        if qn <= thr {
            // fixed members are themselves dependent here; nothing more to learn below
            continue;
        }
        for qi in q.iter_mut() {
            *qi /= qn;
        }
        let c = dot(residual, &q);
        let r: Vec<f64> = residual.iter().zip(&q).map(|(ri, qi)| ri - c * qi).collect();
        if norm(&r) <= thr {
            return false;
        }
        basis.push(q);
        let ok = dfs_span(fixed, j + 1, basis, &r, max_subset, thr);
        basis.pop();
        if !ok {
            return false;
        }
    }
    true
}

/// Smallest relative singular value over all subsets of at most `2d - 2` screens.
pub fn min_subset_rank_margin(f: &ScreenFamily) -> f64 {
    let cap = (2 * f.d - 2).min(f.len());
    let dim = 2 * (f.d - 1);
    let phis = f.phis();
    let mut best = f64::INFINITY;
    for size in 1..=cap {
        for idx in (0..f.len()).combinations(size) {
            let m = DMatrix::from_fn(size, dim, |i, j| phis[idx[i]].0[j]);
            let sv = m.singular_values();
            let top = sv.iter().cloned().fold(0.0, f64::max);
            let low = sv.iter().cloned().fold(f64::INFINITY, f64::min);
            best = best.min(low / top);
        }
    }
    best
}
