//! Halfplane patterns through the origin and the exact pinning-pattern decision.
//!
//! A pattern is an ordered list of outward normals `n_i`, the halfplanes being
//! `H_i = {x : <n_i, x> <= 0}`. A directed line meeting every `H_i` respects
//! the pattern order when no halfplane `H_j` is left before an earlier `H_i`
//! (i < j) is entered. The pattern pins when no origin-avoiding line respects
//! the order, which is decided here through the cover of `S¹` by the
//! direction arcs of positively spanning triples.

use std::cmp::Ordering;
use std::fmt;

use num_traits::Signed;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::exact::{
    angle_cmp, interior_direction, sign, strictly_between, ParseRationalError, QVec2,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PatternError {
    #[error("a pattern needs at least one halfplane")]
    Empty,
    #[error("normal {0} is the zero vector")]
    ZeroNormal(usize),
    #[error("halfplanes {0} and {1} are bounded by the same line")]
    SharedBoundary(usize, usize),
    #[error("the provided angles do not realize the sigma5 cyclic order")]
    ProvidedAnglesNotSigma5,
    #[error("degenerate input: two antipodal vectors with the third on their line")]
    DegenerateInput,
    #[error("({0}, {1}, {2}) is not an increasing spanning triple of the pattern")]
    NotSpanningTriple(usize, usize, usize),
    #[error(transparent)]
    Number(#[from] ParseRationalError),
}

/// Ordered halfplanes through the origin, given by exact outward normals.
#[derive(Debug, Clone, PartialEq)]
pub struct HalfplanePattern {
    normals: Vec<QVec2>,
}

impl HalfplanePattern {
    pub fn new(normals: Vec<QVec2>) -> Result<Self, PatternError> {
        if normals.is_empty() {
            return Err(PatternError::Empty);
        }
        for (i, n) in normals.iter().enumerate() {
            if n.is_zero() {
                return Err(PatternError::ZeroNormal(i));
            }
        }
        for i in 0..normals.len() {
            for j in i + 1..normals.len() {
                if normals[i].parallel(&normals[j]) {
                    return Err(PatternError::SharedBoundary(i, j));
                }
            }
        }
        Ok(Self { normals })
    }

    pub fn from_f64(normals: &[[f64; 2]]) -> Result<Self, PatternError> {
        let q = normals
            .iter()
            .map(|[x, y]| QVec2::from_f64(*x, *y))
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(q)
    }

    pub fn from_angles_deg(angles: &[f64]) -> Result<Self, PatternError> {
        let v: Vec<[f64; 2]> = angles
            .iter()
            .map(|a| {
                let t = a.to_radians();
                [t.cos(), t.sin()]
            })
            .collect();
        Self::from_f64(&v)
    }

    pub fn normals(&self) -> &[QVec2] {
        &self.normals
    }

    pub fn len(&self) -> usize {
        self.normals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.normals.is_empty()
    }

    /// Unit normals in floating point.
    pub fn unit_normals(&self) -> Vec<[f64; 2]> {
        self.normals
            .iter()
            .map(|n| {
                let [x, y] = n.to_f64();
                let r = x.hypot(y);
                [x / r, y / r]
            })
            .collect()
    }

    pub fn angles_deg(&self) -> Vec<f64> {
        self.normals.iter().map(QVec2::angle_deg).collect()
    }

    /// The pattern with every normal rotated by `deg` (floating point).
    pub fn rotated_deg(&self, deg: f64) -> Result<Self, PatternError> {
        let a: Vec<f64> = self.angles_deg().iter().map(|x| x + deg).collect();
        Self::from_angles_deg(&a)
    }

    /// Drops halfplane `idx`, keeping the order of the rest.
    pub fn without(&self, idx: usize) -> Option<Self> {
        if self.normals.len() <= 1 {
            return None;
        }
        let mut n = self.normals.clone();
        n.remove(idx);
        Some(Self { normals: n })
    }
}

impl Serialize for HalfplanePattern {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("HalfplanePattern", 1)?;
        let v: Vec<[f64; 2]> = self.normals.iter().map(QVec2::to_f64).collect();
        st.serialize_field("normals", &v)?;
        st.end()
    }
}

/// An outward (`+n_i`) or inward (`-n_i`) normal, by 0-based index.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SignedNormal {
    pub index: usize,
    pub outward: bool,
}

impl fmt::Display for SignedNormal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = if self.outward { "" } else { "-" };
        write!(f, "{s}n{}", self.index + 1)
    }
}

/// The sigma5 cyclic order, read counterclockwise from `n1`.
pub const SIGMA5_ORDER: [(usize, bool); 10] = [
    (0, true),
    (2, false),
    (4, true),
    (1, true),
    (3, false),
    (0, false),
    (2, true),
    (4, false),
    (1, false),
    (3, true),
];

/// Equal-spacing realization of the sigma5 order, angles of `n1..n5` in degrees.
pub const SIGMA5_DEFAULT_DEG: [f64; 5] = [0.0, 108.0, 216.0, 324.0, 72.0];

fn signed(p: &HalfplanePattern, s: SignedNormal) -> QVec2 {
    if s.outward {
        p.normals[s.index].clone()
    } else {
        p.normals[s.index].neg()
    }
}

/// All `2k` signed normals in counterclockwise order, starting at `+n1`.
pub fn signed_normal_order(p: &HalfplanePattern) -> Vec<SignedNormal> {
    let mut all: Vec<SignedNormal> = (0..p.len())
        .flat_map(|i| [SignedNormal { index: i, outward: true }, SignedNormal { index: i, outward: false }])
        .collect();
    let start = p.normals[0].clone();
    all.sort_by(|a, b| crate::exact::ccw_cmp_from(&start, &signed(p, *a), &signed(p, *b)));
    all
}

pub fn is_sigma5(p: &HalfplanePattern) -> bool {
    if p.len() != 5 {
        return false;
    }
    signed_normal_order(p)
        .iter()
        .zip(SIGMA5_ORDER.iter())
        .all(|(s, &(i, o))| s.index == i && s.outward == o)
}

/// A sigma5 pattern; `None` gives the equal-spacing realization.
pub fn sigma5(angles_deg: Option<[f64; 5]>) -> Result<HalfplanePattern, PatternError> {
    let a = angles_deg.unwrap_or(SIGMA5_DEFAULT_DEG);
    let p = HalfplanePattern::from_angles_deg(&a).map_err(|_| PatternError::ProvidedAnglesNotSigma5)?;
    if !is_sigma5(&p) {
        return Err(PatternError::ProvidedAnglesNotSigma5);
    }
    Ok(p)
}

/// Whether nonnegative combinations of `a, b, c` fill the plane.
pub fn positively_spans(a: &QVec2, b: &QVec2, c: &QVec2) -> Result<bool, PatternError> {
    if a.is_zero() || b.is_zero() || c.is_zero() {
        return Err(PatternError::DegenerateInput);
    }
    let d1 = sign(&b.det(c));
    let d2 = sign(&c.det(a));
    let d3 = sign(&a.det(b));
    if d1 != Ordering::Equal && d1 == d2 && d2 == d3 {
        return Ok(true);
    }
    let v = [a, b, c];
    for i in 0..3 {
        for j in i + 1..3 {
            let k = 3 - i - j;
            let antipodal = v[i].parallel(v[j]) && v[i].dot(v[j]).is_negative();
            if antipodal && v[i].parallel(v[k]) {
                return Err(PatternError::DegenerateInput);
            }
        }
    }
    Ok(false)
}

/// Increasing index triple, 0-based internally, serialized 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct Triple(pub [usize; 3]);

impl Triple {
    pub fn one_based(&self) -> [usize; 3] {
        [self.0[0] + 1, self.0[1] + 1, self.0[2] + 1]
    }
}

impl Serialize for Triple {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.one_based().serialize(s)
    }
}

pub fn spanning_triples(p: &HalfplanePattern) -> Vec<Triple> {
    let n = p.normals();
    let k = n.len();
    let mut out = Vec::new();
    for i in 0..k {
        for j in i + 1..k {
            for l in j + 1..k {
                // normals are pairwise non-parallel, so this never errors
                if positively_spans(&n[i], &n[j], &n[l]).unwrap_or(false) {
                    out.push(Triple([i, j, l]));
                }
            }
        }
    }
    out
}

/// Open counterclockwise arc of directions from `start` to `end`.
///
/// Arcs produced here are intersections of two open half-circles, so they
/// are never longer than a half-turn.
#[derive(Debug, Clone, PartialEq)]
pub struct OpenArc {
    pub start: QVec2,
    pub end: QVec2,
}

impl OpenArc {
    pub fn contains(&self, u: &QVec2) -> bool {
        strictly_between(&self.start, u, &self.end)
    }

    pub fn start_deg(&self) -> f64 {
        self.start.angle_deg()
    }

    pub fn end_deg(&self) -> f64 {
        self.end.angle_deg()
    }
}

impl Serialize for OpenArc {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("OpenArc", 2)?;
        st.serialize_field("start_deg", &self.start_deg())?;
        st.serialize_field("end_deg", &self.end_deg())?;
        st.end()
    }
}

/// Directions `u` with `<u, enter> < 0` and `<u, exit> > 0`; `None` when empty.
pub fn arc_between(enter: &QVec2, exit: &QVec2) -> Option<OpenArc> {
    let c1 = enter.neg();
    let c2 = exit;
    if c1.same_direction(c2) {
        return Some(OpenArc { start: c1.rot_cw(), end: c1.rot_ccw() });
    }
    match sign(&c1.det(c2)) {
        Ordering::Greater => Some(OpenArc { start: c2.rot_cw(), end: c1.rot_ccw() }),
        Ordering::Less => Some(OpenArc { start: c1.rot_cw(), end: c2.rot_ccw() }),
        Ordering::Equal => None,
    }
}

/// Directions that enter the first and exit the last halfplane of a spanning triple.
pub fn triple_arc(p: &HalfplanePattern, t: Triple) -> Result<OpenArc, PatternError> {
    let [i, j, k] = t.0;
    let bad = PatternError::NotSpanningTriple(i + 1, j + 1, k + 1);
    if !(i < j && j < k && k < p.len()) {
        return Err(bad);
    }
    let n = p.normals();
    if !positively_spans(&n[i], &n[j], &n[k])? {
        return Err(bad);
    }
    arc_between(&n[i], &n[k]).ok_or(bad)
}

/// Outcome of the exact decision with its evidence.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PatternWitness {
    /// Arcs whose union covers `S¹`.
    Cover { arcs: Vec<(Triple, OpenArc)> },
    /// A direction in no arc.
    Uncovered {
        #[serde(serialize_with = "ser_qvec")]
        direction: QVec2,
    },
}

fn ser_qvec<S: Serializer>(v: &QVec2, s: S) -> Result<S::Ok, S::Error> {
    v.to_f64().serialize(s)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PatternVerdict {
    pub is_pinning: bool,
    pub witness: PatternWitness,
}

/// First direction not covered by the open arcs, if any.
pub fn find_uncovered(arcs: &[OpenArc]) -> Option<QVec2> {
    if arcs.is_empty() {
        return Some(QVec2::from_ints(1, 0));
    }
    let covered = |u: &QVec2| arcs.iter().any(|a| a.contains(u));
    let mut ends: Vec<QVec2> = arcs.iter().flat_map(|a| [a.start.clone(), a.end.clone()]).collect();
    ends.sort_by(angle_cmp);
    ends.dedup_by(|a, b| angle_cmp(a, b) == Ordering::Equal);
    let m = ends.len();
    for idx in 0..m {
        let p = &ends[idx];
        let q = &ends[(idx + 1) % m];
        let inner = interior_direction(p, q);
        if !covered(&inner) {
            return Some(nicer_gap_direction(p, q, &covered).unwrap_or(inner));
        }
    }
    ends.into_iter().find(|e| !covered(e))
}

// Floating bisector of the gap, kept only if it is exactly inside and uncovered.
fn nicer_gap_direction(p: &QVec2, q: &QVec2, covered: &dyn Fn(&QVec2) -> bool) -> Option<QVec2> {
    let a = p.angle_deg().to_radians();
    let mut b = q.angle_deg().to_radians();
    if b <= a {
        b += std::f64::consts::TAU;
    }
    let mid = 0.5 * (a + b);
    let c = QVec2::from_f64(mid.cos(), mid.sin()).ok()?;
    let inside = if p.same_direction(q) { !c.same_direction(p) } else { strictly_between(p, &c, q) };
    (inside && !covered(&c)).then_some(c)
}

/// Exact decision: the pattern pins iff the triple arcs cover every direction.
pub fn is_pinning_pattern(p: &HalfplanePattern) -> PatternVerdict {
    let arcs: Vec<(Triple, OpenArc)> = spanning_triples(p)
        .into_iter()
        .filter_map(|t| triple_arc(p, t).ok().map(|a| (t, a)))
        .collect();
    let plain: Vec<OpenArc> = arcs.iter().map(|(_, a)| a.clone()).collect();
    match find_uncovered(&plain) {
        None => PatternVerdict { is_pinning: true, witness: PatternWitness::Cover { arcs } },
        Some(u) => PatternVerdict { is_pinning: false, witness: PatternWitness::Uncovered { direction: u } },
    }
}

/// Re-validates a verdict against the pattern using only sign predicates.
pub fn check_verdict(p: &HalfplanePattern, v: &PatternVerdict) -> bool {
    match (&v.witness, v.is_pinning) {
        (PatternWitness::Cover { arcs }, true) => {
            let ok_triples = arcs.iter().all(|(t, a)| triple_arc(p, *t).map(|b| &b == a).unwrap_or(false));
            let plain: Vec<OpenArc> = arcs.iter().map(|(_, a)| a.clone()).collect();
            ok_triples && find_uncovered(&plain).is_none()
        }
        (PatternWitness::Uncovered { direction }, false) => {
            let n = p.normals();
            !spanning_triples(p).into_iter().any(|t| {
                let [i, _, k] = t.0;
                direction.dot(&n[i]).is_negative() && direction.dot(&n[k]).is_positive()
            })
        }
        _ => false,
    }
}

/// Minimum angular separation, in radians, between consecutive signed normals.
///
/// Rotating each halfplane by less than half of this keeps the cyclic order of
/// signed normals, and with it the verdict.
pub fn min_signed_separation(p: &HalfplanePattern) -> f64 {
    let mut a: Vec<f64> = p
        .unit_normals()
        .iter()
        .flat_map(|[x, y]| [y.atan2(*x), (-y).atan2(-x)])
        .map(|t| t.rem_euclid(std::f64::consts::TAU))
        .collect();
    a.sort_by(|x, y| x.partial_cmp(y).unwrap());
    let mut best = a[0] + std::f64::consts::TAU - a[a.len() - 1];
    for w in a.windows(2) {
        best = best.min(w[1] - w[0]);
    }
    best
}

/// A directed planar line `p0 + t u`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PlanarLine {
    pub p0: [f64; 2],
    pub u: [f64; 2],
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Crossing {
    Enter(f64),
    Exit(f64),
    Never,
}

/// When the line crosses the boundary of `{x : <n, x> <= 0}`, and in which sense.
pub fn crossing_time(n: [f64; 2], g: &PlanarLine) -> Crossing {
    let a = n[0] * g.u[0] + n[1] * g.u[1];
    let b = n[0] * g.p0[0] + n[1] * g.p0[1];
    if a == 0.0 {
        return Crossing::Never;
    }
    let t = -b / a;
    if a < 0.0 {
        Crossing::Enter(t)
    } else {
        Crossing::Exit(t)
    }
}

/// The line meets every halfplane and meets them in pattern order.
pub fn respects_order(normals: &[[f64; 2]], g: &PlanarLine) -> bool {
    let mut max_enter = f64::NEG_INFINITY;
    for n in normals {
        let (enter, exit) = match crossing_time(*n, g) {
            Crossing::Enter(t) => (t, f64::INFINITY),
            Crossing::Exit(t) => (f64::NEG_INFINITY, t),
            Crossing::Never => {
                if n[0] * g.p0[0] + n[1] * g.p0[1] > 0.0 {
                    return false;
                }
                (f64::NEG_INFINITY, f64::INFINITY)
            }
        };
        if exit < max_enter {
            return false;
        }
        max_enter = max_enter.max(enter);
    }
    true
}

fn avoids_origin(g: &PlanarLine) -> bool {
    g.p0[0] * g.u[1] - g.p0[1] * g.u[0] != 0.0
}

/// Random search for a line that meets the pattern in order.
///
/// `p0` is uniform in the annulus `0.1 <= |p0| <= 10`, `u` uniform on `S¹`.
pub fn sample_counterexample(p: &HalfplanePattern, trials: usize, seed: u64) -> Option<PlanarLine> {
    let normals = p.unit_normals();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (r2_in, r2_out) = (0.1f64 * 0.1, 10.0f64 * 10.0);
    for _ in 0..trials {
        let r = rng.gen_range(r2_in..r2_out).sqrt();
        let phi: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
        let theta: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
        let g = PlanarLine { p0: [r * phi.cos(), r * phi.sin()], u: [theta.cos(), theta.sin()] };
        if avoids_origin(&g) && respects_order(&normals, &g) {
            return Some(g);
        }
    }
    None
}

/// Random lines with the fixed direction `u`, offset to either side of the origin.
pub fn counterexample_along(
    p: &HalfplanePattern,
    u: &QVec2,
    trials: usize,
    seed: u64,
) -> Option<PlanarLine> {
    let normals = p.unit_normals();
    let [x, y] = u.to_f64();
    let r = x.hypot(y);
    let dir = [x / r, y / r];
    let side = [-dir[1], dir[0]];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..trials {
        let off: f64 = rng.gen_range(0.1..10.0) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
        let along: f64 = rng.gen_range(-10.0..10.0);
        let g = PlanarLine {
            p0: [off * side[0] + along * dir[0], off * side[1] + along * dir[1]],
            u: dir,
        };
        if avoids_origin(&g) && respects_order(&normals, &g) {
            return Some(g);
        }
    }
    None
}

/// Pinning, and no pattern obtained by deleting one halfplane pins.
pub fn is_minimal_pinning(p: &HalfplanePattern) -> bool {
    is_pinning_pattern(p).is_pinning
        && (0..p.len()).all(|i| p.without(i).map(|q| !is_pinning_pattern(&q).is_pinning).unwrap_or(true))
}

/// Randomized search for minimal pinning patterns of `k` halfplanes.
pub fn search_minimal_patterns(k: usize, trials: usize, seed: u64) -> Vec<HalfplanePattern> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut found = Vec::new();
    for _ in 0..trials {
        let angles: Vec<f64> = (0..k).map(|_| rng.gen_range(0.0..360.0)).collect();
        let Ok(p) = HalfplanePattern::from_angles_deg(&angles) else { continue };
        if is_minimal_pinning(&p) {
            found.push(p);
        }
    }
    found
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64) -> bool {
        let d = (a - b).rem_euclid(360.0);
        d.min(360.0 - d) < 1e-9
    }

    #[test]
    fn default_sigma5_order_audit() {
        let p = sigma5(None).unwrap();
        let order: Vec<String> = signed_normal_order(&p).iter().map(|s| s.to_string()).collect();
        assert_eq!(order, ["n1", "-n3", "n5", "n2", "-n4", "-n1", "n3", "-n5", "-n2", "n4"]);
        // 36 degree steps
        let mut angles: Vec<f64> = signed_normal_order(&p)
            .iter()
            .map(|s| signed(&p, *s).angle_deg())
            .collect();
        angles.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for (k, a) in angles.iter().enumerate() {
            assert!(close(*a, 36.0 * k as f64), "{a}");
        }
    }

    #[test]
    fn sigma5_rejects_wrong_order() {
        assert_eq!(sigma5(Some([0.0, 72.0, 144.0, 216.0, 288.0])), Err(PatternError::ProvidedAnglesNotSigma5));
        let rotated = SIGMA5_DEFAULT_DEG.map(|a| a + 10.0);
        assert!(sigma5(Some(rotated)).is_ok());
    }

    #[test]
    fn positive_spanning_examples() {
        let d = |a: f64| {
            let t = a.to_radians();
            QVec2::from_f64(t.cos(), t.sin()).unwrap()
        };
        assert!(positively_spans(&d(0.0), &d(108.0), &d(216.0)).unwrap());
        assert!(!positively_spans(&d(0.0), &d(30.0), &d(60.0)).unwrap());
        assert!(positively_spans(&d(0.0), &d(120.0), &d(240.0)).unwrap());
        let e = QVec2::from_ints(1, 0);
        let w = QVec2::from_ints(-1, 0);
        assert_eq!(positively_spans(&e, &w, &QVec2::from_ints(2, 0)), Err(PatternError::DegenerateInput));
        assert!(!positively_spans(&e, &w, &QVec2::from_ints(0, 1)).unwrap());
    }

    #[test]
    fn sigma5_spanning_triples() {
        let p = sigma5(None).unwrap();
        let t: Vec<[usize; 3]> = spanning_triples(&p).iter().map(Triple::one_based).collect();
        assert_eq!(t, vec![[1, 2, 3], [1, 3, 5], [2, 3, 4], [3, 4, 5]]);
        let two = HalfplanePattern::from_angles_deg(&[0.0, 90.0]).unwrap();
        assert!(spanning_triples(&two).is_empty());
        let tri = HalfplanePattern::from_angles_deg(&[0.0, 120.0, 240.0]).unwrap();
        assert_eq!(spanning_triples(&tri), vec![Triple([0, 1, 2])]);
    }

    #[test]
    fn sigma5_arcs() {
        let p = sigma5(None).unwrap();
        let a = triple_arc(&p, Triple([0, 1, 2])).unwrap();
        assert!(close(a.start_deg(), 126.0) && close(a.end_deg(), 270.0));
        let a = triple_arc(&p, Triple([2, 3, 4])).unwrap();
        assert!(close(a.start_deg(), 342.0) && close(a.end_deg(), 126.0));
        assert_eq!(triple_arc(&p, Triple([0, 1, 3])), Err(PatternError::NotSpanningTriple(1, 2, 4)));
        assert!(triple_arc(&p, Triple([2, 1, 0])).is_err());
    }

    #[test]
    fn antipodal_enter_exit_gives_half_circle() {
        let n = QVec2::from_ints(1, 0);
        let a = arc_between(&n, &n.neg()).unwrap();
        assert!(close(a.start_deg(), 90.0) && close(a.end_deg(), 270.0));
        assert!(a.contains(&QVec2::from_ints(-1, 0)));
        assert!(!a.contains(&QVec2::from_ints(0, 1)));
        assert!(arc_between(&n, &n).is_none());
    }

    #[test]
    fn sigma5_pins() {
        let p = sigma5(None).unwrap();
        let v = is_pinning_pattern(&p);
        assert!(v.is_pinning);
        assert!(check_verdict(&p, &v));
        match &v.witness {
            PatternWitness::Cover { arcs } => assert_eq!(arcs.len(), 4),
            _ => panic!("expected a cover"),
        }
    }

    #[test]
    fn tripod_does_not_pin() {
        let p = HalfplanePattern::from_angles_deg(&[0.0, 120.0, 240.0]).unwrap();
        let v = is_pinning_pattern(&p);
        assert!(!v.is_pinning);
        assert!(check_verdict(&p, &v));
        let PatternWitness::Uncovered { direction } = &v.witness else { panic!() };
        let a = direction.angle_deg();
        assert!(!(a > 150.0 && a < 270.0), "witness {a} lies in the covered arc");
        assert!(counterexample_along(&p, direction, 10_000, 1).is_some());
        assert!(sample_counterexample(&p, 10_000, 3).is_some());
    }

    #[test]
    fn small_patterns_never_pin() {
        for a in [vec![0.0], vec![0.0, 100.0]] {
            let p = HalfplanePattern::from_angles_deg(&a).unwrap();
            assert!(!is_pinning_pattern(&p).is_pinning);
            assert!(sample_counterexample(&p, 1, 0).is_some() || sample_counterexample(&p, 100, 0).is_some());
        }
    }

    #[test]
    fn rejects_shared_boundaries() {
        assert_eq!(
            HalfplanePattern::new(vec![QVec2::from_ints(1, 0), QVec2::from_ints(-2, 0)]),
            Err(PatternError::SharedBoundary(0, 1))
        );
        assert_eq!(
            HalfplanePattern::new(vec![QVec2::from_ints(1, 2), QVec2::from_ints(2, 4)]),
            Err(PatternError::SharedBoundary(0, 1))
        );
        assert_eq!(HalfplanePattern::new(vec![]), Err(PatternError::Empty));
        assert_eq!(HalfplanePattern::new(vec![QVec2::from_ints(0, 0)]), Err(PatternError::ZeroNormal(0)));
    }

    #[test]
    fn crossing_examples() {
        let g = PlanarLine { p0: [1.0, 0.0], u: [-1.0, 0.0] };
        assert_eq!(crossing_time([1.0, 0.0], &g), Crossing::Enter(1.0));
        let g = PlanarLine { p0: [-1.0, 0.0], u: [1.0, 0.0] };
        assert_eq!(crossing_time([1.0, 0.0], &g), Crossing::Exit(1.0));
        let g = PlanarLine { p0: [0.0, -1.0], u: [1.0, 0.0] };
        assert_eq!(crossing_time([0.0, 1.0], &g), Crossing::Never);
    }

    #[test]
    fn sigma5_sampling_finds_nothing() {
        let p = sigma5(None).unwrap();
        assert!(sample_counterexample(&p, 100_000, 7).is_none());
    }

    #[test]
    fn sigma5_is_minimal() {
        assert!(is_minimal_pinning(&sigma5(None).unwrap()));
    }
}
