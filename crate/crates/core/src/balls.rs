//! Balls tangent to the pinned line and their planar and screen shadows.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{embed_in_flat, norm, sub, Flat3, TOL};
use crate::linespace::{Screen, ScreenFamily};
use crate::pattern2d::{HalfplanePattern, PatternError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BallsError {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("dimension must be at least 2, got {0}")]
    BadDimension(usize),
    #[error("ball {index} has a center of length {got}, expected {expected}")]
    DimensionMismatch { index: usize, expected: usize, got: usize },
    #[error("operation needs d = {expected}, got {got}")]
    WrongDimension { expected: usize, got: usize },
    #[error("radius must be positive and finite")]
    NonPositiveRadius,
    #[error("height spacing {gap} must exceed twice the radius {radius}")]
    GapTooSmall { gap: f64, radius: f64 },
    #[error("ball is not tangent to the axis (distance {distance}, radius {radius})")]
    NotTangent { distance: f64, radius: f64 },
    #[error("shrink factor {0} is outside [0, 1)")]
    ShrinkFactorOutOfRange(f64),
    #[error("radius reduction must be positive, got {0}")]
    NonPositiveDelta(f64),
    #[error("radius reduction {delta} must be smaller than the smallest radius {min_radius}")]
    DeltaTooLarge { delta: f64, min_radius: f64 },
    #[error(transparent)]
    Pattern(#[from] PatternError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Ball {
    pub center: Vec<f64>,
    pub radius: f64,
}

impl Ball {
    pub fn new(center: Vec<f64>, radius: f64) -> Result<Self, BallsError> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(BallsError::NonPositiveRadius);
        }
        Ok(Self { center, radius })
    }

    /// Height at which the ball touches (or is closest to) the axis.
    pub fn height(&self) -> f64 {
        *self.center.last().expect("nonempty center")
    }

    /// Center coordinates orthogonal to the axis.
    pub fn offset(&self) -> &[f64] {
        &self.center[..self.center.len() - 1]
    }

    pub fn axis_distance(&self) -> f64 {
        norm(self.offset())
    }

    pub fn is_tangent(&self) -> bool {
        (self.axis_distance() - self.radius).abs() <= TOL * self.radius
    }
}

/// Balls listed in the order in which the axis meets them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BallConfig {
    pub d: usize,
    pub balls: Vec<Ball>,
}

impl BallConfig {
    pub fn new(d: usize, balls: Vec<Ball>) -> Result<Self, BallsError> {
        if d < 2 {
            return Err(BallsError::BadDimension(d));
        }
        for (index, b) in balls.iter().enumerate() {
            if b.center.len() != d {
                return Err(BallsError::DimensionMismatch { index, expected: d, got: b.center.len() });
            }
            if !(b.radius > 0.0 && b.radius.is_finite()) {
                return Err(BallsError::NonPositiveRadius);
            }
        }
        Ok(Self { d, balls })
    }

    pub fn len(&self) -> usize {
        self.balls.len()
    }

    pub fn is_empty(&self) -> bool {
        self.balls.is_empty()
    }

    pub fn subfamily(&self, idx: &[usize]) -> Self {
        Self { d: self.d, balls: idx.iter().map(|&i| self.balls[i].clone()).collect() }
    }

    fn require_valid(&self) -> Result<(), BallsError> {
        let rep = validate(self);
        if rep.all_pass {
            Ok(())
        } else {
            Err(BallsError::InvalidConfig(rep.summary()))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TangencyCheck {
    pub index: usize,
    pub axis_distance: f64,
    pub radius: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OrderCheck {
    pub index: usize,
    /// Height increase from the previous ball.
    pub rise: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DisjointCheck {
    pub i: usize,
    pub j: usize,
    /// `|c_i - c_j| - (r_i + r_j)`; positive when disjoint.
    pub margin: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub tangency: Vec<TangencyCheck>,
    pub ordering: Vec<OrderCheck>,
    pub disjointness: Vec<DisjointCheck>,
    pub all_pass: bool,
}

impl ValidationReport {
    pub fn tangency_ok(&self) -> bool {
        self.tangency.iter().all(|c| c.pass)
    }

    pub fn ordering_ok(&self) -> bool {
        self.ordering.iter().all(|c| c.pass)
    }

    pub fn disjointness_ok(&self) -> bool {
        self.disjointness.iter().all(|c| c.pass)
    }

    pub fn summary(&self) -> String {
        let mut parts = Vec::new();
        if let Some(c) = self.tangency.iter().find(|c| !c.pass) {
            parts.push(format!("ball {} not tangent (distance {}, radius {})", c.index, c.axis_distance, c.radius));
        }
        if let Some(c) = self.ordering.iter().find(|c| !c.pass) {
            parts.push(format!("ball {} not above its predecessor", c.index));
        }
        if let Some(c) = self.disjointness.iter().find(|c| !c.pass) {
            parts.push(format!("balls {} and {} overlap (margin {})", c.i, c.j, c.margin));
        }
        if parts.is_empty() {
            "ok".to_string()
        } else {
            parts.join("; ")
        }
    }
}

/// Itemized tangency, ordering and disjointness checks.
pub fn validate(c: &BallConfig) -> ValidationReport {
    let tangency: Vec<TangencyCheck> = c
        .balls
        .iter()
        .enumerate()
        .map(|(index, b)| TangencyCheck {
            index,
            axis_distance: b.axis_distance(),
            radius: b.radius,
            pass: b.is_tangent(),
        })
        .collect();
    let ordering: Vec<OrderCheck> = c
        .balls
        .windows(2)
        .enumerate()
        .map(|(k, w)| {
            let rise = w[1].height() - w[0].height();
            OrderCheck { index: k + 1, rise, pass: rise > 0.0 }
        })
        .collect();
    let mut disjointness = Vec::new();
    for i in 0..c.len() {
        for j in i + 1..c.len() {
            let (a, b) = (&c.balls[i], &c.balls[j]);
            let margin = norm(&sub(&a.center, &b.center)) - (a.radius + b.radius);
            disjointness.push(DisjointCheck { i, j, margin, pass: margin > 0.0 });
        }
    }
    let all_pass = tangency.iter().all(|t| t.pass)
        && ordering.iter().all(|o| o.pass)
        && disjointness.iter().all(|x| x.pass);
    ValidationReport { tangency, ordering, disjointness, all_pass }
}

/// Halfplanes containing the shadows of the balls on the plane orthogonal to the axis (d = 3).
pub fn project_to_pattern(c: &BallConfig) -> Result<HalfplanePattern, BallsError> {
    if c.d != 3 {
        return Err(BallsError::WrongDimension { expected: 3, got: c.d });
    }
    c.require_valid()?;
    let normals: Vec<[f64; 2]> = c
        .balls
        .iter()
        .map(|b| {
            let p = b.offset();
            let r = norm(p);
            [-p[0] / r, -p[1] / r]
        })
        .collect();
    Ok(HalfplanePattern::from_f64(&normals)?)
}

/// The screen of a tangent ball: its tangent half-hyperplane at the touching point.
pub fn screen_of(b: &Ball) -> Screen {
    let n: Vec<f64> = b.offset().iter().map(|x| -x).collect();
    Screen::new(b.height(), &n).expect("tangent ball has a nonzero offset")
}

pub fn screens_of(c: &BallConfig) -> Result<ScreenFamily, BallsError> {
    c.require_valid()?;
    Ok(ScreenFamily { d: c.d, screens: c.balls.iter().map(screen_of).collect() })
}

/// Congruent balls tangent to the axis whose shadows realize the pattern.
///
/// Ball `i` (1-based) touches at height `i * gap`; `flat` defaults to the
/// canonical 3-flat of ℝ³.
pub fn lift_pattern(
    p: &HalfplanePattern,
    radius: f64,
    gap: f64,
    flat: Option<&Flat3>,
) -> Result<BallConfig, BallsError> {
    lift_pattern_at(p, radius, gap, flat, 0.0)
}

pub(crate) fn lift_pattern_at(
    p: &HalfplanePattern,
    radius: f64,
    gap: f64,
    flat: Option<&Flat3>,
    base_height: f64,
) -> Result<BallConfig, BallsError> {
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(BallsError::NonPositiveRadius);
    }
    if !(gap > 2.0 * radius) {
        return Err(BallsError::GapTooSmall { gap, radius });
    }
    let canonical;
    let t = match flat {
        Some(t) => t,
        None => {
            canonical = Flat3::canonical(3);
            &canonical
        }
    };
    let balls = p
        .unit_normals()
        .iter()
        .enumerate()
        .map(|(i, n)| {
            let h = base_height + (i + 1) as f64 * gap;
            Ball { center: embed_in_flat(t, [-radius * n[0], -radius * n[1], h]), radius }
        })
        .collect();
    BallConfig::new(t.ambient_dim(), balls)
}

/// Moves the center a fraction `s` of the way to the touching point, keeping tangency.
pub fn shrink_toward_touchpoint(b: &Ball, s: f64) -> Result<Ball, BallsError> {
    if !b.is_tangent() {
        return Err(BallsError::NotTangent { distance: b.axis_distance(), radius: b.radius });
    }
    if !(0.0..1.0).contains(&s) {
        return Err(BallsError::ShrinkFactorOutOfRange(s));
    }
    let h = b.height();
    let mut center: Vec<f64> = b.offset().iter().map(|x| (1.0 - s) * x).collect();
    center.push(h);
    Ok(Ball { center, radius: (1.0 - s) * b.radius })
}

/// Reduces every radius by `delta`, centers fixed; the axis then misses every ball.
pub fn shrink_radii(c: &BallConfig, delta: f64) -> Result<BallConfig, BallsError> {
    if !(delta > 0.0) {
        return Err(BallsError::NonPositiveDelta(delta));
    }
    let min_radius = c.balls.iter().map(|b| b.radius).fold(f64::INFINITY, f64::min);
    if delta >= min_radius {
        return Err(BallsError::DeltaTooLarge { delta, min_radius });
    }
    let balls = c.balls.iter().map(|b| Ball { center: b.center.clone(), radius: b.radius - delta }).collect();
    Ok(BallConfig { d: c.d, balls })
}

/// Tangent balls with the given radii whose screens are exactly `family`.
pub fn realize_screens(family: &ScreenFamily, radii: &[f64]) -> Result<BallConfig, BallsError> {
    let balls = family
        .screens
        .iter()
        .zip(radii)
        .map(|(s, &r)| {
            let mut center: Vec<f64> = s.n.iter().map(|x| -r * x).collect();
            center.push(s.lambda);
            Ball::new(center, r)
        })
        .collect::<Result<Vec<_>, _>>()?;
    BallConfig::new(family.d, balls)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linespace::{line_meets_screen, Meet};
    use crate::pattern2d::sigma5;
    use crate::geometry::LineChart;

    #[test]
    fn lifted_sigma5_is_valid() {
        let c = lift_pattern(&sigma5(None).unwrap(), 1.0, 3.0, None).unwrap();
        assert_eq!(c.len(), 5);
        let rep = validate(&c);
        assert!(rep.all_pass, "{}", rep.summary());
        let min_margin = rep.disjointness.iter().map(|x| x.margin).fold(f64::INFINITY, f64::min);
        assert!(min_margin >= 1.0 - 1e-12);
    }

    #[test]
    fn overlap_and_tangency_failures() {
        let a = Ball::new(vec![-1.0, 0.0, 0.0], 1.0).unwrap();
        let b = Ball::new(vec![-1.0, 0.0, 1.5], 1.0).unwrap();
        let rep = validate(&BallConfig::new(3, vec![a.clone(), b]).unwrap());
        assert!(!rep.disjointness_ok());
        assert!((rep.disjointness[0].margin + 0.5).abs() < 1e-12);
        let on_axis = Ball::new(vec![0.0, 0.0, 5.0], 1.0).unwrap();
        let rep = validate(&BallConfig::new(3, vec![a, on_axis]).unwrap());
        assert!(!rep.tangency_ok());
    }

    #[test]
    fn projection_of_single_ball() {
        let c = BallConfig::new(3, vec![Ball::new(vec![-2.0, 0.0, 1.0], 2.0).unwrap()]).unwrap();
        let p = project_to_pattern(&c).unwrap();
        assert_eq!(p.unit_normals(), vec![[1.0, 0.0]]);
    }

    #[test]
    fn antipodal_balls_give_shared_boundary() {
        let c = BallConfig::new(
            3,
            vec![Ball::new(vec![1.0, 0.0, 0.0], 1.0).unwrap(), Ball::new(vec![-1.0, 0.0, 3.0], 1.0).unwrap()],
        )
        .unwrap();
        assert!(matches!(project_to_pattern(&c), Err(BallsError::Pattern(PatternError::SharedBoundary(0, 1)))));
    }

    #[test]
    fn screens_follow_balls() {
        let p = sigma5(None).unwrap();
        let c = lift_pattern(&p, 1.0, 3.0, None).unwrap();
        let f = screens_of(&c).unwrap();
        for (i, (s, n)) in f.screens.iter().zip(p.unit_normals()).enumerate() {
            assert_eq!(s.lambda, 3.0 * (i + 1) as f64);
            assert!((s.n[0] - n[0]).abs() < 1e-15 && (s.n[1] - n[1]).abs() < 1e-15);
            assert_eq!(line_meets_screen(&LineChart::axis(3), s), Meet::Boundary);
        }
    }

    #[test]
    fn gap_must_exceed_diameter() {
        let p = sigma5(None).unwrap();
        assert_eq!(lift_pattern(&p, 1.0, 2.0, None), Err(BallsError::GapTooSmall { gap: 2.0, radius: 1.0 }));
    }

    #[test]
    fn shrink_toward_touchpoint_example() {
        let b = Ball::new(vec![-2.0, 0.0, 0.0], 2.0).unwrap();
        let s = shrink_toward_touchpoint(&b, 0.5).unwrap();
        assert_eq!(s, Ball { center: vec![-1.0, 0.0, 0.0], radius: 1.0 });
        assert!(s.is_tangent());
        assert_eq!(shrink_toward_touchpoint(&b, 0.0).unwrap(), b);
        assert_eq!(screen_of(&s), screen_of(&b));
        let off = Ball::new(vec![-3.0, 0.0, 0.0], 2.0).unwrap();
        assert!(matches!(shrink_toward_touchpoint(&off, 0.5), Err(BallsError::NotTangent { .. })));
    }

    #[test]
    fn shrink_radii_breaks_tangency_only() {
        let c = lift_pattern(&sigma5(None).unwrap(), 1.0, 3.0, None).unwrap();
        assert_eq!(shrink_radii(&c, 0.0), Err(BallsError::NonPositiveDelta(0.0)));
        assert!(matches!(shrink_radii(&c, 1.0), Err(BallsError::DeltaTooLarge { .. })));
        let s = shrink_radii(&c, 1e-4).unwrap();
        for b in &s.balls {
            assert!((b.axis_distance() - b.radius - 1e-4).abs() < 1e-12);
        }
        let rep = validate(&s);
        assert!(!rep.tangency_ok() && rep.disjointness_ok());
    }
}
