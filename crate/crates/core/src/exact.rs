//! Exact rational vectors in the plane and the sign predicates built on them.
//!
//! Every `f64` is a dyadic rational, so conversion is lossless; all planar
//! decisions (parallelism, positive spanning, angular order) are made on
//! exact values and never compared against a tolerance.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ParseRationalError {
    #[error("cannot parse `{0}` as a rational number")]
    Invalid(String),
    #[error("non-finite value")]
    NonFinite,
}

/// Exact conversion of a finite `f64`.
pub fn rational_from_f64(x: f64) -> Result<BigRational, ParseRationalError> {
    BigRational::from_float(x).ok_or(ParseRationalError::NonFinite)
}

/// Parses `p/q`, decimals (`-0.125`, `1e-3`) and integers exactly.
pub fn parse_rational(s: &str) -> Result<BigRational, ParseRationalError> {
    let err = || ParseRationalError::Invalid(s.to_string());
    let s = s.trim();
    if let Some((p, q)) = s.split_once('/') {
        let p = BigInt::from_str(p.trim()).map_err(|_| err())?;
        let q = BigInt::from_str(q.trim()).map_err(|_| err())?;
        if q.is_zero() {
            return Err(err());
        }
        return Ok(BigRational::new(p, q));
    }
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().map_err(|_| err())?),
        None => (s, 0),
    };
    let (neg, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(err());
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return Err(err());
    }
    let all: String = format!("{int_part}{frac_part}");
    let mut num = BigInt::from_str(if all.is_empty() { "0" } else { &all }).map_err(|_| err())?;
    if neg {
        num = -num;
    }
    let shift = exp - frac_part.len() as i32;
    let ten = BigInt::from(10);
    let r = if shift >= 0 {
        BigRational::from_integer(num * num_traits::pow(ten, shift as usize))
    } else {
        BigRational::new(num, num_traits::pow(ten, (-shift) as usize))
    };
    Ok(r)
}

/// A vector of ℝ² with rational coordinates.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct QVec2 {
    pub x: BigRational,
    pub y: BigRational,
}

impl fmt::Debug for QVec2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

impl QVec2 {
    pub fn new(x: BigRational, y: BigRational) -> Self {
        Self { x, y }
    }

    pub fn from_f64(x: f64, y: f64) -> Result<Self, ParseRationalError> {
        Ok(Self { x: rational_from_f64(x)?, y: rational_from_f64(y)? })
    }

    pub fn from_ints(x: i64, y: i64) -> Self {
        Self { x: BigRational::from_integer(x.into()), y: BigRational::from_integer(y.into()) }
    }

    pub fn is_zero(&self) -> bool {
        self.x.is_zero() && self.y.is_zero()
    }

    pub fn neg(&self) -> Self {
        Self { x: -&self.x, y: -&self.y }
    }

    pub fn add(&self, o: &Self) -> Self {
        Self { x: &self.x + &o.x, y: &self.y + &o.y }
    }

    /// Rotation by +90°.
    pub fn rot_ccw(&self) -> Self {
        Self { x: -&self.y, y: self.x.clone() }
    }

    /// Rotation by −90°.
    pub fn rot_cw(&self) -> Self {
        Self { x: self.y.clone(), y: -&self.x }
    }

    pub fn dot(&self, o: &Self) -> BigRational {
        &self.x * &o.x + &self.y * &o.y
    }

    pub fn det(&self, o: &Self) -> BigRational {
        &self.x * &o.y - &self.y * &o.x
    }

    pub fn to_f64(&self) -> [f64; 2] {
        [self.x.to_f64().unwrap_or(f64::NAN), self.y.to_f64().unwrap_or(f64::NAN)]
    }

    /// Angle in degrees, `[0, 360)`. I/O only.
    pub fn angle_deg(&self) -> f64 {
        let [x, y] = self.to_f64();
        let a = y.atan2(x).to_degrees();
        if a < 0.0 {
            a + 360.0
        } else {
            a
        }
    }

    /// Same ray: parallel with positive orientation.
    pub fn same_direction(&self, o: &Self) -> bool {
        self.det(o).is_zero() && self.dot(o).is_positive()
    }

    pub fn parallel(&self, o: &Self) -> bool {
        self.det(o).is_zero()
    }
}

pub fn sign(r: &BigRational) -> Ordering {
    if r.is_positive() {
        Ordering::Greater
    } else if r.is_negative() {
        Ordering::Less
    } else {
        Ordering::Equal
    }
}

/// 0 when the counterclockwise angle from `reference` to `v` lies in `[0, π)`, 1 otherwise.
fn half(reference: &QVec2, v: &QVec2) -> u8 {
    let d = reference.det(v);
    if d.is_positive() || (d.is_zero() && reference.dot(v).is_positive()) {
        0
    } else {
        1
    }
}

/// Compares the counterclockwise angles from `reference` to `a` and to `b`, each in `[0, 2π)`.
pub fn ccw_cmp_from(reference: &QVec2, a: &QVec2, b: &QVec2) -> Ordering {
    let (ha, hb) = (half(reference, a), half(reference, b));
    if ha != hb {
        return ha.cmp(&hb);
    }
    // same half-turn: a comes first iff b is counterclockwise of a
    match sign(&a.det(b)) {
        Ordering::Greater => Ordering::Less,
        Ordering::Less => Ordering::Greater,
        Ordering::Equal => Ordering::Equal,
    }
}

/// Angular order measured from the positive x-axis.
pub fn angle_cmp(a: &QVec2, b: &QVec2) -> Ordering {
    ccw_cmp_from(&QVec2::from_ints(1, 0), a, b)
}

/// `u` lies strictly inside the counterclockwise open arc from `start` to `end`.
pub fn strictly_between(start: &QVec2, u: &QVec2, end: &QVec2) -> bool {
    if start.same_direction(u) {
        return false;
    }
    ccw_cmp_from(start, u, end) == Ordering::Less
}

/// A direction strictly inside the counterclockwise open arc from `p` to `q`.
pub fn interior_direction(p: &QVec2, q: &QVec2) -> QVec2 {
    let d = p.det(q);
    if d.is_positive() {
        p.add(q)
    } else if d.is_zero() {
        if p.dot(q).is_negative() {
            p.rot_ccw()
        } else {
            // the full turn minus a point
            p.neg()
        }
    } else {
        p.add(q).neg()
    }
}
