//! Floating-point primitives shared by the ball and line-space code.
//!
//! The pinned line `ℓ` is always the last coordinate axis of ℝ^d. Lines that
//! are not orthogonal to it are stored in a two-anchor chart: the line through
//! `(u0, 0)` and `(u1, 1)`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Global tolerance for all floating-point decisions.
pub const TOL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("direction vector must be nonzero")]
    ZeroDirection,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("flat basis must be two orthonormal vectors in dimension >= 2 (d >= 3)")]
    InvalidFlat,
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub(crate) fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// A nonzero direction in ℝ^k.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct DirectionVec(Vec<f64>);

impl DirectionVec {
    pub fn new(coords: Vec<f64>) -> Result<Self, GeometryError> {
        if coords.is_empty() || coords.iter().all(|c| *c == 0.0) || coords.iter().any(|c| !c.is_finite()) {
            return Err(GeometryError::ZeroDirection);
        }
        Ok(Self(coords))
    }

    /// Unit vector pointing the same way.
    pub fn unit(coords: &[f64]) -> Result<Self, GeometryError> {
        let n = norm(coords);
        if n == 0.0 || !n.is_finite() {
            return Err(GeometryError::ZeroDirection);
        }
        Ok(Self(coords.iter().map(|c| c / n).collect()))
    }

    pub fn from_angle(theta: f64) -> Self {
        Self(vec![theta.cos(), theta.sin()])
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn norm(&self) -> f64 {
        norm(&self.0)
    }

    pub fn normalized(&self) -> Self {
        let n = self.norm();
        Self(self.0.iter().map(|c| c / n).collect())
    }
}

impl TryFrom<Vec<f64>> for DirectionVec {
    type Error = GeometryError;
    fn try_from(v: Vec<f64>) -> Result<Self, Self::Error> {
        Self::new(v)
    }
}

impl From<DirectionVec> for Vec<f64> {
    fn from(d: DirectionVec) -> Self {
        d.0
    }
}

/// A line not orthogonal to `ℓ`, as the pair of its traces on `x_d = 0` and `x_d = 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LineChart {
    pub u0: Vec<f64>,
    pub u1: Vec<f64>,
}

impl LineChart {
    pub fn new(u0: Vec<f64>, u1: Vec<f64>) -> Result<Self, GeometryError> {
        if u0.len() != u1.len() {
            return Err(GeometryError::DimensionMismatch { expected: u0.len(), got: u1.len() });
        }
        Ok(Self { u0, u1 })
    }

    /// The pinned line itself, in ℝ^d.
    pub fn axis(d: usize) -> Self {
        Self { u0: vec![0.0; d - 1], u1: vec![0.0; d - 1] }
    }

    /// Builds the chart point from the flat vector `(u0, u1)` of length `2d - 2`.
    pub fn from_flat(v: &[f64]) -> Self {
        let h = v.len() / 2;
        Self { u0: v[..h].to_vec(), u1: v[h..].to_vec() }
    }

    pub fn to_flat(&self) -> Vec<f64> {
        let mut v = self.u0.clone();
        v.extend_from_slice(&self.u1);
        v
    }

    /// Ambient dimension d.
    pub fn ambient_dim(&self) -> usize {
        self.u0.len() + 1
    }

    /// Point of the line at height `h` along `ℓ`, without the last coordinate.
    pub fn trace(&self, h: f64) -> Vec<f64> {
        self.u0.iter().zip(&self.u1).map(|(a, b)| (1.0 - h) * a + h * b).collect()
    }

    /// Euclidean norm of the chart point; zero exactly for `ℓ`.
    pub fn chart_norm(&self) -> f64 {
        (dot(&self.u0, &self.u0) + dot(&self.u1, &self.u1)).sqrt()
    }

    /// The same line with the anchor planes `x_d = 0` and `x_d = 1` swapped.
    pub fn swapped(&self) -> Self {
        Self { u0: self.u1.clone(), u1: self.u0.clone() }
    }
}

/// Distance from the line `g` to the point `p ∈ ℝ^d`.
pub fn line_point_distance(g: &LineChart, p: &[f64]) -> f64 {
    let d = g.ambient_dim();
    debug_assert_eq!(p.len(), d);
    let z = p[d - 1];
    let w = sub(&p[..d - 1], &g.trace(z));
    let v = sub(&g.u1, &g.u0);
    let ww = dot(&w, &w);
    let wv = dot(&w, &v);
    let dist2 = ww - wv * wv / (1.0 + dot(&v, &v));
    dist2.max(0.0).sqrt()
}

/// A 3-flat containing `ℓ`: `span(w1, w2) ⊕ ℓ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Flat3 {
    w1: Vec<f64>,
    w2: Vec<f64>,
}

impl Flat3 {
    pub fn new(w1: Vec<f64>, w2: Vec<f64>) -> Result<Self, GeometryError> {
        if w1.len() != w2.len() || w1.len() < 2 {
            return Err(GeometryError::InvalidFlat);
        }
        let ok = (norm(&w1) - 1.0).abs() <= 1e3 * TOL
            && (norm(&w2) - 1.0).abs() <= 1e3 * TOL
            && dot(&w1, &w2).abs() <= 1e3 * TOL;
        if !ok {
            return Err(GeometryError::InvalidFlat);
        }
        Ok(Self { w1, w2 })
    }

    /// `span(e1, e2) ⊕ ℓ` in ℝ^d.
    pub fn canonical(d: usize) -> Self {
        assert!(d >= 3, "a 3-flat needs d >= 3");
        let mut w1 = vec![0.0; d - 1];
        let mut w2 = vec![0.0; d - 1];
        w1[0] = 1.0;
        w2[1] = 1.0;
        Self { w1, w2 }
    }

    /// Orthonormal basis of the plane orthogonal to `normal` in ℝ³ (d = 4).
    pub fn from_normal(normal: &[f64; 3]) -> Result<Self, GeometryError> {
        let m = DirectionVec::unit(normal)?;
        let m = m.coords();
        // least aligned basis axis
        let k = (0..3)
            .min_by(|&a, &b| m[a].abs().partial_cmp(&m[b].abs()).unwrap())
            .unwrap();
        let mut a = [0.0; 3];
        a[k] = 1.0;
        let c = dot(&a, m);
        let w1: Vec<f64> = (0..3).map(|i| a[i] - c * m[i]).collect();
        let w1 = DirectionVec::unit(&w1)?.0;
        let w2 = vec![
            m[1] * w1[2] - m[2] * w1[1],
            m[2] * w1[0] - m[0] * w1[2],
            m[0] * w1[1] - m[1] * w1[0],
        ];
        Self::new(w1, w2)
    }

    pub fn ambient_dim(&self) -> usize {
        self.w1.len() + 1
    }

    pub fn basis(&self) -> (&[f64], &[f64]) {
        (&self.w1, &self.w2)
    }
}

/// Maps `(x, y, z)` in the flat's own coordinates to ℝ^d; `z` is the height along `ℓ`.
pub fn embed_in_flat(t: &Flat3, q: [f64; 3]) -> Vec<f64> {
    let mut p: Vec<f64> = t.w1.iter().zip(&t.w2).map(|(a, b)| q[0] * a + q[1] * b).collect();
    p.push(q[2]);
    p
}
