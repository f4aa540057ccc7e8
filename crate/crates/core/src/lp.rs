//! Exact dense simplex for homogeneous strict feasibility.
//!
//! Solves
//!
//! ```text
//! maximize s  subject to  <a_i, x> + s <= 0  (i = 1..m),  -1 <= x_j <= 1,  s >= 0
//! ```
//!
//! over the rationals. The optimum `s*` equals `min ||sum y_i a_i||_1` over
//! the probability simplex, so `s* = 0` exactly when some convex combination
//! of the rows vanishes (Gordan's alternative), and the dual values give that
//! combination.

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

#[derive(Debug, Clone)]
pub struct SlackSolution {
    /// Optimal uniform slack `s*`.
    pub slack: BigRational,
    /// Primal point `x` achieving `s*`.
    pub x: Vec<BigRational>,
    /// Dual multipliers of the `m` row constraints; nonnegative, summing to at least 1.
    pub duals: Vec<BigRational>,
    pub pivots: usize,
}

struct Dictionary {
    // basic_r = b_r - sum_k a[r][k] * nonbasic_k
    a: Vec<Vec<BigRational>>,
    b: Vec<BigRational>,
    // z = z0 + sum_k c[k] * nonbasic_k
    c: Vec<BigRational>,
    z0: BigRational,
    basis: Vec<usize>,
    nonbasic: Vec<usize>,
}

impl Dictionary {
    fn pivot(&mut self, r: usize, k: usize) {
        let piv = self.a[r][k].clone();
        let inv = BigRational::one() / &piv;
        let cols = self.nonbasic.len();
        // solve row r for the entering variable
        for j in 0..cols {
            if j == k {
                self.a[r][j] = inv.clone();
            } else if !self.a[r][j].is_zero() {
                self.a[r][j] = &self.a[r][j] * &inv;
            }
        }
        self.b[r] = &self.b[r] * &inv;
        let row_r = self.a[r].clone();
        let b_r = self.b[r].clone();
        for i in 0..self.a.len() {
            if i == r || self.a[i][k].is_zero() {
                continue;
            }
            let f = self.a[i][k].clone();
            for j in 0..cols {
                if j == k {
                    self.a[i][j] = -(&f * &row_r[k]);
                } else if !row_r[j].is_zero() {
                    self.a[i][j] = &self.a[i][j] - &f * &row_r[j];
                }
            }
            self.b[i] = &self.b[i] - &f * &b_r;
        }
        if !self.c[k].is_zero() {
            let f = self.c[k].clone();
            for j in 0..cols {
                if j == k {
                    self.c[j] = -(&f * &row_r[k]);
                } else if !row_r[j].is_zero() {
                    self.c[j] = &self.c[j] - &f * &row_r[j];
                }
            }
            self.z0 = &self.z0 + &f * &b_r;
        }
        std::mem::swap(&mut self.basis[r], &mut self.nonbasic[k]);
    }
}

/// Maximizes the uniform slack of the homogeneous system `rows · x < 0`.
///
/// Rows must be nonempty and share one length.
pub fn max_uniform_slack(rows: &[Vec<BigRational>]) -> SlackSolution {
    let m = rows.len();
    assert!(m > 0, "empty system");
    let n = rows[0].len();
    // variables: xp_0..xp_{n-1}, xm_0..xm_{n-1}, s, then slacks of m + 2n rows
    let nstruct = 2 * n + 1;
    let s_var = 2 * n;
    let nrows = m + 2 * n;
    let zero = BigRational::zero();
    let one = BigRational::one();

    let mut a = Vec::with_capacity(nrows);
    let mut b = Vec::with_capacity(nrows);
    for row in rows {
        let mut r = Vec::with_capacity(nstruct);
        r.extend(row.iter().cloned());
        r.extend(row.iter().map(|v| -v));
        r.push(one.clone());
        a.push(r);
        b.push(zero.clone());
    }
    for j in 0..2 * n {
        let mut r = vec![zero.clone(); nstruct];
        r[j] = one.clone();
        a.push(r);
        b.push(one.clone());
    }
    let mut c = vec![zero.clone(); nstruct];
    c[s_var] = one.clone();
    let mut dict = Dictionary {
        a,
        b,
        c,
        z0: zero.clone(),
        basis: (nstruct..nstruct + nrows).collect(),
        nonbasic: (0..nstruct).collect(),
    };

    let mut pivots = 0;
    loop {
        // Bland: smallest-index improving variable
        let entering = (0..nstruct)
            .filter(|&k| dict.c[k].is_positive())
            .min_by_key(|&k| dict.nonbasic[k]);
        let Some(k) = entering else { break };
        let mut leave: Option<(usize, BigRational)> = None;
        for r in 0..nrows {
            if !dict.a[r][k].is_positive() {
                continue;
            }
            let ratio = &dict.b[r] / &dict.a[r][k];
            let better = match &leave {
                None => true,
                Some((lr, best)) => {
                    ratio < *best || (ratio == *best && dict.basis[r] < dict.basis[*lr])
                }
            };
            if better {
                leave = Some((r, ratio));
            }
        }
        // the box bounds keep the program bounded
        let (r, _) = leave.expect("bounded program");
        dict.pivot(r, k);
        pivots += 1;
    }

    let mut values = vec![zero.clone(); nstruct];
    for (r, &v) in dict.basis.iter().enumerate() {
        if v < nstruct {
            values[v] = dict.b[r].clone();
        }
    }
    let x: Vec<BigRational> = (0..n).map(|j| &values[j] - &values[n + j]).collect();
    let mut duals = vec![zero.clone(); m];
    for (k, &v) in dict.nonbasic.iter().enumerate() {
        if v >= nstruct && v - nstruct < m {
            duals[v - nstruct] = -dict.c[k].clone();
        }
    }
    SlackSolution { slack: dict.z0, x, duals, pivots }
}
