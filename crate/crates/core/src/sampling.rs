//! Low-discrepancy directions on spheres and nets of planes.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const PRIMES: [u64; 20] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71];

fn radical_inverse(mut i: u64, base: u64) -> f64 {
    let inv = 1.0 / base as f64;
    let mut f = inv;
    let mut r = 0.0;
    while i > 0 {
        r += f * (i % base) as f64;
        i /= base;
        f *= inv;
    }
    r
}

/// `count` unit vectors in ℝ^dim from a randomly shifted Halton sequence.
///
/// Pairs of Halton coordinates go through Box-Muller, so the directions are
/// quasi-uniform on the sphere. The shift is drawn from `seed`.
pub fn sphere_directions(dim: usize, count: usize, seed: u64) -> Vec<Vec<f64>> {
    assert!(dim >= 1 && dim <= PRIMES.len(), "unsupported dimension {dim}");
    let coords = dim + dim % 2;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let shift: Vec<f64> = (0..coords).map(|_| rng.gen::<f64>()).collect();
    let mut out = Vec::with_capacity(count);
    let mut k = 1u64;
    while out.len() < count {
        let u: Vec<f64> = (0..coords)
            .map(|j| (radical_inverse(k, PRIMES[j]) + shift[j]).fract())
            .collect();
        k += 1;
        let mut g = Vec::with_capacity(coords);
        for pair in u.chunks(2) {
            let r = (-2.0 * pair[0].max(f64::MIN_POSITIVE).ln()).sqrt();
            let t = std::f64::consts::TAU * pair[1];
            g.push(r * t.cos());
            g.push(r * t.sin());
        }
        g.truncate(dim);
        let n = g.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n > 1e-12 {
            out.push(g.into_iter().map(|x| x / n).collect());
        }
    }
    out
}

/// Quasi-uniform unit vectors on the upper hemisphere of S² (Fibonacci lattice),
/// one per point of the projective plane.
pub fn projective_plane_points(count: usize) -> Vec<[f64; 3]> {
    let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    (0..count)
        .map(|i| {
            let z = 1.0 - (i as f64 + 0.5) / count as f64;
            let r = (1.0 - z * z).max(0.0).sqrt();
            let t = golden * i as f64;
            [r * t.cos(), r * t.sin(), z]
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn halton_prefix() {
        assert_eq!(radical_inverse(1, 2), 0.5);
        assert_eq!(radical_inverse(2, 2), 0.25);
        assert!((radical_inverse(1, 3) - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn directions_are_unit_and_balanced() {
        let v = sphere_directions(4, 4096, 3);
        assert_eq!(v.len(), 4096);
        let mut mean = [0.0; 4];
        for d in &v {
            let n: f64 = d.iter().map(|x| x * x).sum();
            assert!((n - 1.0).abs() < 1e-12);
            for j in 0..4 {
                mean[j] += d[j] / 4096.0;
            }
        }
        assert!(mean.iter().all(|m| m.abs() < 0.05), "{mean:?}");
        assert_eq!(v, sphere_directions(4, 4096, 3));
        assert_ne!(v, sphere_directions(4, 4096, 4));
    }

    #[test]
    fn hemisphere_points() {
        let p = projective_plane_points(13);
        assert_eq!(p.len(), 13);
        assert!(p.iter().all(|q| q[2] > 0.0 && ((q[0] * q[0] + q[1] * q[1] + q[2] * q[2]) - 1.0).abs() < 1e-12));
    }
}
