//! Direction sets on the unit sphere and ball sampling.
//!
//! All sets are antipodally symmetric by construction: the second half of the
//! returned list is the negation of the first half. Quadrature weights are
//! uniform.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

const GOLDEN_ANGLE: f64 = 2.399963229728653; // pi * (3 - sqrt(5))

/// A deterministic, antipodally symmetric set of `>= count` unit vectors.
///
/// Dimension 1 returns `{+1, -1}`; 2 and 3 use deterministic spirals; higher
/// dimensions draw seeded Gaussian directions with antithetic pairing.
pub fn directions(dim: usize, count: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    assert!(dim >= 1);
    match dim {
        1 => vec![vec![1.0], vec![-1.0]],
        2 => {
            let half = (count / 2).max(4);
            let mut dirs = Vec::with_capacity(2 * half);
            for j in 0..half {
                // midpoint angles avoid landing exactly on the axes
                let phi = std::f64::consts::PI * (j as f64 + 0.5) / half as f64;
                dirs.push(vec![phi.cos(), phi.sin()]);
            }
            append_antipodes(&mut dirs);
            dirs
        }
        3 => {
            let half = (count / 2).max(8);
            let mut dirs = Vec::with_capacity(2 * half);
            for j in 0..half {
                let z = 1.0 - (2.0 * j as f64 + 1.0) / half as f64;
                let r = (1.0 - z * z).max(0.0).sqrt();
                let phi = GOLDEN_ANGLE * j as f64;
                dirs.push(vec![r * phi.cos(), r * phi.sin(), z]);
            }
            append_antipodes(&mut dirs);
            dirs
        }
        _ => {
            let half = (count / 2).max(8);
            let mut dirs = Vec::with_capacity(2 * half);
            while dirs.len() < half {
                if let Some(d) = gaussian_direction(dim, rng) {
                    dirs.push(d);
                }
            }
            append_antipodes(&mut dirs);
            dirs
        }
    }
}

fn append_antipodes(dirs: &mut Vec<Vec<f64>>) {
    let half: Vec<Vec<f64>> = dirs.iter().map(|d| d.iter().map(|x| -x).collect()).collect();
    dirs.extend(half);
}

fn gaussian_direction(dim: usize, rng: &mut ChaCha8Rng) -> Option<Vec<f64>> {
    let v: Vec<f64> = (0..dim).map(|_| standard_normal(rng)).collect();
    let n = crate::linalg::norm2(&v);
    if n < 1e-12 {
        return None;
    }
    Some(v.iter().map(|x| x / n).collect())
}

/// One standard normal via Box-Muller (deterministic for a fixed stream).
pub fn standard_normal(rng: &mut ChaCha8Rng) -> f64 {
    let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
    let u2: f64 = rng.gen::<f64>();
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

/// A uniform random direction.
pub fn random_direction(dim: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    loop {
        if let Some(d) = gaussian_direction(dim, rng) {
            return d;
        }
    }
}

/// A uniform point in the ball of radius `radius` around `center`.
pub fn ball_point(center: &[f64], radius: f64, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let dim = center.len();
    let dir = random_direction(dim, rng);
    let r = radius * rng.gen::<f64>().powf(1.0 / dim as f64);
    crate::linalg::axpy(center, r, &dir)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::norm2;
    use crate::rng::{rng_for, Salt};

    #[test]
    fn directions_are_unit_and_antipodal() {
        for dim in [1usize, 2, 3, 5] {
            let mut rng = rng_for(7, Salt::SphereAverage);
            let dirs = directions(dim, 64, &mut rng);
            assert_eq!(dirs.len() % 2, 0);
            let half = dirs.len() / 2;
            for (j, d) in dirs.iter().enumerate() {
                assert!((norm2(d) - 1.0).abs() < 1e-12, "non-unit direction");
                if j < half {
                    for (a, b) in d.iter().zip(&dirs[j + half]) {
                        assert_eq!(*a, -*b);
                    }
                }
            }
        }
    }

    #[test]
    fn second_moment_is_near_isotropic() {
        let mut rng = rng_for(3, Salt::SphereAverage);
        let dirs = directions(3, 4096, &mut rng);
        let m = dirs.len() as f64;
        for i in 0..3 {
            let s: f64 = dirs.iter().map(|d| d[i] * d[i]).sum::<f64>() / m;
            assert!((s - 1.0 / 3.0).abs() < 1e-2, "axis {i}: {s}");
        }
    }

    #[test]
    fn ball_points_stay_in_ball() {
        let mut rng = rng_for(1, Salt::Certificate);
        let c = [1.0, -2.0];
        for _ in 0..200 {
            let z = ball_point(&c, 3.0, &mut rng);
            assert!(crate::linalg::dist(&z, &c) <= 3.0 + 1e-12);
        }
    }
}
