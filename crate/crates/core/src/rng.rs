//! Seeded, counter-based randomness.
//!
//! Sampling uses one ChaCha8 stream per shot: the generator is seeded with
//! the run seed and its stream id is set to the shot index. Shots can then
//! be drawn in any order, or split across threads, without changing the
//! result.

use alloc::vec::Vec;

use num_complex::Complex64;
use num_traits::Float;
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::matrix::{Mat, UnitaryMatrix};

/// The per-shot stream rule: seed selects the run, stream selects the shot.
pub fn shot_rng(seed: u64, shot: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(shot);
    rng
}

/// A generator for non-shot randomness (test fixtures, random unitaries).
pub fn fixture_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform in [0, 1) with 53 bits.
pub fn uniform(rng: &mut impl RngCore) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Standard normal via Box-Muller.
pub fn standard_normal(rng: &mut impl RngCore) -> f64 {
    let u1 = loop {
        let u = uniform(rng);
        if u > 0.0 {
            break u;
        }
    };
    let u2 = uniform(rng);
    (-2.0 * u1.ln()).sqrt() * (core::f64::consts::TAU * u2).cos()
}

fn complex_normal(rng: &mut impl RngCore) -> Complex64 {
    Complex64::new(standard_normal(rng), standard_normal(rng))
}

/// A Haar-ish random unitary: a complex Gaussian matrix orthonormalized
/// column by column (modified Gram-Schmidt).
pub fn random_unitary(dim: usize, rng: &mut impl RngCore) -> UnitaryMatrix {
    loop {
        let mut cols: Vec<Vec<Complex64>> = (0..dim)
            .map(|_| (0..dim).map(|_| complex_normal(rng)).collect())
            .collect();
        let mut ok = true;
        for j in 0..dim {
            for k in 0..j {
                let proj: Complex64 = (0..dim).map(|i| cols[k][i].conj() * cols[j][i]).sum();
                for i in 0..dim {
                    let sub = proj * cols[k][i];
                    cols[j][i] -= sub;
                }
            }
            let norm: f64 = cols[j].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if norm < 1e-8 {
                ok = false;
                break;
            }
            for i in 0..dim {
                cols[j][i] /= norm;
            }
        }
        if !ok {
            continue;
        }
        let mut mat = Mat::zeros(dim, dim);
        for j in 0..dim {
            for i in 0..dim {
                mat[(i, j)] = cols[j][i];
            }
        }
        return UnitaryMatrix::new_unchecked(mat);
    }
}

/// A uniformly random unit vector in C^d.
pub fn random_unit_vector(dim: usize, rng: &mut impl RngCore) -> Vec<Complex64> {
    loop {
        let v: Vec<Complex64> = (0..dim).map(|_| complex_normal(rng)).collect();
        let norm: f64 = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-8 {
            return v.into_iter().map(|z| z / norm).collect();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shot_streams_are_independent_and_reproducible() {
        let a1 = uniform(&mut shot_rng(42, 0));
        let a2 = uniform(&mut shot_rng(42, 0));
        let b = uniform(&mut shot_rng(42, 1));
        assert_eq!(a1, a2);
        assert_ne!(a1, b);
    }

    #[test]
    fn uniform_stays_in_range() {
        let mut rng = fixture_rng(7);
        for _ in 0..1000 {
            let u = uniform(&mut rng);
            assert!((0.0..1.0).contains(&u));
        }
    }

    #[test]
    fn random_unitary_is_unitary() {
        let mut rng = fixture_rng(3);
        for dim in 1..=5 {
            let u = random_unitary(dim, &mut rng);
            assert!(u.mat().unitarity_defect() < 1e-12, "dim {dim}");
        }
    }

    #[test]
    fn random_unit_vector_is_normalized() {
        let mut rng = fixture_rng(5);
        let v = random_unit_vector(4, &mut rng);
        let norm: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        assert!((norm - 1.0).abs() < 1e-12);
    }
}
