//! Small numeric helpers: factorials, binomials, and exact-angle phases.

use core::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use num_traits::Float;

/// n! as a float. Exact for n ≤ 22; beyond that use [`ln_factorial`].
pub fn factorial(n: u32) -> f64 {
    (1..=n).fold(1.0, |acc, k| acc * k as f64)
}

/// ln(n!), stable for photon counts far beyond the f64 factorial range.
pub fn ln_factorial(n: u32) -> f64 {
    (1..=n).map(|k| (k as f64).ln()).sum()
}

/// Binomial coefficient as a float; zero outside 0 ≤ k ≤ n.
pub fn binomial(n: u32, k: i64) -> f64 {
    if k < 0 || k as u64 > n as u64 {
        return 0.0;
    }
    let k = (k as u32).min(n - k as u32);
    let mut acc = 1.0;
    for i in 0..k {
        acc = acc * (n - i) as f64 / (i + 1) as f64;
    }
    acc
}

/// e^{iφ}, snapped to exact lattice values at φ ∈ {0, ±π/2, ±π}.
///
/// Mirror and window configurations must come out as exact permutation
/// matrices, so phases assembled from the canonical angle constants cannot
/// be allowed to pick up `sin(π) ≈ 1.2e-16` dust.
pub fn cis(phi: f64) -> Complex64 {
    if phi == 0.0 {
        Complex64::new(1.0, 0.0)
    } else if phi == FRAC_PI_2 {
        Complex64::new(0.0, 1.0)
    } else if phi == -FRAC_PI_2 {
        Complex64::new(0.0, -1.0)
    } else if phi == PI || phi == -PI {
        Complex64::new(-1.0, 0.0)
    } else {
        Complex64::new(phi.cos(), phi.sin())
    }
}

/// cosθ with exact zeros at θ = ±π/2 (see [`cis`]).
pub fn cos_exact(theta: f64) -> f64 {
    if theta == FRAC_PI_2 || theta == -FRAC_PI_2 {
        0.0
    } else {
        theta.cos()
    }
}

/// sinθ with an exact zero at θ = ±π.
pub fn sin_exact(theta: f64) -> f64 {
    if theta == PI || theta == -PI {
        0.0
    } else {
        theta.sin()
    }
}

/// Integer power of a complex number by repeated squaring.
pub fn cpow(base: Complex64, mut exp: u32) -> Complex64 {
    let mut base = base;
    let mut acc = Complex64::new(1.0, 0.0);
    while exp > 0 {
        if exp & 1 == 1 {
            acc *= base;
        }
        base *= base;
        exp >>= 1;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn factorial_small_values() {
        assert_eq!(factorial(0), 1.0);
        assert_eq!(factorial(5), 120.0);
    }

    #[test]
    fn ln_factorial_matches_factorial() {
        for n in 0..20 {
            assert!((ln_factorial(n) - factorial(n).ln()).abs() < 1e-10);
        }
    }

    #[test]
    fn binomial_edges() {
        assert_eq!(binomial(5, -1), 0.0);
        assert_eq!(binomial(5, 6), 0.0);
        assert_eq!(binomial(5, 2), 10.0);
        assert_eq!(binomial(0, 0), 1.0);
    }

    #[test]
    fn cis_exact_lattice() {
        assert_eq!(cis(0.0), Complex64::new(1.0, 0.0));
        assert_eq!(cis(FRAC_PI_2), Complex64::new(0.0, 1.0));
        assert_eq!(cis(FRAC_PI_2 + FRAC_PI_2), Complex64::new(-1.0, 0.0));
        assert_eq!(cos_exact(FRAC_PI_2), 0.0);
    }

    #[test]
    fn cpow_matches_repeated_multiplication() {
        let z = Complex64::new(0.3, -0.7);
        let mut acc = Complex64::new(1.0, 0.0);
        for k in 0..8 {
            assert!((cpow(z, k) - acc).norm() < 1e-12);
            acc *= z;
        }
    }
}
