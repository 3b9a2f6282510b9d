//! Shared test oracles.

use fockrail_core::fock::{FockVector, Occupation};
use fockrail_core::matrix::UnitaryMatrix;
use num_complex::Complex64;

/// The defining expansion of the operator row ⟨n_in|B[U]: apply the
/// transformed creation operators Σ_L U_{ML} a_L to the vacuum, once per
/// input photon, and normalise by √(∏ n_M!).
///
/// This route uses only the ladder operators and single matrix entries, so
/// it is independent of the permanent evaluation it checks.
pub fn bracket_row(u: &UnitaryMatrix, n_in: &Occupation, truncation: u32) -> FockVector {
    let modes = u.dim();
    assert_eq!(n_in.modes(), modes);
    let mut state = FockVector::vacuum(modes, truncation);
    let mut norm = 1.0f64;
    for (mode, &count) in n_in.counts().iter().enumerate() {
        for _ in 0..count {
            let mut next = FockVector::zero(modes, truncation);
            for l in 0..modes {
                next = next.add(&state.create(l).scale(u.entry(mode, l)));
            }
            state = next;
        }
        norm *= factorial(count);
    }
    state.scale(Complex64::new(1.0 / norm.sqrt(), 0.0))
}

/// ⟨n_in|B[U]|n_out⟩ by the bracket expansion.
pub fn bracket_element(u: &UnitaryMatrix, n_in: &Occupation, n_out: &Occupation) -> Complex64 {
    bracket_row(u, n_in, n_in.total().max(n_out.total()))
        .amplitude(n_out)
}

fn factorial(n: u32) -> f64 {
    (1..=n).fold(1.0, |acc, k| acc * k as f64)
}
