//! The unitary operator generated by an N-matrix on the N-mode Fock space.
//!
//! A unitary matrix `U` fixes an operator `B[U]` through its commutation
//! with the creation operators, `a_M B[U] = B[U] Σ_L U_{ML} a_L`, normalised
//! so the vacuum maps to the vacuum. `B[U]` conserves total photon number,
//! and on the sector with `n` photons its matrix elements are permanents of
//! the n×n matrix obtained by repeating row `M` of `U` once per input photon
//! in mode `M` and column `L` once per output photon in mode `L`:
//!
//! ```text
//! ⟨n|B[U]|n'⟩ = perm(U[n, n']) / √(∏ n_M! · ∏ n'_L!)
//! ```
//!
//! States act as bras from the left throughout: applying `B[U]` to a state
//! with amplitudes `c(in)` produces `c'(out) = Σ_in c(in)·⟨in|B[U]|out⟩`,
//! so formulas transcribe without conjugation guesswork.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use num_complex::Complex64;
use num_traits::Float;

use crate::error::Error;
use crate::fock::{enumerate_sector, FockSector, FockVector, Occupation};
use crate::math::factorial;
use crate::matrix::{permanent, Mat, UnitaryMatrix};

/// Largest sector basis that [`sector_matrix`] will materialize.
pub const SECTOR_GUARD: u128 = 1_000_000;

/// ⟨n_in|B[U]|n_out⟩. Exactly zero across unequal photon totals.
pub fn matrix_element(
    u: &UnitaryMatrix,
    n_in: &Occupation,
    n_out: &Occupation,
) -> Result<Complex64, Error> {
    if n_in.modes() != u.dim() {
        return Err(Error::DimensionMismatch { expected: u.dim(), actual: n_in.modes() });
    }
    if n_out.modes() != u.dim() {
        return Err(Error::DimensionMismatch { expected: u.dim(), actual: n_out.modes() });
    }
    Ok(element_unchecked(u, n_in, n_out))
}

pub(crate) fn element_unchecked(
    u: &UnitaryMatrix,
    n_in: &Occupation,
    n_out: &Occupation,
) -> Complex64 {
    if n_in.total() != n_out.total() {
        return Complex64::new(0.0, 0.0);
    }
    let n = n_in.total() as usize;
    if n == 0 {
        return Complex64::new(1.0, 0.0);
    }
    let mut repeated = Mat::zeros(n, n);
    let rows = repeat_indices(n_in);
    let cols = repeat_indices(n_out);
    for (i, &r) in rows.iter().enumerate() {
        for (j, &c) in cols.iter().enumerate() {
            repeated[(i, j)] = u.entry(r, c);
        }
    }
    // Photon counts a permanent can handle keep this product far from
    // overflow, and small integer factorials divide out exactly.
    let mut norm = 1.0f64;
    for &k in n_in.counts() {
        norm *= factorial(k);
    }
    for &k in n_out.counts() {
        norm *= factorial(k);
    }
    permanent(&repeated) / norm.sqrt()
}

fn repeat_indices(occ: &Occupation) -> Vec<usize> {
    let mut out = Vec::with_capacity(occ.total() as usize);
    for (mode, &k) in occ.counts().iter().enumerate() {
        for _ in 0..k {
            out.push(mode);
        }
    }
    out
}

/// The matrix of `B[U]` on the fixed-photon-number sector, over the
/// canonical sector basis. Unitary within tolerance.
pub fn sector_matrix(u: &UnitaryMatrix, photons: u32) -> Result<(FockSector, Mat), Error> {
    let size = FockSector::size_of(u.dim(), photons);
    if size > SECTOR_GUARD {
        return Err(Error::SizeGuardExceeded { size, guard: SECTOR_GUARD });
    }
    let sector = enumerate_sector(u.dim(), photons);
    let mut mat = Mat::zeros(sector.len(), sector.len());
    for (i, n_in) in sector.basis().iter().enumerate() {
        for (j, n_out) in sector.basis().iter().enumerate() {
            mat[(i, j)] = element_unchecked(u, n_in, n_out);
        }
    }
    Ok((sector, mat))
}

/// Applies `B[U]` to a state, sector by sector. Photon number conservation
/// keeps every component inside the state's truncation, so the norm and the
/// per-sector weights are preserved. The input's truncation history carries
/// over to the result unchanged.
pub fn apply(u: &UnitaryMatrix, state: &FockVector) -> Result<FockVector, Error> {
    if state.modes() != u.dim() {
        return Err(Error::DimensionMismatch { expected: u.dim(), actual: state.modes() });
    }
    let mut by_sector: BTreeMap<u32, Vec<(Occupation, Complex64)>> = BTreeMap::new();
    for (occ, amp) in state.components() {
        by_sector.entry(occ.total()).or_default().push((occ.clone(), *amp));
    }
    let mut parts: Vec<(Occupation, Complex64)> = Vec::new();
    for (photons, inputs) in by_sector {
        let sector = enumerate_sector(u.dim(), photons);
        for n_out in sector.basis() {
            let mut acc = Complex64::new(0.0, 0.0);
            for (n_in, amp) in &inputs {
                acc += amp * element_unchecked(u, n_in, n_out);
            }
            if acc != Complex64::new(0.0, 0.0) {
                parts.push((n_out.clone(), acc));
            }
        }
    }
    Ok(FockVector::from_components(state.modes(), state.truncation(), parts)
        .with_norm_loss(state.norm_loss()))
}

/// Max deviation of `B[U₁U₂]` from `B[U₁]B[U₂]` over all sectors with at
/// most `photon_cap` photons. Both sides are computed independently.
pub fn product_check(
    u1: &UnitaryMatrix,
    u2: &UnitaryMatrix,
    photon_cap: u32,
) -> Result<f64, Error> {
    if u1.dim() != u2.dim() {
        return Err(Error::DimensionMismatch { expected: u1.dim(), actual: u2.dim() });
    }
    let product = u1.mul(u2);
    let mut worst = 0.0f64;
    for photons in 0..=photon_cap {
        let (_, lhs) = sector_matrix(&product, photons)?;
        let (_, s1) = sector_matrix(u1, photons)?;
        let (_, s2) = sector_matrix(u2, photons)?;
        worst = worst.max(lhs.max_abs_diff(&s1.mul(&s2)));
    }
    Ok(worst)
}

/// Max deviation of `B[U₁⊕U₂]` from `B[U₁]⊗B[U₂]` over all sectors with at
/// most `photon_cap` photons. The left side comes from permanents of the
/// block matrix, the right from products of factor elements.
pub fn direct_sum_check(
    u1: &UnitaryMatrix,
    u2: &UnitaryMatrix,
    photon_cap: u32,
) -> Result<f64, Error> {
    let w = u1.direct_sum(u2);
    let split = u1.dim();
    let mut worst = 0.0f64;
    for photons in 0..=photon_cap {
        let (sector, lhs) = sector_matrix(&w, photons)?;
        for (i, n_in) in sector.basis().iter().enumerate() {
            let (in1, in2) = n_in.split(split);
            for (j, n_out) in sector.basis().iter().enumerate() {
                let (out1, out2) = n_out.split(split);
                let rhs = element_unchecked(u1, &in1, &out1) * element_unchecked(u2, &in2, &out2);
                worst = worst.max((lhs[(i, j)] - rhs).norm());
            }
        }
    }
    Ok(worst)
}
