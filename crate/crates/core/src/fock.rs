//! Multimode bosonic Fock states: occupation vectors, fixed-photon-number
//! sectors, and the ladder operators.
//!
//! States are stored sparsely as maps from occupation vector to complex
//! amplitude. Post-selected circuits populate few sectors, so dense views
//! are materialized only on demand (see [`crate::functor::sector_matrix`]).
//!
//! Every value is immutable after construction; the ladder operators return
//! new states. A state carries a hard cap on total photon number set at
//! construction, and any operator that would push a component past the cap
//! drops it and records the lost squared norm on the result, so truncation
//! is always auditable.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use num_complex::Complex64;
use num_traits::Float;

use crate::error::Error;
use crate::NUMERIC_TOL;

/// Photon counts per mode; the computation-basis label of a Fock state.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Occupation {
    counts: Vec<u32>,
}

impl Occupation {
    pub fn new(counts: Vec<u32>) -> Self {
        assert!(!counts.is_empty(), "occupation needs at least one mode");
        Occupation { counts }
    }

    pub fn vacuum(modes: usize) -> Self {
        Occupation::new(vec![0; modes])
    }

    pub fn modes(&self) -> usize {
        self.counts.len()
    }

    pub fn counts(&self) -> &[u32] {
        &self.counts
    }

    pub fn count(&self, mode: usize) -> u32 {
        self.counts[mode]
    }

    /// Total photon number.
    pub fn total(&self) -> u32 {
        self.counts.iter().sum()
    }

    /// One more photon in `mode`.
    pub fn raised(&self, mode: usize) -> Occupation {
        let mut counts = self.counts.clone();
        counts[mode] += 1;
        Occupation { counts }
    }

    /// One fewer photon in `mode`; `None` if the mode is empty.
    pub fn lowered(&self, mode: usize) -> Option<Occupation> {
        if self.counts[mode] == 0 {
            return None;
        }
        let mut counts = self.counts.clone();
        counts[mode] -= 1;
        Some(Occupation { counts })
    }

    /// Concatenation of the two mode lists.
    pub fn concat(&self, other: &Occupation) -> Occupation {
        let mut counts = self.counts.clone();
        counts.extend_from_slice(&other.counts);
        Occupation { counts }
    }

    /// Splits the mode list at `mid`.
    pub fn split(&self, mid: usize) -> (Occupation, Occupation) {
        let (a, b) = self.counts.split_at(mid);
        (Occupation::new(a.to_vec()), Occupation::new(b.to_vec()))
    }

    /// Canonical order: ascending total photon number, then lexicographically
    /// decreasing counts. Within a sector this reads (2,0), (1,1), (0,2).
    pub fn canonical_cmp(&self, other: &Occupation) -> Ordering {
        self.total()
            .cmp(&other.total())
            .then_with(|| other.counts.cmp(&self.counts))
    }
}

/// The ordered basis of all occupations with a fixed mode count and total
/// photon number.
#[derive(Debug, Clone)]
pub struct FockSector {
    modes: usize,
    photons: u32,
    basis: Vec<Occupation>,
}

/// Enumerates the sector basis in canonical (lexicographically decreasing)
/// order. Deterministic; `photons = 0` yields the single vacuum vector.
pub fn enumerate_sector(modes: usize, photons: u32) -> FockSector {
    assert!(modes >= 1, "need at least one mode");
    let mut basis = Vec::new();
    let mut current = vec![0u32; modes];
    fill(&mut basis, &mut current, 0, photons);
    FockSector { modes, photons, basis }
}

fn fill(basis: &mut Vec<Occupation>, current: &mut Vec<u32>, mode: usize, remaining: u32) {
    if mode + 1 == current.len() {
        current[mode] = remaining;
        basis.push(Occupation::new(current.clone()));
        return;
    }
    for k in (0..=remaining).rev() {
        current[mode] = k;
        fill(basis, current, mode + 1, remaining - k);
    }
}

impl FockSector {
    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn photons(&self) -> u32 {
        self.photons
    }

    pub fn basis(&self) -> &[Occupation] {
        &self.basis
    }

    pub fn len(&self) -> usize {
        self.basis.len()
    }

    pub fn is_empty(&self) -> bool {
        self.basis.is_empty()
    }

    /// Position of `occ` in the canonical ordering.
    pub fn index_of(&self, occ: &Occupation) -> Option<usize> {
        self.basis.binary_search_by(|probe| probe.canonical_cmp(occ)).ok()
    }

    /// Basis size `C(photons + modes - 1, modes - 1)` without enumerating,
    /// saturating at `u128::MAX`.
    pub fn size_of(modes: usize, photons: u32) -> u128 {
        let n = photons as u128 + modes as u128 - 1;
        let k = modes as u128 - 1;
        let k = k.min(n - k);
        let mut acc: u128 = 1;
        for i in 0..k {
            acc = match acc.checked_mul(n - i) {
                Some(v) => v / (i + 1),
                None => return u128::MAX,
            };
        }
        acc
    }
}

/// A sparse vector of complex amplitudes over a truncated Fock basis.
#[derive(Debug, Clone, PartialEq)]
pub struct FockVector {
    modes: usize,
    truncation: u32,
    amps: BTreeMap<Occupation, Complex64>,
    norm_loss: f64,
}

impl FockVector {
    /// The vacuum state with amplitude 1.
    pub fn vacuum(modes: usize, truncation: u32) -> Self {
        FockVector::basis_state(&Occupation::vacuum(modes), truncation)
    }

    /// A pure computation-basis state.
    pub fn basis_state(occ: &Occupation, truncation: u32) -> Self {
        assert!(occ.total() <= truncation, "basis state exceeds truncation");
        let mut amps = BTreeMap::new();
        amps.insert(occ.clone(), Complex64::new(1.0, 0.0));
        FockVector { modes: occ.modes(), truncation, amps, norm_loss: 0.0 }
    }

    /// The zero vector.
    pub fn zero(modes: usize, truncation: u32) -> Self {
        FockVector { modes, truncation, amps: BTreeMap::new(), norm_loss: 0.0 }
    }

    /// Builds from components, dropping keys of the wrong mode count or past
    /// the truncation into the norm-loss tally.
    pub fn from_components<I>(modes: usize, truncation: u32, parts: I) -> Self
    where
        I: IntoIterator<Item = (Occupation, Complex64)>,
    {
        let mut v = FockVector::zero(modes, truncation);
        for (occ, amp) in parts {
            assert_eq!(occ.modes(), modes, "component has wrong mode count");
            v.accumulate(occ, amp);
        }
        v
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn truncation(&self) -> u32 {
        self.truncation
    }

    /// Squared norm lost to truncation over the history of this value.
    pub fn norm_loss(&self) -> f64 {
        self.norm_loss
    }

    /// Replaces the norm-loss tally, for carrying history across rebuilds.
    pub fn with_norm_loss(mut self, loss: f64) -> FockVector {
        self.norm_loss = loss;
        self
    }

    pub fn amplitude(&self, occ: &Occupation) -> Complex64 {
        self.amps.get(occ).copied().unwrap_or(Complex64::new(0.0, 0.0))
    }

    pub fn components(&self) -> impl Iterator<Item = (&Occupation, &Complex64)> {
        self.amps.iter()
    }

    pub fn len(&self) -> usize {
        self.amps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amps.is_empty()
    }

    /// Components sorted in canonical order.
    pub fn canonical_components(&self) -> Vec<(Occupation, Complex64)> {
        let mut out: Vec<_> = self.amps.iter().map(|(o, a)| (o.clone(), *a)).collect();
        out.sort_by(|(a, _), (b, _)| a.canonical_cmp(b));
        out
    }

    pub fn norm_sq(&self) -> f64 {
        self.amps.values().map(|a| a.norm_sqr()).sum()
    }

    pub fn is_normalized(&self, tol: f64) -> bool {
        (self.norm_sq() - 1.0).abs() <= tol
    }

    /// ⟨self, other⟩ with conjugation on `self`.
    pub fn inner(&self, other: &FockVector) -> Complex64 {
        assert_eq!(self.modes, other.modes);
        self.amps
            .iter()
            .filter_map(|(occ, a)| other.amps.get(occ).map(|b| a.conj() * b))
            .sum()
    }

    pub fn scale(&self, factor: Complex64) -> FockVector {
        let amps = self.amps.iter().map(|(o, a)| (o.clone(), a * factor)).collect();
        FockVector { modes: self.modes, truncation: self.truncation, amps, norm_loss: self.norm_loss }
    }

    pub fn add(&self, other: &FockVector) -> FockVector {
        assert_eq!(self.modes, other.modes);
        let mut out = self.clone();
        out.truncation = self.truncation.max(other.truncation);
        out.norm_loss += other.norm_loss;
        for (occ, amp) in &other.amps {
            out.accumulate(occ.clone(), *amp);
        }
        out
    }

    /// Returns a unit-norm copy; errors on the zero vector.
    pub fn normalized(&self) -> Result<FockVector, Error> {
        let n = self.norm_sq();
        if n == 0.0 {
            return Err(Error::NotNormalized { norm_sq: 0.0 });
        }
        let mut out = self.scale(Complex64::new(1.0 / n.sqrt(), 0.0));
        out.norm_loss = 0.0;
        Ok(out)
    }

    /// Tensor product; the result's modes and truncation are the sums.
    pub fn tensor(&self, other: &FockVector) -> FockVector {
        let mut out = FockVector::zero(self.modes + other.modes, self.truncation + other.truncation);
        out.norm_loss = self.norm_loss + other.norm_loss;
        for (a_occ, a) in &self.amps {
            for (b_occ, b) in &other.amps {
                out.accumulate(a_occ.concat(b_occ), a * b);
            }
        }
        out
    }

    /// The creation operator on `mode`: each component n picks up √(n_M + 1)
    /// and one more photon. Components pushed past the truncation are dropped
    /// into the norm-loss tally of the result.
    pub fn create(&self, mode: usize) -> FockVector {
        assert!(mode < self.modes, "mode out of range");
        let mut out = FockVector::zero(self.modes, self.truncation);
        out.norm_loss = self.norm_loss;
        for (occ, amp) in &self.amps {
            if occ.total() + 1 > self.truncation {
                out.norm_loss += amp.norm_sqr();
                continue;
            }
            let factor = ((occ.count(mode) + 1) as f64).sqrt();
            out.accumulate(occ.raised(mode), amp * factor);
        }
        out
    }

    /// The annihilation operator on `mode`: components with an empty mode
    /// vanish, the rest pick up √(n_M).
    pub fn annihilate(&self, mode: usize) -> FockVector {
        assert!(mode < self.modes, "mode out of range");
        let mut out = FockVector::zero(self.modes, self.truncation);
        out.norm_loss = self.norm_loss;
        for (occ, amp) in &self.amps {
            if let Some(lowered) = occ.lowered(mode) {
                let factor = (occ.count(mode) as f64).sqrt();
                out.accumulate(lowered, amp * factor);
            }
        }
        out
    }

    /// Σ n_M |amplitude(n)|², the expected photon count on `mode`.
    /// Requires a normalized state.
    pub fn number_expectation(&self, mode: usize) -> Result<f64, Error> {
        assert!(mode < self.modes, "mode out of range");
        let norm_sq = self.norm_sq();
        if (norm_sq - 1.0).abs() > NUMERIC_TOL {
            return Err(Error::NotNormalized { norm_sq });
        }
        Ok(self
            .amps
            .iter()
            .map(|(occ, amp)| occ.count(mode) as f64 * amp.norm_sqr())
            .sum())
    }

    fn accumulate(&mut self, occ: Occupation, amp: Complex64) {
        use alloc::collections::btree_map::Entry;
        if occ.total() > self.truncation {
            self.norm_loss += amp.norm_sqr();
            return;
        }
        match self.amps.entry(occ) {
            Entry::Occupied(mut e) => {
                *e.get_mut() += amp;
                // Keep exact cancellations out of the support.
                if *e.get() == Complex64::new(0.0, 0.0) {
                    e.remove();
                }
            }
            Entry::Vacant(e) => {
                if amp != Complex64::new(0.0, 0.0) {
                    e.insert(amp);
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn sector_two_modes_two_photons() {
        let s = enumerate_sector(2, 2);
        let expect: Vec<Occupation> = [[2, 0], [1, 1], [0, 2]]
            .iter()
            .map(|v| Occupation::new(v.to_vec()))
            .collect();
        assert_eq!(s.basis(), &expect[..]);
        assert_eq!(s.len(), 3);
    }

    #[test]
    fn sector_vacuum_only() {
        let s = enumerate_sector(3, 0);
        assert_eq!(s.len(), 1);
        assert_eq!(s.basis()[0], Occupation::vacuum(3));
    }

    #[test]
    fn sector_sizes_match_binomial_formula() {
        for modes in 1..=6 {
            for photons in 0..=6 {
                let s = enumerate_sector(modes, photons);
                assert_eq!(s.len() as u128, FockSector::size_of(modes, photons));
            }
        }
    }

    #[test]
    fn index_of_round_trips() {
        let s = enumerate_sector(3, 3);
        for (i, occ) in s.basis().iter().enumerate() {
            assert_eq!(s.index_of(occ), Some(i));
        }
        assert_eq!(s.index_of(&Occupation::new(vec![3, 3, 3])), None);
    }

    #[test]
    fn create_on_vacuum() {
        let v = FockVector::vacuum(2, 4).create(0);
        assert_eq!(v.amplitude(&Occupation::new(vec![1, 0])), c(1.0, 0.0));
        assert_eq!(v.len(), 1);
        assert_eq!(v.norm_loss(), 0.0);
    }

    #[test]
    fn create_ladder_factors() {
        let v = FockVector::basis_state(&Occupation::new(vec![2, 0]), 5).create(0);
        let amp = v.amplitude(&Occupation::new(vec![3, 0]));
        assert!((amp - c(3f64.sqrt(), 0.0)).norm() < 1e-15);

        let v = FockVector::basis_state(&Occupation::new(vec![1, 1]), 5).create(1);
        let amp = v.amplitude(&Occupation::new(vec![1, 2]));
        assert!((amp - c(2f64.sqrt(), 0.0)).norm() < 1e-15);
    }

    #[test]
    fn create_past_truncation_reports_loss() {
        let v = FockVector::basis_state(&Occupation::new(vec![2, 0]), 2).create(0);
        assert!(v.is_empty());
        assert_eq!(v.norm_loss(), 1.0);
    }

    #[test]
    fn annihilate_cases() {
        let vac = FockVector::vacuum(2, 4);
        assert!(vac.annihilate(0).is_empty());
        assert!(vac.annihilate(1).is_empty());

        let v = FockVector::basis_state(&Occupation::new(vec![2, 0]), 4).annihilate(0);
        let amp = v.amplitude(&Occupation::new(vec![1, 0]));
        assert!((amp - c(2f64.sqrt(), 0.0)).norm() < 1e-15);

        let v = FockVector::basis_state(&Occupation::new(vec![0, 1]), 4).annihilate(0);
        assert!(v.is_empty());
    }

    #[test]
    fn number_expectation_cases() {
        let vac = FockVector::vacuum(2, 4);
        assert_eq!(vac.number_expectation(0).unwrap(), 0.0);

        let pure = FockVector::basis_state(&Occupation::new(vec![2, 1]), 4);
        assert_eq!(pure.number_expectation(0).unwrap(), 2.0);

        // Equal superposition of (1,0) and (0,1): expectation 1/2 on mode 0.
        let w = c(0.5f64.sqrt(), 0.0);
        let sup = FockVector::from_components(
            2,
            4,
            [
                (Occupation::new(vec![1, 0]), w),
                (Occupation::new(vec![0, 1]), w),
            ],
        );
        assert!((sup.number_expectation(0).unwrap() - 0.5).abs() < 1e-15);

        let unnorm = pure.scale(c(2.0, 0.0));
        assert!(matches!(unnorm.number_expectation(0), Err(Error::NotNormalized { .. })));
    }

    #[test]
    fn ladder_commutator_on_safe_region() {
        // create then annihilate multiplies by n_M + 1; reverse order by n_M.
        let occ = Occupation::new(vec![2, 1, 0]);
        let v = FockVector::basis_state(&occ, 10);
        for mode in 0..3 {
            let up_down = v.create(mode).annihilate(mode);
            let n = occ.count(mode) as f64;
            assert!((up_down.amplitude(&occ) - c(n + 1.0, 0.0)).norm() < 1e-12);
            let down_up = v.annihilate(mode).create(mode);
            assert!((down_up.amplitude(&occ) - c(n, 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn tensor_concatenates_modes() {
        let a = FockVector::basis_state(&Occupation::new(vec![1]), 1);
        let b = FockVector::basis_state(&Occupation::new(vec![0, 2]), 2);
        let t = a.tensor(&b);
        assert_eq!(t.modes(), 3);
        assert_eq!(t.amplitude(&Occupation::new(vec![1, 0, 2])), c(1.0, 0.0));
    }

    #[test]
    fn canonical_order_reads_sectors_top_down() {
        let a = Occupation::new(vec![2, 0]);
        let b = Occupation::new(vec![1, 1]);
        let v = Occupation::new(vec![0, 0]);
        assert_eq!(v.canonical_cmp(&a), Ordering::Less);
        assert_eq!(a.canonical_cmp(&b), Ordering::Less);
    }
}
