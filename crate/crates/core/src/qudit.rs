//! Qudit implementations on photonic state spaces: the dual-rail qubit and
//! the parity qudit, with the bounds that relate physical matrix elements to
//! theoretical ones.
//!
//! An encoding represents theoretical basis dits as physical Fock states
//! (an isometry) and interprets physical basis states back as dits (the
//! adjoint). The parity qudit reads a single mode's photon count modulo `d`
//! and is seeded by coherent states; the dual-rail qubit pins one photon
//! across two modes.

use alloc::vec::Vec;

use num_complex::Complex64;
use num_traits::Float;

use crate::error::Error;
use crate::fock::{enumerate_sector, FockVector, Occupation};
use crate::math::factorial;
use crate::matrix::Mat;
use crate::rng::random_unit_vector;

/// e^{2πi k/d} with exact values on the quarter lattice.
fn root_of_unity(k: i64, d: usize) -> Complex64 {
    let k = k.rem_euclid(d as i64) as usize;
    let (num, den) = (k, d);
    if 4 * num % den == 0 {
        match 4 * num / den {
            0 => return Complex64::new(1.0, 0.0),
            1 => return Complex64::new(0.0, 1.0),
            2 => return Complex64::new(-1.0, 0.0),
            3 => return Complex64::new(0.0, -1.0),
            _ => {}
        }
    }
    let phi = core::f64::consts::TAU * k as f64 / d as f64;
    Complex64::new(phi.cos(), phi.sin())
}

/// The fractional exponential Σ_{n ≡ b mod d} θⁿ/n!, evaluated by the
/// d-term closed form (1/d) Σ_c exp(e^{2πi c/d}θ − 2πi bc/d).
pub fn exph(b: usize, d: usize, theta: Complex64) -> Complex64 {
    assert!(d >= 1 && b < d, "residue out of range");
    let mut acc = Complex64::new(0.0, 0.0);
    for c in 0..d {
        let rotated = root_of_unity(c as i64, d) * theta;
        let phase = root_of_unity(-((b * c) as i64), d);
        acc += rotated.exp() * phase;
    }
    acc / d as f64
}

/// The defining series of [`exph`], summed with compensation up to `n_max`.
/// Kept as the independent route for verification.
pub fn exph_series(b: usize, d: usize, theta: Complex64, n_max: u32) -> Complex64 {
    assert!(d >= 1 && b < d, "residue out of range");
    let mut acc = Complex64::new(0.0, 0.0);
    let mut comp = Complex64::new(0.0, 0.0);
    let mut n = b as u32;
    let mut term = crate::math::cpow(theta, b as u32) / factorial(b as u32);
    while n <= n_max {
        let y = term - comp;
        let t = acc + y;
        comp = (t - acc) - y;
        acc = t;
        for k in 1..=d as u32 {
            term = term * theta / (n + k) as f64;
        }
        n += d as u32;
    }
    acc
}

/// An isometric representation of qudit basis states as physical Fock
/// states, with its adjoint interpretation.
pub trait QuditEncoding {
    /// Number of dit values.
    fn arity(&self) -> usize;

    /// Number of physical modes.
    fn modes(&self) -> usize;

    /// Photon cap of the physical space.
    fn truncation(&self) -> u32;

    /// ⟨b|rep at the physical basis state `occ` (zero off the dit's support).
    fn rep_amplitude(&self, b: usize, occ: &Occupation) -> Complex64;

    /// The dit a physical basis state is read as, with its weight, or `None`
    /// if the state is outside the interpretable support.
    fn interpret(&self, occ: &Occupation) -> Option<(usize, Complex64)>;

    /// The represented state, with any truncation tail recorded as norm loss.
    fn represent(&self, b: usize) -> FockVector {
        assert!(b < self.arity(), "dit out of range");
        let mut parts: Vec<(Occupation, Complex64)> = Vec::new();
        for total in 0..=self.truncation() {
            for occ in enumerate_sector(self.modes(), total).basis() {
                let amp = self.rep_amplitude(b, occ);
                if amp != Complex64::new(0.0, 0.0) {
                    parts.push((occ.clone(), amp));
                }
            }
        }
        let state = FockVector::from_components(self.modes(), self.truncation(), parts);
        let tail = (1.0 - state.norm_sq()).max(0.0);
        state.with_norm_loss(tail)
    }
}

/// The single-photon qubit: |0⟩ ↦ (0,1), |1⟩ ↦ (1,0).
#[derive(Debug, Clone, Copy, Default)]
pub struct DualRailEncoding;

impl QuditEncoding for DualRailEncoding {
    fn arity(&self) -> usize {
        2
    }

    fn modes(&self) -> usize {
        2
    }

    fn truncation(&self) -> u32 {
        1
    }

    fn rep_amplitude(&self, b: usize, occ: &Occupation) -> Complex64 {
        let hit = match b {
            0 => occ.counts() == [0, 1],
            _ => occ.counts() == [1, 0],
        };
        if hit {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    }

    fn interpret(&self, occ: &Occupation) -> Option<(usize, Complex64)> {
        match occ.counts() {
            [0, 1] => Some((0, Complex64::new(1.0, 0.0))),
            [1, 0] => Some((1, Complex64::new(1.0, 0.0))),
            _ => None,
        }
    }
}

/// The parity qudit: a single mode read modulo `d`, represented by the
/// normalized residue-class slices of a coherent amplitude (or any supplied
/// amplitude sequence).
#[derive(Debug, Clone)]
pub struct ParityEncoding {
    d: usize,
    truncation: u32,
    alphas: Vec<Complex64>,
}

impl ParityEncoding {
    /// The coherent-tail model with parameter α: amplitudes
    /// αⁿ / √(n! · exph_{n mod d}[|α|²]). Fails if any residue class keeps a
    /// tail beyond `tail_tol` past the truncation.
    pub fn coherent(
        d: usize,
        alpha: Complex64,
        truncation: u32,
        tail_tol: f64,
    ) -> Result<Self, Error> {
        assert!(d >= 2, "arity must be at least 2");
        assert!(alpha != Complex64::new(0.0, 0.0), "alpha must be non-zero");
        let mag_sq = Complex64::new(alpha.norm_sqr(), 0.0);
        let norms: Vec<f64> = (0..d).map(|b| exph(b, d, mag_sq).re).collect();
        let mut alphas = Vec::with_capacity(truncation as usize + 1);
        let mut power = Complex64::new(1.0, 0.0);
        for n in 0..=truncation {
            let b = n as usize % d;
            alphas.push(power / (factorial(n) * norms[b]).sqrt());
            power *= alpha;
        }
        let enc = ParityEncoding { d, truncation, alphas };
        for b in 0..d {
            let tail = 1.0 - enc.residue_norm_sq(b);
            if tail > tail_tol {
                return Err(Error::TruncationInadequate { tail, tolerance: tail_tol });
            }
        }
        Ok(enc)
    }

    /// An arbitrary amplitude sequence; each residue class must already be
    /// normalized within `tol`.
    pub fn from_sequence(d: usize, alphas: Vec<Complex64>, tol: f64) -> Result<Self, Error> {
        assert!(d >= 2, "arity must be at least 2");
        assert!(!alphas.is_empty());
        let enc = ParityEncoding { d, truncation: alphas.len() as u32 - 1, alphas };
        for b in 0..d {
            let tail = (1.0 - enc.residue_norm_sq(b)).abs();
            if tail > tol {
                return Err(Error::TruncationInadequate { tail, tolerance: tol });
            }
        }
        Ok(enc)
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn alpha_n(&self, n: u32) -> Complex64 {
        self.alphas.get(n as usize).copied().unwrap_or(Complex64::new(0.0, 0.0))
    }

    fn residue_norm_sq(&self, b: usize) -> f64 {
        self.alphas
            .iter()
            .enumerate()
            .filter(|(n, _)| n % self.d == b)
            .map(|(_, a)| a.norm_sqr())
            .sum()
    }
}

impl QuditEncoding for ParityEncoding {
    fn arity(&self) -> usize {
        self.d
    }

    fn modes(&self) -> usize {
        1
    }

    fn truncation(&self) -> u32 {
        self.truncation
    }

    fn rep_amplitude(&self, b: usize, occ: &Occupation) -> Complex64 {
        let n = occ.count(0);
        if n as usize % self.d == b {
            self.alpha_n(n)
        } else {
            Complex64::new(0.0, 0.0)
        }
    }

    fn interpret(&self, occ: &Occupation) -> Option<(usize, Complex64)> {
        let n = occ.count(0);
        let weight = self.alpha_n(n).conj();
        if weight == Complex64::new(0.0, 0.0) {
            None
        } else {
            Some((n as usize % self.d, weight))
        }
    }
}

/// The d×d matrix of interpret∘represent; the identity for a compatible
/// encoding.
pub fn compatibility_matrix(enc: &impl QuditEncoding) -> Mat {
    let d = enc.arity();
    let mut out = Mat::zeros(d, d);
    for b in 0..d {
        let state = enc.represent(b);
        for (occ, amp) in state.components() {
            if let Some((dit, weight)) = enc.interpret(occ) {
                out[(b, dit)] += amp * weight;
            }
        }
    }
    out
}

/// The truncated coherent state e^{−|α|²/2} Σ αⁿ/√n! ⟨n| on one mode.
/// Fails if the truncation leaves a tail of 1e-9 or more; the guidance
/// truncation ≥ |α|² + 10|α| + 20 keeps the tail far below that.
pub fn coherent_state(alpha: Complex64, truncation: u32) -> Result<FockVector, Error> {
    const TAIL_TOL: f64 = 1e-9;
    let scale = (-0.5 * alpha.norm_sqr()).exp();
    let mut parts = Vec::with_capacity(truncation as usize + 1);
    let mut term = Complex64::new(scale, 0.0);
    for n in 0..=truncation {
        parts.push((Occupation::new(alloc::vec![n]), term));
        term = term * alpha / ((n + 1) as f64).sqrt();
    }
    let state = FockVector::from_components(1, truncation, parts);
    let tail = (1.0 - state.norm_sq()).max(0.0);
    if tail >= TAIL_TOL {
        return Err(Error::TruncationInadequate { tail, tolerance: TAIL_TOL });
    }
    Ok(state.with_norm_loss(tail))
}

/// A coherent state cut at `truncation` with no tolerance demand; the tail
/// is recorded as norm loss. For sampling runs that account for the residual
/// explicitly.
pub fn truncated_coherent(alpha: Complex64, truncation: u32) -> FockVector {
    let scale = (-0.5 * alpha.norm_sqr()).exp();
    let mut parts = Vec::with_capacity(truncation as usize + 1);
    let mut term = Complex64::new(scale, 0.0);
    for n in 0..=truncation {
        parts.push((Occupation::new(alloc::vec![n]), term));
        term = term * alpha / ((n + 1) as f64).sqrt();
    }
    let state = FockVector::from_components(1, truncation, parts);
    let tail = (1.0 - state.norm_sq()).max(0.0);
    state.with_norm_loss(tail)
}

/// The weights p[b] = √(exph_b[|α|²]/e^{|α|²}) mixing represented dits into
/// the coherent state.
pub fn mixing_weights(d: usize, alpha: Complex64) -> Vec<f64> {
    let mag_sq = alpha.norm_sqr();
    let denom = mag_sq.exp();
    (0..d)
        .map(|b| (exph(b, d, Complex64::new(mag_sq, 0.0)).re / denom).sqrt())
        .collect()
}

/// Computable bounds μ − ε ≤ |⟨b⁻|rep [U] int|b⁺⟩|² ≤ μ + ε for a physical
/// map given by its matrix elements on the truncated basis. ε ≥ 0 by
/// construction.
pub fn implement_bounds(
    enc: &impl QuditEncoding,
    phys_element: impl Fn(&Occupation, &Occupation) -> Complex64,
    b_minus: usize,
    b_plus: usize,
) -> (f64, f64) {
    let mut mu = 0.0;
    let mut root_sum = 0.0;
    let basis: Vec<Occupation> = (0..=enc.truncation())
        .flat_map(|t| enumerate_sector(enc.modes(), t).basis().to_vec())
        .collect();
    for n_in in &basis {
        let w_in = enc.rep_amplitude(b_minus, n_in).norm();
        if w_in == 0.0 {
            continue;
        }
        for n_out in &basis {
            let w_out = enc.rep_amplitude(b_plus, n_out).norm();
            if w_out == 0.0 {
                continue;
            }
            let u = phys_element(n_in, n_out).norm();
            mu += w_in * w_in * u * u * w_out * w_out;
            root_sum += w_in * u * w_out;
        }
    }
    let mu_plus = root_sum * root_sum;
    (mu, (mu_plus - mu).max(0.0))
}

/// Outcome of a floor/cap estimation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EquivalenceVerdict {
    /// 0 < f̂ ≤ ĉ < ∞ over the sampled states; heuristic, since the true
    /// floor and cap range over all states (f̂ ≥ f and ĉ ≤ c).
    EquivalentHeuristic,
    /// Some state pair has zero physical amplitude but nonzero theoretical
    /// amplitude.
    Violated,
    /// Every sampled pair had zero amplitude on both sides.
    Vacuous,
}

#[derive(Debug, Clone, Copy)]
pub struct FloorCapEstimate {
    pub f_hat: f64,
    pub c_hat: f64,
    pub verdict: EquivalenceVerdict,
}

/// Estimates the floor and cap of |⟨b⁻|U|b⁺⟩|² / |⟨b⁻|rep [U] int|b⁺⟩|²
/// over the computation basis plus `samples` random state pairs.
pub fn floor_cap_estimate(
    enc: &impl QuditEncoding,
    u_theory: &Mat,
    phys_element: impl Fn(&Occupation, &Occupation) -> Complex64,
    samples: usize,
    seed: u64,
) -> FloorCapEstimate {
    const ZERO_CUT: f64 = 1e-18;
    let d = enc.arity();
    assert_eq!(u_theory.rows(), d);

    let basis: Vec<Occupation> = (0..=enc.truncation())
        .flat_map(|t| enumerate_sector(enc.modes(), t).basis().to_vec())
        .collect();

    // |b⁻⟩ as theory coefficients → physical bra → [U] → interpret.
    let implemented = |coeff_in: &[Complex64], coeff_out: &[Complex64]| -> Complex64 {
        let mut theory_out = alloc::vec![Complex64::new(0.0, 0.0); d];
        for n_in in &basis {
            let mut amp_in = Complex64::new(0.0, 0.0);
            for (b, cb) in coeff_in.iter().enumerate() {
                amp_in += cb * enc.rep_amplitude(b, n_in);
            }
            if amp_in == Complex64::new(0.0, 0.0) {
                continue;
            }
            for n_out in &basis {
                let u = phys_element(n_in, n_out);
                if u == Complex64::new(0.0, 0.0) {
                    continue;
                }
                if let Some((dit, weight)) = enc.interpret(n_out) {
                    theory_out[dit] += amp_in * u * weight;
                }
            }
        }
        theory_out
            .iter()
            .zip(coeff_out)
            .map(|(t, c)| t * c.conj())
            .sum()
    };
    let theoretical = |coeff_in: &[Complex64], coeff_out: &[Complex64]| -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (i, ci) in coeff_in.iter().enumerate() {
            for (j, cj) in coeff_out.iter().enumerate() {
                acc += ci * u_theory[(i, j)] * cj.conj();
            }
        }
        acc
    };

    let mut pairs: Vec<(Vec<Complex64>, Vec<Complex64>)> = Vec::new();
    for b_in in 0..d {
        for b_out in 0..d {
            let mut ci = alloc::vec![Complex64::new(0.0, 0.0); d];
            let mut co = alloc::vec![Complex64::new(0.0, 0.0); d];
            ci[b_in] = Complex64::new(1.0, 0.0);
            co[b_out] = Complex64::new(1.0, 0.0);
            pairs.push((ci, co));
        }
    }
    let mut rng = crate::rng::fixture_rng(seed);
    for _ in 0..samples {
        pairs.push((random_unit_vector(d, &mut rng), random_unit_vector(d, &mut rng)));
    }

    let mut f_hat = f64::INFINITY;
    let mut c_hat: f64 = 0.0;
    let mut contributed = false;
    for (ci, co) in &pairs {
        let num = theoretical(ci, co).norm_sqr();
        let den = implemented(ci, co).norm_sqr();
        if den <= ZERO_CUT {
            if num > ZERO_CUT {
                return FloorCapEstimate { f_hat: 0.0, c_hat: f64::INFINITY, verdict: EquivalenceVerdict::Violated };
            }
            continue;
        }
        let ratio = num / den;
        f_hat = f_hat.min(ratio);
        c_hat = c_hat.max(ratio);
        contributed = true;
    }
    if !contributed {
        return FloorCapEstimate { f_hat: 0.0, c_hat: 0.0, verdict: EquivalenceVerdict::Vacuous };
    }
    let verdict = if f_hat > 0.0 && c_hat.is_finite() {
        EquivalenceVerdict::EquivalentHeuristic
    } else {
        EquivalenceVerdict::Violated
    };
    FloorCapEstimate { f_hat, c_hat, verdict }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::functor;
    use crate::matrix::UnitaryMatrix;
    use alloc::vec;

    fn c64(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn exph_binary_reduces_to_hyperbolics() {
        for &theta in &[0.3, 1.0, 2.5, 4.0, 8.0] {
            let even = exph(0, 2, c64(theta, 0.0));
            let odd = exph(1, 2, c64(theta, 0.0));
            assert!((even.re - theta.cosh()).abs() < 1e-12 * theta.cosh().max(1.0));
            assert!((odd.re - theta.sinh()).abs() < 1e-12 * theta.sinh().abs().max(1.0));
            assert!(even.im.abs() < 1e-12 && odd.im.abs() < 1e-12);
        }
    }

    #[test]
    fn exph_residues_partition_the_exponential() {
        for d in 1..=5usize {
            let theta = c64(1.3, -0.7);
            let sum: Complex64 = (0..d).map(|b| exph(b, d, theta)).sum();
            assert!((sum - theta.exp()).norm() < 1e-12);
        }
    }

    #[test]
    fn exph_closed_form_matches_series() {
        for d in 2..=5usize {
            for b in 0..d {
                for &re in &[-2.0, 0.5, 3.0] {
                    for &im in &[-1.5, 0.0, 2.0] {
                        let theta = c64(re, im);
                        let closed = exph(b, d, theta);
                        let series = exph_series(b, d, theta, 200);
                        let scale = closed.norm().max(1.0);
                        assert!(
                            (closed - series).norm() < 1e-12 * scale,
                            "b={b} d={d} theta={theta}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn coherent_encoding_matches_printed_amplitudes() {
        // d = 2, α = 1, b = 0: amplitudes 1/√(n! cosh 1) on even n.
        let enc = ParityEncoding::coherent(2, c64(1.0, 0.0), 40, 1e-12).unwrap();
        let state = enc.represent(0);
        let cosh1 = 1f64.cosh();
        for n in (0..=6u32).step_by(2) {
            let expected = 1.0 / (factorial(n) * cosh1).sqrt();
            let amp = state.amplitude(&Occupation::new(vec![n]));
            assert!((amp - c64(expected, 0.0)).norm() < 1e-12, "n={n}");
        }
        for n in (1..=5u32).step_by(2) {
            assert_eq!(state.amplitude(&Occupation::new(vec![n])), c64(0.0, 0.0));
        }
    }

    #[test]
    fn representations_are_isometric() {
        for d in 2..=5usize {
            for &mag in &[0.5, 1.0, 2.0] {
                let enc = ParityEncoding::coherent(d, c64(mag, 0.3), 60, 1e-10).unwrap();
                for b in 0..d {
                    let norm = enc.represent(b).norm_sq();
                    assert!(norm <= 1.0 + 1e-12 && norm >= 1.0 - 1e-10, "d={d} b={b}: {norm}");
                }
            }
        }
    }

    #[test]
    fn interpret_after_represent_is_the_identity() {
        let enc = ParityEncoding::coherent(3, c64(1.2, -0.4), 60, 1e-10).unwrap();
        let m = compatibility_matrix(&enc);
        assert!(m.max_abs_diff(&Mat::identity(3)) < 1e-9);

        let dual = DualRailEncoding;
        let m = compatibility_matrix(&dual);
        assert_eq!(m.max_abs_diff(&Mat::identity(2)), 0.0);
    }

    #[test]
    fn small_alpha_represents_the_zero_dit_as_near_vacuum() {
        let enc = ParityEncoding::coherent(2, c64(1e-4, 0.0), 20, 1e-12).unwrap();
        let state = enc.represent(0);
        let vac_amp = state.amplitude(&Occupation::new(vec![0]));
        assert!((vac_amp.norm() - 1.0).abs() < 1e-7);
    }

    #[test]
    fn inadequate_truncation_is_rejected() {
        assert!(matches!(
            ParityEncoding::coherent(2, c64(2.0, 0.0), 3, 1e-9),
            Err(Error::TruncationInadequate { .. })
        ));
        assert!(matches!(
            coherent_state(c64(3.0, 0.0), 5),
            Err(Error::TruncationInadequate { .. })
        ));
    }

    #[test]
    fn coherent_state_moments() {
        let vac = coherent_state(c64(0.0, 0.0), 0).unwrap();
        assert_eq!(vac.amplitude(&Occupation::new(vec![0])), c64(1.0, 0.0));

        let alpha = c64(1.0, 0.0);
        let state = coherent_state(alpha, 40).unwrap();
        let n = state.normalized().unwrap().number_expectation(0).unwrap();
        assert!((n - 1.0).abs() < 1e-6);
    }

    #[test]
    fn mixture_of_represented_dits_is_the_coherent_state() {
        for d in 2..=5usize {
            for &mag in &[0.7, 1.4, 2.0] {
                let alpha = c64(mag * 0.8, mag * 0.6);
                let truncation = 70;
                let enc = ParityEncoding::coherent(d, alpha, truncation, 1e-10).unwrap();
                let weights = mixing_weights(d, alpha);
                let mut mixed = FockVector::zero(1, truncation);
                for b in 0..d {
                    mixed = mixed.add(&enc.represent(b).scale(c64(weights[b], 0.0)));
                }
                let coherent = coherent_state(alpha, truncation).unwrap();
                let diff = mixed.add(&coherent.scale(c64(-1.0, 0.0)));
                assert!(diff.norm_sq().sqrt() < 1e-8, "d={d} alpha={alpha}");
            }
        }
    }

    #[test]
    fn identity_map_bounds() {
        let enc = ParityEncoding::coherent(2, c64(1.0, 0.0), 40, 1e-10).unwrap();
        let identity = |a: &Occupation, b: &Occupation| {
            if a == b {
                c64(1.0, 0.0)
            } else {
                c64(0.0, 0.0)
            }
        };
        // Same residue: μ = Σ|α_n|⁴ and μ + ε = 1.
        let (mu, eps) = implement_bounds(&enc, identity, 0, 0);
        let quartic: f64 = (0..=40u32)
            .step_by(2)
            .map(|n| enc.alpha_n(n).norm_sqr().powi(2))
            .sum();
        assert!((mu - quartic).abs() < 1e-12);
        assert!((mu + eps - 1.0).abs() < 1e-9);
        // Off parity under the identity: nothing survives.
        let (mu, eps) = implement_bounds(&enc, identity, 0, 1);
        assert_eq!(mu, 0.0);
        assert_eq!(eps, 0.0);
    }

    #[test]
    fn unmixed_mapping_has_zero_spread() {
        // Dual-rail states are unmixed, so ε = 0 for any map.
        let enc = DualRailEncoding;
        let swap = |a: &Occupation, b: &Occupation| {
            if a.counts() == [0, 1] && b.counts() == [1, 0] {
                c64(0.8, 0.6)
            } else {
                c64(0.0, 0.0)
            }
        };
        let (mu, eps) = implement_bounds(&enc, swap, 0, 1);
        assert!((mu - 1.0).abs() < 1e-12);
        assert_eq!(eps, 0.0);
    }

    #[test]
    fn bounds_are_ordered() {
        let enc = ParityEncoding::coherent(3, c64(0.9, 0.2), 50, 1e-10).unwrap();
        let messy = |a: &Occupation, b: &Occupation| {
            let (n, m) = (a.count(0) as f64, b.count(0) as f64);
            c64(((n + 1.0) * (m + 2.0)).recip(), (n - m) * 0.01)
        };
        for b_in in 0..3 {
            for b_out in 0..3 {
                let (mu, eps) = implement_bounds(&enc, &messy, b_in, b_out);
                assert!(eps >= 0.0);
                assert!(mu >= 0.0);
            }
        }
    }

    #[test]
    fn exact_dual_rail_gate_has_unit_floor_and_cap() {
        // A single-qubit gate on the dual-rail encoding: B[W] with W chosen
        // so the single-photon sector matches the theory matrix.
        let theory = crate::rng::random_unitary(2, &mut crate::rng::fixture_rng(11));
        let mut w = Mat::zeros(2, 2);
        for i in 0..2 {
            for j in 0..2 {
                // dit 0 lives on mode 1, dit 1 on mode 0.
                w[(1 - i, 1 - j)] = theory.entry(i, j);
            }
        }
        let w = UnitaryMatrix::new(w).unwrap();
        let enc = DualRailEncoding;
        let phys = |a: &Occupation, b: &Occupation| functor::element_unchecked(&w, a, b);
        let est = floor_cap_estimate(&enc, theory.mat(), phys, 25, 5);
        assert_eq!(est.verdict, EquivalenceVerdict::EquivalentHeuristic);
        assert!((est.f_hat - 1.0).abs() < 1e-9, "f_hat {}", est.f_hat);
        assert!((est.c_hat - 1.0).abs() < 1e-9, "c_hat {}", est.c_hat);
    }

    #[test]
    fn zero_denominator_with_signal_is_violated() {
        let enc = DualRailEncoding;
        let dead = |_: &Occupation, _: &Occupation| c64(0.0, 0.0);
        let theory = Mat::identity(2);
        let est = floor_cap_estimate(&enc, &theory, dead, 4, 3);
        assert_eq!(est.verdict, EquivalenceVerdict::Violated);
    }

    #[test]
    fn all_zero_pairs_are_vacuous() {
        let enc = DualRailEncoding;
        let dead = |_: &Occupation, _: &Occupation| c64(0.0, 0.0);
        let theory = Mat::zeros(2, 2);
        let est = floor_cap_estimate(&enc, &theory, dead, 0, 3);
        assert_eq!(est.verdict, EquivalenceVerdict::Vacuous);
    }

    #[test]
    fn mismatched_gate_shows_spread() {
        let theory = crate::rng::random_unitary(2, &mut crate::rng::fixture_rng(21));
        let other = crate::rng::random_unitary(2, &mut crate::rng::fixture_rng(22));
        let mut w = Mat::zeros(2, 2);
        for i in 0..2 {
            for j in 0..2 {
                w[(1 - i, 1 - j)] = other.entry(i, j);
            }
        }
        let w = UnitaryMatrix::new(w).unwrap();
        let enc = DualRailEncoding;
        let phys = |a: &Occupation, b: &Occupation| functor::element_unchecked(&w, a, b);
        let est = floor_cap_estimate(&enc, theory.mat(), phys, 30, 7);
        assert!(est.c_hat > est.f_hat + 1e-6, "expected visible spread");
    }
}
