//! Closed-form amplitudes for the one-loop photonic computer.
//!
//! With the input prepared with n⁻ photons and the output measured with n⁺
//! photons, the loop does not mix internal basis states: ⟨m⁻| maps to a
//! scalar multiple of ⟨m⁺| with m⁺ = m⁻ + n⁻ − n⁺. The scalar is an explicit
//! trigonometric expression in the beam-splitter angles, evaluated here
//! directly. The same numbers fall out of the permanent route on the 2-mode
//! arrangement; the two paths check each other in the verification suites.

use alloc::vec::Vec;

use num_complex::Complex64;
use num_traits::Float;

use crate::circuit::BeamSplitterConfig;
use crate::math::{binomial, cis, cos_exact, ln_factorial, sin_exact};

/// The internal-state amplitude ⟨m⁻ n⁻|B[U]|n⁺ m⁺⟩ of the one-loop circuit,
/// with m⁺ fixed by photon conservation. Zero outside the conservation cone
/// (m⁻ + n⁻ < n⁺).
pub fn loop_amplitude(
    config: &BeamSplitterConfig,
    m_minus: u32,
    n_minus: u32,
    n_plus: u32,
) -> Complex64 {
    if m_minus + n_minus < n_plus {
        return Complex64::new(0.0, 0.0);
    }
    let m_plus = m_minus + n_minus - n_plus;
    let (mm, nm, np) = (m_minus as f64, n_minus as f64, n_plus as f64);

    let prefactor =
        (0.5 * (ln_factorial(n_plus) + ln_factorial(m_plus)
            - ln_factorial(m_minus)
            - ln_factorial(n_minus)))
        .exp();
    let phase = cis((mm + nm) * config.gamma - (mm - np) * config.tau + (nm - np) * config.rho);
    let sign = if m_plus.min(n_minus) % 2 == 0 { 1.0 } else { -1.0 };

    let cos_t = cos_exact(config.theta);
    let sin_t = sin_exact(config.theta);
    let cos_pow = cos_t.powi((mm - np).abs() as i32);
    let sin_pow = sin_t.powi((nm - np).abs() as i32);

    let kappa = m_minus.min(n_plus) + n_minus.min(n_plus) - n_plus;
    let mut series = 0.0;
    for eta in 0..=kappa {
        let a = binomial(m_minus, m_minus.min(n_plus) as i64 - eta as i64);
        let b = binomial(n_minus, n_minus.min(n_plus) as i64 - (kappa - eta) as i64);
        let sign_eta = if eta % 2 == 0 { 1.0 } else { -1.0 };
        series += a * b * sign_eta * cos_t.powi(2 * eta as i32) * sin_t.powi(2 * (kappa - eta) as i32);
    }

    phase * (prefactor * sign * cos_pow * sin_pow * series)
}

/// The loop's internal map for fixed preparation/measurement counts: a pure
/// shift by n⁻ − n⁺ with per-count scalars, tabulated for m⁻ = 0..=m_max.
#[derive(Debug, Clone)]
pub struct LoopBlock {
    n_minus: u32,
    n_plus: u32,
    amplitudes: Vec<Complex64>,
}

impl LoopBlock {
    /// Scalar applied to ⟨m⁻|; zero outside the conservation cone.
    pub fn amplitude(&self, m_minus: u32) -> Complex64 {
        self.amplitudes
            .get(m_minus as usize)
            .copied()
            .unwrap_or(Complex64::new(0.0, 0.0))
    }

    /// The internal count ⟨m⁻| is sent to, if any.
    pub fn target(&self, m_minus: u32) -> Option<u32> {
        (m_minus + self.n_minus).checked_sub(self.n_plus)
    }

    pub fn m_max(&self) -> u32 {
        self.amplitudes.len() as u32 - 1
    }
}

/// Tabulates the internal map ⟨m⁻| ↦ amp·⟨m⁻ + n⁻ − n⁺| up to `m_max`.
pub fn loop_block(
    config: &BeamSplitterConfig,
    n_minus: u32,
    n_plus: u32,
    m_max: u32,
) -> LoopBlock {
    let amplitudes =
        (0..=m_max).map(|m| loop_amplitude(config, m, n_minus, n_plus)).collect();
    LoopBlock { n_minus, n_plus, amplitudes }
}

/// The vacuum-diagonal scalar e^{im(γ−τ)} cosᵐθ.
pub fn vacuum_diagonal(config: &BeamSplitterConfig, m: u32) -> Complex64 {
    cis(m as f64 * (config.gamma - config.tau)) * cos_exact(config.theta).powi(m as i32)
}

/// The one-photon-diagonal scalar
/// −e^{i((m+1)γ−(m−1)τ)} cos^{m−1}θ (m − (1+m)cos²θ), valid for m ≥ 1.
pub fn one_photon_diagonal(config: &BeamSplitterConfig, m: u32) -> Complex64 {
    assert!(m >= 1);
    let mf = m as f64;
    let cos_t = cos_exact(config.theta);
    -cis((mf + 1.0) * config.gamma - (mf - 1.0) * config.tau)
        * cos_t.powi(m as i32 - 1)
        * (mf - (1.0 + mf) * cos_t * cos_t)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn config(theta: f64, gamma: f64, rho: f64, tau: f64) -> BeamSplitterConfig {
        BeamSplitterConfig::new(theta, gamma, rho, tau)
    }

    #[test]
    fn vacuum_case_matches_printed_form() {
        let cfg = config(0.8, 0.3, -0.2, 0.5);
        for m in 0..6 {
            let amp = loop_amplitude(&cfg, m, 0, 0);
            let expected = vacuum_diagonal(&cfg, m);
            assert!((amp - expected).norm() < 1e-13, "m={m}");
        }
    }

    #[test]
    fn one_photon_case_matches_printed_form() {
        let cfg = config(1.1, -0.7, 0.25, 0.9);
        for m in 1..6 {
            let amp = loop_amplitude(&cfg, m, 1, 1);
            let expected = one_photon_diagonal(&cfg, m);
            assert!((amp - expected).norm() < 1e-13, "m={m}");
        }
    }

    #[test]
    fn outside_conservation_cone_is_zero() {
        let cfg = config(0.5, 0.1, 0.2, 0.3);
        assert_eq!(loop_amplitude(&cfg, 0, 1, 3), c(0.0, 0.0));
        assert_eq!(loop_amplitude(&cfg, 1, 0, 2), c(0.0, 0.0));
    }

    #[test]
    fn single_photon_elements_match_matrix_entries() {
        // One photon through the loop reads entries of the 2x2 directly.
        let cfg = config(0.6, 0.4, -0.9, 1.3);
        let u = crate::circuit::beam_splitter(&cfg);
        // loop photon exits: (m⁻,n⁻,n⁺) = (1,0,1) picks out U_11.
        assert!((loop_amplitude(&cfg, 1, 0, 1) - u.entry(0, 0)).norm() < 1e-14);
        // input photon enters the loop: (0,1,0) picks out U_22.
        assert!((loop_amplitude(&cfg, 0, 1, 0) - u.entry(1, 1)).norm() < 1e-14);
        // pass-through: (0,1,1) picks out U_21.
        assert!((loop_amplitude(&cfg, 0, 1, 1) - u.entry(1, 0)).norm() < 1e-14);
    }

    #[test]
    fn columns_are_unit_norm() {
        // Fixed m⁻, n⁻: summing |amp|² over n⁺ exhausts a unitary column.
        let cfg = config(0.7, 0.2, 0.6, -0.3);
        for m_minus in 0..4 {
            for n_minus in 0..4 {
                let total: f64 = (0..=(m_minus + n_minus))
                    .map(|n_plus| loop_amplitude(&cfg, m_minus, n_minus, n_plus).norm_sqr())
                    .sum();
                assert!((total - 1.0).abs() < 1e-10, "m={m_minus} n={n_minus}: {total}");
            }
        }
    }

    #[test]
    fn phases_factor_out_of_the_zero_phase_amplitude() {
        let base = config(0.9, 0.0, 0.0, 0.0);
        let cfg = config(0.9, 0.37, -1.2, 0.64);
        for m_minus in 0..4 {
            for n_minus in 0..3 {
                for n_plus in 0..=(m_minus + n_minus) {
                    let bare = loop_amplitude(&base, m_minus, n_minus, n_plus);
                    let phase = cis((m_minus + n_minus) as f64 * cfg.gamma
                        - (m_minus as f64 - n_plus as f64) * cfg.tau
                        + (n_minus as f64 - n_plus as f64) * cfg.rho);
                    let full = loop_amplitude(&cfg, m_minus, n_minus, n_plus);
                    assert!((full - bare * phase).norm() < 1e-13);
                }
            }
        }
    }

    #[test]
    fn window_block_is_exactly_identity() {
        // The window leaves the loop undisturbed, so with nothing prepared
        // or measured the internal map is the identity.
        let block = loop_block(&BeamSplitterConfig::WINDOW, 0, 0, 5);
        for m in 0..=5 {
            assert_eq!(block.target(m), Some(m));
            assert_eq!(block.amplitude(m), c(1.0, 0.0), "m={m}");
        }
    }

    #[test]
    fn mirror_block_kills_loop_photons_under_vacuum() {
        // The mirror reflects the loop content out, so measuring vacuum
        // post-selects onto an empty loop.
        let block = loop_block(&BeamSplitterConfig::MIRROR, 0, 0, 5);
        assert_eq!(block.amplitude(0), c(1.0, 0.0));
        for m in 1..=5 {
            assert_eq!(block.amplitude(m), c(0.0, 0.0), "m={m}");
        }
    }

    #[test]
    fn mirror_block_shifts_a_prepared_photon_into_the_loop() {
        let block = loop_block(&BeamSplitterConfig::MIRROR, 1, 0, 5);
        assert_eq!(block.target(0), Some(1));
        assert_eq!(block.amplitude(0), c(1.0, 0.0));
        // Any loop photon would have reflected out, contradicting n⁺ = 0.
        for m in 1..=5 {
            assert_eq!(block.target(m), Some(m + 1));
            assert_eq!(block.amplitude(m), c(0.0, 0.0));
        }
    }

    #[test]
    fn starved_block_is_zero() {
        let block = loop_block(&config(0.4, 0.0, 0.0, 0.0), 0, 3, 2);
        for m in 0..=2 {
            assert_eq!(block.amplitude(m), c(0.0, 0.0));
            assert_eq!(block.target(m), None);
        }
    }
}
