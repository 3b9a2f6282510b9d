//! Generating matrices for circuits and their spatial/temporal composition.
//!
//! A circuit over one time-bin carries photons from its internal and input
//! edges to its output and internal edges. Its generating matrix is indexed
//! with rows ordered (internal-in, external-in) and columns ordered
//! (external-out, internal-out), so it tiles into four blocks
//!
//! ```text
//! U = [ U_ie  U_ii ]      ie: internal -> external     ii: internal -> internal
//!     [ U_ee  U_ei ]      ee: external -> external     ei: external -> internal
//! ```
//!
//! With this labeling the mirror is the identity matrix (the loop reflects
//! out, the input reflects in) and the window is the swap (everything passes
//! straight through).
//!
//! Spatial composition joins two circuits at their common external system;
//! temporal composition runs them over consecutive time-bins through their
//! common internal system. Both are ordinary block products of the
//! generating matrices, and they satisfy the interchange law entrywise in
//! this mode order.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use core::f64::consts::{FRAC_PI_2, FRAC_PI_4};

use num_complex::Complex64;

use crate::error::Error;
use crate::math::{cis, cos_exact, sin_exact};
use crate::matrix::{Mat, UnitaryMatrix};

/// Beam-splitter angles. The transmittance is cos²θ and the reflectance
/// sin²θ; γ is a global phase, τ the transmitted-phase difference and ρ the
/// reflected-phase difference.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BeamSplitterConfig {
    pub theta: f64,
    pub gamma: f64,
    pub rho: f64,
    pub tau: f64,
}

impl BeamSplitterConfig {
    /// Full reflection: the loop exits, the input enters the loop.
    pub const MIRROR: BeamSplitterConfig =
        BeamSplitterConfig { theta: FRAC_PI_2, gamma: FRAC_PI_2, rho: FRAC_PI_2, tau: 0.0 };

    /// Full transmission: loop and rail pass through undisturbed.
    pub const WINDOW: BeamSplitterConfig =
        BeamSplitterConfig { theta: 0.0, gamma: 0.0, rho: 0.0, tau: 0.0 };

    /// The balanced splitter whose generating matrix is the Hadamard matrix.
    /// Solving the four entry equations gives θ = π/4 with all phases zero.
    pub const HADAMARD: BeamSplitterConfig =
        BeamSplitterConfig { theta: FRAC_PI_4, gamma: 0.0, rho: 0.0, tau: 0.0 };

    pub fn new(theta: f64, gamma: f64, rho: f64, tau: f64) -> Self {
        BeamSplitterConfig { theta, gamma, rho, tau }
    }
}

/// The 2×2 generating matrix
///
/// ```text
/// e^{iγ} [ e^{-iρ} sinθ   e^{-iτ} cosθ ]
///        [ e^{iτ}  cosθ  -e^{iρ}  sinθ ]
/// ```
///
/// Phases are combined before exponentiating so the mirror and window
/// constants produce exact 0/1 entries.
pub fn beam_splitter(config: &BeamSplitterConfig) -> UnitaryMatrix {
    let s = sin_exact(config.theta);
    let c = cos_exact(config.theta);
    let top_left = cis(config.gamma - config.rho) * s;
    let top_right = cis(config.gamma - config.tau) * c;
    let bottom_left = cis(config.gamma + config.tau) * c;
    let bottom_right = -cis(config.gamma + config.rho) * s;
    UnitaryMatrix::new_unchecked(Mat::from_rows(alloc::vec![
        alloc::vec![top_left, top_right],
        alloc::vec![bottom_left, bottom_right],
    ]))
}

/// A unitary with a declared internal/external mode split.
///
/// Rows are ordered (internal-in × M, external-in × N); columns are ordered
/// (external-out × N, internal-out × M).
#[derive(Debug, Clone, PartialEq)]
pub struct PartitionedUnitary {
    matrix: UnitaryMatrix,
    internal: usize,
    external: usize,
}

impl PartitionedUnitary {
    pub fn new(matrix: UnitaryMatrix, internal: usize) -> Result<Self, Error> {
        if internal > matrix.dim() {
            return Err(Error::DimensionMismatch { expected: matrix.dim(), actual: internal });
        }
        let external = matrix.dim() - internal;
        Ok(PartitionedUnitary { matrix, internal, external })
    }

    pub fn matrix(&self) -> &UnitaryMatrix {
        &self.matrix
    }

    pub fn internal(&self) -> usize {
        self.internal
    }

    pub fn external(&self) -> usize {
        self.external
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    /// Internal-in rows → external-out columns (M×N).
    pub fn u_ie(&self) -> Mat {
        self.matrix.mat().block(0, 0, self.internal, self.external)
    }

    /// Internal-in rows → internal-out columns (M×M).
    pub fn u_ii(&self) -> Mat {
        self.matrix.mat().block(0, self.external, self.internal, self.internal)
    }

    /// External-in rows → external-out columns (N×N).
    pub fn u_ee(&self) -> Mat {
        self.matrix.mat().block(self.internal, 0, self.external, self.external)
    }

    /// External-in rows → internal-out columns (N×M).
    pub fn u_ei(&self) -> Mat {
        self.matrix.mat().block(self.internal, self.external, self.external, self.internal)
    }
}

/// A circuit operation: a partitioned generating matrix plus the trail of
/// composition steps that produced it.
#[derive(Debug, Clone)]
pub struct CircuitOp {
    generator: PartitionedUnitary,
    trail: Vec<String>,
}

impl CircuitOp {
    pub fn new(generator: PartitionedUnitary, label: impl Into<String>) -> Self {
        CircuitOp { generator, trail: alloc::vec![label.into()] }
    }

    /// A one-loop, one-rail circuit around a single beam splitter.
    pub fn single_loop(config: &BeamSplitterConfig) -> Self {
        let generator = PartitionedUnitary::new(beam_splitter(config), 1).expect("2x2 split");
        CircuitOp::new(generator, format!("bs(theta={})", config.theta))
    }

    /// A circuit with no internal modes, from any unitary on the externals.
    pub fn pure_external(matrix: UnitaryMatrix, label: impl Into<String>) -> Self {
        let generator = PartitionedUnitary::new(matrix, 0).expect("zero split");
        CircuitOp::new(generator, label)
    }

    pub fn generator(&self) -> &PartitionedUnitary {
        &self.generator
    }

    pub fn internal(&self) -> usize {
        self.generator.internal()
    }

    pub fn external(&self) -> usize {
        self.generator.external()
    }

    pub fn trail(&self) -> &[String] {
        &self.trail
    }

    fn composed(generator: PartitionedUnitary, kind: &str, c1: &CircuitOp, c2: &CircuitOp) -> Self {
        let mut trail = Vec::with_capacity(c1.trail.len() + c2.trail.len() + 1);
        trail.push(String::from(kind));
        trail.extend(c1.trail.iter().cloned());
        trail.extend(c2.trail.iter().cloned());
        CircuitOp { generator, trail }
    }
}

/// Joins `c1` and `c2` at their common external system: `c1`'s output edges
/// feed `c2`'s input edges. The composite generator is
///
/// ```text
/// [ U2_ie        U2_ii        0     ]
/// [ U1_ie·U2_ee  U1_ie·U2_ei  U1_ii ]
/// [ U1_ee·U2_ee  U1_ee·U2_ei  U1_ei ]
/// ```
///
/// with internal modes ordered (internal of c2, internal of c1).
pub fn spatial_compose(c1: &CircuitOp, c2: &CircuitOp) -> Result<CircuitOp, Error> {
    if c1.external() != c2.external() {
        return Err(Error::IncompatibleComposition(format!(
            "spatial composition needs matching external systems ({} vs {})",
            c1.external(),
            c2.external()
        )));
    }
    let (g1, g2) = (c1.generator(), c2.generator());
    let (m1, m2, n) = (g1.internal(), g2.internal(), g1.external());
    let mut out = Mat::zeros(m1 + m2 + n, m1 + m2 + n);
    out.set_block(0, 0, &g2.u_ie());
    out.set_block(0, n, &g2.u_ii());
    out.set_block(m2, 0, &g1.u_ie().mul(&g2.u_ee()));
    out.set_block(m2, n, &g1.u_ie().mul(&g2.u_ei()));
    out.set_block(m2, n + m2, &g1.u_ii());
    out.set_block(m2 + m1, 0, &g1.u_ee().mul(&g2.u_ee()));
    out.set_block(m2 + m1, n, &g1.u_ee().mul(&g2.u_ei()));
    out.set_block(m2 + m1, n + m2, &g1.u_ei());
    let generator = PartitionedUnitary::new(UnitaryMatrix::new_unchecked(out), m1 + m2)?;
    Ok(CircuitOp::composed(generator, "spatial", c1, c2))
}

/// Runs `c1` then `c2` over consecutive time-bins through their common
/// internal system. The composite generator is
///
/// ```text
/// [ U1_ie  U1_ii·U2_ie  U1_ii·U2_ii ]
/// [ U1_ee  U1_ei·U2_ie  U1_ei·U2_ii ]
/// [ 0      U2_ee        U2_ei       ]
/// ```
///
/// with external modes ordered (externals of c1, externals of c2).
pub fn temporal_compose(c1: &CircuitOp, c2: &CircuitOp) -> Result<CircuitOp, Error> {
    if c1.internal() != c2.internal() {
        return Err(Error::IncompatibleComposition(format!(
            "temporal composition needs matching internal systems ({} vs {})",
            c1.internal(),
            c2.internal()
        )));
    }
    let (g1, g2) = (c1.generator(), c2.generator());
    let (m, n1, n2) = (g1.internal(), g1.external(), g2.external());
    let mut out = Mat::zeros(m + n1 + n2, m + n1 + n2);
    out.set_block(0, 0, &g1.u_ie());
    out.set_block(0, n1, &g1.u_ii().mul(&g2.u_ie()));
    out.set_block(0, n1 + n2, &g1.u_ii().mul(&g2.u_ii()));
    out.set_block(m, 0, &g1.u_ee());
    out.set_block(m, n1, &g1.u_ei().mul(&g2.u_ie()));
    out.set_block(m, n1 + n2, &g1.u_ei().mul(&g2.u_ii()));
    out.set_block(m + n1, n1, &g2.u_ee());
    out.set_block(m + n1, n1 + n2, &g2.u_ei());
    let generator = PartitionedUnitary::new(UnitaryMatrix::new_unchecked(out), m)?;
    Ok(CircuitOp::composed(generator, "temporal", c1, c2))
}

/// Builds `(c11 ⊘ c21) ⊖ (c12 ⊘ c22)` and `(c11 ⊖ c12) ⊘ (c21 ⊖ c22)` and
/// returns the largest entry deviation between the two generators. The mode
/// orders agree, so this is plain matrix comparison.
pub fn verify_interchange(
    c11: &CircuitOp,
    c21: &CircuitOp,
    c12: &CircuitOp,
    c22: &CircuitOp,
) -> Result<f64, Error> {
    let left = temporal_compose(&spatial_compose(c11, c21)?, &spatial_compose(c12, c22)?)?;
    let right = spatial_compose(&temporal_compose(c11, c12)?, &temporal_compose(c21, c22)?)?;
    if left.generator().internal() != right.generator().internal()
        || left.generator().dim() != right.generator().dim()
    {
        return Err(Error::IncompatibleComposition(String::from(
            "interchange operands produced mismatched partitions",
        )));
    }
    Ok(left.generator().matrix().mat().max_abs_diff(right.generator().matrix().mat()))
}

/// The 0/1 matrix routing mode `i` to mode `perm[i]`.
pub fn permutation(perm: &[usize]) -> Result<UnitaryMatrix, Error> {
    let n = perm.len();
    let mut seen = alloc::vec![false; n];
    for &p in perm {
        if p >= n || seen[p] {
            return Err(Error::MalformedPermutation);
        }
        seen[p] = true;
    }
    let mut mat = Mat::zeros(n, n);
    for (i, &p) in perm.iter().enumerate() {
        mat[(i, p)] = Complex64::new(1.0, 0.0);
    }
    Ok(UnitaryMatrix::new_unchecked(mat))
}

/// The mirror as a one-loop circuit: generating matrix exactly I.
pub fn mirror() -> CircuitOp {
    CircuitOp::single_loop(&BeamSplitterConfig::MIRROR)
}

/// The window as a one-loop circuit: generating matrix exactly X.
pub fn window() -> CircuitOp {
    CircuitOp::single_loop(&BeamSplitterConfig::WINDOW)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn mirror_is_exactly_identity() {
        let u = beam_splitter(&BeamSplitterConfig::MIRROR);
        assert_eq!(u.mat().max_abs_diff(&Mat::identity(2)), 0.0);
    }

    #[test]
    fn window_is_exactly_swap() {
        let u = beam_splitter(&BeamSplitterConfig::WINDOW);
        let x = Mat::from_rows(vec![
            vec![c(0.0, 0.0), c(1.0, 0.0)],
            vec![c(1.0, 0.0), c(0.0, 0.0)],
        ]);
        assert_eq!(u.mat().max_abs_diff(&x), 0.0);
    }

    #[test]
    fn hadamard_config_solves_to_hadamard() {
        let u = beam_splitter(&BeamSplitterConfig::HADAMARD);
        let s = core::f64::consts::FRAC_1_SQRT_2;
        let h = Mat::from_rows(vec![vec![c(s, 0.0), c(s, 0.0)], vec![c(s, 0.0), c(-s, 0.0)]]);
        assert!(u.mat().max_abs_diff(&h) < 1e-15);
    }

    #[test]
    fn beam_splitter_is_unitary_for_generic_angles() {
        let u = beam_splitter(&BeamSplitterConfig::new(0.7, 0.3, 1.1, -0.4));
        assert!(u.mat().unitarity_defect() < 1e-15);
    }

    fn random_loop(seed: &mut u64) -> CircuitOp {
        let mut next = || {
            *seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((*seed >> 11) as f64 / (1u64 << 53) as f64) * 4.0 - 2.0
        };
        CircuitOp::single_loop(&BeamSplitterConfig::new(next(), next(), next(), next()))
    }

    #[test]
    fn spatial_with_pure_external_identity_embeds() {
        let mut seed = 7u64;
        let c1 = random_loop(&mut seed);
        let id = CircuitOp::pure_external(UnitaryMatrix::identity(1), "id");
        let composed = spatial_compose(&c1, &id).unwrap();
        // M2 = 0, so the composite generator equals c1's.
        assert_eq!(
            composed.generator().matrix().mat().max_abs_diff(c1.generator().matrix().mat()),
            0.0
        );
        assert_eq!(composed.internal(), 1);
    }

    #[test]
    fn spatial_of_single_loops_matches_padded_product() {
        let mut seed = 11u64;
        let c1 = random_loop(&mut seed);
        let c2 = random_loop(&mut seed);
        let composed = spatial_compose(&c1, &c2).unwrap();
        // Independent route: (1 ⊕ U1)(U2 ⊕ 1).
        let u1 = c1.generator().matrix().mat();
        let u2 = c2.generator().matrix().mat();
        let lhs = Mat::identity(1).direct_sum(u1);
        let rhs = u2.direct_sum(&Mat::identity(1));
        let expected = lhs.mul(&rhs);
        assert!(composed.generator().matrix().mat().max_abs_diff(&expected) < 1e-15);
        assert_eq!(composed.internal(), 2);
        assert_eq!(composed.external(), 1);
    }

    #[test]
    fn spatial_with_trivial_internals_is_matrix_product() {
        let mut seed = 13u64;
        let u1 = random_loop(&mut seed).generator().matrix().clone();
        let u2 = random_loop(&mut seed).generator().matrix().clone();
        let c1 = CircuitOp::pure_external(u1.clone(), "u1");
        let c2 = CircuitOp::pure_external(u2.clone(), "u2");
        let composed = spatial_compose(&c1, &c2).unwrap();
        let expected = u1.mul(&u2);
        assert!(composed.generator().matrix().mat().max_abs_diff(expected.mat()) < 1e-15);
    }

    #[test]
    fn temporal_of_single_loops_matches_padded_product() {
        let mut seed = 17u64;
        let c1 = random_loop(&mut seed);
        let c2 = random_loop(&mut seed);
        let composed = temporal_compose(&c1, &c2).unwrap();
        // Independent route: (U1 ⊕ 1)(1 ⊕ U2).
        let u1 = c1.generator().matrix().mat();
        let u2 = c2.generator().matrix().mat();
        let expected = u1.direct_sum(&Mat::identity(1)).mul(&Mat::identity(1).direct_sum(u2));
        assert!(composed.generator().matrix().mat().max_abs_diff(&expected) < 1e-15);
        assert_eq!(composed.internal(), 1);
        assert_eq!(composed.external(), 2);
    }

    #[test]
    fn temporal_with_trivial_internals_is_direct_sum() {
        let mut seed = 19u64;
        let u1 = random_loop(&mut seed).generator().matrix().clone();
        let u2 = random_loop(&mut seed).generator().matrix().clone();
        let c1 = CircuitOp::pure_external(u1.clone(), "u1");
        let c2 = CircuitOp::pure_external(u2.clone(), "u2");
        let composed = temporal_compose(&c1, &c2).unwrap();
        let expected = u1.mat().direct_sum(u2.mat());
        assert!(composed.generator().matrix().mat().max_abs_diff(&expected) < 1e-15);
    }

    #[test]
    fn temporal_with_identity_loop_pads_a_time_bin() {
        let mut seed = 23u64;
        let c1 = random_loop(&mut seed);
        let composed = temporal_compose(&c1, &window()).unwrap();
        // The window leaves the loop state alone and passes the new bin's
        // external mode straight through.
        let g = composed.generator();
        assert_eq!(g.dim(), 3);
        assert!((g.matrix().entry(2, 1) - c(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn interchange_on_mirrors_is_exact() {
        let m = mirror();
        let dev = verify_interchange(&m, &m, &m, &m).unwrap();
        assert_eq!(dev, 0.0);
    }

    #[test]
    fn interchange_on_mixed_mirrors_and_windows_is_exact() {
        let cases = [mirror(), window()];
        for a in 0..2 {
            for b in 0..2 {
                for c in 0..2 {
                    for d in 0..2 {
                        let dev =
                            verify_interchange(&cases[a], &cases[b], &cases[c], &cases[d]).unwrap();
                        assert_eq!(dev, 0.0, "case {a}{b}{c}{d}");
                    }
                }
            }
        }
    }

    #[test]
    fn interchange_on_random_loops() {
        let mut seed = 29u64;
        for _ in 0..20 {
            let (c11, c21) = (random_loop(&mut seed), random_loop(&mut seed));
            let (c12, c22) = (random_loop(&mut seed), random_loop(&mut seed));
            let dev = verify_interchange(&c11, &c21, &c12, &c22).unwrap();
            assert!(dev < 1e-12, "deviation {dev}");
        }
    }

    #[test]
    fn compositions_stay_unitary() {
        let mut seed = 31u64;
        let mut op = random_loop(&mut seed);
        for _ in 0..8 {
            op = spatial_compose(&op, &random_loop(&mut seed)).unwrap();
        }
        assert!(op.generator().matrix().mat().unitarity_defect() < 1e-12);
    }

    #[test]
    fn permutation_cases() {
        let id = permutation(&[0, 1, 2]).unwrap();
        assert_eq!(id.mat().max_abs_diff(&Mat::identity(3)), 0.0);

        let swap = permutation(&[1, 0]).unwrap();
        assert_eq!(swap.entry(0, 1), c(1.0, 0.0));
        assert_eq!(swap.entry(1, 0), c(1.0, 0.0));

        // A 3-cycle squared is the inverse cycle.
        let cycle = permutation(&[1, 2, 0]).unwrap();
        let squared = cycle.mul(&cycle);
        let inverse = permutation(&[2, 0, 1]).unwrap();
        assert_eq!(squared.mat().max_abs_diff(inverse.mat()), 0.0);
        assert_eq!(cycle.mul(&squared).mat().max_abs_diff(&Mat::identity(3)), 0.0);

        assert!(matches!(permutation(&[0, 0]), Err(Error::MalformedPermutation)));
        assert!(matches!(permutation(&[0, 2]), Err(Error::MalformedPermutation)));
    }

    #[test]
    fn incompatible_compositions_are_rejected() {
        let a = mirror();
        let b = CircuitOp::pure_external(UnitaryMatrix::identity(2), "id2");
        assert!(spatial_compose(&a, &b).is_err());
        assert!(temporal_compose(&a, &b).is_err());
    }
}
