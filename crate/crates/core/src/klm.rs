//! Gates built from beam splitters and post-selection: non-linear diagonal
//! gates, the non-linear sign gate, the Hadamard splitter, and the
//! controlled-Z construction.
//!
//! A non-linear diagonal gate funnels the internal photons of a one-loop
//! circuit through a sequence of time-bins with fixed preparation and
//! measurement counts. When the photon counts balance, conservation makes
//! the surviving internal map diagonal: ⟨m| picks up a scalar p[m]. Tuning
//! the beam-splitter angles calibrates relationships among the p[m].
//!
//! The non-linear sign gate is the two-stage instance that achieves
//! p[0] = p[1] = −p[2] = p; combining two of them between Hadamard
//! splitters flips the sign of the two-photon coincidence and nothing else,
//! which is the controlled-Z gate on dual-rail qubits.

use alloc::vec::Vec;

use core::f64::consts::SQRT_2;

use num_complex::Complex64;
use num_traits::Float;

use crate::circuit::BeamSplitterConfig;
use crate::error::Error;
use crate::fock::{FockVector, Occupation};
use crate::functor;
use crate::matrix::{Mat, UnitaryMatrix};
use crate::single_loop::loop_block;

/// One time-bin of a non-linear diagonal gate: a beam-splitter setting with
/// the photon counts prepared on the input edge and demanded on the output
/// edge.
#[derive(Debug, Clone, Copy)]
pub struct NdStage {
    pub config: BeamSplitterConfig,
    pub n_minus: u32,
    pub n_plus: u32,
}

/// A sequence of stages whose prepared and measured totals balance.
#[derive(Debug, Clone)]
pub struct NonlinearDiagonalSpec {
    pub stages: Vec<NdStage>,
}

impl NonlinearDiagonalSpec {
    pub fn total_in(&self) -> u32 {
        self.stages.iter().map(|s| s.n_minus).sum()
    }

    pub fn total_out(&self) -> u32 {
        self.stages.iter().map(|s| s.n_plus).sum()
    }
}

/// The diagonal coefficients p[m] of a non-linear diagonal gate.
#[derive(Debug, Clone)]
pub struct DiagonalGate {
    coefficients: Vec<Complex64>,
}

impl DiagonalGate {
    /// p[m]; zero beyond the tabulated range.
    pub fn coefficient(&self, m: u32) -> Complex64 {
        self.coefficients.get(m as usize).copied().unwrap_or(Complex64::new(0.0, 0.0))
    }

    pub fn coefficients(&self) -> &[Complex64] {
        &self.coefficients
    }

    pub fn m_max(&self) -> u32 {
        self.coefficients.len() as u32 - 1
    }
}

/// Evaluates the diagonal coefficients by chaining the per-stage loop maps.
/// Fails if the stage photon counts do not balance.
pub fn nd_gate(spec: &NonlinearDiagonalSpec, m_max: u32) -> Result<DiagonalGate, Error> {
    let (total_in, total_out) = (spec.total_in(), spec.total_out());
    if total_in != total_out {
        return Err(Error::DiagonalityViolated { total_in, total_out });
    }
    // Intermediate counts can overshoot m_max by at most the prepared total.
    let headroom = m_max + total_in;
    let blocks: Vec<_> = spec
        .stages
        .iter()
        .map(|s| loop_block(&s.config, s.n_minus, s.n_plus, headroom))
        .collect();
    let mut coefficients = Vec::with_capacity(m_max as usize + 1);
    for m in 0..=m_max {
        let mut amp = Complex64::new(1.0, 0.0);
        let mut current = Some(m);
        for block in &blocks {
            match current {
                Some(c) => {
                    amp *= block.amplitude(c);
                    current = block.target(c);
                }
                None => {
                    amp = Complex64::new(0.0, 0.0);
                    break;
                }
            }
        }
        coefficients.push(if current.is_some() { amp } else { Complex64::new(0.0, 0.0) });
    }
    Ok(DiagonalGate { coefficients })
}

/// Result summary for a constructed gate.
#[derive(Debug, Clone)]
pub struct GateReport {
    /// Diagonal coefficients per internal photon count.
    pub coefficients: Vec<Complex64>,
    /// Probability of the post-selection succeeding on the gate's subspace.
    pub success_probability: f64,
    /// Largest deviation from the target action.
    pub max_deviation: f64,
}

/// The positive scalar p of the non-linear sign gate.
pub fn ns_amplitude() -> f64 {
    ((3.0 - SQRT_2) / 7.0).sqrt()
}

/// p² = (3 − √2)/7.
pub fn ns_success_probability() -> f64 {
    (3.0 - SQRT_2) / 7.0
}

/// The two beam-splitter settings of the non-linear sign gate. The free
/// phases τ₁, τ₂ are fixed to zero, which drives both γ solutions to zero;
/// ρ never enters the diagonal cases and is zero as well. cosθ₂ keeps the
/// negative branch.
pub fn ns_configs() -> (BeamSplitterConfig, BeamSplitterConfig) {
    let theta1 = ((3.0 - SQRT_2) / 7.0).sqrt().acos();
    let theta2 = (-(5.0 - 3.0 * SQRT_2).sqrt()).acos();
    (
        BeamSplitterConfig::new(theta1, 0.0, 0.0, 0.0),
        BeamSplitterConfig::new(theta2, 0.0, 0.0, 0.0),
    )
}



/// Residuals of the three phase conditions and two angle conditions that
/// define the non-linear sign gate, evaluated at the shipped constants.
pub fn ns_condition_residuals() -> [f64; 5] {
    let (cfg1, cfg2) = ns_configs();
    let (g1, t1) = (cfg1.gamma, cfg1.tau);
    let (g2, t2) = (cfg2.gamma, cfg2.tau);
    let c1 = cfg1.theta.cos();
    let c2 = cfg2.theta.cos();
    [
        (g1 + t1).abs(),
        (2.0 * g1 + g2 - t2).abs(),
        (3.0 * g1 - t1 + 2.0 * g2 - 2.0 * t2).abs(),
        (c1 + (1.0 - 2.0 * c1 * c1) * c2).abs(),
        (c1 - c1 * (2.0 - 3.0 * c1 * c1) * c2 * c2).abs(),
    ]
}

/// The non-linear sign gate: a two-stage diagonal gate acting as
/// (p, p, −p) on photon counts 0, 1, 2.
pub struct NsGate {
    pub spec: NonlinearDiagonalSpec,
    pub gate: DiagonalGate,
    pub report: GateReport,
}

pub fn nonlinear_sign() -> NsGate {
    let (cfg1, cfg2) = ns_configs();
    let spec = NonlinearDiagonalSpec {
        stages: alloc::vec![
            NdStage { config: cfg1, n_minus: 1, n_plus: 1 },
            NdStage { config: cfg2, n_minus: 0, n_plus: 0 },
        ],
    };
    let gate = nd_gate(&spec, 4).expect("balanced by construction");
    let p = ns_amplitude();
    let target = [p, p, -p];
    let max_deviation = target
        .iter()
        .enumerate()
        .map(|(m, t)| (gate.coefficient(m as u32) - Complex64::new(*t, 0.0)).norm())
        .fold(0.0, f64::max);
    let report = GateReport {
        coefficients: gate.coefficients().to_vec(),
        success_probability: ns_success_probability(),
        max_deviation,
    };
    NsGate { spec, gate, report }
}

/// The Hadamard matrix, exactly.
pub fn hadamard_bs() -> UnitaryMatrix {
    let s = core::f64::consts::FRAC_1_SQRT_2;
    let c = |re| Complex64::new(re, 0.0);
    UnitaryMatrix::new_unchecked(Mat::from_rows(alloc::vec![
        alloc::vec![c(s), c(s)],
        alloc::vec![c(s), c(-s)],
    ]))
}

/// The controlled-Z construction: Hadamard, one sign gate on each mode,
/// Hadamard. Acting on two internal rails it leaves (0,0), (0,1) and (1,0)
/// alone and flips the sign of (1,1), all scaled by the joint post-selection
/// amplitude p².
pub struct CzGate {
    ns: DiagonalGate,
    pub report: GateReport,
}

pub fn controlled_z() -> CzGate {
    let ns = nonlinear_sign();
    let gate = CzGate { ns: ns.gate, report: ns.report };
    let p_sq = ns_success_probability();

    // Verify the action on the two-qubit internal basis.
    let mut max_deviation = 0.0f64;
    let mut success = 0.0f64;
    for (n1, n2, sign) in [(0, 0, 1.0), (0, 1, 1.0), (1, 0, 1.0), (1, 1, -1.0)] {
        let input = Occupation::new(alloc::vec![n1, n2]);
        let state = FockVector::basis_state(&input, 2);
        let out = gate.apply(&state).expect("two-mode state");
        let expected = state.scale(Complex64::new(sign * p_sq, 0.0));
        let mut dev = 0.0f64;
        for (occ, amp) in out.components() {
            dev = dev.max((amp - expected.amplitude(occ)).norm());
        }
        for (occ, amp) in expected.components() {
            dev = dev.max((amp - out.amplitude(occ)).norm());
        }
        max_deviation = max_deviation.max(dev);
        if (n1, n2) == (0, 0) {
            success = out.norm_sq();
        }
    }
    CzGate {
        report: GateReport {
            coefficients: gate.report.coefficients.clone(),
            success_probability: success,
            max_deviation,
        },
        ns: gate.ns,
    }
}

/// p⁴ = (11 − 6√2)/49.
pub fn cz_success_probability() -> f64 {
    (11.0 - 6.0 * SQRT_2) / 49.0
}

impl CzGate {
    /// Applies the post-selected gate to a two-mode internal state.
    pub fn apply(&self, state: &FockVector) -> Result<FockVector, Error> {
        if state.modes() != 2 {
            return Err(Error::DimensionMismatch { expected: 2, actual: state.modes() });
        }
        let h = hadamard_bs();
        let mixed = functor::apply(&h, state)?;
        let signed = FockVector::from_components(
            2,
            state.truncation(),
            mixed.components().map(|(occ, amp)| {
                let scale =
                    self.ns.coefficient(occ.count(0)) * self.ns.coefficient(occ.count(1));
                (occ.clone(), amp * scale)
            }),
        );
        functor::apply(&h, &signed)
    }
}

/// Checks the gate against the dual-rail two-qubit encoding: qubit value 1
/// puts the photon on the first rail of its pair, and the gate couples the
/// two value-1 rails. Post-selected success leaves diag(1, 1, 1, −1) scaled
/// by p².
#[derive(Debug, Clone)]
pub struct DualRailCzReport {
    /// Largest deviation from the scaled diagonal action on the four
    /// computation basis states.
    pub max_basis_deviation: f64,
    /// Deviation of the mapped Bell-like superposition from its target.
    pub superposition_deviation: f64,
    /// Squared norm of the post-selected branch (the success probability).
    pub success_probability: f64,
}

pub fn dual_rail_cz_check() -> DualRailCzReport {
    let gate = controlled_z();
    let p_sq = ns_success_probability();

    // Modes (q1 value-rail, q1 zero-rail, q2 value-rail, q2 zero-rail).
    let encode = |b1: u32, b2: u32| -> Occupation {
        Occupation::new(alloc::vec![b1, 1 - b1, b2, 1 - b2])
    };
    let apply_on_rails = |state: &FockVector| -> FockVector {
        // The gate couples modes 0 and 2; modes 1 and 3 ride along.
        let mut parts: Vec<(Occupation, Complex64)> = Vec::new();
        for (occ, amp) in state.components() {
            let rails = Occupation::new(alloc::vec![occ.count(0), occ.count(2)]);
            let image = gate
                .apply(&FockVector::basis_state(&rails, state.truncation()))
                .expect("two-mode rail state");
            for (rails_out, w) in image.components() {
                let full = Occupation::new(alloc::vec![
                    rails_out.count(0),
                    occ.count(1),
                    rails_out.count(1),
                    occ.count(3),
                ]);
                parts.push((full, amp * w));
            }
        }
        FockVector::from_components(4, state.truncation(), parts)
    };

    let mut max_basis_deviation = 0.0f64;
    let mut success = 0.0f64;
    for (b1, b2) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
        let sign = if (b1, b2) == (1, 1) { -1.0 } else { 1.0 };
        let input = FockVector::basis_state(&encode(b1, b2), 4);
        let out = apply_on_rails(&input);
        let expected = input.scale(Complex64::new(sign * p_sq, 0.0));
        let mut dev = 0.0f64;
        for (occ, amp) in out.components() {
            dev = dev.max((amp - expected.amplitude(occ)).norm());
        }
        for (occ, amp) in expected.components() {
            dev = dev.max((amp - out.amplitude(occ)).norm());
        }
        max_basis_deviation = max_basis_deviation.max(dev);
        if (b1, b2) == (0, 0) {
            success = out.norm_sq();
        }
    }

    // (|00⟩ + |11⟩)/√2 maps to (|00⟩ − |11⟩)/√2 after renormalization.
    let w = Complex64::new(core::f64::consts::FRAC_1_SQRT_2, 0.0);
    let bell_in = FockVector::from_components(
        4,
        4,
        [(encode(0, 0), w), (encode(1, 1), w)],
    );
    let out = apply_on_rails(&bell_in).normalized().expect("nonzero branch");
    let bell_target = FockVector::from_components(
        4,
        4,
        [(encode(0, 0), w), (encode(1, 1), -w)],
    );
    let mut superposition_deviation = 0.0f64;
    for (occ, amp) in bell_target.components() {
        superposition_deviation = superposition_deviation.max((amp - out.amplitude(occ)).norm());
    }

    DualRailCzReport { max_basis_deviation, superposition_deviation, success_probability: success }
}
