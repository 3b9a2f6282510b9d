//! The single-rail photonic computer: a line of loops linked by a rail,
//! executed over time-bins, with a boson-sampling harness.
//!
//! A rail with `N_L` loops has `2·N_L + 1` edges: one input, one output,
//! `N_L` loop edges, and `N_L − 1` linking edges. Over `N_H` time-bins the
//! whole run is generated by a product of `N_H` block-diagonal unitary
//! matrices of dimension `2·N_L − 1 + N_H`, one 2×2 block per beam splitter.
//!
//! Mode bookkeeping: the composite rows are ordered (internal-in, one
//! external input per time-bin) and the columns (one external output per
//! time-bin, internal-out). Internal modes interleave from the output side
//! in: loop N_L, link N_L−1, loop N_L−1, ..., link 1, loop 1. Within
//! time-bin `t` (1-based), the splitter of loop `k` occupies the diagonal
//! 2×2 block at offset `t − 1 + 2(N_L − k)`; its lower index is the loop
//! content and the upper index the rail content arriving from the input
//! side. Content written to a column in one bin is read from the same row
//! in the next, so each linking edge delays the photon by one time-bin —
//! the unique wiring that keeps every per-bin matrix block-diagonal.

use alloc::vec::Vec;

use num_complex::Complex64;
use num_traits::Float;

use crate::circuit::{beam_splitter, BeamSplitterConfig, CircuitOp, PartitionedUnitary};
use crate::error::Error;
use crate::fock::{FockVector, Occupation};
use crate::matrix::{Mat, UnitaryMatrix};
use crate::measure::{
    outcome_distribution_state, sample_distribution, Histogram, OutcomeDistribution,
};
use crate::qudit::{truncated_coherent, ParityEncoding};

/// A grid of beam-splitter settings: one per (time-bin, loop).
#[derive(Debug, Clone)]
pub struct RailLayout {
    loops: usize,
    timebins: usize,
    configs: Vec<BeamSplitterConfig>,
}

impl RailLayout {
    pub fn new(
        loops: usize,
        timebins: usize,
        configs: Vec<BeamSplitterConfig>,
    ) -> Result<Self, Error> {
        assert!(loops >= 1 && timebins >= 1);
        if configs.len() != loops * timebins {
            return Err(Error::MalformedGrid { expected: loops * timebins, actual: configs.len() });
        }
        Ok(RailLayout { loops, timebins, configs })
    }

    /// All-mirror grid: the default, fully reflective rail.
    pub fn mirrors(loops: usize, timebins: usize) -> Self {
        RailLayout::new(loops, timebins, alloc::vec![BeamSplitterConfig::MIRROR; loops * timebins])
            .expect("sized grid")
    }

    pub fn with_config(mut self, timebin: usize, loop_index: usize, cfg: BeamSplitterConfig) -> Self {
        assert!(timebin < self.timebins && loop_index < self.loops);
        self.configs[timebin * self.loops + loop_index] = cfg;
        self
    }

    pub fn loops(&self) -> usize {
        self.loops
    }

    pub fn timebins(&self) -> usize {
        self.timebins
    }

    pub fn config(&self, timebin: usize, loop_index: usize) -> &BeamSplitterConfig {
        &self.configs[timebin * self.loops + loop_index]
    }

    /// Dimension of the generating matrix: 2·N_L − 1 + N_H.
    pub fn dimension(&self) -> usize {
        2 * self.loops - 1 + self.timebins
    }

    /// Number of internal modes (loops plus linking edges).
    pub fn internal_modes(&self) -> usize {
        2 * self.loops - 1
    }

    /// Physical edge count: input, output, loops, and links.
    pub fn edge_count(&self) -> usize {
        2 * self.loops + 1
    }

    /// A sub-rail over the time-bin range [from, to).
    pub fn slice(&self, from: usize, to: usize) -> RailLayout {
        assert!(from < to && to <= self.timebins);
        let configs = (from..to)
            .flat_map(|t| (0..self.loops).map(move |k| self.configs[t * self.loops + k]))
            .collect();
        RailLayout { loops: self.loops, timebins: to - from, configs }
    }

    /// Offset of loop `loop_index`'s block within the time-bin matrix.
    fn block_base(&self, timebin: usize, loop_index: usize) -> usize {
        timebin + 2 * (self.loops - 1 - loop_index)
    }
}

/// The per-time-bin generating matrix: identity except one 2×2 block per
/// loop, all blocks disjoint.
fn timebin_matrix(layout: &RailLayout, timebin: usize) -> Mat {
    let dim = layout.dimension();
    let mut m = Mat::identity(dim);
    for k in 0..layout.loops {
        let base = layout.block_base(timebin, k);
        let block = beam_splitter(layout.config(timebin, k));
        m.set_block(base, base, block.mat());
    }
    m
}

/// Builds the rail circuit: the ordered product of the per-time-bin
/// block-diagonal matrices, partitioned with one external mode per time-bin.
pub fn build_rail(layout: &RailLayout) -> Result<CircuitOp, Error> {
    let mut product = timebin_matrix(layout, 0);
    for t in 1..layout.timebins {
        product = product.mul(&timebin_matrix(layout, t));
    }
    let generator = PartitionedUnitary::new(
        UnitaryMatrix::new_unchecked(product),
        layout.internal_modes(),
    )?;
    Ok(CircuitOp::new(
        generator,
        alloc::format!("rail(loops={}, timebins={})", layout.loops, layout.timebins),
    ))
}

/// One time-bin of the rail as a circuit of its own (one external mode).
/// Temporally chaining these reproduces [`build_rail`].
pub fn per_bin_circuit(layout: &RailLayout, timebin: usize) -> CircuitOp {
    assert!(timebin < layout.timebins);
    let mut gen = beam_splitter(layout.config(timebin, layout.loops - 1)).mat().clone();
    for k in (0..layout.loops - 1).rev() {
        gen = gen.direct_sum(beam_splitter(layout.config(timebin, k)).mat());
    }
    let generator =
        PartitionedUnitary::new(UnitaryMatrix::new_unchecked(gen), layout.internal_modes())
            .expect("sized split");
    CircuitOp::new(generator, alloc::format!("rail-bin({timebin})"))
}

/// Preparation of one time-bin's input edge.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BinPrep {
    Number(u32),
    Coherent(Complex64),
}

/// A sampling experiment on the rail.
#[derive(Debug, Clone)]
pub struct SamplingRun {
    pub layout: RailLayout,
    pub preps: Vec<BinPrep>,
    pub shots: u64,
    pub seed: u64,
    /// Reduce each shot's per-bin counts modulo the encoding arity.
    pub encoding: Option<ParityEncoding>,
    /// Photon cap for coherent preparations; `None` picks a cap with a
    /// Poisson tail below 1e-8 (at most 24).
    pub coherent_cap: Option<u32>,
    /// Largest tolerated probability mass lost to truncation.
    pub residual_tolerance: f64,
}

impl SamplingRun {
    pub fn new(layout: RailLayout, preps: Vec<BinPrep>, shots: u64, seed: u64) -> Self {
        SamplingRun {
            layout,
            preps,
            shots,
            seed,
            encoding: None,
            coherent_cap: None,
            residual_tolerance: 1e-6,
        }
    }
}

/// Smallest cap whose Poisson(|α|²) tail is below 1e-8, capped at 24.
pub fn default_coherent_cap(alpha: Complex64) -> u32 {
    let lambda = alpha.norm_sqr();
    let mut mass = (-lambda).exp();
    let mut term = mass;
    let mut n = 0u32;
    while 1.0 - mass > 1e-8 && n < 24 {
        n += 1;
        term *= lambda / n as f64;
        mass += term;
    }
    n
}

/// The joint input state over (internal, per-bin external) modes: internal
/// vacuum, each bin prepared as declared.
pub fn joint_input(
    layout: &RailLayout,
    preps: &[BinPrep],
    coherent_cap: Option<u32>,
) -> Result<FockVector, Error> {
    if preps.len() != layout.timebins {
        return Err(Error::DimensionMismatch { expected: layout.timebins, actual: preps.len() });
    }
    let mut state = FockVector::vacuum(layout.internal_modes(), 0);
    for prep in preps {
        let bin = match prep {
            BinPrep::Number(n) => {
                FockVector::basis_state(&Occupation::new(alloc::vec![*n]), *n)
            }
            BinPrep::Coherent(alpha) => {
                let cap = coherent_cap.unwrap_or_else(|| default_coherent_cap(*alpha));
                truncated_coherent(*alpha, cap)
            }
        };
        state = state.tensor(&bin);
    }
    Ok(state)
}

/// The exact outcome distribution of a prepared rail (one outcome count per
/// time-bin).
pub fn rail_distribution(
    layout: &RailLayout,
    preps: &[BinPrep],
    coherent_cap: Option<u32>,
) -> Result<(CircuitOp, OutcomeDistribution), Error> {
    let circuit = build_rail(layout)?;
    let joint = joint_input(layout, preps, coherent_cap)?;
    let dist = outcome_distribution_state(&circuit, &joint)?;
    Ok((circuit, dist))
}

/// Result of a sampling run.
#[derive(Debug, Clone)]
pub struct RailRun {
    pub distribution: OutcomeDistribution,
    pub histogram: Histogram,
    /// Histogram over per-bin counts reduced modulo the encoding arity.
    pub ditstream: Option<Histogram>,
}

/// Runs the sampling experiment: exact distribution, then seeded i.i.d.
/// draws; the residual mass is drawn as an explicit overflow bucket. Fails
/// if the truncation residual exceeds the run's tolerance.
pub fn run_sampling(run: &SamplingRun) -> Result<RailRun, Error> {
    assert!(run.shots >= 1, "need at least one shot");
    let (_, dist) = rail_distribution(&run.layout, &run.preps, run.coherent_cap)?;
    if dist.residual() > run.residual_tolerance {
        return Err(Error::TruncationInadequate {
            tail: dist.residual(),
            tolerance: run.residual_tolerance,
        });
    }
    let histogram = sample_distribution(&dist, run.shots, run.seed);
    let ditstream = run.encoding.as_ref().map(|enc| reduce_histogram(&histogram, enc.d()));
    Ok(RailRun { distribution: dist, histogram, ditstream })
}

/// Reduces each outcome's per-bin counts modulo `d`.
pub fn reduce_histogram(hist: &Histogram, d: usize) -> Histogram {
    let mut out = Histogram::empty();
    for (occ, n) in hist.counts() {
        let dits =
            Occupation::new(occ.counts().iter().map(|c| c % d as u32).collect());
        for _ in 0..*n {
            out.record(Some(dits.clone()));
        }
    }
    for _ in 0..hist.overflow() {
        out.record(None);
    }
    out
}

/// The photon routing of a mirror/window-only rail, tracked symbolically.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RailPermutation {
    map: Vec<usize>,
}

impl RailPermutation {
    /// Output-side index fed by input-side mode `i`.
    pub fn target(&self, i: usize) -> usize {
        self.map[i]
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.map
    }

    /// Routes an input-side occupation to the output side.
    pub fn route(&self, input: &Occupation) -> Occupation {
        assert_eq!(input.modes(), self.map.len());
        let mut counts = alloc::vec![0u32; self.map.len()];
        for (i, &n) in input.counts().iter().enumerate() {
            counts[self.map[i]] += n;
        }
        Occupation::new(counts)
    }
}

/// Tracks photons through a rail whose splitters are all exactly mirrors or
/// windows. Pure integer bookkeeping, independent of the matrix route.
pub fn deterministic_trace(layout: &RailLayout) -> Result<RailPermutation, Error> {
    let dim = layout.dimension();
    let mut map: Vec<usize> = (0..dim).collect();
    for t in 0..layout.timebins {
        // Where each currently-held position moves during this bin.
        let mut step: Vec<usize> = (0..dim).collect();
        for k in 0..layout.loops {
            let base = layout.block_base(t, k);
            let cfg = layout.config(t, k);
            if *cfg == BeamSplitterConfig::MIRROR {
                // Identity block: loop slot reflects to the rail slot and
                // vice versa, which in this indexing keeps positions fixed.
            } else if *cfg == BeamSplitterConfig::WINDOW {
                step.swap(base, base + 1);
            } else {
                return Err(Error::NonPermutationConfig { timebin: t, loop_index: k });
            }
        }
        for slot in map.iter_mut() {
            *slot = step[*slot];
        }
    }
    Ok(RailPermutation { map })
}

/// Input-side mode index of the external input at `timebin` (0-based).
pub fn input_mode(layout: &RailLayout, timebin: usize) -> usize {
    layout.internal_modes() + timebin
}

/// Output-side mode index of the external output at `timebin` (0-based).
pub fn output_mode(_layout: &RailLayout, timebin: usize) -> usize {
    timebin
}
