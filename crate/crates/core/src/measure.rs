//! Projective measurement, post-selection, sampling, and feed-forward.
//!
//! Preparing the input edges in a number state and measuring the output
//! edges in a number state extracts a block of the circuit operator that
//! acts on the internal state alone. The measured outcome is random: outcome
//! `n⁺` occurs with probability equal to the squared norm of the block image
//! of the (normalized) internal state. Photon conservation makes the outcome
//! set finite for number-state preparations, so distributions here are exact
//! and any truncation loss is carried explicitly as a residual.
//!
//! Sampling uses one counter-based RNG stream per shot (see [`crate::rng`]),
//! so histograms are reproducible and shots may be drawn in any order or in
//! parallel.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec::Vec;

use num_complex::Complex64;
use rand_core::RngCore;

use crate::circuit::CircuitOp;
use crate::error::Error;
use crate::fock::{enumerate_sector, FockVector, Occupation};
use crate::functor;
use crate::rng::{shot_rng, uniform};
use crate::NUMERIC_TOL;

/// A block ⟨prep|C|meas⟩ of a circuit operator: the linear map effected on
/// the internal state when the input is prepared in `prep` and the output is
/// measured in `meas`.
#[derive(Debug, Clone)]
pub struct ProjectedBlock {
    internal_modes: usize,
    prep: Occupation,
    meas: Occupation,
    input_cap: u32,
    entries: BTreeMap<Occupation, Vec<(Occupation, Complex64)>>,
}

impl ProjectedBlock {
    pub fn internal_modes(&self) -> usize {
        self.internal_modes
    }

    pub fn prep(&self) -> &Occupation {
        &self.prep
    }

    pub fn meas(&self) -> &Occupation {
        &self.meas
    }

    /// Largest internal input total the block is tabulated for.
    pub fn input_cap(&self) -> u32 {
        self.input_cap
    }

    /// The image row of the internal basis state ⟨m_in|.
    pub fn row(&self, m_in: &Occupation) -> &[(Occupation, Complex64)] {
        self.entries.get(m_in).map(Vec::as_slice).unwrap_or(&[])
    }

    /// Matrix entry ⟨m_in| → ⟨m_out| of the block.
    pub fn entry(&self, m_in: &Occupation, m_out: &Occupation) -> Complex64 {
        self.row(m_in)
            .iter()
            .find(|(occ, _)| occ == m_out)
            .map(|(_, amp)| *amp)
            .unwrap_or(Complex64::new(0.0, 0.0))
    }

    /// Applies the block to an internal state.
    pub fn apply(&self, state: &FockVector) -> Result<FockVector, Error> {
        if state.modes() != self.internal_modes {
            return Err(Error::DimensionMismatch {
                expected: self.internal_modes,
                actual: state.modes(),
            });
        }
        let mut parts: Vec<(Occupation, Complex64)> = Vec::new();
        for (m_in, amp) in state.components() {
            for (m_out, weight) in self.row(m_in) {
                parts.push((m_out.clone(), amp * weight));
            }
        }
        Ok(FockVector::from_components(state.modes(), state.truncation(), parts))
    }

    /// Composes two consecutive blocks: this block first, `next` second.
    pub fn compose(&self, next: &ProjectedBlock) -> Result<ProjectedBlock, Error> {
        if next.internal_modes != self.internal_modes {
            return Err(Error::DimensionMismatch {
                expected: self.internal_modes,
                actual: next.internal_modes,
            });
        }
        let mut entries: BTreeMap<Occupation, Vec<(Occupation, Complex64)>> = BTreeMap::new();
        for (m_in, mids) in &self.entries {
            let mut acc: BTreeMap<Occupation, Complex64> = BTreeMap::new();
            for (mid, w1) in mids {
                for (m_out, w2) in next.row(mid) {
                    *acc.entry(m_out.clone()).or_insert(Complex64::new(0.0, 0.0)) += w1 * w2;
                }
            }
            entries.insert(
                m_in.clone(),
                acc.into_iter().filter(|(_, w)| *w != Complex64::new(0.0, 0.0)).collect(),
            );
        }
        Ok(ProjectedBlock {
            internal_modes: self.internal_modes,
            prep: self.prep.concat(&next.prep),
            meas: self.meas.concat(&next.meas),
            input_cap: self.input_cap,
            entries,
        })
    }
}

/// Extracts the block ⟨prep|C|meas⟩, tabulated for internal input totals up
/// to `internal_cap`. Each entry is a matrix element of the circuit operator
/// with input modes ordered (internal, prepared) and output modes ordered
/// (measured, internal).
pub fn project_block(
    c: &CircuitOp,
    prep: &Occupation,
    meas: &Occupation,
    internal_cap: u32,
) -> Result<ProjectedBlock, Error> {
    let g = c.generator();
    if g.internal() == 0 {
        return Err(Error::DimensionMismatch { expected: 1, actual: 0 });
    }
    if prep.modes() != g.external() {
        return Err(Error::DimensionMismatch { expected: g.external(), actual: prep.modes() });
    }
    if meas.modes() != g.external() {
        return Err(Error::DimensionMismatch { expected: g.external(), actual: meas.modes() });
    }
    let mut entries: BTreeMap<Occupation, Vec<(Occupation, Complex64)>> = BTreeMap::new();
    for t_in in 0..=internal_cap {
        let out_total = (t_in + prep.total()).checked_sub(meas.total());
        for m_in in enumerate_sector(g.internal(), t_in).basis() {
            let mut row = Vec::new();
            if let Some(out_total) = out_total {
                let n_in = m_in.concat(prep);
                for m_out in enumerate_sector(g.internal(), out_total).basis() {
                    let n_out = meas.concat(m_out);
                    let amp = functor::element_unchecked(g.matrix(), &n_in, &n_out);
                    if amp != Complex64::new(0.0, 0.0) {
                        row.push((m_out.clone(), amp));
                    }
                }
            }
            entries.insert(m_in.clone(), row);
        }
    }
    Ok(ProjectedBlock {
        internal_modes: g.internal(),
        prep: prep.clone(),
        meas: meas.clone(),
        input_cap: internal_cap,
        entries,
    })
}

/// Probabilities over measurement outcomes, with any probability mass lost
/// to truncation reported as `residual`.
#[derive(Debug, Clone)]
pub struct OutcomeDistribution {
    modes: usize,
    entries: BTreeMap<Occupation, f64>,
    residual: f64,
}

impl OutcomeDistribution {
    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn probability(&self, outcome: &Occupation) -> f64 {
        self.entries.get(outcome).copied().unwrap_or(0.0)
    }

    pub fn entries(&self) -> impl Iterator<Item = (&Occupation, &f64)> {
        self.entries.iter()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn residual(&self) -> f64 {
        self.residual
    }

    pub fn total(&self) -> f64 {
        self.entries.values().sum()
    }

    /// Entries in canonical outcome order.
    pub fn sorted_entries(&self) -> Vec<(Occupation, f64)> {
        let mut out: Vec<_> = self.entries.iter().map(|(o, p)| (o.clone(), *p)).collect();
        out.sort_by(|(a, _), (b, _)| a.canonical_cmp(b));
        out
    }

    /// Retains outcomes passing `keep`; the dropped mass is NOT moved to the
    /// residual, so the total reflects the post-selection success rate.
    pub fn filtered(&self, keep: impl Fn(&Occupation) -> bool) -> OutcomeDistribution {
        OutcomeDistribution {
            modes: self.modes,
            entries: self.entries.iter().filter(|(o, _)| keep(o)).map(|(o, p)| (o.clone(), *p)).collect(),
            residual: self.residual,
        }
    }

    pub fn from_parts(modes: usize, entries: BTreeMap<Occupation, f64>, residual: f64) -> Self {
        OutcomeDistribution { modes, entries, residual }
    }
}

/// The post-measurement decomposition of a circuit run: for each external
/// outcome, the unnormalized internal state left behind. Squared norms are
/// the outcome probabilities.
pub fn branch_states(
    c: &CircuitOp,
    joint_in: &FockVector,
) -> Result<Vec<(Occupation, FockVector)>, Error> {
    let g = c.generator();
    if joint_in.modes() != g.dim() {
        return Err(Error::DimensionMismatch { expected: g.dim(), actual: joint_in.modes() });
    }
    let out = functor::apply(g.matrix(), joint_in)?;
    let n = g.external();
    let mut groups: BTreeMap<Occupation, Vec<(Occupation, Complex64)>> = BTreeMap::new();
    for (occ, amp) in out.components() {
        // A circuit without internal modes leaves a scalar behind; model it
        // on a one-mode vacuum so the branch is still a state.
        let (ext, internal) = if g.internal() == 0 {
            (occ.clone(), Occupation::vacuum(1))
        } else {
            occ.split(n)
        };
        groups.entry(ext).or_default().push((internal, *amp));
    }
    let truncation = joint_in.truncation();
    let mut branches: Vec<(Occupation, FockVector)> = groups
        .into_iter()
        .map(|(ext, parts)| {
            (ext, FockVector::from_components(g.internal().max(1), truncation, parts))
        })
        .collect();
    branches.sort_by(|(a, _), (b, _)| a.canonical_cmp(b));
    Ok(branches)
}

/// Exact outcome distribution for a general (possibly truncated) joint input
/// state over (internal, external-in) modes.
pub fn outcome_distribution_state(
    c: &CircuitOp,
    joint_in: &FockVector,
) -> Result<OutcomeDistribution, Error> {
    let branches = branch_states(c, joint_in)?;
    let mut entries = BTreeMap::new();
    let mut total = 0.0;
    for (ext, internal) in branches {
        let p = internal.norm_sq();
        if p > 0.0 {
            total += p;
            entries.insert(ext, p);
        }
    }
    let residual = (1.0 - total).max(0.0);
    Ok(OutcomeDistribution { modes: c.external(), entries, residual })
}

/// Exact outcome distribution for a normalized internal state and a
/// number-state preparation. The outcome set is finite by photon
/// conservation, so the residual is zero up to the input's own truncation
/// history.
pub fn outcome_distribution(
    c: &CircuitOp,
    internal_in: &FockVector,
    prep: &Occupation,
) -> Result<OutcomeDistribution, Error> {
    let g = c.generator();
    if internal_in.modes() != g.internal() {
        return Err(Error::DimensionMismatch { expected: g.internal(), actual: internal_in.modes() });
    }
    if prep.modes() != g.external() {
        return Err(Error::DimensionMismatch { expected: g.external(), actual: prep.modes() });
    }
    if !internal_in.is_normalized(NUMERIC_TOL) {
        return Err(Error::NotNormalized { norm_sq: internal_in.norm_sq() });
    }
    let joint = internal_in.tensor(&FockVector::basis_state(prep, prep.total()));
    outcome_distribution_state(c, &joint)
}

/// Counts per outcome over a number of shots, with an explicit overflow
/// bucket for draws that landed in the residual mass.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Histogram {
    counts: BTreeMap<Occupation, u64>,
    overflow: u64,
    shots: u64,
}

impl Histogram {
    pub fn empty() -> Self {
        Histogram { counts: BTreeMap::new(), overflow: 0, shots: 0 }
    }

    pub fn record(&mut self, outcome: Option<Occupation>) {
        self.shots += 1;
        match outcome {
            Some(occ) => *self.counts.entry(occ).or_insert(0) += 1,
            None => self.overflow += 1,
        }
    }

    pub fn merge(&mut self, other: Histogram) {
        self.shots += other.shots;
        self.overflow += other.overflow;
        for (occ, n) in other.counts {
            *self.counts.entry(occ).or_insert(0) += n;
        }
    }

    pub fn count(&self, outcome: &Occupation) -> u64 {
        self.counts.get(outcome).copied().unwrap_or(0)
    }

    pub fn counts(&self) -> impl Iterator<Item = (&Occupation, &u64)> {
        self.counts.iter()
    }

    pub fn sorted_counts(&self) -> Vec<(Occupation, u64)> {
        let mut out: Vec<_> = self.counts.iter().map(|(o, n)| (o.clone(), *n)).collect();
        out.sort_by(|(a, _), (b, _)| a.canonical_cmp(b));
        out
    }

    pub fn overflow(&self) -> u64 {
        self.overflow
    }

    pub fn shots(&self) -> u64 {
        self.shots
    }

    /// Total-variation distance between the empirical frequencies and an
    /// exact distribution (the residual mass pairs with the overflow bucket).
    pub fn tv_distance(&self, dist: &OutcomeDistribution) -> f64 {
        let shots = self.shots as f64;
        let mut tv = 0.0;
        for (occ, p) in dist.entries() {
            let freq = self.count(occ) as f64 / shots;
            tv += (freq - p).abs();
        }
        for (occ, n) in &self.counts {
            if dist.probability(occ) == 0.0 {
                tv += *n as f64 / shots;
            }
        }
        tv += (self.overflow as f64 / shots - dist.residual()).abs();
        tv / 2.0
    }
}

/// A frozen cumulative table for drawing i.i.d. outcomes with per-shot RNG
/// streams. The draw order is the canonical outcome order.
#[derive(Debug, Clone)]
pub struct OutcomeSampler {
    cumulative: Vec<(Occupation, f64)>,
}

impl OutcomeSampler {
    pub fn new(dist: &OutcomeDistribution) -> Self {
        let mut running = 0.0;
        let cumulative = dist
            .sorted_entries()
            .into_iter()
            .map(|(occ, p)| {
                running += p;
                (occ, running)
            })
            .collect();
        OutcomeSampler { cumulative }
    }

    /// Draws the outcome for one shot; `None` is the overflow bucket.
    pub fn draw_shot(&self, seed: u64, shot: u64) -> Option<&Occupation> {
        self.draw_with(&mut shot_rng(seed, shot))
    }

    pub fn draw_with(&self, rng: &mut impl RngCore) -> Option<&Occupation> {
        let u = uniform(rng);
        self.cumulative
            .iter()
            .find(|(_, cum)| u < *cum)
            .map(|(occ, _)| occ)
    }
}

/// Draws `shots` i.i.d. outcomes from the exact distribution of the circuit.
/// Deterministic for a fixed seed regardless of evaluation order.
pub fn sample(
    c: &CircuitOp,
    internal_in: &FockVector,
    prep: &Occupation,
    shots: u64,
    seed: u64,
) -> Result<Histogram, Error> {
    assert!(shots >= 1, "need at least one shot");
    let dist = outcome_distribution(c, internal_in, prep)?;
    Ok(sample_distribution(&dist, shots, seed))
}

/// Samples an already-computed distribution.
pub fn sample_distribution(dist: &OutcomeDistribution, shots: u64, seed: u64) -> Histogram {
    let sampler = OutcomeSampler::new(dist);
    let mut hist = Histogram::empty();
    for shot in 0..shots {
        hist.record(sampler.draw_shot(seed, shot).cloned());
    }
    hist
}

/// The feed-forward protocol over two stages: run the first circuit, sample
/// its outcome, and let the outcome choose the second circuit. The chooser
/// is materialized eagerly over the finite outcome set so incompatible
/// dynamic circuits fail before execution.
pub struct FeedForward {
    first: CircuitOp,
    prep1: Occupation,
    table: BTreeMap<Occupation, CircuitOp>,
}

impl FeedForward {
    /// `internal_cap` bounds the internal photon total the first stage can
    /// hold; together with the preparation it bounds the outcome set.
    pub fn new(
        first: CircuitOp,
        prep1: Occupation,
        internal_cap: u32,
        chooser: impl Fn(&Occupation) -> CircuitOp,
    ) -> Result<Self, Error> {
        if prep1.modes() != first.external() {
            return Err(Error::DimensionMismatch {
                expected: first.external(),
                actual: prep1.modes(),
            });
        }
        let bound = internal_cap + prep1.total();
        let mut table = BTreeMap::new();
        for total in 0..=bound {
            for outcome in enumerate_sector(first.external(), total).basis() {
                let second = chooser(outcome);
                if second.internal() != first.internal() {
                    return Err(Error::IncompatibleChooser(format!(
                        "outcome {:?} selects a circuit with {} internal modes, expected {}",
                        outcome.counts(),
                        second.internal(),
                        first.internal()
                    )));
                }
                table.insert(outcome.clone(), second);
            }
        }
        Ok(FeedForward { first, prep1, table })
    }

    pub fn first(&self) -> &CircuitOp {
        &self.first
    }

    pub fn prep1(&self) -> &Occupation {
        &self.prep1
    }

    /// The second-stage circuit selected by a first-stage outcome.
    pub fn branch(&self, outcome: &Occupation) -> Option<&CircuitOp> {
        self.table.get(outcome)
    }

    /// The composite block ⟨prep1|C₁|meas1⟩⟨prep2|C₂[meas1]|meas2⟩.
    pub fn branch_block(
        &self,
        meas1: &Occupation,
        prep2: &Occupation,
        meas2: &Occupation,
        internal_cap: u32,
    ) -> Result<ProjectedBlock, Error> {
        let second = self.table.get(meas1).ok_or_else(|| {
            Error::IncompatibleChooser(format!("no branch for outcome {:?}", meas1.counts()))
        })?;
        let b1 = project_block(&self.first, &self.prep1, meas1, internal_cap)?;
        let b2 = project_block(second, prep2, meas2, internal_cap + self.prep1.total())?;
        b1.compose(&b2)
    }

    /// Exact joint distribution over (first outcome, second outcome).
    pub fn joint_distribution(
        &self,
        internal_in: &FockVector,
        prep2: &Occupation,
    ) -> Result<OutcomeDistribution, Error> {
        if !internal_in.is_normalized(NUMERIC_TOL) {
            return Err(Error::NotNormalized { norm_sq: internal_in.norm_sq() });
        }
        let joint1 = internal_in.tensor(&FockVector::basis_state(&self.prep1, self.prep1.total()));
        let branches = branch_states(&self.first, &joint1)?;
        let mut entries = BTreeMap::new();
        let mut total = 0.0;
        let mut modes2 = None;
        for (outcome1, internal) in branches {
            let p1 = internal.norm_sq();
            if p1 == 0.0 {
                continue;
            }
            let second = self.table.get(&outcome1).ok_or_else(|| {
                Error::IncompatibleChooser(format!(
                    "no branch for outcome {:?}",
                    outcome1.counts()
                ))
            })?;
            let collapsed = internal.normalized()?;
            let second_dist = outcome_distribution(second, &collapsed, prep2)?;
            modes2 = Some(second_dist.modes());
            for (outcome2, p2) in second_dist.entries() {
                let p = p1 * p2;
                if p > 0.0 {
                    total += p;
                    entries.insert(outcome1.concat(outcome2), p);
                }
            }
        }
        let modes = self.first.external() + modes2.unwrap_or(prep2.modes());
        Ok(OutcomeDistribution { modes, entries, residual: (1.0 - total).max(0.0) })
    }

    /// Precomputes the branch decomposition and per-branch samplers, so
    /// repeated shots cost two table lookups. Draws agree with
    /// [`FeedForward::execute_shot`] shot for shot.
    pub fn sampler(
        &self,
        internal_in: &FockVector,
        prep2: &Occupation,
    ) -> Result<FeedForwardSampler, Error> {
        if !internal_in.is_normalized(NUMERIC_TOL) {
            return Err(Error::NotNormalized { norm_sq: internal_in.norm_sq() });
        }
        let joint1 = internal_in.tensor(&FockVector::basis_state(&self.prep1, self.prep1.total()));
        let branches = branch_states(&self.first, &joint1)?;
        let mut table = Vec::new();
        let mut running = 0.0;
        for (outcome1, internal) in branches {
            let p1 = internal.norm_sq();
            if p1 == 0.0 {
                continue;
            }
            running += p1;
            let second = self.table.get(&outcome1).ok_or_else(|| {
                Error::IncompatibleChooser(format!(
                    "no branch for outcome {:?}",
                    outcome1.counts()
                ))
            })?;
            let collapsed = internal.normalized()?;
            let dist2 = outcome_distribution(second, &collapsed, prep2)?;
            table.push((outcome1, running, OutcomeSampler::new(&dist2)));
        }
        Ok(FeedForwardSampler { table })
    }

    /// Executes one shot: samples the first outcome, collapses the internal
    /// state, selects the branch, and samples the second outcome from it.
    /// Both draws come from the shot's own RNG stream.
    pub fn execute_shot(
        &self,
        internal_in: &FockVector,
        prep2: &Occupation,
        seed: u64,
        shot: u64,
    ) -> Result<Option<(Occupation, Occupation)>, Error> {
        let mut rng = shot_rng(seed, shot);
        let joint1 = internal_in.tensor(&FockVector::basis_state(&self.prep1, self.prep1.total()));
        let branches = branch_states(&self.first, &joint1)?;
        let u1 = uniform(&mut rng);
        let mut running = 0.0;
        for (outcome1, internal) in branches {
            let p1 = internal.norm_sq();
            running += p1;
            if u1 < running {
                let second = self.table.get(&outcome1).ok_or_else(|| {
                    Error::IncompatibleChooser(format!(
                        "no branch for outcome {:?}",
                        outcome1.counts()
                    ))
                })?;
                let collapsed = internal.normalized()?;
                let dist2 = outcome_distribution(second, &collapsed, prep2)?;
                let sampler = OutcomeSampler::new(&dist2);
                return Ok(sampler
                    .draw_with(&mut rng)
                    .map(|outcome2| (outcome1.clone(), outcome2.clone())));
            }
        }
        Ok(None)
    }
}

/// Frozen two-stage sampling tables for a feed-forward run.
pub struct FeedForwardSampler {
    table: Vec<(Occupation, f64, OutcomeSampler)>,
}

impl FeedForwardSampler {
    /// Draws (first outcome, second outcome) for one shot; `None` lands in
    /// the residual mass.
    pub fn draw_shot(&self, seed: u64, shot: u64) -> Option<(Occupation, Occupation)> {
        let mut rng = shot_rng(seed, shot);
        let u1 = uniform(&mut rng);
        for (outcome1, cumulative, second) in &self.table {
            if u1 < *cumulative {
                return second
                    .draw_with(&mut rng)
                    .map(|outcome2| (outcome1.clone(), outcome2.clone()));
            }
        }
        None
    }
}
