//! Turns parsed programs into circuits and drives the simulation commands.


use fockrail_core::circuit::CircuitOp;
use fockrail_core::fock::{FockVector, Occupation};
use fockrail_core::functor;
use fockrail_core::measure::{
    sample_distribution, FeedForward, Histogram, OutcomeDistribution, OutcomeSampler,
};
use fockrail_core::qudit::ParityEncoding;
use fockrail_core::rail::{
    build_rail, default_coherent_cap, rail_distribution, reduce_histogram, BinPrep, RailLayout,
};
use num_complex::Complex64;

use crate::error::{ErrorClass, ProgramError};
use crate::program::{CircuitProgram, Prep};

/// Errors out of the driver: classified program errors or runtime failures
/// from the simulation core.
#[derive(Debug)]
pub enum DriverError {
    Program(ProgramError),
    Core(fockrail_core::Error),
}

impl std::fmt::Display for DriverError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            DriverError::Program(e) => write!(f, "{e}"),
            DriverError::Core(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for DriverError {}

impl From<fockrail_core::Error> for DriverError {
    fn from(e: fockrail_core::Error) -> Self {
        DriverError::Core(e)
    }
}

impl From<ProgramError> for DriverError {
    fn from(e: ProgramError) -> Self {
        DriverError::Program(e)
    }
}

/// Parallelism cap from `FOCKRAIL_THREADS`; defaults to one worker.
pub fn thread_count() -> usize {
    std::env::var("FOCKRAIL_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .filter(|&n| n >= 1)
        .unwrap_or(1)
}

/// The beam-splitter grid declared by the program (mirrors by default).
pub fn layout_of(program: &CircuitProgram) -> RailLayout {
    let mut layout = RailLayout::mirrors(program.loops, program.timebins);
    for (&(t, k), cfg) in &program.splitters {
        layout = layout.with_config(t, k, *cfg);
    }
    layout
}

fn prep_list(program: &CircuitProgram) -> Vec<BinPrep> {
    program
        .prep_list()
        .into_iter()
        .map(|p| match p {
            Prep::Number(n) => BinPrep::Number(n),
            Prep::Coherent(alpha) => BinPrep::Coherent(alpha),
        })
        .collect()
}

/// The joint photon cap: prepared number photons plus the coherent cut.
pub fn effective_truncation(program: &CircuitProgram, coherent_cap: Option<u32>) -> u32 {
    prep_list(program)
        .iter()
        .map(|p| match p {
            BinPrep::Number(n) => *n,
            BinPrep::Coherent(alpha) => coherent_cap.unwrap_or_else(|| default_coherent_cap(*alpha)),
        })
        .sum()
}

fn matches_postselection(program: &CircuitProgram, outcome: &Occupation) -> bool {
    program.postselects.iter().all(|(&t, &n)| outcome.count(t) == n)
}

/// Drops outcomes failing the program's post-selection. The dropped mass is
/// kept out of both the entries and the residual: the remaining total is the
/// post-selection success probability.
fn filter_distribution(
    program: &CircuitProgram,
    dist: OutcomeDistribution,
) -> OutcomeDistribution {
    if program.postselects.is_empty() {
        return dist;
    }
    dist.filtered(|occ| matches_postselection(program, occ))
}

/// The exact outcome distribution of a program.
pub fn simulate(
    program: &CircuitProgram,
    coherent_cap: Option<u32>,
) -> Result<OutcomeDistribution, DriverError> {
    let layout = layout_of(program);
    let dist = if program.feedforwards.is_empty() {
        let (_, dist) = rail_distribution(&layout, &prep_list(program), coherent_cap)?;
        dist
    } else {
        let (ff, prep2) = feedforward_of(program)?;
        let internal = FockVector::vacuum(layout.internal_modes(), 0);
        ff.joint_distribution(&internal, &prep2)?
    };
    Ok(filter_distribution(program, dist))
}

/// The two-stage runnable for a feed-forward program, with the stage-two
/// preparation.
fn feedforward_of(program: &CircuitProgram) -> Result<(FeedForward, Occupation), DriverError> {
    let split = program.feedforward_split().expect("validated feed-forward");
    let layout = layout_of(program);
    let stage1 = layout.slice(0, split);
    let stage2 = layout.slice(split, program.timebins);
    let number = |prep: &Prep| match prep {
        Prep::Number(n) => *n,
        Prep::Coherent(_) => unreachable!("validated number-only"),
    };
    let preps = program.prep_list();
    let prep1 = Occupation::new(preps[..split].iter().map(number).collect());
    let prep2 = Occupation::new(preps[split..].iter().map(number).collect());
    let rules = program.feedforwards.clone();
    let first = build_rail(&stage1)?;
    let ff = FeedForward::new(first, prep1, 0, move |outcome| {
        let mut branch = stage2.clone();
        for rule in &rules {
            if outcome.count(rule.when_t) == rule.when_n {
                branch = branch.with_config(rule.set_t - split, rule.set_loop, rule.config);
            }
        }
        build_rail(&branch).expect("sized grid")
    })?;
    Ok((ff, prep2))
}

/// A sampled run, with post-selection bookkeeping.
pub struct SampleOutput {
    pub histogram: Histogram,
    pub ditstream: Option<Histogram>,
    pub discarded: u64,
    pub residual: f64,
    pub truncation: u32,
}

/// Draws `shots` outcomes with the per-shot stream rule, splitting the shot
/// range across `threads` workers. The histogram is identical for any
/// thread count.
pub fn sample(
    program: &CircuitProgram,
    shots: u64,
    seed: u64,
    coherent_cap: Option<u32>,
    threads: usize,
) -> Result<SampleOutput, DriverError> {
    if shots == 0 {
        return Err(DriverError::Program(ProgramError::global(
            ErrorClass::InvalidValue,
            "need at least one shot",
        )));
    }
    let layout = layout_of(program);
    let (mut histogram, residual) = if program.feedforwards.is_empty() {
        let (_, dist) = rail_distribution(&layout, &prep_list(program), coherent_cap)?;
        let residual = dist.residual();
        if residual > 1e-6 {
            return Err(DriverError::Core(fockrail_core::Error::TruncationInadequate {
                tail: residual,
                tolerance: 1e-6,
            }));
        }
        let sampler = OutcomeSampler::new(&dist);
        let hist = if threads <= 1 {
            sample_distribution(&dist, shots, seed)
        } else {
            parallel_draws(threads, shots, &|shot| sampler.draw_shot(seed, shot).cloned())
        };
        (hist, residual)
    } else {
        let (ff, prep2) = feedforward_of(program)?;
        let internal = FockVector::vacuum(layout.internal_modes(), 0);
        let sampler = ff.sampler(&internal, &prep2)?;
        let draw = |shot: u64| sampler.draw_shot(seed, shot).map(|(a, b)| a.concat(&b));
        let hist = parallel_draws(threads.max(1), shots, &draw);
        (hist, 0.0)
    };

    let mut discarded = 0u64;
    if !program.postselects.is_empty() {
        let mut kept = Histogram::empty();
        for (occ, n) in histogram.sorted_counts() {
            if matches_postselection(program, &occ) {
                for _ in 0..n {
                    kept.record(Some(occ.clone()));
                }
            } else {
                discarded += n;
            }
        }
        for _ in 0..histogram.overflow() {
            kept.record(None);
        }
        histogram = kept;
    }
    let ditstream = program
        .encoding
        .map(|(d, _)| reduce_histogram(&histogram, d));
    Ok(SampleOutput {
        histogram,
        ditstream,
        discarded,
        residual,
        truncation: effective_truncation(program, coherent_cap),
    })
}

fn parallel_draws(
    threads: usize,
    shots: u64,
    draw: &(dyn Fn(u64) -> Option<Occupation> + Sync),
) -> Histogram {
    if threads <= 1 {
        let mut hist = Histogram::empty();
        for shot in 0..shots {
            hist.record(draw(shot));
        }
        return hist;
    }
    let chunk = shots.div_ceil(threads as u64);
    std::thread::scope(|scope| {
        let mut handles = Vec::new();
        for i in 0..threads as u64 {
            let lo = i * chunk;
            let hi = ((i + 1) * chunk).min(shots);
            if lo >= hi {
                break;
            }
            handles.push(scope.spawn(move || {
                let mut hist = Histogram::empty();
                for shot in lo..hi {
                    hist.record(draw(shot));
                }
                hist
            }));
        }
        let mut hist = Histogram::empty();
        for handle in handles {
            hist.merge(handle.join().expect("sampling worker"));
        }
        hist
    })
}

/// The program's encoding as a parity-qudit model (arity from `encode`).
pub fn encoding_of(program: &CircuitProgram) -> Result<Option<ParityEncoding>, DriverError> {
    match program.encoding {
        None => Ok(None),
        Some((d, alpha)) => {
            let cap = default_coherent_cap(alpha).max(4 * d as u32);
            Ok(Some(ParityEncoding::coherent(d, alpha, cap, 1e-6)?))
        }
    }
}

/// A single matrix element of the program's full generating operator.
/// `n_in` is ordered (internal modes, one input per bin); `n_out` is ordered
/// (one output per bin, internal modes).
pub fn element(
    program: &CircuitProgram,
    n_in: &Occupation,
    n_out: &Occupation,
) -> Result<Complex64, DriverError> {
    let layout = layout_of(program);
    let circuit: CircuitOp = build_rail(&layout)?;
    Ok(functor::matrix_element(circuit.generator().matrix(), n_in, n_out)?)
}

/// Parses a comma-separated occupation of the given length.
pub fn parse_occupation(text: &str, modes: usize) -> Result<Occupation, ProgramError> {
    let counts: Result<Vec<u32>, _> =
        text.split(',').map(|tok| tok.trim().parse::<u32>()).collect();
    let counts = counts.map_err(|_| {
        ProgramError::global(
            ErrorClass::Syntax,
            format!("`{text}` is not a comma-separated list of photon counts"),
        )
    })?;
    if counts.len() != modes {
        return Err(ProgramError::global(
            ErrorClass::IndexRange,
            format!("expected {modes} modes, got {}", counts.len()),
        ));
    }
    Ok(Occupation::new(counts))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::program::parse;

    const MIRROR: &str =
        "rail loops=1 timebins=1\nprepare t=0 n=0\nmeasure t=0\n";

    #[test]
    fn mirror_simulation_is_deterministic() {
        let program = parse(MIRROR).unwrap();
        let dist = simulate(&program, None).unwrap();
        assert_eq!(dist.len(), 1);
        assert!((dist.probability(&Occupation::new(vec![0])) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn threaded_sampling_matches_sequential() {
        let text = "rail loops=1 timebins=2\n\
                    bs t=0 loop=0 theta=0.7853981633974483\n\
                    bs t=1 loop=0 theta=0.5\n\
                    prepare t=0 n=1\nprepare t=1 n=0\n\
                    measure t=0\nmeasure t=1\n";
        let program = parse(text).unwrap();
        let a = sample(&program, 5000, 11, None, 1).unwrap();
        let b = sample(&program, 5000, 11, None, 4).unwrap();
        assert_eq!(a.histogram, b.histogram);
    }

    #[test]
    fn postselection_filters_and_counts() {
        let text = "rail loops=1 timebins=2\n\
                    bs t=0 loop=0 theta=0.7853981633974483\n\
                    prepare t=0 n=1\nprepare t=1 n=0\n\
                    measure t=0\nmeasure t=1\n\
                    postselect t=0 n=0\n";
        let program = parse(text).unwrap();
        let dist = simulate(&program, None).unwrap();
        // Half the mass passes the post-selection.
        assert!((dist.total() - 0.5).abs() < 1e-12);
        let out = sample(&program, 2000, 3, None, 1).unwrap();
        assert_eq!(out.histogram.shots() + out.discarded, 2000);
        assert!(out.discarded > 500);
    }

    #[test]
    fn feedforward_simulation_and_sampling_agree() {
        let text = "rail loops=1 timebins=2\n\
                    bs t=0 loop=0 theta=0.7853981633974483\n\
                    bs t=1 loop=0 theta=0.3\n\
                    prepare t=0 n=1\nprepare t=1 n=0\n\
                    measure t=0\nmeasure t=1\n\
                    feedforward when t=0 n=1 set t=1 loop=0 theta=1.2\n";
        let program = parse(text).unwrap();
        let dist = simulate(&program, None).unwrap();
        assert!((dist.total() - 1.0).abs() < 1e-9);
        let out = sample(&program, 100_000, 17, None, 2).unwrap();
        assert!(out.histogram.tv_distance(&dist) < 0.01);
    }

    #[test]
    fn element_reads_the_generator() {
        let text = "rail loops=1 timebins=1\n\
                    bs t=0 loop=0 theta=0.6 gamma=0.1 rho=0.2 tau=0.3\n\
                    prepare t=0 n=0\nmeasure t=0\n";
        let program = parse(text).unwrap();
        let amp = element(
            &program,
            &Occupation::new(vec![1, 0]),
            &Occupation::new(vec![1, 0]),
        )
        .unwrap();
        let cfg = fockrail_core::circuit::BeamSplitterConfig::new(0.6, 0.1, 0.2, 0.3);
        let u = fockrail_core::circuit::beam_splitter(&cfg);
        assert!((amp - u.entry(0, 0)).norm() < 1e-14);
    }
}
