//! Error type shared across the crate.

use alloc::string::String;
use core::fmt;

/// Errors raised by construction and simulation operations.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Two objects that must act on the same number of modes do not.
    DimensionMismatch { expected: usize, actual: usize },
    /// A matrix failed the unitarity check at construction.
    NotUnitary { deviation: f64 },
    /// An operation required a normalized state.
    NotNormalized { norm_sq: f64 },
    /// A requested basis would exceed the materialization guard.
    SizeGuardExceeded { size: u128, guard: u128 },
    /// Spatial or temporal composition of incompatible circuits.
    IncompatibleComposition(String),
    /// The argument is not a permutation of `0..n`.
    MalformedPermutation,
    /// A non-linear diagonal gate whose stage photon counts do not balance.
    DiagonalityViolated { total_in: u32, total_out: u32 },
    /// A truncation too small for the requested tolerance.
    TruncationInadequate { tail: f64, tolerance: f64 },
    /// A beam-splitter grid of the wrong shape.
    MalformedGrid { expected: usize, actual: usize },
    /// Deterministic routing requires every config to be a mirror or window.
    NonPermutationConfig { timebin: usize, loop_index: usize },
    /// A feed-forward chooser output that cannot follow the first stage.
    IncompatibleChooser(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::DimensionMismatch { expected, actual } => {
                write!(f, "dimension mismatch: expected {expected} modes, got {actual}")
            }
            Error::NotUnitary { deviation } => {
                write!(f, "matrix is not unitary (max deviation {deviation:e})")
            }
            Error::NotNormalized { norm_sq } => {
                write!(f, "state is not normalized (norm squared {norm_sq})")
            }
            Error::SizeGuardExceeded { size, guard } => {
                write!(f, "basis size {size} exceeds guard {guard}")
            }
            Error::IncompatibleComposition(msg) => write!(f, "incompatible composition: {msg}"),
            Error::MalformedPermutation => write!(f, "sequence is not a permutation"),
            Error::DiagonalityViolated { total_in, total_out } => write!(
                f,
                "stage photon counts do not balance ({total_in} in, {total_out} out)"
            ),
            Error::TruncationInadequate { tail, tolerance } => {
                write!(f, "truncation tail {tail:e} exceeds tolerance {tolerance:e}")
            }
            Error::MalformedGrid { expected, actual } => {
                write!(f, "config grid has {actual} entries, layout needs {expected}")
            }
            Error::NonPermutationConfig { timebin, loop_index } => write!(
                f,
                "config at time-bin {timebin}, loop {loop_index} is neither mirror nor window"
            ),
            Error::IncompatibleChooser(msg) => write!(f, "incompatible chooser output: {msg}"),
        }
    }
}
