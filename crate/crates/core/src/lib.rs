//! Exact simulation of linear optical quantum computing on multimode Fock
//! spaces.
//!
//! A photonic circuit is described by the unitary matrix that transforms the
//! photon creation operators on its edges. This crate realizes the map from
//! such generating matrices to unitary operators on truncated bosonic Fock
//! spaces, together with the calculus needed to build and run circuits:
//!
//! - [`fock`] — occupation-number states, fixed-photon-number sectors, and
//!   the ladder operators on sparse state vectors.
//! - [`functor`] — matrix elements, per-sector matrices, and state
//!   application of the operator generated by a unitary matrix; transition
//!   amplitudes are permanents of row/column-repeated submatrices.
//! - [`circuit`] — beam splitters, mirrors, windows, mode permutations, and
//!   spatial/temporal composition of circuits with internal/external mode
//!   bookkeeping.
//! - [`measure`] — projective measurement: post-selected blocks, exact
//!   outcome distributions, seeded sampling, and the feed-forward protocol.
//! - [`single_loop`] — the closed-form amplitudes of the one-loop computer,
//!   kept as an analytic companion to the numeric path.
//! - [`klm`] — the non-linear sign gate, the Hadamard beam splitter, and the
//!   post-selected controlled-Z construction.
//! - [`qudit`] — dual-rail qubit and parity-qudit encodings, fractional
//!   exponentials, coherent states, and implementation-quality bounds.
//! - [`rail`] — the single-rail loop architecture over time-bins and its
//!   boson-sampling harness.
//! - [`verify`] — self-contained verification suites over the invariants the
//!   crate promises.
//!
//! The crate is `no_std` (with `alloc`); all state is immutable after
//! construction and every operation is a pure function, so values can be
//! shared freely across threads.
//!
//! # Example
//!
//! Two photons meeting at a balanced beam splitter never exit on opposite
//! sides:
//!
//! ```
//! use fockrail_core::fock::Occupation;
//! use fockrail_core::functor::matrix_element;
//! use fockrail_core::klm::hadamard_bs;
//!
//! let h = hadamard_bs();
//! let one_one = Occupation::new(vec![1, 1]);
//! let amp = matrix_element(&h, &one_one, &one_one).unwrap();
//! assert_eq!(amp.norm_sqr(), 0.0);
//! ```

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod circuit;
pub mod error;
pub mod fock;
pub mod functor;
pub mod klm;
pub mod math;
pub mod matrix;
pub mod measure;
pub mod qudit;
pub mod rail;
pub mod rng;
pub mod single_loop;
pub mod verify;

pub use error::Error;
pub use fock::{FockSector, FockVector, Occupation};
pub use matrix::{Mat, UnitaryMatrix};

/// Absolute tolerance for unitarity and normalization checks.
///
/// Double precision comfortably holds this through products of ~10 matrices.
pub const NUMERIC_TOL: f64 = 1e-9;
