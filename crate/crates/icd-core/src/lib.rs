//! Feature-level simulator of the Boston Scientific Rhythm ID two-zone
//! tachycardia discrimination algorithm, plus synthesis of stealthy
//! reprogramming attacks against it.
//!
//! The crate works on *feature signals*: per-cycle ventricular/atrial interval
//! durations, atrial alignment counts and Rhythm Match correlation scores, as
//! a device would extract them from intracardiac electrograms. On top of the
//! deterministic simulator it provides
//!
//! - the finite programmable parameter space of the device, with the
//!   index-based stealthiness distance between parametrizations,
//! - effectiveness/reachability objectives and exact Pareto-front extraction
//!   over that discrete space (enumerative and random-search backends),
//! - an SMT-LIB2/MaxSMT encoding of the algorithm's bounded unrolling for
//!   external optimizing solvers, with a model decoder and a ground-formula
//!   checker that cross-validates the encoding against the simulator,
//! - a seeded generator for synthetic arrhythmia condition signal sets.
//!
//! Everything here is `no_std` (with `alloc`): pure computation only. File
//! formats, the CLI and external solver processes live in the companion
//! `icd-tool` crate.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod discrim;
pub mod generator;
pub mod objectives;
pub mod params;
pub mod signal;
pub mod smt;
pub mod synth;

/// Exact rational used for effectiveness values, variances and AUC scores.
pub type Rat = num_rational::Ratio<i64>;
