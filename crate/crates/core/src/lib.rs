//! Operator systems, zero-error quantum codes and the numerical machinery used to
//! study their superactivation.
//!
//! The crate is `no_std` and only needs `alloc`. Everything here is a pure function
//! of immutable inputs; file formats, worker pools and the command line live in the
//! `zekit` companion crate.
//!
//! Module map:
//!
//! - [`matcore`]: dense complex matrices and vectors, sparse operators, Jacobi
//!   eigen/singular value decompositions and exact rational angles.
//! - [`opsys`]: operator systems (noncommutative graphs), the 8-dimensional family
//!   [`opsys::n_theta`], validation, membership and tensor products.
//! - [`chansynth`]: channels in Kraus form, graph extraction and synthesis of a
//!   channel with a prescribed graph.
//! - [`klcodes`]: Knill–Laflamme verification and the explicit code constructors.
//! - [`codesearch`]: the feasibility objective, the multi-start Stiefel search, the
//!   structured zero-pair solver and the linear-algebra oracles.
//! - [`observables`]: positive-operator bases and indistinguishable subspaces.
#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod chansynth;
pub mod codesearch;
mod error;
pub mod klcodes;
pub mod matcore;
pub mod observables;
pub mod opsys;

pub use error::{Error, Result};
pub use matcore::{Angle, CMatrix, CVector, SparseMat, C64};

/// Crate version, embedded in reports.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
