//! Cloning-based incompatibility of quantum observables.
//!
//! The incompatibility of a set of observables is measured by how well the
//! uniform ensemble of their eigenstates can be copied by a symmetric
//! 1 -> 2 quantum cloning machine. The crate is organised bottom-up:
//!
//! - [`qmath`]: small dense complex linear algebra (eigensystems, partial
//!   traces, Haar sampling).
//! - [`ensembles`]: observable sets, eigenstate ensembles, mutually unbiased
//!   bases and the participation quantities `A` and `B`.
//! - [`qcm`]: the symmetric cloning machine itself, in closed form and as an
//!   explicit tripartite isometry.
//! - [`optimal`]: cloning-basis search, optimal machine parameters, the
//!   incompatibility `Q_c`, its upper bounds and figure sweeps.
//! - [`qubit`]: closed-form solution for a pair of qubit observables.

pub mod ensembles;
pub mod error;
pub mod format;
pub mod optimal;
pub mod qcm;
pub mod qmath;
pub mod qubit;

pub use error::{Error, Result};

/// Default absolute tolerance for Hermiticity, trace and positivity checks.
pub const DEFAULT_TOL: f64 = 1e-9;
