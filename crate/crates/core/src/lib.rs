//! Desk-scale simulation of quantum subroutines for the simplex method.
//!
//! The crate is organised bottom-up:
//!
//! * [`lp`] — LP data model, sparse storage, normalization and spectral statistics;
//! * [`classical`] — exact classical simplex, the reference oracle;
//! * [`qsim`] — statevector primitives: state preparation, phase and amplitude
//!   estimation, Grover search, minimum finding and an ideal linear-system oracle;
//! * [`subroutines`] — sign estimation, pricing, optimality and unboundedness
//!   tests, the ratio test, norm estimation, column splitting and the iteration
//!   driver;
//! * [`cost`] — unit-constant evaluation of the complexity formulas;
//! * [`verify`] — property suites shared by the CLI and the acceptance tests.

pub mod classical;
pub mod cost;
pub mod error;
pub mod lp;
pub mod qsim;
pub mod subroutines;
pub mod verify;

pub use error::{Error, Result};
