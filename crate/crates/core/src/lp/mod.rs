//! LP data model: sparse storage, bases, normalization and spectral statistics.

mod basis;
mod instance;
pub mod json;
pub mod mps;
mod sparse;
pub mod spectral;

pub use basis::{normalize, sparsity_stats, BasisState, SparsityStats, DEFAULT_EPS_PRIME};
pub use instance::LpInstance;
pub use json::{parse_json, to_json};
pub use mps::parse_mps;
pub use sparse::SparseMatrix;
pub use spectral::{estimate_sigma_max, SigmaEstimate, SymmetrizedSystem};
