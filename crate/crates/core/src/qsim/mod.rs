//! Statevector-level primitives: state preparation, phase and amplitude
//! estimation, Grover search, minimum finding and an ideal linear-system
//! oracle.

pub mod circuit;
pub mod estimation;
pub mod oracles;
pub mod qlsa;
pub mod search;
pub mod state;
mod stats;

pub use circuit::{prepare_sparse_state, prepare_state_on, Circuit, Gate, GateKind, PreparedUnitary};
pub use estimation::{
    ae_distribution, kernel, pe_accuracy, pe_distribution, pe_total_bits, phase_estimation, theta_of, AeSample,
    AeSampler, Mode,
};
pub use oracles::{column_superposition_oracle, ColumnOracle};
pub use qlsa::{QlsaErrorMode, QlsaOracle, QlsaOutput};
pub use search::{counting_search, min_finding, qsearch, MinOutcome, SearchOutcome};
pub use state::{qubits_for, StateVector};
pub use stats::QueryStats;
