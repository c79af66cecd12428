use serde::{Deserialize, Serialize};

/// Resource counters accumulated by the simulated primitives.
///
/// Every field only ever grows during a run, so a subroutine's cost is the
/// difference between snapshots taken before and after it.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct QueryStats {
    /// Uncontrolled applications of a state-preparation unitary or its inverse.
    pub u_calls: u64,
    /// Controlled applications of a state-preparation unitary or its inverse.
    pub controlled_u_calls: u64,
    pub qlsa_invocations: u64,
    pub p_a_queries: u64,
    pub p_b_queries: u64,
    pub grover_iterations: u64,
    /// Applications of the amplitude-estimation Grover operator.
    pub ae_repetitions: u64,
    pub gate_tally: u64,
}

impl QueryStats {
    pub fn add(&mut self, other: &QueryStats) {
        self.add_scaled(other, 1);
    }

    /// Adds `times` copies of `other`.
    pub fn add_scaled(&mut self, other: &QueryStats, times: u64) {
        self.u_calls += other.u_calls * times;
        self.controlled_u_calls += other.controlled_u_calls * times;
        self.qlsa_invocations += other.qlsa_invocations * times;
        self.p_a_queries += other.p_a_queries * times;
        self.p_b_queries += other.p_b_queries * times;
        self.grover_iterations += other.grover_iterations * times;
        self.ae_repetitions += other.ae_repetitions * times;
        self.gate_tally += other.gate_tally * times;
    }

    /// Field-wise `self - earlier`; panics in debug builds if a counter shrank.
    pub fn since(&self, earlier: &QueryStats) -> QueryStats {
        QueryStats {
            u_calls: self.u_calls - earlier.u_calls,
            controlled_u_calls: self.controlled_u_calls - earlier.controlled_u_calls,
            qlsa_invocations: self.qlsa_invocations - earlier.qlsa_invocations,
            p_a_queries: self.p_a_queries - earlier.p_a_queries,
            p_b_queries: self.p_b_queries - earlier.p_b_queries,
            grover_iterations: self.grover_iterations - earlier.grover_iterations,
            ae_repetitions: self.ae_repetitions - earlier.ae_repetitions,
            gate_tally: self.gate_tally - earlier.gate_tally,
        }
    }

    /// Field-wise maximum, used to charge the worst per-call cost of an oracle.
    pub fn max(&self, other: &QueryStats) -> QueryStats {
        QueryStats {
            u_calls: self.u_calls.max(other.u_calls),
            controlled_u_calls: self.controlled_u_calls.max(other.controlled_u_calls),
            qlsa_invocations: self.qlsa_invocations.max(other.qlsa_invocations),
            p_a_queries: self.p_a_queries.max(other.p_a_queries),
            p_b_queries: self.p_b_queries.max(other.p_b_queries),
            grover_iterations: self.grover_iterations.max(other.grover_iterations),
            ae_repetitions: self.ae_repetitions.max(other.ae_repetitions),
            gate_tally: self.gate_tally.max(other.gate_tally),
        }
    }
}
