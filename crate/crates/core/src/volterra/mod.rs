//! P/Q decompositions of future values, ψ-inversion and the d_k tail
//! functionals.

mod archinf;
mod psi;
mod tvarch;

pub use archinf::{
    archinf_path_from_innovations, d_sequence, pq_archinf, q0k_mean, q0k_mean_routes, DualRoute, PastBlock,
    TailFunctional, CHAIN_ORACLE_LIMIT,
};
pub use psi::{psi_coefficients, psi_from_slice, PsiSequence, PsiTable};
pub use tvarch::{pq_tvarch, q_weights_tvarch};

/// Split X = Z · (P + Q) of a future value: P is driven by innovations
/// after the conditioning time, Q is linear in the past block.
#[derive(Debug, Clone, PartialEq)]
pub struct PqTerms {
    pub p_term: f64,
    pub q_term: f64,
    pub s: usize,
    pub k: usize,
    pub t: i64,
    /// Innovation values used, Z_{t+1}, …, Z_{t+k+s−1}.
    pub conditioning_block: Vec<f64>,
}

impl PqTerms {
    pub fn total(&self) -> f64 {
        self.p_term + self.q_term
    }
}
