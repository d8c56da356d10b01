//! Copula-QAOA: correlated warm-start mixers for knapsack-type problems.
//!
//! The initial state encodes per-item probabilities from the smoothed
//! greedy. Each layer applies the diagonal cost phase `exp(−iγ Σ vᵢZᵢ)`
//! and then, on every qubit pair, `exp(−iβ R_cop (Zᵢ + Zⱼ) R_cop†)`, where
//! `R_cop|00⟩` prepares the two-bit copula distribution of the pair's
//! marginals.

mod circuit;
mod copula;
mod objective;
mod pairing;
mod warm;

pub use circuit::{
    apply_copula_mixer, apply_cost_layer, run_circuit, Circuit, CopQaoa, GateKind, GateOp, InitialState,
    QaoaParams,
};
pub use copula::{
    apply_rcop, apply_rcop_dagger, apply_rcop_theta, copula_conditionals, copula_pmf, rcop_angles, ry_angle,
    CopulaSpec,
};
pub use objective::{
    expected_cost_hamiltonian, objective_from_samples, sample_stats, BestOutcome, EvalStats, ObjectiveTable,
};
pub use pairing::PairingScheme;
pub use warm::{greedy_support_k, warm_start_spec};
