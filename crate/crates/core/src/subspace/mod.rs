//! The `U(n)`-symmetric subspace `V_{<=K}`: monomial basis, exact Gram
//! matrices, Monte-Carlo integration of `P_eta`, and the finite de Finetti
//! certificate.

mod basis;
mod eigen;
mod export;
mod gram;
mod operator;
mod verify;

pub use basis::{dim_v_eq, dim_v_leq, BasisSet, MonomialIndex};
pub use eigen::{generalized_extremal_eigs, whitening, GeneralizedEigs, CONDITION_LIMIT};
pub use export::{read_matrix_binary, read_matrix_text, write_matrix_binary, write_matrix_text};
pub use gram::{gram_block, gram_block_exact, gram_entry_exact, gram_matrix};
pub use operator::{
    operator_matrix_p_eta, operator_matrix_p_eta_seeded, p_eta_vacuum_mass, GramOperatorPair,
    PEtaRadialSampler,
};
pub use verify::{
    photon_block_via_gram, verify_definetti, verify_definetti_seeded, DefinettiReport, Verdict,
    SIGMA_MARGIN,
};
