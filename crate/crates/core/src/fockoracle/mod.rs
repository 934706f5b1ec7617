//! Brute-force truncated Fock-space simulator, used as an independent oracle
//! for every closed form in [`crate::coherent`] and [`crate::subspace`].

mod energy;
mod invariance;
mod operators;
mod space;
mod states;

pub use energy::{t_operator_eigenvalue, verify_u_le_2t, LgrcReport};
pub use invariance::{
    apply_passive, invariance_check, invariance_deviation, lifted_mode_unitary,
    single_pair_vector, MAX_INVARIANCE_COPIES,
};
pub use operators::{build_all_z, build_z, SparseOperator, ZKind};
pub use space::{fock_dimension, FockSpace, DEFAULT_STATE_LIMIT};
pub use states::{
    coherent_truncated, degree_weights, gram_oracle, gram_oracle_size, gram_oracle_with_limit,
    per_copy_degree_overlaps, truncated_overlap, truncated_overlap_from_copies,
    truncation_tail, PairSpace, TruncatedState, TAIL_LIMIT,
};
