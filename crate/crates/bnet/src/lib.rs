//! Boolean-network analysis via the algebraic state-space representation.
//!
//! The crate parses Boolean networks from a small text format, builds their
//! transition matrices in δ-notation (semi-tensor product calculus) and
//! their state-transition graphs, computes smallest invariant dual
//! subspaces by three independent methods, and analyzes observability
//! through the correspondence between invariant dual subspaces and
//! equitable partitions.

pub mod error;
pub mod invariant;
pub mod matrix;
pub mod net;
pub mod observability;
pub mod partition;
pub mod stg;

pub use error::{Error, ErrorKind, Result};
pub use invariant::{
    coarsest_equitable_refinement, cycle_equitable_partitions, is_invariant, partition1,
    partition2, partition3, partition_of_dual, smallest_invariant_algebraic,
    smallest_invariant_structural, union_invariant, InvariantResult,
};
pub use matrix::{kron, stp, swap_matrix, DenseMatrix, LogicalMatrix};
pub use net::{index_to_state, state_index, BooleanNetwork, Expr};
pub use observability::{
    analyze, check_observability_conditions, construct_observable_output, distinguishable,
    is_observable, observability_index, observability_matrix, unobservable_partition,
    ConditionCheck, ObservabilityReport, ObservedBn,
};
pub use partition::{is_equitable, quotient, Partition};
pub use stg::{Stg, WeightedDigraph};
