//! Linear recurrence sequences over Q: evaluation, root representations,
//! the related/exceptional classification and solving P(n₁) = Q(n₂).

pub mod classify;
pub mod recurrence;
pub mod roots;
pub mod solve;

use thiserror::Error;

pub use classify::{
    degenerate_check, exceptional_check, primitive_base, relatedness, relatedness_reps,
    ExceptionalReport, RelVerdict, Relatedness, DEFAULT_RELATEDNESS_BOUND,
};
pub use recurrence::{berlekamp_massey, q, LinearRecurrence, Q};
pub use roots::{rational_roots_q, root_representation, RootRep, RootTerm};
pub use solve::{
    classify_pair, holds_at, merge_solutions, solve_pair, substitution_check, ExpectedShape,
    PairSolution, Transcript,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LrsError {
    #[error("characteristic polynomial has irrational roots")]
    IrrationalRoots,
    #[error("exceptional check needs a related pair")]
    NotRelatedInput,
    #[error("coefficient too large for rational-root search")]
    TooLarge,
    #[error("malformed recurrence: {0}")]
    Shape(String),
}
