//! Solution-set algebra over Z^m: elementary p-nested sets, p-normal sets,
//! one-parameter linear and exponential families, their intersections, and
//! structure fitting for enumerated point sets in the plane.

pub mod exponents;
pub mod families;
pub mod fit;
pub mod nested;
pub mod pnormal;

use thiserror::Error;

use crate::mulgroup::MulGroupError;

pub use families::{
    exp_intersect, linear_intersect, mixed_intersect, ExpIntersection, ExponentialFamily,
    LinearFamily, LinearIntersection,
};
pub use fit::{
    fit_structure, Domain, FitComponent, FitMode, FitResult, Prediction, Window,
    DEFAULT_COMPONENT_CAP,
};
pub use nested::{
    pnested_intersect, pnested_member, ElementaryPNestedSet, Membership, PNestedIntersection,
};
pub use pnormal::{pnormal_member, CosetBase, PNormalComponent, PNormalSet};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SetError {
    #[error("invalid set description: {0}")]
    Invalid(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error(transparent)]
    Group(#[from] MulGroupError),
}
