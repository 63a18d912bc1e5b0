//! Exact arithmetic over F_{q^k}, F_{q^k}[t] and F_{q^k}(t).

pub mod factor;
pub mod gf;
pub mod poly;
pub mod ratfunc;
pub mod roots;

pub use factor::{monic_divisors, poly_factor, Factorization};
pub use gf::{Elem, GaloisField};
pub use poly::Poly;
pub use ratfunc::RatFunc;
pub use roots::{rational_roots, root_multiplicities};

/// Largest degree of numerator or denominator any operation may produce.
pub const DEFAULT_DEGREE_CAP: usize = 4096;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FieldError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("the zero polynomial has no factorization or roots")]
    ZeroPolynomial,
    #[error("degree {degree} exceeds the cap {cap}")]
    DegreeOverflow { degree: usize, cap: usize },
    #[error("invalid modulus: {0}")]
    InvalidModulus(String),
    #[error("{0} is not a prime characteristic")]
    InvalidCharacteristic(u64),
    #[error("constant field of characteristic {p} and degree {degree} is too large")]
    FieldTooLarge { p: u64, degree: u32 },
}
