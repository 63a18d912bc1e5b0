//! Self-maps of G_m^d of the form Φ(x)_i = (∏_k x_k^{M[i][k]})·y_i and the
//! reduction of orbit intersections to pairs of linear recurrences.

pub mod reduce;
pub mod uv;

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use serde::ser::SerializeStruct;
use serde::Serialize;
use thiserror::Error;

use crate::funcfield::{FieldError, RatFunc};
use crate::lrs::LrsError;
use crate::mulgroup::MulGroupError;

pub use reduce::{
    decomposed_coords, decomposed_point, log_orbit, orbit_group, reduce_to_lrs, torsion_solutions,
    LRSReduction, LogPoint, LogSpace, RecurrencePair, ResidueClass, ResiduePairClass, TorsionOrbit,
};
pub use uv::{int_charpoly, int_mat_mul, uv_sequences, UVDecomposition};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TorusError {
    #[error("torus points and translations must have nonzero coordinates")]
    ZeroCoordinate,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("point lies outside the group generated by the orbit data")]
    OutsideGroup,
    #[error("torsion orbit longer than {0} steps")]
    OrbitTooLong(usize),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Group(#[from] MulGroupError),
    #[error(transparent)]
    Lrs(#[from] LrsError),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TorusMap {
    m: Vec<Vec<i64>>,
    y: Vec<RatFunc>,
}

impl Serialize for TorusMap {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("TorusMap", 2)?;
        st.serialize_field("M", &self.m)?;
        st.serialize_field(
            "y",
            &self.y.iter().map(|v| v.to_string()).collect::<Vec<_>>(),
        )?;
        st.end()
    }
}

impl TorusMap {
    pub fn new(m: Vec<Vec<i64>>, y: Vec<RatFunc>) -> Result<Self, TorusError> {
        let d = m.len();
        if d == 0 {
            return Err(TorusError::DimensionMismatch {
                expected: 1,
                got: 0,
            });
        }
        if let Some(r) = m.iter().find(|r| r.len() != d) {
            return Err(TorusError::DimensionMismatch {
                expected: d,
                got: r.len(),
            });
        }
        if y.len() != d {
            return Err(TorusError::DimensionMismatch {
                expected: d,
                got: y.len(),
            });
        }
        if y.iter().any(|v| v.is_zero()) {
            return Err(TorusError::ZeroCoordinate);
        }
        Ok(TorusMap { m, y })
    }

    pub fn dim(&self) -> usize {
        self.m.len()
    }

    pub fn m(&self) -> &[Vec<i64>] {
        &self.m
    }

    pub fn y(&self) -> &[RatFunc] {
        &self.y
    }

    /// Φ⁰(x): the monomial part alone.
    pub fn apply_monomial(&self, x: &[RatFunc], cap: usize) -> Result<Vec<RatFunc>, TorusError> {
        let rows: Vec<Vec<BigInt>> = self
            .m
            .iter()
            .map(|r| r.iter().map(|&e| BigInt::from(e)).collect())
            .collect();
        monomial(&rows, x, cap)
    }

    pub fn apply(&self, x: &[RatFunc], cap: usize) -> Result<Vec<RatFunc>, TorusError> {
        let mono = self.apply_monomial(x, cap)?;
        mono.iter()
            .zip(&self.y)
            .map(|(a, b)| Ok(a.checked_mul(b, cap)?))
            .collect()
    }
}

pub(crate) fn check_point(x: &[RatFunc], d: usize) -> Result<(), TorusError> {
    if x.len() != d {
        return Err(TorusError::DimensionMismatch {
            expected: d,
            got: x.len(),
        });
    }
    if x.iter().any(|v| v.is_zero()) {
        return Err(TorusError::ZeroCoordinate);
    }
    Ok(())
}

/// x^e for a possibly huge exponent; constants reduce e modulo |F^*|.
fn pow_big(x: &RatFunc, e: &BigInt, cap: usize) -> Result<RatFunc, TorusError> {
    if let Some(c) = x.as_constant() {
        let f = x.field();
        let n = BigInt::from(f.order() - 1);
        let r = ((e % &n) + &n) % &n;
        return Ok(RatFunc::constant(f.clone(), f.pow(c, r.to_u64().unwrap())));
    }
    match e.to_i64() {
        Some(k) => Ok(x.checked_pow(k, cap)?),
        None => Err(FieldError::DegreeOverflow {
            degree: usize::MAX,
            cap,
        }
        .into()),
    }
}

fn monomial(rows: &[Vec<BigInt>], x: &[RatFunc], cap: usize) -> Result<Vec<RatFunc>, TorusError> {
    check_point(x, rows.len())?;
    let one = RatFunc::one(x[0].field().clone());
    rows.iter()
        .map(|r| {
            r.iter().zip(x).try_fold(one.clone(), |acc, (e, xi)| {
                if e.is_zero() {
                    return Ok(acc);
                }
                Ok(acc.checked_mul(&pow_big(xi, e, cap)?, cap)?)
            })
        })
        .collect()
}

/// Φ^n(x). Binary powering of the pair (exponent matrix, translation), with
/// (M₁, Y₁)∘(M₂, Y₂) = (M₁M₂, M₁·Y₂ ⊙ Y₁).
pub fn torus_iterate(
    phi: &TorusMap,
    x: &[RatFunc],
    n: u64,
    cap: usize,
) -> Result<Vec<RatFunc>, TorusError> {
    check_point(x, phi.dim())?;
    if n == 0 {
        return Ok(x.to_vec());
    }
    let d = phi.dim();
    let field = x[0].field().clone();
    let ident: Vec<Vec<BigInt>> = (0..d)
        .map(|i| (0..d).map(|j| BigInt::from((i == j) as i64)).collect())
        .collect();
    let compose = |(m1, y1): &(Vec<Vec<BigInt>>, Vec<RatFunc>),
                   (m2, y2): &(Vec<Vec<BigInt>>, Vec<RatFunc>)| {
        let moved = monomial(m1, y2, cap)?;
        let y: Vec<RatFunc> = moved
            .iter()
            .zip(y1)
            .map(|(a, b)| a.checked_mul(b, cap))
            .collect::<Result<_, _>>()?;
        Ok::<_, TorusError>((int_mat_mul(m1, m2), y))
    };
    let mut acc = (ident, vec![RatFunc::one(field); d]);
    let mut base = (
        phi.m
            .iter()
            .map(|r| r.iter().map(|&e| BigInt::from(e)).collect())
            .collect(),
        phi.y.clone(),
    );
    let mut k = n;
    while k > 0 {
        if k & 1 == 1 {
            acc = compose(&acc, &base)?;
        }
        k >>= 1;
        if k > 0 {
            base = compose(&base, &base)?;
        }
    }
    let mono = monomial(&acc.0, x, cap)?;
    Ok(mono
        .iter()
        .zip(&acc.1)
        .map(|(a, b)| a.checked_mul(b, cap))
        .collect::<Result<_, _>>()?)
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::funcfield::{GaloisField, Poly};

    fn f3() -> Arc<GaloisField> {
        Arc::new(GaloisField::prime(3).unwrap())
    }

    fn rf(f: &Arc<GaloisField>, n: &[i64]) -> RatFunc {
        RatFunc::from_poly(Poly::from_ints(f.clone(), n))
    }

    #[test]
    fn translation_orbit() {
        let f = f3();
        let phi = TorusMap::new(vec![vec![1]], vec![rf(&f, &[1, 1])]).unwrap();
        let one = vec![rf(&f, &[1])];
        assert_eq!(
            torus_iterate(&phi, &one, 5, 4096).unwrap(),
            vec![rf(&f, &[1, 1]).pow(5).unwrap()]
        );
        assert_eq!(torus_iterate(&phi, &one, 0, 4096).unwrap(), one);
    }

    #[test]
    fn fast_path_matches_sequential() {
        let f = f3();
        let phi = TorusMap::new(
            vec![vec![1, -1], vec![2, 0]],
            vec![rf(&f, &[1, 1]), rf(&f, &[2, 0, 1])],
        )
        .unwrap();
        let x = vec![rf(&f, &[0, 1]), rf(&f, &[1, 0, 1])];
        let mut seq = x.clone();
        for n in 0..=7 {
            assert_eq!(torus_iterate(&phi, &x, n, 1 << 20).unwrap(), seq, "n = {n}");
            seq = phi.apply(&seq, 1 << 20).unwrap();
        }
    }

    #[test]
    fn rejects_bad_input() {
        let f = f3();
        assert_eq!(
            TorusMap::new(vec![vec![1]], vec![rf(&f, &[0])]),
            Err(TorusError::ZeroCoordinate)
        );
        let phi = TorusMap::new(vec![vec![2]], vec![rf(&f, &[1])]).unwrap();
        assert_eq!(
            torus_iterate(&phi, &[rf(&f, &[0])], 1, 64),
            Err(TorusError::ZeroCoordinate)
        );
        assert!(matches!(
            torus_iterate(&phi, &[rf(&f, &[0, 1])], 20, 4096),
            Err(TorusError::Field(FieldError::DegreeOverflow { .. }))
        ));
        let json = serde_json::to_string(&phi).unwrap();
        assert_eq!(json, r#"{"M":[[2]],"y":["1"]}"#);
    }
}
