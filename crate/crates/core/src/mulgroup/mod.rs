//! Finitely generated subgroups of F_{q^k}(t)^*.
//!
//! An element is logged as g^u · ∏ π^e with g the least generator of the
//! constant field's unit group and π monic irreducible. A group generated by a
//! finite list is embedded in Γ₀ × Γ₁: Γ₀ the cyclic subgroup of constants
//! generated by the unit parts, Γ₁ the lattice spanned by the exponent vectors.

pub mod lattice;

use std::collections::BTreeMap;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::funcfield::{poly_factor, FieldError, GaloisField, Poly, RatFunc};
pub use lattice::{
    hermite, identity, int_vec, lattice_member, mat_mul, rank, smith, IntMat, IntVec, Lattice,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MulGroupError {
    #[error("zero has no multiplicative logarithm")]
    ZeroValue,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("basis vectors are linearly dependent")]
    DependentBasis,
    #[error("empty generator list")]
    EmptyGenerators,
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// Multiplicative logarithm: x = g^unit_exp · ∏ π^e, no zero exponents stored.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MulLog {
    pub unit_exp: u64,
    pub support: BTreeMap<Poly, i64>,
}

impl Serialize for MulLog {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let support: Vec<(String, i64)> = self
            .support
            .iter()
            .map(|(p, e)| (p.to_string(), *e))
            .collect();
        let mut st = s.serialize_struct("MulLog", 2)?;
        st.serialize_field("support", &support)?;
        st.serialize_field("unit_exp", &self.unit_exp)?;
        st.end()
    }
}

impl MulLog {
    /// Rebuild the logged value.
    pub fn exp(&self, field: &Arc<GaloisField>) -> RatFunc {
        let unit = field.pow(field.generator(), self.unit_exp);
        let mut num = Poly::constant(field.clone(), unit);
        let mut den = Poly::one(field.clone());
        for (p, &e) in &self.support {
            if e > 0 {
                num = &num * &p.pow(e as u64);
            } else {
                den = &den * &p.pow(e.unsigned_abs());
            }
        }
        RatFunc::new(num, den).expect("nonzero denominator")
    }
}

/// The logarithm of a nonzero element.
pub fn mul_log(x: &RatFunc) -> Result<MulLog, MulGroupError> {
    if x.is_zero() {
        return Err(MulGroupError::ZeroValue);
    }
    let field = x.field();
    let num = poly_factor(x.num())?;
    let den = poly_factor(x.den())?;
    let unit_exp = field.discrete_log(num.unit).expect("nonzero unit");
    let mut support = BTreeMap::new();
    for (p, m) in num.factors {
        *support.entry(p).or_insert(0i64) += m as i64;
    }
    for (p, m) in den.factors {
        *support.entry(p).or_insert(0i64) -= m as i64;
    }
    support.retain(|_, e| *e != 0);
    Ok(MulLog { unit_exp, support })
}

/// Γ₀ × Γ₁ for a list of generators.
#[derive(Clone, Debug)]
pub struct GroupBasis {
    pub field: Arc<GaloisField>,
    /// Monic irreducibles indexing the exponent coordinates, canonical order.
    pub support: Vec<Poly>,
    /// Γ₁ with basis the Hermite form of the generators' exponent vectors;
    /// `torsion_order` is |Γ₀|.
    pub lattice: Lattice,
    /// Γ₀ = ⟨g^unit_step⟩ inside the unit group of order `unit_modulus`.
    pub unit_step: u64,
    pub unit_modulus: u64,
}

impl GroupBasis {
    pub fn rank(&self) -> usize {
        self.lattice.rank()
    }

    pub fn torsion_order(&self) -> u64 {
        self.lattice.torsion_order
    }

    /// Exponent vector of a log over this support; None when the log involves
    /// an irreducible outside it.
    pub fn exponent_vector(&self, log: &MulLog) -> Option<IntVec> {
        let mut v = vec![BigInt::zero(); self.support.len()];
        for (p, &e) in &log.support {
            let i = self.support.binary_search(p).ok()?;
            v[i] = BigInt::from(e);
        }
        Some(v)
    }

    /// (unit exponent, Γ₁-coordinates) of an element of Γ; None when x ∉ Γ.
    pub fn coordinates(&self, x: &RatFunc) -> Result<Option<(u64, IntVec)>, MulGroupError> {
        let log = mul_log(x)?;
        let Some(v) = self.exponent_vector(&log) else {
            return Ok(None);
        };
        if log.unit_exp % self.unit_step != 0 {
            return Ok(None);
        }
        Ok(self.lattice.member(&v)?.map(|c| (log.unit_exp, c)))
    }
}

/// Γ₀ × Γ₁ containing every generator.
pub fn group_basis(generators: &[RatFunc]) -> Result<GroupBasis, MulGroupError> {
    let first = generators.first().ok_or(MulGroupError::EmptyGenerators)?;
    let field = first.field().clone();
    let logs = generators
        .iter()
        .map(mul_log)
        .collect::<Result<Vec<_>, _>>()?;
    let mut support: Vec<Poly> = logs
        .iter()
        .flat_map(|l| l.support.keys().cloned())
        .collect();
    support.sort();
    support.dedup();
    let unit_modulus = field.order() - 1;
    let unit_step = logs.iter().fold(unit_modulus, |g, l| g.gcd(&l.unit_exp));
    let rows: IntMat = logs
        .iter()
        .map(|l| {
            let mut v = vec![BigInt::zero(); support.len()];
            for (p, &e) in &l.support {
                v[support.binary_search(p).unwrap()] = BigInt::from(e);
            }
            v
        })
        .collect();
    let mut lattice = Lattice::span(support.len(), &rows)?;
    lattice.torsion_order = unit_modulus / unit_step;
    Ok(GroupBasis {
        field,
        support,
        lattice,
        unit_step,
        unit_modulus,
    })
}

/// Rank of the raw exponent matrix by fraction-free Gaussian elimination; an
/// oracle independent of the Hermite form.
pub fn gaussian_rank(rows: &IntMat) -> usize {
    let mut m = rows.clone();
    let ncols = m.first().map_or(0, |r| r.len());
    let mut r = 0;
    for c in 0..ncols {
        let Some(p) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        for i in r + 1..m.len() {
            if m[i][c].is_zero() {
                continue;
            }
            let (a, b) = (m[r][c].clone(), m[i][c].clone());
            for j in 0..ncols {
                m[i][j] = &m[i][j] * &a - &m[r][j] * &b;
            }
        }
        r += 1;
    }
    r
}

/// Small-integer view of a coordinate vector, for display.
pub fn to_i64_vec(v: &[BigInt]) -> Option<Vec<i64>> {
    v.iter().map(|x| x.to_i64()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f3() -> Arc<GaloisField> {
        Arc::new(GaloisField::prime(3).unwrap())
    }

    fn rf(f: &Arc<GaloisField>, n: &[i64], d: &[i64]) -> RatFunc {
        RatFunc::new(Poly::from_ints(f.clone(), n), Poly::from_ints(f.clone(), d)).unwrap()
    }

    #[test]
    fn log_examples() {
        let f = f3();
        let x = rf(&f, &[0, 1, 2, 1], &[1]); // t (t+1)^2
        let l = mul_log(&x).unwrap();
        assert_eq!(l.unit_exp, 0);
        let sup: Vec<(String, i64)> = l.support.iter().map(|(p, e)| (p.to_string(), *e)).collect();
        assert_eq!(sup, vec![("t".into(), 1), ("t + 1".into(), 2)]);
        assert_eq!(l.exp(&f), x);

        let two = mul_log(&rf(&f, &[2], &[1])).unwrap();
        assert_eq!(two.unit_exp, 1);
        assert!(two.support.is_empty());

        let y = rf(&f, &[-1, 0, 1], &[0, 1]); // (t^2 - 1)/t
        let l = mul_log(&y).unwrap();
        let sup: Vec<(String, i64)> = l.support.iter().map(|(p, e)| (p.to_string(), *e)).collect();
        assert_eq!(
            sup,
            vec![("t".into(), -1), ("t + 1".into(), 1), ("t + 2".into(), 1)]
        );
        assert_eq!(l.unit_exp, 0);
        assert_eq!(l.exp(&f), y);

        assert!(matches!(
            mul_log(&RatFunc::zero(f)),
            Err(MulGroupError::ZeroValue)
        ));
    }

    #[test]
    fn basis_examples() {
        let f = f3();
        let b = group_basis(&[rf(&f, &[0, 1], &[1]), rf(&f, &[1, 1], &[1])]).unwrap();
        assert_eq!((b.rank(), b.torsion_order()), (2, 1));
        let b = group_basis(&[rf(&f, &[0, 1], &[1]), rf(&f, &[0, 0, 1], &[1])]).unwrap();
        assert_eq!(b.rank(), 1);
        let b = group_basis(&[rf(&f, &[0, 2], &[1]), rf(&f, &[1, 1], &[1])]).unwrap();
        assert_eq!((b.rank(), b.torsion_order()), (2, 2));
        assert!(matches!(
            group_basis(&[]),
            Err(MulGroupError::EmptyGenerators)
        ));
    }

    #[test]
    fn generators_have_coordinates() {
        let f = f3();
        let gens = [
            rf(&f, &[0, 2], &[1]),
            rf(&f, &[0, 0, 1], &[1, 1]),
            rf(&f, &[2, 0, 0, 1], &[1]),
        ];
        let b = group_basis(&gens).unwrap();
        for g in &gens {
            assert!(b.coordinates(g).unwrap().is_some());
        }
        assert!(b.coordinates(&rf(&f, &[1, 0, 1], &[1])).unwrap().is_none());
    }

    #[test]
    fn serializes_sorted_support() {
        let f = f3();
        let l = mul_log(&rf(&f, &[0, 2, 2], &[1])).unwrap(); // 2 t (t+1)
        let s = serde_json::to_string(&l).unwrap();
        assert_eq!(s, r#"{"support":[["t",1],["t + 1",1]],"unit_exp":1}"#);
    }
}
