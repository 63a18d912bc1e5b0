//! Affine dynamics x ↦ A·x + b on K^d, K = F_{q^k}(t).
//!
//! With a fixed point ã of each map, Φ^n(a) = ã + A^n(a − ã), so orbit
//! equality Φ₁^n(a₁) = Φ₂^m(a₂) becomes the linear identity
//! A₁^n·b₁ = A₂^m·b₂ + b₃ (see [`ReducedPair`]).

pub mod jordan;
pub mod matrix;

use serde::Serialize;
use thiserror::Error;

use crate::funcfield::{FieldError, RatFunc};
pub use jordan::{
    binom_mod_p, binom_period, jordan_block, jordan_block_power, jordan_form, JordanData,
    JordanSystem,
};
use matrix::*;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AffineError {
    #[error("det(A - I) = 0: no unique fixed point")]
    SingularShift,
    #[error("the linear part is not invertible")]
    NotInvertible,
    #[error(
        "characteristic polynomial does not split: {found} of {needed} roots in the working field"
    )]
    NotSplit { found: usize, needed: usize },
    #[error("zero eigenvalue")]
    ZeroEigenvalue,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// Φ(x) = A·x + b with A invertible.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AffineMap {
    a: RMat,
    b: RVec,
}

#[derive(Serialize)]
struct AffineMapWire {
    #[serde(rename = "A")]
    a: Vec<Vec<String>>,
    b: Vec<String>,
}

impl Serialize for AffineMap {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        AffineMapWire {
            a: mat_strings(&self.a),
            b: vec_strings(&self.b),
        }
        .serialize(s)
    }
}

impl AffineMap {
    pub fn new(a: RMat, b: RVec) -> Result<Self, AffineError> {
        let d = a.len();
        if d == 0 || !is_square(&a) {
            return Err(AffineError::DimensionMismatch {
                expected: d,
                got: a.first().map_or(0, |r| r.len()),
            });
        }
        if b.len() != d {
            return Err(AffineError::DimensionMismatch {
                expected: d,
                got: b.len(),
            });
        }
        if det(&a).is_zero() {
            return Err(AffineError::NotInvertible);
        }
        Ok(AffineMap { a, b })
    }

    pub fn dim(&self) -> usize {
        self.a.len()
    }

    pub fn a(&self) -> &RMat {
        &self.a
    }

    pub fn b(&self) -> &RVec {
        &self.b
    }

    /// One application.
    pub fn apply(&self, x: &[RatFunc]) -> RVec {
        vec_add(&mat_vec(&self.a, x), &self.b)
    }

    /// The (d+1)×(d+1) matrix [[A, b], [0, 1]].
    pub fn augmented(&self) -> RMat {
        let d = self.dim();
        let field = self.a[0][0].field().clone();
        let mut m = zeros(&field, d + 1, d + 1);
        for i in 0..d {
            m[i][..d].clone_from_slice(&self.a[i]);
            m[i][d] = self.b[i].clone();
        }
        m[d][d] = RatFunc::one(field);
        m
    }

    /// True when applying the Frobenius to the defining data is the same as
    /// squaring the map p times: Frob(A) = A^p, and the fixed point and the
    /// offset a − ã are Frobenius-fixed. Then Φ^{pn}(a) = Frob(Φ^n(a)).
    pub fn frobenius_compatible(&self, a: &[RatFunc], cap: usize) -> Result<bool, AffineError> {
        let p = self.a[0][0].field().characteristic();
        let fixed = match fixed_point(self) {
            Ok(f) => f,
            Err(AffineError::SingularShift) => return Ok(false),
            Err(e) => return Err(e),
        };
        let off = vec_sub(a, &fixed);
        Ok(frobenius_mat(&self.a) == mat_pow(&self.a, p, cap)?
            && frobenius_vec(&fixed) == fixed
            && frobenius_vec(&off) == off)
    }
}

fn check_dim(phi: &AffineMap, a: &[RatFunc]) -> Result<(), AffineError> {
    if a.len() != phi.dim() {
        return Err(AffineError::DimensionMismatch {
            expected: phi.dim(),
            got: a.len(),
        });
    }
    Ok(())
}

/// Φ^n(a) by binary powering of the augmented matrix.
pub fn affine_iterate(
    phi: &AffineMap,
    a: &[RatFunc],
    n: u64,
    cap: usize,
) -> Result<RVec, AffineError> {
    check_dim(phi, a)?;
    if n == 0 {
        return Ok(a.to_vec());
    }
    let pw = mat_pow(&phi.augmented(), n, cap)?;
    let field = a[0].field().clone();
    let mut ext = a.to_vec();
    ext.push(RatFunc::one(field));
    let mut out = mat_vec(&pw, &ext);
    out.pop();
    for x in &out {
        x.check_degree(cap)?;
    }
    Ok(out)
}

/// Φ^n(a), writing n = p^j·n₀ and applying the Frobenius j times to Φ^{n₀}(a)
/// when the map is Frobenius-compatible at a. Returns the value and whether
/// the shortcut was taken.
pub fn affine_iterate_frobenius(
    phi: &AffineMap,
    a: &[RatFunc],
    n: u64,
    cap: usize,
) -> Result<(RVec, bool), AffineError> {
    check_dim(phi, a)?;
    let p = a[0].field().characteristic();
    let (mut n0, mut j) = (n, 0u32);
    while n0 > 0 && n0 % p == 0 {
        n0 /= p;
        j += 1;
    }
    if j == 0 || !phi.frobenius_compatible(a, cap)? {
        return Ok((affine_iterate(phi, a, n, cap)?, false));
    }
    let base = affine_iterate(phi, a, n0, cap)?;
    let predicted = vec_degree(&base) as u128 * (p as u128).pow(j);
    if predicted > cap as u128 {
        return Err(FieldError::DegreeOverflow {
            degree: predicted.min(usize::MAX as u128) as usize,
            cap,
        }
        .into());
    }
    Ok((base.iter().map(|x| x.frobenius_power(j)).collect(), true))
}

/// The unique ã with A·ã + b = ã.
pub fn fixed_point(phi: &AffineMap) -> Result<RVec, AffineError> {
    let field = phi.a[0][0].field().clone();
    let shifted = mat_sub(&phi.a, &identity(&field, phi.dim()));
    let neg_b: RVec = phi.b.iter().map(|x| -x).collect();
    solve(&shifted, &neg_b).ok_or(AffineError::SingularShift)
}

/// A₁^n·b₁ = A₂^m·b₂ + b₃, equivalent to Φ₁^n(a₁) = Φ₂^m(a₂).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReducedPair {
    pub a1: RMat,
    pub a2: RMat,
    pub b1: RVec,
    pub b2: RVec,
    pub b3: RVec,
    pub fixed1: RVec,
    pub fixed2: RVec,
}

impl Serialize for ReducedPair {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("ReducedPair", 5)?;
        st.serialize_field("A1", &mat_strings(&self.a1))?;
        st.serialize_field("A2", &mat_strings(&self.a2))?;
        st.serialize_field("b1", &vec_strings(&self.b1))?;
        st.serialize_field("b2", &vec_strings(&self.b2))?;
        st.serialize_field("b3", &vec_strings(&self.b3))?;
        st.end()
    }
}

impl ReducedPair {
    /// A₁^n·b₁; negative n uses A₁^{-1}.
    pub fn lhs(&self, n: i64, cap: usize) -> Result<RVec, AffineError> {
        Ok(mat_vec(&mat_pow_signed(&self.a1, n, cap)?, &self.b1))
    }

    /// A₂^m·b₂ + b₃; negative m uses A₂^{-1}.
    pub fn rhs(&self, m: i64, cap: usize) -> Result<RVec, AffineError> {
        Ok(vec_add(
            &mat_vec(&mat_pow_signed(&self.a2, m, cap)?, &self.b2),
            &self.b3,
        ))
    }

    pub fn holds(&self, n: i64, m: i64, cap: usize) -> Result<bool, AffineError> {
        Ok(self.lhs(n, cap)? == self.rhs(m, cap)?)
    }
}

pub fn conjugate_pair(
    phi1: &AffineMap,
    phi2: &AffineMap,
    a1: &[RatFunc],
    a2: &[RatFunc],
) -> Result<ReducedPair, AffineError> {
    check_dim(phi1, a1)?;
    check_dim(phi2, a2)?;
    if phi1.dim() != phi2.dim() {
        return Err(AffineError::DimensionMismatch {
            expected: phi1.dim(),
            got: phi2.dim(),
        });
    }
    let f1 = fixed_point(phi1)?;
    let f2 = fixed_point(phi2)?;
    Ok(ReducedPair {
        a1: phi1.a.clone(),
        a2: phi2.a.clone(),
        b1: vec_sub(a1, &f1),
        b2: vec_sub(a2, &f2),
        b3: vec_sub(&f2, &f1),
        fixed1: f1,
        fixed2: f2,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind")]
pub enum Preperiodicity {
    Periodic { preperiod: u64, period: u64 },
    NoRepetitionWithin { budget: u64, degree_overflow: bool },
}

/// Brent cycle detection on the exact orbit of a, at most `budget` map
/// applications in the search phase. A Periodic answer is re-verified.
pub fn detect_preperiodicity(
    phi: &AffineMap,
    a: &[RatFunc],
    budget: u64,
    cap: usize,
) -> Result<Preperiodicity, AffineError> {
    check_dim(phi, a)?;
    let step = |x: &RVec| -> Result<RVec, FieldError> {
        let y = phi.apply(x);
        for v in &y {
            v.check_degree(cap)?;
        }
        Ok(y)
    };
    let overflow = |budget| Preperiodicity::NoRepetitionWithin {
        budget,
        degree_overflow: true,
    };
    let mut power = 1u64;
    let mut lam = 1u64;
    let mut tortoise = a.to_vec();
    let Ok(mut hare) = step(&tortoise) else {
        return Ok(overflow(budget));
    };
    let mut used = 1u64;
    while tortoise != hare {
        if used >= budget {
            return Ok(Preperiodicity::NoRepetitionWithin {
                budget,
                degree_overflow: false,
            });
        }
        if power == lam {
            tortoise = hare.clone();
            power *= 2;
            lam = 0;
        }
        hare = match step(&hare) {
            Ok(h) => h,
            Err(_) => return Ok(overflow(budget)),
        };
        lam += 1;
        used += 1;
    }
    let mut tortoise = a.to_vec();
    let mut hare = a.to_vec();
    for _ in 0..lam {
        hare = phi.apply(&hare);
    }
    let mut mu = 0u64;
    while tortoise != hare {
        tortoise = phi.apply(&tortoise);
        hare = phi.apply(&hare);
        mu += 1;
    }
    let x_mu = affine_iterate(phi, a, mu, cap)?;
    let x_back = affine_iterate(phi, a, mu + lam, cap)?;
    assert_eq!(x_mu, x_back, "cycle certificate failed re-verification");
    Ok(Preperiodicity::Periodic {
        preperiod: mu,
        period: lam,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::funcfield::{GaloisField, Poly};
    use std::sync::Arc;

    fn fld(p: u64) -> Arc<GaloisField> {
        Arc::new(GaloisField::prime(p).unwrap())
    }

    fn rf(f: &Arc<GaloisField>, c: &[i64]) -> RatFunc {
        RatFunc::from_poly(Poly::from_ints(f.clone(), c))
    }

    /// x ↦ t(x − 1) + 1 = t·x + (1 − t)
    fn phi1(f: &Arc<GaloisField>) -> AffineMap {
        AffineMap::new(vec![vec![rf(f, &[0, 1])]], vec![rf(f, &[1, -1])]).unwrap()
    }

    #[test]
    fn iterate_examples() {
        let f = fld(2);
        let a = vec![rf(&f, &[0])];
        assert_eq!(
            affine_iterate(&phi1(&f), &a, 3, 4096).unwrap(),
            vec![rf(&f, &[1, 0, 0, 1])]
        );
        assert_eq!(affine_iterate(&phi1(&f), &a, 0, 4096).unwrap(), a);
        assert!(matches!(
            affine_iterate(&phi1(&f), &a, 5000, 4096),
            Err(AffineError::Field(FieldError::DegreeOverflow { .. }))
        ));
    }

    #[test]
    fn frobenius_shortcut_matches_powering() {
        let f = fld(2);
        let a = vec![rf(&f, &[0])];
        let (v, used) = affine_iterate_frobenius(&phi1(&f), &a, 128, 4096).unwrap();
        assert!(used);
        assert_eq!(v, affine_iterate(&phi1(&f), &a, 128, 4096).unwrap());
        let phi2 = AffineMap::new(vec![vec![rf(&f, &[1, 1])]], vec![rf(&f, &[0])]).unwrap();
        let one = vec![rf(&f, &[1])];
        let (w, used) = affine_iterate_frobenius(&phi2, &one, 128, 4096).unwrap();
        assert!(used);
        assert_eq!(v, w);
        // over F_3 the map t·x is not Frobenius-compatible at x = 2 once shifted
        let f3 = fld(3);
        let phi = AffineMap::new(vec![vec![rf(&f3, &[0, 1])]], vec![rf(&f3, &[1, -1])]).unwrap();
        let (_, used) = affine_iterate_frobenius(&phi, &[rf(&f3, &[0, 1])], 9, 4096).unwrap();
        assert!(!used);
    }

    #[test]
    fn fixed_point_examples() {
        let f = fld(3);
        assert_eq!(fixed_point(&phi1(&f)).unwrap(), vec![rf(&f, &[1])]);
        let dbl = AffineMap::new(vec![vec![rf(&f, &[2])]], vec![rf(&f, &[0])]).unwrap();
        assert_eq!(fixed_point(&dbl).unwrap(), vec![rf(&f, &[0])]);
        let shift = AffineMap::new(vec![vec![rf(&f, &[1])]], vec![rf(&f, &[1])]).unwrap();
        assert_eq!(fixed_point(&shift), Err(AffineError::SingularShift));
    }

    #[test]
    fn diagonal_example_reduction() {
        let f = fld(3);
        let phi2 = AffineMap::new(vec![vec![rf(&f, &[1, 1])]], vec![rf(&f, &[0])]).unwrap();
        let r = conjugate_pair(&phi1(&f), &phi2, &[rf(&f, &[2])], &[rf(&f, &[1])]).unwrap();
        assert_eq!(r.fixed1, vec![rf(&f, &[1])]);
        assert_eq!(r.fixed2, vec![rf(&f, &[0])]);
        assert_eq!(
            (r.b1.clone(), r.b2.clone(), r.b3.clone()),
            (vec![rf(&f, &[1])], vec![rf(&f, &[1])], vec![rf(&f, &[2])])
        );
        for n in 0..=6u64 {
            for m in 0..=6u64 {
                let direct = affine_iterate(&phi1(&f), &[rf(&f, &[2])], n, 4096).unwrap()
                    == affine_iterate(&phi2, &[rf(&f, &[1])], m, 4096).unwrap();
                assert_eq!(direct, r.holds(n as i64, m as i64, 4096).unwrap());
            }
        }
        let same = conjugate_pair(&phi2, &phi2, &[rf(&f, &[0, 1])], &[rf(&f, &[0, 1])]).unwrap();
        assert_eq!(same.b1, same.b2);
        assert!(same.b3.iter().all(|x| x.is_zero()));
    }

    #[test]
    fn preperiodicity_examples() {
        let f = fld(3);
        let dbl = AffineMap::new(vec![vec![rf(&f, &[2])]], vec![rf(&f, &[0])]).unwrap();
        assert_eq!(
            detect_preperiodicity(&dbl, &[rf(&f, &[1])], 100, 4096).unwrap(),
            Preperiodicity::Periodic {
                preperiod: 0,
                period: 2
            }
        );
        assert_eq!(
            detect_preperiodicity(&phi1(&f), &[rf(&f, &[2])], 100, 4096).unwrap(),
            Preperiodicity::NoRepetitionWithin {
                budget: 100,
                degree_overflow: false
            }
        );
        assert_eq!(
            detect_preperiodicity(&phi1(&f), &[rf(&f, &[1])], 100, 4096).unwrap(),
            Preperiodicity::Periodic {
                preperiod: 0,
                period: 1
            }
        );
        assert_eq!(
            detect_preperiodicity(&phi1(&f), &[rf(&f, &[2])], 100, 20).unwrap(),
            Preperiodicity::NoRepetitionWithin {
                budget: 100,
                degree_overflow: true
            }
        );
        // preperiod: x ↦ 2x + 1 over F_3 from 0: 0, 1, 0 ... purely periodic;
        // a map with a tail needs a singular A, so Periodic{0, _} is the norm
        let m = AffineMap::new(vec![vec![rf(&f, &[2])]], vec![rf(&f, &[1])]).unwrap();
        assert_eq!(
            detect_preperiodicity(&m, &[rf(&f, &[0])], 100, 4096).unwrap(),
            Preperiodicity::Periodic {
                preperiod: 0,
                period: 2
            }
        );
    }
}
