//! Dense univariate polynomials in t over the constant field.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use super::gf::{Elem, GaloisField};

/// A polynomial in t, coefficients lowest degree first, with no trailing zeros.
#[derive(Clone)]
pub struct Poly {
    field: Arc<GaloisField>,
    coeffs: Vec<Elem>,
}

impl PartialEq for Poly {
    fn eq(&self, other: &Self) -> bool {
        debug_assert!(Arc::ptr_eq(&self.field, &other.field) || self.field == other.field);
        self.coeffs == other.coeffs
    }
}

impl Eq for Poly {}

impl Hash for Poly {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.coeffs.hash(state);
    }
}

/// Canonical ordering: by degree, then coefficients from the top down.
impl Ord for Poly {
    fn cmp(&self, other: &Self) -> Ordering {
        self.coeffs
            .len()
            .cmp(&other.coeffs.len())
            .then_with(|| self.coeffs.iter().rev().cmp(other.coeffs.iter().rev()))
    }
}

impl PartialOrd for Poly {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly({})", self)
    }
}

/// `c_d*t^d + ... + c_0`, zero terms omitted, unit coefficients and exponents
/// elided.
impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, &c) in self.coeffs.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let cs = self.field.elem_to_string(c);
            match (i, c) {
                (0, _) => write!(f, "{}", cs)?,
                (1, 1) => write!(f, "t")?,
                (1, _) => write!(f, "{}*t", cs)?,
                (_, 1) => write!(f, "t^{}", i)?,
                _ => write!(f, "{}*t^{}", cs, i)?,
            }
        }
        Ok(())
    }
}

impl Poly {
    pub fn new(field: Arc<GaloisField>, mut coeffs: Vec<Elem>) -> Self {
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        Poly { field, coeffs }
    }

    pub fn zero(field: Arc<GaloisField>) -> Self {
        Poly {
            field,
            coeffs: Vec::new(),
        }
    }

    pub fn one(field: Arc<GaloisField>) -> Self {
        Poly {
            field,
            coeffs: vec![1],
        }
    }

    pub fn constant(field: Arc<GaloisField>, c: Elem) -> Self {
        Poly::new(field, vec![c])
    }

    /// The variable t.
    pub fn t(field: Arc<GaloisField>) -> Self {
        Poly {
            field,
            coeffs: vec![0, 1],
        }
    }

    /// c·t^d
    pub fn monomial(field: Arc<GaloisField>, c: Elem, d: usize) -> Self {
        let mut coeffs = vec![0; d + 1];
        coeffs[d] = c;
        Poly::new(field, coeffs)
    }

    /// Build from integer coefficients (lowest first), reducing each mod p.
    pub fn from_ints(field: Arc<GaloisField>, ints: &[i64]) -> Self {
        let coeffs = ints.iter().map(|&v| field.from_int(v)).collect();
        Poly::new(field, coeffs)
    }

    pub fn field(&self) -> &Arc<GaloisField> {
        &self.field
    }

    pub fn coeffs(&self) -> &[Elem] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> Elem {
        self.coeffs.get(i).copied().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs == [1]
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    /// Degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Degree with the zero polynomial mapped to 0.
    pub fn deg0(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn leading(&self) -> Elem {
        self.coeffs.last().copied().unwrap_or(0)
    }

    pub fn is_monic(&self) -> bool {
        self.leading() == 1
    }

    pub fn scale(&self, c: Elem) -> Poly {
        let f = &self.field;
        Poly::new(
            self.field.clone(),
            self.coeffs.iter().map(|&x| f.mul(x, c)).collect(),
        )
    }

    /// Monic associate; zero stays zero.
    pub fn monic(&self) -> Poly {
        if self.is_zero() || self.is_monic() {
            return self.clone();
        }
        let inv = self
            .field
            .inv(self.leading())
            .expect("nonzero leading coefficient");
        self.scale(inv)
    }

    /// Multiply by t^k.
    pub fn shift(&self, k: usize) -> Poly {
        if self.is_zero() {
            return self.clone();
        }
        let mut coeffs = vec![0; k];
        coeffs.extend_from_slice(&self.coeffs);
        Poly {
            field: self.field.clone(),
            coeffs,
        }
    }

    pub fn derivative(&self) -> Poly {
        let f = &self.field;
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, &c)| f.mul(c, f.from_int((i as u64 % f.characteristic()) as i64)))
            .collect();
        Poly::new(self.field.clone(), coeffs)
    }

    pub fn eval(&self, x: Elem) -> Elem {
        let f = &self.field;
        self.coeffs
            .iter()
            .rev()
            .fold(0, |acc, &c| f.add(f.mul(acc, x), c))
    }

    /// Quotient and remainder; panics on division by zero.
    pub fn div_rem(&self, divisor: &Poly) -> (Poly, Poly) {
        assert!(!divisor.is_zero(), "polynomial division by zero");
        let f = &self.field;
        if self.coeffs.len() < divisor.coeffs.len() {
            return (Poly::zero(self.field.clone()), self.clone());
        }
        let dd = divisor.coeffs.len() - 1;
        let lead_inv = f.inv(divisor.leading()).unwrap();
        let mut rem = self.coeffs.clone();
        let mut quot = vec![0; rem.len() - dd];
        for i in (0..quot.len()).rev() {
            let c = rem[i + dd];
            if c == 0 {
                continue;
            }
            let qc = f.mul(c, lead_inv);
            quot[i] = qc;
            for (j, &dj) in divisor.coeffs.iter().enumerate() {
                if dj != 0 {
                    rem[i + j] = f.sub(rem[i + j], f.mul(qc, dj));
                }
            }
        }
        rem.truncate(dd);
        (
            Poly::new(self.field.clone(), quot),
            Poly::new(self.field.clone(), rem),
        )
    }

    pub fn rem(&self, divisor: &Poly) -> Poly {
        self.div_rem(divisor).1
    }

    /// Exact quotient, or `None` when the division leaves a remainder.
    pub fn div_exact(&self, divisor: &Poly) -> Option<Poly> {
        let (q, r) = self.div_rem(divisor);
        r.is_zero().then_some(q)
    }

    /// Monic gcd (zero if both are zero).
    pub fn gcd(&self, other: &Poly) -> Poly {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    /// Extended gcd: (g, s, u) with s·self + u·other = g, g monic.
    pub fn xgcd(&self, other: &Poly) -> (Poly, Poly, Poly) {
        let fld = self.field.clone();
        let (mut r0, mut r1) = (self.clone(), other.clone());
        let (mut s0, mut s1) = (Poly::one(fld.clone()), Poly::zero(fld.clone()));
        let (mut u0, mut u1) = (Poly::zero(fld.clone()), Poly::one(fld.clone()));
        while !r1.is_zero() {
            let (q, r) = r0.div_rem(&r1);
            let s2 = &s0 - &(&q * &s1);
            let u2 = &u0 - &(&q * &u1);
            r0 = r1;
            r1 = r;
            s0 = s1;
            s1 = s2;
            u0 = u1;
            u1 = u2;
        }
        if r0.is_zero() {
            return (r0, s0, u0);
        }
        let inv = fld.inv(r0.leading()).unwrap();
        (r0.scale(inv), s0.scale(inv), u0.scale(inv))
    }

    pub fn pow(&self, mut exp: u64) -> Poly {
        let mut acc = Poly::one(self.field.clone());
        let mut base = self.clone();
        while exp > 0 {
            if exp & 1 == 1 {
                acc = &acc * &base;
            }
            exp >>= 1;
            if exp > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    pub fn mul_mod(&self, other: &Poly, modulus: &Poly) -> Poly {
        (self * other).rem(modulus)
    }

    /// self^exp mod modulus, exponent given as little-endian u64 limbs.
    pub fn pow_mod_limbs(&self, limbs: &[u64], modulus: &Poly) -> Poly {
        let mut acc = Poly::one(self.field.clone()).rem(modulus);
        let base = self.rem(modulus);
        for &limb in limbs.iter().rev() {
            for bit in (0..64).rev() {
                acc = acc.mul_mod(&acc, modulus);
                if (limb >> bit) & 1 == 1 {
                    acc = acc.mul_mod(&base, modulus);
                }
            }
        }
        acc
    }

    pub fn pow_mod(&self, exp: u64, modulus: &Poly) -> Poly {
        self.pow_mod_limbs(&[exp], modulus)
    }

    /// The p-th power: coefficients raised to the p-th power and t ↦ t^p.
    pub fn frobenius(&self) -> Poly {
        let f = &self.field;
        let p = f.characteristic() as usize;
        if self.is_zero() {
            return self.clone();
        }
        let mut coeffs = vec![0; (self.coeffs.len() - 1) * p + 1];
        for (i, &c) in self.coeffs.iter().enumerate() {
            coeffs[i * p] = f.frobenius(c);
        }
        Poly::new(self.field.clone(), coeffs)
    }

    /// Inverse of [`Self::frobenius`]; `None` unless every exponent is a
    /// multiple of p.
    pub fn pth_root(&self) -> Option<Poly> {
        let f = &self.field;
        let p = f.characteristic() as usize;
        let mut out = Vec::with_capacity(self.coeffs.len() / p + 1);
        for (i, &c) in self.coeffs.iter().enumerate() {
            if i % p == 0 {
                out.push(f.pth_root(c));
            } else if c != 0 {
                return None;
            }
        }
        Some(Poly::new(self.field.clone(), out))
    }

    /// Composition self(g).
    pub fn compose(&self, g: &Poly) -> Poly {
        let fld = self.field.clone();
        self.coeffs
            .iter()
            .rev()
            .fold(Poly::zero(fld.clone()), |acc, &c| {
                &(&acc * g) + &Poly::constant(fld.clone(), c)
            })
    }
}

impl<'a> Add<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn add(self, rhs: &'a Poly) -> Poly {
        let f = &self.field;
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let coeffs = (0..n).map(|i| f.add(self.coeff(i), rhs.coeff(i))).collect();
        Poly::new(self.field.clone(), coeffs)
    }
}

impl<'a> Sub<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn sub(self, rhs: &'a Poly) -> Poly {
        let f = &self.field;
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let coeffs = (0..n).map(|i| f.sub(self.coeff(i), rhs.coeff(i))).collect();
        Poly::new(self.field.clone(), coeffs)
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        let f = &self.field;
        Poly::new(
            self.field.clone(),
            self.coeffs.iter().map(|&c| f.neg(c)).collect(),
        )
    }
}

impl<'a> Mul<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn mul(self, rhs: &'a Poly) -> Poly {
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero(self.field.clone());
        }
        let f = &self.field;
        let mut out = vec![0; self.coeffs.len() + rhs.coeffs.len() - 1];
        if f.is_prime_field() && f.characteristic() < (1 << 31) {
            // accumulate in u64 and reduce lazily
            let p = f.characteristic();
            let limit = u64::MAX / ((p - 1) * (p - 1)).max(1);
            let mut acc = vec![0u64; out.len()];
            let mut pending = vec![0u64; out.len()];
            for (i, &a) in self.coeffs.iter().enumerate() {
                if a == 0 {
                    continue;
                }
                for (j, &b) in rhs.coeffs.iter().enumerate() {
                    if b == 0 {
                        continue;
                    }
                    let k = i + j;
                    acc[k] += a * b;
                    pending[k] += 1;
                    if pending[k] >= limit {
                        acc[k] %= p;
                        pending[k] = 0;
                    }
                }
            }
            for (o, a) in out.iter_mut().zip(acc) {
                *o = a % p;
            }
        } else {
            for (i, &a) in self.coeffs.iter().enumerate() {
                if a == 0 {
                    continue;
                }
                for (j, &b) in rhs.coeffs.iter().enumerate() {
                    if b != 0 {
                        out[i + j] = f.add(out[i + j], f.mul(a, b));
                    }
                }
            }
        }
        Poly::new(self.field.clone(), out)
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<Poly> for Poly {
            type Output = Poly;
            fn $m(self, rhs: Poly) -> Poly {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
