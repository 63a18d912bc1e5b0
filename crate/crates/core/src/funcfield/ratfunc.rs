//! Elements of F_{q^k}(t) in canonical reduced form.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use super::gf::{Elem, GaloisField};
use super::poly::Poly;
use super::FieldError;

/// A rational function num/den with den monic and gcd(num, den) = 1, so equal
/// values have identical representations. Zero is 0/1.
#[derive(Clone, PartialEq, Eq)]
pub struct RatFunc {
    num: Poly,
    den: Poly,
}

impl Hash for RatFunc {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.num.hash(state);
        self.den.hash(state);
    }
}

impl Ord for RatFunc {
    fn cmp(&self, other: &Self) -> Ordering {
        self.den
            .cmp(&other.den)
            .then_with(|| self.num.cmp(&other.num))
    }
}

impl PartialOrd for RatFunc {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RatFunc({})", self)
    }
}

fn is_primary(text: &str) -> bool {
    text == "t" || text.chars().all(|c| c.is_ascii_digit()) || text == "w"
}

fn wrap(p: &Poly) -> String {
    let s = p.to_string();
    if is_primary(&s) {
        s
    } else {
        format!("({})", s)
    }
}

/// Canonical text: the numerator alone when the denominator is 1, otherwise
/// `num / den` with either side parenthesized unless it is a bare residue or
/// `t`. The output parses back to the same value.
impl fmt::Display for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{} / {}", wrap(&self.num), wrap(&self.den))
        }
    }
}

impl RatFunc {
    pub fn new(num: Poly, den: Poly) -> Result<Self, FieldError> {
        if den.is_zero() {
            return Err(FieldError::DivisionByZero);
        }
        Ok(Self::normalize(num, den))
    }

    fn normalize(num: Poly, den: Poly) -> Self {
        let field = num.field().clone();
        if num.is_zero() {
            return RatFunc {
                num,
                den: Poly::one(field),
            };
        }
        let g = num.gcd(&den);
        let (mut num, mut den) = if g.is_one() {
            (num, den)
        } else {
            (num.div_rem(&g).0, den.div_rem(&g).0)
        };
        if !den.is_monic() {
            let inv = field.inv(den.leading()).unwrap();
            num = num.scale(inv);
            den = den.scale(inv);
        }
        RatFunc { num, den }
    }

    pub fn from_poly(p: Poly) -> Self {
        let field = p.field().clone();
        RatFunc {
            num: p,
            den: Poly::one(field),
        }
    }

    pub fn zero(field: Arc<GaloisField>) -> Self {
        RatFunc {
            num: Poly::zero(field.clone()),
            den: Poly::one(field),
        }
    }

    pub fn one(field: Arc<GaloisField>) -> Self {
        RatFunc {
            num: Poly::one(field.clone()),
            den: Poly::one(field),
        }
    }

    pub fn constant(field: Arc<GaloisField>, c: Elem) -> Self {
        RatFunc {
            num: Poly::constant(field.clone(), c),
            den: Poly::one(field),
        }
    }

    pub fn from_int(field: Arc<GaloisField>, v: i64) -> Self {
        let c = field.from_int(v);
        Self::constant(field, c)
    }

    pub fn t(field: Arc<GaloisField>) -> Self {
        Self::from_poly(Poly::t(field))
    }

    pub fn field(&self) -> &Arc<GaloisField> {
        self.num.field()
    }

    pub fn num(&self) -> &Poly {
        &self.num
    }

    pub fn den(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    /// The value as a constant-field element, when it is constant.
    pub fn as_constant(&self) -> Option<Elem> {
        (self.den.is_one() && self.num.is_constant()).then(|| self.num.coeff(0))
    }

    /// max(deg num, deg den), the size measure bounded by the degree cap.
    pub fn degree(&self) -> usize {
        self.num.deg0().max(self.den.deg0())
    }

    pub fn check_degree(&self, cap: usize) -> Result<(), FieldError> {
        let d = self.degree();
        if d > cap {
            Err(FieldError::DegreeOverflow { degree: d, cap })
        } else {
            Ok(())
        }
    }

    pub fn inv(&self) -> Result<RatFunc, FieldError> {
        if self.is_zero() {
            return Err(FieldError::DivisionByZero);
        }
        Ok(Self::normalize(self.den.clone(), self.num.clone()))
    }

    pub fn div(&self, other: &RatFunc) -> Result<RatFunc, FieldError> {
        Ok(self * &other.inv()?)
    }

    /// Integer power; negative exponents invert.
    pub fn pow(&self, n: i64) -> Result<RatFunc, FieldError> {
        if n < 0 {
            return self.inv()?.pow(-n);
        }
        let n = n as u64;
        // coprime parts stay coprime, and a monic den stays monic
        Ok(RatFunc {
            num: self.num.pow(n),
            den: self.den.pow(n),
        })
    }

    /// Power with the degree cap checked before the work is done.
    pub fn checked_pow(&self, n: i64, cap: usize) -> Result<RatFunc, FieldError> {
        let predicted = (self.degree() as u128) * (n.unsigned_abs() as u128);
        if predicted > cap as u128 {
            return Err(FieldError::DegreeOverflow {
                degree: predicted.min(usize::MAX as u128) as usize,
                cap,
            });
        }
        self.pow(n)
    }

    /// x^{p^m} by m applications of the Frobenius to numerator and denominator.
    pub fn frobenius_power(&self, m: u32) -> RatFunc {
        let mut num = self.num.clone();
        let mut den = self.den.clone();
        for _ in 0..m {
            num = num.frobenius();
            den = den.frobenius();
        }
        RatFunc { num, den }
    }

    /// Checked multiplication against the degree cap.
    pub fn checked_mul(&self, other: &RatFunc, cap: usize) -> Result<RatFunc, FieldError> {
        let r = self * other;
        r.check_degree(cap)?;
        Ok(r)
    }

    pub fn checked_add(&self, other: &RatFunc, cap: usize) -> Result<RatFunc, FieldError> {
        let r = self + other;
        r.check_degree(cap)?;
        Ok(r)
    }
}

impl<'a> Add<&'a RatFunc> for &'a RatFunc {
    type Output = RatFunc;
    fn add(self, rhs: &'a RatFunc) -> RatFunc {
        if self.is_zero() {
            return rhs.clone();
        }
        if rhs.is_zero() {
            return self.clone();
        }
        if self.den == rhs.den {
            return RatFunc::normalize(&self.num + &rhs.num, self.den.clone());
        }
        let g = self.den.gcd(&rhs.den);
        let b1 = self.den.div_rem(&g).0;
        let d1 = rhs.den.div_rem(&g).0;
        let num = &(&self.num * &d1) + &(&rhs.num * &b1);
        let den = &(&b1 * &d1) * &g;
        RatFunc::normalize(num, den)
    }
}

impl<'a> Sub<&'a RatFunc> for &'a RatFunc {
    type Output = RatFunc;
    fn sub(self, rhs: &'a RatFunc) -> RatFunc {
        self + &(-rhs)
    }
}

impl Neg for &RatFunc {
    type Output = RatFunc;
    fn neg(self) -> RatFunc {
        RatFunc {
            num: -&self.num,
            den: self.den.clone(),
        }
    }
}

impl<'a> Mul<&'a RatFunc> for &'a RatFunc {
    type Output = RatFunc;
    fn mul(self, rhs: &'a RatFunc) -> RatFunc {
        if self.is_zero() || rhs.is_zero() {
            return RatFunc::zero(self.field().clone());
        }
        // cross-cancel first to keep the products small
        let g1 = self.num.gcd(&rhs.den);
        let g2 = rhs.num.gcd(&self.den);
        let (a, d) = (self.num.div_rem(&g1).0, rhs.den.div_rem(&g1).0);
        let (c, b) = (rhs.num.div_rem(&g2).0, self.den.div_rem(&g2).0);
        let num = &a * &c;
        let den = &b * &d;
        let field = num.field().clone();
        let inv = field.inv(den.leading()).unwrap();
        RatFunc {
            num: num.scale(inv),
            den: den.scale(inv),
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<RatFunc> for RatFunc {
            type Output = RatFunc;
            fn $m(self, rhs: RatFunc) -> RatFunc {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
