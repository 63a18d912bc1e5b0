//! Root-polynomial representation U_n = Σ P_i(n)·α_i^n for rational roots.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use super::recurrence::{q, LinearRecurrence, Q};
use super::LrsError;
use crate::wire::{ser_rat, ser_rats};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RootTerm {
    #[serde(serialize_with = "ser_rat")]
    pub alpha: Q,
    /// Coefficients of P(n), lowest degree first, degree = multiplicity − 1.
    #[serde(serialize_with = "ser_rats")]
    pub poly: Vec<Q>,
}

impl RootTerm {
    pub fn poly_at(&self, n: &Q) -> Q {
        self.poly.iter().rev().fold(Q::zero(), |acc, c| acc * n + c)
    }

    pub fn is_unit_root(&self) -> bool {
        self.alpha.abs().is_one()
    }

    /// The polynomial has no nonzero coefficient beyond degree 0.
    pub fn poly_is_constant(&self) -> bool {
        self.poly.iter().skip(1).all(|c| c.is_zero())
    }
}

/// Σ P_i(n)·α_i^n, valid for n ≥ `start` (the recurrence's preamble length).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RootRep {
    pub terms: Vec<RootTerm>,
    pub start: usize,
}

impl RootRep {
    pub fn eval(&self, n: u64) -> Q {
        let nq = Q::from_integer(BigInt::from(n));
        self.terms
            .iter()
            .map(|t| t.poly_at(&nq) * pow_q(&t.alpha, n))
            .sum()
    }

    /// Roots with |α| ≠ 1 and nonzero polynomial, in the stored order.
    pub fn nonunit(&self) -> Vec<&RootTerm> {
        self.terms
            .iter()
            .filter(|t| !t.is_unit_root() && t.poly.iter().any(|c| !c.is_zero()))
            .collect()
    }

    /// The root-of-unity part (α = ±1) as a sequence is a constant: no −1
    /// contribution and a constant polynomial at 1.
    pub fn unit_part_constant(&self) -> bool {
        self.terms.iter().filter(|t| t.is_unit_root()).all(|t| {
            if t.alpha.is_one() {
                t.poly_is_constant()
            } else {
                t.poly.iter().all(|c| c.is_zero())
            }
        })
    }
}

pub fn pow_q(a: &Q, n: u64) -> Q {
    num_traits::pow::pow(a.clone(), n as usize)
}

fn divisors(n: &BigInt) -> Result<Vec<BigInt>, LrsError> {
    let n = n.abs();
    let v = n.to_u64().ok_or(LrsError::TooLarge)?;
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1u64;
    while d.saturating_mul(d) <= v {
        if v % d == 0 {
            small.push(BigInt::from(d));
            if d != v / d {
                large.push(BigInt::from(v / d));
            }
        }
        d += 1;
        if d > 50_000_000 {
            return Err(LrsError::TooLarge);
        }
    }
    small.extend(large.into_iter().rev());
    Ok(small)
}

fn eval_poly(c: &[Q], x: &Q) -> Q {
    c.iter().rev().fold(Q::zero(), |acc, a| acc * x + a)
}

fn deflate(c: &[Q], r: &Q) -> Vec<Q> {
    let n = c.len();
    let mut out = vec![Q::zero(); n - 1];
    let mut carry = c[n - 1].clone();
    for i in (0..n - 1).rev() {
        out[i] = carry.clone();
        carry = &c[i] + &carry * r;
    }
    out
}

/// Distinct rational roots of a polynomial over Q with multiplicities,
/// ascending by value.
pub fn rational_roots_q(poly: &[Q]) -> Result<Vec<(Q, usize)>, LrsError> {
    let mut c = poly.to_vec();
    while c.len() > 1 && c.last().is_some_and(|x| x.is_zero()) {
        c.pop();
    }
    if c.iter().all(|x| x.is_zero()) {
        return Err(LrsError::Shape("zero polynomial".into()));
    }
    let mut out = Vec::new();
    let mut zero_mult = 0;
    while c.len() > 1 && c[0].is_zero() {
        c.remove(0);
        zero_mult += 1;
    }
    if zero_mult > 0 {
        out.push((Q::zero(), zero_mult));
    }
    if c.len() == 1 {
        return Ok(out);
    }
    let l = c.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let ints: Vec<BigInt> = c
        .iter()
        .map(|x| (x * Q::from_integer(l.clone())).to_integer())
        .collect();
    let num_divs = divisors(&ints[0])?;
    let den_divs = divisors(ints.last().unwrap())?;
    let mut cands: Vec<Q> = Vec::new();
    for a in &num_divs {
        for b in &den_divs {
            if a.gcd(b).is_one() {
                cands.push(BigRational::new(a.clone(), b.clone()));
                cands.push(BigRational::new(-a, b.clone()));
            }
        }
    }
    cands.sort();
    for r in cands {
        let mut m = 0;
        while c.len() > 1 && eval_poly(&c, &r).is_zero() {
            c = deflate(&c, &r);
            m += 1;
        }
        if m > 0 {
            out.push((r, m));
        }
    }
    out.sort();
    Ok(out)
}

fn solve_q(mut a: Vec<Vec<Q>>, mut b: Vec<Q>) -> Option<Vec<Q>> {
    let n = b.len();
    for col in 0..n {
        let p = (col..n).find(|&i| !a[i][col].is_zero())?;
        a.swap(col, p);
        b.swap(col, p);
        let inv = a[col][col].recip();
        for j in col..n {
            a[col][j] = &a[col][j] * &inv;
        }
        b[col] = &b[col] * &inv;
        for i in 0..n {
            if i != col && !a[i][col].is_zero() {
                let f = a[i][col].clone();
                for j in col..n {
                    let d = &f * &a[col][j];
                    a[i][j] -= d;
                }
                let d = &f * &b[col];
                b[i] -= d;
            }
        }
    }
    Some(b)
}

/// Representation with rational roots, interpolated on k terms from the end
/// of the preamble and verified on 2k more.
pub fn root_representation(l: &LinearRecurrence) -> Result<RootRep, LrsError> {
    let k = l.order();
    let start = l.preamble.len();
    if k == 0 {
        return Ok(RootRep {
            terms: Vec::new(),
            start,
        });
    }
    let roots = rational_roots_q(&l.charpoly())?;
    if roots.iter().map(|r| r.1).sum::<usize>() < k {
        return Err(LrsError::IrrationalRoots);
    }
    let terms = l.terms(start + 3 * k);
    let mut rows = Vec::with_capacity(k);
    for n in start..start + k {
        let nq = q(n as i64);
        let mut row = Vec::with_capacity(k);
        for (alpha, m) in &roots {
            let an = pow_q(alpha, n as u64);
            let mut np = Q::one();
            for _ in 0..*m {
                row.push(&np * &an);
                np = &np * &nq;
            }
        }
        rows.push(row);
    }
    let sol = solve_q(rows, terms[start..start + k].to_vec()).ok_or(LrsError::IrrationalRoots)?;
    let mut out = Vec::new();
    let mut idx = 0;
    for (alpha, m) in roots {
        out.push(RootTerm {
            alpha,
            poly: sol[idx..idx + m].to_vec(),
        });
        idx += m;
    }
    let rep = RootRep { terms: out, start };
    for n in start..start + 3 * k {
        if rep.eval(n as u64) != terms[n] {
            return Err(LrsError::Shape(
                "root representation failed verification".into(),
            ));
        }
    }
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn double_root() {
        // U_n = (1 + 3n) 2^n
        let terms: Vec<Q> = (0..8).map(|n| q((1 + 3 * n) * (1 << n))).collect();
        let l = LinearRecurrence::fit_minimal(&terms).unwrap();
        let rep = root_representation(&l).unwrap();
        assert_eq!(
            rep.terms,
            vec![RootTerm {
                alpha: q(2),
                poly: vec![q(1), q(3)]
            }]
        );
        for n in 0..6 {
            assert_eq!(rep.eval(n), terms[n as usize]);
        }
    }

    #[test]
    fn simple_and_irrational() {
        let l = LinearRecurrence::from_ints(&[3], &[1]).unwrap();
        let rep = root_representation(&l).unwrap();
        assert_eq!(
            rep.terms,
            vec![RootTerm {
                alpha: q(3),
                poly: vec![q(1)]
            }]
        );
        let fib = LinearRecurrence::from_ints(&[1, 1], &[0, 1]).unwrap();
        assert_eq!(root_representation(&fib), Err(LrsError::IrrationalRoots));
    }

    #[test]
    fn fractional_roots() {
        // 2x^2 - 3x + 1 = (2x - 1)(x - 1)
        let r = rational_roots_q(&[q(1), q(-3), q(2)]).unwrap();
        assert_eq!(r, vec![(Q::new(1.into(), 2.into()), 1), (q(1), 1)]);
    }
}
