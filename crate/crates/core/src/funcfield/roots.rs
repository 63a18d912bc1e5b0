//! Roots in F_{q^k}(t) of polynomials in x with F_{q^k}(t) coefficients.
//!
//! Coefficients are cleared to F_{q^k}[t]; every root is c·u/v with u a monic
//! divisor of the trailing and v of the leading coefficient. For a fixed pair
//! (u, v) the admissible units c are the common roots in F_{q^k} of the
//! t-coefficients of v^n·g(c·u/v), found by factoring their gcd.

use std::collections::BTreeSet;

use super::factor::{monic_divisors, poly_factor};
use super::poly::Poly;
use super::ratfunc::RatFunc;
use super::FieldError;

/// Evaluate Σ coeffs[i] x^i at x.
pub fn eval_xpoly(coeffs: &[RatFunc], x: &RatFunc) -> RatFunc {
    let field = x.field().clone();
    coeffs
        .iter()
        .rev()
        .fold(RatFunc::zero(field), |acc, c| &(&acc * x) + c)
}

/// Quotient of Σ coeffs[i] x^i by (x − r), assuming r is a root.
pub fn deflate(coeffs: &[RatFunc], r: &RatFunc) -> Vec<RatFunc> {
    let n = coeffs.len();
    if n <= 1 {
        return Vec::new();
    }
    let mut out = vec![RatFunc::zero(r.field().clone()); n - 1];
    let mut carry = coeffs[n - 1].clone();
    for i in (0..n - 1).rev() {
        out[i] = carry.clone();
        carry = &coeffs[i] + &(&carry * r);
    }
    out
}

fn trim(coeffs: &[RatFunc]) -> Vec<RatFunc> {
    let mut v = coeffs.to_vec();
    while v.last().is_some_and(|c| c.is_zero()) {
        v.pop();
    }
    v
}

/// Clear denominators: multiply by the lcm of all denominators.
fn to_poly_coeffs(coeffs: &[RatFunc]) -> Vec<Poly> {
    let field = coeffs[0].field().clone();
    let mut l = Poly::one(field);
    for c in coeffs {
        let g = l.gcd(c.den());
        l = &l * &c.den().div_rem(&g).0;
    }
    coeffs
        .iter()
        .map(|c| &c.num().clone() * &l.div_rem(c.den()).0)
        .collect()
}

/// All distinct roots in F_{q^k}(t), in canonical order.
pub fn rational_roots(coeffs: &[RatFunc]) -> Result<Vec<RatFunc>, FieldError> {
    let coeffs = trim(coeffs);
    if coeffs.is_empty() {
        return Err(FieldError::ZeroPolynomial);
    }
    let field = coeffs[0].field().clone();
    let mut roots = BTreeSet::new();
    let mut g = to_poly_coeffs(&coeffs);
    if g[0].is_zero() {
        roots.insert(RatFunc::zero(field.clone()));
        let shift = g.iter().take_while(|c| c.is_zero()).count();
        g.drain(..shift);
    }
    let n = g.len() - 1;
    if n == 0 {
        return Ok(roots.into_iter().collect());
    }
    let us = monic_divisors(&g[0])?;
    let vs = monic_divisors(&g[n])?;
    for u in &us {
        for v in &vs {
            if !u.gcd(v).is_one() {
                continue;
            }
            // H_i = g_i u^i v^{n-i}; the candidate unit c is a root of
            // Σ_i [H_i]_j c^i for every t-degree j
            let mut u_pow = vec![Poly::one(field.clone())];
            let mut v_pow = vec![Poly::one(field.clone())];
            for _ in 0..n {
                u_pow.push(&u_pow[u_pow.len() - 1] * u);
                v_pow.push(&v_pow[v_pow.len() - 1] * v);
            }
            let h: Vec<Poly> = (0..=n)
                .map(|i| &(&g[i] * &u_pow[i]) * &v_pow[n - i])
                .collect();
            let top = h.iter().map(|p| p.deg0()).max().unwrap_or(0);
            let mut common: Option<Poly> = None;
            for j in 0..=top {
                let in_c = Poly::new(field.clone(), h.iter().map(|p| p.coeff(j)).collect());
                if in_c.is_zero() {
                    continue;
                }
                common = Some(match common {
                    None => in_c.monic(),
                    Some(acc) => acc.gcd(&in_c),
                });
                if common.as_ref().is_some_and(|c| c.deg0() == 0) {
                    break;
                }
            }
            let Some(common) = common else { continue };
            if common.deg0() == 0 {
                continue;
            }
            for (fac, _) in poly_factor(&common)?.factors {
                if fac.deg0() != 1 {
                    continue;
                }
                let c = field.neg(fac.coeff(0));
                if c == 0 {
                    continue;
                }
                let r = RatFunc::new(u.scale(c), v.clone())?;
                if eval_xpoly(&coeffs, &r).is_zero() {
                    roots.insert(r);
                }
            }
        }
    }
    Ok(roots.into_iter().collect())
}

/// Distinct roots with their multiplicities, in canonical order.
pub fn root_multiplicities(coeffs: &[RatFunc]) -> Result<Vec<(RatFunc, usize)>, FieldError> {
    let coeffs = trim(coeffs);
    let roots = rational_roots(&coeffs)?;
    let mut out = Vec::with_capacity(roots.len());
    for r in roots {
        let mut cur = coeffs.clone();
        let mut m = 0;
        while cur.len() > 1 && eval_xpoly(&cur, &r).is_zero() {
            cur = deflate(&cur, &r);
            m += 1;
        }
        out.push((r, m));
    }
    Ok(out)
}
