//! Degenerate, related, doubly related and exceptional pairs of recurrences
//! with rational roots.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use super::recurrence::{LinearRecurrence, Q};
use super::roots::{pow_q, root_representation, RootRep, RootTerm};
use super::LrsError;
use crate::wire::ser_int;

pub const DEFAULT_RELATEDNESS_BOUND: u32 = 16;

/// Some α_i/α_j (i ≠ j, both with nonzero polynomial) is a root of unity; for
/// rational roots that is α_i = −α_j.
pub fn degenerate_check(rep: &RootRep) -> bool {
    let live: Vec<&RootTerm> = rep
        .terms
        .iter()
        .filter(|t| t.poly.iter().any(|c| !c.is_zero()))
        .collect();
    for (i, x) in live.iter().enumerate() {
        for y in &live[i + 1..] {
            if x.alpha == -y.alpha.clone() {
                return true;
            }
        }
    }
    false
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict")]
pub enum RelVerdict {
    NotRelated,
    /// α_i^a = β_{reordering[i]}^b for all i.
    Related {
        a: i64,
        b: i64,
        reordering: Vec<usize>,
    },
    /// Additionally α_i^{a'} = β_{σ(i+1)}^{b'} and α_{i+1}^{a'} = β_{σ(i)}^{b'}
    /// for odd i (1-based).
    DoublyRelated {
        a: i64,
        b: i64,
        a2: i64,
        b2: i64,
        reordering: Vec<usize>,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Relatedness {
    #[serde(flatten)]
    pub verdict: RelVerdict,
    pub search_bound: u32,
    /// Number of roots of modulus ≠ 1 on each side.
    pub t: (usize, usize),
}

impl Relatedness {
    pub fn is_related(&self) -> bool {
        !matches!(self.verdict, RelVerdict::NotRelated)
    }

    /// (a, b) with α_i^a = β_σ(i)^b when related.
    pub fn exponents(&self) -> Option<(i64, i64)> {
        match self.verdict {
            RelVerdict::NotRelated => None,
            RelVerdict::Related { a, b, .. } | RelVerdict::DoublyRelated { a, b, .. } => {
                Some((a, b))
            }
        }
    }
}

fn pow_signed(x: &Q, e: i64) -> Q {
    let p = pow_q(x, e.unsigned_abs());
    if e < 0 {
        p.recip()
    } else {
        p
    }
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for rest in permutations(n - 1) {
        for pos in 0..=rest.len() {
            let mut v = rest.clone();
            v.insert(pos, n - 1);
            out.push(v);
        }
    }
    out.sort();
    out
}

fn orderings(t: usize, beta: &[Q]) -> Vec<Vec<usize>> {
    if t <= 4 {
        permutations(t)
    } else {
        // positive exponents preserve the order of absolute values
        let mut idx: Vec<usize> = (0..t).collect();
        idx.sort_by(|&i, &j| beta[i].abs().cmp(&beta[j].abs()));
        vec![idx]
    }
}

fn exponent_candidates(bound: u32) -> Vec<(i64, i64)> {
    let b = bound as i64;
    let mut v: Vec<(i64, i64)> = (1..=b).flat_map(|a| (1..=b).map(move |c| (a, c))).collect();
    v.extend((1..=b).flat_map(|a| (1..=b).map(move |c| (a, -c))));
    v
}

/// Relatedness of two root representations, searching exponents 1 ≤ a, |b| ≤
/// bound (positive b first) and every reordering when t ≤ 4.
pub fn relatedness_reps(p: &RootRep, q: &RootRep, bound: u32) -> Relatedness {
    let alpha: Vec<Q> = p.nonunit().iter().map(|t| t.alpha.clone()).collect();
    let beta: Vec<Q> = q.nonunit().iter().map(|t| t.alpha.clone()).collect();
    let t = (alpha.len(), beta.len());
    let done = |verdict| Relatedness {
        verdict,
        search_bound: bound,
        t,
    };
    if alpha.len() != beta.len() || alpha.is_empty() {
        return done(RelVerdict::NotRelated);
    }
    let n = alpha.len();
    let cands = exponent_candidates(bound);
    let mut first: Option<RelVerdict> = None;
    for (a, b) in &cands {
        for sigma in orderings(n, &beta) {
            if !(0..n).all(|i| pow_signed(&alpha[i], *a) == pow_signed(&beta[sigma[i]], *b)) {
                continue;
            }
            if n.is_multiple_of(2) {
                for (a2, b2) in &cands {
                    let ok = (0..n).step_by(2).all(|i| {
                        pow_signed(&alpha[i], *a2) == pow_signed(&beta[sigma[i + 1]], *b2)
                            && pow_signed(&alpha[i + 1], *a2) == pow_signed(&beta[sigma[i]], *b2)
                    });
                    if ok {
                        return done(RelVerdict::DoublyRelated {
                            a: *a,
                            b: *b,
                            a2: *a2,
                            b2: *b2,
                            reordering: sigma,
                        });
                    }
                }
            }
            if first.is_none() {
                first = Some(RelVerdict::Related {
                    a: *a,
                    b: *b,
                    reordering: sigma,
                });
            }
        }
    }
    done(first.unwrap_or(RelVerdict::NotRelated))
}

pub fn relatedness(
    p: &LinearRecurrence,
    q: &LinearRecurrence,
    bound: u32,
) -> Result<Relatedness, LrsError> {
    Ok(relatedness_reps(
        &root_representation(p)?,
        &root_representation(q)?,
        bound,
    ))
}

/// Largest e and integer r with n = r^e.
fn perfect_power(n: &BigInt) -> (BigInt, u32) {
    let bits = n.bits() as u32;
    for e in (2..=bits.max(2)).rev() {
        let r = n.nth_root(e);
        if r > BigInt::one() && num_traits::pow::pow(r.clone(), e as usize) == *n {
            let (rr, ee) = perfect_power(&r);
            return (rr, ee * e);
        }
    }
    (n.clone(), 1)
}

/// |α| = R^e with R > 1 not a perfect power; None for |α| = 1.
pub fn primitive_base(alpha: &Q) -> Option<(Q, i64)> {
    let x = alpha.abs();
    if x.is_one() || x.is_zero() {
        return None;
    }
    let (inv, x) = if x < Q::one() {
        (true, x.recip())
    } else {
        (false, x)
    };
    let (rn, en) = perfect_power(x.numer());
    let (rd, ed) = if x.denom().is_one() {
        (BigInt::one(), 0)
    } else {
        perfect_power(x.denom())
    };
    let e = if ed == 0 { en } else { en.gcd(&ed) };
    let base = BigRational::new(
        num_traits::pow::pow(rn, (en / e) as usize),
        if ed == 0 {
            BigInt::one()
        } else {
            num_traits::pow::pow(rd, (ed / e) as usize)
        },
    );
    Some((base, if inv { -(e as i64) } else { e as i64 }))
}

/// Which of the five exceptional-pair conditions hold for the ordered pair (P, Q).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ExceptionalReport {
    pub simply_related: bool,
    pub common_power: bool,
    #[serde(serialize_with = "ser_opt_int")]
    pub n: Option<BigInt>,
    pub same_side_of_one: bool,
    pub unit_parts_constant: bool,
    pub shifted_powers: bool,
    #[serde(serialize_with = "ser_opt_rat")]
    pub shift: Option<Q>,
    pub exceptional: bool,
}

fn ser_opt_int<S: serde::Serializer>(v: &Option<BigInt>, s: S) -> Result<S::Ok, S::Error> {
    match v {
        Some(x) => ser_int(x, s),
        None => s.serialize_none(),
    }
}

fn ser_opt_rat<S: serde::Serializer>(v: &Option<Q>, s: S) -> Result<S::Ok, S::Error> {
    match v {
        Some(x) => s.serialize_str(&crate::wire::rat_string(x)),
        None => s.serialize_none(),
    }
}

/// P_i(x) = a·(x − A)^l with l > 0: returns A.
fn shifted_power_shift(poly: &[Q]) -> Option<Q> {
    let mut c = poly.to_vec();
    while c.len() > 1 && c.last().is_some_and(|x| x.is_zero()) {
        c.pop();
    }
    let l = c.len() - 1;
    if l == 0 {
        return None;
    }
    let lead = c[l].clone();
    let shift = -(&c[l - 1]) / (&lead * Q::from_integer(BigInt::from(l)));
    // expand lead·(x − shift)^l
    let mut e = vec![lead];
    for _ in 0..l {
        let mut next = vec![Q::zero(); e.len() + 1];
        for (i, a) in e.iter().enumerate() {
            next[i + 1] += a;
            next[i] -= a * &shift;
        }
        e = next;
    }
    (e == c).then_some(shift)
}

pub fn exceptional_check(
    p: &RootRep,
    q: &RootRep,
    rel: &Relatedness,
) -> Result<ExceptionalReport, LrsError> {
    if !rel.is_related() {
        return Err(LrsError::NotRelatedInput);
    }
    let simply_related = matches!(rel.verdict, RelVerdict::Related { .. });
    let ps = p.nonunit();
    let qs = q.nonunit();
    // (b)
    let mut base: Option<Q> = None;
    let mut lcm = BigInt::one();
    let mut common_power = true;
    for t in ps.iter().chain(qs.iter()) {
        match primitive_base(&t.alpha) {
            Some((r, e)) if r.is_integer() && base.as_ref().is_none_or(|b| *b == r) => {
                base = Some(r);
                let need = BigInt::from(e.abs() * if t.alpha.is_negative() { 2 } else { 1 });
                lcm = lcm.lcm(&need);
            }
            _ => common_power = false,
        }
    }
    let n = if common_power {
        base.map(|b| num_traits::pow::pow(b.to_integer(), lcm.to_usize().unwrap_or(0)))
    } else {
        None
    };
    let common_power = n.is_some();
    // (c)
    let same_side_of_one =
        ps.iter().all(|t| t.alpha.abs() > Q::one()) || ps.iter().all(|t| t.alpha.abs() < Q::one());
    // (d)
    let unit_parts_constant = p.unit_part_constant() && q.unit_part_constant();
    // (e)
    let q_const = qs.iter().all(|t| t.poly_is_constant());
    let shifts: Vec<Option<Q>> = ps.iter().map(|t| shifted_power_shift(&t.poly)).collect();
    let shift = shifts.first().cloned().flatten();
    let shifted_powers =
        q_const && !shifts.is_empty() && shifts.iter().all(|s| s.is_some() && *s == shift);
    let exceptional =
        simply_related && common_power && same_side_of_one && unit_parts_constant && shifted_powers;
    Ok(ExceptionalReport {
        simply_related,
        common_power,
        n,
        same_side_of_one,
        unit_parts_constant,
        shifted_powers,
        shift: if shifted_powers { shift } else { None },
        exceptional,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lrs::recurrence::q;

    fn rep(terms: &[(i64, &[i64])]) -> RootRep {
        RootRep {
            terms: terms
                .iter()
                .map(|(a, p)| RootTerm {
                    alpha: q(*a),
                    poly: p.iter().map(|&c| q(c)).collect(),
                })
                .collect(),
            start: 0,
        }
    }

    #[test]
    fn degenerate_examples() {
        assert!(degenerate_check(&rep(&[(-2, &[1]), (2, &[1])])));
        assert!(!degenerate_check(&rep(&[(2, &[1]), (3, &[1])])));
        assert!(!degenerate_check(&rep(&[(2, &[1]), (4, &[1])])));
    }

    #[test]
    fn relatedness_examples() {
        let r = relatedness_reps(&rep(&[(2, &[1])]), &rep(&[(4, &[1])]), 16);
        assert_eq!(
            r.verdict,
            RelVerdict::Related {
                a: 2,
                b: 1,
                reordering: vec![0]
            }
        );
        let r = relatedness_reps(
            &rep(&[(2, &[1]), (3, &[1])]),
            &rep(&[(4, &[1]), (9, &[1])]),
            16,
        );
        assert_eq!(
            r.verdict,
            RelVerdict::Related {
                a: 2,
                b: 1,
                reordering: vec![0, 1]
            }
        );
        let r = relatedness_reps(&rep(&[(2, &[1])]), &rep(&[(3, &[1])]), 16);
        assert_eq!(r.verdict, RelVerdict::NotRelated);
        assert_eq!(r.search_bound, 16);
    }

    #[test]
    fn relatedness_symmetry() {
        let p = rep(&[(8, &[1]), (27, &[2])]);
        let qq = rep(&[(4, &[1]), (9, &[5])]);
        let r1 = relatedness_reps(&p, &qq, 16);
        let r2 = relatedness_reps(&qq, &p, 16);
        assert_eq!(r1.exponents(), Some((2, 3)));
        assert_eq!(r2.exponents(), Some((3, 2)));
    }

    #[test]
    fn exceptional_examples() {
        // n·2^n vs 4^m
        let p = rep(&[(2, &[0, 1])]);
        let qq = rep(&[(4, &[1])]);
        let rel = relatedness_reps(&p, &qq, 16);
        let r = exceptional_check(&p, &qq, &rel).unwrap();
        assert!(r.exceptional);
        assert_eq!(r.n, Some(BigInt::from(4)));
        assert_eq!(r.shift, Some(q(0)));

        // 2^n + n vs 3·2^m: P_0 = n is not constant
        let p = rep(&[(1, &[0, 1]), (2, &[1])]);
        let qq = rep(&[(2, &[3])]);
        let rel = relatedness_reps(&p, &qq, 16);
        let r = exceptional_check(&p, &qq, &rel).unwrap();
        assert!(!r.unit_parts_constant && !r.exceptional);

        // roots 2 and 1/2 on the P side
        let p = RootRep {
            terms: vec![
                RootTerm {
                    alpha: Q::new(1.into(), 2.into()),
                    poly: vec![q(0), q(1)],
                },
                RootTerm {
                    alpha: q(2),
                    poly: vec![q(0), q(1)],
                },
            ],
            start: 0,
        };
        let qq = RootRep {
            terms: vec![
                RootTerm {
                    alpha: Q::new(1.into(), 4.into()),
                    poly: vec![q(1)],
                },
                RootTerm {
                    alpha: q(4),
                    poly: vec![q(1)],
                },
            ],
            start: 0,
        };
        let rel = relatedness_reps(&p, &qq, 16);
        assert!(rel.is_related());
        let r = exceptional_check(&p, &qq, &rel).unwrap();
        assert!(!r.same_side_of_one && !r.exceptional);

        let unrelated = relatedness_reps(&rep(&[(2, &[1])]), &rep(&[(3, &[1])]), 4);
        assert_eq!(
            exceptional_check(&rep(&[(2, &[1])]), &rep(&[(3, &[1])]), &unrelated),
            Err(LrsError::NotRelatedInput)
        );
    }

    #[test]
    fn primitive_bases() {
        assert_eq!(primitive_base(&q(8)), Some((q(2), 3)));
        assert_eq!(primitive_base(&q(-4)), Some((q(2), 2)));
        assert_eq!(
            primitive_base(&Q::new(1.into(), 9.into())),
            Some((q(3), -2))
        );
        assert_eq!(
            primitive_base(&Q::new(4.into(), 9.into())),
            Some((Q::new(3.into(), 2.into()), -2))
        );
        assert_eq!(primitive_base(&q(6)), Some((q(6), 1)));
        assert_eq!(primitive_base(&q(-1)), None);
    }
}
