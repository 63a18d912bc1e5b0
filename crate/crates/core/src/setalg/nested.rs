//! Elementary p-nested sets S_q(c₀; c₁,…,c_k) = {c₀ + Σ c_i·q^{f_i} : f ∈ N₀^k}.

use std::collections::BTreeSet;
use std::ops::ControlFlow;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::ser::SerializeStruct;
use serde::Serialize;

use super::exponents::{
    gap, growth_bound, has_vanishing_block, search, search_all, vanishing_patterns,
};
use super::SetError;
use crate::lrs::Q;
use crate::mulgroup::IntVec;
use crate::wire::rat_string;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ElementaryPNestedSet {
    p: u64,
    q: u64,
    c0: Vec<Q>,
    cs: Vec<Vec<Q>>,
}

impl Serialize for ElementaryPNestedSet {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let rats = |v: &[Q]| v.iter().map(rat_string).collect::<Vec<_>>();
        let mut st = s.serialize_struct("ElementaryPNestedSet", 4)?;
        st.serialize_field("q", &self.q)?;
        st.serialize_field("k", &self.cs.len())?;
        st.serialize_field("c0", &rats(&self.c0))?;
        st.serialize_field("c", &self.cs.iter().map(|c| rats(c)).collect::<Vec<_>>())?;
        st.end()
    }
}

fn is_integral(v: &[Q]) -> bool {
    v.iter().all(|x| x.is_integer())
}

/// Outcome of a bounded membership question.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "answer", content = "witness")]
pub enum Membership {
    /// Exponents f realizing the point.
    Yes(Vec<u64>),
    No,
    /// Not found with exponents up to the cap, and no bound certifies absence.
    Unknown(u64),
}

impl Membership {
    pub fn is_yes(&self) -> bool {
        matches!(self, Membership::Yes(_))
    }
}

impl ElementaryPNestedSet {
    pub fn new(p: u64, q: u64, c0: Vec<Q>, cs: Vec<Vec<Q>>) -> Result<Self, SetError> {
        let mut r = q;
        while p >= 2 && r.is_multiple_of(p) {
            r /= p;
        }
        if p < 2 || q < p || r != 1 {
            return Err(SetError::Invalid(format!(
                "q = {q} is not a power of p = {p}"
            )));
        }
        let m = c0.len();
        if let Some(c) = cs.iter().find(|c| c.len() != m) {
            return Err(SetError::DimensionMismatch {
                expected: m,
                got: c.len(),
            });
        }
        let qm1 = Q::from_integer(BigInt::from(q - 1));
        if cs
            .iter()
            .any(|c| !is_integral(&c.iter().map(|x| x * &qm1).collect::<Vec<_>>()))
        {
            return Err(SetError::Invalid("(q − 1)·c_i must be integral".into()));
        }
        let mut sum = c0.clone();
        for c in &cs {
            for (s, x) in sum.iter_mut().zip(c) {
                *s += x;
            }
        }
        if !is_integral(&sum) {
            return Err(SetError::Invalid("c₀ + Σ c_i must be integral".into()));
        }
        Ok(ElementaryPNestedSet { p, q, c0, cs })
    }

    pub fn from_ints(p: u64, q: u64, c0: &[i64], cs: &[Vec<i64>]) -> Result<Self, SetError> {
        let r = |v: &[i64]| {
            v.iter()
                .map(|&x| Q::from_integer(BigInt::from(x)))
                .collect::<Vec<_>>()
        };
        Self::new(p, q, r(c0), cs.iter().map(|c| r(c)).collect())
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn order(&self) -> usize {
        self.cs.len()
    }

    pub fn dim(&self) -> usize {
        self.c0.len()
    }

    pub fn c0(&self) -> &[Q] {
        &self.c0
    }

    pub fn cs(&self) -> &[Vec<Q>] {
        &self.cs
    }

    /// c₀ + Σ c_i q^{f_i}; integral by the invariants.
    pub fn point(&self, f: &[u64]) -> IntVec {
        let mut out = self.c0.clone();
        for (c, &e) in self.cs.iter().zip(f) {
            let p = Q::from_integer(super::exponents::pow(&BigInt::from(self.q), e));
            for (o, x) in out.iter_mut().zip(c) {
                *o += x * &p;
            }
        }
        out.into_iter().map(|x| x.to_integer()).collect()
    }

    /// Common denominator D with D·c₀ and every D·c_i integral.
    pub fn denominator(&self) -> BigInt {
        self.c0
            .iter()
            .chain(self.cs.iter().flatten())
            .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()))
    }

    /// Every point with all exponents ≤ cap.
    pub fn points_within(&self, cap: u64) -> BTreeSet<IntVec> {
        let k = self.order();
        let mut out = BTreeSet::new();
        let mut f = vec![0u64; k];
        loop {
            out.insert(self.point(&f));
            let mut pos = 0;
            loop {
                if pos == k {
                    return out;
                }
                if f[pos] < cap {
                    f[pos] += 1;
                    break;
                }
                f[pos] = 0;
                pos += 1;
            }
        }
    }

    /// The image under x ↦ shift + scale·x, again elementary p-nested.
    pub fn scale_shift(&self, shift: &[BigInt], scale: &BigInt) -> Result<Self, SetError> {
        let s = Q::from_integer(scale.clone());
        let c0 = self
            .c0
            .iter()
            .zip(shift)
            .map(|(c, t)| c * &s + Q::from_integer(t.clone()))
            .collect();
        let cs = self
            .cs
            .iter()
            .map(|c| c.iter().map(|x| x * &s).collect())
            .collect();
        Self::new(self.p, self.q, c0, cs)
    }
}

fn scale_vec(v: &[Q], d: &BigInt) -> IntVec {
    v.iter()
        .map(|x| (x * Q::from_integer(d.clone())).to_integer())
        .collect()
}

fn check_dim(s: &ElementaryPNestedSet, n: &[BigInt]) -> Result<(), SetError> {
    if n.len() != s.dim() {
        return Err(SetError::DimensionMismatch {
            expected: s.dim(),
            got: n.len(),
        });
    }
    Ok(())
}

/// Is n in S? Yes comes with exponents ≤ cap; No is certified by the growth
/// bound when no block of the c_i can cancel; otherwise the answer beyond the
/// cap is Unknown.
pub fn pnested_member(
    s: &ElementaryPNestedSet,
    n: &[BigInt],
    cap: u64,
) -> Result<Membership, SetError> {
    check_dim(s, n)?;
    let d = s.denominator();
    let qb = BigInt::from(s.q);
    let terms: Vec<IntVec> = s.cs.iter().map(|c| scale_vec(c, &d)).collect();
    let target: IntVec = n
        .iter()
        .zip(scale_vec(&s.c0, &d))
        .map(|(x, c)| x * &d - c)
        .collect();
    let nonzero: Vec<IntVec> = terms
        .iter()
        .filter(|t| t.iter().any(|x| !x.is_zero()))
        .cloned()
        .collect();
    let g = gap(&qb, &nonzero);
    let certified = (!has_vanishing_block(&qb, &nonzero, g))
        .then(|| growth_bound(&qb, &target, nonzero.len(), g));
    let limit = match certified {
        Some(b) if b <= cap => b,
        _ => cap,
    };
    let bounds: Vec<u64> = terms
        .iter()
        .map(|t| {
            if t.iter().all(|x| x.is_zero()) {
                0
            } else {
                limit
            }
        })
        .collect();
    let mut found = None;
    search(&qb, &terms, &target, &bounds, |f| {
        found = Some(f.to_vec());
        ControlFlow::Break(())
    });
    Ok(match (found, certified) {
        (Some(f), _) => Membership::Yes(f),
        (None, Some(b)) if b <= cap => Membership::No,
        _ => Membership::Unknown(cap),
    })
}

/// S₁ ∩ S₂ either as certified elementary p-nested components or as the
/// points found with exponents up to a cap.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind")]
pub enum PNestedIntersection {
    Certified {
        components: Vec<ElementaryPNestedSet>,
    },
    Windowed {
        #[serde(serialize_with = "crate::wire::ser_int_rows")]
        points: Vec<IntVec>,
        cap: u64,
        unknown: bool,
    },
}

/// Certified when q₁ = q₂ and both orders are ≤ 2.
///
/// Write a common point as c₀ + Σ c_i q^{f_i} = d₀ + Σ d_j q^{g_j}. Every
/// solution splits into blocks of terms whose weighted sums vanish (these may
/// be shifted freely) and a remainder whose exponents obey the growth bound.
/// Enumerating the splits, the vanishing patterns and the bounded remainders
/// gives the intersection as a finite union of elementary p-nested sets.
pub fn pnested_intersect(
    s1: &ElementaryPNestedSet,
    s2: &ElementaryPNestedSet,
    cap: u64,
) -> Result<PNestedIntersection, SetError> {
    if s1.dim() != s2.dim() {
        return Err(SetError::DimensionMismatch {
            expected: s1.dim(),
            got: s2.dim(),
        });
    }
    if s1.q != s2.q || s1.order() > 2 || s2.order() > 2 {
        return windowed(s1, s2, cap);
    }
    let k1 = s1.order();
    let d = s1.denominator().lcm(&s2.denominator());
    let qb = BigInt::from(s1.q);
    let mut terms: Vec<IntVec> = s1.cs.iter().map(|c| scale_vec(c, &d)).collect();
    terms.extend(
        s2.cs
            .iter()
            .map(|c| scale_vec(c, &d).into_iter().map(|x| -x).collect::<IntVec>()),
    );
    let target: IntVec = scale_vec(&s2.c0, &d)
        .iter()
        .zip(scale_vec(&s1.c0, &d))
        .map(|(a, b)| a - b)
        .collect();
    let kk = terms.len();
    let g = gap(&qb, &terms);
    let f0 = growth_bound(&qb, &target, kk, g);

    let mut found: BTreeSet<ElementaryPNestedSet> = BTreeSet::new();
    for rest_mask in 0u32..(1 << kk) {
        let anchored: Vec<usize> = (0..kk).filter(|i| rest_mask >> i & 1 == 0).collect();
        let free: Vec<usize> = (0..kk).filter(|i| rest_mask >> i & 1 == 1).collect();
        for blocks in set_partitions(&free) {
            // a vanishing pattern for every block
            let mut choices: Vec<Vec<Vec<u64>>> = Vec::new();
            for b in &blocks {
                let pats = vanishing_patterns(&qb, &terms, b, g);
                if pats.is_empty() {
                    break;
                }
                choices.push(pats);
            }
            if choices.len() < blocks.len() {
                continue;
            }
            let a_terms: Vec<IntVec> = anchored.iter().map(|&i| terms[i].clone()).collect();
            let bounds = vec![f0; anchored.len()];
            let sols = if anchored.is_empty() {
                if target.iter().all(|x| x.is_zero()) {
                    vec![vec![]]
                } else {
                    vec![]
                }
            } else {
                search_all(&qb, &a_terms, &target, &bounds)
            };
            for fa in &sols {
                for pick in cartesian(&choices) {
                    let mut c0 = s1.c0.clone();
                    for (&i, &e) in anchored.iter().zip(fa) {
                        if i < k1 {
                            add_scaled(&mut c0, &s1.cs[i], s1.q, e);
                        }
                    }
                    let mut cs = Vec::new();
                    for (b, offs) in blocks.iter().zip(&pick) {
                        let mut w = vec![Q::zero(); s1.dim()];
                        for (&i, &o) in b.iter().zip(offs.iter()) {
                            if i < k1 {
                                add_scaled(&mut w, &s1.cs[i], s1.q, o);
                            }
                        }
                        if w.iter().any(|x| !x.is_zero()) {
                            cs.push(w);
                        }
                    }
                    cs.sort();
                    found.insert(ElementaryPNestedSet::new(s1.p, s1.q, c0, cs)?);
                }
            }
        }
    }
    // drop singletons already inside a larger component
    let all: Vec<ElementaryPNestedSet> = found.into_iter().collect();
    let mut components = Vec::new();
    for (i, s) in all.iter().enumerate() {
        if s.order() == 0 {
            let pt = s.point(&[]);
            let covered = all.iter().enumerate().any(|(j, o)| {
                j != i
                    && o.order() > 0
                    && matches!(
                        pnested_member(o, &pt, f0 + 2 * g + 2),
                        Ok(Membership::Yes(_))
                    )
            });
            if covered {
                continue;
            }
        }
        components.push(s.clone());
    }
    Ok(PNestedIntersection::Certified { components })
}

fn add_scaled(acc: &mut [Q], c: &[Q], q: u64, e: u64) {
    let p = Q::from_integer(super::exponents::pow(&BigInt::from(q), e));
    for (a, x) in acc.iter_mut().zip(c) {
        *a += x * &p;
    }
}

fn windowed(
    s1: &ElementaryPNestedSet,
    s2: &ElementaryPNestedSet,
    cap: u64,
) -> Result<PNestedIntersection, SetError> {
    let mut points = Vec::new();
    for pt in s1.points_within(cap) {
        if let Membership::Yes(_) = pnested_member(s2, &pt, cap)? {
            points.push(pt);
        }
    }
    Ok(PNestedIntersection::Windowed {
        points,
        cap,
        unknown: true,
    })
}

/// Partitions of a list into nonempty blocks.
fn set_partitions(items: &[usize]) -> Vec<Vec<Vec<usize>>> {
    let Some((&first, rest)) = items.split_first() else {
        return vec![vec![]];
    };
    let mut out = Vec::new();
    for part in set_partitions(rest) {
        for i in 0..part.len() {
            let mut p = part.clone();
            p[i].insert(0, first);
            out.push(p);
        }
        let mut p = part;
        p.insert(0, vec![first]);
        out.push(p);
    }
    out
}

fn cartesian(choices: &[Vec<Vec<u64>>]) -> Vec<Vec<Vec<u64>>> {
    let mut out: Vec<Vec<Vec<u64>>> = vec![vec![]];
    for c in choices {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                c.iter().map(move |x| {
                    let mut p = prefix.clone();
                    p.push(x.clone());
                    p
                })
            })
            .collect();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mulgroup::int_vec;

    fn s(q: u64, c0: &[i64], cs: &[Vec<i64>]) -> ElementaryPNestedSet {
        ElementaryPNestedSet::from_ints(2, q, c0, cs).unwrap()
    }

    #[test]
    fn membership_examples() {
        let set = s(2, &[0], &[vec![1], vec![1]]);
        assert_eq!(
            pnested_member(&set, &int_vec(&[5]), 16).unwrap(),
            Membership::Yes(vec![0, 2])
        );
        assert_eq!(
            pnested_member(&set, &int_vec(&[7]), 16).unwrap(),
            Membership::No
        );
        let zero = s(2, &[3], &[]);
        assert_eq!(
            pnested_member(&zero, &int_vec(&[3]), 4).unwrap(),
            Membership::Yes(vec![])
        );
        assert_eq!(
            pnested_member(&zero, &int_vec(&[4]), 4).unwrap(),
            Membership::No
        );
        // 2^a − 2^b can cancel, so a miss (5 is no such difference) stays Unknown
        let canc = s(2, &[0], &[vec![1], vec![-1]]);
        assert_eq!(
            pnested_member(&canc, &int_vec(&[3]), 10).unwrap(),
            Membership::Yes(vec![2, 0])
        );
        assert_eq!(
            pnested_member(&canc, &int_vec(&[5]), 10).unwrap(),
            Membership::Unknown(10)
        );
        assert!(pnested_member(&canc, &int_vec(&[0]), 10).unwrap().is_yes());
        assert!(pnested_member(&set, &int_vec(&[1, 2]), 4).is_err());
    }

    #[test]
    fn rejects_non_integral_presentations() {
        let half = Q::new(1.into(), 2.into());
        assert!(
            ElementaryPNestedSet::new(3, 3, vec![half.clone()], vec![vec![half.clone()]]).is_ok()
        );
        assert!(ElementaryPNestedSet::new(2, 2, vec![Q::zero()], vec![vec![half]]).is_err());
        assert!(ElementaryPNestedSet::from_ints(2, 6, &[0], &[vec![1]]).is_err());
    }

    #[test]
    fn intersection_examples() {
        let a = s(2, &[0], &[vec![1]]);
        match pnested_intersect(&a, &a, 16).unwrap() {
            PNestedIntersection::Certified { components } => assert!(components.contains(&a)),
            other => panic!("{other:?}"),
        }
        let b = s(2, &[1], &[vec![1]]);
        assert_eq!(
            pnested_intersect(&b, &a, 16).unwrap(),
            PNestedIntersection::Certified {
                components: vec![s(2, &[2], &[])]
            }
        );
        let diag = s(2, &[0, 0], &[vec![1, 1]]);
        let axis = s(2, &[0, 0], &[vec![1, 0]]);
        assert_eq!(
            pnested_intersect(&diag, &axis, 16).unwrap(),
            PNestedIntersection::Certified { components: vec![] }
        );
    }
}
