//! Integer equations Σ a_i·q^{f_i} = v over Z^m with unknown f_i ∈ N₀.
//!
//! Growth bound: sort the exponents of a solution and cut wherever two
//! consecutive ones differ by more than g, where q^{g+1} ≥ 2·A and A bounds
//! Σ_i |a_ij| in every coordinate. If no block of terms with exponent spread
//! ≤ (size − 1)·g can vanish, the top block is a nonzero integer vector times
//! q^{m}, the rest is below q^{m}/2 in every coordinate, hence q^m ≤ 2·|v|_∞
//! and every exponent is at most log_q(2|v|_∞) + (k − 1)·g.

use std::ops::ControlFlow;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::mulgroup::IntVec;

pub fn pow(q: &BigInt, e: u64) -> BigInt {
    num_traits::pow::pow(q.clone(), e as usize)
}

fn max_abs(v: &[BigInt]) -> BigInt {
    v.iter().map(|x| x.abs()).max().unwrap_or_else(BigInt::zero)
}

/// Smallest g with q^{g+1} ≥ 2·max_j Σ_i |a_ij|.
pub fn gap(q: &BigInt, terms: &[IntVec]) -> u64 {
    let m = terms.first().map_or(0, |t| t.len());
    let a: BigInt = (0..m)
        .map(|j| terms.iter().map(|t| t[j].abs()).sum::<BigInt>())
        .max()
        .unwrap_or_else(BigInt::zero);
    let need = a * 2;
    let mut g = 0;
    let mut p = q.clone();
    while p < need {
        p *= q;
        g += 1;
    }
    g
}

/// Offsets o (min 0, max ≤ (|subset| − 1)·g) with Σ_{i∈subset} a_i q^{o_i} = 0.
pub fn vanishing_patterns(q: &BigInt, terms: &[IntVec], subset: &[usize], g: u64) -> Vec<Vec<u64>> {
    let span = (subset.len() as u64 - 1) * g;
    let m = terms.first().map_or(0, |t| t.len());
    let mut out = Vec::new();
    let mut offs = vec![0u64; subset.len()];
    loop {
        if offs.iter().min() == Some(&0) {
            let zero = (0..m).all(|j| {
                subset
                    .iter()
                    .zip(&offs)
                    .map(|(&i, &o)| &terms[i][j] * pow(q, o))
                    .sum::<BigInt>()
                    .is_zero()
            });
            if zero {
                out.push(offs.clone());
            }
        }
        // odometer
        let mut pos = 0;
        loop {
            if pos == offs.len() {
                return out;
            }
            if offs[pos] < span {
                offs[pos] += 1;
                break;
            }
            offs[pos] = 0;
            pos += 1;
        }
    }
}

/// All nonempty subsets of 0..n, smallest first.
pub fn subsets(n: usize) -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> = (1u32..(1 << n))
        .map(|mask| (0..n).filter(|i| mask >> i & 1 == 1).collect())
        .collect();
    out.sort_by_key(|s| s.len());
    out
}

/// Some nonempty block of the given terms can vanish with spread ≤ (size − 1)·g.
pub fn has_vanishing_block(q: &BigInt, terms: &[IntVec], g: u64) -> bool {
    subsets(terms.len())
        .iter()
        .any(|s| !vanishing_patterns(q, terms, s, g).is_empty())
}

/// Exponent bound for solutions without vanishing blocks.
pub fn growth_bound(q: &BigInt, target: &[BigInt], k: usize, g: u64) -> u64 {
    let spread = (k.max(1) as u64 - 1) * g;
    let v: BigInt = max_abs(target) * 2;
    if v.is_zero() {
        return spread;
    }
    let mut m = 0;
    let mut p = q.clone();
    while p <= v {
        p *= q;
        m += 1;
    }
    m + spread
}

/// Depth-first enumeration of f with f_i ≤ bounds[i] and Σ a_i q^{f_i} = v,
/// lexicographic in f. The visitor may stop the walk. Callers bound the
/// exponent of a zero term by 0 when its value cannot matter.
pub fn search<F>(q: &BigInt, terms: &[IntVec], target: &[BigInt], bounds: &[u64], mut visit: F)
where
    F: FnMut(&[u64]) -> ControlFlow<()>,
{
    let k = terms.len();
    let top = bounds.iter().copied().max().unwrap_or(0);
    let powers: Vec<BigInt> = (0..=top).map(|e| pow(q, e)).collect();
    let mut f = vec![0u64; k];
    let mut partial = vec![target.to_vec()];
    fn rec<F: FnMut(&[u64]) -> ControlFlow<()>>(
        i: usize,
        terms: &[IntVec],
        bounds: &[u64],
        powers: &[BigInt],
        f: &mut Vec<u64>,
        partial: &mut Vec<IntVec>,
        visit: &mut F,
    ) -> ControlFlow<()> {
        if i == terms.len() {
            if partial[i].iter().all(|x| x.is_zero()) {
                return visit(f);
            }
            return ControlFlow::Continue(());
        }
        for e in 0..=bounds[i] {
            f[i] = e;
            let rest: IntVec = partial[i]
                .iter()
                .zip(&terms[i])
                .map(|(r, a)| r - a * &powers[e as usize])
                .collect();
            partial.push(rest);
            let flow = rec(i + 1, terms, bounds, powers, f, partial, visit);
            partial.pop();
            flow?;
        }
        ControlFlow::Continue(())
    }
    let _ = rec(0, terms, bounds, &powers, &mut f, &mut partial, &mut visit);
}

pub fn search_first(
    q: &BigInt,
    terms: &[IntVec],
    target: &[BigInt],
    bounds: &[u64],
) -> Option<Vec<u64>> {
    let mut found = None;
    search(q, terms, target, bounds, |f| {
        found = Some(f.to_vec());
        ControlFlow::Break(())
    });
    found
}

pub fn search_all(
    q: &BigInt,
    terms: &[IntVec],
    target: &[BigInt],
    bounds: &[u64],
) -> Vec<Vec<u64>> {
    let mut out = Vec::new();
    search(q, terms, target, bounds, |f| {
        out.push(f.to_vec());
        ControlFlow::Continue(())
    });
    out
}

/// Σ a_i q^{f_i}.
pub fn evaluate(q: &BigInt, terms: &[IntVec], f: &[u64]) -> IntVec {
    let m = terms.first().map_or(0, |t| t.len());
    let mut out = vec![BigInt::zero(); m];
    for (t, &e) in terms.iter().zip(f) {
        let p = pow(q, e);
        for (o, a) in out.iter_mut().zip(t) {
            *o += a * &p;
        }
    }
    out
}

/// Preperiod and period of q^f modulo n (n ≥ 1), or None past `limit` steps.
pub fn power_cycle(q: &BigInt, n: &BigInt, limit: usize) -> Option<(u64, u64)> {
    if n.is_one() {
        return Some((0, 1));
    }
    let mut seen = std::collections::HashMap::new();
    let mut x = BigInt::one() % n;
    for i in 0..=limit {
        if let Some(&j) = seen.get(&x) {
            return Some((j as u64, (i - j) as u64));
        }
        seen.insert(x.clone(), i);
        x = (x * q) % n;
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mulgroup::int_vec;

    #[test]
    fn two_powers_summing_to_seven() {
        let q = BigInt::from(2);
        let terms = vec![int_vec(&[1]), int_vec(&[1])];
        let g = gap(&q, &terms);
        assert!(!has_vanishing_block(&q, &terms, g));
        let b = growth_bound(&q, &int_vec(&[7]), 2, g);
        assert!(search_first(&q, &terms, &int_vec(&[7]), &[b, b]).is_none());
        assert_eq!(
            search_first(&q, &terms, &int_vec(&[5]), &[b, b]),
            Some(vec![0, 2])
        );
    }

    #[test]
    fn cancellation_is_detected() {
        let q = BigInt::from(2);
        // 2·2^a − 2^b vanishes at b = a + 1
        let terms = vec![int_vec(&[2]), int_vec(&[-1])];
        let g = gap(&q, &terms);
        assert_eq!(vanishing_patterns(&q, &terms, &[0, 1], g), vec![vec![0, 1]]);
    }

    #[test]
    fn cycles() {
        assert_eq!(
            power_cycle(&BigInt::from(2), &BigInt::from(12), 100),
            Some((2, 2))
        );
        assert_eq!(
            power_cycle(&BigInt::from(3), &BigInt::from(1), 100),
            Some((0, 1))
        );
    }
}
