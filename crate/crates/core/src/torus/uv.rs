//! Φ^n(a) = Σ_{i=1}^{d} U_{i,n}·P_i + Σ_{i<d} V_{i,n}·(Φ⁰)^i(a), written
//! additively, with P_i = Σ_{j<i}(Φ⁰)^j(y). The coefficients come from
//! x^n and 1 + x + … + x^{n−1} reduced modulo the characteristic polynomial
//! of the exponent matrix.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::wire::ser_ints;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct UVDecomposition {
    /// Monic characteristic polynomial, lowest degree first.
    #[serde(serialize_with = "ser_ints")]
    pub f: Vec<BigInt>,
    /// U_{1,n} … U_{d,n}.
    #[serde(serialize_with = "ser_ints")]
    pub u: Vec<BigInt>,
    /// V_{0,n} … V_{d−1,n}.
    #[serde(serialize_with = "ser_ints")]
    pub v: Vec<BigInt>,
}

/// det(xI − M) by Faddeev–LeVerrier; every division by k is exact.
pub fn int_charpoly(m: &[Vec<i64>]) -> Vec<BigInt> {
    let d = m.len();
    let a: Vec<Vec<BigInt>> = m
        .iter()
        .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
        .collect();
    let mut c = vec![BigInt::zero(); d + 1];
    c[d] = BigInt::one();
    let mut mk = vec![vec![BigInt::zero(); d]; d];
    for k in 1..=d {
        // M_k = A·M_{k−1} + c_{d−k+1}·I
        let mut next = int_mat_mul(&a, &mk);
        for (i, row) in next.iter_mut().enumerate() {
            row[i] += &c[d - k + 1];
        }
        mk = next;
        let am = int_mat_mul(&a, &mk);
        let tr: BigInt = (0..d).map(|i| am[i][i].clone()).sum();
        c[d - k] = -tr / BigInt::from(k);
    }
    c
}

pub fn int_mat_mul(a: &[Vec<BigInt>], b: &[Vec<BigInt>]) -> Vec<Vec<BigInt>> {
    let n = a.len();
    let m = b.first().map_or(0, |r| r.len());
    let mut out = vec![vec![BigInt::zero(); m]; n];
    for i in 0..n {
        for (k, bk) in b.iter().enumerate() {
            if a[i][k].is_zero() {
                continue;
            }
            for j in 0..m {
                out[i][j] += &a[i][k] * &bk[j];
            }
        }
    }
    out
}

/// Remainder modulo a monic polynomial, as exactly d coefficients.
fn reduce(mut p: Vec<BigInt>, f: &[BigInt]) -> Vec<BigInt> {
    let d = f.len() - 1;
    while p.len() > d {
        let lead = p.pop().unwrap();
        if lead.is_zero() {
            continue;
        }
        let shift = p.len() - d;
        for i in 0..d {
            p[shift + i] -= &lead * &f[i];
        }
    }
    p.resize(d, BigInt::zero());
    p
}

fn mul_mod(a: &[BigInt], b: &[BigInt], f: &[BigInt]) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); a.len() + b.len()];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    reduce(out, f)
}

fn add(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

/// (x^n mod f, (1 + … + x^{n−1}) mod f) by doubling.
fn power_and_sum(n: u64, f: &[BigInt]) -> (Vec<BigInt>, Vec<BigInt>) {
    let d = f.len() - 1;
    let one = reduce(vec![BigInt::one()], f);
    let x = reduce(vec![BigInt::zero(), BigInt::one()], f);
    let mut pw = one.clone();
    let mut sum = vec![BigInt::zero(); d];
    for bit in (0..64 - n.leading_zeros()).rev() {
        // (x^k, S_k) → (x^{2k}, S_k + x^k·S_k)
        sum = add(&sum, &mul_mod(&pw, &sum, f));
        pw = mul_mod(&pw, &pw, f);
        if (n >> bit) & 1 == 1 {
            // (x^k, S_k) → (x^{k+1}, S_k + x^k)
            sum = add(&sum, &pw);
            pw = mul_mod(&pw, &x, f);
        }
    }
    (pw, sum)
}

pub fn uv_sequences(m: &[Vec<i64>], n: u64) -> UVDecomposition {
    let f = int_charpoly(m);
    let d = m.len();
    let (v, s) = power_and_sum(n, &f);
    // s_j = Σ_{i>j} U_i, so U_d = s_{d−1} and U_i = s_{i−1} − s_i
    let u: Vec<BigInt> = (1..=d)
        .map(|i| {
            if i == d {
                s[d - 1].clone()
            } else {
                &s[i - 1] - &s[i]
            }
        })
        .collect();
    UVDecomposition { f, u, v }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn scalar_geometric() {
        for n in 0..20u64 {
            let uv = uv_sequences(&[vec![2]], n);
            assert_eq!(uv.f, ints(&[-2, 1]));
            assert_eq!(uv.v, vec![BigInt::from(2).pow(n as u32)]);
            assert_eq!(uv.u, vec![BigInt::from(2).pow(n as u32) - 1]);
        }
    }

    #[test]
    fn fibonacci_companion() {
        let uv = uv_sequences(&[vec![1, 1], vec![1, 0]], 6);
        assert_eq!(uv.f, ints(&[-1, -1, 1]));
        assert_eq!(uv.v, ints(&[5, 8]));
        let zero = uv_sequences(&[vec![1, 1], vec![1, 0]], 0);
        assert_eq!(zero.v, ints(&[1, 0]));
        assert_eq!(zero.u, ints(&[0, 0]));
    }

    #[test]
    fn cayley_hamilton() {
        let m = vec![vec![2, -1, 0], vec![1, 1, 2], vec![-2, 0, 1]];
        let f = int_charpoly(&m);
        let a: Vec<Vec<BigInt>> = m.iter().map(|r| ints(r)).collect();
        let mut acc = vec![vec![BigInt::zero(); 3]; 3];
        let mut pw: Vec<Vec<BigInt>> = (0..3)
            .map(|i| (0..3).map(|j| BigInt::from((i == j) as i64)).collect())
            .collect();
        for c in &f {
            for i in 0..3 {
                for j in 0..3 {
                    acc[i][j] += c * &pw[i][j];
                }
            }
            pw = int_mat_mul(&a, &pw);
        }
        assert!(acc.iter().flatten().all(|x| x.is_zero()));
    }
}
