//! Rational linear recurrences U_n = b₁U_{n−1} + … + b_kU_{n−k}.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use super::LrsError;
use crate::wire::ser_rats;

pub type Q = BigRational;

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

/// A sequence whose first `preamble.len()` terms are listed explicitly and
/// whose remaining terms satisfy the recurrence with the given initial terms.
/// The preamble absorbs the zero roots of a characteristic polynomial, so
/// b_k ≠ 0 always holds.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LinearRecurrence {
    #[serde(serialize_with = "ser_rats")]
    pub coefficients: Vec<Q>,
    #[serde(rename = "initial_terms", serialize_with = "ser_rats")]
    pub initial: Vec<Q>,
    #[serde(serialize_with = "ser_rats", skip_serializing_if = "Vec::is_empty")]
    pub preamble: Vec<Q>,
}

const MATRIX_THRESHOLD: u64 = 512;

impl LinearRecurrence {
    pub fn new(coefficients: Vec<Q>, initial: Vec<Q>) -> Result<Self, LrsError> {
        Self::with_preamble(coefficients, initial, Vec::new())
    }

    pub fn with_preamble(
        coefficients: Vec<Q>,
        initial: Vec<Q>,
        preamble: Vec<Q>,
    ) -> Result<Self, LrsError> {
        if coefficients.len() != initial.len() {
            return Err(LrsError::Shape(format!(
                "{} coefficients but {} initial terms",
                coefficients.len(),
                initial.len()
            )));
        }
        if coefficients.last().is_some_and(|b| b.is_zero()) {
            return Err(LrsError::Shape("last coefficient must be nonzero".into()));
        }
        Ok(LinearRecurrence {
            coefficients,
            initial,
            preamble,
        })
    }

    pub fn from_ints(coefficients: &[i64], initial: &[i64]) -> Result<Self, LrsError> {
        Self::new(
            coefficients.iter().map(|&x| q(x)).collect(),
            initial.iter().map(|&x| q(x)).collect(),
        )
    }

    /// c·r^n.
    pub fn geometric(c: Q, r: Q) -> Result<Self, LrsError> {
        Self::new(vec![r], vec![c])
    }

    /// a·n + b.
    pub fn linear(a: Q, b: Q) -> Result<Self, LrsError> {
        let u1 = &a + &b;
        Self::new(vec![q(2), q(-1)], vec![b, u1])
    }

    pub fn order(&self) -> usize {
        self.coefficients.len()
    }

    /// x^k − b₁x^{k−1} − … − b_k, lowest degree first.
    pub fn charpoly(&self) -> Vec<Q> {
        let k = self.order();
        let mut c = vec![Q::zero(); k + 1];
        c[k] = Q::one();
        for (i, b) in self.coefficients.iter().enumerate() {
            c[k - 1 - i] = -b;
        }
        c
    }

    /// Terms U_0..U_{count−1} by direct recursion.
    pub fn terms(&self, count: usize) -> Vec<Q> {
        let z = self.preamble.len();
        let mut out: Vec<Q> = self.preamble.iter().take(count).cloned().collect();
        let k = self.order();
        let mut tail: Vec<Q> = Vec::with_capacity(count.saturating_sub(z));
        while out.len() + tail.len() < count {
            let i = tail.len();
            let next = if i < k {
                self.initial[i].clone()
            } else if k == 0 {
                Q::zero()
            } else {
                self.coefficients
                    .iter()
                    .enumerate()
                    .map(|(j, b)| b * &tail[i - 1 - j])
                    .sum()
            };
            tail.push(next);
        }
        out.extend(tail);
        out
    }

    pub fn term_recursive(&self, n: u64) -> Q {
        self.terms(n as usize + 1).pop().unwrap()
    }

    /// U_n through the n-th power of the companion matrix.
    pub fn term_matrix(&self, n: u64) -> Q {
        let z = self.preamble.len() as u64;
        if n < z {
            return self.preamble[n as usize].clone();
        }
        let k = self.order();
        if k == 0 {
            return Q::zero();
        }
        let idx = n - z;
        // state (U_{i+k−1}, …, U_i); companion row 0 = coefficients
        let mut comp = vec![vec![Q::zero(); k]; k];
        comp[0] = self.coefficients.clone();
        for i in 1..k {
            comp[i][i - 1] = Q::one();
        }
        let pw = mat_pow_q(&comp, idx);
        let state: Vec<Q> = self.initial.iter().rev().cloned().collect();
        // U_{idx} is the last entry of comp^idx · state
        pw[k - 1].iter().zip(&state).map(|(a, b)| a * b).sum()
    }

    pub fn term(&self, n: u64) -> Q {
        if n < MATRIX_THRESHOLD {
            self.term_recursive(n)
        } else {
            self.term_matrix(n)
        }
    }

    /// Minimal recurrence generating the given terms, by Berlekamp–Massey over
    /// Q. The result reproduces every supplied term; a recurrence of order L
    /// is only determined once at least 2L terms are supplied.
    pub fn fit_minimal(terms: &[Q]) -> Result<Self, LrsError> {
        let (c, l) = berlekamp_massey(terms);
        let mut b: Vec<Q> = (1..=l)
            .map(|i| c.get(i).map_or(Q::zero(), |x| -x))
            .collect();
        while b.last().is_some_and(|x| x.is_zero()) {
            b.pop();
        }
        let k = b.len();
        let z = l - k;
        let preamble = terms[..z.min(terms.len())].to_vec();
        let initial: Vec<Q> = (z..z + k)
            .map(|i| terms.get(i).cloned().unwrap_or_else(Q::zero))
            .collect();
        let rec = Self::with_preamble(b, initial, preamble)?;
        if rec.terms(terms.len()) != terms {
            return Err(LrsError::Shape(
                "fitted recurrence does not reproduce its terms".into(),
            ));
        }
        Ok(rec)
    }
}

/// Connection polynomial C (C[0] = 1) and linear complexity L with
/// Σ_{i=0}^{L} C[i]·s_{n−i} = 0 for all n ≥ L.
pub fn berlekamp_massey(s: &[Q]) -> (Vec<Q>, usize) {
    let mut c = vec![Q::one()];
    let mut b = vec![Q::one()];
    let mut l = 0usize;
    let mut m = 1usize;
    let mut bd = Q::one();
    for n in 0..s.len() {
        let mut d = s[n].clone();
        for i in 1..=l {
            if let Some(ci) = c.get(i) {
                d += ci * &s[n - i];
            }
        }
        if d.is_zero() {
            m += 1;
            continue;
        }
        let coef = &d / &bd;
        let mut next = c.clone();
        if next.len() < b.len() + m {
            next.resize(b.len() + m, Q::zero());
        }
        for (i, bi) in b.iter().enumerate() {
            next[i + m] -= &coef * bi;
        }
        if 2 * l <= n {
            b = c;
            l = n + 1 - l;
            bd = d;
            m = 1;
        } else {
            m += 1;
        }
        c = next;
    }
    while c.len() > 1 && c.last().is_some_and(|x| x.is_zero()) {
        c.pop();
    }
    (c, l)
}

fn mat_mul_q(a: &[Vec<Q>], b: &[Vec<Q>]) -> Vec<Vec<Q>> {
    let n = a.len();
    let mut out = vec![vec![Q::zero(); n]; n];
    for i in 0..n {
        for k in 0..n {
            if a[i][k].is_zero() {
                continue;
            }
            for j in 0..n {
                out[i][j] += &a[i][k] * &b[k][j];
            }
        }
    }
    out
}

fn mat_pow_q(a: &[Vec<Q>], mut n: u64) -> Vec<Vec<Q>> {
    let k = a.len();
    let mut acc: Vec<Vec<Q>> = (0..k)
        .map(|i| {
            (0..k)
                .map(|j| if i == j { Q::one() } else { Q::zero() })
                .collect()
        })
        .collect();
    let mut base = a.to_vec();
    while n > 0 {
        if n & 1 == 1 {
            acc = mat_mul_q(&acc, &base);
        }
        n >>= 1;
        if n > 0 {
            base = mat_mul_q(&base, &base);
        }
    }
    acc
}
