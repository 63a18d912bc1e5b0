//! Jordan normal form over F_{q^k}(t) and closed-form block powers.
//!
//! J_{λ,ℓ}^n has entry C(n, k)·λ^{n−k} at (i, i+k). Reduced mod p through
//! Lucas, the binomial part depends only on n mod Q, Q the least p-power ≥ ℓ.

use serde::Serialize;

use super::matrix::*;
use super::{AffineError, ReducedPair};
use crate::funcfield::{root_multiplicities, RatFunc};

/// C(n, k) mod p by Lucas' theorem.
pub fn binom_mod_p(mut n: u64, mut k: u64, p: u64) -> u64 {
    let mut acc = 1u64;
    while k > 0 {
        let (nd, kd) = (n % p, k % p);
        if kd > nd {
            return 0;
        }
        // small binomial by the multiplicative formula mod p
        let mut num = 1u64;
        let mut den = 1u64;
        for i in 0..kd {
            num = num * ((nd - i) % p) % p;
            den = den * ((i + 1) % p) % p;
        }
        acc = acc * num % p * mod_inv(den, p) % p;
        n /= p;
        k /= p;
    }
    acc
}

fn mod_inv(a: u64, p: u64) -> u64 {
    let mut r = 1u64;
    let mut b = a % p;
    let mut e = p - 2;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    r
}

/// Least power of p that is ≥ ℓ.
pub fn binom_period(l: u64, p: u64) -> u64 {
    let mut q = 1u64;
    while q < l {
        q *= p;
    }
    q
}

/// The ℓ×ℓ Jordan block with eigenvalue λ.
pub fn jordan_block(lambda: &RatFunc, l: usize) -> RMat {
    let field = lambda.field().clone();
    let mut m = zeros(&field, l, l);
    for i in 0..l {
        m[i][i] = lambda.clone();
        if i + 1 < l {
            m[i][i + 1] = RatFunc::one(field.clone());
        }
    }
    m
}

/// J_{λ,ℓ}^n from the binomial formula.
pub fn jordan_block_power(lambda: &RatFunc, l: usize, n: u64) -> Result<RMat, AffineError> {
    if lambda.is_zero() {
        return Err(AffineError::ZeroEigenvalue);
    }
    let field = lambda.field().clone();
    let p = field.characteristic();
    let mut m = zeros(&field, l, l);
    for k in 0..l {
        let c = binom_mod_p(n, k as u64, p);
        if c == 0 {
            continue;
        }
        let entry = &RatFunc::constant(field.clone(), c) * &lambda.pow(n as i64 - k as i64)?;
        for i in 0..l - k {
            m[i][i + k] = entry.clone();
        }
    }
    Ok(m)
}

fn block_diag_power(blocks: &[(RatFunc, usize)], n: u64) -> Result<RMat, AffineError> {
    let field = blocks[0].0.field().clone();
    let d: usize = blocks.iter().map(|b| b.1).sum();
    let mut m = zeros(&field, d, d);
    let mut off = 0;
    for (lambda, l) in blocks {
        let b = jordan_block_power(lambda, *l, n)?;
        for i in 0..*l {
            for j in 0..*l {
                m[off + i][off + j] = b[i][j].clone();
            }
        }
        off += l;
    }
    Ok(m)
}

/// C⁻¹·J·C = A with J block diagonal in `blocks` order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JordanData {
    pub blocks: Vec<(RatFunc, usize)>,
    pub c: RMat,
    pub c_inv: RMat,
}

impl Serialize for JordanData {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let blocks: Vec<(String, usize)> = self
            .blocks
            .iter()
            .map(|(l, n)| (l.to_string(), *n))
            .collect();
        let mut st = s.serialize_struct("JordanData", 2)?;
        st.serialize_field("blocks", &blocks)?;
        st.serialize_field("C", &mat_strings(&self.c))?;
        st.end()
    }
}

impl JordanData {
    pub fn j(&self) -> RMat {
        block_diag_power(&self.blocks, 1).expect("nonzero eigenvalues")
    }

    pub fn j_power(&self, n: u64) -> Result<RMat, AffineError> {
        block_diag_power(&self.blocks, n)
    }
}

fn independent_of(span: &[RVec], w: &RVec) -> bool {
    if span.is_empty() {
        return w.iter().any(|x| !x.is_zero());
    }
    let mut m: RMat = span.to_vec();
    let r = mat_rank(&m);
    m.push(w.clone());
    mat_rank(&m) > r
}

/// Jordan form of an invertible matrix whose characteristic polynomial
/// splits over the working field.
pub fn jordan_form(a: &RMat) -> Result<JordanData, AffineError> {
    let d = a.len();
    if det(a).is_zero() {
        return Err(AffineError::NotInvertible);
    }
    let cp = charpoly(a);
    let roots = root_multiplicities(&cp)?;
    let found: usize = roots.iter().map(|r| r.1).sum();
    if found < d {
        return Err(AffineError::NotSplit { found, needed: d });
    }
    let mut columns: Vec<RVec> = Vec::with_capacity(d);
    let mut blocks = Vec::new();
    for (lambda, mult) in &roots {
        let nmat = scalar_sub_identity(a, lambda);
        let mut npow = vec![identity(&a[0][0].field().clone(), d)];
        for _ in 0..*mult {
            let next = mat_mul(npow.last().unwrap(), &nmat);
            npow.push(next);
        }
        // chains as (top vector, length), longest first
        let mut chains: Vec<(RVec, usize)> = Vec::new();
        for j in (1..=*mult).rev() {
            let mut span: Vec<RVec> = kernel(&npow[j - 1]);
            for (top, len) in &chains {
                span.push(mat_vec(&npow[len - j], top));
            }
            for w in kernel(&npow[j]) {
                if independent_of(&span, &w) {
                    span.push(w.clone());
                    chains.push((w, j));
                }
            }
        }
        for (top, len) in chains {
            for k in (0..len).rev() {
                columns.push(mat_vec(&npow[k], &top));
            }
            blocks.push((lambda.clone(), len));
        }
    }
    let field = a[0][0].field().clone();
    let mut p = zeros(&field, d, d);
    for (j, col) in columns.iter().enumerate() {
        for i in 0..d {
            p[i][j] = col[i].clone();
        }
    }
    let c = inverse(&p).expect("generalized eigenvectors form a basis");
    let data = JordanData {
        blocks,
        c,
        c_inv: p,
    };
    debug_assert_eq!(mat_mul(&mat_mul(&data.c_inv, &data.j()), &data.c), *a);
    Ok(data)
}

/// The reduced identity in Jordan coordinates:
/// J₁^n·(C₁b₁) = (C₁C₂⁻¹)·J₂^m·(C₂b₂) + C₁b₃.
#[derive(Clone, Debug)]
pub struct JordanSystem {
    pub j1: JordanData,
    pub j2: JordanData,
    pub c1b1: RVec,
    pub c2b2: RVec,
    pub c1b3: RVec,
    pub link: RMat,
}

impl JordanSystem {
    pub fn new(pair: &ReducedPair) -> Result<Self, AffineError> {
        let j1 = jordan_form(&pair.a1)?;
        let j2 = jordan_form(&pair.a2)?;
        Ok(JordanSystem {
            c1b1: mat_vec(&j1.c, &pair.b1),
            c2b2: mat_vec(&j2.c, &pair.b2),
            c1b3: mat_vec(&j1.c, &pair.b3),
            link: mat_mul(&j1.c, &j2.c_inv),
            j1,
            j2,
        })
    }

    pub fn holds(&self, n: u64, m: u64) -> Result<bool, AffineError> {
        let lhs = mat_vec(&self.j1.j_power(n)?, &self.c1b1);
        let rhs = vec_add(
            &mat_vec(&self.link, &mat_vec(&self.j2.j_power(m)?, &self.c2b2)),
            &self.c1b3,
        );
        Ok(lhs == rhs)
    }
}
