//! Dense matrices and vectors over F_{q^k}(t), plus polynomials in x with
//! F_{q^k}(t) coefficients (lowest degree first).

use std::sync::Arc;

use crate::funcfield::{FieldError, GaloisField, RatFunc};

pub type RVec = Vec<RatFunc>;
pub type RMat = Vec<Vec<RatFunc>>;

pub fn zeros(field: &Arc<GaloisField>, r: usize, c: usize) -> RMat {
    vec![vec![RatFunc::zero(field.clone()); c]; r]
}

pub fn identity(field: &Arc<GaloisField>, n: usize) -> RMat {
    let mut m = zeros(field, n, n);
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = RatFunc::one(field.clone());
    }
    m
}

pub fn is_square(a: &RMat) -> bool {
    a.iter().all(|r| r.len() == a.len())
}

pub fn mat_mul(a: &RMat, b: &RMat) -> RMat {
    let field = a[0][0].field().clone();
    let cols = b.first().map_or(0, |r| r.len());
    let mut out = zeros(&field, a.len(), cols);
    for (i, row) in a.iter().enumerate() {
        for (k, x) in row.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for j in 0..cols {
                if !b[k][j].is_zero() {
                    out[i][j] = &out[i][j] + &(x * &b[k][j]);
                }
            }
        }
    }
    out
}

pub fn mat_vec(a: &RMat, v: &[RatFunc]) -> RVec {
    a.iter()
        .map(|row| {
            row.iter()
                .zip(v)
                .fold(RatFunc::zero(v[0].field().clone()), |acc, (x, y)| {
                    if x.is_zero() || y.is_zero() {
                        acc
                    } else {
                        &acc + &(x * y)
                    }
                })
        })
        .collect()
}

pub fn mat_add(a: &RMat, b: &RMat) -> RMat {
    a.iter().zip(b).map(|(r, s)| vec_add(r, s)).collect()
}

pub fn mat_sub(a: &RMat, b: &RMat) -> RMat {
    a.iter().zip(b).map(|(r, s)| vec_sub(r, s)).collect()
}

pub fn vec_add(a: &[RatFunc], b: &[RatFunc]) -> RVec {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn vec_sub(a: &[RatFunc], b: &[RatFunc]) -> RVec {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn scalar_sub_identity(a: &RMat, lambda: &RatFunc) -> RMat {
    let mut m = a.clone();
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = &row[i] - lambda;
    }
    m
}

/// Largest max(deg num, deg den) over all entries.
pub fn max_degree(a: &RMat) -> usize {
    a.iter().flatten().map(|x| x.degree()).max().unwrap_or(0)
}

pub fn vec_degree(v: &[RatFunc]) -> usize {
    v.iter().map(|x| x.degree()).max().unwrap_or(0)
}

pub fn check_mat(a: &RMat, cap: usize) -> Result<(), FieldError> {
    let d = max_degree(a);
    if d > cap {
        Err(FieldError::DegreeOverflow { degree: d, cap })
    } else {
        Ok(())
    }
}

pub fn frobenius_mat(a: &RMat) -> RMat {
    a.iter()
        .map(|r| r.iter().map(|x| x.frobenius_power(1)).collect())
        .collect()
}

pub fn frobenius_vec(v: &[RatFunc]) -> RVec {
    v.iter().map(|x| x.frobenius_power(1)).collect()
}

/// Reduced row echelon form with pivots chosen left to right; returns the
/// pivot columns.
pub fn rref(a: &mut RMat) -> Vec<usize> {
    let rows = a.len();
    let cols = a.first().map_or(0, |r| r.len());
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(r, p);
        let inv = a[r][c].inv().expect("nonzero pivot");
        a[r] = a[r].iter().map(|x| x * &inv).collect();
        for i in 0..rows {
            if i != r && !a[i][c].is_zero() {
                let f = a[i][c].clone();
                let sub: RVec = a[r].iter().map(|x| x * &f).collect();
                a[i] = vec_sub(&a[i], &sub);
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn mat_rank(a: &RMat) -> usize {
    let mut m = a.clone();
    rref(&mut m).len()
}

pub fn det(a: &RMat) -> RatFunc {
    let n = a.len();
    let field = a[0][0].field().clone();
    let mut m = a.clone();
    let mut acc = RatFunc::one(field.clone());
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| !m[i][c].is_zero()) else {
            return RatFunc::zero(field);
        };
        if p != c {
            m.swap(p, c);
            acc = -&acc;
        }
        acc = &acc * &m[c][c];
        let inv = m[c][c].inv().unwrap();
        for i in c + 1..n {
            if m[i][c].is_zero() {
                continue;
            }
            let f = &m[i][c] * &inv;
            let sub: RVec = m[c].iter().map(|x| x * &f).collect();
            m[i] = vec_sub(&m[i], &sub);
        }
    }
    acc
}

pub fn inverse(a: &RMat) -> Option<RMat> {
    let n = a.len();
    let field = a[0][0].field().clone();
    let id = identity(&field, n);
    let mut aug: RMat = a
        .iter()
        .zip(&id)
        .map(|(r, e)| r.iter().chain(e).cloned().collect())
        .collect();
    let pivots = rref(&mut aug);
    if pivots.len() < n || pivots[n - 1] != n - 1 {
        return None;
    }
    Some(aug.into_iter().map(|r| r[n..].to_vec()).collect())
}

/// Solve a·x = b for square invertible a.
pub fn solve(a: &RMat, b: &[RatFunc]) -> Option<RVec> {
    Some(mat_vec(&inverse(a)?, b))
}

/// Kernel basis: one vector per free column, free columns left to right.
pub fn kernel(a: &RMat) -> Vec<RVec> {
    let field = a[0][0].field().clone();
    let cols = a[0].len();
    let mut m = a.clone();
    let pivots = rref(&mut m);
    let mut out = Vec::new();
    for free in (0..cols).filter(|c| !pivots.contains(c)) {
        let mut v = vec![RatFunc::zero(field.clone()); cols];
        v[free] = RatFunc::one(field.clone());
        for (r, &pc) in pivots.iter().enumerate() {
            v[pc] = -&m[r][free];
        }
        out.push(v);
    }
    out
}

/// Binary powering with the degree cap checked after every product.
pub fn mat_pow(a: &RMat, mut n: u64, cap: usize) -> Result<RMat, FieldError> {
    let field = a[0][0].field().clone();
    let mut acc = identity(&field, a.len());
    let mut base = a.clone();
    while n > 0 {
        if n & 1 == 1 {
            acc = mat_mul(&acc, &base);
            check_mat(&acc, cap)?;
        }
        n >>= 1;
        if n > 0 {
            base = mat_mul(&base, &base);
            check_mat(&base, cap)?;
        }
    }
    Ok(acc)
}

/// Integer power; negative exponents use the inverse.
pub fn mat_pow_signed(a: &RMat, n: i64, cap: usize) -> Result<RMat, FieldError> {
    if n >= 0 {
        mat_pow(a, n as u64, cap)
    } else {
        let inv = inverse(a).ok_or(FieldError::DivisionByZero)?;
        mat_pow(&inv, n.unsigned_abs(), cap)
    }
}

pub mod xpoly {
    //! Polynomials in x over F_{q^k}(t), lowest degree first, no trailing zeros.

    use super::*;

    pub fn trim(mut p: Vec<RatFunc>) -> Vec<RatFunc> {
        while p.len() > 1 && p.last().is_some_and(|c| c.is_zero()) {
            p.pop();
        }
        p
    }

    pub fn add(a: &[RatFunc], b: &[RatFunc]) -> Vec<RatFunc> {
        let field = a.first().or(b.first()).unwrap().field().clone();
        let n = a.len().max(b.len());
        let z = RatFunc::zero(field);
        trim(
            (0..n)
                .map(|i| a.get(i).unwrap_or(&z) + b.get(i).unwrap_or(&z))
                .collect(),
        )
    }

    pub fn scale(a: &[RatFunc], c: &RatFunc) -> Vec<RatFunc> {
        trim(a.iter().map(|x| x * c).collect())
    }

    pub fn mul(a: &[RatFunc], b: &[RatFunc]) -> Vec<RatFunc> {
        let field = a[0].field().clone();
        let mut out = vec![RatFunc::zero(field); a.len() + b.len() - 1];
        for (i, x) in a.iter().enumerate() {
            for (j, y) in b.iter().enumerate() {
                out[i + j] = &out[i + j] + &(x * y);
            }
        }
        trim(out)
    }

    /// x − c.
    pub fn linear(c: &RatFunc) -> Vec<RatFunc> {
        vec![-c, RatFunc::one(c.field().clone())]
    }
}

/// Characteristic polynomial det(x·I − A) via Hessenberg reduction; valid in
/// every characteristic.
pub fn charpoly(a: &RMat) -> Vec<RatFunc> {
    let n = a.len();
    let field = a[0][0].field().clone();
    let mut h = a.clone();
    for m in 1..n.saturating_sub(1) {
        let Some(i) = (m..n).find(|&i| !h[i][m - 1].is_zero()) else {
            continue;
        };
        if i != m {
            h.swap(i, m);
            for row in h.iter_mut() {
                row.swap(i, m);
            }
        }
        let inv = h[m][m - 1].inv().unwrap();
        for j in m + 1..n {
            if h[j][m - 1].is_zero() {
                continue;
            }
            let u = &h[j][m - 1] * &inv;
            for c in 0..n {
                let d = &u * &h[m][c];
                h[j][c] = &h[j][c] - &d;
            }
            for row in h.iter_mut() {
                let d = &u * &row[j];
                row[m] = &row[m] + &d;
            }
        }
    }
    // 1-indexed recurrence on the leading principal minors
    let hh = |i: usize, j: usize| &h[i - 1][j - 1];
    let mut p: Vec<Vec<RatFunc>> = vec![vec![RatFunc::one(field.clone())]];
    for m in 1..=n {
        let mut pm = xpoly::mul(&xpoly::linear(hh(m, m)), &p[m - 1]);
        let mut t = RatFunc::one(field.clone());
        for i in 1..m {
            t = &t * hh(m - i + 1, m - i);
            let c = &(hh(m - i, m) * &t);
            pm = xpoly::add(&pm, &xpoly::scale(&p[m - i - 1], &-c));
        }
        p.push(pm);
    }
    p.pop().unwrap()
}

/// Canonical strings, row-major.
pub fn mat_strings(a: &RMat) -> Vec<Vec<String>> {
    a.iter()
        .map(|r| r.iter().map(|x| x.to_string()).collect())
        .collect()
}

pub fn vec_strings(v: &[RatFunc]) -> Vec<String> {
    v.iter().map(|x| x.to_string()).collect()
}
