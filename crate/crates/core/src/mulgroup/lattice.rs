//! Integer lattices in Z^m: Hermite normal form for membership, Smith normal
//! form for quotients.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use super::MulGroupError;

pub type IntVec = Vec<BigInt>;
pub type IntMat = Vec<Vec<BigInt>>;

pub fn int_vec(v: &[i64]) -> IntVec {
    v.iter().map(|&x| BigInt::from(x)).collect()
}

pub fn identity(n: usize) -> IntMat {
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    if i == j {
                        BigInt::one()
                    } else {
                        BigInt::zero()
                    }
                })
                .collect()
        })
        .collect()
}

pub fn mat_mul(a: &IntMat, b: &IntMat) -> IntMat {
    let cols = b.first().map_or(0, |r| r.len());
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| row.iter().zip(b.iter()).map(|(x, brow)| x * &brow[j]).sum())
                .collect()
        })
        .collect()
}

/// Row-style Hermite normal form: returns (H, T) with T unimodular and
/// T·rows = H. Pivot columns are chosen left to right; pivots are positive and
/// entries above a pivot are reduced into [0, pivot). Zero rows are kept at the
/// bottom.
pub fn hermite(rows: &IntMat, ncols: usize) -> (IntMat, IntMat) {
    let n = rows.len();
    let mut h = rows.clone();
    let mut t = identity(n);
    let mut r = 0;
    for c in 0..ncols {
        if r == n {
            break;
        }
        // gcd-combine all rows below r into row r for column c
        for i in r + 1..n {
            if h[i][c].is_zero() {
                continue;
            }
            if h[r][c].is_zero() {
                h.swap(r, i);
                t.swap(r, i);
                continue;
            }
            let e = h[r][c].extended_gcd(&h[i][c]);
            let (g, x, y) = (e.gcd, e.x, e.y);
            let a = &h[r][c] / &g;
            let b = &h[i][c] / &g;
            // [x y; -b a] has determinant 1
            let new_r: IntVec = (0..ncols).map(|j| &x * &h[r][j] + &y * &h[i][j]).collect();
            let new_i: IntVec = (0..ncols).map(|j| &a * &h[i][j] - &b * &h[r][j]).collect();
            let tr: IntVec = (0..n).map(|j| &x * &t[r][j] + &y * &t[i][j]).collect();
            let ti: IntVec = (0..n).map(|j| &a * &t[i][j] - &b * &t[r][j]).collect();
            h[r] = new_r;
            h[i] = new_i;
            t[r] = tr;
            t[i] = ti;
        }
        if h[r][c].is_zero() {
            continue;
        }
        if h[r][c].is_negative() {
            for v in h[r].iter_mut().chain(t[r].iter_mut()) {
                *v = -&*v;
            }
        }
        for i in 0..r {
            let q = h[i][c].div_floor(&h[r][c]);
            if q.is_zero() {
                continue;
            }
            for j in 0..ncols {
                let d = &q * &h[r][j];
                h[i][j] -= d;
            }
            for j in 0..n {
                let d = &q * &t[r][j];
                t[i][j] -= d;
            }
        }
        r += 1;
    }
    (h, t)
}

/// Number of nonzero rows of the Hermite form.
pub fn rank(rows: &IntMat, ncols: usize) -> usize {
    hermite(rows, ncols)
        .0
        .iter()
        .filter(|r| r.iter().any(|x| !x.is_zero()))
        .count()
}

/// Smith normal form of an r×c matrix B: (U, D, V) with U·B·V = D diagonal,
/// U and V unimodular, diagonal entries nonnegative and each dividing the next.
pub fn smith(b: &IntMat, ncols: usize) -> (IntMat, IntMat, IntMat) {
    let nrows = b.len();
    let mut d = b.clone();
    let mut u = identity(nrows);
    let mut v = identity(ncols);
    let steps = nrows.min(ncols);
    for k in 0..steps {
        loop {
            // pivot: smallest nonzero magnitude in the trailing block
            let mut best: Option<(usize, usize)> = None;
            for i in k..nrows {
                for j in k..ncols {
                    if !d[i][j].is_zero()
                        && best.is_none_or(|(bi, bj)| d[i][j].abs() < d[bi][bj].abs())
                    {
                        best = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = best else {
                return (u, d, v);
            };
            d.swap(k, pi);
            u.swap(k, pi);
            for row in d.iter_mut() {
                row.swap(k, pj);
            }
            for row in v.iter_mut() {
                row.swap(k, pj);
            }
            let mut clean = true;
            for i in k + 1..nrows {
                let q = d[i][k].div_floor(&d[k][k]);
                if !q.is_zero() {
                    for j in 0..ncols {
                        let x = &q * &d[k][j];
                        d[i][j] -= x;
                    }
                    for j in 0..nrows {
                        let x = &q * &u[k][j];
                        u[i][j] -= x;
                    }
                }
                if !d[i][k].is_zero() {
                    clean = false;
                }
            }
            for j in k + 1..ncols {
                let q = d[k][j].div_floor(&d[k][k]);
                if !q.is_zero() {
                    for i in 0..nrows {
                        let x = &q * &d[i][k];
                        d[i][j] -= x;
                    }
                    for i in 0..ncols {
                        let x = &q * &v[i][k];
                        v[i][j] -= x;
                    }
                }
                if !d[k][j].is_zero() {
                    clean = false;
                }
            }
            if !clean {
                continue;
            }
            // divisibility: fold any entry not divisible by the pivot into row k
            let mut fixed = true;
            'outer: for i in k + 1..nrows {
                for j in k + 1..ncols {
                    if !(&d[i][j] % &d[k][k]).is_zero() {
                        for c in 0..ncols {
                            let x = d[i][c].clone();
                            d[k][c] += x;
                        }
                        for c in 0..nrows {
                            let x = u[i][c].clone();
                            u[k][c] += x;
                        }
                        fixed = false;
                        break 'outer;
                    }
                }
            }
            if fixed {
                break;
            }
        }
        if d[k][k].is_negative() {
            for c in 0..ncols {
                d[k][c] = -&d[k][c];
            }
            for c in 0..nrows {
                u[k][c] = -&u[k][c];
            }
        }
    }
    (u, d, v)
}

/// A sublattice of Z^m with a fixed independent basis. Membership answers
/// coordinates in that basis.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Lattice {
    ambient: usize,
    #[serde(serialize_with = "crate::wire::ser_int_rows")]
    basis: IntMat,
    #[serde(skip)]
    hnf: IntMat,
    #[serde(skip)]
    transform: IntMat,
    /// Order of the finite unit component attached to this lattice (1 when
    /// there is none).
    pub torsion_order: u64,
}

impl Lattice {
    /// Lattice with the given basis; rejects dependent vectors.
    pub fn new(ambient: usize, basis: IntMat) -> Result<Self, MulGroupError> {
        for b in &basis {
            if b.len() != ambient {
                return Err(MulGroupError::DimensionMismatch {
                    expected: ambient,
                    got: b.len(),
                });
            }
        }
        let (hnf, transform) = hermite(&basis, ambient);
        let r = hnf
            .iter()
            .filter(|row| row.iter().any(|x| !x.is_zero()))
            .count();
        if r < basis.len() {
            return Err(MulGroupError::DependentBasis);
        }
        Ok(Lattice {
            ambient,
            basis,
            hnf,
            transform,
            torsion_order: 1,
        })
    }

    /// Lattice spanned by arbitrary generators; the basis is their Hermite form.
    pub fn span(ambient: usize, generators: &IntMat) -> Result<Self, MulGroupError> {
        for g in generators {
            if g.len() != ambient {
                return Err(MulGroupError::DimensionMismatch {
                    expected: ambient,
                    got: g.len(),
                });
            }
        }
        let (h, _) = hermite(generators, ambient);
        let basis: IntMat = h
            .into_iter()
            .filter(|row| row.iter().any(|x| !x.is_zero()))
            .collect();
        Self::new(ambient, basis)
    }

    pub fn from_i64(ambient: usize, basis: &[Vec<i64>]) -> Result<Self, MulGroupError> {
        Self::new(ambient, basis.iter().map(|b| int_vec(b)).collect())
    }

    pub fn trivial(ambient: usize) -> Self {
        Lattice {
            ambient,
            basis: vec![],
            hnf: vec![],
            transform: vec![],
            torsion_order: 1,
        }
    }

    pub fn full(ambient: usize) -> Self {
        Self::new(ambient, identity(ambient)).expect("identity basis")
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &IntMat {
        &self.basis
    }

    /// Coordinates of v in the basis when v lies in the lattice.
    pub fn member(&self, v: &[BigInt]) -> Result<Option<IntVec>, MulGroupError> {
        if v.len() != self.ambient {
            return Err(MulGroupError::DimensionMismatch {
                expected: self.ambient,
                got: v.len(),
            });
        }
        let mut rest = v.to_vec();
        let mut hcoords = vec![BigInt::zero(); self.hnf.len()];
        for (idx, row) in self.hnf.iter().enumerate() {
            let Some(c) = row.iter().position(|x| !x.is_zero()) else {
                continue;
            };
            if rest[..c].iter().any(|x| !x.is_zero()) {
                return Ok(None);
            }
            let (q, r) = rest[c].div_rem(&row[c]);
            if !r.is_zero() {
                return Ok(None);
            }
            for j in c..self.ambient {
                let d = &q * &row[j];
                rest[j] -= d;
            }
            hcoords[idx] = q;
        }
        if rest.iter().any(|x| !x.is_zero()) {
            return Ok(None);
        }
        // hnf = T·basis, so v = hcoords·T·basis
        let coords = (0..self.basis.len())
            .map(|i| {
                hcoords
                    .iter()
                    .zip(&self.transform)
                    .map(|(c, trow)| c * &trow[i])
                    .sum()
            })
            .collect();
        Ok(Some(coords))
    }

    pub fn contains(&self, v: &[BigInt]) -> bool {
        matches!(self.member(v), Ok(Some(_)))
    }

    /// Σ coords[i]·basis[i].
    pub fn combine(&self, coords: &[BigInt]) -> IntVec {
        let mut out = vec![BigInt::zero(); self.ambient];
        for (c, b) in coords.iter().zip(&self.basis) {
            for (o, x) in out.iter_mut().zip(b) {
                *o += c * x;
            }
        }
        out
    }
}

/// `lattice_member` in free-function form.
pub fn lattice_member(v: &[BigInt], l: &Lattice) -> Result<Option<IntVec>, MulGroupError> {
    l.member(v)
}
