//! Orbit intersection for torus maps in logarithmic coordinates.
//!
//! Every orbit point lies in the group Γ generated by the coordinates of
//! (Φ⁰)^j(y) and (Φ⁰)^j(a), j < d, for both maps. A point is recorded as its
//! unit exponents modulo |F^*| (the torsion part) and its coordinates in the
//! lattice Γ₁ (the free part). Equality of points is equality of both. Torsion
//! parts follow an eventually periodic orbit; each free coordinate follows a
//! linear recurrence obtained from the U/V decomposition.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_traits::Zero;
use serde::Serialize;

use super::uv::uv_sequences;
use super::{check_point, TorusError, TorusMap};
use crate::funcfield::RatFunc;
use crate::lrs::{LinearRecurrence, Q};
use crate::mulgroup::{group_basis, GroupBasis, IntVec};

/// Torsion orbits longer than this are refused.
pub const MAX_TORSION_ORBIT: usize = 1 << 20;

/// Γ = Γ₀ × Γ₁ with the coordinate maps into it.
#[derive(Clone, Debug)]
pub struct LogSpace {
    pub basis: GroupBasis,
}

/// Unit exponents modulo |F^*| and Γ₁-coordinates, one entry per coordinate.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LogPoint {
    pub units: Vec<u64>,
    pub coords: Vec<IntVec>,
}

impl LogSpace {
    pub fn new(generators: &[RatFunc]) -> Result<Self, TorusError> {
        Ok(LogSpace {
            basis: group_basis(generators)?,
        })
    }

    pub fn rank(&self) -> usize {
        self.basis.rank()
    }

    pub fn modulus(&self) -> u64 {
        self.basis.unit_modulus
    }

    pub fn log_point(&self, x: &[RatFunc]) -> Result<LogPoint, TorusError> {
        let mut units = Vec::with_capacity(x.len());
        let mut coords = Vec::with_capacity(x.len());
        for v in x {
            let (u, c) = self.basis.coordinates(v)?.ok_or(TorusError::OutsideGroup)?;
            units.push(u);
            coords.push(c);
        }
        Ok(LogPoint { units, coords })
    }

    /// Φ in log coordinates: L ↦ M·L + log y.
    pub fn step(&self, m: &[Vec<i64>], y: &LogPoint, x: &LogPoint) -> LogPoint {
        LogPoint {
            units: self.step_units(m, &y.units, &x.units),
            coords: step_coords(m, &y.coords, &x.coords),
        }
    }

    fn step_units(&self, m: &[Vec<i64>], y: &[u64], x: &[u64]) -> Vec<u64> {
        let n = self.modulus() as i128;
        m.iter()
            .zip(y)
            .map(|(row, &yi)| {
                let s = row.iter().zip(x).fold(yi as i128, |acc, (&e, &xk)| {
                    (acc + e as i128 * xk as i128).rem_euclid(n)
                });
                s as u64
            })
            .collect()
    }
}

fn step_coords(m: &[Vec<i64>], y: &[IntVec], x: &[IntVec]) -> Vec<IntVec> {
    m.iter()
        .zip(y)
        .map(|(row, yi)| {
            let mut out = yi.clone();
            for (&e, xk) in row.iter().zip(x) {
                if e != 0 {
                    for (o, v) in out.iter_mut().zip(xk) {
                        *o += v * e;
                    }
                }
            }
            out
        })
        .collect()
}

/// L_0 … L_{count−1} of the orbit of a by direct iteration in log space.
pub fn log_orbit(
    space: &LogSpace,
    phi: &TorusMap,
    a: &[RatFunc],
    count: usize,
) -> Result<Vec<LogPoint>, TorusError> {
    let y = space.log_point(phi.y())?;
    let mut cur = space.log_point(a)?;
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        let next = space.step(phi.m(), &y, &cur);
        out.push(std::mem::replace(&mut cur, next));
    }
    Ok(out)
}

/// {start} when step = 0, else {start, start + step, …}.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct ResidueClass {
    pub start: u64,
    pub step: u64,
}

impl ResidueClass {
    pub fn contains(&self, n: u64) -> bool {
        if self.step == 0 {
            n == self.start
        } else {
            n >= self.start && (n - self.start).is_multiple_of(self.step)
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct ResiduePairClass {
    pub n1: ResidueClass,
    pub n2: ResidueClass,
}

impl ResiduePairClass {
    pub fn contains(&self, n1: u64, n2: u64) -> bool {
        self.n1.contains(n1) && self.n2.contains(n2)
    }
}

/// The torsion parts of an orbit: states[i] for i < preperiod + period, then
/// states[n] = states[preperiod + (n − preperiod) mod period].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TorsionOrbit {
    #[serde(skip)]
    pub states: Vec<Vec<u64>>,
    pub preperiod: u64,
    pub period: u64,
}

impl TorsionOrbit {
    fn class_of(&self, i: usize) -> ResidueClass {
        if (i as u64) < self.preperiod {
            ResidueClass {
                start: i as u64,
                step: 0,
            }
        } else {
            ResidueClass {
                start: i as u64,
                step: self.period,
            }
        }
    }
}

fn torsion_orbit(
    space: &LogSpace,
    m: &[Vec<i64>],
    y: &[u64],
    start: Vec<u64>,
) -> Result<TorsionOrbit, TorusError> {
    let mut seen: HashMap<Vec<u64>, usize> = HashMap::new();
    let mut states = Vec::new();
    let mut cur = start;
    loop {
        if let Some(&mu) = seen.get(&cur) {
            let period = (states.len() - mu) as u64;
            return Ok(TorsionOrbit {
                states,
                preperiod: mu as u64,
                period,
            });
        }
        if states.len() >= MAX_TORSION_ORBIT {
            return Err(TorusError::OrbitTooLong(MAX_TORSION_ORBIT));
        }
        seen.insert(cur.clone(), states.len());
        let next = space.step_units(m, y, &cur);
        states.push(std::mem::replace(&mut cur, next));
    }
}

/// W_{n₁} = W'_{n₂} for one point coordinate and one Γ₁ basis direction.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RecurrencePair {
    pub coordinate: usize,
    pub component: usize,
    pub left: LinearRecurrence,
    pub right: LinearRecurrence,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LRSReduction {
    pub rank: usize,
    pub torsion_order: u64,
    pub torsion_constraints: Vec<ResiduePairClass>,
    /// Pairs that are identically zero on both sides are omitted.
    pub pairs: Vec<RecurrencePair>,
    pub left_torsion: TorsionOrbit,
    pub right_torsion: TorsionOrbit,
}

impl LRSReduction {
    pub fn torsion_holds(&self, n1: u64, n2: u64) -> bool {
        self.torsion_constraints.iter().any(|c| c.contains(n1, n2))
    }

    /// The reduced system at (n₁, n₂): torsion constraint and every pair.
    pub fn holds(&self, n1: u64, n2: u64) -> bool {
        self.torsion_holds(n1, n2)
            && self
                .pairs
                .iter()
                .all(|p| p.left.term(n1) == p.right.term(n2))
    }
}

/// Pairs (i, j) of orbit indices with equal torsion parts, as residue classes.
pub fn torsion_solutions(reduction: &LRSReduction) -> Vec<ResiduePairClass> {
    let (l, r) = (&reduction.left_torsion, &reduction.right_torsion);
    let mut by_state: HashMap<&Vec<u64>, Vec<usize>> = HashMap::new();
    for (j, s) in r.states.iter().enumerate() {
        by_state.entry(s).or_default().push(j);
    }
    let mut out = Vec::new();
    for (i, s) in l.states.iter().enumerate() {
        for &j in by_state.get(s).map(|v| v.as_slice()).unwrap_or(&[]) {
            out.push(ResiduePairClass {
                n1: l.class_of(i),
                n2: r.class_of(j),
            });
        }
    }
    out
}

/// Logs of (Φ⁰)^j(a) for j < d, computed from the log of a.
fn monomial_powers(space: &LogSpace, phi: &TorusMap, a: &LogPoint) -> Vec<LogPoint> {
    let d = phi.dim();
    let zero = LogPoint {
        units: vec![0; d],
        coords: vec![vec![BigInt::zero(); space.rank()]; d],
    };
    let mut out = vec![a.clone()];
    while out.len() < d {
        let next = space.step(phi.m(), &zero, out.last().unwrap());
        out.push(next);
    }
    out
}

/// Logs of y and a under (Φ⁰)^j, j < d: the data of the U/V decomposition.
struct Decomposition {
    ys: Vec<LogPoint>,
    a_pows: Vec<LogPoint>,
}

impl Decomposition {
    fn new(space: &LogSpace, phi: &TorusMap, a: &LogPoint) -> Result<Self, TorusError> {
        let y = space.log_point(phi.y())?;
        Ok(Decomposition {
            ys: monomial_powers(space, phi, &y),
            a_pows: monomial_powers(space, phi, a),
        })
    }

    /// Σ_i U_{i,n}·P_i + Σ_i V_{i,n}·(Φ⁰)^i(a) on the free coordinates, with
    /// P_{i+1} = Σ_{j ≤ i} (Φ⁰)^j(y).
    fn coords(&self, phi: &TorusMap, r: usize, n: u64) -> Vec<IntVec> {
        let d = phi.dim();
        let uv = uv_sequences(phi.m(), n);
        let mut out = vec![vec![BigInt::zero(); r]; d];
        for i in 0..d {
            for (c, row) in out.iter_mut().enumerate() {
                for (k, o) in row.iter_mut().enumerate() {
                    for y in &self.ys[..=i] {
                        *o += &uv.u[i] * &y.coords[c][k];
                    }
                    *o += &uv.v[i] * &self.a_pows[i].coords[c][k];
                }
            }
        }
        out
    }
}

/// Φ^n(a) in log coordinates from the U/V decomposition, torsion included.
pub fn decomposed_point(
    space: &LogSpace,
    phi: &TorusMap,
    a: &[RatFunc],
    n: u64,
) -> Result<LogPoint, TorusError> {
    let dec = Decomposition::new(space, phi, &space.log_point(a)?)?;
    let d = phi.dim();
    let uv = uv_sequences(phi.m(), n);
    let modulus = BigInt::from(space.modulus());
    let mut units = vec![BigInt::zero(); d];
    for i in 0..d {
        for (c, u) in units.iter_mut().enumerate() {
            for y in &dec.ys[..=i] {
                *u += &uv.u[i] * BigInt::from(y.units[c]);
            }
            *u += &uv.v[i] * BigInt::from(dec.a_pows[i].units[c]);
        }
    }
    let units = units
        .iter()
        .map(|u| {
            let r = ((u % &modulus) + &modulus) % &modulus;
            r.try_into().expect("residue below the unit modulus")
        })
        .collect();
    Ok(LogPoint {
        units,
        coords: dec.coords(phi, space.rank(), n),
    })
}

/// Free coordinates of Φ^n(a) in Γ₁ from the U/V decomposition.
pub fn decomposed_coords(
    space: &LogSpace,
    phi: &TorusMap,
    a: &[RatFunc],
    n: u64,
) -> Result<Vec<IntVec>, TorusError> {
    let dec = Decomposition::new(space, phi, &space.log_point(a)?)?;
    Ok(dec.coords(phi, space.rank(), n))
}

/// W_{c,k}(n) for n < count, indexed [c][k][n].
fn free_terms(
    space: &LogSpace,
    phi: &TorusMap,
    a: &LogPoint,
    count: usize,
) -> Result<Vec<Vec<Vec<BigInt>>>, TorusError> {
    let dec = Decomposition::new(space, phi, a)?;
    let r = space.rank();
    let mut w = vec![vec![Vec::with_capacity(count); r]; phi.dim()];
    for n in 0..count {
        for (c, row) in dec.coords(phi, r, n as u64).into_iter().enumerate() {
            for (k, x) in row.into_iter().enumerate() {
                w[c][k].push(x);
            }
        }
    }
    Ok(w)
}

/// Generators of Γ: every coordinate of (Φ₁⁰)^j(y), (Φ₂⁰)^j(z), (Φ₁⁰)^j(a),
/// (Φ₂⁰)^j(b) for j < d.
pub fn orbit_group(
    phi1: &TorusMap,
    phi2: &TorusMap,
    a: &[RatFunc],
    b: &[RatFunc],
    cap: usize,
) -> Result<LogSpace, TorusError> {
    let mut gens = Vec::new();
    for (phi, x) in [(phi1, phi1.y()), (phi2, phi2.y()), (phi1, a), (phi2, b)] {
        let mut cur = x.to_vec();
        for j in 0..phi.dim() {
            gens.extend(cur.iter().cloned());
            if j + 1 < phi.dim() {
                cur = phi.apply_monomial(&cur, cap)?;
            }
        }
    }
    LogSpace::new(&gens)
}

pub fn reduce_to_lrs(
    phi1: &TorusMap,
    phi2: &TorusMap,
    a: &[RatFunc],
    b: &[RatFunc],
    cap: usize,
) -> Result<LRSReduction, TorusError> {
    let d = phi1.dim();
    if phi2.dim() != d {
        return Err(TorusError::DimensionMismatch {
            expected: d,
            got: phi2.dim(),
        });
    }
    check_point(a, d)?;
    check_point(b, d)?;
    let space = orbit_group(phi1, phi2, a, b, cap)?;
    let la = space.log_point(a)?;
    let lb = space.log_point(b)?;
    // each W has a recurrence of order ≤ d + 1, fixed by 2(d + 1) terms
    let count = 2 * (d + 1) + 4;
    let w1 = free_terms(&space, phi1, &la, count)?;
    let w2 = free_terms(&space, phi2, &lb, count)?;
    let mut pairs = Vec::new();
    for c in 0..d {
        for k in 0..space.rank() {
            let (s1, s2) = (&w1[c][k], &w2[c][k]);
            if s1.iter().chain(s2).all(|x| x.is_zero()) {
                continue;
            }
            let fit = |s: &[BigInt]| {
                LinearRecurrence::fit_minimal(
                    &s.iter()
                        .map(|x| Q::from_integer(x.clone()))
                        .collect::<Vec<_>>(),
                )
            };
            pairs.push(RecurrencePair {
                coordinate: c,
                component: k,
                left: fit(s1)?,
                right: fit(s2)?,
            });
        }
    }
    let y1 = space.log_point(phi1.y())?;
    let y2 = space.log_point(phi2.y())?;
    let mut red = LRSReduction {
        rank: space.rank(),
        torsion_order: space.basis.torsion_order(),
        torsion_constraints: Vec::new(),
        pairs,
        left_torsion: torsion_orbit(&space, phi1.m(), &y1.units, la.units)?,
        right_torsion: torsion_orbit(&space, phi2.m(), &y2.units, lb.units)?,
    };
    red.torsion_constraints = torsion_solutions(&red);
    Ok(red)
}
