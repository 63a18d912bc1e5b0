//! Greedy structure mining for a finite point set in a planar window.
//!
//! Every accepted component covers exactly: each of its points inside the
//! window is one of the input points. Components are picked by how many
//! still-uncovered points they explain, ties going to the simpler kind.

use std::collections::{BTreeSet, HashMap, HashSet};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::exponents::{gap, growth_bound, has_vanishing_block};
use super::families::{ExponentialFamily, LinearFamily};
use super::nested::{pnested_member, ElementaryPNestedSet};
use super::pnormal::{CosetBase, PNormalComponent, PNormalSet};
use super::SetError;
use crate::lrs::Q;
use crate::mulgroup::{int_vec, IntVec, Lattice};
use crate::wire::ser_ints;

/// Components beyond this count are not fitted; the rest is reported as residual.
pub const DEFAULT_COMPONENT_CAP: usize = 16;
/// A non-singleton component must explain at least this many points.
pub const MIN_SUPPORT: usize = 3;
/// Predicted points per non-singleton component.
pub const PREDICTIONS: usize = 3;

const MAX_RATIO: i64 = 16;
const PAIR_LIMIT: usize = 300;
const PAIR_NEIGHBOURS: usize = 16;
const NESTED_COMBINE_LIMIT: usize = 32;
const NESTED_OFFSET_LIMIT: u32 = 6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Domain {
    /// [0, n₁] × [0, n₂]
    N0,
    /// [−n₁, n₁] × [−n₂, n₂]
    Z,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Window {
    pub n1: u64,
    pub n2: u64,
    pub domain: Domain,
}

impl Window {
    pub fn new(n1: u64, n2: u64, domain: Domain) -> Self {
        Window { n1, n2, domain }
    }

    fn range(&self, axis: usize) -> (i64, i64) {
        let n = if axis == 0 { self.n1 } else { self.n2 } as i64;
        match self.domain {
            Domain::N0 => (0, n),
            Domain::Z => (-n, n),
        }
    }

    pub fn contains(&self, p: &[BigInt]) -> bool {
        p.len() == 2
            && (0..2).all(|i| {
                let (lo, hi) = self.range(i);
                p[i] >= BigInt::from(lo) && p[i] <= BigInt::from(hi)
            })
    }

    fn contains_xy(&self, x: i64, y: i64) -> bool {
        let (xl, xh) = self.range(0);
        let (yl, yh) = self.range(1);
        (xl..=xh).contains(&x) && (yl..=yh).contains(&y)
    }

    /// Points allowed as predictions: in the domain, outside the window.
    fn beyond(&self, p: &[BigInt]) -> bool {
        let in_domain = match self.domain {
            Domain::N0 => p.iter().all(|x| !x.is_negative()),
            Domain::Z => true,
        };
        in_domain && !self.contains(p)
    }

    fn extent(&self) -> i64 {
        self.n1.max(self.n2) as i64
    }
}

/// Which shapes may be used.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum FitMode {
    /// Singletons, lattice cosets, linear families and elementary p-nested
    /// sets of order ≤ `order` with q a power of p.
    PNormal { p: u64, order: usize },
    /// Singletons, linear and exponential families.
    Families,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FitComponent {
    Singleton {
        #[serde(serialize_with = "ser_ints")]
        point: IntVec,
    },
    /// point + L for a rank-two lattice L.
    Coset {
        lattice: Lattice,
        #[serde(serialize_with = "ser_ints")]
        point: IntVec,
    },
    Linear {
        family: LinearFamily,
    },
    Nested {
        set: ElementaryPNestedSet,
    },
    Exponential {
        family: ExponentialFamily,
    },
}

impl FitComponent {
    /// Preference among equally good candidates; lower wins.
    fn rank(&self) -> u8 {
        match self {
            FitComponent::Singleton { .. } => 0,
            FitComponent::Coset { .. } => 1,
            FitComponent::Linear { .. } => 2,
            FitComponent::Nested { .. } => 3,
            FitComponent::Exponential { .. } => 4,
        }
    }

    /// Exact membership (nested sets decide with exponents up to 256).
    pub fn contains(&self, p: &[BigInt]) -> bool {
        match self {
            FitComponent::Singleton { point } => point.as_slice() == p,
            FitComponent::Coset { lattice, point } => {
                let diff: IntVec = p.iter().zip(point).map(|(a, b)| a - b).collect();
                lattice.contains(&diff)
            }
            FitComponent::Linear { family } => family.contains(p),
            FitComponent::Nested { set } => pnested_member(set, p, 256).is_ok_and(|m| m.is_yes()),
            FitComponent::Exponential { family } => family.contains(p),
        }
    }

    /// All points of the component inside the window, sorted.
    pub fn window_points(&self, w: &Window) -> Vec<IntVec> {
        let mut out: Vec<IntVec> = window_xy(self, w)
            .into_iter()
            .map(|(x, y)| int_vec(&[x, y]))
            .collect();
        out.sort();
        out
    }

    /// The first `count` points of the component lying beyond the window
    /// but inside its domain, walking outward along the parameter.
    pub fn predictions(&self, w: &Window, count: usize) -> Vec<IntVec> {
        let mut out: Vec<IntVec> = Vec::new();
        let push = |p: IntVec, out: &mut Vec<IntVec>| {
            if w.beyond(&p) && !out.contains(&p) {
                out.push(p);
            }
        };
        match self {
            FitComponent::Singleton { .. } => {}
            FitComponent::Linear { family } => {
                // forward in t stays in N₀² only with both direction entries ≥ 0
                if w.domain == Domain::N0 && family.b().is_negative() {
                    return out;
                }
                let last = window_xy(self, w)
                    .iter()
                    .filter_map(|&(x, y)| family.parameter(&int_vec(&[x, y])))
                    .max()
                    .unwrap_or_else(BigInt::zero);
                let mut t = last + 1;
                while out.len() < count {
                    push(family.point(&t), &mut out);
                    t += 1;
                }
            }
            FitComponent::Coset { lattice, point } => {
                let v = &lattice.basis()[0];
                let mut p = point.clone();
                for _ in 0..(4 * w.extent() + 4 * count as i64 + 8) {
                    if out.len() == count {
                        break;
                    }
                    p = p.iter().zip(v).map(|(a, b)| a + b).collect();
                    push(p.clone(), &mut out);
                }
            }
            FitComponent::Nested { set } => {
                let k = set.order();
                let mut m = 0u64;
                while out.len() < count && m < 256 {
                    push(set.point(&vec![m; k]), &mut out);
                    for i in 0..k {
                        let mut f = vec![0; k];
                        f[i] = m;
                        push(set.point(&f), &mut out);
                    }
                    m += 1;
                }
                out.truncate(count);
            }
            FitComponent::Exponential { family } => {
                // a family leaving the domain never yields a prediction
                let mut s = 1;
                while out.len() < count && s < 128 {
                    push(family.point(s), &mut out);
                    s += 1;
                }
            }
        }
        out
    }
}

fn to_i64(v: &BigInt) -> Option<i64> {
    v.to_i64()
}

fn window_xy(c: &FitComponent, w: &Window) -> Vec<(i64, i64)> {
    let (xl, xh) = w.range(0);
    let (yl, yh) = w.range(1);
    let mut out = Vec::new();
    match c {
        FitComponent::Singleton { point } => {
            if let (Some(x), Some(y)) = (to_i64(&point[0]), to_i64(&point[1])) {
                if w.contains_xy(x, y) {
                    out.push((x, y));
                }
            }
        }
        FitComponent::Linear { family } => {
            let (Some(a), Some(b), Some(c0), Some(d0)) = (
                to_i64(family.a()),
                to_i64(family.b()),
                to_i64(family.c()),
                to_i64(family.d()),
            ) else {
                return out;
            };
            let (tl, th) = if a != 0 {
                (
                    Integer::div_ceil(&(xl - c0), &a),
                    Integer::div_floor(&(xh - c0), &a),
                )
            } else if (xl..=xh).contains(&c0) {
                let (l, h) = (
                    Integer::div_ceil(&(yl - d0), &b),
                    Integer::div_floor(&(yh - d0), &b),
                );
                (l.min(h), l.max(h))
            } else {
                return out;
            };
            for t in tl..=th {
                let (x, y) = (a * t + c0, b * t + d0);
                if w.contains_xy(x, y) {
                    out.push((x, y));
                }
            }
        }
        FitComponent::Coset { lattice, point } => {
            let basis = lattice.basis();
            let (Some(a), Some(b), Some(d), Some(px), Some(py)) = (
                to_i64(&basis[0][0]),
                to_i64(&basis[0][1]),
                to_i64(&basis[1][1]),
                to_i64(&point[0]),
                to_i64(&point[1]),
            ) else {
                return out;
            };
            for x in xl..=xh {
                if (x - px).rem_euclid(a) != 0 {
                    continue;
                }
                let t = (x - px) / a;
                let base = py + b * t;
                let mut y = yl + (base - yl).rem_euclid(d);
                while y <= yh {
                    out.push((x, y));
                    y += d;
                }
            }
        }
        FitComponent::Nested { set } => {
            let den = set.denominator();
            let qb = BigInt::from(set.q());
            let terms: Vec<IntVec> = set
                .cs()
                .iter()
                .map(|c| {
                    c.iter()
                        .map(|x| (x * Q::from_integer(den.clone())).to_integer())
                        .collect()
                })
                .collect();
            let g = gap(&qb, &terms);
            if has_vanishing_block(&qb, &terms, g) {
                return out;
            }
            let c0max = set
                .c0()
                .iter()
                .map(|x| x.abs().ceil().to_integer())
                .max()
                .unwrap_or_else(BigInt::zero);
            let target = vec![(c0max + BigInt::from(w.extent())) * &den];
            let cap = growth_bound(&qb, &target, terms.len(), g);
            for p in set.points_within(cap) {
                if let (Some(x), Some(y)) = (to_i64(&p[0]), to_i64(&p[1])) {
                    if w.contains_xy(x, y) {
                        out.push((x, y));
                    }
                }
            }
        }
        FitComponent::Exponential { family } => {
            let (lo, hi) = w.range(if family.is_transposed() { 1 } else { 0 });
            let bound =
                Q::from_integer(BigInt::from(lo.abs().max(hi.abs()))) + family.gamma().abs();
            let a = family.x_coeff().abs();
            let mut xs = Q::from_integer(family.xi().clone());
            for s in 1..4096u64 {
                if &a * &xs > bound {
                    break;
                }
                let p = family.point(s);
                if let (Some(x), Some(y)) = (to_i64(&p[0]), to_i64(&p[1])) {
                    if w.contains_xy(x, y) {
                        out.push((x, y));
                    }
                }
                xs *= Q::from_integer(family.xi().clone());
            }
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Prediction {
    pub component: usize,
    #[serde(serialize_with = "ser_ints")]
    pub point: IntVec,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FitResult {
    pub components: Vec<FitComponent>,
    #[serde(serialize_with = "crate::wire::ser_int_rows")]
    pub residual: Vec<IntVec>,
    pub predictions: Vec<Prediction>,
    /// True when the component cap stopped the fit before every point was explained.
    pub saturated: bool,
}

impl FitResult {
    /// The fit as a p-normal set; None if it uses an exponential family.
    pub fn pnormal(&self) -> Option<PNormalSet> {
        let comps = self
            .components
            .iter()
            .map(|c| match c {
                FitComponent::Singleton { point } => Some(PNormalComponent::Singleton {
                    point: point.clone(),
                }),
                FitComponent::Coset { lattice, point } => Some(PNormalComponent::Coset {
                    lattice: lattice.clone(),
                    base: CosetBase::Point {
                        point: point.clone(),
                    },
                }),
                FitComponent::Linear { family } => Some(PNormalComponent::Coset {
                    lattice: Lattice::new(2, vec![vec![family.a().clone(), family.b().clone()]])
                        .ok()?,
                    base: CosetBase::Point {
                        point: family.point(&BigInt::zero()),
                    },
                }),
                FitComponent::Nested { set } => Some(PNormalComponent::Coset {
                    lattice: Lattice::trivial(2),
                    base: CosetBase::Nested { set: set.clone() },
                }),
                FitComponent::Exponential { .. } => None,
            })
            .collect::<Option<Vec<_>>>()?;
        PNormalSet::new(2, comps).ok()
    }
}

type Pt = (i64, i64);

struct Candidate {
    component: FitComponent,
    covers: Vec<Pt>,
}

/// Exact-cover check and coverage of the still-unexplained points.
fn evaluate(
    c: FitComponent,
    all: &HashSet<Pt>,
    remaining: &BTreeSet<Pt>,
    w: &Window,
) -> Option<Candidate> {
    let pts = window_xy(&c, w);
    if !pts.iter().all(|p| all.contains(p)) {
        return None;
    }
    let covers: Vec<Pt> = pts.into_iter().filter(|p| remaining.contains(p)).collect();
    (covers.len() >= MIN_SUPPORT).then_some(Candidate {
        component: c,
        covers,
    })
}

fn pairs(pts: &[Pt]) -> Vec<(Pt, Pt)> {
    let mut out = Vec::new();
    for i in 0..pts.len() {
        let reach = if pts.len() <= PAIR_LIMIT {
            pts.len()
        } else {
            (i + 1 + PAIR_NEIGHBOURS).min(pts.len())
        };
        for j in i + 1..reach {
            out.push((pts[i], pts[j]));
        }
    }
    out
}

fn divisors(n: i64) -> Vec<i64> {
    (1..=n).filter(|d| n % d == 0).collect()
}

fn linear_candidates(pts: &[Pt]) -> BTreeSet<LinearFamily> {
    let mut out = BTreeSet::new();
    for ((px, py), (qx, qy)) in pairs(pts) {
        let (dx, dy) = (qx - px, qy - py);
        let g = dx.gcd(&dy);
        for k in divisors(g) {
            if let Ok(f) = LinearFamily::from_i64(dx / k, dy / k, px, py) {
                out.insert(f);
            }
        }
    }
    out
}

/// Hermite basis (a, b), (0, d) of the lattice spanned by u and v.
fn hermite2(u: Pt, v: Pt) -> Option<(i64, i64, i64)> {
    let det = u.0 * v.1 - u.1 * v.0;
    if det == 0 {
        return None;
    }
    let e = u.0.extended_gcd(&v.0);
    let (mut a, mut b) = (e.gcd, e.x * u.1 + e.y * v.1);
    if a < 0 {
        a = -a;
        b = -b;
    }
    let d = det.abs() / a;
    Some((a, b.rem_euclid(d), d))
}

fn coset_candidates(pts: &[Pt]) -> BTreeSet<(i64, i64, i64, i64, i64)> {
    let mut out = BTreeSet::new();
    for &p in pts {
        let mut near: Vec<Pt> = pts.iter().filter(|&&q| q != p).copied().collect();
        near.sort_by_key(|q| ((q.0 - p.0).abs() + (q.1 - p.1).abs(), *q));
        near.truncate(4);
        let diffs: Vec<Pt> = near.iter().map(|q| (q.0 - p.0, q.1 - p.1)).collect();
        for i in 0..diffs.len() {
            for j in i + 1..diffs.len() {
                if let Some((a, b, d)) = hermite2(diffs[i], diffs[j]) {
                    // base point reduced modulo the lattice
                    let t = p.0.div_euclid(a);
                    let (x, y) = (p.0 - a * t, (p.1 - b * t).rem_euclid(d));
                    out.insert((a, b, d, x, y));
                }
            }
        }
    }
    out
}

fn q_of(x: Pt) -> Vec<Q> {
    vec![Q::from_integer(x.0.into()), Q::from_integer(x.1.into())]
}

/// Order-one sets c₀ + c₁q^f through geometric triples P, Q, R with
/// R − Q = q(Q − P), re-based downward while the presentation stays integral
/// and the window cover stays exact.
fn nested_order1(
    pts: &[Pt],
    all: &HashSet<Pt>,
    remaining: &BTreeSet<Pt>,
    p: u64,
    w: &Window,
) -> Vec<Candidate> {
    let mut qs = Vec::new();
    let mut q = p;
    while q as i64 <= 2 * w.extent() + 1 {
        qs.push(q);
        q *= p;
    }
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for &a in pts {
        for &b in pts {
            if a == b {
                continue;
            }
            for &q in &qs {
                let qi = q as i64;
                let r = (b.0 + qi * (b.0 - a.0), b.1 + qi * (b.1 - a.1));
                if !all.contains(&r) {
                    continue;
                }
                let qm1 = Q::from_integer((qi - 1).into());
                let mut c1: Vec<Q> = q_of((b.0 - a.0, b.1 - a.1))
                    .into_iter()
                    .map(|x| x / &qm1)
                    .collect();
                let c0: Vec<Q> = q_of(a).into_iter().zip(&c1).map(|(x, c)| x - c).collect();
                let Ok(mut best) = ElementaryPNestedSet::new(p, q, c0.clone(), vec![c1.clone()])
                else {
                    continue;
                };
                // S(c₀; c₁/q) ⊇ S(c₀; c₁): one more point below
                let qq = Q::from_integer(q.into());
                for _ in 0..64 {
                    let n1: Vec<Q> = c1.iter().map(|x| x / &qq).collect();
                    let Ok(s) = ElementaryPNestedSet::new(p, q, c0.clone(), vec![n1.clone()])
                    else {
                        break;
                    };
                    if !window_xy(&FitComponent::Nested { set: s.clone() }, w)
                        .iter()
                        .all(|x| all.contains(x))
                    {
                        break;
                    }
                    best = s;
                    c1 = n1;
                }
                if seen.insert(best.clone()) {
                    if let Some(c) = evaluate(FitComponent::Nested { set: best }, all, remaining, w)
                    {
                        out.push(c);
                    }
                }
            }
        }
    }
    out
}

/// Order-two sets from two order-one pieces S(a₀; a₁), S(b₀; b₁) sharing q:
/// fixing f₂ = g or f₁ = f in S(c₀; a₁, b₁) gives the pieces when
/// c₀ = a₀ − b₁q^g = b₀ − a₁q^f.
fn nested_order2(
    pieces: &[Candidate],
    all: &HashSet<Pt>,
    remaining: &BTreeSet<Pt>,
    p: u64,
    w: &Window,
) -> Vec<Candidate> {
    let sets: Vec<&ElementaryPNestedSet> = pieces
        .iter()
        .filter_map(|c| match &c.component {
            FitComponent::Nested { set } if set.order() == 1 => Some(set),
            _ => None,
        })
        .take(NESTED_COMBINE_LIMIT)
        .collect();
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for (i, s1) in sets.iter().enumerate() {
        for s2 in &sets[i + 1..] {
            if s1.q() != s2.q() || s1.cs()[0] == s2.cs()[0] {
                continue;
            }
            let qb = Q::from_integer(s1.q().into());
            let (a0, a1, b0, b1) = (s1.c0(), &s1.cs()[0], s2.c0(), &s2.cs()[0]);
            for f in 0..=NESTED_OFFSET_LIMIT {
                for g in 0..=NESTED_OFFSET_LIMIT {
                    let (qf, qg) = (
                        num_traits::pow(qb.clone(), f as usize),
                        num_traits::pow(qb.clone(), g as usize),
                    );
                    let left: Vec<Q> = a0.iter().zip(b1).map(|(x, y)| x - y * &qg).collect();
                    let right: Vec<Q> = b0.iter().zip(a1).map(|(x, y)| x - y * &qf).collect();
                    if left != right {
                        continue;
                    }
                    let Ok(set) =
                        ElementaryPNestedSet::new(p, s1.q(), left, vec![a1.clone(), b1.clone()])
                    else {
                        continue;
                    };
                    if seen.insert(set.clone()) {
                        if let Some(c) = evaluate(FitComponent::Nested { set }, all, remaining, w) {
                            out.push(c);
                        }
                    }
                }
            }
        }
    }
    out
}

fn gcd_q(a: &Q, b: &Q) -> Q {
    let n = (a.numer() * b.denom()).gcd(&(b.numer() * a.denom()));
    Q::new(n, a.denom() * b.denom())
}

/// Exponential families through P = x(1), Q = x(2), R = x(3): the x-steps
/// grow by ξ, which predicts R's first coordinate; the y-steps then fix
/// bcξ (second difference) and η. The family is then extended to smaller
/// s while it stays integral and exact.
fn exponential_candidates(
    pts: &[Pt],
    all: &HashSet<Pt>,
    remaining: &BTreeSet<Pt>,
    w: &Window,
) -> Vec<Candidate> {
    let mut by_x: HashMap<i64, Vec<i64>> = HashMap::new();
    for &(x, y) in all {
        by_x.entry(x).or_default().push(y);
    }
    let mut seen: Vec<ExponentialFamily> = Vec::new();
    let mut out = Vec::new();
    for &a in pts {
        for &b in pts {
            let dx = b.0 - a.0;
            if dx == 0 {
                continue;
            }
            for xi in 2..=MAX_RATIO {
                let rx = b.0 + xi * dx;
                let Some(ys) = by_x.get(&rx) else { continue };
                for &ry in ys {
                    let (dy1, dy2) = (b.1 - a.1, ry - b.1);
                    let xq = Q::from_integer(xi.into());
                    let m1 = &xq - Q::one();
                    // bcξ(ξ − 1)² = dy₂ − dy₁
                    let bx = Q::from_integer((dy2 - dy1).into()) / (&m1 * &m1);
                    let eta = Q::from_integer(dy1.into()) - &bx * &m1;
                    if !eta.is_integer() || eta.is_zero() {
                        continue;
                    }
                    let ax = Q::from_integer(dx.into()) / &m1;
                    let big_a = &ax / &xq;
                    let big_b = &bx / &xq;
                    let gamma = Q::from_integer(a.0.into()) - &ax;
                    let mu = Q::from_integer(a.1.into()) - &bx - &eta;
                    let (c, ai, bi) = if big_b.is_zero() {
                        (big_a.clone(), BigInt::one(), BigInt::zero())
                    } else {
                        let c = gcd_q(&big_a, &big_b);
                        (
                            (c.clone()),
                            (&big_a / &c).to_integer(),
                            (&big_b / &c).to_integer(),
                        )
                    };
                    let eta = eta.to_integer();
                    let Ok(mut fam) = ExponentialFamily::new(
                        xi.into(),
                        ai.clone(),
                        bi.clone(),
                        eta.clone(),
                        c.clone(),
                        gamma.clone(),
                        mu.clone(),
                    ) else {
                        continue;
                    };
                    let comp = FitComponent::Exponential {
                        family: fam.clone(),
                    };
                    if !window_xy(&comp, w).iter().all(|p| all.contains(p)) {
                        continue;
                    }
                    // starting one step earlier, f'(s) = f(s − 1): c ↦ c/ξ, μ ↦ μ − η
                    let (mut c, mut mu) = (c, mu);
                    for _ in 0..64 {
                        let (nc, nmu) = (&c / &xq, &mu - Q::from_integer(eta.clone()));
                        let Ok(f) = ExponentialFamily::new(
                            xi.into(),
                            ai.clone(),
                            bi.clone(),
                            eta.clone(),
                            nc.clone(),
                            gamma.clone(),
                            nmu.clone(),
                        ) else {
                            break;
                        };
                        if !window_xy(&FitComponent::Exponential { family: f.clone() }, w)
                            .iter()
                            .all(|p| all.contains(p))
                        {
                            break;
                        }
                        fam = f;
                        c = nc;
                        mu = nmu;
                    }
                    if seen.contains(&fam) {
                        continue;
                    }
                    seen.push(fam.clone());
                    if let Some(c) =
                        evaluate(FitComponent::Exponential { family: fam }, all, remaining, w)
                    {
                        out.push(c);
                    }
                }
            }
        }
    }
    out
}

fn swap(p: Pt) -> Pt {
    (p.1, p.0)
}

fn candidates(
    all: &HashSet<Pt>,
    remaining: &BTreeSet<Pt>,
    mode: FitMode,
    w: &Window,
) -> Vec<Candidate> {
    let pts: Vec<Pt> = remaining.iter().copied().collect();
    let mut out: Vec<Candidate> = linear_candidates(&pts)
        .into_iter()
        .filter_map(|f| evaluate(FitComponent::Linear { family: f }, all, remaining, w))
        .collect();
    match mode {
        FitMode::PNormal { p, order } => {
            for (a, b, d, x, y) in coset_candidates(&pts) {
                let Ok(lattice) = Lattice::from_i64(2, &[vec![a, b], vec![0, d]]) else {
                    continue;
                };
                if let Some(c) = evaluate(
                    FitComponent::Coset {
                        lattice,
                        point: int_vec(&[x, y]),
                    },
                    all,
                    remaining,
                    w,
                ) {
                    out.push(c);
                }
            }
            if order >= 1 && p >= 2 {
                let mut ones = nested_order1(&pts, all, remaining, p, w);
                if order >= 2 {
                    ones.sort_by_key(|c| std::cmp::Reverse(c.covers.len()));
                    let twos = nested_order2(&ones, all, remaining, p, w);
                    out.extend(twos);
                }
                out.extend(ones);
            }
        }
        FitMode::Families => {
            out.extend(exponential_candidates(&pts, all, remaining, w));
            // the same search with the coordinates exchanged
            let sall: HashSet<Pt> = all.iter().map(|&p| swap(p)).collect();
            let srem: BTreeSet<Pt> = remaining.iter().map(|&p| swap(p)).collect();
            let spts: Vec<Pt> = srem.iter().copied().collect();
            let sw = Window::new(w.n2, w.n1, w.domain);
            for c in exponential_candidates(&spts, &sall, &srem, &sw) {
                if let FitComponent::Exponential { family } = c.component {
                    let covers = c.covers.into_iter().map(swap).collect();
                    out.push(Candidate {
                        component: FitComponent::Exponential {
                            family: family.transpose(),
                        },
                        covers,
                    });
                }
            }
        }
    }
    out
}

/// Greedy fit of `points` (all solutions inside `window`) by the shapes of
/// `mode`, with at most `component_cap` components.
pub fn fit_structure(
    points: &[IntVec],
    mode: FitMode,
    window: Window,
    component_cap: usize,
) -> Result<FitResult, SetError> {
    let mut all = HashSet::new();
    for p in points {
        if p.len() != 2 {
            return Err(SetError::DimensionMismatch {
                expected: 2,
                got: p.len(),
            });
        }
        if !window.contains(p) {
            return Err(SetError::Invalid(format!(
                "point ({}, {}) lies outside the window",
                p[0], p[1]
            )));
        }
        all.insert((
            p[0].to_i64().expect("window coordinate"),
            p[1].to_i64().expect("window coordinate"),
        ));
    }
    let mut remaining: BTreeSet<Pt> = all.iter().copied().collect();
    let mut components = Vec::new();
    let mut saturated = false;
    while !remaining.is_empty() {
        if components.len() == component_cap {
            saturated = true;
            break;
        }
        let mut cands = candidates(&all, &remaining, mode, &window);
        // most points explained, then the simpler kind, then the smaller description
        let best = cands
            .drain(..)
            .map(|c| {
                let key = (
                    std::cmp::Reverse(c.covers.len()),
                    c.component.rank(),
                    format!("{:?}", c.component),
                );
                (key, c)
            })
            .min_by(|a, b| a.0.cmp(&b.0));
        match best {
            Some((_, c)) => {
                for p in &c.covers {
                    remaining.remove(p);
                }
                components.push(c.component);
            }
            None => {
                let p = *remaining.iter().next().expect("nonempty");
                remaining.remove(&p);
                components.push(FitComponent::Singleton {
                    point: int_vec(&[p.0, p.1]),
                });
            }
        }
    }
    let predictions = components
        .iter()
        .enumerate()
        .flat_map(|(i, c)| {
            c.predictions(&window, PREDICTIONS)
                .into_iter()
                .map(move |point| Prediction {
                    component: i,
                    point,
                })
        })
        .collect();
    Ok(FitResult {
        components,
        residual: remaining
            .into_iter()
            .map(|(x, y)| int_vec(&[x, y]))
            .collect(),
        predictions,
        saturated,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lrs::q;

    fn pts(v: &[(i64, i64)]) -> Vec<IntVec> {
        v.iter().map(|&(x, y)| int_vec(&[x, y])).collect()
    }

    fn w(n: u64) -> Window {
        Window::new(n, n, Domain::N0)
    }

    #[test]
    fn diagonal_powers() {
        for p in [2u64, 3] {
            let mut v = Vec::new();
            let mut x = 1;
            while x <= 100 {
                v.push((x, x));
                x *= p as i64;
            }
            let r = fit_structure(
                &pts(&v),
                FitMode::PNormal { p, order: 1 },
                w(100),
                DEFAULT_COMPONENT_CAP,
            )
            .unwrap();
            let want = ElementaryPNestedSet::from_ints(p, p, &[0, 0], &[vec![1, 1]]).unwrap();
            assert_eq!(r.components, vec![FitComponent::Nested { set: want }]);
            let x = v.last().unwrap().0 * p as i64;
            let next: Vec<IntVec> = r.predictions.iter().map(|p| p.point.clone()).collect();
            assert_eq!(
                next,
                pts(&[
                    (x, x),
                    (x * p as i64, x * p as i64),
                    (x * (p * p) as i64, x * (p * p) as i64)
                ])
            );
            assert!(r.residual.is_empty() && !r.saturated);
            assert!(r.pnormal().is_some());
        }
    }

    #[test]
    fn linear_family() {
        let r =
            fit_structure(&pts(&[(0, 0), (2, 1), (4, 2)]), FitMode::Families, w(5), 16).unwrap();
        assert_eq!(
            r.components,
            vec![FitComponent::Linear {
                family: LinearFamily::from_i64(2, 1, 0, 0).unwrap()
            }]
        );
        assert_eq!(
            r.predictions
                .iter()
                .map(|p| p.point.clone())
                .collect::<Vec<_>>(),
            pts(&[(6, 3), (8, 4), (10, 5)])
        );
    }

    #[test]
    fn empty_input() {
        let r = fit_structure(&[], FitMode::Families, w(10), 16).unwrap();
        assert!(r.components.is_empty() && r.residual.is_empty() && r.predictions.is_empty());
    }

    #[test]
    fn powers_against_exponents() {
        // (2^m, m) for 2^m ≤ 200
        let v: Vec<(i64, i64)> = (0..8).map(|m| (1 << m, m)).collect();
        let r = fit_structure(&pts(&v), FitMode::Families, w(200), 16).unwrap();
        let want = ExponentialFamily::new(
            2.into(),
            1.into(),
            0.into(),
            1.into(),
            Q::new(1.into(), 2.into()),
            q(0),
            q(-1),
        )
        .unwrap();
        assert_eq!(
            r.components,
            vec![FitComponent::Exponential { family: want }]
        );
        assert_eq!(r.predictions[0].point, int_vec(&[256, 8]));
        // and transposed
        let t: Vec<(i64, i64)> = v.iter().map(|&(x, y)| (y, x)).collect();
        let r = fit_structure(&pts(&t), FitMode::Families, w(200), 16).unwrap();
        assert!(
            matches!(&r.components[..], [FitComponent::Exponential { family }] if family.is_transposed())
        );
    }

    #[test]
    fn cosets_and_order_two() {
        // odd-odd points in [0, 9]²
        let v: Vec<(i64, i64)> = (0..5)
            .flat_map(|i| (0..5).map(move |j| (2 * i + 1, 2 * j + 1)))
            .collect();
        let r = fit_structure(&pts(&v), FitMode::PNormal { p: 2, order: 1 }, w(9), 16).unwrap();
        assert_eq!(r.components.len(), 1);
        assert!(matches!(r.components[0], FitComponent::Coset { .. }));
        // {(2^a, 2^b)} needs order two
        let v: Vec<(i64, i64)> = (0..7)
            .flat_map(|a| (0..7).map(move |b| (1 << a, 1 << b)))
            .collect();
        let r = fit_structure(&pts(&v), FitMode::PNormal { p: 2, order: 2 }, w(64), 16).unwrap();
        assert_eq!(r.components.len(), 1, "{:?}", r.components);
        assert!(matches!(&r.components[0], FitComponent::Nested { set } if set.order() == 2));
    }

    #[test]
    fn saturation() {
        let v: Vec<(i64, i64)> = (0..5).map(|i| (i * i * 7 % 31, i * 3 % 11)).collect();
        let r = fit_structure(&pts(&v), FitMode::Families, w(40), 2).unwrap();
        assert!(r.saturated && !r.residual.is_empty());
        let mut seen: BTreeSet<IntVec> = r.residual.iter().cloned().collect();
        for c in &r.components {
            seen.extend(c.window_points(&w(40)));
        }
        assert_eq!(seen, pts(&v).into_iter().collect());
    }
}
