//! One-parameter families in Z²: linear {(at + c, bt + d) : t ∈ Z} and
//! exponential {(acξ^s + γ, bcξ^s + ηs + μ) : s ≥ 1}, with exact pairwise
//! intersections.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use super::exponents::pow;
use super::SetError;
use crate::lrs::Q;
use crate::mulgroup::IntVec;
use crate::wire::{ser_int, ser_int_rows, ser_rat};

/// (at + c, bt + d) for t ∈ Z. Normalized: the first nonzero of (a, b) is
/// positive and the base point has c ∈ [0, a) (or d ∈ [0, b) when a = 0).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct LinearFamily {
    #[serde(serialize_with = "ser_int")]
    a: BigInt,
    #[serde(serialize_with = "ser_int")]
    b: BigInt,
    #[serde(serialize_with = "ser_int")]
    c: BigInt,
    #[serde(serialize_with = "ser_int")]
    d: BigInt,
}

impl LinearFamily {
    pub fn new(a: BigInt, b: BigInt, c: BigInt, d: BigInt) -> Result<Self, SetError> {
        if a.is_zero() && b.is_zero() {
            return Err(SetError::Invalid(
                "linear family needs a nonzero direction".into(),
            ));
        }
        let (a, b) = if a.is_negative() || (a.is_zero() && b.is_negative()) {
            (-a, -b)
        } else {
            (a, b)
        };
        let t0 = if a.is_zero() {
            d.div_floor(&b)
        } else {
            c.div_floor(&a)
        };
        let c = c - &a * &t0;
        let d = d - &b * &t0;
        Ok(LinearFamily { a, b, c, d })
    }

    pub fn from_i64(a: i64, b: i64, c: i64, d: i64) -> Result<Self, SetError> {
        Self::new(a.into(), b.into(), c.into(), d.into())
    }

    pub fn a(&self) -> &BigInt {
        &self.a
    }
    pub fn b(&self) -> &BigInt {
        &self.b
    }
    pub fn c(&self) -> &BigInt {
        &self.c
    }
    pub fn d(&self) -> &BigInt {
        &self.d
    }

    pub fn point(&self, t: &BigInt) -> IntVec {
        vec![&self.a * t + &self.c, &self.b * t + &self.d]
    }

    /// The t with point(t) = p, if any.
    pub fn parameter(&self, p: &[BigInt]) -> Option<BigInt> {
        let (x, y) = (&p[0], &p[1]);
        let t = if self.a.is_zero() {
            if x != &self.c {
                return None;
            }
            let (t, r) = (y - &self.d).div_rem(&self.b);
            if !r.is_zero() {
                return None;
            }
            t
        } else {
            let (t, r) = (x - &self.c).div_rem(&self.a);
            if !r.is_zero() {
                return None;
            }
            t
        };
        (self.point(&t)[1] == *y).then_some(t)
    }

    pub fn contains(&self, p: &[BigInt]) -> bool {
        p.len() == 2 && self.parameter(p).is_some()
    }

    /// Same set with the coordinates exchanged.
    pub fn swapped(&self) -> Self {
        Self::new(
            self.b.clone(),
            self.a.clone(),
            self.d.clone(),
            self.c.clone(),
        )
        .expect("direction stays nonzero")
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LinearIntersection {
    Empty,
    Singleton {
        #[serde(serialize_with = "crate::wire::ser_ints")]
        point: IntVec,
    },
    Family {
        family: LinearFamily,
    },
}

/// Exact intersection: a unique rational crossing when the directions are
/// independent, otherwise a congruence k₁t₁ − k₂t₂ = m along the common
/// primitive direction, solved with the lcm step.
pub fn linear_intersect(f1: &LinearFamily, f2: &LinearFamily) -> LinearIntersection {
    let dc = &f2.c - &f1.c;
    let dd = &f2.d - &f1.d;
    let det = &f2.a * &f1.b - &f1.a * &f2.b;
    if !det.is_zero() {
        // a₁t₁ − a₂t₂ = dc, b₁t₁ − b₂t₂ = dd
        let n1 = &f2.a * &dd - &f2.b * &dc;
        let n2 = &f1.a * &dd - &f1.b * &dc;
        let (t1, r1) = n1.div_rem(&det);
        let (_, r2) = n2.div_rem(&det);
        if r1.is_zero() && r2.is_zero() {
            return LinearIntersection::Singleton {
                point: f1.point(&t1),
            };
        }
        return LinearIntersection::Empty;
    }
    let g1 = f1.a.gcd(&f1.b);
    let g2 = f2.a.gcd(&f2.b);
    let (wa, wb) = (&f1.a / &g1, &f1.b / &g1);
    // Δ must be a multiple of the primitive direction
    let m = if wa.is_zero() {
        if !dc.is_zero() || !dd.is_multiple_of(&wb) {
            return LinearIntersection::Empty;
        }
        &dd / &wb
    } else {
        if !dc.is_multiple_of(&wa) {
            return LinearIntersection::Empty;
        }
        let m = &dc / &wa;
        if &m * &wb != dd {
            return LinearIntersection::Empty;
        }
        m
    };
    let e = g1.extended_gcd(&g2);
    if !m.is_multiple_of(&e.gcd) {
        return LinearIntersection::Empty;
    }
    let t1 = &e.x * (&m / &e.gcd);
    let base = f1.point(&t1);
    let step = g1.lcm(&g2);
    LinearIntersection::Family {
        family: LinearFamily::new(&wa * &step, &wb * &step, base[0].clone(), base[1].clone())
            .expect("nonzero step"),
    }
}

/// x(s) = acξ^s + γ, y(s) = bcξ^s + ηs + μ for s ≥ 1; `transposed` exchanges
/// the two coordinates. b = 0 is allowed (y linear in s).
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct ExponentialFamily {
    #[serde(serialize_with = "ser_int")]
    xi: BigInt,
    #[serde(serialize_with = "ser_int")]
    a: BigInt,
    #[serde(serialize_with = "ser_int")]
    b: BigInt,
    #[serde(serialize_with = "ser_int")]
    eta: BigInt,
    #[serde(serialize_with = "ser_rat")]
    c: Q,
    #[serde(serialize_with = "ser_rat")]
    gamma: Q,
    #[serde(serialize_with = "ser_rat")]
    mu: Q,
    #[serde(skip_serializing_if = "std::ops::Not::not")]
    transposed: bool,
}

impl ExponentialFamily {
    /// Integer-valued for all s ≥ 1 iff the values at s = 1 and the first
    /// differences acξ(ξ−1), bcξ(ξ−1) are integers (η is).
    pub fn new(
        xi: BigInt,
        a: BigInt,
        b: BigInt,
        eta: BigInt,
        c: Q,
        gamma: Q,
        mu: Q,
    ) -> Result<Self, SetError> {
        if xi <= BigInt::one() || a.is_zero() || eta.is_zero() || c.is_zero() {
            return Err(SetError::Invalid(
                "exponential family needs ξ > 1 and nonzero a, η, c".into(),
            ));
        }
        let f = ExponentialFamily {
            xi,
            a,
            b,
            eta,
            c,
            gamma,
            mu,
            transposed: false,
        };
        let step = Q::from_integer(&f.xi * (&f.xi - 1u32));
        let ok = [f.x_coeff() * &step, f.y_coeff() * &step]
            .iter()
            .all(|v| v.is_integer())
            && f.value(1).iter().all(|v| v.is_integer());
        if !ok {
            return Err(SetError::Invalid(
                "exponential family is not integer-valued".into(),
            ));
        }
        Ok(f)
    }

    pub fn xi(&self) -> &BigInt {
        &self.xi
    }
    pub fn a(&self) -> &BigInt {
        &self.a
    }
    pub fn b(&self) -> &BigInt {
        &self.b
    }
    pub fn eta(&self) -> &BigInt {
        &self.eta
    }
    pub fn c(&self) -> &Q {
        &self.c
    }
    pub fn gamma(&self) -> &Q {
        &self.gamma
    }
    pub fn mu(&self) -> &Q {
        &self.mu
    }
    pub fn is_transposed(&self) -> bool {
        self.transposed
    }

    /// The same family with coordinates exchanged.
    pub fn transpose(&self) -> Self {
        let mut f = self.clone();
        f.transposed = !f.transposed;
        f
    }

    /// ac, the coefficient of ξ^s in the exponential coordinate.
    pub fn x_coeff(&self) -> Q {
        &self.c * Q::from_integer(self.a.clone())
    }

    /// bc, the coefficient of ξ^s in the mixed coordinate.
    pub fn y_coeff(&self) -> Q {
        &self.c * Q::from_integer(self.b.clone())
    }

    /// (x(s), y(s)) before transposition.
    fn value(&self, s: u64) -> [Q; 2] {
        let xs = Q::from_integer(pow(&self.xi, s));
        let sq = Q::from_integer(s.into());
        [
            self.x_coeff() * &xs + &self.gamma,
            self.y_coeff() * &xs + sq * Q::from_integer(self.eta.clone()) + &self.mu,
        ]
    }

    pub fn point(&self, s: u64) -> IntVec {
        let [x, y] = self.value(s);
        let (x, y) = (x.to_integer(), y.to_integer());
        if self.transposed {
            vec![y, x]
        } else {
            vec![x, y]
        }
    }

    /// The s ≥ 1 with point(s) = p, if any.
    pub fn parameter(&self, p: &[BigInt]) -> Option<u64> {
        if p.len() != 2 {
            return None;
        }
        let x = if self.transposed { &p[1] } else { &p[0] };
        let v = (Q::from_integer(x.clone()) - &self.gamma) / self.x_coeff();
        if !v.is_integer() {
            return None;
        }
        let s = exact_log(&self.xi, &v.to_integer())?;
        (s >= 1 && self.point(s).as_slice() == p).then_some(s)
    }

    pub fn contains(&self, p: &[BigInt]) -> bool {
        self.parameter(p).is_some()
    }
}

/// e with base^e = v, for base > 1.
fn exact_log(base: &BigInt, v: &BigInt) -> Option<u64> {
    if !v.is_positive() {
        return None;
    }
    let mut v = v.clone();
    let mut e = 0;
    while !v.is_one() {
        let (q, r) = v.div_rem(base);
        if !r.is_zero() {
            return None;
        }
        v = q;
        e += 1;
    }
    Some(e)
}

/// (R, k) with ξ = R^k and R not a perfect power.
fn primitive_power(xi: &BigInt) -> (BigInt, u64) {
    let top = xi.bits();
    for k in (2..=top).rev() {
        let r = xi.nth_root(k as u32);
        if r > BigInt::one() && pow(&r, k) == *xi {
            let (root, j) = primitive_power(&r);
            return (root, j * k);
        }
    }
    (xi.clone(), 1)
}

fn pow_q(base: &BigInt, e: i64) -> Q {
    let p = Q::from_integer(pow(base, e.unsigned_abs()));
    if e < 0 {
        p.recip()
    } else {
        p
    }
}

/// Result of intersecting two exponential families: an infinite part (a
/// family), finitely many further points, and whether the answer is exact.
/// Uncertified answers list the points with the first family's parameter
/// up to `searched_up_to`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ExpIntersection {
    pub family: Option<ExponentialFamily>,
    #[serde(serialize_with = "ser_int_rows")]
    pub points: Vec<IntVec>,
    pub certified: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub searched_up_to: Option<u64>,
}

impl ExpIntersection {
    fn finite(mut points: Vec<IntVec>) -> Self {
        points.sort();
        points.dedup();
        ExpIntersection {
            family: None,
            points,
            certified: true,
            searched_up_to: None,
        }
    }

    fn transpose(self) -> Self {
        ExpIntersection {
            family: self.family.map(|f| f.transpose()),
            points: self
                .points
                .into_iter()
                .map(|p| vec![p[1].clone(), p[0].clone()])
                .collect(),
            ..self
        }
    }

    pub fn contains(&self, p: &[BigInt]) -> bool {
        self.family.as_ref().is_some_and(|f| f.contains(p))
            || self.points.iter().any(|q| q.as_slice() == p)
    }
}

/// F₁ ∩ F₂. On the exponential coordinate A₁ξ₁^{s₁} − A₂ξ₂^{s₂} = γ₂ − γ₁.
/// Multiplicatively dependent bases (ξ_i = R^{k_i}) are decided exactly; for
/// independent bases only γ₁ = γ₂ is decided (by prime valuations) and the
/// rest, like mixed transposition, is searched with s₁ ≤ cap.
pub fn exp_intersect(f1: &ExponentialFamily, f2: &ExponentialFamily, cap: u64) -> ExpIntersection {
    if f1.transposed != f2.transposed {
        return windowed(f1, f2, cap);
    }
    if f1.transposed {
        return exp_intersect(&f1.transpose(), &f2.transpose(), cap).transpose();
    }
    let (r1, k1) = primitive_power(&f1.xi);
    let (r2, k2) = primitive_power(&f2.xi);
    let delta = &f2.gamma - &f1.gamma;
    match (r1 == r2, delta.is_zero()) {
        (true, true) => dependent_equal_offsets(f1, f2, &r1, k1, k2),
        (true, false) => dependent_offsets(f1, f2, &r1, k1, &delta),
        (false, true) => independent_equal_offsets(f1, f2),
        (false, false) => windowed(f1, f2, cap),
    }
}

fn windowed(f1: &ExponentialFamily, f2: &ExponentialFamily, cap: u64) -> ExpIntersection {
    let points = (1..=cap)
        .map(|s| f1.point(s))
        .filter(|p| f2.contains(p))
        .collect();
    ExpIntersection {
        certified: false,
        searched_up_to: Some(cap),
        ..ExpIntersection::finite(points)
    }
}

/// A₁R^{k₁s₁} = A₂R^{k₂s₂}: k₁s₁ − k₂s₂ = δ with R^δ = A₂/A₁, so
/// s_i = u_i + w_i·s along a progression; the mixed coordinate then reads
/// β·ρ^s + λs + C = 0 with ρ = ξ₁^{w₁}.
fn dependent_equal_offsets(
    f1: &ExponentialFamily,
    f2: &ExponentialFamily,
    r: &BigInt,
    k1: u64,
    k2: u64,
) -> ExpIntersection {
    let (a1, a2) = (f1.x_coeff(), f2.x_coeff());
    let ratio = &a2 / &a1;
    if !ratio.is_positive() {
        return ExpIntersection::finite(vec![]);
    }
    let delta: i64 = if ratio.denom().is_one() {
        match exact_log(r, ratio.numer()) {
            Some(e) => e as i64,
            None => return ExpIntersection::finite(vec![]),
        }
    } else if ratio.numer().is_one() {
        match exact_log(r, ratio.denom()) {
            Some(e) => -(e as i64),
            None => return ExpIntersection::finite(vec![]),
        }
    } else {
        return ExpIntersection::finite(vec![]);
    };
    let (k1, k2) = (k1 as i64, k2 as i64);
    let e = k1.extended_gcd(&k2);
    if delta % e.gcd != 0 {
        return ExpIntersection::finite(vec![]);
    }
    let (s1p, s2p) = (e.x * (delta / e.gcd), -e.y * (delta / e.gcd));
    let (w1, w2) = (k2 / e.gcd, k1 / e.gcd);
    // smallest t with both s_i ≥ 1, then s = t − t_min + 1
    let t_min = Integer::div_ceil(&(1 - s1p), &w1).max(Integer::div_ceil(&(1 - s2p), &w2));
    let u1 = s1p + w1 * (t_min - 1);
    let u2 = s2p + w2 * (t_min - 1);
    let rho = pow(&f1.xi, w1 as u64);
    let beta = (f1.y_coeff() / &a1 - f2.y_coeff() / &a2) * &a1 * pow_q(&f1.xi, u1);
    let lambda = Q::from_integer(&f1.eta * w1 - &f2.eta * w2);
    let c = Q::from_integer(&f1.eta * u1 - &f2.eta * u2) + &f1.mu - &f2.mu;
    match exp_linear_zeros(&beta, &rho, &lambda, &c) {
        None => {
            let family = ExponentialFamily::new(
                rho,
                f1.a.clone(),
                f1.b.clone(),
                &f1.eta * w1,
                &f1.c * pow_q(&f1.xi, u1),
                f1.gamma.clone(),
                &f1.mu + Q::from_integer(&f1.eta * u1),
            )
            .expect("a sub-progression of an integral family is integral");
            ExpIntersection {
                family: Some(family),
                ..ExpIntersection::finite(vec![])
            }
        }
        Some(ss) => ExpIntersection::finite(
            ss.into_iter()
                .map(|s| f1.point((u1 + w1 * s as i64) as u64))
                .collect(),
        ),
    }
}

/// Zeros s ≥ 1 of β·ρ^s + λs + C (ρ > 1); None when it vanishes identically.
/// With β ≠ 0, past the first s where |β|ρ^s > |λ|s + |C| and
/// |β|ρ^s(ρ − 1) ≥ |λ| the exponential term dominates for good.
pub fn exp_linear_zeros(beta: &Q, rho: &BigInt, lambda: &Q, c: &Q) -> Option<Vec<u64>> {
    if beta.is_zero() {
        if lambda.is_zero() {
            return if c.is_zero() { None } else { Some(vec![]) };
        }
        let s = -c / lambda;
        let ok = s.is_integer() && s >= Q::one();
        return Some(if ok {
            vec![s.to_integer().to_u64().expect("small parameter")]
        } else {
            vec![]
        });
    }
    let rho_q = Q::from_integer(rho.clone());
    let mut s0 = 1u64;
    let mut rp = rho_q.clone();
    loop {
        let big = beta.abs() * &rp;
        if big > lambda.abs() * Q::from_integer(s0.into()) + c.abs()
            && &big * (&rho_q - Q::one()) >= lambda.abs()
        {
            break;
        }
        s0 += 1;
        rp *= &rho_q;
    }
    let mut out = Vec::new();
    let mut rp = rho_q.clone();
    for s in 1..s0 {
        if (beta * &rp + lambda * Q::from_integer(s.into()) + c).is_zero() {
            out.push(s);
        }
        rp *= &rho_q;
    }
    Some(out)
}

/// A₁R^{e₁} − A₂R^{e₂} = Δ ≠ 0 with e_i = k_i s_i. Clearing denominators,
/// α₁R^{e₁} − α₂R^{e₂} = δ: R^{min e} divides δ and the cofactor bounds the
/// gap, so R^{max e} ≤ |δ|(|δ| + |α₁| + |α₂|).
fn dependent_offsets(
    f1: &ExponentialFamily,
    f2: &ExponentialFamily,
    r: &BigInt,
    k1: u64,
    delta: &Q,
) -> ExpIntersection {
    let (a1, a2) = (f1.x_coeff(), f2.x_coeff());
    let den = a1.denom().lcm(a2.denom()).lcm(delta.denom());
    let int = |v: &Q| (v * Q::from_integer(den.clone())).to_integer().abs();
    let dl = int(delta);
    let bound = &dl * (&dl + int(&a1) + int(&a2));
    let mut e = 0u64;
    let mut p = r.clone();
    while p <= bound {
        p *= r;
        e += 1;
    }
    let points = (1..=e / k1)
        .map(|s| f1.point(s))
        .filter(|pt| f2.contains(pt))
        .collect();
    ExpIntersection::finite(points)
}

/// Small primes of n by trial division; None if n has a factor beyond 2^20.
fn prime_factors(n: &BigInt) -> Option<Vec<BigInt>> {
    let mut n = n.clone();
    let mut out = Vec::new();
    let mut p = BigInt::from(2);
    while &p * &p <= n {
        if p > BigInt::from(1u64 << 20) {
            return None;
        }
        if (&n % &p).is_zero() {
            out.push(p.clone());
            while (&n % &p).is_zero() {
                n /= &p;
            }
        }
        p += 1;
    }
    if n > BigInt::one() {
        out.push(n);
    }
    Some(out)
}

fn valuation(n: &BigInt, p: &BigInt) -> i64 {
    let mut n = n.clone();
    let mut v = 0;
    while !n.is_zero() && (&n % p).is_zero() {
        n /= p;
        v += 1;
    }
    v
}

/// A₁ξ₁^{s₁} = A₂ξ₂^{s₂} with independent ξ's: two primes with independent
/// valuation vectors pin (s₁, s₂) down.
fn independent_equal_offsets(f1: &ExponentialFamily, f2: &ExponentialFamily) -> ExpIntersection {
    let ratio = f2.x_coeff() / f1.x_coeff();
    let (Some(mut primes), Some(more)) = (prime_factors(&f1.xi), prime_factors(&f2.xi)) else {
        return windowed(f1, f2, 64);
    };
    primes.extend(more);
    primes.sort();
    primes.dedup();
    let rows: Vec<(i64, i64, i64)> = primes
        .iter()
        .map(|p| {
            let v = valuation(ratio.numer(), p) - valuation(ratio.denom(), p);
            (valuation(&f1.xi, p), -valuation(&f2.xi, p), v)
        })
        .collect();
    for (i, r) in rows.iter().enumerate() {
        for q in &rows[i + 1..] {
            let det = r.0 * q.1 - r.1 * q.0;
            if det == 0 {
                continue;
            }
            let n1 = r.2 * q.1 - r.1 * q.2;
            let n2 = r.0 * q.2 - r.2 * q.0;
            if n1 % det != 0 || n2 % det != 0 {
                return ExpIntersection::finite(vec![]);
            }
            let (s1, s2) = (n1 / det, n2 / det);
            if s1 < 1 || s2 < 1 {
                return ExpIntersection::finite(vec![]);
            }
            let p = f1.point(s1 as u64);
            return ExpIntersection::finite(if f2.point(s2 as u64) == p {
                vec![p]
            } else {
                vec![]
            });
        }
    }
    unreachable!("distinct primitive bases have independent valuation vectors")
}

/// L ∩ E. On L, b_L·x − a_L·y is the constant K; on E it equals
/// κξ^s − a_Lηs + (b_Lγ − a_Lμ) with κ = b_L·ac − a_L·bc, so only the zeros
/// of a dominated exponential-linear expression can meet L.
pub fn mixed_intersect(l: &LinearFamily, e: &ExponentialFamily) -> Vec<IntVec> {
    if e.transposed {
        let mut pts: Vec<IntVec> = mixed_intersect(&l.swapped(), &e.transpose())
            .into_iter()
            .map(|p| vec![p[1].clone(), p[0].clone()])
            .collect();
        pts.sort();
        return pts;
    }
    let (la, lb) = (Q::from_integer(l.a.clone()), Q::from_integer(l.b.clone()));
    let k = Q::from_integer(&l.b * &l.c - &l.a * &l.d);
    let kappa = &lb * e.x_coeff() - &la * e.y_coeff();
    let lambda = -&la * Q::from_integer(e.eta.clone());
    let c = &lb * &e.gamma - &la * &e.mu - k;
    let ss = exp_linear_zeros(&kappa, &e.xi, &lambda, &c)
        .expect("a nonzero direction keeps κ or λ nonzero");
    let mut pts: Vec<IntVec> = ss
        .into_iter()
        .map(|s| e.point(s))
        .filter(|p| l.contains(p))
        .collect();
    pts.sort();
    pts
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lrs::q;
    use crate::mulgroup::int_vec;

    fn lf(a: i64, b: i64, c: i64, d: i64) -> LinearFamily {
        LinearFamily::from_i64(a, b, c, d).unwrap()
    }

    fn ef(xi: i64, a: i64, b: i64, eta: i64, c: Q, gamma: i64, mu: i64) -> ExponentialFamily {
        ExponentialFamily::new(
            xi.into(),
            a.into(),
            b.into(),
            eta.into(),
            c,
            q(gamma),
            q(mu),
        )
        .unwrap()
    }

    #[test]
    fn linear_examples() {
        let f = lf(2, 3, 1, 0);
        assert_eq!(
            linear_intersect(&f, &f),
            LinearIntersection::Family { family: f.clone() }
        );
        assert_eq!(
            linear_intersect(&lf(1, 1, 0, 0), &lf(1, 1, 0, 1)),
            LinearIntersection::Empty
        );
        assert_eq!(
            linear_intersect(&lf(2, 1, 0, 0), &lf(3, 1, 0, 0)),
            LinearIntersection::Singleton {
                point: int_vec(&[0, 0])
            }
        );
        // 2Z ∩ 3Z along one line is 6Z
        assert_eq!(
            linear_intersect(&lf(2, 2, 0, 0), &lf(3, 3, 0, 0)),
            LinearIntersection::Family {
                family: lf(6, 6, 0, 0)
            }
        );
        assert_eq!(lf(-2, -1, 5, 3), lf(2, 1, 1, 1));
    }

    #[test]
    fn exponential_integrality() {
        // (2^{s−1}, s − 1)
        let f = ef(2, 1, 0, 1, Q::new(1.into(), 2.into()), 0, -1);
        assert_eq!(f.point(1), int_vec(&[1, 0]));
        assert_eq!(f.parameter(&int_vec(&[8, 3])), Some(4));
        assert!(!f.contains(&int_vec(&[8, 2])));
        let bad = ExponentialFamily::new(
            3.into(),
            1.into(),
            0.into(),
            1.into(),
            Q::new(1.into(), 2.into()),
            q(0),
            q(0),
        );
        assert!(bad.is_err());
    }

    #[test]
    fn exponential_examples() {
        let f1 = ef(2, 1, 0, 1, q(1), 0, 0);
        let same = exp_intersect(&f1, &f1, 20);
        assert!(same.certified && same.points.is_empty());
        let fam = same.family.unwrap();
        for s in 1..30 {
            assert_eq!(fam.point(s), f1.point(s));
        }
        // (2^s, s) ∩ (4^s, 2s) is the second family
        let f2 = ef(4, 1, 0, 2, q(1), 0, 0);
        let r = exp_intersect(&f1, &f2, 20);
        let fam = r.family.unwrap();
        assert_eq!(fam.xi(), &BigInt::from(4));
        for s in 1..30 {
            assert_eq!(fam.point(s), f2.point(s));
        }
        // different offsets leave finitely many points: 2^s = 2^t + 2 only at (4, 1)
        let f3 = ef(2, 1, 0, 1, q(1), 2, 1);
        let r = exp_intersect(&f1, &f3, 20);
        assert!(r.certified && r.family.is_none());
        assert_eq!(r.points, vec![int_vec(&[4, 2])]);
    }

    #[test]
    fn mixed_examples() {
        let e = ef(2, 1, 1, 1, q(1), 0, 0);
        assert!(mixed_intersect(&lf(1, 1, 0, 0), &e).is_empty());
        assert_eq!(mixed_intersect(&lf(1, 1, 0, 1), &e), vec![int_vec(&[2, 3])]);
        // x ≡ 1 mod 4 is never a power of two above 1
        assert!(mixed_intersect(&lf(4, 0, 1, 2), &e).is_empty());
        // transposed: (s, 2^s) meets the line y = x + 2 at s = 2
        let t = ef(2, 1, 0, 1, q(1), 0, 0).transpose();
        assert_eq!(mixed_intersect(&lf(1, 1, 0, 2), &t), vec![int_vec(&[2, 4])]);
    }

    #[test]
    fn primitive_powers() {
        assert_eq!(primitive_power(&BigInt::from(64)), (BigInt::from(2), 6));
        assert_eq!(primitive_power(&BigInt::from(36)), (BigInt::from(6), 2));
        assert_eq!(primitive_power(&BigInt::from(12)), (BigInt::from(12), 1));
    }
}
