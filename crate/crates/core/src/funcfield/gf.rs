//! The constant field F_{p^n}, n = e·k, stored as residues modulo a fixed
//! irreducible polynomial over F_p.
//!
//! Elements are encoded as integers `< p^n` whose base-p digits are the
//! coefficients of the residue polynomial (lowest degree first). The encoding
//! doubles as the canonical element ordering.

use std::fmt;

use super::FieldError;

/// Encoded element of the constant field.
pub type Elem = u64;

/// Upper bound on the constant-field order. Discrete logarithms and generator
/// searches stay tractable below it.
pub const MAX_FIELD_ORDER: u64 = 1 << 40;

const TABLE_LIMIT: u64 = 1 << 16;

/// The finite field F_{p^{e·k}} with q = p^e.
#[derive(Clone)]
pub struct GaloisField {
    p: u64,
    e: u32,
    k: u32,
    /// Monic modulus over F_p, lowest coefficient first; `[0, 1]` when n = 1.
    modulus: Vec<u64>,
    order: u64,
    generator: Elem,
    tables: Option<LogTables>,
}

#[derive(Clone)]
struct LogTables {
    exp: Vec<Elem>,
    log: Vec<u32>,
}

impl PartialEq for GaloisField {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.e == other.e && self.k == other.k && self.modulus == other.modulus
    }
}

impl Eq for GaloisField {}

impl fmt::Debug for GaloisField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GaloisField")
            .field("p", &self.p)
            .field("e", &self.e)
            .field("k", &self.k)
            .field("modulus", &self.modulus)
            .finish()
    }
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Prime factors of `n` (distinct, ascending) by trial division.
pub fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

impl GaloisField {
    /// F_{p^{e·k}} with the default modulus: the least primitive monic
    /// polynomial of degree e·k in the canonical coefficient ordering.
    pub fn new(p: u64, e: u32, k: u32) -> Result<Self, FieldError> {
        Self::check_params(p, e, k)?;
        let n = e * k;
        let modulus = if n == 1 {
            vec![0, 1]
        } else {
            default_modulus(p, n)
        };
        Self::build(p, e, k, modulus)
    }

    /// The prime field F_p.
    pub fn prime(p: u64) -> Result<Self, FieldError> {
        Self::new(p, 1, 1)
    }

    /// F_{p^{e·k}} modulo a caller-supplied monic irreducible (coefficients
    /// over F_p, lowest degree first).
    pub fn with_modulus(p: u64, e: u32, k: u32, modulus: Vec<u64>) -> Result<Self, FieldError> {
        Self::check_params(p, e, k)?;
        let n = (e * k) as usize;
        let mut modulus: Vec<u64> = modulus.into_iter().map(|c| c % p).collect();
        while modulus.last() == Some(&0) {
            modulus.pop();
        }
        if modulus.len() != n + 1 || modulus[n] != 1 {
            return Err(FieldError::InvalidModulus(
                "modulus must be monic of degree e*k".into(),
            ));
        }
        if !is_irreducible_fp(p, &modulus) {
            return Err(FieldError::InvalidModulus(
                "modulus is reducible over F_p".into(),
            ));
        }
        Self::build(p, e, k, modulus)
    }

    fn check_params(p: u64, e: u32, k: u32) -> Result<(), FieldError> {
        if !is_prime(p) {
            return Err(FieldError::InvalidCharacteristic(p));
        }
        if e == 0 || k == 0 {
            return Err(FieldError::InvalidModulus(
                "extension degrees must be positive".into(),
            ));
        }
        let n = e * k;
        if n > 20 {
            return Err(FieldError::FieldTooLarge { p, degree: n });
        }
        let mut order: u128 = 1;
        for _ in 0..n {
            order *= p as u128;
            if order > MAX_FIELD_ORDER as u128 {
                return Err(FieldError::FieldTooLarge { p, degree: n });
            }
        }
        Ok(())
    }

    fn build(p: u64, e: u32, k: u32, modulus: Vec<u64>) -> Result<Self, FieldError> {
        let n = e * k;
        let order = p.pow(n);
        let mut field = GaloisField {
            p,
            e,
            k,
            modulus,
            order,
            generator: 0,
            tables: None,
        };
        field.generator = field.find_generator();
        if order <= TABLE_LIMIT {
            let mut exp = Vec::with_capacity(order as usize - 1);
            let mut log = vec![0u32; order as usize];
            let mut x: Elem = 1;
            for i in 0..(order - 1) {
                exp.push(x);
                log[x as usize] = i as u32;
                x = field.mul_slow(x, field.generator);
            }
            field.tables = Some(LogTables { exp, log });
        }
        Ok(field)
    }

    pub fn characteristic(&self) -> u64 {
        self.p
    }

    /// q = p^e, the Frobenius base.
    pub fn q(&self) -> u64 {
        self.p.pow(self.e)
    }

    pub fn e(&self) -> u32 {
        self.e
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    /// Degree of the constant field over F_p (e·k).
    pub fn degree(&self) -> u32 {
        self.e * self.k
    }

    /// Number of elements p^{e·k}.
    pub fn order(&self) -> u64 {
        self.order
    }

    pub fn modulus(&self) -> &[u64] {
        &self.modulus
    }

    /// The least generator of the multiplicative group under the encoding order.
    pub fn generator(&self) -> Elem {
        self.generator
    }

    pub fn is_prime_field(&self) -> bool {
        self.degree() == 1
    }

    pub fn from_int(&self, v: i64) -> Elem {
        (v.rem_euclid(self.p as i64)) as u64
    }

    /// Digits of an encoded element, lowest first, length n.
    fn digits(&self, mut x: Elem) -> Vec<u64> {
        let n = self.degree() as usize;
        let mut d = vec![0u64; n];
        for slot in d.iter_mut() {
            *slot = x % self.p;
            x /= self.p;
        }
        d
    }

    fn encode(&self, digits: &[u64]) -> Elem {
        digits.iter().rev().fold(0u64, |acc, &d| acc * self.p + d)
    }

    pub fn add(&self, a: Elem, b: Elem) -> Elem {
        if self.degree() == 1 {
            let s = a + b;
            return if s >= self.p { s - self.p } else { s };
        }
        let (da, db) = (self.digits(a), self.digits(b));
        let s: Vec<u64> = da.iter().zip(&db).map(|(x, y)| (x + y) % self.p).collect();
        self.encode(&s)
    }

    pub fn neg(&self, a: Elem) -> Elem {
        if self.degree() == 1 {
            return if a == 0 { 0 } else { self.p - a };
        }
        let d: Vec<u64> = self
            .digits(a)
            .iter()
            .map(|&x| (self.p - x) % self.p)
            .collect();
        self.encode(&d)
    }

    pub fn sub(&self, a: Elem, b: Elem) -> Elem {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: Elem, b: Elem) -> Elem {
        if a == 0 || b == 0 {
            return 0;
        }
        if self.degree() == 1 {
            return ((a as u128 * b as u128) % self.p as u128) as u64;
        }
        if let Some(t) = &self.tables {
            let m = self.order - 1;
            let i = (t.log[a as usize] as u64 + t.log[b as usize] as u64) % m;
            return t.exp[i as usize];
        }
        self.mul_slow(a, b)
    }

    fn mul_slow(&self, a: Elem, b: Elem) -> Elem {
        if self.degree() == 1 {
            return ((a as u128 * b as u128) % self.p as u128) as u64;
        }
        let p = self.p;
        let n = self.degree() as usize;
        let (da, db) = (self.digits(a), self.digits(b));
        let mut prod = vec![0u64; 2 * n - 1];
        for (i, &x) in da.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in db.iter().enumerate() {
                prod[i + j] = (prod[i + j] + x * y) % p;
            }
        }
        for i in (n..prod.len()).rev() {
            let c = prod[i];
            if c == 0 {
                continue;
            }
            prod[i] = 0;
            for j in 0..n {
                let m = self.modulus[j];
                prod[i - n + j] = (prod[i - n + j] + (p - c) * m) % p;
            }
        }
        prod.truncate(n);
        self.encode(&prod)
    }

    pub fn pow(&self, mut a: Elem, mut exp: u64) -> Elem {
        let mut acc: Elem = 1;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, a);
            }
            a = self.mul(a, a);
            exp >>= 1;
        }
        acc
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(&self, a: Elem) -> Option<Elem> {
        if a == 0 {
            return None;
        }
        if let Some(t) = &self.tables {
            let m = self.order - 1;
            let i = (m - t.log[a as usize] as u64) % m;
            return Some(t.exp[i as usize]);
        }
        Some(self.pow(a, self.order - 2))
    }

    pub fn div(&self, a: Elem, b: Elem) -> Option<Elem> {
        self.inv(b).map(|bi| self.mul(a, bi))
    }

    /// x ↦ x^p.
    pub fn frobenius(&self, a: Elem) -> Elem {
        if self.degree() == 1 {
            a
        } else {
            self.pow(a, self.p)
        }
    }

    /// The p-th root (inverse Frobenius).
    pub fn pth_root(&self, a: Elem) -> Elem {
        if self.degree() == 1 {
            a
        } else {
            // x^{p^{n-1}} inverts x ↦ x^p on F_{p^n}.
            let mut x = a;
            for _ in 1..self.degree() {
                x = self.pow(x, self.p);
            }
            x
        }
    }

    /// Multiplicative order of a nonzero element.
    pub fn element_order(&self, a: Elem) -> u64 {
        let mut ord = self.order - 1;
        for f in prime_factors(self.order - 1) {
            while ord.is_multiple_of(f) && self.pow(a, ord / f) == 1 {
                ord /= f;
            }
        }
        ord
    }

    fn find_generator(&self) -> Elem {
        if self.order == 2 {
            return 1;
        }
        let factors = prime_factors(self.order - 1);
        (2..self.order)
            .find(|&g| {
                factors
                    .iter()
                    .all(|&f| self.mul_pow_slow(g, (self.order - 1) / f) != 1)
            })
            .expect("multiplicative group of a finite field is cyclic")
    }

    fn mul_pow_slow(&self, mut a: Elem, mut exp: u64) -> Elem {
        let mut acc: Elem = 1;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul_slow(acc, a);
            }
            a = self.mul_slow(a, a);
            exp >>= 1;
        }
        acc
    }

    /// Discrete logarithm of a nonzero element against [`Self::generator`],
    /// by baby-step giant-step.
    pub fn discrete_log(&self, a: Elem) -> Option<u64> {
        if a == 0 {
            return None;
        }
        if let Some(t) = &self.tables {
            return Some(t.log[a as usize] as u64);
        }
        let m = self.order - 1;
        let step = (m as f64).sqrt().ceil() as u64 + 1;
        let mut baby = std::collections::HashMap::with_capacity(step as usize);
        let mut x: Elem = 1;
        for j in 0..step {
            baby.entry(x).or_insert(j);
            x = self.mul(x, self.generator);
        }
        let giant = self.inv(self.pow(self.generator, step))?;
        let mut y = a;
        for i in 0..=step {
            if let Some(&j) = baby.get(&y) {
                return Some((i * step + j) % m);
            }
            y = self.mul(y, giant);
        }
        None
    }

    /// Canonical text of an element: a residue `0..p-1` over the prime field,
    /// otherwise a polynomial in the residue class `w` of the modulus variable,
    /// parenthesized when it has more than one term.
    pub fn elem_to_string(&self, a: Elem) -> String {
        if self.degree() == 1 {
            return a.to_string();
        }
        let d = self.digits(a);
        let mut terms = Vec::new();
        for (i, &c) in d.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            terms.push(match (i, c) {
                (0, _) => c.to_string(),
                (1, 1) => "w".to_string(),
                (1, _) => format!("{}*w", c),
                (_, 1) => format!("w^{}", i),
                _ => format!("{}*w^{}", c, i),
            });
        }
        match terms.len() {
            0 => "0".to_string(),
            1 => terms.pop().unwrap(),
            _ => format!("({})", terms.join(" + ")),
        }
    }

    /// The residue class of the modulus variable (`w` in text form); only
    /// meaningful for proper extensions.
    pub fn w(&self) -> Option<Elem> {
        (self.degree() > 1).then_some(self.p)
    }

    pub fn elem_from_digits(&self, digits: &[u64]) -> Option<Elem> {
        if digits.len() > self.degree() as usize || digits.iter().any(|&d| d >= self.p) {
            return None;
        }
        let mut d = digits.to_vec();
        d.resize(self.degree() as usize, 0);
        Some(self.encode(&d))
    }
}

/// Irreducibility over F_p by trial division against every monic polynomial of
/// degree ≤ deg/2.
pub fn is_irreducible_fp(p: u64, f: &[u64]) -> bool {
    let n = f.len() - 1;
    if n == 0 {
        return false;
    }
    for d in 1..=n / 2 {
        let count = p.pow(d as u32);
        for code in 0..count {
            let mut g = Vec::with_capacity(d + 1);
            let mut c = code;
            for _ in 0..d {
                g.push(c % p);
                c /= p;
            }
            g.push(1);
            if fp_rem(p, f, &g).iter().all(|&x| x == 0) {
                return false;
            }
        }
    }
    true
}

fn fp_rem(p: u64, f: &[u64], g: &[u64]) -> Vec<u64> {
    let mut r = f.to_vec();
    let dg = g.len() - 1;
    while r.len() > dg {
        let c = *r.last().unwrap();
        let shift = r.len() - 1 - dg;
        if c != 0 {
            for (j, &gj) in g.iter().enumerate() {
                r[shift + j] = (r[shift + j] + (p - c) * gj % p) % p;
            }
        }
        r.pop();
    }
    r
}

fn fp_mulmod(p: u64, a: &[u64], b: &[u64], f: &[u64]) -> Vec<u64> {
    let mut prod = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            prod[i + j] = (prod[i + j] + x * y) % p;
        }
    }
    fp_rem(p, &prod, f)
}

/// Whether x generates (F_p[x]/f)^* for an irreducible f.
fn is_primitive_fp(p: u64, f: &[u64]) -> bool {
    let n = (f.len() - 1) as u32;
    let m = p.pow(n) - 1;
    let x_pow = |mut e: u64| {
        let mut acc = vec![1u64];
        let mut base = vec![0u64, 1];
        while e > 0 {
            if e & 1 == 1 {
                acc = fp_mulmod(p, &acc, &base, f);
            }
            base = fp_mulmod(p, &base, &base, f);
            e >>= 1;
        }
        acc
    };
    prime_factors(m).into_iter().all(|r| {
        let v = x_pow(m / r);
        !(v.first() == Some(&1) && v.iter().skip(1).all(|&c| c == 0))
    })
}

/// The least monic primitive polynomial of degree n over F_p, ordering
/// candidates by their coefficient codes from the constant term upward.
pub fn default_modulus(p: u64, n: u32) -> Vec<u64> {
    let count = p.pow(n);
    for code in 0..count {
        let mut f = Vec::with_capacity(n as usize + 1);
        let mut c = code;
        for _ in 0..n {
            f.push(c % p);
            c /= p;
        }
        f.push(1);
        if f[0] == 0 {
            continue;
        }
        if is_irreducible_fp(p, &f) && is_primitive_fp(p, &f) {
            return f;
        }
    }
    unreachable!("primitive polynomials exist in every degree")
}
