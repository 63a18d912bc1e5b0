//! Factorization in F_{q^k}[t]: square-free split, distinct-degree split, then
//! Cantor–Zassenhaus equal-degree splitting driven by a seeded stream.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_traits::One;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::gf::Elem;
use super::poly::Poly;
use super::FieldError;

const SPLIT_SEED: u64 = 0x5EED_F1E1_D000_0001;

/// unit · ∏ factor^multiplicity, factors monic irreducible in canonical order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Factorization {
    pub unit: Elem,
    pub factors: Vec<(Poly, u32)>,
}

impl Factorization {
    /// Multiply everything back together.
    pub fn expand(&self, like: &Poly) -> Poly {
        let field = like.field().clone();
        self.factors
            .iter()
            .fold(Poly::constant(field, self.unit), |acc, (f, m)| {
                &acc * &f.pow(*m as u64)
            })
    }

    pub fn is_irreducible(&self) -> bool {
        self.factors.len() == 1 && self.factors[0].1 == 1
    }
}

/// Factor a nonzero polynomial into a unit times monic irreducibles.
pub fn poly_factor(f: &Poly) -> Result<Factorization, FieldError> {
    if f.is_zero() {
        return Err(FieldError::ZeroPolynomial);
    }
    let unit = f.leading();
    let monic = f.monic();
    let mut collected: BTreeMap<Poly, u32> = BTreeMap::new();
    let mut rng = ChaCha8Rng::seed_from_u64(SPLIT_SEED);
    for (sf, mult) in squarefree(&monic) {
        for (g, d) in distinct_degree(&sf) {
            for irr in equal_degree(&g, d, &mut rng) {
                *collected.entry(irr).or_insert(0) += mult;
            }
        }
    }
    Ok(Factorization {
        unit,
        factors: collected.into_iter().collect(),
    })
}

/// Square-free decomposition of a monic polynomial: pairs (a_i, i) with
/// f = ∏ a_i^i and each a_i square-free.
pub fn squarefree(f: &Poly) -> Vec<(Poly, u32)> {
    let mut out = Vec::new();
    if f.deg0() == 0 {
        return out;
    }
    let p = f.field().characteristic() as u32;
    let d = f.derivative();
    let mut c = f.gcd(&d);
    let mut w = f.div_rem(&c).0;
    let mut i = 1u32;
    while w.deg0() > 0 {
        let y = w.gcd(&c);
        let z = w.div_rem(&y).0;
        if z.deg0() > 0 {
            out.push((z.monic(), i));
        }
        i += 1;
        w = y;
        c = c.div_rem(&w).0;
    }
    if c.deg0() > 0 {
        let root = c.pth_root().expect("remaining part is a p-th power");
        for (g, m) in squarefree(&root.monic()) {
            out.push((g, m * p));
        }
    }
    out
}

/// Distinct-degree decomposition of a monic square-free polynomial: pairs
/// (g, d) with g the product of all irreducible factors of degree d.
pub fn distinct_degree(f: &Poly) -> Vec<(Poly, usize)> {
    let field = f.field().clone();
    let q = field.order();
    let t = Poly::t(field.clone());
    let mut out = Vec::new();
    let mut rest = f.clone();
    let mut h = t.rem(&rest);
    let mut i = 1usize;
    while rest.deg0() >= 2 * i {
        h = h.pow_mod(q, &rest);
        let g = rest.gcd(&(&h - &t));
        if !g.is_one() {
            rest = rest.div_rem(&g).0;
            h = h.rem(&rest);
            out.push((g, i));
        }
        i += 1;
    }
    if rest.deg0() > 0 {
        let d = rest.deg0();
        out.push((rest.monic(), d));
    }
    out
}

fn random_poly(f: &Poly, rng: &mut ChaCha8Rng) -> Poly {
    let field = f.field().clone();
    let n = f.deg0();
    let coeffs = (0..n).map(|_| rng.gen_range(0..field.order())).collect();
    Poly::new(field, coeffs)
}

/// Split a monic square-free product of irreducibles of equal degree d.
pub fn equal_degree(f: &Poly, d: usize, rng: &mut ChaCha8Rng) -> Vec<Poly> {
    if f.deg0() == d {
        return vec![f.monic()];
    }
    let field = f.field().clone();
    let q = field.order();
    let p = field.characteristic();
    let exponent_limbs = if p != 2 {
        let e: BigUint = (BigUint::from(q).pow(d as u32) - BigUint::one()) >> 1;
        e.to_u64_digits()
    } else {
        Vec::new()
    };
    loop {
        let a = random_poly(f, rng);
        if a.deg0() == 0 {
            continue;
        }
        let candidate = if p == 2 {
            // absolute trace a + a^2 + ... + a^{2^{m-1}}, m = log2(q)·d
            let m = field.degree() as usize * d;
            let mut acc = a.rem(f);
            let mut term = acc.clone();
            for _ in 1..m {
                term = term.mul_mod(&term, f);
                acc = &acc + &term;
            }
            acc
        } else {
            let b = a.pow_mod_limbs(&exponent_limbs, f);
            &b - &Poly::one(field.clone())
        };
        let g = f.gcd(&candidate);
        if g.deg0() > 0 && g.deg0() < f.deg0() {
            let h = f.div_rem(&g).0.monic();
            let mut out = equal_degree(&g, d, rng);
            out.extend(equal_degree(&h, d, rng));
            return out;
        }
    }
}

/// All monic divisors of a nonzero polynomial, in canonical order.
pub fn monic_divisors(f: &Poly) -> Result<Vec<Poly>, FieldError> {
    let fac = poly_factor(f)?;
    let field = f.field().clone();
    let mut divisors = vec![Poly::one(field)];
    for (g, m) in &fac.factors {
        let mut next = Vec::with_capacity(divisors.len() * (*m as usize + 1));
        for d in &divisors {
            let mut acc = d.clone();
            next.push(acc.clone());
            for _ in 0..*m {
                acc = &acc * g;
                next.push(acc.clone());
            }
        }
        divisors = next;
    }
    divisors.sort();
    Ok(divisors)
}
