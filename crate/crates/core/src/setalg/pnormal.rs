//! p-normal sets: finite unions of singletons and cosets R + S with R a
//! lattice and S a point or an elementary p-nested set.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::Serialize;

use super::exponents::{gap, growth_bound, has_vanishing_block, power_cycle, search};
use super::nested::{pnested_member, ElementaryPNestedSet, Membership};
use super::SetError;
use crate::lrs::Q;
use crate::mulgroup::{mat_mul, smith, IntVec, Lattice};
use crate::wire::ser_ints;

/// Longest exponent cycle modulo the lattice that is enumerated.
const CYCLE_LIMIT: usize = 1 << 16;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CosetBase {
    Point {
        #[serde(serialize_with = "ser_ints")]
        point: IntVec,
    },
    Nested {
        set: ElementaryPNestedSet,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PNormalComponent {
    Singleton {
        #[serde(serialize_with = "ser_ints")]
        point: IntVec,
    },
    Coset {
        lattice: Lattice,
        base: CosetBase,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PNormalSet {
    pub dim: usize,
    pub components: Vec<PNormalComponent>,
}

impl PNormalSet {
    pub fn new(dim: usize, components: Vec<PNormalComponent>) -> Result<Self, SetError> {
        for c in &components {
            let got = match c {
                PNormalComponent::Singleton { point } => point.len(),
                PNormalComponent::Coset { lattice, base } => {
                    let b = match base {
                        CosetBase::Point { point } => point.len(),
                        CosetBase::Nested { set } => set.dim(),
                    };
                    if lattice.ambient() != b {
                        return Err(SetError::DimensionMismatch {
                            expected: lattice.ambient(),
                            got: b,
                        });
                    }
                    b
                }
            };
            if got != dim {
                return Err(SetError::DimensionMismatch { expected: dim, got });
            }
        }
        Ok(PNormalSet { dim, components })
    }

    /// Largest order of a nested part; 0 when there is none.
    pub fn order(&self) -> usize {
        self.components
            .iter()
            .map(|c| match c {
                PNormalComponent::Coset {
                    base: CosetBase::Nested { set },
                    ..
                } => set.order(),
                _ => 0,
            })
            .max()
            .unwrap_or(0)
    }

    /// shift + scale·P, component by component: scale·R + (shift + scale·S).
    pub fn scale_shift(&self, shift: &[BigInt], scale: &BigInt) -> Result<Self, SetError> {
        if shift.len() != self.dim {
            return Err(SetError::DimensionMismatch {
                expected: self.dim,
                got: shift.len(),
            });
        }
        let map_point =
            |p: &IntVec| -> IntVec { p.iter().zip(shift).map(|(x, s)| x * scale + s).collect() };
        let mut comps = Vec::new();
        for c in &self.components {
            comps.push(match c {
                PNormalComponent::Singleton { point } => PNormalComponent::Singleton {
                    point: map_point(point),
                },
                PNormalComponent::Coset { lattice, base } => {
                    let basis = lattice
                        .basis()
                        .iter()
                        .map(|b| b.iter().map(|x| x * scale).collect())
                        .collect();
                    let lattice = if scale.is_zero() {
                        Lattice::trivial(self.dim)
                    } else {
                        Lattice::new(self.dim, basis)?
                    };
                    let base = match base {
                        CosetBase::Point { point } => CosetBase::Point {
                            point: map_point(point),
                        },
                        CosetBase::Nested { set } => CosetBase::Nested {
                            set: set.scale_shift(shift, scale)?,
                        },
                    };
                    PNormalComponent::Coset { lattice, base }
                }
            });
        }
        Self::new(self.dim, comps)
    }
}

/// Membership in R + S_q(c₀; c): with U·B·V = D the Smith form of R's basis,
/// x ∈ R iff (x·V)_i ≡ 0 mod d_i on the first rank coordinates and (x·V)_i = 0
/// on the rest. The free coordinates give an exponent equation with a growth
/// bound; the torsion coordinates depend on each f_i only through q^{f_i}
/// modulo the d_i, which is eventually periodic.
fn coset_nested_member(
    r: &Lattice,
    s: &ElementaryPNestedSet,
    n: &[BigInt],
    cap: u64,
) -> Result<Membership, SetError> {
    if r.rank() == 0 {
        return pnested_member(s, n, cap);
    }
    let m = s.dim();
    let (_, d, v) = smith(&r.basis().clone(), m);
    let rank = r.rank();
    let den = s.denominator();
    let scale = |x: &[Q]| -> IntVec {
        x.iter()
            .map(|c| (c * Q::from_integer(den.clone())).to_integer())
            .collect()
    };
    let project = |x: &IntVec| -> IntVec { mat_mul(&vec![x.clone()], &v).remove(0) };
    let diff: IntVec = n
        .iter()
        .zip(scale(s.c0()))
        .map(|(x, c)| x * &den - c)
        .collect();
    let target = project(&diff);
    let terms: Vec<IntVec> = s.cs().iter().map(|c| project(&scale(c))).collect();
    let moduli: Vec<BigInt> = (0..rank).map(|i| &d[i][i] * &den).collect();

    let free_terms: Vec<IntVec> = terms.iter().map(|t| t[rank..].to_vec()).collect();
    let free_target: IntVec = target[rank..].to_vec();
    let qb = BigInt::from(s.q());
    let nonzero: Vec<IntVec> = free_terms
        .iter()
        .filter(|t| t.iter().any(|x| !x.is_zero()))
        .cloned()
        .collect();
    let g = gap(&qb, &nonzero);
    let certified = (!has_vanishing_block(&qb, &nonzero, g))
        .then(|| growth_bound(&qb, &free_target, nonzero.len(), g));
    let lcm = moduli.iter().fold(BigInt::one(), |a, b| a.lcm(b));
    let cycle = power_cycle(&qb, &lcm, CYCLE_LIMIT);
    let mut exhaustive = true;
    let bounds: Vec<u64> = free_terms
        .iter()
        .map(|t| {
            if t.iter().all(|x| x.is_zero()) {
                match cycle {
                    // one full cycle of q^f modulo the lattice is exhaustive
                    Some((pre, per)) => pre + per - 1,
                    None => {
                        exhaustive = false;
                        cap
                    }
                }
            } else {
                match certified {
                    Some(b) if b <= cap => b,
                    _ => {
                        exhaustive = false;
                        cap
                    }
                }
            }
        })
        .collect();
    let mut found = None;
    search(&qb, &free_terms, &free_target, &bounds, |f| {
        let ok = (0..rank).all(|i| {
            let mut acc = target[i].clone();
            for (t, &e) in terms.iter().zip(f) {
                acc -= &t[i] * super::exponents::pow(&qb, e);
            }
            acc.mod_floor(&moduli[i]).is_zero()
        });
        if ok {
            found = Some(f.to_vec());
            std::ops::ControlFlow::Break(())
        } else {
            std::ops::ControlFlow::Continue(())
        }
    });
    Ok(match found {
        Some(f) => Membership::Yes(f),
        None if exhaustive => Membership::No,
        None => Membership::Unknown(cap),
    })
}

/// Union of the component answers: Yes if any says Yes, No if all say No.
pub fn pnormal_member(p: &PNormalSet, n: &[BigInt], cap: u64) -> Result<Membership, SetError> {
    if n.len() != p.dim {
        return Err(SetError::DimensionMismatch {
            expected: p.dim,
            got: n.len(),
        });
    }
    let mut unknown = false;
    for c in &p.components {
        let ans = match c {
            PNormalComponent::Singleton { point } => {
                if point.as_slice() == n {
                    Membership::Yes(vec![])
                } else {
                    Membership::No
                }
            }
            PNormalComponent::Coset {
                lattice,
                base: CosetBase::Point { point },
            } => {
                let diff: IntVec = n.iter().zip(point).map(|(a, b)| a - b).collect();
                if lattice.contains(&diff) {
                    Membership::Yes(vec![])
                } else {
                    Membership::No
                }
            }
            PNormalComponent::Coset {
                lattice,
                base: CosetBase::Nested { set },
            } => coset_nested_member(lattice, set, n, cap)?,
        };
        match ans {
            Membership::Yes(f) => return Ok(Membership::Yes(f)),
            Membership::Unknown(_) => unknown = true,
            Membership::No => {}
        }
    }
    Ok(if unknown {
        Membership::Unknown(cap)
    } else {
        Membership::No
    })
}
