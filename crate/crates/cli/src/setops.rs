//! Set-algebra requests: membership and pairwise intersection of elementary
//! p-nested sets, linear families and exponential families. Every answer is
//! marked certified or windowed.

use charp_core::lrs::Q;
use charp_core::setalg::{
    exp_intersect, linear_intersect, mixed_intersect, pnested_intersect, pnested_member,
    ElementaryPNestedSet, ExponentialFamily, LinearFamily, Membership, PNestedIntersection,
};
use charp_core::wire::parse_rat;
use num_bigint::BigInt;
use serde::Deserialize;
use serde_json::{json, Value};

use crate::error::CliError;
use crate::problem::DEFAULT_EXPONENT_CAP;

/// An integer or rational given as a JSON number or a decimal string.
#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum Num {
    Int(i64),
    Text(String),
}

impl Num {
    fn rat(&self) -> Result<Q, CliError> {
        match self {
            Num::Int(v) => Ok(Q::from_integer((*v).into())),
            Num::Text(s) => parse_rat(s)
                .ok_or_else(|| CliError::Schema(format!("`{s}` is not a rational number"))),
        }
    }

    fn int(&self) -> Result<BigInt, CliError> {
        let q = self.rat()?;
        if q.is_integer() {
            Ok(q.to_integer())
        } else {
            Err(CliError::Schema(format!("{q} is not an integer")))
        }
    }
}

fn ints(v: &[Num]) -> Result<Vec<BigInt>, CliError> {
    v.iter().map(Num::int).collect()
}

fn rats(v: &[Num]) -> Result<Vec<Q>, CliError> {
    v.iter().map(Num::rat).collect()
}

#[derive(Clone, Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SetSpec {
    /// S_q(c0; c[0], …); p defaults to the least prime factor of q.
    Nested {
        q: u64,
        p: Option<u64>,
        c0: Vec<Num>,
        c: Vec<Vec<Num>>,
    },
    /// (a·t + c, b·t + d), t ∈ Z.
    Linear { a: Num, b: Num, c: Num, d: Num },
    /// (a·c·ξ^s + γ, b·c·ξ^s + η·s + μ), s ≥ 1, coordinates swapped if transposed.
    Exponential {
        xi: Num,
        a: Num,
        b: Num,
        eta: Num,
        c: Num,
        gamma: Num,
        mu: Num,
        #[serde(default)]
        transposed: bool,
    },
}

enum Set {
    Nested(ElementaryPNestedSet),
    Linear(LinearFamily),
    Exponential(ExponentialFamily),
}

fn least_prime_factor(q: u64) -> u64 {
    (2..)
        .take_while(|d| d * d <= q)
        .find(|d| q.is_multiple_of(*d))
        .unwrap_or(q)
}

fn set_err(e: impl std::fmt::Display) -> CliError {
    CliError::Schema(e.to_string())
}

impl SetSpec {
    fn build(&self) -> Result<Set, CliError> {
        Ok(match self {
            SetSpec::Nested { q, p, c0, c } => {
                let p = p.unwrap_or_else(|| least_prime_factor(*q));
                let cs = c.iter().map(|v| rats(v)).collect::<Result<Vec<_>, _>>()?;
                Set::Nested(ElementaryPNestedSet::new(p, *q, rats(c0)?, cs).map_err(set_err)?)
            }
            SetSpec::Linear { a, b, c, d } => Set::Linear(
                LinearFamily::new(a.int()?, b.int()?, c.int()?, d.int()?).map_err(set_err)?,
            ),
            SetSpec::Exponential {
                xi,
                a,
                b,
                eta,
                c,
                gamma,
                mu,
                transposed,
            } => {
                let f = ExponentialFamily::new(
                    xi.int()?,
                    a.int()?,
                    b.int()?,
                    eta.int()?,
                    c.rat()?,
                    gamma.rat()?,
                    mu.rat()?,
                )
                .map_err(set_err)?;
                Set::Exponential(if *transposed { f.transpose() } else { f })
            }
        })
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case", deny_unknown_fields)]
pub enum Op {
    Member {
        set: SetSpec,
        point: Vec<Num>,
        cap: Option<u64>,
    },
    Intersect {
        sets: [SetSpec; 2],
        cap: Option<u64>,
    },
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SetOps {
    pub ops: Vec<Op>,
}

fn status(certified: bool) -> &'static str {
    if certified {
        "certified"
    } else {
        "windowed"
    }
}

fn point_value(p: &[BigInt]) -> Value {
    serde_json::to_value(p.iter().map(charp_core::wire::Int).collect::<Vec<_>>())
        .expect("serializable")
}

fn points_value(ps: &[Vec<BigInt>]) -> Value {
    Value::Array(ps.iter().map(|p| point_value(p)).collect())
}

/// Points of a p-nested set with exponents ≤ cap that also lie in `keep`.
fn nested_filter(
    s: &ElementaryPNestedSet,
    cap: u64,
    keep: impl Fn(&[BigInt]) -> bool,
) -> Vec<Vec<BigInt>> {
    s.points_within(cap)
        .into_iter()
        .filter(|p| keep(p))
        .collect()
}

fn run_op(op: &Op) -> Result<Value, CliError> {
    match op {
        Op::Member { set, point, cap } => {
            let cap = cap.unwrap_or(DEFAULT_EXPONENT_CAP);
            let point = ints(point)?;
            let (answer, certified) = match set.build()? {
                Set::Nested(s) => {
                    let m = pnested_member(&s, &point, cap).map_err(set_err)?;
                    let certified = !matches!(m, Membership::Unknown(_));
                    (serde_json::to_value(m).expect("serializable"), certified)
                }
                Set::Linear(f) => {
                    if point.len() != 2 {
                        return Err(CliError::Schema("families live in Z^2".into()));
                    }
                    (
                        json!({"answer": if f.contains(&point) { "Yes" } else { "No" }, "witness": f.parameter(&point).map(|t| t.to_string())}),
                        true,
                    )
                }
                Set::Exponential(f) => {
                    if point.len() != 2 {
                        return Err(CliError::Schema("families live in Z^2".into()));
                    }
                    (
                        json!({"answer": if f.contains(&point) { "Yes" } else { "No" }, "witness": f.parameter(&point)}),
                        true,
                    )
                }
            };
            Ok(json!({"op": "member", "result": answer, "status": status(certified)}))
        }
        Op::Intersect { sets, cap } => {
            let cap = cap.unwrap_or(DEFAULT_EXPONENT_CAP);
            let (x, y) = (sets[0].build()?, sets[1].build()?);
            let (result, certified) = match (&x, &y) {
                (Set::Nested(a), Set::Nested(b)) => {
                    let r = pnested_intersect(a, b, cap).map_err(set_err)?;
                    let certified = matches!(r, PNestedIntersection::Certified { .. });
                    (serde_json::to_value(r).expect("serializable"), certified)
                }
                (Set::Linear(a), Set::Linear(b)) => (
                    serde_json::to_value(linear_intersect(a, b)).expect("serializable"),
                    true,
                ),
                (Set::Exponential(a), Set::Exponential(b)) => {
                    let r = exp_intersect(a, b, cap);
                    let certified = r.certified;
                    (serde_json::to_value(r).expect("serializable"), certified)
                }
                (Set::Linear(l), Set::Exponential(e)) | (Set::Exponential(e), Set::Linear(l)) => (
                    json!({"kind": "points", "points": points_value(&mixed_intersect(l, e))}),
                    true,
                ),
                (Set::Nested(s), Set::Linear(f)) | (Set::Linear(f), Set::Nested(s)) => (
                    json!({"kind": "points", "points": points_value(&nested_filter(s, cap, |p| p.len() == 2 && f.contains(p))), "cap": cap}),
                    false,
                ),
                (Set::Nested(s), Set::Exponential(f)) | (Set::Exponential(f), Set::Nested(s)) => (
                    json!({"kind": "points", "points": points_value(&nested_filter(s, cap, |p| p.len() == 2 && f.contains(p))), "cap": cap}),
                    false,
                ),
            };
            Ok(json!({"op": "intersect", "result": result, "status": status(certified)}))
        }
    }
}

pub fn parse_setops(text: &str) -> Result<SetOps, CliError> {
    serde_json::from_str(text).map_err(|e| CliError::Schema(e.to_string()))
}

/// One record per request, in order.
pub fn run_setops(ops: &SetOps) -> Result<Vec<Value>, CliError> {
    ops.ops
        .iter()
        .enumerate()
        .map(|(i, op)| {
            let mut rec = run_op(op)?;
            rec["record"] = json!("setop");
            rec["index"] = json!(i);
            Ok(rec)
        })
        .collect()
}
