//! Problem files: one JSON document naming the field, the space, two maps,
//! two base points, the window and the caps. Field elements are expression
//! strings; everything is validated and canonicalized on load, and the
//! canonical rendering is what gets hashed into the problem digest.

use std::sync::Arc;

use charp_core::affine::AffineMap;
use charp_core::funcfield::{GaloisField, RatFunc, DEFAULT_DEGREE_CAP};
use charp_core::setalg::Domain;
use charp_core::torus::TorusMap;
use serde::Deserialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::error::CliError;
use crate::expr::{parse_affine, parse_expr_capped};

/// Exponent bound for membership and intersection searches when none is given.
pub const DEFAULT_EXPONENT_CAP: u64 = 256;

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawProblem {
    p: u64,
    #[serde(default = "one")]
    e: u32,
    #[serde(default = "one")]
    k: u32,
    modulus: Option<Vec<u64>>,
    space: RawSpace,
    maps: Vec<RawMap>,
    points: Vec<Vec<String>>,
    window: [u64; 2],
    #[serde(default)]
    caps: RawCaps,
    #[serde(default = "n0")]
    domain: Domain,
}

fn one() -> u32 {
    1
}

fn n0() -> Domain {
    Domain::N0
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSpace {
    kind: SpaceKind,
    d: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SpaceKind {
    Affine,
    Torus,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum RawMap {
    Matrix {
        #[serde(rename = "A")]
        a: Vec<Vec<String>>,
        b: Vec<String>,
    },
    Coords {
        coords: Vec<String>,
    },
    Torus {
        #[serde(rename = "M")]
        m: Vec<Vec<i64>>,
        y: Vec<String>,
    },
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCaps {
    #[serde(default = "default_degree")]
    degree: usize,
    #[serde(default = "default_exponent")]
    exponent: u64,
}

fn default_degree() -> usize {
    DEFAULT_DEGREE_CAP
}

fn default_exponent() -> u64 {
    DEFAULT_EXPONENT_CAP
}

impl Default for RawCaps {
    fn default() -> Self {
        RawCaps {
            degree: DEFAULT_DEGREE_CAP,
            exponent: DEFAULT_EXPONENT_CAP,
        }
    }
}

#[derive(Clone, Debug)]
pub enum Maps {
    Affine(AffineMap, AffineMap),
    Torus(TorusMap, TorusMap),
}

#[derive(Clone, Debug)]
pub struct Problem {
    pub field: Arc<GaloisField>,
    pub kind: SpaceKind,
    pub dim: usize,
    pub maps: Maps,
    pub points: [Vec<RatFunc>; 2],
    pub window: (u64, u64),
    pub degree_cap: usize,
    pub exponent_cap: u64,
    pub domain: Domain,
}

fn schema(msg: impl Into<String>) -> CliError {
    CliError::Schema(msg.into())
}

impl Problem {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let raw: RawProblem = serde_json::from_str(text).map_err(|e| schema(e.to_string()))?;
        Self::from_raw(raw)
    }

    fn from_raw(raw: RawProblem) -> Result<Self, CliError> {
        let field = match &raw.modulus {
            Some(m) => GaloisField::with_modulus(raw.p, raw.e, raw.k, m.clone()),
            None => GaloisField::new(raw.p, raw.e, raw.k),
        }
        .map_err(|e| schema(format!("field: {e}")))?;
        let field = Arc::new(field);
        let d = raw.space.d;
        if d == 0 {
            return Err(schema("space.d must be positive"));
        }
        if raw.maps.len() != 2 || raw.points.len() != 2 {
            return Err(schema("exactly two maps and two points are required"));
        }
        let cap = raw.caps.degree;
        let elem = |s: &str, what: &str| {
            parse_expr_capped(s, &field, cap).map_err(|e| CliError::Parse(format!("{what}: {e}")))
        };
        let mut points = Vec::new();
        for (i, pt) in raw.points.iter().enumerate() {
            if pt.len() != d {
                return Err(schema(format!(
                    "points[{i}] has {} coordinates, expected {d}",
                    pt.len()
                )));
            }
            let v = pt
                .iter()
                .enumerate()
                .map(|(j, s)| elem(s, &format!("points[{i}][{j}]")))
                .collect::<Result<Vec<_>, _>>()?;
            if raw.space.kind == SpaceKind::Torus && v.iter().any(|x| x.is_zero()) {
                return Err(schema(format!(
                    "points[{i}] has a zero coordinate on the torus"
                )));
            }
            points.push(v);
        }
        let maps = match raw.space.kind {
            SpaceKind::Affine => {
                let mut built = Vec::new();
                for (i, m) in raw.maps.iter().enumerate() {
                    let (a, b) = match m {
                        RawMap::Matrix { a, b } => {
                            if a.len() != d || a.iter().any(|r| r.len() != d) || b.len() != d {
                                return Err(schema(format!(
                                    "maps[{i}]: A must be {d}x{d} and b of length {d}"
                                )));
                            }
                            let a = a
                                .iter()
                                .enumerate()
                                .map(|(r, row)| {
                                    row.iter()
                                        .enumerate()
                                        .map(|(c, s)| elem(s, &format!("maps[{i}].A[{r}][{c}]")))
                                        .collect()
                                })
                                .collect::<Result<Vec<Vec<_>>, _>>()?;
                            let b = b
                                .iter()
                                .enumerate()
                                .map(|(r, s)| elem(s, &format!("maps[{i}].b[{r}]")))
                                .collect::<Result<Vec<_>, _>>()?;
                            (a, b)
                        }
                        RawMap::Coords { coords } => {
                            if coords.len() != d {
                                return Err(schema(format!(
                                    "maps[{i}]: {} coordinates, expected {d}",
                                    coords.len()
                                )));
                            }
                            let mut a = Vec::new();
                            let mut b = Vec::new();
                            for (r, s) in coords.iter().enumerate() {
                                let f = parse_affine(s, &field, d, cap).map_err(|e| {
                                    CliError::Parse(format!("maps[{i}].coords[{r}]: {e}"))
                                })?;
                                a.push(f.lin);
                                b.push(f.cst);
                            }
                            (a, b)
                        }
                        RawMap::Torus { .. } => {
                            return Err(schema(format!(
                                "maps[{i}] is a torus map in an affine problem"
                            )))
                        }
                    };
                    built
                        .push(AffineMap::new(a, b).map_err(|e| schema(format!("maps[{i}]: {e}")))?);
                }
                let m2 = built.pop().expect("two maps");
                Maps::Affine(built.pop().expect("two maps"), m2)
            }
            SpaceKind::Torus => {
                if raw.domain == Domain::Z {
                    return Err(schema("the Z domain applies to affine problems only"));
                }
                let mut built = Vec::new();
                for (i, m) in raw.maps.iter().enumerate() {
                    let RawMap::Torus { m, y } = m else {
                        return Err(schema(format!(
                            "maps[{i}] must have the torus shape {{\"M\", \"y\"}}"
                        )));
                    };
                    if m.len() != d || m.iter().any(|r| r.len() != d) || y.len() != d {
                        return Err(schema(format!(
                            "maps[{i}]: M must be {d}x{d} and y of length {d}"
                        )));
                    }
                    let y = y
                        .iter()
                        .enumerate()
                        .map(|(r, s)| elem(s, &format!("maps[{i}].y[{r}]")))
                        .collect::<Result<Vec<_>, _>>()?;
                    built.push(
                        TorusMap::new(m.clone(), y)
                            .map_err(|e| schema(format!("maps[{i}]: {e}")))?,
                    );
                }
                let m2 = built.pop().expect("two maps");
                Maps::Torus(built.pop().expect("two maps"), m2)
            }
        };
        let mut it = points.into_iter();
        let points = [
            it.next().expect("two points"),
            it.next().expect("two points"),
        ];
        Ok(Problem {
            field,
            kind: raw.space.kind,
            dim: d,
            maps,
            points,
            window: (raw.window[0], raw.window[1]),
            degree_cap: cap,
            exponent_cap: raw.caps.exponent,
            domain: raw.domain,
        })
    }

    /// Canonical JSON rendering: defaults filled in, elements in canonical text.
    pub fn canonical(&self) -> Value {
        let strings = |v: &[RatFunc]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>();
        let maps: Vec<Value> = match &self.maps {
            Maps::Affine(m1, m2) => [m1, m2]
                .iter()
                .map(|m| serde_json::to_value(m).expect("serializable"))
                .collect(),
            Maps::Torus(m1, m2) => [m1, m2]
                .iter()
                .map(|m| json!({"M": m.m(), "y": strings(m.y())}))
                .collect(),
        };
        json!({
            "p": self.field.characteristic(),
            "e": self.field.e(),
            "k": self.field.k(),
            "modulus": self.field.modulus(),
            "space": {"kind": match self.kind { SpaceKind::Affine => "affine", SpaceKind::Torus => "torus" }, "d": self.dim},
            "maps": maps,
            "points": [strings(&self.points[0]), strings(&self.points[1])],
            "window": [self.window.0, self.window.1],
            "caps": {"degree": self.degree_cap, "exponent": self.exponent_cap},
            "domain": self.domain,
        })
    }

    /// SHA-256 of the canonical rendering, hex encoded.
    pub fn digest(&self) -> String {
        hex::encode(Sha256::digest(self.canonical().to_string().as_bytes()))
    }
}
