//! Exact enumeration of {(n₁, n₂) in the window : Φ₁^{n₁}(a₁) = Φ₂^{n₂}(a₂)}.
//!
//! Affine orbits are iterated once per side and joined by hashing the
//! canonical values. Each iterated sequence can be kept in a disk cache keyed
//! by the SHA-256 of its defining data; a warm entry is reused as a prefix and
//! extended when a larger window asks for more terms. Torus orbits are joined
//! in logarithmic coordinates, where no degree growth occurs.

use std::collections::HashMap;
use std::hash::Hash;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use charp_core::affine::matrix::{inverse, mat_strings, mat_vec, vec_add, vec_strings, RMat, RVec};
use charp_core::affine::{conjugate_pair, AffineError};
use charp_core::funcfield::{FieldError, GaloisField, RatFunc};
use charp_core::setalg::Domain;
use charp_core::torus::{log_orbit, orbit_group, LogPoint, LogSpace, TorusError};
use serde::{Deserialize, Serialize};
use serde_json::json;
use sha2::{Digest, Sha256};

use crate::error::CliError;
use crate::expr::parse_expr_capped;
use crate::problem::{Maps, Problem};

/// Where iterated sequences are persisted, if anywhere.
#[derive(Clone, Debug, Default)]
pub struct OrbitCache {
    dir: Option<PathBuf>,
}

#[derive(Serialize, Deserialize)]
struct CacheEntry {
    values: Vec<Vec<String>>,
    /// First index whose value exceeded the degree cap.
    overflow_at: Option<u64>,
}

/// x₀ … x_L of x_{i+1} = A·x_i + b, L ≤ the requested length.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Sequence {
    pub values: Vec<RVec>,
    /// Set when the sequence stopped early because of the degree cap.
    pub overflow_at: Option<u64>,
}

impl OrbitCache {
    pub fn disabled() -> Self {
        OrbitCache { dir: None }
    }

    pub fn at(dir: &Path) -> Result<Self, CliError> {
        std::fs::create_dir_all(dir)?;
        Ok(OrbitCache {
            dir: Some(dir.to_path_buf()),
        })
    }

    fn key(field: &GaloisField, a: &RMat, b: &RVec, start: &RVec, cap: usize) -> String {
        let doc = json!({
            "kind": "affine-sequence",
            "field": [field.characteristic(), field.e(), field.k(), field.modulus()],
            "A": mat_strings(a),
            "b": vec_strings(b),
            "start": vec_strings(start),
            "cap": cap,
        });
        hex::encode(Sha256::digest(doc.to_string().as_bytes()))
    }

    fn load(&self, key: &str, field: &Arc<GaloisField>, cap: usize) -> Option<Sequence> {
        let path = self.dir.as_ref()?.join(format!("{key}.json"));
        let text = std::fs::read_to_string(path).ok()?;
        let entry: CacheEntry = serde_json::from_str(&text).ok()?;
        let values = entry
            .values
            .iter()
            .map(|v| {
                v.iter()
                    .map(|s| parse_expr_capped(s, field, cap).ok())
                    .collect::<Option<Vec<_>>>()
            })
            .collect::<Option<Vec<_>>>()?;
        Some(Sequence {
            values,
            overflow_at: entry.overflow_at,
        })
    }

    /// Write-then-rename, so readers never see a partial entry.
    fn store(&self, key: &str, seq: &Sequence) -> Result<(), CliError> {
        let Some(dir) = &self.dir else { return Ok(()) };
        let entry = CacheEntry {
            values: seq.values.iter().map(|v| vec_strings(v)).collect(),
            overflow_at: seq.overflow_at,
        };
        // unique per writer: two sides may share a key
        static WRITERS: AtomicU64 = AtomicU64::new(0);
        let n = WRITERS.fetch_add(1, Ordering::Relaxed);
        let tmp = dir.join(format!("{key}.{}.{n}.tmp", std::process::id()));
        std::fs::write(&tmp, serde_json::to_vec(&entry).expect("serializable"))?;
        std::fs::rename(&tmp, dir.join(format!("{key}.json")))?;
        Ok(())
    }

    /// x₀ … x_len of the affine iteration from `start`, reusing and extending
    /// any cached prefix.
    pub fn sequence(
        &self,
        a: &RMat,
        b: &RVec,
        start: &RVec,
        len: u64,
        cap: usize,
    ) -> Result<Sequence, CliError> {
        let field = start[0].field().clone();
        let key = Self::key(&field, a, b, start, cap);
        let mut seq = self.load(&key, &field, cap).unwrap_or(Sequence {
            values: vec![start.clone()],
            overflow_at: None,
        });
        let have = seq.values.len() as u64 - 1;
        if have >= len || seq.overflow_at.is_some() {
            seq.values.truncate(len as usize + 1);
            if seq.overflow_at.is_some_and(|k| k > len) {
                seq.overflow_at = None;
            }
            return Ok(seq);
        }
        for i in have..len {
            let next = vec_add(&mat_vec(a, seq.values.last().expect("nonempty")), b);
            if next.iter().any(|x| x.check_degree(cap).is_err()) {
                seq.overflow_at = Some(i + 1);
                break;
            }
            seq.values.push(next);
        }
        self.store(&key, &seq)?;
        Ok(seq)
    }
}

/// Where a side of the window was cut short by the degree cap.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Truncation {
    pub side: usize,
    /// Largest |n| that was fully computed.
    pub limit: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Enumeration {
    pub solutions: Vec<(i64, i64)>,
    /// The window actually covered: the requested one unless truncated.
    pub window: (u64, u64),
    pub truncations: Vec<Truncation>,
}

/// All index pairs with equal values, sorted; `index` maps list positions to n.
fn join<T: Eq + Hash>(
    left: &[T],
    right: &[T],
    index: impl Fn(usize, usize) -> i64,
) -> Vec<(i64, i64)> {
    let mut by_value: HashMap<&T, Vec<usize>> = HashMap::new();
    for (j, v) in right.iter().enumerate() {
        by_value.entry(v).or_default().push(j);
    }
    let mut out = Vec::new();
    for (i, v) in left.iter().enumerate() {
        if let Some(js) = by_value.get(v) {
            out.extend(js.iter().map(|&j| (index(0, i), index(1, j))));
        }
    }
    out.sort();
    out
}

/// Runs `f` on both inputs, concurrently when more than one thread is allowed.
fn both<T: Send, R: Send>(threads: usize, inputs: [T; 2], f: impl Fn(T) -> R + Sync) -> [R; 2] {
    let [x, y] = inputs;
    if threads > 1 {
        std::thread::scope(|s| {
            let h = s.spawn(|| f(y));
            let rx = f(x);
            [rx, h.join().expect("worker panicked")]
        })
    } else {
        [f(x), f(y)]
    }
}

fn torus_err(e: TorusError) -> CliError {
    match e {
        TorusError::Field(FieldError::DegreeOverflow { .. }) | TorusError::OrbitTooLong(_) => {
            CliError::CapExceeded(e.to_string())
        }
        e => CliError::Schema(e.to_string()),
    }
}

fn affine_err(e: AffineError) -> CliError {
    match e {
        AffineError::Field(FieldError::DegreeOverflow { .. }) => {
            CliError::CapExceeded(e.to_string())
        }
        e => CliError::Schema(e.to_string()),
    }
}

pub fn torus_space(problem: &Problem) -> Result<LogSpace, CliError> {
    let Maps::Torus(m1, m2) = &problem.maps else {
        panic!("torus problem expected")
    };
    orbit_group(
        m1,
        m2,
        &problem.points[0],
        &problem.points[1],
        problem.degree_cap,
    )
    .map_err(torus_err)
}

pub fn enumerate(
    problem: &Problem,
    window: (u64, u64),
    cache: &OrbitCache,
    threads: usize,
) -> Result<Enumeration, CliError> {
    let cap = problem.degree_cap;
    match (&problem.maps, problem.domain) {
        (Maps::Affine(m1, m2), Domain::N0) => {
            let [s1, s2] = both(
                threads,
                [
                    (m1, &problem.points[0], window.0),
                    (m2, &problem.points[1], window.1),
                ],
                |(m, a, n)| cache.sequence(m.a(), m.b(), a, n, cap),
            );
            let (s1, s2) = (s1?, s2?);
            let mut truncations = Vec::new();
            for (side, s) in [&s1, &s2].iter().enumerate() {
                if s.overflow_at.is_some() {
                    truncations.push(Truncation {
                        side: side + 1,
                        limit: s.values.len() as u64 - 1,
                    });
                }
            }
            let covered = (s1.values.len() as u64 - 1, s2.values.len() as u64 - 1);
            Ok(Enumeration {
                solutions: join(&s1.values, &s2.values, |_, i| i as i64),
                window: covered,
                truncations,
            })
        }
        (Maps::Affine(m1, m2), Domain::Z) => {
            // A₁^n·b₁ = A₂^m·b₂ + b₃ for n, m in [−N, N]
            let pair = conjugate_pair(m1, m2, &problem.points[0], &problem.points[1])
                .map_err(affine_err)?;
            let zero: RVec = vec![RatFunc::zero(problem.field.clone()); problem.dim];
            let inv1 =
                inverse(&pair.a1).ok_or_else(|| CliError::Schema("A₁ is not invertible".into()))?;
            let inv2 =
                inverse(&pair.a2).ok_or_else(|| CliError::Schema("A₂ is not invertible".into()))?;
            let [fw, bw] = both(
                threads,
                [
                    [
                        (&pair.a1, &pair.b1, window.0),
                        (&pair.a2, &pair.b2, window.1),
                    ],
                    [(&inv1, &pair.b1, window.0), (&inv2, &pair.b2, window.1)],
                ],
                |sides| sides.map(|(a, b, n)| cache.sequence(a, &zero, b, n, cap)),
            );
            let [f1, f2] = fw;
            let [g1, g2] = bw;
            let (f1, f2, g1, g2) = (f1?, f2?, g1?, g2?);
            let reach =
                |f: &Sequence, g: &Sequence| (f.values.len().min(g.values.len()) - 1) as u64;
            let covered = (reach(&f1, &g1), reach(&f2, &g2));
            let mut truncations = Vec::new();
            for (side, (f, g), n) in [(1, (&f1, &g1), window.0), (2, (&f2, &g2), window.1)] {
                if f.overflow_at.is_some() || g.overflow_at.is_some() {
                    truncations.push(Truncation {
                        side,
                        limit: reach(f, g).min(n),
                    });
                }
            }
            // position i ↦ n = i − N
            let signed = |f: &Sequence, g: &Sequence, n: u64, shift: Option<&RVec>| -> Vec<RVec> {
                let mut out: Vec<RVec> = (1..=n as usize)
                    .rev()
                    .map(|i| g.values[i].clone())
                    .collect();
                out.extend(f.values[..=n as usize].iter().cloned());
                if let Some(s) = shift {
                    out = out.iter().map(|v| vec_add(v, s)).collect();
                }
                out
            };
            let left = signed(&f1, &g1, covered.0, None);
            let right = signed(&f2, &g2, covered.1, Some(&pair.b3));
            let offsets = [covered.0 as i64, covered.1 as i64];
            Ok(Enumeration {
                solutions: join(&left, &right, |side, i| i as i64 - offsets[side]),
                window: covered,
                truncations,
            })
        }
        (Maps::Torus(m1, m2), _) => {
            let space = torus_space(problem)?;
            let [l1, l2] = both(
                threads,
                [
                    (m1, &problem.points[0], window.0),
                    (m2, &problem.points[1], window.1),
                ],
                |(m, a, n)| log_orbit(&space, m, a, n as usize + 1),
            );
            let (l1, l2): (Vec<LogPoint>, Vec<LogPoint>) =
                (l1.map_err(torus_err)?, l2.map_err(torus_err)?);
            Ok(Enumeration {
                solutions: join(&l1, &l2, |_, i| i as i64),
                window,
                truncations: Vec::new(),
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn problem(p: u64, window: u64, domain: &str) -> Problem {
        Problem::from_json(&format!(
            r#"{{"p": {p}, "space": {{"kind": "affine", "d": 1}},
                "maps": [{{"coords": ["t*(x-1)+1"]}}, {{"coords": ["(t+1)*x"]}}],
                "points": [["2"], ["1"]], "window": [{window}, {window}], "domain": "{domain}"}}"#
        ))
        .unwrap()
    }

    #[test]
    fn diagonal_powers() {
        for p in [2u64, 3] {
            let pr = problem(p, 100, "N0");
            let e = enumerate(&pr, pr.window, &OrbitCache::disabled(), 2).unwrap();
            let want: Vec<(i64, i64)> = (0..)
                .map(|k| (p as i64).pow(k))
                .take_while(|&n| n <= 100)
                .map(|n| (n, n))
                .collect();
            assert_eq!(e.solutions, want);
            assert!(e.truncations.is_empty());
        }
    }

    #[test]
    fn identical_maps_give_the_diagonal() {
        let pr = Problem::from_json(
            r#"{"p": 3, "space": {"kind": "affine", "d": 1},
                "maps": [{"coords": ["t*x + 1"]}, {"coords": ["t*x + 1"]}],
                "points": [["t"], ["t"]], "window": [5, 5]}"#,
        )
        .unwrap();
        let e = enumerate(&pr, pr.window, &OrbitCache::disabled(), 1).unwrap();
        assert_eq!(e.solutions, (0..=5).map(|n| (n, n)).collect::<Vec<_>>());
    }

    #[test]
    fn degree_cap_truncates() {
        let mut pr = problem(2, 100, "N0");
        pr.degree_cap = 40;
        let e = enumerate(&pr, pr.window, &OrbitCache::disabled(), 1).unwrap();
        assert_eq!(e.window, (40, 40));
        assert_eq!(e.truncations.len(), 2);
        assert_eq!(
            e.solutions,
            vec![(1, 1), (2, 2), (4, 4), (8, 8), (16, 16), (32, 32)]
        );
    }

    #[test]
    fn signed_window_matches_reduced_identity() {
        let pr = problem(2, 12, "Z");
        let e = enumerate(&pr, pr.window, &OrbitCache::disabled(), 2).unwrap();
        let Maps::Affine(m1, m2) = &pr.maps else {
            panic!()
        };
        let pair = conjugate_pair(m1, m2, &pr.points[0], &pr.points[1]).unwrap();
        let mut want = Vec::new();
        for n in -12i64..=12 {
            for m in -12i64..=12 {
                if pair.holds(n, m, 4096).unwrap() {
                    want.push((n, m));
                }
            }
        }
        assert_eq!(e.solutions, want);
        assert!(want.contains(&(8, 8)));
    }

    #[test]
    fn warm_cache_matches_cold() {
        let dir = tempfile::tempdir().unwrap();
        let cache = OrbitCache::at(dir.path()).unwrap();
        let pr = problem(3, 60, "N0");
        let cold = enumerate(&pr, (30, 30), &cache, 1).unwrap();
        let extended = enumerate(&pr, pr.window, &cache, 1).unwrap();
        let warm = enumerate(&pr, pr.window, &cache, 1).unwrap();
        let fresh = enumerate(&pr, pr.window, &OrbitCache::disabled(), 1).unwrap();
        assert_eq!(warm, fresh);
        assert_eq!(extended, fresh);
        assert_eq!(cold.solutions, vec![(1, 1), (3, 3), (9, 9), (27, 27)]);
    }
}
