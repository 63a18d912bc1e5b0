//! The orchestration commands. Each command runs the pipeline up to its own
//! stage and returns every record produced on the way, so one output stream is
//! a complete run record: solutions, then candidates, then certificates.
//! Records are deterministic unless timings are requested.

use std::time::Instant;

use charp_core::affine::matrix::{inverse, mat_vec, vec_add, RVec};
use charp_core::affine::{affine_iterate_frobenius, conjugate_pair, AffineError, AffineMap};
use charp_core::funcfield::FieldError;
use charp_core::lrs::{classify_pair, DEFAULT_RELATEDNESS_BOUND};
use charp_core::mulgroup::{int_vec, IntVec};
use charp_core::setalg::{
    fit_structure, Domain, FitMode, FitResult, Prediction, Window, DEFAULT_COMPONENT_CAP,
};
use charp_core::torus::{
    decomposed_point, log_orbit, reduce_to_lrs, torus_iterate, TorusError, TorusMap,
};
use num_traits::ToPrimitive;
use serde_json::{json, Value};

use crate::error::CliError;
use crate::orbit::{enumerate, torus_space, Enumeration, OrbitCache};
use crate::problem::{Maps, Problem, SpaceKind};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Enumerate,
    Fit,
    Certify,
    VerifyIdentity,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Enumerate => "enumerate",
            Command::Fit => "fit",
            Command::Certify => "certify",
            Command::VerifyIdentity => "verify-identity",
        }
    }
}

#[derive(Clone, Debug)]
pub struct RunOptions {
    pub threads: usize,
    pub cache: OrbitCache,
    pub timings: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            threads: 1,
            cache: OrbitCache::disabled(),
            timings: false,
        }
    }
}

/// The records of a run and the failure, if any, that sets the exit code.
/// Records are complete even when `failure` is set.
#[derive(Debug)]
pub struct Report {
    pub records: Vec<Value>,
    pub failure: Option<CliError>,
}

impl Report {
    fn records_of(&self, kind: &str) -> impl Iterator<Item = &Value> {
        let kind = kind.to_string();
        self.records
            .iter()
            .filter(move |r| r["record"] == kind.as_str())
    }

    /// Index pairs from the solution records.
    pub fn solutions(&self) -> Vec<(i64, i64)> {
        self.records_of("solution")
            .map(|r| {
                (
                    r["n"][0].as_i64().expect("index"),
                    r["n"][1].as_i64().expect("index"),
                )
            })
            .collect()
    }

    pub fn components(&self) -> Vec<&Value> {
        self.records_of("component")
            .map(|r| &r["component"])
            .collect()
    }

    pub fn certificates(&self) -> Vec<&Value> {
        self.records_of("certificate").collect()
    }

    pub fn first(&self, kind: &str) -> Option<&Value> {
        self.records_of(kind).next()
    }
}

struct Clock {
    on: bool,
    records: Vec<Value>,
}

impl Clock {
    fn time<T>(&mut self, stage: &str, f: impl FnOnce() -> T) -> T {
        let start = Instant::now();
        let out = f();
        if self.on {
            self.records.push(json!({"record": "timing", "stage": stage, "ms": start.elapsed().as_secs_f64() * 1e3}));
        }
        out
    }
}

fn cap_err(e: impl std::fmt::Display) -> CliError {
    CliError::CapExceeded(e.to_string())
}

fn affine_failure(e: AffineError) -> CliError {
    match e {
        AffineError::Field(FieldError::DegreeOverflow { .. }) => cap_err(e),
        e => CliError::Schema(e.to_string()),
    }
}

fn torus_failure(e: TorusError) -> CliError {
    match e {
        TorusError::Field(FieldError::DegreeOverflow { .. }) | TorusError::OrbitTooLong(_) => {
            cap_err(e)
        }
        e => CliError::Schema(e.to_string()),
    }
}

fn domain_name(d: Domain) -> &'static str {
    match d {
        Domain::N0 => "N0",
        Domain::Z => "Z",
    }
}

pub fn fit_mode(problem: &Problem) -> FitMode {
    match problem.kind {
        SpaceKind::Affine => FitMode::PNormal {
            p: problem.field.characteristic(),
            order: problem.dim,
        },
        SpaceKind::Torus => FitMode::Families,
    }
}

pub fn run(command: Command, problem: &Problem, opts: &RunOptions) -> Report {
    run_with(command, problem, opts, None)
}

/// Certifies the predictions of a saved run (the records of an earlier `fit`
/// or `certify` of the same problem) instead of freshly computed ones.
pub fn certify_saved(problem: &Problem, opts: &RunOptions, saved: &[Value]) -> Report {
    let digest = problem.digest();
    let header = saved.iter().find(|r| r["record"] == "run");
    if header
        .map(|h| h["digest"] != digest.as_str())
        .unwrap_or(true)
    {
        let failure = CliError::Schema("the saved run does not belong to this problem".into());
        return Report {
            records: Vec::new(),
            failure: Some(failure),
        };
    }
    let mut predictions = Vec::new();
    for r in saved.iter().filter(|r| r["record"] == "prediction") {
        let point = r["n"]
            .as_array()
            .and_then(|v| v.iter().map(|x| x.as_i64()).collect::<Option<Vec<_>>>());
        match (r["component"].as_u64(), point) {
            (Some(c), Some(pt)) if pt.len() == 2 => predictions.push(Prediction {
                component: c as usize,
                point: int_vec(&pt),
            }),
            _ => {
                let failure = CliError::Schema(format!("malformed prediction record {r}"));
                return Report {
                    records: Vec::new(),
                    failure: Some(failure),
                };
            }
        }
    }
    run_with(Command::Certify, problem, opts, Some(predictions))
}

fn run_with(
    command: Command,
    problem: &Problem,
    opts: &RunOptions,
    saved: Option<Vec<Prediction>>,
) -> Report {
    let mut clock = Clock {
        on: opts.timings,
        records: Vec::new(),
    };
    let mut records = vec![json!({
        "record": "run",
        "command": command.name(),
        "digest": problem.digest(),
        "space": match problem.kind { SpaceKind::Affine => "affine", SpaceKind::Torus => "torus" },
        "dim": problem.dim,
        "domain": domain_name(problem.domain),
        "window": [problem.window.0, problem.window.1],
    })];
    let failure = pipeline(command, problem, opts, saved, &mut records, &mut clock).err();
    records.extend(clock.records);
    Report { records, failure }
}

fn pipeline(
    command: Command,
    problem: &Problem,
    opts: &RunOptions,
    saved: Option<Vec<Prediction>>,
    out: &mut Vec<Value>,
    clock: &mut Clock,
) -> Result<(), CliError> {
    if command == Command::VerifyIdentity {
        return clock.time("verify-identity", || verify_identity(problem, opts, out));
    }
    let en = clock.time("enumerate", || {
        enumerate(problem, problem.window, &opts.cache, opts.threads)
    })?;
    emit_enumeration(&en, out);
    let truncated = (!en.truncations.is_empty()).then(|| {
        cap_err(format!(
            "window truncated to {:?} by the degree cap",
            en.window
        ))
    });
    if command == Command::Enumerate {
        return truncated.map_or(Ok(()), Err);
    }
    let mut fit = clock.time("fit", || fit(problem, &en))?;
    if let Some(preds) = saved {
        if let Some(p) = preds.iter().find(|p| p.component >= fit.components.len()) {
            return Err(CliError::Schema(format!(
                "saved prediction refers to component {} of {}",
                p.component,
                fit.components.len()
            )));
        }
        fit.predictions = preds;
    }
    emit_fit(&fit, out);
    if problem.kind == SpaceKind::Torus {
        out.push(clock.time("reduction", || reduction_record(problem))?);
    }
    if command == Command::Fit {
        return truncated.map_or(Ok(()), Err);
    }
    let window = Window::new(en.window.0, en.window.1, problem.domain);
    let certs = clock.time("certify", || certify(problem, &fit, &window, opts.threads));
    let mut failed = Vec::new();
    let mut overflow = None;
    for c in certs {
        match c {
            Ok(rec) => {
                if rec["verified"] != true || rec["member"] != true {
                    failed.push(rec["n"].to_string());
                }
                out.push(rec);
            }
            Err(e) => overflow = Some(e),
        }
    }
    out.push(
        json!({"record": "certification", "checked": fit.predictions.len(), "failed": failed}),
    );
    if !failed.is_empty() {
        return Err(CliError::Certification(format!(
            "predictions {} do not hold",
            failed.join(", ")
        )));
    }
    if let Some(e) = overflow {
        return Err(e);
    }
    truncated.map_or(Ok(()), Err)
}

fn emit_enumeration(en: &Enumeration, out: &mut Vec<Value>) {
    for t in &en.truncations {
        out.push(json!({"record": "truncation", "side": t.side, "limit": t.limit}));
    }
    for (n1, n2) in &en.solutions {
        out.push(json!({"record": "solution", "n": [n1, n2]}));
    }
    out.push(json!({
        "record": "enumeration",
        "count": en.solutions.len(),
        "window": [en.window.0, en.window.1],
        "truncated": !en.truncations.is_empty(),
    }));
}

pub fn fit(problem: &Problem, en: &Enumeration) -> Result<FitResult, CliError> {
    let points: Vec<IntVec> = en
        .solutions
        .iter()
        .map(|&(a, b)| int_vec(&[a, b]))
        .collect();
    let window = Window::new(en.window.0, en.window.1, problem.domain);
    fit_structure(&points, fit_mode(problem), window, DEFAULT_COMPONENT_CAP)
        .map_err(|e| CliError::Schema(e.to_string()))
}

fn emit_fit(fit: &FitResult, out: &mut Vec<Value>) {
    for (i, c) in fit.components.iter().enumerate() {
        out.push(json!({"record": "component", "index": i, "component": c}));
    }
    for p in &fit.residual {
        out.push(json!({"record": "residual", "n": to_value(p)}));
    }
    for p in &fit.predictions {
        out.push(
            json!({"record": "prediction", "component": p.component, "n": to_value(&p.point)}),
        );
    }
    out.push(json!({
        "record": "fit",
        "components": fit.components.len(),
        "saturated": fit.saturated,
        "pnormal": fit.pnormal(),
    }));
}

fn to_value(v: &[num_bigint::BigInt]) -> Value {
    Value::Array(
        v.iter()
            .map(|x| {
                x.to_i64()
                    .map_or_else(|| Value::String(x.to_string()), Value::from)
            })
            .collect(),
    )
}

fn reduction_record(problem: &Problem) -> Result<Value, CliError> {
    let Maps::Torus(m1, m2) = &problem.maps else {
        unreachable!("torus problem")
    };
    let red = reduce_to_lrs(
        m1,
        m2,
        &problem.points[0],
        &problem.points[1],
        problem.degree_cap,
    )
    .map_err(torus_failure)?;
    let pairs: Vec<Value> = red
        .pairs
        .iter()
        .map(|p| {
            json!({
                "coordinate": p.coordinate,
                "component": p.component,
                "left": p.left,
                "right": p.right,
                "transcript": classify_pair(&p.left, &p.right, DEFAULT_RELATEDNESS_BOUND),
            })
        })
        .collect();
    Ok(json!({
        "record": "reduction",
        "rank": red.rank,
        "torsion_order": red.torsion_order,
        "torsion_constraints": red.torsion_constraints,
        "pairs": pairs,
    }))
}

/// One certificate per prediction: exact orbit equality at the predicted
/// indices, and membership of the point in the component that predicted it.
fn certify(
    problem: &Problem,
    fit: &FitResult,
    window: &Window,
    threads: usize,
) -> Vec<Result<Value, CliError>> {
    let check = |i: usize| -> Result<Value, CliError> {
        let pred = &fit.predictions[i];
        let member = fit.components[pred.component].contains(&pred.point);
        let beyond = !window.contains(&pred.point);
        let n = (pred.point[0].to_i64(), pred.point[1].to_i64());
        let (Some(n1), Some(n2)) = n else {
            return Err(cap_err("predicted index does not fit in 64 bits"));
        };
        let (verified, method) = verify_at(problem, n1, n2)?;
        Ok(json!({
            "record": "certificate",
            "component": pred.component,
            "n": [n1, n2],
            "member": member,
            "beyond_window": beyond,
            "verified": verified,
            "method": method,
        }))
    };
    let count = fit.predictions.len();
    if threads <= 1 || count < 2 {
        return (0..count).map(check).collect();
    }
    let chunk = count.div_ceil(threads);
    std::thread::scope(|s| {
        let handles: Vec<_> = (0..count)
            .step_by(chunk)
            .map(|lo| s.spawn(move || (lo..(lo + chunk).min(count)).map(check).collect::<Vec<_>>()))
            .collect();
        handles
            .into_iter()
            .flat_map(|h| h.join().expect("worker panicked"))
            .collect()
    })
}

/// Exact check of Φ₁^{n₁}(a₁) = Φ₂^{n₂}(a₂) and the method used.
pub fn verify_at(problem: &Problem, n1: i64, n2: i64) -> Result<(bool, Value), CliError> {
    let cap = problem.degree_cap;
    match (&problem.maps, problem.domain) {
        (Maps::Affine(m1, m2), Domain::N0) => {
            let (Ok(u1), Ok(u2)) = (u64::try_from(n1), u64::try_from(n2)) else {
                return Ok((false, json!("outside_domain")));
            };
            let (v1, f1) = affine_iterate_frobenius(m1, &problem.points[0], u1, cap)
                .map_err(affine_failure)?;
            let (v2, f2) = affine_iterate_frobenius(m2, &problem.points[1], u2, cap)
                .map_err(affine_failure)?;
            let name = |f: bool| if f { "frobenius" } else { "powering" };
            Ok((v1 == v2, json!([name(f1), name(f2)])))
        }
        (Maps::Affine(m1, m2), Domain::Z) => {
            let pair = conjugate_pair(m1, m2, &problem.points[0], &problem.points[1])
                .map_err(affine_failure)?;
            Ok((
                pair.holds(n1, n2, cap).map_err(affine_failure)?,
                json!("reduced_powering"),
            ))
        }
        (Maps::Torus(m1, m2), _) => {
            let (Ok(u1), Ok(u2)) = (u64::try_from(n1), u64::try_from(n2)) else {
                return Ok((false, json!("outside_domain")));
            };
            let space = torus_space(problem)?;
            let l1 = decomposed_point(&space, m1, &problem.points[0], u1).map_err(torus_failure)?;
            let l2 = decomposed_point(&space, m2, &problem.points[1], u2).map_err(torus_failure)?;
            Ok((l1 == l2, json!("log_space")))
        }
    }
}

fn identity_record(name: &str, side: Option<usize>, checked: usize, mismatches: &[Value]) -> Value {
    json!({
        "record": "identity",
        "name": name,
        "side": side,
        "checked": checked,
        "ok": mismatches.is_empty(),
        "mismatches": mismatches,
    })
}

/// Exact checks of the identities the enumeration relies on, over the window.
fn verify_identity(
    problem: &Problem,
    opts: &RunOptions,
    out: &mut Vec<Value>,
) -> Result<(), CliError> {
    let before = out.len();
    match &problem.maps {
        Maps::Affine(m1, m2) => verify_affine(problem, m1, m2, opts, out)?,
        Maps::Torus(m1, m2) => verify_torus(problem, m1, m2, out)?,
    }
    let failed: Vec<String> = out[before..]
        .iter()
        .filter(|r| r["ok"] == false)
        .map(|r| r["name"].to_string())
        .collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Certification(format!(
            "identities {} fail",
            failed.join(", ")
        )))
    }
}

/// Values Φ^n(a) for n in [lo, N] with lo = −N on Z, by iterating Φ and Φ⁻¹.
fn direct_orbit(
    problem: &Problem,
    m: &AffineMap,
    a: &RVec,
    n: u64,
    cache: &OrbitCache,
) -> Result<Vec<(i64, RVec)>, CliError> {
    let cap = problem.degree_cap;
    let complete = |s: crate::orbit::Sequence| {
        if s.overflow_at.is_some() {
            Err(cap_err(format!(
                "orbit exceeds the degree cap at index {}",
                s.values.len()
            )))
        } else {
            Ok(s.values)
        }
    };
    let fw = complete(cache.sequence(m.a(), m.b(), a, n, cap)?)?;
    let mut out: Vec<(i64, RVec)> = fw
        .into_iter()
        .enumerate()
        .map(|(i, v)| (i as i64, v))
        .collect();
    if problem.domain == Domain::Z {
        // Φ⁻¹(x) = A⁻¹x − A⁻¹b
        let inv = inverse(m.a())
            .ok_or_else(|| CliError::Schema("linear part is not invertible".into()))?;
        let shift: RVec = mat_vec(&inv, m.b()).iter().map(|x| -x).collect();
        let bw = complete(cache.sequence(&inv, &shift, a, n, cap)?)?;
        out.extend(
            bw.into_iter()
                .enumerate()
                .skip(1)
                .map(|(i, v)| (-(i as i64), v)),
        );
        out.sort_by_key(|(i, _)| *i);
    }
    Ok(out)
}

fn verify_affine(
    problem: &Problem,
    m1: &AffineMap,
    m2: &AffineMap,
    opts: &RunOptions,
    out: &mut Vec<Value>,
) -> Result<(), CliError> {
    let cap = problem.degree_cap;
    let pair =
        conjugate_pair(m1, m2, &problem.points[0], &problem.points[1]).map_err(affine_failure)?;
    let o1 = direct_orbit(
        problem,
        m1,
        &problem.points[0],
        problem.window.0,
        &opts.cache,
    )?;
    let o2 = direct_orbit(
        problem,
        m2,
        &problem.points[1],
        problem.window.1,
        &opts.cache,
    )?;
    // Φ₁^n(a₁) − ã₁ = A₁^n·b₁ and Φ₂^m(a₂) − ã₁ = A₂^m·b₂ + b₃
    let neg_f1: RVec = pair.fixed1.iter().map(|x| -x).collect();
    let mut lhs = Vec::new();
    let mut mism = Vec::new();
    for (n, v) in &o1 {
        let l = pair.lhs(*n, cap).map_err(affine_failure)?;
        if vec_add(v, &neg_f1) != l {
            mism.push(json!(n));
        }
        lhs.push(l);
    }
    out.push(identity_record("conjugation", Some(1), o1.len(), &mism));
    let mut rhs = Vec::new();
    let mut mism = Vec::new();
    for (m, v) in &o2 {
        let r = pair.rhs(*m, cap).map_err(affine_failure)?;
        if vec_add(v, &neg_f1) != r {
            mism.push(json!(m));
        }
        rhs.push(r);
    }
    out.push(identity_record("conjugation", Some(2), o2.len(), &mism));
    // the reduced equation has exactly the solutions of the orbit equation
    let mut mism = Vec::new();
    for (i, (n, v)) in o1.iter().enumerate() {
        for (j, (m, w)) in o2.iter().enumerate() {
            if (v == w) != (lhs[i] == rhs[j]) {
                mism.push(json!([n, m]));
            }
        }
    }
    out.push(identity_record(
        "reduced_equivalence",
        None,
        o1.len() * o2.len(),
        &mism,
    ));
    Ok(())
}

fn verify_torus(
    problem: &Problem,
    m1: &TorusMap,
    m2: &TorusMap,
    out: &mut Vec<Value>,
) -> Result<(), CliError> {
    let cap = problem.degree_cap;
    let space = torus_space(problem)?;
    let windows = [problem.window.0, problem.window.1];
    let mut orbits = Vec::new();
    for (side, m) in [m1, m2].into_iter().enumerate() {
        let a = &problem.points[side];
        let orbit = log_orbit(&space, m, a, windows[side] as usize + 1).map_err(torus_failure)?;
        // closed form from the U/V decomposition against direct log iteration
        let mut mism = Vec::new();
        for (n, l) in orbit.iter().enumerate() {
            if &decomposed_point(&space, m, a, n as u64).map_err(torus_failure)? != l {
                mism.push(json!(n));
            }
        }
        out.push(identity_record(
            "decomposition",
            Some(side + 1),
            orbit.len(),
            &mism,
        ));
        // log coordinates against field arithmetic while degrees stay under the cap
        let mut mism = Vec::new();
        let mut checked = 0;
        for (n, l) in orbit.iter().enumerate() {
            match torus_iterate(m, a, n as u64, cap) {
                Ok(x) => {
                    checked += 1;
                    if &space.log_point(&x).map_err(torus_failure)? != l {
                        mism.push(json!(n));
                    }
                }
                Err(TorusError::Field(FieldError::DegreeOverflow { .. })) => break,
                Err(e) => return Err(torus_failure(e)),
            }
        }
        out.push(identity_record(
            "field_agreement",
            Some(side + 1),
            checked,
            &mism,
        ));
        orbits.push(orbit);
    }
    let red = reduce_to_lrs(m1, m2, &problem.points[0], &problem.points[1], cap)
        .map_err(torus_failure)?;
    let terms: Vec<_> = red
        .pairs
        .iter()
        .map(|p| {
            (
                p.left.terms(windows[0] as usize + 1),
                p.right.terms(windows[1] as usize + 1),
            )
        })
        .collect();
    let mut mism = Vec::new();
    for (i, l1) in orbits[0].iter().enumerate() {
        for (j, l2) in orbits[1].iter().enumerate() {
            let reduced =
                red.torsion_holds(i as u64, j as u64) && terms.iter().all(|(l, r)| l[i] == r[j]);
            if reduced != (l1 == l2) {
                mism.push(json!([i, j]));
            }
        }
    }
    out.push(identity_record(
        "recurrence_reduction",
        None,
        orbits[0].len() * orbits[1].len(),
        &mism,
    ));
    Ok(())
}
