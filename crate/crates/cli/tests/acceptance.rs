//! Acceptance suite: seven end-to-end criteria, each checked against an
//! independent oracle. Prints one PASS/FAIL line per criterion and fails if
//! any criterion fails. Run with `--nocapture` to see the lines.

use std::collections::{BTreeSet, HashSet};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::Arc;
use std::time::{Duration, Instant};

use charp_core::affine::matrix::{mat_mul, RVec};
use charp_core::affine::{
    binom_period, conjugate_pair, jordan_block, jordan_block_power, AffineMap,
};
use charp_core::funcfield::{GaloisField, Poly, RatFunc};
use charp_core::lrs::{
    q, solve_pair, substitution_check, LinearRecurrence, DEFAULT_RELATEDNESS_BOUND, Q,
};
use charp_core::mulgroup::{int_vec, IntVec};
use charp_core::setalg::{
    exp_intersect, linear_intersect, mixed_intersect, pnested_member, ElementaryPNestedSet,
    ExponentialFamily, FitComponent, LinearFamily, LinearIntersection, Membership,
};
use charp_core::torus::{
    decomposed_point, log_orbit, orbit_group, torus_iterate, TorusError, TorusMap,
};
use charp_core::wire::parse_rat;
use charp_orbits::{run, Command, Problem, RunOptions};
use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

const CAP: usize = 4096;
const SET_INSTANCES: usize = 500;
const PREDICTED: usize = 5;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

fn prime_field(p: u64) -> Arc<GaloisField> {
    Arc::new(GaloisField::prime(p).unwrap())
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

// ---------------------------------------------------------------------------
// 1. diagonal p-powers

fn diagonal_problem(p: u64) -> Problem {
    let text = json!({
        "p": p,
        "space": {"kind": "affine", "d": 1},
        "maps": [{"coords": ["t*(x-1)+1"]}, {"coords": ["(t+1)*x"]}],
        "points": [["2"], ["1"]],
        "window": [100, 100],
    });
    Problem::from_json(&text.to_string()).unwrap()
}

fn diagonal_powers() -> Outcome {
    let start = Instant::now();
    let mut detail = Vec::new();
    for p in [2u64, 3] {
        let problem = diagonal_problem(p);
        let report = run(Command::Certify, &problem, &RunOptions::default());
        ensure!(report.failure.is_none(), "p = {p}: {:?}", report.failure);

        // oracle: t^n + 1 = (t + 1)^n exactly when n is a power of p
        let f = prime_field(p);
        let t = RatFunc::t(f.clone());
        let one = RatFunc::one(f.clone());
        let (mut lhs, mut rhs) = (one.clone(), one.clone());
        let mut oracle = BTreeSet::new();
        let mut left = Vec::new();
        let mut right = Vec::new();
        for _ in 0..=100 {
            left.push(&lhs + &one);
            right.push(rhs.clone());
            lhs = &lhs * &t;
            rhs = &rhs * &(&t + &one);
        }
        for (n1, x) in left.iter().enumerate() {
            for (n2, y) in right.iter().enumerate() {
                if x == y {
                    oracle.insert((n1 as i64, n2 as i64));
                }
            }
        }
        let powers: BTreeSet<(i64, i64)> =
            std::iter::successors(Some(1i64), |x| Some(x * p as i64))
                .take_while(|&x| x <= 100)
                .map(|x| (x, x))
                .collect();
        ensure!(
            oracle == powers,
            "p = {p}: oracle disagrees with the p-power diagonal"
        );
        let got: BTreeSet<(i64, i64)> = report.solutions().into_iter().collect();
        ensure!(got == powers, "p = {p}: enumerated {got:?}");

        let comps = report.components();
        let nested = json!({"kind": "nested", "set": {"q": p, "k": 1, "c0": ["0/1", "0/1"], "c": [["1/1", "1/1"]]}});
        ensure!(
            comps.len() == 1 && *comps[0] == nested,
            "p = {p}: fitted {comps:?}"
        );

        let mut next =
            std::iter::successors(Some(1i64), |x| Some(x * p as i64)).filter(|&x| x > 100);
        let want: Vec<Value> = (0..2)
            .map(|_| next.next().unwrap())
            .map(|x| json!([x, x]))
            .collect();
        let certs = report.certificates();
        for w in &want {
            let c = certs.iter().find(|c| c["n"] == *w);
            ensure!(
                c.is_some_and(|c| c["verified"] == true
                    && c["member"] == true
                    && c["beyond_window"] == true),
                "p = {p}: prediction {w} not certified"
            );
        }
        detail.push(format!(
            "p={p}: {} solutions, certified {} {}",
            got.len(),
            want[0],
            want[1]
        ));
    }
    let elapsed = start.elapsed();
    ensure!(elapsed < Duration::from_secs(60), "took {elapsed:?}");
    Ok(format!("{} in {:.2?}", detail.join("; "), elapsed))
}

// ---------------------------------------------------------------------------
// 2. torus decomposition against direct iteration

fn random_poly(f: &Arc<GaloisField>, r: &mut ChaCha8Rng) -> RatFunc {
    loop {
        let len = r.gen_range(1..=3);
        let c: Vec<u64> = (0..len).map(|_| r.gen_range(0..3)).collect();
        let x = RatFunc::from_poly(Poly::new(f.clone(), c));
        if !x.is_zero() {
            return x;
        }
    }
}

fn torus_decomposition() -> Outcome {
    let f = prime_field(3);
    let mut r = rng(0xacc2);
    let mut field_checked = 0;
    for case in 0..100 {
        let d = r.gen_range(1..=3);
        let m: Vec<Vec<i64>> = (0..d)
            .map(|_| (0..d).map(|_| r.gen_range(-2..=2)).collect())
            .collect();
        let phi = TorusMap::new(m, (0..d).map(|_| random_poly(&f, &mut r)).collect()).unwrap();
        let a: Vec<RatFunc> = (0..d).map(|_| random_poly(&f, &mut r)).collect();
        let space =
            orbit_group(&phi, &phi, &a, &a, CAP).map_err(|e| format!("case {case}: {e}"))?;
        let direct = log_orbit(&space, &phi, &a, 41).map_err(|e| format!("case {case}: {e}"))?;
        for (n, point) in direct.iter().enumerate() {
            let dec = decomposed_point(&space, &phi, &a, n as u64)
                .map_err(|e| format!("case {case}: {e}"))?;
            ensure!(&dec == point, "case {case}, n = {n}: decomposition differs");
        }
        // field arithmetic as a second oracle while degrees stay manageable
        for (n, point) in direct.iter().enumerate() {
            match torus_iterate(&phi, &a, n as u64, 512) {
                Ok(x) => {
                    ensure!(
                        &space.log_point(&x).unwrap() == point,
                        "case {case}, n = {n}: log orbit differs from field orbit"
                    );
                    field_checked += 1;
                }
                Err(TorusError::Field(_)) => break,
                Err(e) => return Err(format!("case {case}: {e}")),
            }
        }
    }
    Ok(format!(
        "100 instances, n <= 40, {field_checked} points also checked in the field"
    ))
}

// ---------------------------------------------------------------------------
// 3. Jordan block powers and binomial periods

fn jordan_machinery() -> Outcome {
    let mut blocks = 0;
    for p in [2u64, 3] {
        let f = prime_field(p);
        let lambdas = [
            RatFunc::t(f.clone()),
            RatFunc::new(
                Poly::from_ints(f.clone(), &[1, 1]),
                Poly::from_ints(f.clone(), &[0, 1]),
            )
            .unwrap(),
            RatFunc::from_int(f.clone(), p as i64 - 1),
        ];
        for lam in &lambdas {
            for l in 1..=4usize {
                let j = jordan_block(lam, l);
                let mut acc = jordan_block_power(lam, l, 0).unwrap();
                for n in 0..=64u64 {
                    let got = jordan_block_power(lam, l, n).map_err(|e| e.to_string())?;
                    ensure!(got == acc, "p = {p}, λ = {lam}, ℓ = {l}, n = {n}");
                    acc = mat_mul(&acc, &j);
                }
                blocks += 1;
            }
        }
    }
    // Pascal's triangle mod p gives the rows (C(n,k) mod p)_{k<ℓ}; the period
    // in n is the least T with row(n + T) = row(n) for all n.
    let mut periods = 0;
    for p in [2u64, 3, 5] {
        let rows = 2000usize;
        let mut pascal = vec![vec![1u64; 1]];
        for n in 1..rows {
            let prev = &pascal[n - 1];
            let row: Vec<u64> = (0..=n)
                .map(|k| {
                    let a = if k > 0 { prev[k - 1] } else { 0 };
                    let b = if k < n { prev[k] } else { 0 };
                    (a + b) % p
                })
                .collect();
            pascal.push(row);
        }
        let entry = |n: usize, k: usize| if k <= n { pascal[n][k] } else { 0 };
        for l in 1..=9usize {
            let period = (1..rows / 2)
                .find(|&t| (0..rows - t).all(|n| (0..l).all(|k| entry(n, k) == entry(n + t, k))))
                .ok_or(format!("no period for ℓ = {l}, p = {p}"))?;
            let got = binom_period(l as u64, p);
            ensure!(
                got == period as u64,
                "ℓ = {l}, p = {p}: binom_period {got}, table {period}"
            );
            periods += 1;
        }
    }
    Ok(format!(
        "{blocks} blocks up to n = 64, {periods} periods against Pascal tables"
    ))
}

// ---------------------------------------------------------------------------
// 4. reduced pairs against direct orbits

fn random_ratfunc(f: &Arc<GaloisField>, r: &mut ChaCha8Rng) -> RatFunc {
    let p = f.characteristic();
    let num: Vec<u64> = (0..r.gen_range(0..=3)).map(|_| r.gen_range(0..p)).collect();
    let den: Vec<u64> = (0..r.gen_range(1..=2)).map(|_| r.gen_range(0..p)).collect();
    RatFunc::new(Poly::new(f.clone(), num.clone()), Poly::new(f.clone(), den))
        .unwrap_or_else(|_| RatFunc::from_poly(Poly::new(f.clone(), num)))
}

fn random_affine(f: &Arc<GaloisField>, d: usize, r: &mut ChaCha8Rng) -> Option<(AffineMap, RVec)> {
    let a = (0..d)
        .map(|_| (0..d).map(|_| random_ratfunc(f, r)).collect())
        .collect();
    let b = (0..d).map(|_| random_ratfunc(f, r)).collect();
    let x = (0..d).map(|_| random_ratfunc(f, r)).collect();
    AffineMap::new(a, b).ok().map(|m| (m, x))
}

fn reduction_soundness() -> Outcome {
    let mut r = rng(0xacc4);
    let (mut pairs, mut attempts, mut equal) = (0, 0, 0);
    while pairs < 50 {
        attempts += 1;
        ensure!(attempts < 10_000, "only {pairs} pairs with fixed points");
        let p = [2u64, 3][r.gen_range(0..2)];
        let f = prime_field(p);
        let d = r.gen_range(1..=2);
        let (Some((phi1, a1)), Some((phi2, a2))) =
            (random_affine(&f, d, &mut r), random_affine(&f, d, &mut r))
        else {
            continue;
        };
        let Ok(pair) = conjugate_pair(&phi1, &phi2, &a1, &a2) else {
            continue;
        };
        // oracle: apply each map step by step
        let orbit = |phi: &AffineMap, a: &RVec| {
            let mut out = vec![a.clone()];
            for _ in 0..10 {
                let next = phi.apply(out.last().unwrap());
                out.push(next);
            }
            out
        };
        let (o1, o2) = (orbit(&phi1, &a1), orbit(&phi2, &a2));
        for n in 0..=10usize {
            for m in 0..=10usize {
                let direct = o1[n] == o2[m];
                let reduced = pair
                    .holds(n as i64, m as i64, CAP)
                    .map_err(|e| e.to_string())?;
                ensure!(direct == reduced, "pair {pairs} (p = {p}, d = {d}), (n, m) = ({n}, {m}): direct {direct}, reduced {reduced}");
                equal += direct as usize;
            }
        }
        pairs += 1;
    }
    Ok(format!(
        "50 pairs over 121 index pairs each, {equal} coincidences"
    ))
}

// ---------------------------------------------------------------------------
// 5. set algebra against brute force

fn small_vec(r: &mut ChaCha8Rng, m: usize, lo: i64, hi: i64) -> Vec<i64> {
    (0..m).map(|_| r.gen_range(lo..=hi)).collect()
}

fn nested_membership(r: &mut ChaCha8Rng) -> Outcome {
    let cap = 6;
    let (mut yes, mut no) = (0, 0);
    for case in 0..SET_INSTANCES {
        let m = r.gen_range(1..=2);
        let k = r.gen_range(0..=3);
        let (p, qq) = [(2, 2), (3, 3), (2, 4)][r.gen_range(0..3)];
        let cs: Vec<Vec<i64>> = (0..k).map(|_| small_vec(r, m, -3, 3)).collect();
        let s = ElementaryPNestedSet::from_ints(p, qq, &small_vec(r, m, -4, 4), &cs).unwrap();
        // oracle: all exponent tuples up to the cap, plus a deeper enumeration
        let exps = |cap: u64| -> BTreeSet<IntVec> {
            let mut out = BTreeSet::new();
            let mut f = vec![0u64; k];
            loop {
                out.insert(s.point(&f));
                let Some(i) = (0..k).find(|&i| f[i] < cap) else {
                    break;
                };
                f[i] += 1;
                f[..i].iter_mut().for_each(|x| *x = 0);
            }
            out
        };
        let window = exps(cap);
        let deep = exps(cap + 4);
        let n: IntVec = if r.gen_bool(0.5) {
            window
                .iter()
                .nth(r.gen_range(0..window.len()))
                .unwrap()
                .clone()
        } else {
            int_vec(&small_vec(r, m, -200, 200))
        };
        match pnested_member(&s, &n, cap).map_err(|e| e.to_string())? {
            Membership::Yes(f) => {
                ensure!(
                    s.point(&f) == n && deep.contains(&n),
                    "member case {case}: bad witness"
                );
                yes += 1;
            }
            Membership::No => {
                ensure!(!deep.contains(&n), "member case {case}: No for a member");
                no += 1;
            }
            Membership::Unknown(_) => ensure!(
                !window.contains(&n),
                "member case {case}: Unknown for a window member"
            ),
        }
    }
    ensure!(
        yes > 100 && no > 50,
        "unbalanced membership sample: yes {yes}, no {no}"
    );
    Ok(format!("member {SET_INSTANCES}"))
}

fn random_linear(r: &mut ChaCha8Rng) -> LinearFamily {
    loop {
        if let Ok(f) = LinearFamily::from_i64(
            r.gen_range(-6..=6),
            r.gen_range(-6..=6),
            r.gen_range(-20..=20),
            r.gen_range(-20..=20),
        ) {
            return f;
        }
    }
}

/// Points of the family in [−w, w]², by scanning the parameter.
fn linear_box(f: &LinearFamily, w: i64) -> HashSet<IntVec> {
    (-(2 * w + 40)..=(2 * w + 40))
        .map(|t| f.point(&BigInt::from(t)))
        .filter(|p| {
            p.iter()
                .all(|x| x >= &BigInt::from(-w) && x <= &BigInt::from(w))
        })
        .collect()
}

fn linear_intersections(r: &mut ChaCha8Rng) -> Outcome {
    let w = 100;
    let mut families = 0;
    for case in 0..SET_INSTANCES {
        let f1 = random_linear(r);
        let f2 = if r.gen_bool(0.4) {
            let base = f1.point(&BigInt::from(r.gen_range(-3..=3)));
            let k = r.gen_range(1..=4);
            let shift = r.gen_range(-2..=2);
            LinearFamily::new(
                f1.a() * k,
                f1.b() * k,
                &base[0] + f1.a() * shift,
                &base[1] + f1.b() * shift,
            )
            .unwrap()
        } else {
            random_linear(r)
        };
        let brute: HashSet<IntVec> = linear_box(&f1, w)
            .intersection(&linear_box(&f2, w))
            .cloned()
            .collect();
        let got: HashSet<IntVec> = match linear_intersect(&f1, &f2) {
            LinearIntersection::Empty => HashSet::new(),
            LinearIntersection::Singleton { point } => {
                ensure!(
                    f1.contains(&point) && f2.contains(&point),
                    "linear case {case}: singleton off an input"
                );
                [point]
                    .into_iter()
                    .filter(|p| p.iter().all(|x| x.magnitude() <= &(w as u64).into()))
                    .collect()
            }
            LinearIntersection::Family { family } => {
                families += 1;
                let beyond: Vec<IntVec> = (0..)
                    .map(|t: i64| family.point(&BigInt::from(t)))
                    .filter(|p| p.iter().any(|x| x.magnitude() > &(w as u64).into()))
                    .take(PREDICTED)
                    .collect();
                for p in &beyond {
                    ensure!(
                        f1.contains(p) && f2.contains(p),
                        "linear case {case}: prediction {p:?} off an input"
                    );
                }
                linear_box(&family, w)
            }
        };
        ensure!(got == brute, "linear case {case}: {f1:?} ∩ {f2:?}");
    }
    ensure!(families > 100, "only {families} family intersections");
    Ok(format!("linear {SET_INSTANCES} ({families} families)"))
}

fn random_exp(r: &mut ChaCha8Rng) -> ExponentialFamily {
    loop {
        let xi: i64 = [2, 3, 4, 6, 8, 9][r.gen_range(0..6)];
        let c = Q::new(
            r.gen_range(1..=3).into(),
            [1, xi - 1][r.gen_range(0..2)].into(),
        );
        let f = ExponentialFamily::new(
            xi.into(),
            [-2, -1, 1, 2][r.gen_range(0..4)].into(),
            r.gen_range(-2..=2).into(),
            [-2, -1, 1, 2][r.gen_range(0..4)].into(),
            c,
            q(r.gen_range(-5..=5)),
            q(r.gen_range(-5..=5)),
        );
        if let Ok(f) = f {
            return if r.gen_bool(0.15) { f.transpose() } else { f };
        }
    }
}

/// A family through f's points with parameter w·s + u, sometimes shifted off it.
fn related_exp(r: &mut ChaCha8Rng, f: &ExponentialFamily) -> ExponentialFamily {
    let w = r.gen_range(1..=3usize);
    let u = r.gen_range(0..=2usize);
    let dmu: i64 = if r.gen_bool(0.5) {
        0
    } else {
        r.gen_range(-3..=3)
    };
    let dgamma: i64 = if r.gen_bool(0.7) {
        0
    } else {
        r.gen_range(-3..=3)
    };
    let g = ExponentialFamily::new(
        num_traits::pow(f.xi().clone(), w),
        f.a().clone(),
        f.b().clone(),
        f.eta() * w,
        f.c() * Q::from_integer(num_traits::pow(f.xi().clone(), u)),
        f.gamma() + q(dgamma),
        f.mu() + Q::from_integer(f.eta() * u + dmu),
    )
    .unwrap();
    if f.is_transposed() {
        g.transpose()
    } else {
        g
    }
}

fn exp_intersections(r: &mut ChaCha8Rng) -> Outcome {
    let window = 200u64;
    let (mut families, mut certified) = (0, 0);
    for case in 0..SET_INSTANCES {
        let f1 = random_exp(r);
        let f2 = if r.gen_bool(0.6) {
            related_exp(r, &f1)
        } else {
            random_exp(r)
        };
        let res = exp_intersect(&f1, &f2, window);
        for p in &res.points {
            ensure!(
                f1.contains(p) && f2.contains(p),
                "exp case {case}: {p:?} off an input"
            );
        }
        // oracle: parameters up to the window on both sides
        let s2: HashSet<IntVec> = (1..=window).map(|s| f2.point(s)).collect();
        for s in 1..=window {
            let p = f1.point(s);
            if s2.contains(&p) {
                ensure!(res.contains(&p), "exp case {case}: missed {p:?}");
            }
            if res.contains(&p) {
                ensure!(
                    f2.contains(&p),
                    "exp case {case}: {p:?} reported but not on the second family"
                );
            }
        }
        certified += res.certified as usize;
        if let Some(fam) = &res.family {
            ensure!(
                res.certified,
                "exp case {case}: family without certification"
            );
            families += 1;
            for s in window + 1..=window + PREDICTED as u64 {
                let p = fam.point(s);
                ensure!(
                    f1.contains(&p) && f2.contains(&p),
                    "exp case {case}: prediction s = {s} off an input"
                );
            }
        }
    }
    ensure!(families > 50, "only {families} family intersections");
    Ok(format!(
        "exponential {SET_INSTANCES} ({families} families, {certified} certified)"
    ))
}

fn mixed_intersections(r: &mut ChaCha8Rng) -> Outcome {
    let window = 200u64;
    let mut hits = 0;
    for case in 0..SET_INSTANCES {
        let e = random_exp(r);
        let l = if r.gen_bool(0.5) {
            let p = e.point(r.gen_range(1..=3));
            let qq = e.point(r.gen_range(4..=5));
            LinearFamily::new(&qq[0] - &p[0], &qq[1] - &p[1], p[0].clone(), p[1].clone()).unwrap()
        } else {
            random_linear(r)
        };
        let got: HashSet<IntVec> = mixed_intersect(&l, &e).into_iter().collect();
        for p in &got {
            ensure!(
                l.contains(p) && e.contains(p),
                "mixed case {case}: {p:?} off an input"
            );
        }
        for s in 1..=window {
            let p = e.point(s);
            ensure!(
                got.contains(&p) == l.contains(&p),
                "mixed case {case}: disagreement at s = {s}"
            );
        }
        hits += (!got.is_empty()) as usize;
    }
    ensure!(hits > 100, "only {hits} nonempty mixed intersections");
    Ok(format!("mixed {SET_INSTANCES} ({hits} nonempty)"))
}

fn set_algebra() -> Outcome {
    let mut r = rng(0xacc5);
    let parts = [
        nested_membership(&mut r)?,
        linear_intersections(&mut r)?,
        exp_intersections(&mut r)?,
        mixed_intersections(&mut r)?,
    ];
    Ok(parts.join(", "))
}

// ---------------------------------------------------------------------------
// 6. recurrence pairs

fn recurrence_families() -> Outcome {
    let window = 64u64;
    let beyond = 20;

    // 2^n against 4^m
    let p = LinearRecurrence::geometric(q(1), q(2)).unwrap();
    let qq = LinearRecurrence::geometric(q(1), q(4)).unwrap();
    let sol = solve_pair(&p, &qq, window, DEFAULT_RELATEDNESS_BOUND);
    let want = LinearFamily::from_i64(2, 1, 0, 0).unwrap();
    ensure!(
        sol.fit.components == vec![FitComponent::Linear { family: want }],
        "(2^n, 4^m) fitted {:?}",
        sol.fit.components
    );
    let checks = substitution_check(&p, &qq, &sol.fit.components[0], window, beyond);
    ensure!(
        checks.len() == beyond && checks.iter().all(|c| c.1),
        "(2^n, 4^m) substitution failed"
    );
    for (pt, _) in &checks {
        // oracle: 2^x = 4^y iff x = 2y
        ensure!(
            pt[0] == &pt[1] * 2,
            "(2^n, 4^m): prediction {pt:?} is not a solution"
        );
    }

    // n against 2^m
    let p = LinearRecurrence::linear(q(1), q(0)).unwrap();
    let qq = LinearRecurrence::geometric(q(1), q(2)).unwrap();
    let sol = solve_pair(&p, &qq, 200, DEFAULT_RELATEDNESS_BOUND);
    let exps: Vec<&ExponentialFamily> = sol
        .fit
        .components
        .iter()
        .filter_map(|c| match c {
            FitComponent::Exponential { family } => Some(family),
            _ => None,
        })
        .collect();
    ensure!(
        exps.len() == 1 && *exps[0].xi() == BigInt::from(2),
        "(n, 2^m) fitted {:?}",
        sol.fit.components
    );
    let comp = sol
        .fit
        .components
        .iter()
        .find(|c| matches!(c, FitComponent::Exponential { .. }))
        .unwrap();
    let checks = substitution_check(&p, &qq, comp, 200, beyond);
    ensure!(
        checks.len() == beyond && checks.iter().all(|c| c.1),
        "(n, 2^m) substitution failed"
    );
    for (pt, _) in &checks {
        let m = u32::try_from(&pt[1]).map_err(|e| e.to_string())?;
        ensure!(
            pt[0] == BigInt::from(2).pow(m),
            "(n, 2^m): prediction {pt:?} is not a solution"
        );
    }
    Ok(format!(
        "(2t, t) and ξ = 2 families, {beyond} substitutions each"
    ))
}

// ---------------------------------------------------------------------------
// 7. torus pair t·x against t²·x

fn recurrence_from(v: &Value) -> Result<LinearRecurrence, String> {
    let rats = |key: &str| -> Result<Vec<Q>, String> {
        v[key]
            .as_array()
            .ok_or(format!("missing {key}"))?
            .iter()
            .map(|x| x.as_str().and_then(parse_rat).ok_or(format!("bad {x}")))
            .collect()
    };
    LinearRecurrence::new(rats("coefficients")?, rats("initial_terms")?).map_err(|e| e.to_string())
}

fn torus_end_to_end() -> Outcome {
    let text = json!({
        "p": 3,
        "space": {"kind": "torus", "d": 1},
        "maps": [{"M": [[1]], "y": ["t"]}, {"M": [[1]], "y": ["t^2"]}],
        "points": [["1"], ["1"]],
        "window": [60, 60],
    });
    let problem = Problem::from_json(&text.to_string()).map_err(|e| e.to_string())?;
    let report = run(Command::Certify, &problem, &RunOptions::default());
    ensure!(report.failure.is_none(), "{:?}", report.failure);

    let reduction = report.first("reduction").ok_or("no reduction record")?;
    let pairs = reduction["pairs"].as_array().ok_or("no pairs")?;
    ensure!(pairs.len() == 1, "{} recurrence pairs", pairs.len());
    let (w1, w2) = (
        recurrence_from(&pairs[0]["left"])?,
        recurrence_from(&pairs[0]["right"])?,
    );
    let (t1, t2) = (w1.terms(101), w2.terms(101));
    for n in 0..=100i64 {
        ensure!(
            t1[n as usize] == q(n) && t2[n as usize] == q(2 * n),
            "W at {n}: {} and {}",
            t1[n as usize],
            t2[n as usize]
        );
    }

    // oracle: t^{n1} = t^{2 n2} iff n1 = 2 n2
    let oracle: Vec<(i64, i64)> = (0..=30).map(|m| (2 * m, m)).collect();
    ensure!(
        report.solutions() == oracle,
        "solutions {:?}",
        report.solutions()
    );
    let comps = report.components();
    let want = json!({"kind": "linear", "family": {"a": 2, "b": 1, "c": 0, "d": 0}});
    ensure!(comps.len() == 1 && *comps[0] == want, "fitted {comps:?}");
    let certs = report.certificates();
    ensure!(
        !certs.is_empty()
            && certs
                .iter()
                .all(|c| c["verified"] == true && c["beyond_window"] == true),
        "certificates {certs:?}"
    );
    Ok(format!(
        "W = n and 2n, (2t, t) certified at {} points",
        certs.len()
    ))
}

// ---------------------------------------------------------------------------

fn check(number: usize, name: &str, f: fn() -> Outcome) -> bool {
    let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
        let msg = e
            .downcast_ref::<String>()
            .cloned()
            .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()));
        Err(format!("panicked: {}", msg.unwrap_or_default()))
    });
    match &outcome {
        Ok(detail) => println!("criterion {number} PASS  {name}: {detail}"),
        Err(why) => println!("criterion {number} FAIL  {name}: {why}"),
    }
    outcome.is_ok()
}

#[test]
fn acceptance() {
    let criteria: [Criterion; 7] = [
        ("diagonal p-powers", diagonal_powers),
        ("torus decomposition", torus_decomposition),
        ("jordan machinery", jordan_machinery),
        ("reduction soundness", reduction_soundness),
        ("set algebra", set_algebra),
        ("recurrence families", recurrence_families),
        ("torus end to end", torus_end_to_end),
    ];
    let passed: Vec<bool> = criteria
        .iter()
        .enumerate()
        .map(|(i, (name, f))| check(i + 1, name, *f))
        .collect();
    let failed: Vec<usize> = passed
        .iter()
        .enumerate()
        .filter(|(_, ok)| !**ok)
        .map(|(i, _)| i + 1)
        .collect();
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
