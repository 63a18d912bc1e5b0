//! Solving P(n₁) = Q(n₂) on a window: exact enumeration by sort-merge of
//! the two value lists, family fitting, and the classification transcript
//! saying which solution shape to expect.

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::Serialize;

use super::classify::{
    degenerate_check, exceptional_check, relatedness_reps, ExceptionalReport, RelVerdict,
    Relatedness,
};
use super::recurrence::{LinearRecurrence, Q};
use super::roots::{root_representation, RootRep};
use crate::mulgroup::{int_vec, IntVec};
use crate::setalg::{
    fit_structure, Domain, FitComponent, FitMode, FitResult, Window, DEFAULT_COMPONENT_CAP,
};

/// Which solution shape the classification predicts.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "shape", rename_all = "snake_case")]
pub enum ExpectedShape {
    /// The classification does not apply; only the fitted window result stands.
    Unclassified { reason: String },
    /// Not related within the search bound: finitely many solutions.
    FiniteOnly,
    /// Simply related, not exceptional: linear families plus finitely many points.
    LinearFamilies,
    /// Exceptional in some order: exponential families may occur.
    ExponentialFamilies,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Transcript {
    pub p_roots: Option<RootRep>,
    pub q_roots: Option<RootRep>,
    pub p_degenerate: Option<bool>,
    pub q_degenerate: Option<bool>,
    pub relatedness: Option<Relatedness>,
    /// The ordered pair (P, Q), then (Q, P).
    pub exceptional: Vec<ExceptionalReport>,
    pub expected: ExpectedShape,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PairSolution {
    pub window: u64,
    /// All (n₁, n₂) in [0, window]² with P(n₁) = Q(n₂), sorted.
    pub solutions: Vec<(u64, u64)>,
    pub fit: FitResult,
    pub transcript: Transcript,
}

/// Pairs with equal values, by sorting each value list and merging runs.
pub fn merge_solutions(p: &[Q], q: &[Q]) -> Vec<(u64, u64)> {
    let sorted = |v: &[Q]| {
        let mut idx: Vec<(Q, u64)> = v.iter().cloned().zip(0u64..).collect();
        idx.sort();
        idx
    };
    let (a, b) = (sorted(p), sorted(q));
    let (mut i, mut j) = (0, 0);
    let mut out = Vec::new();
    while i < a.len() && j < b.len() {
        match a[i].0.cmp(&b[j].0) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                let v = &a[i].0;
                let i_end = i + a[i..].iter().take_while(|x| &x.0 == v).count();
                let j_end = j + b[j..].iter().take_while(|x| &x.0 == v).count();
                for x in &a[i..i_end] {
                    for y in &b[j..j_end] {
                        out.push((x.1, y.1));
                    }
                }
                i = i_end;
                j = j_end;
            }
        }
    }
    out.sort();
    out
}

pub fn classify_pair(p: &LinearRecurrence, q: &LinearRecurrence, bound: u32) -> Transcript {
    let pr = root_representation(p).ok();
    let qr = root_representation(q).ok();
    let mut t = Transcript {
        p_roots: pr.clone(),
        q_roots: qr.clone(),
        p_degenerate: pr.as_ref().map(degenerate_check),
        q_degenerate: qr.as_ref().map(degenerate_check),
        relatedness: None,
        exceptional: Vec::new(),
        expected: ExpectedShape::FiniteOnly,
    };
    let unclassified = |reason: &str| ExpectedShape::Unclassified {
        reason: reason.into(),
    };
    let (Some(pr), Some(qr)) = (pr, qr) else {
        t.expected = unclassified("irrational characteristic roots");
        return t;
    };
    if t.p_degenerate == Some(true) || t.q_degenerate == Some(true) {
        t.expected = unclassified("degenerate recurrence");
        return t;
    }
    let rel = relatedness_reps(&pr, &qr, bound);
    t.expected = if rel.t.0 == 0 || rel.t.1 == 0 {
        unclassified("no characteristic root of modulus other than one")
    } else {
        match rel.verdict {
            RelVerdict::NotRelated => ExpectedShape::FiniteOnly,
            RelVerdict::DoublyRelated { .. } => unclassified("doubly related"),
            RelVerdict::Related { .. } => {
                let rev = relatedness_reps(&qr, &pr, bound);
                let forward = exceptional_check(&pr, &qr, &rel).ok();
                let backward = exceptional_check(&qr, &pr, &rev).ok();
                let exceptional = [&forward, &backward]
                    .iter()
                    .any(|r| r.as_ref().is_some_and(|r| r.exceptional));
                t.exceptional = forward.into_iter().chain(backward).collect();
                if exceptional {
                    ExpectedShape::ExponentialFamilies
                } else {
                    ExpectedShape::LinearFamilies
                }
            }
        }
    };
    t.relatedness = Some(rel);
    t
}

pub fn solve_pair(
    p: &LinearRecurrence,
    q: &LinearRecurrence,
    window: u64,
    bound: u32,
) -> PairSolution {
    let n = window as usize + 1;
    let solutions = merge_solutions(&p.terms(n), &q.terms(n));
    let points: Vec<IntVec> = solutions
        .iter()
        .map(|&(a, b)| int_vec(&[a as i64, b as i64]))
        .collect();
    let fit = fit_structure(
        &points,
        FitMode::Families,
        Window::new(window, window, Domain::N0),
        DEFAULT_COMPONENT_CAP,
    )
    .expect("window points are two-dimensional and inside the window");
    PairSolution {
        window,
        solutions,
        fit,
        transcript: classify_pair(p, q, bound),
    }
}

/// Substitutes `count` points of a fitted component beyond the window into
/// P(x) = Q(y); returns each point with its verdict.
pub fn substitution_check(
    p: &LinearRecurrence,
    q: &LinearRecurrence,
    component: &FitComponent,
    window: u64,
    count: usize,
) -> Vec<(IntVec, bool)> {
    let w = Window::new(window, window, Domain::N0);
    component
        .predictions(&w, count)
        .into_iter()
        .map(|pt| {
            let ok = holds_at(p, q, &pt);
            (pt, ok)
        })
        .collect()
}

/// P(x) = Q(y) at a point of N₀².
pub fn holds_at(p: &LinearRecurrence, q: &LinearRecurrence, pt: &[BigInt]) -> bool {
    match (pt[0].to_u64(), pt[1].to_u64()) {
        (Some(x), Some(y)) => p.term(x) == q.term(y),
        _ => false,
    }
}
