use std::sync::Arc;

use charp_core::funcfield::{GaloisField, Poly, RatFunc};
use charp_core::mulgroup::{
    gaussian_rank, group_basis, int_vec, mat_mul, mul_log, smith, IntMat, Lattice,
};
use num_bigint::BigInt;
use num_traits::Zero;
use proptest::prelude::*;

fn f3() -> Arc<GaloisField> {
    Arc::new(GaloisField::prime(3).unwrap())
}

fn nonzero_ratfunc(f: &Arc<GaloisField>, n: &[u64], d: &[u64]) -> Option<RatFunc> {
    let x = RatFunc::new(
        Poly::new(f.clone(), n.to_vec()),
        Poly::new(f.clone(), d.to_vec()),
    )
    .ok()?;
    (!x.is_zero()).then_some(x)
}

fn small_poly() -> impl Strategy<Value = Vec<u64>> {
    prop::collection::vec(0u64..3, 1..=7)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]
    #[test]
    fn log_round_trip(n in small_poly(), d in small_poly()) {
        let f = f3();
        let Some(x) = nonzero_ratfunc(&f, &n, &d) else { return Ok(()) };
        let l = mul_log(&x).unwrap();
        prop_assert!(l.support.values().all(|&e| e != 0));
        prop_assert_eq!(l.exp(&f), x);
    }
}

proptest! {
    #[test]
    fn rank_matches_gaussian_elimination(gens in prop::collection::vec((small_poly(), small_poly()), 1..5)) {
        let f = f3();
        let xs: Vec<RatFunc> = gens.iter().filter_map(|(n, d)| nonzero_ratfunc(&f, n, d)).collect();
        if xs.is_empty() {
            return Ok(());
        }
        let b = group_basis(&xs).unwrap();
        let rows: IntMat = xs
            .iter()
            .map(|x| b.exponent_vector(&mul_log(x).unwrap()).unwrap())
            .collect();
        prop_assert_eq!(b.rank(), gaussian_rank(&rows));
        for x in &xs {
            prop_assert!(b.coordinates(x).unwrap().is_some());
        }
    }

    #[test]
    fn membership_matches_exhaustive_search(
        basis in prop::collection::vec(prop::collection::vec(-4i64..=4, 3), 1..=3),
        v in prop::collection::vec(-30i64..=30, 3),
    ) {
        let Ok(l) = Lattice::from_i64(3, &basis) else { return Ok(()) };
        let target = int_vec(&v);
        let got = l.member(&target).unwrap();
        if let Some(c) = &got {
            prop_assert_eq!(l.combine(c), target.clone());
        }
        // exhaustive over coefficients |c| <= 20
        let r = basis.len();
        let mut found = false;
        let mut idx = vec![-20i64; r];
        'search: loop {
            let s: Vec<i64> = (0..3).map(|j| (0..r).map(|i| idx[i] * basis[i][j]).sum()).collect();
            if s == v {
                found = true;
                break 'search;
            }
            let mut i = 0;
            loop {
                if i == r {
                    break 'search;
                }
                idx[i] += 1;
                if idx[i] <= 20 {
                    break;
                }
                idx[i] = -20;
                i += 1;
            }
        }
        if found {
            prop_assert!(got.is_some());
        }
        // coordinates are unique, so a member found by the lattice with small
        // coordinates must be found by the search
        if let Some(c) = got {
            if c.iter().all(|x| x.magnitude() <= &20u32.into()) {
                prop_assert!(found);
            }
        }
    }

    #[test]
    fn smith_form_is_diagonal_and_divisible(
        rows in prop::collection::vec(prop::collection::vec(-6i64..=6, 3), 1..=3),
    ) {
        let b: IntMat = rows.iter().map(|r| int_vec(r)).collect();
        let (u, d, v) = smith(&b, 3);
        prop_assert_eq!(mat_mul(&mat_mul(&u, &b), &v), d.clone());
        let n = d.len().min(3);
        for i in 0..d.len() {
            for j in 0..3 {
                if i != j {
                    prop_assert!(d[i][j].is_zero());
                }
            }
        }
        for i in 0..n.saturating_sub(1) {
            let (a, c) = (&d[i][i], &d[i + 1][i + 1]);
            prop_assert!(*a >= BigInt::zero());
            if a.is_zero() {
                prop_assert!(c.is_zero());
            } else {
                prop_assert!((c % a).is_zero());
            }
        }
    }
}
