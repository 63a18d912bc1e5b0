use std::sync::Arc;

use charp_core::affine::matrix::{mat_mul, RMat, RVec};
use charp_core::affine::{
    affine_iterate, binom_mod_p, binom_period, conjugate_pair, jordan_block, jordan_block_power,
    jordan_form, AffineMap,
};
use charp_core::funcfield::{GaloisField, Poly, RatFunc};
use proptest::prelude::*;

const CAP: usize = 4096;

fn field(p: u64) -> Arc<GaloisField> {
    Arc::new(GaloisField::prime(p).unwrap())
}

fn entry(p: u64) -> impl Strategy<Value = (Vec<u64>, Vec<u64>)> {
    (
        prop::collection::vec(0..p, 0..=3),
        prop::collection::vec(0..p, 1..=2),
    )
}

fn build(f: &Arc<GaloisField>, e: &(Vec<u64>, Vec<u64>)) -> RatFunc {
    RatFunc::new(
        Poly::new(f.clone(), e.0.clone()),
        Poly::new(f.clone(), e.1.clone()),
    )
    .unwrap_or_else(|_| RatFunc::from_poly(Poly::new(f.clone(), e.0.clone())))
}

fn map_strategy(p: u64) -> impl Strategy<Value = (usize, Vec<(Vec<u64>, Vec<u64>)>)> {
    (1usize..=3).prop_flat_map(move |d| (Just(d), prop::collection::vec(entry(p), d * d + 2 * d)))
}

fn build_map(
    f: &Arc<GaloisField>,
    d: usize,
    raw: &[(Vec<u64>, Vec<u64>)],
) -> Option<(AffineMap, RVec)> {
    let vals: Vec<RatFunc> = raw.iter().map(|e| build(f, e)).collect();
    let a: RMat = (0..d).map(|i| vals[i * d..(i + 1) * d].to_vec()).collect();
    let b = vals[d * d..d * d + d].to_vec();
    let x = vals[d * d + d..].to_vec();
    AffineMap::new(a, b).ok().map(|m| (m, x))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn powering_equals_sequential((d, raw) in map_strategy(3)) {
        let f = field(3);
        let Some((phi, x)) = build_map(&f, d, &raw) else { return Ok(()) };
        let mut seq = x.clone();
        for n in 0..=30u64 {
            match affine_iterate(&phi, &x, n, CAP) {
                Ok(v) => prop_assert_eq!(&v, &seq),
                Err(_) => break,
            }
            seq = phi.apply(&seq);
        }
    }

    #[test]
    fn reduced_pair_equivalence(p in prop::sample::select(vec![2u64, 3]),
                                 raw1 in prop::collection::vec(entry(3), 8),
                                 raw2 in prop::collection::vec(entry(3), 8),
                                 d in 1usize..=2) {
        let f = field(p);
        let red = |raw: &[(Vec<u64>, Vec<u64>)]| -> Vec<(Vec<u64>, Vec<u64>)> {
            raw.iter().map(|(n, dd)| (n.iter().map(|c| c % p).collect(), dd.iter().map(|c| c % p).collect())).collect()
        };
        let (Some((phi1, a1)), Some((phi2, a2))) = (build_map(&f, d, &red(&raw1)[..d * d + 2 * d]), build_map(&f, d, &red(&raw2)[..d * d + 2 * d])) else {
            return Ok(());
        };
        let Ok(pair) = conjugate_pair(&phi1, &phi2, &a1, &a2) else { return Ok(()) };
        let o1: Vec<RVec> = (0..=10).map(|n| affine_iterate(&phi1, &a1, n, CAP).unwrap()).collect();
        let o2: Vec<RVec> = (0..=10).map(|n| affine_iterate(&phi2, &a2, n, CAP).unwrap()).collect();
        for n in 0..=10usize {
            for m in 0..=10usize {
                prop_assert_eq!(o1[n] == o2[m], pair.holds(n as i64, m as i64, CAP).unwrap());
            }
        }
    }

    #[test]
    fn jordan_reconstructs(raw in prop::collection::vec(entry(3), 4)) {
        let f = field(3);
        let vals: Vec<RatFunc> = raw.iter().map(|e| build(&f, e)).collect();
        let a: RMat = vec![vals[0..2].to_vec(), vals[2..4].to_vec()];
        if let Ok(j) = jordan_form(&a) {
            prop_assert_eq!(mat_mul(&mat_mul(&j.c_inv, &j.j()), &j.c), a);
            prop_assert_eq!(j.blocks.iter().map(|b| b.1).sum::<usize>(), 2);
        }
    }

    #[test]
    fn block_power_is_multiplicative(p in prop::sample::select(vec![2u64, 3]),
                                     lam in entry(3), l in 1usize..=4, n in 0u64..40, m in 0u64..40) {
        let f = field(p);
        let lam = build(&f, &(lam.0.iter().map(|c| c % p).collect(), lam.1.iter().map(|c| c % p).collect()));
        if lam.is_zero() {
            return Ok(());
        }
        let prod = mat_mul(&jordan_block_power(&lam, l, n).unwrap(), &jordan_block_power(&lam, l, m).unwrap());
        prop_assert_eq!(prod, jordan_block_power(&lam, l, n + m).unwrap());
    }
}

#[test]
fn block_power_matches_iterated_products() {
    for p in [2u64, 3] {
        let f = field(p);
        let lam = RatFunc::new(
            Poly::from_ints(f.clone(), &[1, 1]),
            Poly::from_ints(f.clone(), &[0, 1]),
        )
        .unwrap();
        for l in 1..=4usize {
            let j = jordan_block(&lam, l);
            let mut acc = jordan_block_power(&lam, l, 0).unwrap();
            for n in 0..=64u64 {
                assert_eq!(
                    jordan_block_power(&lam, l, n).unwrap(),
                    acc,
                    "p={p} l={l} n={n}"
                );
                acc = mat_mul(&acc, &j);
            }
        }
    }
}

#[test]
fn binomial_period_is_minimal() {
    for p in [2u64, 3, 5] {
        for l in 1..=9u64 {
            let q = binom_period(l, p);
            let table = |n: u64| (0..l).map(|k| binom_mod_p(n, k, p)).collect::<Vec<_>>();
            for n in 0..200 {
                assert_eq!(table(n), table(n + q));
            }
            // a smaller p-power is not a period
            if q > 1 {
                let smaller = q / p;
                assert!((0..200).any(|n| table(n) != table(n + smaller)));
            }
        }
    }
}
