#![allow(clippy::needless_range_loop)]

use num_bigint::BigInt;
use num_integer::Integer;
use padiq::global::{
    almost_universality_verdict, enumerate_values, failure_classes, relevant_primes,
};
use padiq::lattice::{is_isotropic, FormMatrix};
use padiq::local::decide_representation;
use padiq::padic::rat;
use padiq::{TriState, Verdict};
use proptest::prelude::*;

fn diag(a: &[i64]) -> FormMatrix {
    FormMatrix::diagonal(a).unwrap()
}

fn fixtures() -> Vec<FormMatrix> {
    vec![
        diag(&[1, 1, 1, 9]),
        diag(&[1, 1, 25, 25]),
        diag(&[1, 1, 1, 1]),
        diag(&[1, 1, 1, 2]),
        diag(&[1, 1, 2, 4]),
        diag(&[1, 2, 5, 10]),
        diag(&[1, 1, 3, 3]),
        diag(&[1, 1, 1, 1, 1]),
        diag(&[2, 2, 2, 2, 2]),
        diag(&[1, 1, 1, 1, 4]),
        diag(&[1, 3, 9, 27, 81]),
        FormMatrix::from_gram2_i64(&[&[2, 1, 0, 0], &[1, 2, 0, 0], &[0, 0, 2, 1], &[0, 0, 1, 4]])
            .unwrap(),
        FormMatrix::from_gram2_i64(&[
            &[2, 1, 0, 0, 0],
            &[1, 2, 1, 0, 0],
            &[0, 1, 2, 1, 0],
            &[0, 0, 1, 2, 1],
            &[0, 0, 0, 1, 2],
        ])
        .unwrap(),
    ]
}

#[test]
fn scanned_values_are_locally_represented() {
    for l in fixtures() {
        let scan = enumerate_values(&l, 500).unwrap();
        let primes = relevant_primes(&l).unwrap();
        for &a in &scan.represented {
            let primitive = scan.is_primitively_represented(a);
            for &p in &primes {
                let v = decide_representation(&l, p, &rat(a as i64), false).unwrap();
                assert!(v.is_represented(), "{l}: {a} at {p}");
                if primitive {
                    let v = decide_representation(&l, p, &rat(a as i64), true).unwrap();
                    assert!(v.is_represented(), "{l}: {a} primitively at {p}");
                }
            }
        }
    }
}

#[test]
fn verdicts_are_backed_by_local_data() {
    for l in fixtures() {
        let v = almost_universality_verdict(&l).unwrap();
        let primes = relevant_primes(&l).unwrap();
        if v.almost_primitively_universal == TriState::Yes {
            assert!(v.per_prime.iter().all(|r| r.primitively_universal.is_yes()));
            for p in &primes {
                assert!(is_isotropic(&l, *p).unwrap(), "{l} anisotropic at {p}");
            }
        }
        if v.almost_primitively_universal == TriState::No {
            assert!(
                !failure_classes(&v).is_empty() || !v.progression_witnesses.is_empty(),
                "{l}"
            );
        }
        if v.almost_universal == TriState::No {
            assert!(!v.progression_witnesses.is_empty(), "{l}");
        }
        if l.rank() >= 5 && v.per_prime.iter().all(|r| r.universal) {
            assert_eq!(v.almost_primitively_universal, TriState::Yes, "{l}");
            assert!(v
                .per_prime
                .iter()
                .all(|r| matches!(r.primitively_universal, Verdict::Yes)));
        }
    }
}

fn positive_definite() -> impl Strategy<Value = FormMatrix> {
    (1usize..=4)
        .prop_flat_map(|n| {
            (
                prop::collection::vec(1i64..=6, n),
                prop::collection::vec(-2i64..=2, n * (n - 1) / 2),
            )
        })
        .prop_filter_map("positive definite", |(d, off)| {
            let n = d.len();
            let mut g = vec![vec![0i64; n]; n];
            let mut it = off.into_iter();
            for i in 0..n {
                g[i][i] = 2 * d[i];
                for j in i + 1..n {
                    let x = it.next().unwrap();
                    g[i][j] = x;
                    g[j][i] = x;
                }
            }
            let rows: Vec<&[i64]> = g.iter().map(|r| r.as_slice()).collect();
            FormMatrix::from_gram2_i64(&rows)
                .ok()
                .filter(|l| l.is_positive_definite())
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn scan_sets_and_witnesses_are_consistent(l in positive_definite(), bound in 1u64..400) {
        let s = enumerate_values(&l, bound).unwrap();
        for a in &s.excluded {
            prop_assert!(s.primitive_excluded.contains(a));
        }
        for a in &s.primitively_represented {
            prop_assert!(s.is_represented(*a));
        }
        prop_assert_eq!(s.represented.len() + s.excluded.len(), bound as usize);
        for (&value, w) in &s.witnesses {
            let v: Vec<BigInt> = w.iter().map(|&x| BigInt::from(x)).collect();
            prop_assert_eq!(l.q(&v), rat(value as i64));
            let g = w.iter().fold(0i64, |g, x| g.gcd(x));
            prop_assert_eq!(g == 1, s.is_primitively_represented(value));
        }
    }
}
