use num_bigint::BigInt;
use num_rational::BigRational;
use padiq::lattice::FormMatrix;
use padiq::local::{
    decide_representation, is_primitively_universal_local, is_universal_local, spectrum,
    verify_witness,
};
use padiq::padic::SquareClass;
use padiq::verify::{random_basis_change, random_small_lattice};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn prime() -> impl Strategy<Value = u64> {
    prop::sample::select(vec![2u64, 3, 5])
}

fn lattice(p: u64, seed: u64) -> FormMatrix {
    random_small_lattice(p, &mut ChaCha8Rng::seed_from_u64(seed))
}

fn unit(p: u64, rng: &mut impl Rng) -> i64 {
    loop {
        let u = rng.gen_range(1..8 * p as i64);
        if u % p as i64 != 0 {
            return u;
        }
    }
}

/// A lattice whose norm lies in `p^k Z_p`: a random form scaled by `p^k`, or
/// for `p = 2` sometimes a scaled improper plane.
fn deep_complement(p: u64, k: u32, rng: &mut impl Rng) -> FormMatrix {
    if p == 2 && rng.gen_bool(0.3) {
        let plane = if rng.gen_bool(0.5) {
            FormMatrix::hyperbolic()
        } else {
            FormMatrix::a_plane()
        };
        return plane.scaled_by_int(1 << (k - 1));
    }
    let rank = rng.gen_range(1..=3);
    let entries: Vec<i64> = (0..rank)
        .map(|_| unit(p, rng) * (p as i64).pow(k + rng.gen_range(0..2)))
        .collect();
    FormMatrix::diagonal(&entries).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn primitive_representation_implies_representation(p in prime(), seed in any::<u64>()) {
        let l = lattice(p, seed);
        for c in SquareClass::up_to(p, 3) {
            let a = c.representative_rational();
            let prim = decide_representation(&l, p, &a, true).unwrap();
            let any = decide_representation(&l, p, &a, false).unwrap();
            prop_assert!(!prim.is_represented() || any.is_represented(), "{} at {}: {}", l, p, c);
            for v in [&prim, &any] {
                prop_assert!(!v.is_represented() || verify_witness(&l, v));
            }
        }
    }

    #[test]
    fn representation_is_invariant_under_unit_squares(
        p in prime(),
        seed in any::<u64>(),
        primitive in any::<bool>(),
    ) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let l = random_small_lattice(p, &mut rng);
        let c = unit(p, &mut rng);
        for class in SquareClass::up_to(p, 3) {
            let a = class.representative_rational();
            let scaled = &a * BigRational::from_integer(BigInt::from(c * c));
            prop_assert_eq!(
                decide_representation(&l, p, &a, primitive).unwrap().is_represented(),
                decide_representation(&l, p, &scaled, primitive).unwrap().is_represented(),
                "{} at {}: {} vs {}^2 times it", l, p, class, c
            );
        }
    }

    #[test]
    fn unit_plus_deep_complement_has_few_unit_classes(p in prime(), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let k = if p == 2 { 2 } else { 1 };
        let l = FormMatrix::diagonal(&[unit(p, &mut rng)]).unwrap().orthogonal_sum(&deep_complement(p, k, &mut rng));
        let l = random_basis_change(&l, &mut rng, 4);
        let units = spectrum(&l, p, 0, false).unwrap();
        prop_assert!(units.len() <= if p == 2 { 2 } else { 1 }, "{} at {}: {:?}", l, p, units);
    }

    #[test]
    fn proper_unimodular_plane_plus_norm_four_is_not_universal(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let plane = FormMatrix::diagonal(&[unit(2, &mut rng), unit(2, &mut rng)]).unwrap();
        let l = plane.orthogonal_sum(&deep_complement(2, 2, &mut rng));
        let l = random_basis_change(&l, &mut rng, 4);
        prop_assert!(!is_universal_local(&l, 2).unwrap().universal, "{}", l);
    }

    #[test]
    fn universality_reports_are_consistent(p in prime(), seed in any::<u64>()) {
        let l = lattice(p, seed);
        let r = is_primitively_universal_local(&l, p).unwrap();
        if r.primitively_universal.is_yes() {
            prop_assert!(r.universal, "{} at {}", l, p);
        }
        if r.primitively_universal.is_yes() || r.primitively_universal.is_no() {
            prop_assert!(!r.trace.is_empty());
        }
    }
}
