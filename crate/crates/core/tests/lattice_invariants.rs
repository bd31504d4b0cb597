use padiq::lattice::{det_square_class, is_isotropic, jordan_decompose, FormMatrix};
use padiq::local::{anisotropic_gap, residue_isotropy};
use padiq::verify::{random_basis_change, random_jordan_lattice, random_small_lattice};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const PRIMES: [u64; 3] = [2, 3, 5];

fn diag(a: &[i64]) -> FormMatrix {
    FormMatrix::diagonal(a).unwrap()
}

fn fixture_lattices() -> Vec<FormMatrix> {
    let mut v = vec![
        FormMatrix::hyperbolic_hat(),
        FormMatrix::a_plane_hat(),
        FormMatrix::hyperbolic(),
        FormMatrix::a_plane(),
        diag(&[1, 1]),
        diag(&[1, 1, 3, 3]),
        diag(&[1, 1, 1, 1]),
        diag(&[1, 1, 1, 9]),
        diag(&[1, 1, 25, 25]),
        diag(&[1, 1, 1, 2]),
        diag(&[1, 1, 2, 4]),
        diag(&[1, 1, 1]),
        FormMatrix::a_plane_hat().orthogonal_sum(&FormMatrix::a_plane()),
        FormMatrix::hyperbolic_hat().orthogonal_sum(&diag(&[2])),
    ];
    for t in 0..4 {
        v.push(FormMatrix::a_plane().orthogonal_sum(&FormMatrix::a_plane().scaled_by_int(1 << t)));
    }
    v
}

fn prime() -> impl Strategy<Value = u64> {
    prop::sample::select(PRIMES.to_vec())
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `{q(v) mod p^k}` over all `v mod p^k`.
fn value_set(l: &FormMatrix, p: u64, k: u32) -> Vec<bool> {
    let g2 = l.g2_i128().unwrap();
    let n = l.rank();
    let m = (p as i128).pow(k);
    let mut seen = vec![false; m as usize];
    let mut v = vec![0i128; n];
    loop {
        let mut s = 0i128;
        for i in 0..n {
            for j in 0..n {
                s += v[i] * g2[i][j] * v[j];
            }
        }
        seen[((s / 2).rem_euclid(m)) as usize] = true;
        let mut i = 0;
        loop {
            if i == n {
                return seen;
            }
            v[i] += 1;
            if v[i] < m {
                break;
            }
            v[i] = 0;
            i += 1;
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(600))]

    #[test]
    fn jordan_signature_is_basis_invariant(p in prime(), seed in any::<u64>()) {
        let mut r = rng(seed);
        let n = r.gen_range(1..=5);
        let l = random_jordan_lattice(p, n, 3, &mut r);
        let u = random_basis_change(&l, &mut r, 8);
        let a = jordan_decompose(&l, p).unwrap();
        let b = jordan_decompose(&u, p).unwrap();
        prop_assert_eq!(a.signature(), b.signature(), "{} vs {} at {}", l, u, p);
    }

    #[test]
    fn component_determinants_multiply_to_the_determinant(p in prime(), seed in any::<u64>()) {
        let l = random_small_lattice(p, &mut rng(seed));
        let js = jordan_decompose(&l, p).unwrap();
        let mut it = js.components.iter().map(|c| c.det_class(p));
        let first = it.next().unwrap();
        let prod = it.fold(first, |acc, d| acc.mul(&d));
        prop_assert!(prod.same_class(&det_square_class(&l, p).unwrap()), "{} at {}", l, p);
    }

    #[test]
    fn norm_lies_between_scale_and_twice_scale(p in prime(), seed in any::<u64>()) {
        let two = i64::from(p == 2);
        let l = random_small_lattice(p, &mut rng(seed));
        let js = jordan_decompose(&l, p).unwrap();
        prop_assert!([js.scale_exp(), js.scale_exp() + two].contains(&js.norm_exp()));
        for c in &js.components {
            prop_assert!([c.scale_exp, c.scale_exp + two].contains(&c.norm_exp));
            prop_assert!(p == 2 || c.proper);
            prop_assert!(c.proper || c.rank % 2 == 0);
        }
        let ranks: usize = js.components.iter().map(|c| c.rank).sum();
        prop_assert_eq!(ranks, l.rank());
        prop_assert!(js.components.windows(2).all(|w| w[0].scale_exp < w[1].scale_exp));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1500))]

    #[test]
    fn isotropy_agrees_with_residue_search(p in prime(), seed in any::<u64>()) {
        let l = random_small_lattice(p, &mut rng(seed));
        prop_assert_eq!(
            is_isotropic(&l, p).unwrap(),
            residue_isotropy(&l, p).unwrap().is_isotropic(),
            "{} at {}", l, p
        );
    }

    #[test]
    fn anisotropic_values_avoid_the_gap(p in prime(), seed in any::<u64>()) {
        let l = random_small_lattice(p, &mut rng(seed));
        if !is_isotropic(&l, p).unwrap() {
            let g = anisotropic_gap(&l, p).unwrap();
            prop_assert!(g.empirical_min <= g.bound, "{} at {}: {:?}", l, p, g);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(36))]

    #[test]
    fn jordan_splitting_has_the_same_values_mod_prime_powers(p in prime(), seed in any::<u64>()) {
        let l = random_small_lattice(p, &mut rng(seed));
        let n = l.rank() as u32;
        // Largest k with p^(kn) <= 2^20.
        let k = (1..=6u32).rev().find(|&k| (p as f64).powi((k * n) as i32) <= (1u64 << 20) as f64).unwrap();
        let split = jordan_decompose(&l, p).unwrap().to_form();
        prop_assert!(value_set(&l, p, k) == value_set(&split, p, k), "{} at {}, k = {}", l, p, k);
    }
}

#[test]
fn fixtures_isotropy_and_gap() {
    for p in PRIMES {
        for l in fixture_lattices() {
            let iso = is_isotropic(&l, p).unwrap();
            assert_eq!(
                iso,
                residue_isotropy(&l, p).unwrap().is_isotropic(),
                "{l} at {p}"
            );
            if !iso {
                let g = anisotropic_gap(&l, p).unwrap();
                assert!(g.empirical_min <= g.bound, "{l} at {p}: {g:?}");
            }
        }
    }
}
