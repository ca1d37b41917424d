use m2m_core::metrics::{d2gp_bounds, d2gp_lower_bound, validate_cross_block, D2gpOptions};
use m2m_core::random::{random_m2m, random_permutation, rng_from_seed};
use m2m_core::{M2MSpace, Metric};
use proptest::prelude::*;

fn opts(seed: u64) -> D2gpOptions {
    D2gpOptions { seed, max_evaluations: 400_000, ..D2gpOptions::default() }
}

fn relabeled(x: &M2MSpace, seed: u64) -> M2MSpace {
    let perm = random_permutation(x.space().len(), &mut rng_from_seed(seed));
    x.permuted(&perm).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn self_and_relabeled_distance_vanish(seed in any::<u64>()) {
        let x = random_m2m(5, 3, 3, 0.25, seed);
        let b = d2gp_bounds(&x, &x, &opts(seed)).unwrap();
        prop_assert!(b.lower <= b.upper);
        prop_assert!(b.upper <= 1e-6, "self upper {}", b.upper);
        let y = relabeled(&x, seed ^ 1);
        let b = d2gp_bounds(&x, &y, &opts(seed)).unwrap();
        prop_assert!(b.upper <= 1e-6, "relabeled upper {}", b.upper);
    }

    #[test]
    fn bounds_are_ordered_and_witnessed(s1 in any::<u64>(), s2 in any::<u64>()) {
        let x = random_m2m(4, 3, 3, 0.25, s1);
        let y = random_m2m(5, 3, 3, 0.25, s2);
        let b = d2gp_bounds(&x, &y, &opts(s1)).unwrap();
        prop_assert!(b.lower <= b.upper);
        prop_assert!(b.lower >= (x.mass() - y.mass()).abs() - 1e-12);
        prop_assert!(b.upper <= x.mass().max(y.mass()) + 1e-12);
        prop_assert!(b.lower >= d2gp_lower_bound(&x, &y).unwrap().min(b.upper));
        let w = b.witness.as_ref().unwrap();
        prop_assert_eq!((w.rows(), w.cols()), (x.space().len(), y.space().len()));
        prop_assert_eq!(validate_cross_block(w, x.space(), y.space(), 1e-9).unwrap(), None);
    }

    #[test]
    fn argument_order_does_not_matter(s1 in any::<u64>(), s2 in any::<u64>()) {
        let x = random_m2m(4, 3, 3, 0.25, s1);
        let y = random_m2m(4, 3, 3, 0.25, s2);
        let a = d2gp_bounds(&x, &y, &opts(7)).unwrap();
        let b = d2gp_bounds(&y, &x, &opts(7)).unwrap();
        prop_assert_eq!(a.lower, b.lower);
        prop_assert_eq!(a.upper, b.upper);
        prop_assert_eq!(a.witness.unwrap().transpose(), b.witness.unwrap());
    }

    #[test]
    fn lower_bounds_respect_the_triangle_inequality(s1 in any::<u64>(), s2 in any::<u64>(), s3 in any::<u64>()) {
        let x = random_m2m(4, 2, 3, 0.25, s1);
        let y = random_m2m(4, 2, 3, 0.25, s2);
        let z = random_m2m(4, 2, 3, 0.25, s3);
        let xz = d2gp_bounds(&x, &z, &opts(0)).unwrap();
        let xy = d2gp_bounds(&x, &y, &opts(0)).unwrap();
        let yz = d2gp_bounds(&y, &z, &opts(0)).unwrap();
        prop_assert!(xz.lower <= xy.upper + yz.upper + 1e-9);
    }
}

#[test]
fn deterministic_in_seed() {
    let x = random_m2m(5, 3, 3, 0.25, 11);
    let y = random_m2m(5, 3, 3, 0.25, 12);
    assert_eq!(d2gp_bounds(&x, &y, &opts(3)).unwrap(), d2gp_bounds(&x, &y, &opts(3)).unwrap());
}
