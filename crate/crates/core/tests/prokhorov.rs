mod common;

use common::{oracle_feasible, oracle_prokhorov, random_pair, scaled};
use m2m_core::metrics::{prokhorov, prokhorov_feasible, two_level_prokhorov};
use m2m_core::random::{random_measure, random_space, rng_from_seed};
use m2m_core::{AtomicMeasure, TwoLevelMeasure, DEFAULT_TOL};
use proptest::prelude::*;

fn random_two_level(n: usize, rng: &mut impl rand::Rng) -> TwoLevelMeasure {
    let k = rng.random_range(1..=3);
    TwoLevelMeasure::from_atoms(
        (0..k).map(|_| (rng.random_range(1..=4) as f64 / 4.0, random_measure(n, 3, 0.25, rng))).collect::<Vec<_>>(),
    )
    .unwrap()
}

#[test]
fn known_two_point_distance() {
    let space = m2m_core::FiniteMetricSpace::new(vec![vec![0.0, 0.3], vec![0.3, 0.0]]).unwrap();
    let a = AtomicMeasure::dirac(0, 1.0);
    let b = AtomicMeasure::dirac(1, 1.0);
    assert_eq!(prokhorov(&a, &b, &space, DEFAULT_TOL).unwrap(), 0.3);
    let far = m2m_core::FiniteMetricSpace::new(vec![vec![0.0, 5.0], vec![5.0, 0.0]]).unwrap();
    assert_eq!(prokhorov(&a, &b, &far, DEFAULT_TOL).unwrap(), 1.0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn matches_brute_force_oracle(seed in any::<u64>(), n in 1usize..=6) {
        let (space, mu, eta) = random_pair(n, n, seed);
        let fast = prokhorov(&mu, &eta, &space, DEFAULT_TOL).unwrap();
        let slow = oracle_prokhorov(&space, &mu, &eta);
        prop_assert!((fast - slow).abs() <= 1e-6, "fast {fast} oracle {slow}");
    }

    #[test]
    fn feasibility_agrees_with_oracle(seed in any::<u64>(), k in 1u32..64) {
        let (space, mu, eta) = random_pair(5, 4, seed);
        let eps = k as f64 / 32.0 + 1.0 / 1024.0;
        prop_assert_eq!(prokhorov_feasible(&mu, &eta, &space, eps).unwrap(), oracle_feasible(&space, &mu, &eta, eps));
    }

    #[test]
    fn feasibility_is_monotone(seed in any::<u64>()) {
        let (space, mu, eta) = random_pair(6, 5, seed);
        let d = prokhorov(&mu, &eta, &space, DEFAULT_TOL).unwrap();
        for k in 1..=40 {
            let eps = k as f64 / 16.0;
            if eps != d {
                prop_assert_eq!(prokhorov_feasible(&mu, &eta, &space, eps).unwrap(), eps > d);
            }
        }
    }

    #[test]
    fn metric_axioms(seed in any::<u64>()) {
        let mut rng = rng_from_seed(seed);
        let space = random_space(7, &mut rng);
        let m: Vec<AtomicMeasure> = (0..3).map(|_| random_measure(7, 6, 0.25, &mut rng)).collect();
        let d = |a: &AtomicMeasure, b: &AtomicMeasure| prokhorov(a, b, &space, DEFAULT_TOL).unwrap();
        prop_assert_eq!(d(&m[0], &m[0]), 0.0);
        prop_assert!((d(&m[0], &m[1]) - d(&m[1], &m[0])).abs() <= 1e-9);
        prop_assert!(d(&m[0], &m[2]) <= d(&m[0], &m[1]) + d(&m[1], &m[2]) + 3e-9);
        let (a, b) = (m[0].mass(), m[1].mass());
        prop_assert!((a - b).abs() <= d(&m[0], &m[1]) + 1e-12);
        prop_assert!(d(&m[0], &m[1]) <= a.max(b) + 1e-12);
    }

    #[test]
    fn contractions_do_not_increase_distance(seed in any::<u64>()) {
        let (space, mu, eta) = random_pair(6, 5, seed);
        let half = scaled(&space, 0.5);
        let d = prokhorov(&mu, &eta, &space, DEFAULT_TOL).unwrap();
        let dh = prokhorov(&mu, &eta, &half, DEFAULT_TOL).unwrap();
        prop_assert!(dh <= d + 1e-12);
    }

    #[test]
    fn two_level_metric_axioms(seed in any::<u64>()) {
        let mut rng = rng_from_seed(seed);
        let space = random_space(5, &mut rng);
        let v: Vec<TwoLevelMeasure> = (0..3).map(|_| random_two_level(5, &mut rng)).collect();
        let d = |a: &TwoLevelMeasure, b: &TwoLevelMeasure| two_level_prokhorov(a, b, &space, DEFAULT_TOL).unwrap();
        prop_assert_eq!(d(&v[0], &v[0]), 0.0);
        prop_assert!((d(&v[0], &v[1]) - d(&v[1], &v[0])).abs() <= 1e-9);
        prop_assert!(d(&v[0], &v[2]) <= d(&v[0], &v[1]) + d(&v[1], &v[2]) + 3e-9);
        let (a, b) = (v[0].mass(), v[1].mass());
        prop_assert!((a - b).abs() <= d(&v[0], &v[1]) + 1e-12);
        prop_assert!(d(&v[0], &v[1]) <= a.max(b) + 1e-12);
    }
}
