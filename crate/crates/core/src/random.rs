//! Seeded random instances and seed derivation.

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::measure::{AtomicMeasure, TwoLevelMeasure};
use crate::space::FiniteMetricSpace;
use crate::M2MSpace;

pub type SimRng = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> SimRng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed for the `index`-th independent stream derived from `seed`.
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    splitmix64(seed ^ splitmix64(index.wrapping_add(0x5851_F42D_4C95_7F2D)))
}

/// A random metric on `n` points: shortest-path closure of a complete graph
/// with edge lengths in `{1/8, 2/8, ..., 2}`. Dyadic lengths keep the
/// closure exact in floating point.
pub fn random_space(n: usize, rng: &mut impl Rng) -> FiniteMetricSpace {
    let mut d = vec![0.0; n * n];
    for i in 0..n {
        for j in (i + 1)..n {
            let w = rng.random_range(1..=16) as f64 / 8.0;
            d[i * n + j] = w;
            d[j * n + i] = w;
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let via = d[i * n + k] + d[k * n + j];
                if via < d[i * n + j] {
                    d[i * n + j] = via;
                }
            }
        }
    }
    let labels = (0..n).map(|i| format!("p{i}")).collect();
    FiniteMetricSpace::from_trusted(labels, d)
}

/// A random atomic measure on up to `max_support` distinct points of an
/// `n`-point space, with weights `mass_scale * k / 4`, `k` in `1..=8`.
pub fn random_measure(n: usize, max_support: usize, mass_scale: f64, rng: &mut impl Rng) -> AtomicMeasure {
    let size = rng.random_range(1..=max_support.min(n).max(1));
    let points = sample(rng, n, size);
    AtomicMeasure::from_weights(
        points.into_iter().map(|p| (p, mass_scale * rng.random_range(1..=8) as f64 / 4.0)).collect::<Vec<_>>(),
    )
    .expect("generated weights are positive")
}

/// A random element of the dense class of finite atomic m2m spaces.
///
/// Outer weights are drawn from `{1/4, ..., 2}`; inner weights are scaled by
/// `mass_scale`. Deterministic in `seed`.
pub fn random_m2m(n_points: usize, max_atoms: usize, max_inner: usize, mass_scale: f64, seed: u64) -> M2MSpace {
    assert!(n_points >= 1 && max_atoms >= 1 && max_inner >= 1, "sizes must be positive");
    let mut rng = rng_from_seed(seed);
    let space = random_space(n_points, &mut rng);
    let n_atoms = rng.random_range(1..=max_atoms);
    let atoms: Vec<(f64, AtomicMeasure)> = (0..n_atoms)
        .map(|_| {
            let w = rng.random_range(1..=8) as f64 / 4.0;
            (w, random_measure(n_points, max_inner, mass_scale, &mut rng))
        })
        .collect();
    let nu = TwoLevelMeasure::from_atoms(atoms).expect("generated weights are positive");
    M2MSpace::new(space, nu).expect("generated atoms live on the space")
}

/// A uniformly random permutation of `0..n`.
pub fn random_permutation(n: usize, rng: &mut impl Rng) -> Vec<usize> {
    use rand::seq::SliceRandom;
    let mut p: Vec<usize> = (0..n).collect();
    p.shuffle(rng);
    p
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::Metric;

    #[test]
    fn deterministic_in_seed() {
        assert_eq!(random_m2m(5, 3, 3, 1.0, 7), random_m2m(5, 3, 3, 1.0, 7));
        assert_ne!(random_m2m(5, 3, 3, 1.0, 7), random_m2m(5, 3, 3, 1.0, 8));
    }

    #[test]
    fn single_point_space() {
        let x = random_m2m(1, 4, 3, 2.0, 1);
        assert_eq!(x.space().len(), 1);
        assert!(x.nu().atoms().iter().all(|(_, mu)| mu.support() == vec![0]));
    }

    #[test]
    fn outputs_validate() {
        for seed in 0..1000 {
            let x = random_m2m(1 + (seed as usize % 6), 4, 4, 1.5, seed);
            let again = FiniteMetricSpace::new(x.space().to_matrix()).expect("valid metric");
            assert_eq!(again.len(), x.space().len());
            assert!(x.nu().atoms().iter().all(|(w, _)| *w > 0.0));
            assert!(x.nu().max_point().unwrap() < x.space().len());
            for i in 0..again.len() {
                for j in 0..again.len() {
                    if i != j {
                        assert!(again.distance(i, j) > 0.0);
                    }
                }
            }
        }
    }

    #[test]
    fn derived_seeds_differ() {
        let s: std::collections::HashSet<u64> = (0..1000).map(|i| derive_seed(42, i)).collect();
        assert_eq!(s.len(), 1000);
        assert_ne!(derive_seed(1, 0), derive_seed(2, 0));
    }
}
