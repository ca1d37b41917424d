//! Sampling a two-level probability measure and reconstructing it from the
//! samples.

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;

use crate::measure::{AtomicMeasure, TwoLevelMeasure};
use crate::random::rng_from_seed;
use crate::{Error, Result};

/// `m` inner masses and an `m x n` matrix of sampled points.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoLevelSample {
    pub masses: Vec<f64>,
    pub points: Vec<Vec<usize>>,
}

/// Row `i`: draws `μ_i ~ ν`, records `‖μ_i‖` and `n` i.i.d. points from
/// `μ̄_i`.
pub fn sample_two_level(nu: &TwoLevelMeasure, m: usize, n: usize, seed: u64) -> Result<TwoLevelSample> {
    if (nu.mass() - 1.0).abs() > 1e-9 {
        return Err(Error::PreconditionViolated(format!("nu must be a probability measure, mass is {}", nu.mass())));
    }
    if nu.atoms().iter().any(|a| a.1.is_null()) {
        return Err(Error::PreconditionViolated("nu charges the null measure".into()));
    }
    let atoms = nu.atoms();
    let outer = WeightedIndex::new(atoms.iter().map(|a| a.0)).expect("positive weights");
    let inner: Vec<WeightedIndex<f64>> = atoms
        .iter()
        .map(|(_, mu)| WeightedIndex::new(mu.atoms().iter().map(|a| a.1)).expect("nonnull inner measure"))
        .collect();
    let mut rng = rng_from_seed(seed);
    let mut masses = Vec::with_capacity(m);
    let mut points = Vec::with_capacity(m);
    for _ in 0..m {
        let k = outer.sample(&mut rng);
        let mu = &atoms[k].1;
        masses.push(mu.mass());
        points.push((0..n).map(|_| mu.atoms()[inner[k].sample(&mut rng)].0).collect());
    }
    Ok(TwoLevelSample { masses, points })
}

/// `ν̂ = (1/m) Σ_i δ_{m_i Ξ_n(row i)}` on a space with `len` points.
pub fn reconstruct_two_level(sample: &TwoLevelSample, len: usize) -> Result<TwoLevelMeasure> {
    let TwoLevelSample { masses, points } = sample;
    if masses.len() != points.len() {
        return Err(Error::InvalidParams(format!("{} masses for {} rows", masses.len(), points.len())));
    }
    let m = masses.len() as f64;
    let mut atoms = Vec::with_capacity(points.len());
    for (i, (row, &mass)) in points.iter().zip(masses).enumerate() {
        if let Some(j) = row.iter().position(|&p| p >= len) {
            return Err(Error::IndexOutOfRange { field: format!("points[{i}][{j}]"), index: row[j], len });
        }
        let w = if row.is_empty() { 0.0 } else { mass / row.len() as f64 };
        let mu = AtomicMeasure::from_weights(row.iter().map(|&p| (p, w)))?;
        atoms.push((1.0 / m, mu));
    }
    TwoLevelMeasure::from_atoms(atoms)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dirac_round_trip() {
        let nu = TwoLevelMeasure::dirac(AtomicMeasure::dirac(1, 1.0), 1.0);
        let s = sample_two_level(&nu, 5, 4, 3).unwrap();
        assert!(s.masses.iter().all(|&m| m == 1.0));
        assert!(s.points.iter().flatten().all(|&p| p == 1));
        assert_eq!(reconstruct_two_level(&s, 2).unwrap(), nu);

        let nu2 = TwoLevelMeasure::dirac(AtomicMeasure::dirac(0, 2.0), 1.0);
        let s = sample_two_level(&nu2, 3, 2, 3).unwrap();
        assert!(s.masses.iter().all(|&m| m == 2.0));
    }

    #[test]
    fn identical_rows_merge() {
        let s = TwoLevelSample { masses: vec![1.0, 1.0], points: vec![vec![0, 1], vec![1, 0]] };
        let nu = reconstruct_two_level(&s, 2).unwrap();
        assert_eq!(nu.atoms().len(), 1);
        assert_eq!(nu.atoms()[0].0, 1.0);
    }

    #[test]
    fn preconditions() {
        let half = TwoLevelMeasure::dirac(AtomicMeasure::dirac(0, 1.0), 0.5);
        assert!(matches!(sample_two_level(&half, 1, 1, 0), Err(Error::PreconditionViolated(_))));
        let with_o =
            TwoLevelMeasure::from_atoms([(0.5, AtomicMeasure::dirac(0, 1.0)), (0.5, AtomicMeasure::null())]).unwrap();
        assert!(matches!(sample_two_level(&with_o, 1, 1, 0), Err(Error::PreconditionViolated(_))));
        let s = TwoLevelSample { masses: vec![1.0], points: vec![vec![3]] };
        assert!(matches!(reconstruct_two_level(&s, 2), Err(Error::IndexOutOfRange { .. })));
    }

    #[test]
    fn deterministic_given_seed() {
        let nu = TwoLevelMeasure::from_atoms([
            (0.3, AtomicMeasure::from_weights([(0, 1.0), (1, 2.0)]).unwrap()),
            (0.7, AtomicMeasure::dirac(2, 0.5)),
        ])
        .unwrap();
        assert_eq!(sample_two_level(&nu, 50, 5, 9).unwrap(), sample_two_level(&nu, 50, 5, 9).unwrap());
        assert_ne!(sample_two_level(&nu, 50, 5, 9).unwrap(), sample_two_level(&nu, 50, 5, 10).unwrap());
    }
}
