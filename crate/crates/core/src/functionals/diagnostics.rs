//! The mass cutoff `f_K` and compactness diagnostics.

use serde::Serialize;

use crate::functionals::distribution::{distance_distribution, mass_distribution, DistributionSummary};
use crate::functionals::modulus::modulus_mass_distribution;
use crate::measure::TwoLevelMeasure;
use crate::{Error, M2MSpace, Result};

/// `g_K(x)`: 1 on `[0, K/2]`, `2 - 2x/K` on `[K/2, K]`, 0 beyond.
pub fn g_k(k: f64, x: f64) -> f64 {
    if x <= k / 2.0 {
        1.0
    } else if x < k {
        2.0 - 2.0 * x / k
    } else {
        0.0
    }
}

/// `f_K · ν`: each outer weight multiplied by `g_K` of the inner mass.
pub fn apply_fk(nu: &TwoLevelMeasure, k: f64) -> Result<TwoLevelMeasure> {
    if !(k > 0.0) {
        return Err(Error::PreconditionViolated(format!("K must be positive, got {k}")));
    }
    Ok(nu.with_density(|mu| g_k(k, mu.mass())))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProfileRow {
    pub k: f64,
    pub delta: f64,
    /// `V_δ(mm f_K·ν)`
    pub modulus: f64,
    /// `DD(mm f_K·ν)`
    pub distance_distribution: DistributionSummary,
    /// `mass_* ν`
    pub mass_distribution: DistributionSummary,
}

/// One row per `(K, δ)` pair, `K` major.
pub fn compactness_profile(x: &M2MSpace, k_grid: &[f64], delta_grid: &[f64]) -> Result<Vec<ProfileRow>> {
    if k_grid.is_empty() || delta_grid.is_empty() {
        return Err(Error::PreconditionViolated("grids must be nonempty".into()));
    }
    if let Some(v) = k_grid.iter().chain(delta_grid).find(|v| !(**v > 0.0 && v.is_finite())) {
        return Err(Error::PreconditionViolated(format!("grid values must be positive, got {v}")));
    }
    let masses = mass_distribution(x.nu()).summary();
    let mut rows = Vec::with_capacity(k_grid.len() * delta_grid.len());
    for &k in k_grid {
        let mm = apply_fk(x.nu(), k)?.moment_measure();
        let dd = distance_distribution(&mm, x.space()).summary();
        for &delta in delta_grid {
            rows.push(ProfileRow {
                k,
                delta,
                modulus: modulus_mass_distribution(&mm, x.space(), delta)?,
                distance_distribution: dd,
                mass_distribution: masses,
            });
        }
    }
    Ok(rows)
}

/// Membership in `A_N`: at most `N` support points, diameter, total mass
/// and every inner mass at most `N`.
pub fn is_in_a_n(x: &M2MSpace, n: usize) -> Result<bool> {
    if n == 0 {
        return Err(Error::PreconditionViolated("N must be at least 1".into()));
    }
    let bound = n as f64;
    let support = x.effective_support();
    Ok(support.len() <= n
        && x.space().diameter_of(&support) <= bound
        && x.mass() <= bound
        && x.nu().atoms().iter().all(|a| a.1.mass() <= bound))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::AtomicMeasure;
    use crate::FiniteMetricSpace;

    #[test]
    fn cutoff_examples() {
        assert_eq!(g_k(10.0, 7.5), 0.5);
        assert_eq!(g_k(10.0, 10.0), 0.0);
        assert_eq!(g_k(10.0, 5.0), 1.0);
        let nu = TwoLevelMeasure::from_atoms([
            (1.0, AtomicMeasure::dirac(0, 10.0)),
            (2.0, AtomicMeasure::dirac(0, 7.5)),
            (3.0, AtomicMeasure::dirac(0, 1.0)),
        ])
        .unwrap();
        let f = apply_fk(&nu, 10.0).unwrap();
        let expected =
            TwoLevelMeasure::from_atoms([(1.0, AtomicMeasure::dirac(0, 7.5)), (3.0, AtomicMeasure::dirac(0, 1.0))])
                .unwrap();
        assert_eq!(f, expected);
        assert_eq!(apply_fk(&nu, 100.0).unwrap(), nu);
    }

    #[test]
    fn a_n_membership() {
        let pt = FiniteMetricSpace::new(vec![vec![0.0]]).unwrap();
        let x = M2MSpace::new(pt, TwoLevelMeasure::dirac(AtomicMeasure::dirac(0, 1.0), 1.0)).unwrap();
        assert!(is_in_a_n(&x, 1).unwrap());
        let wide = FiniteMetricSpace::new(vec![vec![0.0, 5.0], vec![5.0, 0.0]]).unwrap();
        let mu = AtomicMeasure::from_weights([(0, 0.5), (1, 0.5)]).unwrap();
        let y = M2MSpace::new(wide, TwoLevelMeasure::dirac(mu, 1.0)).unwrap();
        assert!(!is_in_a_n(&y, 4).unwrap());
        assert!(is_in_a_n(&y, 5).unwrap());
    }

    #[test]
    fn profile_rows() {
        let s = FiniteMetricSpace::new(vec![vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        let mu = AtomicMeasure::from_weights([(0, 0.25), (1, 0.25)]).unwrap();
        let x = M2MSpace::new(s.clone(), TwoLevelMeasure::dirac(mu.clone(), 2.0)).unwrap();
        let rows = compactness_profile(&x, &[1.0, 100.0], &[0.1, 1.0]).unwrap();
        assert_eq!(rows.len(), 4);
        let mm = x.nu().moment_measure();
        assert_eq!(rows[3].modulus, modulus_mass_distribution(&mm, &s, 1.0).unwrap());
        assert!((rows[3].distance_distribution.total_weight - 1.0).abs() < 1e-15);
        assert!(compactness_profile(&x, &[], &[1.0]).is_err());
        assert!(compactness_profile(&x, &[1.0], &[0.0]).is_err());
    }
}
