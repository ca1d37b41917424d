//! Prokhorov distance between two-level measures.
//!
//! The outer space is the set of inner atoms of both measures, metrised by
//! the inner Prokhorov distance. As for one level, only the distances
//! between an atom of `ν` and an atom of `λ` matter, so the outer problem is
//! again bipartite.

use crate::measure::TwoLevelMeasure;
use crate::metrics::prokhorov::Bipartite;
use crate::space::Metric;
use crate::{Error, Result};

/// Prokhorov distance between `ν` and `λ` as measures on `M_f(X)`.
pub fn two_level_prokhorov(
    nu: &TwoLevelMeasure,
    lambda: &TwoLevelMeasure,
    metric: &impl Metric,
    tol: f64,
) -> Result<f64> {
    if tol <= 0.0 {
        return Err(Error::PreconditionViolated("tol must be positive".into()));
    }
    if nu == lambda {
        return Ok(0.0);
    }
    two_level_prokhorov_cross(nu, lambda, |p, q| metric.distance(p, q))
}

/// Two-level Prokhorov distance where `ν` lives on one point set, `λ` on
/// another, and `cross(p, q)` gives the distance between them.
pub fn two_level_prokhorov_cross(
    nu: &TwoLevelMeasure,
    lambda: &TwoLevelMeasure,
    cross: impl Fn(usize, usize) -> f64,
) -> Result<f64> {
    let inner = inner_distances(nu, lambda, &cross)?;
    outer_distance(nu, lambda, &inner)
}

/// Row-major `|ν| x |λ|` matrix of inner Prokhorov distances.
pub(crate) fn inner_distances(
    nu: &TwoLevelMeasure,
    lambda: &TwoLevelMeasure,
    cross: &impl Fn(usize, usize) -> f64,
) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(nu.atoms().len() * lambda.atoms().len());
    for i in 0..nu.atoms().len() {
        for j in 0..lambda.atoms().len() {
            out.push(inner_distance(nu, lambda, i, j, cross)?);
        }
    }
    Ok(out)
}

pub(crate) fn inner_distance(
    nu: &TwoLevelMeasure,
    lambda: &TwoLevelMeasure,
    i: usize,
    j: usize,
    cross: &impl Fn(usize, usize) -> f64,
) -> Result<f64> {
    let (a, b) = (nu.atoms()[i].1.atoms(), lambda.atoms()[j].1.atoms());
    Bipartite::new(a.iter().map(|x| x.1).collect(), b.iter().map(|x| x.1).collect(), |p, q| cross(a[p].0, b[q].0))
        .distance()
}

pub(crate) fn outer_distance(nu: &TwoLevelMeasure, lambda: &TwoLevelMeasure, inner: &[f64]) -> Result<f64> {
    let nl = lambda.atoms().len();
    Bipartite::new(nu.atoms().iter().map(|a| a.0).collect(), lambda.atoms().iter().map(|a| a.0).collect(), |i, j| {
        inner[i * nl + j]
    })
    .distance()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::AtomicMeasure;
    use crate::FiniteMetricSpace;

    fn line(points: &[f64]) -> FiniteMetricSpace {
        let m = points.iter().map(|a| points.iter().map(|b| (a - b).abs()).collect()).collect();
        FiniteMetricSpace::new(m).unwrap()
    }

    #[test]
    fn nested_diracs() {
        for r in [0.2, 0.7, 1.0, 3.0] {
            let s = line(&[0.0, r]);
            let nu = TwoLevelMeasure::dirac(AtomicMeasure::dirac(0, 1.0), 1.0);
            let la = TwoLevelMeasure::dirac(AtomicMeasure::dirac(1, 1.0), 1.0);
            let d = two_level_prokhorov(&nu, &la, &s, 1e-9).unwrap();
            assert!((d - r.min(1.0)).abs() < 1e-12, "r = {r}: {d}");
        }
    }

    #[test]
    fn identical_is_zero() {
        let s = line(&[0.0, 1.0]);
        let nu = TwoLevelMeasure::from_atoms([
            (0.5, AtomicMeasure::dirac(0, 1.0)),
            (0.5, AtomicMeasure::from_weights([(0, 0.5), (1, 0.5)]).unwrap()),
        ])
        .unwrap();
        assert_eq!(two_level_prokhorov(&nu, &nu, &s, 1e-9).unwrap(), 0.0);
        assert_eq!(two_level_prokhorov_cross(&nu, &nu, |p, q| s.distance(p, q)).unwrap(), 0.0);
    }

    #[test]
    fn outer_mass_difference() {
        let s = line(&[0.0]);
        let nu = TwoLevelMeasure::dirac(AtomicMeasure::dirac(0, 1.0), 2.0);
        let la = TwoLevelMeasure::dirac(AtomicMeasure::dirac(0, 1.0), 3.0);
        assert_eq!(two_level_prokhorov(&nu, &la, &s, 1e-9).unwrap(), 1.0);
        let o = TwoLevelMeasure::null();
        assert_eq!(two_level_prokhorov(&nu, &o, &s, 1e-9).unwrap(), 2.0);
    }

    #[test]
    fn null_inner_atoms() {
        // δ_o against δ_{0.25 δ_x}: inner distance is the inner mass 0.25
        let s = line(&[0.0]);
        let nu = TwoLevelMeasure::dirac(AtomicMeasure::null(), 1.0);
        let la = TwoLevelMeasure::dirac(AtomicMeasure::dirac(0, 0.25), 1.0);
        assert_eq!(two_level_prokhorov(&nu, &la, &s, 1e-9).unwrap(), 0.25);
    }
}
