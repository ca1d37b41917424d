//! Finite metric spaces with a validated distance matrix.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Slack allowed in the triangle inequality during validation.
pub const TRIANGLE_TOL: f64 = 1e-12;

/// Anything that can report distances between indexed points.
///
/// Implemented by [`FiniteMetricSpace`] and by coalescent dendrograms, whose
/// leaf distances are computed on demand instead of being stored densely.
pub trait Metric {
    fn len(&self) -> usize;

    fn distance(&self, i: usize, j: usize) -> f64;

    fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FiniteMetricSpace {
    labels: Vec<String>,
    // row-major n x n
    dist: Vec<f64>,
}

impl FiniteMetricSpace {
    /// Validates `matrix` and builds a space labelled `p0, p1, ...`.
    pub fn new(matrix: Vec<Vec<f64>>) -> Result<Self> {
        let labels = (0..matrix.len()).map(|i| format!("p{i}")).collect();
        Self::with_labels(labels, matrix)
    }

    pub fn with_labels(labels: Vec<String>, matrix: Vec<Vec<f64>>) -> Result<Self> {
        let n = matrix.len();
        if labels.len() != n {
            return Err(Error::InvalidParams(format!("{} labels for a {n}-point distance matrix", labels.len())));
        }
        let mut dist = Vec::with_capacity(n * n);
        for (row, r) in matrix.iter().enumerate() {
            if r.len() != n {
                return Err(Error::NotSquare { row, len: r.len(), expected: n });
            }
            dist.extend_from_slice(r);
        }
        let space = Self { labels, dist };
        space.validate()?;
        Ok(space)
    }

    /// The empty space, used for m2m spaces whose two-level measure only
    /// charges the null measure.
    pub fn empty() -> Self {
        Self { labels: Vec::new(), dist: Vec::new() }
    }

    /// Builds a space from a flat row-major matrix without re-checking the
    /// triangle inequality. Callers guarantee the metric axioms.
    pub(crate) fn from_trusted(labels: Vec<String>, dist: Vec<f64>) -> Self {
        debug_assert_eq!(labels.len() * labels.len(), dist.len());
        Self { labels, dist }
    }

    fn validate(&self) -> Result<()> {
        let n = self.len();
        for i in 0..n {
            for j in 0..n {
                let v = self.dist[i * n + j];
                if !v.is_finite() {
                    return Err(Error::NonFinite { field: format!("distance[{i}][{j}]"), value: v });
                }
                if v < 0.0 {
                    return Err(Error::NegativeEntry { field: format!("distance[{i}][{j}]"), value: v });
                }
            }
        }
        for i in 0..n {
            let v = self.dist[i * n + i];
            if v != 0.0 {
                return Err(Error::NonZeroDiagonal { index: i, value: v });
            }
        }
        for i in 0..n {
            for j in (i + 1)..n {
                let (a, b) = (self.dist[i * n + j], self.dist[j * n + i]);
                if a != b {
                    return Err(Error::Asymmetric { i, j, a, b });
                }
            }
        }
        for i in 0..n {
            for k in (i + 1)..n {
                let ik = self.dist[i * n + k];
                for j in 0..n {
                    let via = self.dist[i * n + j] + self.dist[j * n + k];
                    if ik > via + TRIANGLE_TOL {
                        return Err(Error::TriangleViolation { i, j, k, ik, via });
                    }
                }
            }
        }
        Ok(())
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn row(&self, i: usize) -> &[f64] {
        let n = self.len();
        &self.dist[i * n..(i + 1) * n]
    }

    pub fn to_matrix(&self) -> Vec<Vec<f64>> {
        (0..self.len()).map(|i| self.row(i).to_vec()).collect()
    }

    /// Largest distance between two points of `points`; 0 for fewer than two.
    pub fn diameter_of(&self, points: &[usize]) -> f64 {
        let mut d: f64 = 0.0;
        for (a, &i) in points.iter().enumerate() {
            for &j in &points[a + 1..] {
                d = d.max(self.distance(i, j));
            }
        }
        d
    }

    pub fn diameter(&self) -> f64 {
        let all: Vec<usize> = (0..self.len()).collect();
        self.diameter_of(&all)
    }

    /// Restriction of the metric to `points`, in the given order.
    pub fn subspace(&self, points: &[usize]) -> Self {
        let labels = points.iter().map(|&i| self.labels[i].clone()).collect();
        let mut dist = Vec::with_capacity(points.len() * points.len());
        for &i in points {
            for &j in points {
                dist.push(self.distance(i, j));
            }
        }
        Self::from_trusted(labels, dist)
    }

    pub fn check_index(&self, field: impl FnOnce() -> String, index: usize) -> Result<()> {
        if index >= self.len() {
            return Err(Error::IndexOutOfRange { field: field(), index, len: self.len() });
        }
        Ok(())
    }
}

impl Metric for FiniteMetricSpace {
    fn len(&self) -> usize {
        self.labels.len()
    }

    #[inline]
    fn distance(&self, i: usize, j: usize) -> f64 {
        self.dist[i * self.labels.len() + j]
    }
}

/// Validates a raw matrix; see [`FiniteMetricSpace::new`].
pub fn validate_space(matrix: Vec<Vec<f64>>) -> Result<FiniteMetricSpace> {
    FiniteMetricSpace::new(matrix)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn smallest_metric() {
        let s = validate_space(vec![vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        assert_eq!(s.len(), 2);
        assert_eq!(s.distance(0, 1), 1.0);
        assert_eq!(s.labels(), ["p0", "p1"]);
    }

    #[test]
    fn triangle_violation_reports_witness() {
        let m = vec![vec![0.0, 3.0, 1.0], vec![3.0, 0.0, 1.0], vec![1.0, 1.0, 0.0]];
        match validate_space(m) {
            Err(Error::TriangleViolation { i, j, k, ik, via }) => {
                assert_eq!((i, j, k), (0, 2, 1));
                assert_eq!(ik, 3.0);
                assert_eq!(via, 2.0);
            }
            other => panic!("expected triangle violation, got {other:?}"),
        }
    }

    #[test]
    fn asymmetric_rejected() {
        let err = validate_space(vec![vec![0.0, 1.0], vec![2.0, 0.0]]).unwrap_err();
        assert!(matches!(err, Error::Asymmetric { i: 0, j: 1, .. }));
    }

    #[test]
    fn diagonal_and_sign_checks() {
        let err = validate_space(vec![vec![0.5, 1.0], vec![1.0, 0.0]]).unwrap_err();
        assert!(matches!(err, Error::NonZeroDiagonal { index: 0, .. }));
        let err = validate_space(vec![vec![0.0, -1.0], vec![-1.0, 0.0]]).unwrap_err();
        assert!(matches!(err, Error::NegativeEntry { .. }));
        let err = validate_space(vec![vec![0.0, 1.0]]).unwrap_err();
        assert!(matches!(err, Error::NotSquare { .. }));
    }

    #[test]
    fn triangle_tolerance_accepts_rounding() {
        let m = vec![vec![0.0, 0.1, 0.3 + 1e-13], vec![0.1, 0.0, 0.2], vec![0.3 + 1e-13, 0.2, 0.0]];
        assert!(validate_space(m).is_ok());
    }

    #[test]
    fn subspace_and_diameter() {
        let m = vec![vec![0.0, 1.0, 2.0], vec![1.0, 0.0, 1.5], vec![2.0, 1.5, 0.0]];
        let s = validate_space(m).unwrap();
        assert_eq!(s.diameter(), 2.0);
        let sub = s.subspace(&[2, 1]);
        assert_eq!(sub.to_matrix(), vec![vec![0.0, 1.5], vec![1.5, 0.0]]);
        assert_eq!(sub.labels(), ["p2", "p1"]);
    }
}
