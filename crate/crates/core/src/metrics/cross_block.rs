//! Cross-distance blocks: candidate distances between the points of two
//! spaces, defining a pseudometric on their disjoint union.

use serde::{Deserialize, Serialize};

use crate::space::{FiniteMetricSpace, Metric};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrossDistanceBlock {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

/// The first violated inequality found by [`validate_cross_block`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum CrossViolation {
    /// `|C(x,y) - C(x2,y)| ≤ r(x,x2) ≤ C(x,y) + C(x2,y)` fails.
    Left {
        x: usize,
        x2: usize,
        y: usize,
    },
    /// `|C(x,y) - C(x,y2)| ≤ d(y,y2) ≤ C(x,y) + C(x,y2)` fails.
    Right {
        x: usize,
        y: usize,
        y2: usize,
    },
    Negative {
        x: usize,
        y: usize,
    },
}

impl CrossDistanceBlock {
    pub fn constant(rows: usize, cols: usize, value: f64) -> Self {
        Self { rows, cols, data: vec![value; rows * cols] }
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for x in 0..rows {
            for y in 0..cols {
                data.push(f(x, y));
            }
        }
        Self { rows, cols, data }
    }

    pub fn from_matrix(m: Vec<Vec<f64>>) -> Result<Self> {
        let rows = m.len();
        let cols = m.first().map_or(0, Vec::len);
        for (row, r) in m.iter().enumerate() {
            if r.len() != cols {
                return Err(Error::NotSquare { row, len: r.len(), expected: cols });
            }
        }
        Ok(Self { rows, cols, data: m.concat() })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.data[x * self.cols + y]
    }

    pub fn set(&mut self, x: usize, y: usize, v: f64) {
        self.data[x * self.cols + y] = v;
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |y, x| self.get(x, y))
    }

    pub fn to_matrix(&self) -> Vec<Vec<f64>> {
        (0..self.rows).map(|x| self.data[x * self.cols..(x + 1) * self.cols].to_vec()).collect()
    }

    /// Range of values for entry `(x, y)` keeping all inequalities that
    /// involve it satisfied, given the other entries. `hi` is infinite when
    /// the entry has no partner in either space.
    pub(crate) fn feasible_interval(&self, x: usize, y: usize, left: &impl Metric, right: &impl Metric) -> (f64, f64) {
        let (mut lo, mut hi) = (0.0f64, f64::INFINITY);
        for x2 in (0..self.rows).filter(|&x2| x2 != x) {
            let (r, c) = (left.distance(x, x2), self.get(x2, y));
            lo = lo.max(c - r).max(r - c);
            hi = hi.min(c + r);
        }
        for y2 in (0..self.cols).filter(|&y2| y2 != y) {
            let (d, c) = (right.distance(y, y2), self.get(x, y2));
            lo = lo.max(c - d).max(d - c);
            hi = hi.min(c + d);
        }
        (lo, hi)
    }
}

/// Checks that `c` extends the metrics of `left` and `right` to a
/// pseudometric on their disjoint union, up to `tol`. Returns the first
/// violated inequality, if any.
pub fn validate_cross_block(
    c: &CrossDistanceBlock,
    left: &FiniteMetricSpace,
    right: &FiniteMetricSpace,
    tol: f64,
) -> Result<Option<CrossViolation>> {
    if c.rows != left.len() || c.cols != right.len() {
        return Err(Error::InvalidParams(format!(
            "cross block is {}x{}, spaces have {} and {} points",
            c.rows,
            c.cols,
            left.len(),
            right.len()
        )));
    }
    for x in 0..c.rows {
        for y in 0..c.cols {
            if !(c.get(x, y) >= -tol) {
                return Ok(Some(CrossViolation::Negative { x, y }));
            }
        }
    }
    for y in 0..c.cols {
        for x in 0..c.rows {
            for x2 in (x + 1)..c.rows {
                let (a, b, r) = (c.get(x, y), c.get(x2, y), left.distance(x, x2));
                if (a - b).abs() > r + tol || r > a + b + tol {
                    return Ok(Some(CrossViolation::Left { x, x2, y }));
                }
            }
        }
    }
    for x in 0..c.rows {
        for y in 0..c.cols {
            for y2 in (y + 1)..c.cols {
                let (a, b, d) = (c.get(x, y), c.get(x, y2), right.distance(y, y2));
                if (a - b).abs() > d + tol || d > a + b + tol {
                    return Ok(Some(CrossViolation::Right { x, y, y2 }));
                }
            }
        }
    }
    Ok(None)
}
