//! Finite measures on the real line: distance distributions and mass
//! distributions.

use serde::Serialize;

use crate::measure::{AtomicMeasure, TwoLevelMeasure};
use crate::metrics::prokhorov::Bipartite;
use crate::space::Metric;
use crate::Result;

/// A finite atomic measure on `ℝ₊`, atoms sorted by value.
#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct RealDistribution {
    atoms: Vec<(f64, f64)>,
}

/// Totals and moments of a [`RealDistribution`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DistributionSummary {
    pub total_weight: f64,
    pub atoms: usize,
    /// Weighted mean of the values, 0 for the null measure.
    pub mean: f64,
    /// Largest value carrying weight, 0 for the null measure.
    pub max: f64,
}

impl RealDistribution {
    /// Builds a distribution from `(value, weight)` pairs, merging equal
    /// values and dropping zero weights.
    pub fn from_pairs(pairs: impl IntoIterator<Item = (f64, f64)>) -> Self {
        let mut atoms: Vec<(f64, f64)> = pairs.into_iter().filter(|p| p.1 > 0.0).collect();
        atoms.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut out: Vec<(f64, f64)> = Vec::with_capacity(atoms.len());
        for (v, w) in atoms {
            match out.last_mut() {
                Some(last) if last.0 == v => last.1 += w,
                _ => out.push((v, w)),
            }
        }
        Self { atoms: out }
    }

    pub fn atoms(&self) -> &[(f64, f64)] {
        &self.atoms
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn total_weight(&self) -> f64 {
        self.atoms.iter().map(|a| a.1).fold(0.0, |s, w| s + w)
    }

    /// Weight of the atom at exactly `value`.
    pub fn weight_at(&self, value: f64) -> f64 {
        self.atoms.iter().filter(|a| a.0 == value).map(|a| a.1).fold(0.0, |s, w| s + w)
    }

    pub fn summary(&self) -> DistributionSummary {
        let total = self.total_weight();
        let mean = if total > 0.0 { self.atoms.iter().map(|a| a.0 * a.1).sum::<f64>() / total } else { 0.0 };
        DistributionSummary {
            total_weight: total,
            atoms: self.atoms.len(),
            mean,
            max: self.atoms.last().map_or(0.0, |a| a.0),
        }
    }

    /// Prokhorov distance on `ℝ` with the usual metric `|u - v|`.
    pub fn prokhorov(&self, other: &Self) -> Result<f64> {
        if self == other {
            return Ok(0.0);
        }
        let (a, b) = (&self.atoms, &other.atoms);
        Bipartite::new(a.iter().map(|x| x.1).collect(), b.iter().map(|x| x.1).collect(), |i, j| (a[i].0 - b[j].0).abs())
            .distance()
    }

    /// CSV with header `value,weight`; floats carry 17 significant digits.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("value,weight\n");
        for (v, w) in &self.atoms {
            s.push_str(&format!("{},{}\n", fmt_f64(*v), fmt_f64(*w)));
        }
        s
    }
}

/// Formats a float with 17 significant digits, which round-trips exactly.
/// Negative zero is printed as zero.
pub fn fmt_f64(v: f64) -> String {
    let v = if v == 0.0 { 0.0 } else { v };
    format!("{v:.16e}")
}

/// `mass_* ν`: atoms at the inner masses weighted by the outer weights.
pub fn mass_distribution(nu: &TwoLevelMeasure) -> RealDistribution {
    RealDistribution::from_pairs(nu.atoms().iter().map(|(w, mu)| (mu.mass(), *w)))
}

/// `DD(μ) = r_* μ^{⊗2}`, including the diagonal at distance 0.
pub fn distance_distribution(mu: &AtomicMeasure, metric: &impl Metric) -> RealDistribution {
    let a = mu.atoms();
    let mut pairs = Vec::with_capacity(a.len() * a.len());
    for &(x, wx) in a {
        for &(y, wy) in a {
            pairs.push((metric.distance(x, y), wx * wy));
        }
    }
    RealDistribution::from_pairs(pairs)
}
