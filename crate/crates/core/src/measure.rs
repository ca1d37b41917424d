//! Atomic measures, two-level measures and their elementary calculus.
//!
//! Both measure types are kept in canonical form: atomic measures are sorted
//! by point index with zero weights removed, two-level measures are sorted by
//! `(mass, weight map)` with equal inner measures merged.

use std::cmp::Ordering;
use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// A finite nonnegative measure on the points `0..n` of some space.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct AtomicMeasure {
    atoms: Vec<(usize, f64)>,
}

impl AtomicMeasure {
    /// The null measure `o`.
    pub fn null() -> Self {
        Self::default()
    }

    pub fn dirac(point: usize, weight: f64) -> Self {
        Self::from_weights([(point, weight)]).expect("dirac weight must be nonnegative")
    }

    /// Builds a measure from `(point, weight)` pairs. Repeated points are
    /// summed, zero weights dropped.
    pub fn from_weights(pairs: impl IntoIterator<Item = (usize, f64)>) -> Result<Self> {
        let mut atoms: Vec<(usize, f64)> = Vec::new();
        for (k, (p, w)) in pairs.into_iter().enumerate() {
            if !w.is_finite() {
                return Err(Error::NonFinite { field: format!("weight[{k}]"), value: w });
            }
            if w < 0.0 {
                return Err(Error::NegativeEntry { field: format!("weight[{k}]"), value: w });
            }
            atoms.push((p, w));
        }
        Ok(Self::canonical(atoms))
    }

    fn canonical(mut atoms: Vec<(usize, f64)>) -> Self {
        atoms.sort_by_key(|a| a.0);
        let mut out: Vec<(usize, f64)> = Vec::with_capacity(atoms.len());
        for (p, w) in atoms {
            match out.last_mut() {
                Some(last) if last.0 == p => last.1 += w,
                _ => out.push((p, w)),
            }
        }
        out.retain(|a| a.1 > 0.0);
        Self { atoms: out }
    }

    pub fn atoms(&self) -> &[(usize, f64)] {
        &self.atoms
    }

    pub fn is_null(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn mass(&self) -> f64 {
        self.atoms.iter().map(|a| a.1).fold(0.0, |s, w| s + w)
    }

    pub fn weight(&self, point: usize) -> f64 {
        self.atoms.binary_search_by_key(&point, |a| a.0).map(|k| self.atoms[k].1).unwrap_or(0.0)
    }

    pub fn support(&self) -> Vec<usize> {
        self.atoms.iter().map(|a| a.0).collect()
    }

    /// `μ / ‖μ‖`, with `o` mapped to itself.
    pub fn normalize(&self) -> Self {
        let m = self.mass();
        if m == 0.0 {
            return Self::null();
        }
        self.scale(1.0 / m)
    }

    pub fn scale(&self, factor: f64) -> Self {
        Self::canonical(self.atoms.iter().map(|&(p, w)| (p, w * factor)).collect())
    }

    /// Integral of a function on points.
    pub fn integrate(&self, f: impl Fn(usize) -> f64) -> f64 {
        self.atoms.iter().map(|&(p, w)| w * f(p)).sum()
    }

    /// Push-forward along a point map: weights are summed over preimages.
    pub fn pushforward(&self, f: impl Fn(usize) -> Option<usize>) -> Result<Self> {
        let mut out = Vec::with_capacity(self.atoms.len());
        for &(p, w) in &self.atoms {
            let q = f(p).ok_or(Error::UnmappedPoint { index: p })?;
            out.push((q, w));
        }
        Ok(Self::canonical(out))
    }

    /// Total order used for canonical sorting: mass, then the weight map
    /// lexicographically.
    pub fn canonical_cmp(&self, other: &Self) -> Ordering {
        self.mass().total_cmp(&other.mass()).then_with(|| {
            for (a, b) in self.atoms.iter().zip(&other.atoms) {
                let c = a.0.cmp(&b.0).then(a.1.total_cmp(&b.1));
                if c != Ordering::Equal {
                    return c;
                }
            }
            self.atoms.len().cmp(&other.atoms.len())
        })
    }

    /// Largest pointwise weight difference.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let (mut i, mut j) = (0, 0);
        let (a, b) = (&self.atoms, &other.atoms);
        let mut d: f64 = 0.0;
        while i < a.len() || j < b.len() {
            match (a.get(i), b.get(j)) {
                (Some(x), Some(y)) if x.0 == y.0 => {
                    d = d.max((x.1 - y.1).abs());
                    i += 1;
                    j += 1;
                }
                (Some(x), Some(y)) if x.0 < y.0 => {
                    d = d.max(x.1);
                    i += 1;
                }
                (Some(x), None) => {
                    d = d.max(x.1);
                    i += 1;
                }
                (_, Some(y)) => {
                    d = d.max(y.1);
                    j += 1;
                }
                (None, None) => unreachable!(),
            }
        }
        d
    }
}

/// A finite measure on atomic measures: `Σ_k a_k δ_{μ_k}` with `a_k > 0`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct TwoLevelMeasure {
    atoms: Vec<(f64, AtomicMeasure)>,
}

impl TwoLevelMeasure {
    pub fn null() -> Self {
        Self::default()
    }

    pub fn dirac(inner: AtomicMeasure, weight: f64) -> Self {
        Self::from_atoms([(weight, inner)]).expect("dirac weight must be nonnegative")
    }

    /// Builds a two-level measure from `(outer weight, inner measure)` pairs.
    /// Zero outer weights are dropped and equal inner measures merged.
    pub fn from_atoms(pairs: impl IntoIterator<Item = (f64, AtomicMeasure)>) -> Result<Self> {
        let mut atoms = Vec::new();
        for (k, (w, mu)) in pairs.into_iter().enumerate() {
            if !w.is_finite() {
                return Err(Error::NonFinite { field: format!("nu[{k}].weight"), value: w });
            }
            if w < 0.0 {
                return Err(Error::NegativeEntry { field: format!("nu[{k}].weight"), value: w });
            }
            atoms.push((w, mu));
        }
        Ok(Self::canonical(atoms))
    }

    pub(crate) fn canonical(mut atoms: Vec<(f64, AtomicMeasure)>) -> Self {
        atoms.sort_by(|a, b| a.1.canonical_cmp(&b.1));
        let mut out: Vec<(f64, AtomicMeasure)> = Vec::with_capacity(atoms.len());
        for (w, mu) in atoms {
            match out.last_mut() {
                Some(last) if last.1 == mu => last.0 += w,
                _ => out.push((w, mu)),
            }
        }
        out.retain(|a| a.0 > 0.0);
        Self { atoms: out }
    }

    pub fn atoms(&self) -> &[(f64, AtomicMeasure)] {
        &self.atoms
    }

    pub fn is_null(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn mass(&self) -> f64 {
        self.atoms.iter().map(|a| a.0).fold(0.0, |s, w| s + w)
    }

    pub fn normalize(&self) -> Self {
        let m = self.mass();
        if m == 0.0 {
            return Self::null();
        }
        self.scale(1.0 / m)
    }

    pub fn scale(&self, factor: f64) -> Self {
        Self::canonical(self.atoms.iter().map(|(w, mu)| (w * factor, mu.clone())).collect())
    }

    /// Reweights each atom by `density(inner)`; zero-weight atoms disappear.
    pub fn with_density(&self, density: impl Fn(&AtomicMeasure) -> f64) -> Self {
        Self::canonical(self.atoms.iter().map(|(w, mu)| (w * density(mu), mu.clone())).collect())
    }

    /// First moment (intensity) measure `Σ_k a_k μ_k`.
    pub fn moment_measure(&self) -> AtomicMeasure {
        let mut pairs = Vec::new();
        for (a, mu) in &self.atoms {
            pairs.extend(mu.atoms().iter().map(|&(p, w)| (p, a * w)));
        }
        AtomicMeasure::canonical(pairs)
    }

    /// Support of the moment measure, sorted ascending.
    pub fn effective_support(&self) -> Vec<usize> {
        let set: BTreeSet<usize> = self.atoms.iter().flat_map(|(_, mu)| mu.atoms().iter().map(|a| a.0)).collect();
        set.into_iter().collect()
    }

    /// Two-level push-forward: applies the one-level push-forward to every
    /// inner atom and keeps outer weights.
    pub fn pushforward(&self, f: impl Fn(usize) -> Option<usize>) -> Result<Self> {
        let mut out = Vec::with_capacity(self.atoms.len());
        for (w, mu) in &self.atoms {
            out.push((*w, mu.pushforward(&f)?));
        }
        Ok(Self::canonical(out))
    }

    /// Largest point index charged by any inner atom.
    pub fn max_point(&self) -> Option<usize> {
        self.atoms.iter().filter_map(|(_, mu)| mu.atoms().last().map(|a| a.0)).max()
    }
}

/// Anything that has a mass; lets [`mass`] and [`normalize`] take either level.
pub trait Measure: Sized {
    fn total_mass(&self) -> f64;
    fn normalized(&self) -> Self;
}

impl Measure for AtomicMeasure {
    fn total_mass(&self) -> f64 {
        self.mass()
    }
    fn normalized(&self) -> Self {
        self.normalize()
    }
}

impl Measure for TwoLevelMeasure {
    fn total_mass(&self) -> f64 {
        self.mass()
    }
    fn normalized(&self) -> Self {
        self.normalize()
    }
}

pub fn mass<M: Measure>(m: &M) -> f64 {
    m.total_mass()
}

pub fn normalize<M: Measure>(m: &M) -> M {
    m.normalized()
}

pub fn moment_measure(nu: &TwoLevelMeasure) -> AtomicMeasure {
    nu.moment_measure()
}

pub fn effective_support(nu: &TwoLevelMeasure) -> Vec<usize> {
    nu.effective_support()
}

/// One-level push-forward along a point map given as a slice (`map[p]`).
pub fn pushforward(map: &[Option<usize>], mu: &AtomicMeasure) -> Result<AtomicMeasure> {
    mu.pushforward(|p| map.get(p).copied().flatten())
}

pub fn two_level_pushforward(map: &[Option<usize>], nu: &TwoLevelMeasure) -> Result<TwoLevelMeasure> {
    nu.pushforward(|p| map.get(p).copied().flatten())
}
