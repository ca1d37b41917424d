//! m2m spaces and their JSON file format.
//!
//! ```json
//! { "points": ["a", "b"], "distance": [[0, 1], [1, 0]],
//!   "nu": [ {"weight": 0.5, "mu": [[0, 1.0], [1, 2.0]]} ] }
//! ```

use serde::{Deserialize, Serialize};

use crate::measure::{AtomicMeasure, TwoLevelMeasure};
use crate::space::{FiniteMetricSpace, Metric};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct M2MSpace {
    space: FiniteMetricSpace,
    nu: TwoLevelMeasure,
}

impl M2MSpace {
    pub fn new(space: FiniteMetricSpace, nu: TwoLevelMeasure) -> Result<Self> {
        if let Some(p) = nu.max_point() {
            if p >= space.len() {
                let k =
                    nu.atoms().iter().position(|(_, mu)| mu.support().iter().any(|&q| q >= space.len())).unwrap_or(0);
                return Err(Error::IndexOutOfRange { field: format!("nu[{k}].mu"), index: p, len: space.len() });
            }
        }
        Ok(Self { space, nu })
    }

    pub fn space(&self) -> &FiniteMetricSpace {
        &self.space
    }

    pub fn nu(&self) -> &TwoLevelMeasure {
        &self.nu
    }

    pub fn into_parts(self) -> (FiniteMetricSpace, TwoLevelMeasure) {
        (self.space, self.nu)
    }

    pub fn mass(&self) -> f64 {
        self.nu.mass()
    }

    pub fn effective_support(&self) -> Vec<usize> {
        self.nu.effective_support()
    }

    /// The equivalent m2m space on `supp mm ν` with the restricted metric.
    /// A measure charging only `o` yields the empty space with its mass kept.
    pub fn restrict_to_support(&self) -> M2MSpace {
        let support = self.effective_support();
        let mut index = vec![None; self.space.len()];
        for (new, &old) in support.iter().enumerate() {
            index[old] = Some(new);
        }
        let nu = self.nu.pushforward(|p| index[p]).expect("support covers every charged point");
        M2MSpace { space: self.space.subspace(&support), nu }
    }

    /// Relabels points: point `p` becomes `perm[p]`. `perm` must be a
    /// permutation of `0..len`.
    pub fn permuted(&self, perm: &[usize]) -> Result<M2MSpace> {
        let n = self.space.len();
        let mut seen = vec![false; n];
        if perm.len() != n || perm.iter().any(|&q| q >= n || std::mem::replace(&mut seen[q], true)) {
            return Err(Error::InvalidParams("relabeling is not a permutation".into()));
        }
        let mut inverse = vec![0; n];
        for (p, &q) in perm.iter().enumerate() {
            inverse[q] = p;
        }
        let space = self.space.subspace(&inverse);
        let nu = self.nu.pushforward(|p| Some(perm[p]))?;
        Ok(M2MSpace { space, nu })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: M2MFile = serde_json::from_str(text)?;
        file.into_space()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&M2MFile::from_space(self)).expect("m2m file serializes")
    }
}

/// On-disk representation of an m2m space.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct M2MFile {
    pub points: Vec<String>,
    pub distance: Vec<Vec<f64>>,
    pub nu: Vec<M2MFileAtom>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct M2MFileAtom {
    pub weight: f64,
    /// `[point_index, weight]` pairs.
    pub mu: Vec<(usize, f64)>,
}

impl M2MFile {
    pub fn into_space(self) -> Result<M2MSpace> {
        let space = FiniteMetricSpace::with_labels(self.points, self.distance)?;
        let mut atoms = Vec::with_capacity(self.nu.len());
        for (k, atom) in self.nu.into_iter().enumerate() {
            check_weight(&format!("nu[{k}].weight"), atom.weight)?;
            for (j, &(p, w)) in atom.mu.iter().enumerate() {
                check_weight(&format!("nu[{k}].mu[{j}]"), w)?;
                space.check_index(|| format!("nu[{k}].mu[{j}]"), p)?;
            }
            atoms.push((atom.weight, AtomicMeasure::from_weights(atom.mu)?));
        }
        M2MSpace::new(space, TwoLevelMeasure::from_atoms(atoms)?)
    }

    pub fn from_space(x: &M2MSpace) -> Self {
        Self {
            points: x.space.labels().to_vec(),
            distance: x.space.to_matrix(),
            nu: x.nu.atoms().iter().map(|(w, mu)| M2MFileAtom { weight: *w, mu: mu.atoms().to_vec() }).collect(),
        }
    }
}

fn check_weight(field: &str, w: f64) -> Result<()> {
    if !w.is_finite() {
        return Err(Error::NonFinite { field: field.into(), value: w });
    }
    if w < 0.0 {
        return Err(Error::NegativeEntry { field: field.into(), value: w });
    }
    Ok(())
}

pub fn restrict_to_support(x: &M2MSpace) -> M2MSpace {
    x.restrict_to_support()
}
