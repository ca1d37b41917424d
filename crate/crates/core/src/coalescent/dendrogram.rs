//! The gene tree of a simulated nested coalescent, stored as a merge forest.

use serde::Serialize;

use crate::measure::{AtomicMeasure, TwoLevelMeasure};
use crate::space::{FiniteMetricSpace, Metric};
use crate::{Error, M2MSpace, Result};

const NONE: usize = usize::MAX;

/// Leaves are numbered species by species. Internal nodes are numbered in
/// creation order after the leaves, so a parent always has a larger id and
/// a later time than its children.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneDendrogram {
    sizes: Vec<usize>,
    offsets: Vec<usize>,
    parent: Vec<usize>,
    time: Vec<f64>,
    species_parent: Vec<usize>,
    gene_events: Vec<(f64, usize, usize)>,
    species_events: Vec<(f64, usize, usize)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BlockCount {
    pub t: f64,
    pub gene_blocks: usize,
    pub species_blocks: usize,
}

impl GeneDendrogram {
    pub(crate) fn with_sizes(sizes: &[usize]) -> Self {
        let mut offsets = Vec::with_capacity(sizes.len());
        let mut total = 0;
        for &n in sizes {
            offsets.push(total);
            total += n;
        }
        let mut parent = Vec::with_capacity(2 * total);
        parent.resize(total, NONE);
        let mut time = Vec::with_capacity(2 * total);
        time.resize(total, 0.0);
        Self {
            sizes: sizes.to_vec(),
            offsets,
            parent,
            time,
            species_parent: vec![NONE; sizes.len()],
            gene_events: Vec::with_capacity(total),
            species_events: Vec::new(),
        }
    }

    pub(crate) fn merge_genes(&mut self, a: usize, b: usize, t: f64) -> usize {
        let id = self.parent.len();
        self.parent.push(NONE);
        self.time.push(t);
        self.parent[a] = id;
        self.parent[b] = id;
        self.gene_events.push((t, a, b));
        id
    }

    pub(crate) fn merge_species(&mut self, a: usize, b: usize, t: f64) -> usize {
        let id = self.species_parent.len();
        self.species_parent.push(NONE);
        self.species_parent[a] = id;
        self.species_parent[b] = id;
        self.species_events.push((t, a, b));
        id
    }

    pub fn species_count(&self) -> usize {
        self.sizes.len()
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn leaf_count(&self) -> usize {
        self.offsets.last().map_or(0, |o| o + self.sizes.last().unwrap())
    }

    /// Leaf id of `(species, individual)`.
    pub fn leaf(&self, species: usize, individual: usize) -> Result<usize> {
        match self.sizes.get(species) {
            Some(&n) if individual < n => Ok(self.offsets[species] + individual),
            _ => Err(Error::UnknownLeaf { species, individual }),
        }
    }

    /// `(species, individual)` of a leaf id.
    pub fn individual(&self, leaf: usize) -> (usize, usize) {
        let s = self.offsets.partition_point(|&o| o <= leaf) - 1;
        (s, leaf - self.offsets[s])
    }

    /// `(time, child, child)` for each gene merge, in time order.
    pub fn gene_events(&self) -> &[(f64, usize, usize)] {
        &self.gene_events
    }

    /// `(time, child, child)` for each species merge, in time order.
    pub fn species_events(&self) -> &[(f64, usize, usize)] {
        &self.species_events
    }

    /// Time of the merge joining the lineages of two leaf ids.
    pub fn leaf_distance(&self, mut a: usize, mut b: usize) -> f64 {
        while a != b {
            if a < b {
                a = self.parent[a];
            } else {
                b = self.parent[b];
            }
        }
        self.time[a]
    }

    /// Coalescence time of two individuals, 0 when they are equal.
    pub fn pairwise_distance(&self, x: (usize, usize), y: (usize, usize)) -> Result<f64> {
        let (a, b) = (self.leaf(x.0, x.1)?, self.leaf(y.0, y.1)?);
        Ok(self.leaf_distance(a, b))
    }

    /// Numbers of gene and species blocks alive at each time.
    pub fn block_counts(&self, t_grid: &[f64]) -> Vec<BlockCount> {
        let count = |events: &[(f64, usize, usize)], t: f64| events.partition_point(|e| e.0 <= t);
        t_grid
            .iter()
            .map(|&t| BlockCount {
                t,
                gene_blocks: self.leaf_count() - count(&self.gene_events, t),
                species_blocks: self.sizes.len() - count(&self.species_events, t),
            })
            .collect()
    }

    /// `(1/N) #{n : r((i,0), (l,n)) ≤ t}` with `N` the size of species `l`.
    pub fn relative_frequency(&self, i: usize, l: usize, t: f64) -> Result<f64> {
        for s in [i, l] {
            if s >= self.sizes.len() {
                return Err(Error::UnknownSpecies(s));
            }
        }
        let x = self.offsets[i];
        let n = self.sizes[l];
        let hits = (0..n).filter(|&k| self.leaf_distance(x, self.offsets[l] + k) <= t).count();
        Ok(hits as f64 / n as f64)
    }

    /// Replays both event logs and checks that every gene merge joins two
    /// blocks lying in one species block.
    pub fn is_nested(&self) -> bool {
        let species_nodes = self.species_parent.len();
        let mut uf: Vec<usize> = (0..species_nodes).collect();
        fn find(uf: &mut [usize], mut x: usize) -> usize {
            while uf[x] != x {
                uf[x] = uf[uf[x]];
                x = uf[x];
            }
            x
        }
        // species of some leaf below each gene node
        let mut species_of = vec![0usize; self.parent.len()];
        for (leaf, s) in species_of.iter_mut().take(self.leaf_count()).enumerate() {
            *s = self.individual(leaf).0;
        }
        let mut s = 0;
        let leaves = self.leaf_count();
        for (k, &(t, a, b)) in self.gene_events.iter().enumerate() {
            while s < self.species_events.len() && self.species_events[s].0 < t {
                let (_, x, y) = self.species_events[s];
                let id = self.sizes.len() + s;
                uf[x] = id;
                uf[y] = id;
                s += 1;
            }
            let (sa, sb) = (species_of[a], species_of[b]);
            if find(&mut uf, sa) != find(&mut uf, sb) {
                return false;
            }
            species_of[leaves + k] = sa;
        }
        true
    }

    /// `ν_{M,N} = (1/M) Σ_i δ_{(1/N_i) Σ_j δ_{(i,j)}}` on the leaves.
    pub fn sampling_measure(&self) -> TwoLevelMeasure {
        let m = self.sizes.len() as f64;
        let atoms = self.sizes.iter().zip(&self.offsets).map(|(&n, &o)| {
            let mu = AtomicMeasure::from_weights((o..o + n).map(|p| (p, 1.0 / n as f64))).expect("positive weights");
            (1.0 / m, mu)
        });
        TwoLevelMeasure::from_atoms(atoms).expect("positive weights")
    }

    /// The m2m space of all leaves with the coalescence-time metric and
    /// `ν_{M,N}`. The matrix is validated, so this is meant for moderate
    /// leaf counts; [`GeneDendrogram`] itself implements [`Metric`].
    pub fn build_m2m(&self) -> Result<M2MSpace> {
        let l = self.leaf_count();
        let labels = (0..l)
            .map(|p| {
                let (s, j) = self.individual(p);
                format!("{s}.{j}")
            })
            .collect();
        let matrix = (0..l).map(|a| (0..l).map(|b| self.leaf_distance(a, b)).collect()).collect();
        let space = FiniteMetricSpace::with_labels(labels, matrix)?;
        M2MSpace::new(space, self.sampling_measure())
    }
}

impl Metric for GeneDendrogram {
    fn len(&self) -> usize {
        self.leaf_count()
    }

    fn distance(&self, i: usize, j: usize) -> f64 {
        self.leaf_distance(i, j)
    }
}
