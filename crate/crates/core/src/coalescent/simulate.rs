//! Gillespie simulation of the nested coalescent.

use rand::Rng;
use rand_distr::{Distribution, Exp1};
use serde::{Deserialize, Serialize};

use crate::coalescent::dendrogram::GeneDendrogram;
use crate::random::rng_from_seed;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoalescentParams {
    /// Merge rate of each pair of species blocks.
    pub gamma_s: f64,
    /// Merge rate of each pair of gene blocks inside one species block.
    pub gamma_g: f64,
    /// Number of species.
    pub m: usize,
    /// Individuals per species.
    pub n: usize,
}

impl CoalescentParams {
    pub fn validate(&self) -> Result<()> {
        check_rates(self.gamma_s, self.gamma_g)?;
        if self.m == 0 || self.n == 0 {
            return Err(Error::InvalidParams(format!("M = {} and N = {} must be positive", self.m, self.n)));
        }
        Ok(())
    }
}

pub(crate) fn check_rates(gamma_s: f64, gamma_g: f64) -> Result<()> {
    if !(gamma_s > 0.0 && gamma_s.is_finite() && gamma_g > 0.0 && gamma_g.is_finite()) {
        return Err(Error::InvalidParams(format!(
            "rates must be positive and finite, got gamma_s = {gamma_s}, gamma_g = {gamma_g}"
        )));
    }
    Ok(())
}

/// Simulates `M` species of `N` individuals each until one gene block
/// remains.
pub fn simulate(params: &CoalescentParams, seed: u64) -> Result<GeneDendrogram> {
    params.validate()?;
    simulate_sizes(params.gamma_s, params.gamma_g, &vec![params.n; params.m], seed)
}

fn pairs(k: usize) -> u64 {
    (k as u64) * (k as u64).saturating_sub(1) / 2
}

/// Simulates species `i` with `sizes[i]` individuals.
pub fn simulate_sizes(gamma_s: f64, gamma_g: f64, sizes: &[usize], seed: u64) -> Result<GeneDendrogram> {
    check_rates(gamma_s, gamma_g)?;
    if sizes.is_empty() || sizes.contains(&0) {
        return Err(Error::InvalidParams(format!("species sizes must be positive, got {sizes:?}")));
    }
    let mut rng = rng_from_seed(seed);
    let mut tree = GeneDendrogram::with_sizes(sizes);
    let leaves = tree.leaf_count();

    // live species blocks: (species node id, gene node ids)
    let mut species: Vec<(usize, Vec<usize>)> = Vec::with_capacity(sizes.len());
    let mut next_leaf = 0;
    for (i, &n) in sizes.iter().enumerate() {
        species.push((i, (next_leaf..next_leaf + n).collect()));
        next_leaf += n;
    }
    let mut gene_pairs: u64 = species.iter().map(|s| pairs(s.1.len())).sum();
    let mut gene_blocks = leaves;
    let mut t = 0.0f64;

    while gene_blocks > 1 {
        let species_rate = gamma_s * pairs(species.len()) as f64;
        let gene_rate = gamma_g * gene_pairs as f64;
        let total = species_rate + gene_rate;
        let wait: f64 = Exp1.sample(&mut rng);
        let next = t + wait / total;
        if !(next > t) {
            return Err(Error::TieDetected(t));
        }
        t = next;

        if rng.random::<f64>() * total < species_rate {
            let a = rng.random_range(0..species.len());
            let mut b = rng.random_range(0..species.len() - 1);
            if b >= a {
                b += 1;
            }
            let (big, small) = if species[a].1.len() >= species[b].1.len() { (a, b) } else { (b, a) };
            let (small_id, small_genes) = species.swap_remove(small);
            let big = if big == species.len() { small } else { big };
            let (ka, kb) = (species[big].1.len() as u64, small_genes.len() as u64);
            gene_pairs += ka * kb;
            species[big].1.extend(small_genes);
            let id = tree.merge_species(species[big].0, small_id, t);
            species[big].0 = id;
        } else {
            let mut r = rng.random_range(0..gene_pairs);
            let b = species
                .iter()
                .position(|s| {
                    let p = pairs(s.1.len());
                    if r < p {
                        true
                    } else {
                        r -= p;
                        false
                    }
                })
                .expect("gene pair index within total");
            let genes = &mut species[b].1;
            let k = genes.len();
            let i = rng.random_range(0..k);
            let mut j = rng.random_range(0..k - 1);
            if j >= i {
                j += 1;
            }
            let id = tree.merge_genes(genes[i], genes[j], t);
            let (lo, hi) = (i.min(j), i.max(j));
            genes[lo] = id;
            genes.swap_remove(hi);
            gene_pairs -= (k - 1) as u64;
            gene_blocks -= 1;
        }
    }
    Ok(tree)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(m: usize, n: usize) -> CoalescentParams {
        CoalescentParams { gamma_s: 1.0, gamma_g: 1.0, m, n }
    }

    #[test]
    fn deterministic_given_seed() {
        let a = simulate(&params(3, 4), 11).unwrap();
        let b = simulate(&params(3, 4), 11).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, simulate(&params(3, 4), 12).unwrap());
    }

    #[test]
    fn full_coalescence() {
        for seed in 0..20 {
            let d = simulate(&params(4, 5), seed).unwrap();
            assert_eq!(d.gene_events().len(), 19);
            assert!(d.species_events().len() <= 3);
            assert!(d.is_nested());
            let times: Vec<f64> = d.gene_events().iter().map(|e| e.0).collect();
            assert!(times.windows(2).all(|w| w[0] < w[1]));
        }
    }

    #[test]
    fn invalid_params() {
        assert!(simulate(&params(0, 3), 0).is_err());
        let bad = CoalescentParams { gamma_s: 0.0, ..params(2, 2) };
        assert!(matches!(simulate(&bad, 0), Err(Error::InvalidParams(_))));
        assert!(simulate_sizes(1.0, 1.0, &[2, 0], 0).is_err());
    }

    #[test]
    fn single_individual() {
        let d = simulate(&params(1, 1), 0).unwrap();
        assert!(d.gene_events().is_empty());
        assert_eq!(d.pairwise_distance((0, 0), (0, 0)).unwrap(), 0.0);
    }
}
