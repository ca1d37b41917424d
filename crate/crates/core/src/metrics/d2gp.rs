//! Certified bounds for the two-level Gromov-Prokhorov distance.
//!
//! The distance is an infimum over metrics on `X ⊔ Y` extending `r` and `d`.
//! Every such metric is described by a [`CrossDistanceBlock`], and every
//! valid block gives an upper bound. The lower bound compares the
//! distributions of inner masses, which is invariant under all embeddings.
//!
//! Both spaces are first restricted to their effective supports and put in
//! a canonical order, so swapping the arguments runs the exact same
//! computation and only transposes the witness.

use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::Serialize;

use crate::equivalence::are_equivalent;
use crate::functionals::distribution::mass_distribution;
use crate::m2m::{M2MFile, M2MSpace};
use crate::metrics::cross_block::CrossDistanceBlock;
use crate::metrics::two_level::{inner_distance, inner_distances, outer_distance};
use crate::random::{derive_seed, rng_from_seed};
use crate::space::Metric;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct D2gpOptions {
    /// Number of random starting relations refined by coordinate descent.
    pub multistarts: usize,
    /// Evenly spaced probe values per coordinate move.
    pub grid_points: usize,
    pub tol: f64,
    pub seed: u64,
    /// Objective evaluations allowed in total, shared equally by the starts.
    pub max_evaluations: usize,
}

impl Default for D2gpOptions {
    fn default() -> Self {
        Self { multistarts: 4, grid_points: 8, tol: crate::DEFAULT_TOL, seed: 0, max_evaluations: 2_000_000 }
    }
}

/// An interval certified to contain the distance.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DistanceBound {
    pub lower: f64,
    pub upper: f64,
    /// A block on the full point sets attaining `upper`.
    pub witness: Option<CrossDistanceBlock>,
    pub starts_used: usize,
}

const MAX_SWEEPS: usize = 100;

/// `max(|mass ν - mass λ|, d_P(mass distribution of ν, of λ))`.
pub fn d2gp_lower_bound(x: &M2MSpace, y: &M2MSpace) -> Result<f64> {
    let (a, b) = (mass_distribution(x.nu()), mass_distribution(y.nu()));
    Ok((x.mass() - y.mass()).abs().max(a.prokhorov(&b)?))
}

pub fn d2gp_bounds(x: &M2MSpace, y: &M2MSpace, opts: &D2gpOptions) -> Result<DistanceBound> {
    if !(opts.tol > 0.0) {
        return Err(Error::PreconditionViolated("tol must be positive".into()));
    }
    let (rx, ry) = (x.restrict_to_support(), y.restrict_to_support());
    let swap = canonical_key(&rx) > canonical_key(&ry);
    let (first, second) = if swap { (&ry, &rx) } else { (&rx, &ry) };
    let lower = d2gp_lower_bound(first, second)?;

    let finish = |outcome: Outcome| {
        let block = if swap { outcome.block.transpose() } else { outcome.block };
        let witness = extend_to_full(&block, x, y, opts.tol);
        let bound = DistanceBound {
            lower: lower.min(outcome.value),
            upper: outcome.value,
            witness: Some(witness),
            starts_used: outcome.starts_used,
        };
        if outcome.exhausted {
            Err(Error::OptimizerBudgetExceeded { best: Box::new(bound), evaluations: outcome.evaluations })
        } else {
            Ok(bound)
        }
    };
    finish(Search::new(first, second, lower, opts).run()?)
}

fn canonical_key(x: &M2MSpace) -> String {
    let file = M2MFile::from_space(x);
    serde_json::to_string(&(&file.distance, &file.nu)).expect("m2m file serializes")
}

/// Extends a block on the effective supports to all points by routing
/// through the nearest support point. The result is again a valid block.
fn extend_to_full(block: &CrossDistanceBlock, x: &M2MSpace, y: &M2MSpace, tol: f64) -> CrossDistanceBlock {
    let (fx, fy) = (x.space(), y.space());
    let (sx, sy) = (x.effective_support(), y.effective_support());
    if sx.is_empty() || sy.is_empty() {
        return CrossDistanceBlock::constant(fx.len(), fy.len(), fx.diameter().max(fy.diameter()) / 2.0 + tol);
    }
    let rows = CrossDistanceBlock::from_fn(fx.len(), sy.len(), |p, j| {
        sx.iter().enumerate().map(|(i, &q)| fx.distance(p, q) + block.get(i, j)).fold(f64::INFINITY, f64::min)
    });
    CrossDistanceBlock::from_fn(fx.len(), fy.len(), |p, q| {
        sy.iter().enumerate().map(|(j, &s)| rows.get(p, j) + fy.distance(s, q)).fold(f64::INFINITY, f64::min)
    })
}

struct Outcome {
    block: CrossDistanceBlock,
    value: f64,
    starts_used: usize,
    evaluations: usize,
    exhausted: bool,
}

/// Coordinate-descent state for one start.
struct State {
    block: CrossDistanceBlock,
    inner: Vec<f64>,
    value: f64,
    spread: f64,
    evaluations: usize,
}

struct Search<'a> {
    x: &'a M2MSpace,
    y: &'a M2MSpace,
    lower: f64,
    opts: &'a D2gpOptions,
    // inner atoms of ν (resp. λ) charging each point
    atoms_at_x: Vec<Vec<usize>>,
    atoms_at_y: Vec<Vec<usize>>,
    cap: f64,
}

impl<'a> Search<'a> {
    fn new(x: &'a M2MSpace, y: &'a M2MSpace, lower: f64, opts: &'a D2gpOptions) -> Self {
        let index = |m: &M2MSpace| {
            let mut at = vec![Vec::new(); m.space().len()];
            for (k, (_, mu)) in m.nu().atoms().iter().enumerate() {
                for &(p, _) in mu.atoms() {
                    at[p].push(k);
                }
            }
            at
        };
        let inner_mass = |m: &M2MSpace| m.nu().atoms().iter().map(|a| a.1.mass()).fold(0.0, f64::max);
        let cap = x.space().diameter().max(y.space().diameter()) + inner_mass(x).max(inner_mass(y));
        Self { x, y, lower, opts, atoms_at_x: index(x), atoms_at_y: index(y), cap }
    }

    fn done(&self, value: f64) -> bool {
        value <= self.lower
    }

    fn run(&self) -> Result<Outcome> {
        let (n, m) = (self.x.space().len(), self.y.space().len());
        let half = self.x.space().diameter().max(self.y.space().diameter()) / 2.0;
        let mut starts = vec![CrossDistanceBlock::constant(n, m, half + self.opts.tol)];
        if n > 0 && m > 0 {
            let eq = are_equivalent(self.x, self.y, self.opts.tol);
            if let Some(w) = eq.witness.filter(|w| !w.is_empty()) {
                starts.push(self.relation_block(&w));
            }
            starts.push(self.relation_block(&self.weight_rank_relation()));
            let aligned = self.atom_alignment_relation();
            if !aligned.is_empty() {
                starts.push(self.relation_block(&aligned));
            }
        }

        let mut best: Option<(f64, CrossDistanceBlock)> = None;
        let mut evaluations = 0;
        for block in &starts {
            let v = self.objective(block)?;
            evaluations += 1;
            if best.as_ref().is_none_or(|b| v < b.0) {
                best = Some((v, block.clone()));
            }
        }
        let (value, block) = best.expect("constant start is always present");
        if self.done(value) || n == 0 || m == 0 {
            return Ok(Outcome { block, value, starts_used: starts.len(), evaluations, exhausted: false });
        }

        for i in 0..self.opts.multistarts {
            starts.push(self.random_relation_block(derive_seed(self.opts.seed, i as u64)));
        }
        let budget = (self.opts.max_evaluations / starts.len()).max(1);
        let runs: Vec<Result<(State, bool)>> = starts.par_iter().map(|b| self.descend(b.clone(), budget)).collect();

        let (mut value, mut block) = (value, block);
        let mut exhausted = false;
        for run in runs {
            let (state, out) = run?;
            evaluations += state.evaluations;
            exhausted |= out;
            if state.value < value {
                value = state.value;
                block = state.block;
            }
        }
        Ok(Outcome { block, value, starts_used: starts.len(), evaluations, exhausted })
    }

    fn objective(&self, block: &CrossDistanceBlock) -> Result<f64> {
        let inner = inner_distances(self.x.nu(), self.y.nu(), &|p, q| block.get(p, q))?;
        outer_distance(self.x.nu(), self.y.nu(), &inner)
    }

    /// Weighted sum of inner distances, used to move across plateaus of
    /// the outer distance.
    fn spread(&self, inner: &[f64]) -> f64 {
        let (a, b) = (self.x.nu().atoms(), self.y.nu().atoms());
        let mut s = 0.0;
        for (i, ai) in a.iter().enumerate() {
            for (j, bj) in b.iter().enumerate() {
                s += ai.0 * bj.0 * inner[i * b.len() + j];
            }
        }
        s
    }

    /// Gluing along a relation `R`: `C(x,y) = min_R r(x,a) + d(b,y) + dis(R)/2`.
    fn relation_block(&self, rel: &[(usize, usize)]) -> CrossDistanceBlock {
        let (sx, sy) = (self.x.space(), self.y.space());
        let mut dis = 0.0f64;
        for &(a, b) in rel {
            for &(a2, b2) in rel {
                dis = dis.max((sx.distance(a, a2) - sy.distance(b, b2)).abs());
            }
        }
        CrossDistanceBlock::from_fn(sx.len(), sy.len(), |p, q| {
            rel.iter().map(|&(a, b)| sx.distance(p, a) + sy.distance(b, q)).fold(f64::INFINITY, f64::min) + dis / 2.0
        })
    }

    /// Pairs points by rank of their moment-measure weight.
    fn weight_rank_relation(&self) -> Vec<(usize, usize)> {
        let rank = |m: &M2MSpace| {
            let mm = m.nu().moment_measure();
            let mut pts: Vec<usize> = (0..m.space().len()).collect();
            pts.sort_by(|&p, &q| mm.weight(q).total_cmp(&mm.weight(p)).then(p.cmp(&q)));
            pts
        };
        rank(self.x).into_iter().zip(rank(self.y)).collect()
    }

    /// Greedily matches atoms of `ν` to atoms of `λ` by outer weight and
    /// inner mass, then pairs the points of matched atoms by weight rank.
    fn atom_alignment_relation(&self) -> Vec<(usize, usize)> {
        let (a, b) = (self.x.nu().atoms(), self.y.nu().atoms());
        let mut order: Vec<usize> = (0..a.len()).collect();
        order.sort_by(|&i, &j| a[j].0.total_cmp(&a[i].0).then(i.cmp(&j)));
        let mut used = vec![false; b.len()];
        let mut rel = Vec::new();
        for i in order {
            let cost = |j: usize| {
                (a[i].0 - b[j].0).abs()
                    + (a[i].1.mass() - b[j].1.mass()).abs()
                    + (a[i].1.atoms().len() as f64 - b[j].1.atoms().len() as f64).abs()
            };
            let Some(j) = (0..b.len()).filter(|&j| !used[j]).min_by(|&p, &q| cost(p).total_cmp(&cost(q))) else {
                break;
            };
            used[j] = true;
            let by_weight = |mu: &crate::AtomicMeasure| {
                let mut pts = mu.atoms().to_vec();
                pts.sort_by(|p, q| q.1.total_cmp(&p.1).then(p.0.cmp(&q.0)));
                pts.into_iter().map(|p| p.0).collect::<Vec<_>>()
            };
            for pair in by_weight(&a[i].1).into_iter().zip(by_weight(&b[j].1)) {
                if !rel.contains(&pair) {
                    rel.push(pair);
                }
            }
        }
        rel
    }

    /// A random partial matching between the point sets.
    fn random_relation_block(&self, seed: u64) -> CrossDistanceBlock {
        let mut rng = rng_from_seed(seed);
        let mut px: Vec<usize> = (0..self.x.space().len()).collect();
        let mut py: Vec<usize> = (0..self.y.space().len()).collect();
        px.shuffle(&mut rng);
        py.shuffle(&mut rng);
        let rel: Vec<(usize, usize)> = px.into_iter().zip(py).collect();
        self.relation_block(&rel)
    }

    /// Coordinate descent from `block`. Returns the final state and whether
    /// the evaluation budget ran out.
    fn descend(&self, block: CrossDistanceBlock, budget: usize) -> Result<(State, bool)> {
        let inner = inner_distances(self.x.nu(), self.y.nu(), &|p, q| block.get(p, q))?;
        let value = outer_distance(self.x.nu(), self.y.nu(), &inner)?;
        let spread = self.spread(&inner);
        let mut st = State { block, inner, value, spread, evaluations: 1 };
        let (n, m) = (st.block.rows(), st.block.cols());
        for _ in 0..MAX_SWEEPS {
            let mut improved = false;
            for p in 0..n {
                for q in 0..m {
                    if self.done(st.value) {
                        return Ok((st, false));
                    }
                    if st.evaluations >= budget {
                        return Ok((st, true));
                    }
                    improved |= self.move_entry(&mut st, p, q, budget)?;
                }
            }
            if !improved {
                break;
            }
        }
        Ok((st, false))
    }

    /// Probes values for entry `(p, q)` inside its feasibility interval and
    /// keeps the best one if it improves `(value, spread)`.
    fn move_entry(&self, st: &mut State, p: usize, q: usize, budget: usize) -> Result<bool> {
        let cur = st.block.get(p, q);
        let (lo, hi) = st.block.feasible_interval(p, q, self.x.space(), self.y.space());
        let lo = lo.min(cur);
        let hi = if hi.is_finite() { hi.max(cur) } else { cur.max(lo) + self.cap };
        let affected: Vec<(usize, usize)> =
            self.atoms_at_x[p].iter().flat_map(|&i| self.atoms_at_y[q].iter().map(move |&j| (i, j))).collect();
        if affected.is_empty() {
            return Ok(false);
        }

        let nl = self.y.nu().atoms().len();
        let g = self.opts.grid_points;
        let mut probes: Vec<f64> = (0..g).map(|k| lo + (hi - lo) * (k as f64 + 1.0) / (g as f64 + 1.0)).collect();
        probes.extend([lo, hi, st.value]);
        probes.extend(affected.iter().map(|&(i, j)| st.inner[i * nl + j]));
        let mut probes: Vec<f64> = probes.into_iter().map(|v| v.clamp(lo, hi)).filter(|&v| v != cur).collect();
        probes.sort_by(f64::total_cmp);
        probes.dedup();

        let mut best: Option<(f64, f64, f64, Vec<f64>)> = None;
        let mut trial = st.inner.clone();
        for v in probes {
            if st.evaluations >= budget {
                break;
            }
            st.block.set(p, q, v);
            for &(i, j) in &affected {
                trial[i * nl + j] = inner_distance(self.x.nu(), self.y.nu(), i, j, &|a, b| st.block.get(a, b))?;
            }
            let value = outer_distance(self.x.nu(), self.y.nu(), &trial)?;
            st.evaluations += 1;
            let spread = self.spread(&trial);
            let (bv, bs) = best.as_ref().map_or((st.value, st.spread), |b| (b.1, b.2));
            if better(value, spread, bv, bs) {
                best = Some((v, value, spread, trial.clone()));
            }
        }
        match best {
            Some((v, value, spread, inner)) => {
                st.block.set(p, q, v);
                st.value = value;
                st.spread = spread;
                st.inner = inner;
                Ok(true)
            }
            None => {
                st.block.set(p, q, cur);
                Ok(false)
            }
        }
    }
}

fn better(value: f64, spread: f64, best_value: f64, best_spread: f64) -> bool {
    value < best_value || (value == best_value && spread < best_spread - 1e-12 * best_spread.max(1.0))
}
