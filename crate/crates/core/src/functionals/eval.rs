//! Exact and Monte-Carlo evaluation of test functionals.
//!
//! Exact evaluation replaces every integral by a weighted sum over ordered
//! tuples of atoms drawn with replacement. Monte-Carlo evaluation draws the
//! same tuples at random and reports the sample mean with its standard
//! error.

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;

use crate::functionals::spec::{TestFunctionalSpec, TfKind};
use crate::measure::TwoLevelMeasure;
use crate::random::rng_from_seed;
use crate::space::Metric;
use crate::stats::Estimate;
use crate::{Error, Result};

/// Largest number of tuples enumerated in exact mode.
pub const EXACT_BUDGET: f64 = 1e7;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EvalMode {
    Exact,
    MonteCarlo { samples: usize, seed: u64 },
}

/// Evaluates `spec` on `(X, r, ν)`. Exact results have `stderr = 0`.
pub fn eval_tf(spec: &TestFunctionalSpec, x: &crate::M2MSpace, mode: EvalMode) -> Result<Estimate> {
    eval_tf_on(spec, x.nu(), x.space(), mode)
}

/// Same as [`eval_tf`] for a two-level measure on any metric.
pub fn eval_tf_on(
    spec: &TestFunctionalSpec,
    nu: &TwoLevelMeasure,
    metric: &impl Metric,
    mode: EvalMode,
) -> Result<Estimate> {
    spec.validate()?;
    let mass = nu.mass();
    let chi = spec.chi.as_ref().map_or(1.0, |c| c.eval(mass));
    if spec.kind == TfKind::TF1 {
        return Ok(exact(chi));
    }
    if mass == 0.0 {
        return Ok(exact(0.0));
    }
    // weights of the outer tuple law, and the factor in front of the integral
    let (outer, factor) = match spec.kind {
        TfKind::TF4 => (nu.atoms().iter().map(|a| a.0).collect::<Vec<_>>(), 1.0),
        _ => (nu.atoms().iter().map(|a| a.0 / mass).collect(), chi),
    };
    let ev = Evaluator { spec, nu, metric, outer };
    let est = match mode {
        EvalMode::Exact => exact(ev.exact()?),
        EvalMode::MonteCarlo { samples, seed } => {
            if samples == 0 {
                return Err(Error::PreconditionViolated("at least one sample is needed".into()));
            }
            ev.monte_carlo(samples, seed)
        }
    };
    Ok(Estimate { mean: factor * est.mean, stderr: factor.abs() * est.stderr })
}

fn exact(v: f64) -> Estimate {
    Estimate { mean: v, stderr: 0.0 }
}

struct Evaluator<'a, M> {
    spec: &'a TestFunctionalSpec,
    nu: &'a TwoLevelMeasure,
    metric: &'a M,
    outer: Vec<f64>,
}

impl<M: Metric> Evaluator<'_, M> {
    /// Number of `(atom tuple, point tuple)` combinations visited.
    fn tuple_count(&self) -> f64 {
        let m = self.spec.m as i32;
        let atoms = self.nu.atoms();
        match self.spec.kind {
            TfKind::TF2 => (atoms.len() as f64).powi(m),
            _ => self
                .spec
                .n
                .iter()
                .map(|&n| atoms.iter().map(|a| (a.1.atoms().len() as f64).powi(n as i32)).sum::<f64>())
                .product(),
        }
    }

    fn exact(&self) -> Result<f64> {
        let required = self.tuple_count();
        if required > EXACT_BUDGET {
            return Err(Error::BudgetExceeded { required, budget: EXACT_BUDGET });
        }
        let m = self.spec.m;
        let atoms = self.nu.atoms();
        let psi = self.spec.psi.as_ref().expect("validated");
        let mut idx = vec![0usize; m];
        let mut masses = vec![0.0; m];
        let mut total = 0.0;
        loop {
            let mut w = 1.0;
            for (i, &k) in idx.iter().enumerate() {
                w *= self.outer[k];
                masses[i] = atoms[k].1.mass();
            }
            let p = psi.eval(&masses);
            if p != 0.0 {
                total += w * p * self.inner_exact(&idx);
            }
            if !advance(&mut idx, |_| atoms.len()) {
                break;
            }
        }
        Ok(total)
    }

    /// `∫ φ∘R dμ̄^{⊗n}` for the atoms `idx`, or 1 for TF2.
    fn inner_exact(&self, idx: &[usize]) -> f64 {
        let Some(phi) = &self.spec.phi else { return 1.0 };
        let atoms = self.nu.atoms();
        let slots: Vec<&crate::AtomicMeasure> =
            idx.iter().zip(&self.spec.n).flat_map(|(&k, &n)| std::iter::repeat_n(&atoms[k].1, n)).collect();
        let k = slots.len();
        let masses: Vec<f64> = slots.iter().map(|mu| mu.mass()).collect();
        let mut pos = vec![0usize; k];
        let mut r = vec![0.0; k * k];
        let mut total = 0.0;
        loop {
            let mut w = 1.0;
            for (s, &p) in pos.iter().enumerate() {
                w *= slots[s].atoms()[p].1 / masses[s];
            }
            fill_distances(&mut r, k, |s| slots[s].atoms()[pos[s]].0, self.metric);
            total += w * phi.eval(&r, k);
            if !advance(&mut pos, |s| slots[s].atoms().len()) {
                break;
            }
        }
        total
    }

    fn monte_carlo(&self, samples: usize, seed: u64) -> Estimate {
        let mut rng = rng_from_seed(seed);
        let atoms = self.nu.atoms();
        let outer = WeightedIndex::new(&self.outer).expect("positive outer weights");
        let inner: Vec<Option<WeightedIndex<f64>>> =
            atoms.iter().map(|(_, mu)| WeightedIndex::new(mu.atoms().iter().map(|a| a.1)).ok()).collect();
        let psi = self.spec.psi.as_ref().expect("validated");
        let total_outer: f64 = self.outer.iter().sum();
        let m = self.spec.m;
        let k = self.spec.sample_size();
        let mut idx = vec![0usize; m];
        let mut masses = vec![0.0; m];
        let mut pts = vec![0usize; k];
        let mut r = vec![0.0; k * k];
        let mut values = Vec::with_capacity(samples);
        for _ in 0..samples {
            for i in 0..m {
                idx[i] = outer.sample(&mut rng);
                masses[i] = atoms[idx[i]].1.mass();
            }
            let p = psi.eval(&masses);
            let mut v = total_outer.powi(m as i32) * p;
            if let Some(phi) = &self.spec.phi {
                if p != 0.0 {
                    let mut s = 0;
                    for (&a, &n) in idx.iter().zip(&self.spec.n) {
                        let law = inner[a].as_ref().expect("atoms with positive psi have mass");
                        for _ in 0..n {
                            pts[s] = atoms[a].1.atoms()[law.sample(&mut rng)].0;
                            s += 1;
                        }
                    }
                    fill_distances(&mut r, k, |s| pts[s], self.metric);
                    v *= phi.eval(&r, k);
                }
            }
            values.push(v);
        }
        let est = Estimate::from_samples(&values);
        if samples == 1 {
            Estimate { mean: est.mean, stderr: f64::INFINITY }
        } else {
            est
        }
    }
}

fn fill_distances(r: &mut [f64], k: usize, point: impl Fn(usize) -> usize, metric: &impl Metric) {
    for i in 0..k {
        for j in 0..k {
            r[i * k + j] = metric.distance(point(i), point(j));
        }
    }
}

/// Odometer step over `0..len(i)` in every slot; false after the last tuple.
fn advance(idx: &mut [usize], len: impl Fn(usize) -> usize) -> bool {
    for i in (0..idx.len()).rev() {
        idx[i] += 1;
        if idx[i] < len(i) {
            return true;
        }
        idx[i] = 0;
    }
    false
}

/// `R(x)_{ij} = r(x_i, x_j)` for the listed points.
pub fn distance_matrix(space: &crate::FiniteMetricSpace, pts: &[usize]) -> Result<Vec<Vec<f64>>> {
    for (k, &p) in pts.iter().enumerate() {
        space.check_index(|| format!("pts[{k}]"), p)?;
    }
    Ok(pts.iter().map(|&a| pts.iter().map(|&b| space.distance(a, b)).collect()).collect())
}
