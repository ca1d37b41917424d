//! Monte-Carlo statistics of the coalescent m2m spaces and the exact
//! distance laws they are checked against.

use rayon::prelude::*;
use serde::Serialize;

use crate::coalescent::simulate::{check_rates, simulate, simulate_sizes, CoalescentParams};
use crate::functionals::eval::{eval_tf_on, EvalMode};
use crate::functionals::spec::{TestFunctionalSpec, TfKind};
use crate::random::derive_seed;
use crate::space::Metric;
use crate::stats::{ks_statistic, Estimate};
use crate::{Error, Result};

/// Largest `m · max n` accepted by [`estimate_limit_statistic`].
const MAX_LIMIT_SAMPLE: usize = 12;

/// Mean and standard error of `Φ(Z, r, ν_{M,N})` over independent
/// coalescents. Replicate `k` is simulated from `derive_seed(seed, 2k)`;
/// Monte-Carlo evaluation inside a replicate uses `derive_seed(seed, 2k+1)`.
pub fn estimate_q(
    spec: &TestFunctionalSpec,
    params: &CoalescentParams,
    replicates: usize,
    seed: u64,
    mode: EvalMode,
) -> Result<Estimate> {
    if replicates < 2 {
        return Err(Error::PreconditionViolated("at least two replicates are needed".into()));
    }
    spec.validate()?;
    params.validate()?;
    let values = (0..replicates as u64)
        .into_par_iter()
        .map(|k| {
            let tree = simulate(params, derive_seed(seed, 2 * k))?;
            let nu = tree.sampling_measure();
            let mode = match mode {
                EvalMode::Exact => EvalMode::Exact,
                EvalMode::MonteCarlo { samples, .. } => {
                    EvalMode::MonteCarlo { samples, seed: derive_seed(seed, 2 * k + 1) }
                }
            };
            Ok(eval_tf_on(spec, &nu, &tree, mode)?.mean)
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(Estimate::from_samples(&values))
}

/// Monte-Carlo estimate of `lim_M lim_N Q_{M,N}[Φ]`: `m` distinct species
/// with `n_i` distinct individuals each, `φ` applied to their distance
/// matrix. The rates are taken from `params`; `M` and `N` are unused.
pub fn estimate_limit_statistic(
    spec: &TestFunctionalSpec,
    params: &CoalescentParams,
    replicates: usize,
    seed: u64,
) -> Result<Estimate> {
    spec.validate()?;
    check_rates(params.gamma_s, params.gamma_g)?;
    // ν_{M,N} and all its inner measures have mass 1
    let chi = spec.chi.as_ref().map_or(1.0, |c| c.eval(1.0));
    let Some(psi) = &spec.psi else {
        return Ok(Estimate { mean: chi, stderr: 0.0 });
    };
    let factor = chi * psi.eval(&vec![1.0; spec.m]);
    let Some(phi) = &spec.phi else {
        return Ok(Estimate { mean: factor, stderr: 0.0 });
    };
    debug_assert!(matches!(spec.kind, TfKind::TF3 | TfKind::TF4));
    let k = spec.sample_size();
    if spec.m * spec.n.iter().max().copied().unwrap_or(0) > MAX_LIMIT_SAMPLE {
        return Err(Error::PreconditionViolated(format!("limit statistic needs m * max n <= {MAX_LIMIT_SAMPLE}")));
    }
    if replicates < 2 {
        return Err(Error::PreconditionViolated("at least two replicates are needed".into()));
    }
    let values = (0..replicates as u64)
        .into_par_iter()
        .map(|rep| {
            let tree = simulate_sizes(params.gamma_s, params.gamma_g, &spec.n, derive_seed(seed, rep))?;
            let mut r = vec![0.0; k * k];
            for a in 0..k {
                for b in 0..k {
                    r[a * k + b] = tree.distance(a, b);
                }
            }
            Ok(factor * phi.eval(&r, k))
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(Estimate::from_samples(&values))
}

/// `(same-species, cross-species)` coalescence times of the individuals
/// `(0,0), (0,1)` and `(0,0), (1,0)`, one pair per replicate.
pub fn distance_pairs(params: &CoalescentParams, replicates: usize, seed: u64) -> Result<Vec<(f64, f64)>> {
    params.validate()?;
    if params.m < 2 || params.n < 2 {
        return Err(Error::InvalidParams("distance pairs need M >= 2 and N >= 2".into()));
    }
    (0..replicates as u64)
        .into_par_iter()
        .map(|k| {
            let tree = simulate(params, derive_seed(seed, k))?;
            Ok((tree.pairwise_distance((0, 0), (0, 1))?, tree.pairwise_distance((0, 0), (1, 0))?))
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DistanceLawCheck {
    /// KS statistic of same-species distances against `Exp(γ_g)`.
    pub ks_same_species: f64,
    /// KS statistic of cross-species distances against `Exp(γ_g) ∗ Exp(γ_s)`.
    pub ks_cross_species: f64,
    pub same_species: Estimate,
    pub cross_species: Estimate,
}

/// Compares simulated coalescence times with their exact laws.
pub fn distance_law_check(params: &CoalescentParams, pairs: usize, seed: u64) -> Result<DistanceLawCheck> {
    if pairs < 100 {
        return Err(Error::PreconditionViolated("at least 100 pairs are needed".into()));
    }
    let samples = distance_pairs(params, pairs, seed)?;
    let same: Vec<f64> = samples.iter().map(|p| p.0).collect();
    let cross: Vec<f64> = samples.iter().map(|p| p.1).collect();
    let (gs, gg) = (params.gamma_s, params.gamma_g);
    let cross_cdf = cross_species_cdf(gs, gg)?;
    Ok(DistanceLawCheck {
        ks_same_species: ks_statistic(&same, |t| exp_cdf(gg, t)),
        ks_cross_species: ks_statistic(&cross, cross_cdf),
        same_species: Estimate::from_samples(&same),
        cross_species: Estimate::from_samples(&cross),
    })
}

pub fn exp_cdf(rate: f64, t: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else {
        -(-rate * t).exp_m1()
    }
}

/// CDF of `Exp(γ_g) ∗ Exp(γ_s)` for distinct rates:
/// `1 - (γ_s e^{-γ_g t} - γ_g e^{-γ_s t}) / (γ_s - γ_g)`.
pub fn hypoexponential_cdf(gamma_s: f64, gamma_g: f64, t: f64) -> Result<f64> {
    if (gamma_s - gamma_g).abs() < 1e-12 {
        return Err(Error::DegenerateParams { gamma_s, gamma_g });
    }
    if t <= 0.0 {
        return Ok(0.0);
    }
    Ok(1.0 - (gamma_s * (-gamma_g * t).exp() - gamma_g * (-gamma_s * t).exp()) / (gamma_s - gamma_g))
}

/// CDF of `Exp(γ) ∗ Exp(γ)`: `1 - e^{-γt}(1 + γt)`.
pub fn erlang2_cdf(rate: f64, t: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else {
        1.0 - (-rate * t).exp() * (1.0 + rate * t)
    }
}

/// The cross-species CDF, switching to the Erlang form when the rates
/// agree to a relative `1e-6`, where the hypoexponential form cancels.
pub fn cross_species_cdf(gamma_s: f64, gamma_g: f64) -> Result<impl Fn(f64) -> f64> {
    check_rates(gamma_s, gamma_g)?;
    let erlang = (gamma_s - gamma_g).abs() <= 1e-6 * gamma_s.max(gamma_g);
    let mean_rate = 0.5 * (gamma_s + gamma_g);
    Ok(move |t: f64| {
        if erlang {
            erlang2_cdf(mean_rate, t)
        } else {
            hypoexponential_cdf(gamma_s, gamma_g, t).expect("rates are distinct")
        }
    })
}
