//! The modulus of mass distribution
//! `V_δ(μ) = inf{ε > 0 : μ({x : μ(B(x, ε)) ≤ δ}) ≤ ε}` with open balls.

use crate::measure::AtomicMeasure;
use crate::space::Metric;
use crate::{Error, Result};

/// Mass of the `δ`-thin points at radius `eps`:
/// `μ({x : μ(B(x, eps)) ≤ δ})`.
pub fn thin_mass(mu: &AtomicMeasure, metric: &impl Metric, delta: f64, eps: f64) -> f64 {
    let a = mu.atoms();
    a.iter().filter(|&&(x, _)| ball_mass(mu, metric, x, |d| d < eps) <= delta).map(|a| a.1).fold(0.0, |s, w| s + w)
}

fn ball_mass(mu: &AtomicMeasure, metric: &impl Metric, x: usize, inside: impl Fn(f64) -> bool) -> f64 {
    mu.atoms().iter().filter(|&&(y, _)| inside(metric.distance(x, y))).map(|a| a.1).fold(0.0, |s, w| s + w)
}

/// `V_δ(μ)`, computed exactly.
///
/// The thin mass is constant on each interval `(d_k, d_{k+1}]` between
/// consecutive distinct distances of support points; on such an interval
/// the smallest admissible `ε` is `max(d_k, thin mass)` when that value
/// lies in the interval.
pub fn modulus_mass_distribution(mu: &AtomicMeasure, metric: &impl Metric, delta: f64) -> Result<f64> {
    if !(delta >= 0.0) {
        return Err(Error::PreconditionViolated(format!("delta must be nonnegative, got {delta}")));
    }
    let a = mu.atoms();
    if a.is_empty() {
        return Ok(0.0);
    }
    let mut breaks = vec![0.0];
    for &(x, _) in a {
        for &(y, _) in a {
            breaks.push(metric.distance(x, y));
        }
    }
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();

    let mut best = f64::INFINITY;
    for (k, &d) in breaks.iter().enumerate() {
        let next = breaks.get(k + 1).copied().unwrap_or(f64::INFINITY);
        let thin: f64 = a
            .iter()
            .filter(|&&(x, _)| ball_mass(mu, metric, x, |r| r <= d) <= delta)
            .map(|a| a.1)
            .fold(0.0, |s, w| s + w);
        let eps = d.max(thin);
        if eps <= next {
            best = best.min(eps);
        }
        if thin <= d {
            // every later interval starts above d
            break;
        }
    }
    Ok(best)
}

/// A finite set `A` with `μ(X \ B(A, eps)) < eps`, given `V_δ(μ) < eps`.
///
/// Points are added greedily, each time the one whose ball covers the most
/// mass not yet covered, until the uncovered mass drops below `eps`. If the
/// total mass is at most `eps` a single point suffices.
pub fn covering_set(mu: &AtomicMeasure, metric: &impl Metric, delta: f64, eps: f64) -> Result<Vec<usize>> {
    if !(eps > 0.0) {
        return Err(Error::PreconditionViolated(format!("eps must be positive, got {eps}")));
    }
    let v = modulus_mass_distribution(mu, metric, delta)?;
    if !(v < eps) {
        return Err(Error::PreconditionViolated(format!("V_delta = {v} is not below eps = {eps}")));
    }
    let a = mu.atoms();
    if mu.mass() <= eps {
        return Ok(if a.is_empty() && metric.is_empty() { Vec::new() } else { vec![a.first().map_or(0, |p| p.0)] });
    }
    let mut covered = vec![false; a.len()];
    let mut uncovered = mu.mass();
    let mut chosen = Vec::new();
    while uncovered >= eps {
        let gain = |x: usize| -> f64 {
            a.iter().zip(&covered).filter(|&(&(y, _), &c)| !c && metric.distance(x, y) < eps).map(|(p, _)| p.1).sum()
        };
        let (x, g) = a
            .iter()
            .map(|&(x, _)| (x, gain(x)))
            .fold((usize::MAX, -1.0), |best, c| if c.1 > best.1 { c } else { best });
        if g <= 0.0 {
            break;
        }
        chosen.push(x);
        for (k, &(y, _)) in a.iter().enumerate() {
            if metric.distance(x, y) < eps {
                covered[k] = true;
            }
        }
        uncovered = a.iter().zip(&covered).filter(|p| !p.1).map(|p| p.0 .1).fold(0.0, |s, w| s + w);
    }
    chosen.sort_unstable();
    Ok(chosen)
}
