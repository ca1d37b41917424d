#![allow(dead_code)]

use m2m_core::random::{random_measure, random_space, rng_from_seed};
use m2m_core::{AtomicMeasure, FiniteMetricSpace, Metric};

/// A random space on `n` points with two random measures on it.
pub fn random_pair(n: usize, max_support: usize, seed: u64) -> (FiniteMetricSpace, AtomicMeasure, AtomicMeasure) {
    let mut rng = rng_from_seed(seed);
    let space = random_space(n, &mut rng);
    let mu = random_measure(n, max_support, 0.25, &mut rng);
    let eta = random_measure(n, max_support, 0.25, &mut rng);
    (space, mu, eta)
}

fn weight_of(mu: &AtomicMeasure, set: u32) -> f64 {
    mu.atoms().iter().filter(|a| set >> a.0 & 1 == 1).map(|a| a.1).sum()
}

/// Open `eps`-neighbourhood of a point set, as a bit mask.
fn enlarge(space: &FiniteMetricSpace, set: u32, eps: f64) -> u32 {
    let n = space.len();
    (0..n).filter(|&y| (0..n).any(|x| set >> x & 1 == 1 && space.distance(x, y) < eps)).fold(0, |m, y| m | 1 << y)
}

/// Brute-force Prokhorov feasibility: every subset of the whole space, in
/// both directions.
pub fn oracle_feasible(space: &FiniteMetricSpace, mu: &AtomicMeasure, eta: &AtomicMeasure, eps: f64) -> bool {
    let n = space.len();
    assert!(n <= 12);
    (1u32..1 << n).all(|a| {
        let b = enlarge(space, a, eps);
        weight_of(mu, a) <= weight_of(eta, b) + eps + 1e-12 && weight_of(eta, a) <= weight_of(mu, b) + eps + 1e-12
    })
}

/// Infimum of the feasible `eps`: scan a grid of step `1/256`, then bisect
/// the bracketing cell.
pub fn oracle_prokhorov(space: &FiniteMetricSpace, mu: &AtomicMeasure, eta: &AtomicMeasure) -> f64 {
    let top = mu.mass().max(eta.mass()) + 1.0;
    let step = 1.0 / 256.0;
    let mut hi = step;
    while !oracle_feasible(space, mu, eta, hi) {
        hi += step;
        assert!(hi <= top, "oracle failed to find a feasible eps");
    }
    let mut lo = hi - step;
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if oracle_feasible(space, mu, eta, mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

/// A space whose distances are those of `space` multiplied by `factor`.
pub fn scaled(space: &FiniteMetricSpace, factor: f64) -> FiniteMetricSpace {
    let m = space.to_matrix().into_iter().map(|r| r.into_iter().map(|d| d * factor).collect()).collect();
    FiniteMetricSpace::new(m).unwrap()
}

/// Simpson quadrature of `f` over `[a, b]` with `n` (even) panels.
pub fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for k in 1..n {
        let w = if k % 2 == 1 { 4.0 } else { 2.0 };
        s += w * f(a + k as f64 * h);
    }
    s * h / 3.0
}
