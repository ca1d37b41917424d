//! Exact Prokhorov distance between finite atomic measures.
//!
//! Only the distances between a point of `supp μ` and a point of `supp η`
//! enter the definition: shrinking a closed set `A` to `A ∩ supp μ` only
//! weakens `μ(A) ≤ η(B(A, ε)) + ε`. Every routine here therefore works on a
//! bipartite problem: two weight vectors and a cross-distance matrix.
//!
//! For fixed `ε` the worst set is found by enumerating subsets of the smaller
//! support. When the smaller support is on the `η` side, a subset `T` of
//! `supp η` stands for the largest `A` whose `ε`-neighbourhood stays in `T`;
//! this covers the supremum over all `A`.
//!
//! The feasibility of `ε` only changes when `ε` passes a cross distance, so
//! the infimum is found exactly: on each interval `(d_k, d_{k+1}]` between
//! consecutive distinct cross distances the worst excess `F_k` is constant,
//! and the smallest feasible `ε` in that interval is `max(d_k, F_k)`.

use crate::measure::AtomicMeasure;
use crate::space::Metric;
use crate::{Error, Result};

/// Largest support that is enumerated subset by subset.
pub const MAX_ENUMERATED_SUPPORT: usize = 22;

/// Weights on two finite sets plus the distances between them.
#[derive(Debug, Clone)]
pub struct Bipartite {
    left: Vec<f64>,
    right: Vec<f64>,
    // left.len() x right.len(), row-major
    cross: Vec<f64>,
}

impl Bipartite {
    pub fn new(left: Vec<f64>, right: Vec<f64>, cross: impl Fn(usize, usize) -> f64) -> Self {
        let mut c = Vec::with_capacity(left.len() * right.len());
        for i in 0..left.len() {
            for j in 0..right.len() {
                c.push(cross(i, j));
            }
        }
        Self { left, right, cross: c }
    }

    /// The problem for two measures on one space.
    pub fn on_space(mu: &AtomicMeasure, eta: &AtomicMeasure, metric: &impl Metric) -> Self {
        let (a, b) = (mu.atoms(), eta.atoms());
        Self::new(a.iter().map(|x| x.1).collect(), b.iter().map(|x| x.1).collect(), |i, j| {
            metric.distance(a[i].0, b[j].0)
        })
    }

    fn check_size(&self) -> Result<()> {
        let (l, r) = (self.left.len(), self.right.len());
        if l.min(r) > MAX_ENUMERATED_SUPPORT {
            return Err(Error::SupportTooLarge { left: l, right: r, limit: MAX_ENUMERATED_SUPPORT });
        }
        Ok(())
    }

    fn masses(&self) -> (f64, f64) {
        (self.left.iter().sum(), self.right.iter().sum())
    }

    fn snap(&self) -> f64 {
        let (a, b) = self.masses();
        1e-13 * (a + b).max(1.0)
    }

    /// Worst excess in both directions when `i ~ j` iff `adjacent(cross(i, j))`.
    fn worst_excess(&self, adjacent: impl Fn(f64) -> bool + Copy) -> f64 {
        let (nl, nr) = (self.left.len(), self.right.len());
        let adj_lr: Vec<Vec<bool>> =
            (0..nl).map(|i| (0..nr).map(|j| adjacent(self.cross[i * nr + j])).collect()).collect();
        let adj_rl: Vec<Vec<bool>> = (0..nr).map(|j| (0..nl).map(|i| adj_lr[i][j]).collect()).collect();
        let fwd = max_excess(&self.left, &self.right, &adj_lr);
        let bwd = max_excess(&self.right, &self.left, &adj_rl);
        let worst = fwd.max(bwd);
        if worst < self.snap() {
            0.0
        } else {
            worst
        }
    }

    /// Whether both Prokhorov inequalities hold at `eps` (open balls).
    pub fn feasible(&self, eps: f64) -> Result<bool> {
        self.check_size()?;
        Ok(self.worst_excess(|c| c < eps) <= eps)
    }

    /// The Prokhorov distance, computed exactly up to floating-point
    /// rounding.
    pub fn distance(&self) -> Result<f64> {
        self.check_size()?;
        let (ma, mb) = self.masses();
        if ma == 0.0 && mb == 0.0 {
            return Ok(0.0);
        }
        let mut breaks: Vec<f64> = self.cross.clone();
        breaks.push(0.0);
        breaks.sort_by(f64::total_cmp);
        breaks.dedup();

        // On (breaks[k], breaks[k+1]] a pair is adjacent iff cross <= breaks[k].
        let excess_at = |k: usize| {
            let d = breaks[k];
            self.worst_excess(|c| c <= d)
        };
        let upper_of = |k: usize| breaks.get(k + 1).copied().unwrap_or(f64::INFINITY);

        // Smallest k with F_k <= breaks[k+1]; the predicate is monotone in k.
        let (mut lo, mut hi) = (0usize, breaks.len() - 1);
        let mut f_hi = excess_at(hi);
        while lo < hi {
            let mid = lo + (hi - lo) / 2;
            let f = excess_at(mid);
            if f <= upper_of(mid) {
                hi = mid;
                f_hi = f;
            } else {
                lo = mid + 1;
            }
        }
        let d = breaks[hi].max(f_hi);
        Ok(d.clamp((ma - mb).abs(), ma.max(mb)))
    }
}

/// `sup_A src(A) - dst(N(A))` over subsets `A` of the source side, where
/// `N(A)` is the set of destination points adjacent to some point of `A`.
fn max_excess(src: &[f64], dst: &[f64], adj: &[Vec<bool>]) -> f64 {
    if src.is_empty() {
        return 0.0;
    }
    if src.len() <= dst.len() {
        excess_direct(src, dst, adj)
    } else {
        excess_dual(src, dst, adj)
    }
}

/// Sums of subsets of `w` looked up byte by byte, so that a given set always
/// sums to the same floating-point value.
struct SubsetSums {
    tables: Vec<[f64; 256]>,
}

impl SubsetSums {
    fn new(w: &[f64]) -> Self {
        let tables = w
            .chunks(8)
            .map(|chunk| {
                let mut t = [0.0; 256];
                for (m, slot) in t.iter_mut().enumerate() {
                    *slot = chunk.iter().enumerate().filter(|(b, _)| m >> b & 1 == 1).map(|(_, v)| v).sum();
                }
                t
            })
            .collect();
        Self { tables }
    }

    fn sum(&self, words: &[u64]) -> f64 {
        let mut s = 0.0;
        for (c, t) in self.tables.iter().enumerate() {
            let byte = (words[c / 8] >> ((c % 8) * 8)) & 0xFF;
            s += t[byte as usize];
        }
        s
    }
}

fn excess_direct(src: &[f64], dst: &[f64], adj: &[Vec<bool>]) -> f64 {
    let ns = src.len();
    let nd = dst.len();
    let words = nd.div_ceil(64).max(1);
    let nbrs: Vec<Vec<usize>> = adj.iter().map(|row| (0..nd).filter(|&j| row[j]).collect()).collect();
    let src_sums = SubsetSums::new(src);
    let dst_sums = SubsetSums::new(dst);
    let mut count = vec![0u32; nd];
    let mut covered = vec![0u64; words];
    let mut set = [0u64; 1];
    let mut best: f64 = 0.0;
    // Gray-code walk: each step toggles one source point.
    for k in 1u64..(1u64 << ns) {
        let i = k.trailing_zeros() as usize;
        set[0] ^= 1 << i;
        if set[0] >> i & 1 == 1 {
            for &j in &nbrs[i] {
                if count[j] == 0 {
                    covered[j / 64] |= 1 << (j % 64);
                }
                count[j] += 1;
            }
        } else {
            for &j in &nbrs[i] {
                count[j] -= 1;
                if count[j] == 0 {
                    covered[j / 64] &= !(1 << (j % 64));
                }
            }
        }
        let e = src_sums.sum(&set) - dst_sums.sum(&covered);
        if e > best {
            best = e;
        }
    }
    best
}

fn excess_dual(src: &[f64], dst: &[f64], adj: &[Vec<bool>]) -> f64 {
    let nd = dst.len();
    debug_assert!(nd <= MAX_ENUMERATED_SUPPORT);
    let nbr_mask: Vec<u64> =
        adj.iter().map(|row| row.iter().enumerate().filter(|(_, &a)| a).fold(0u64, |m, (j, _)| m | 1 << j)).collect();
    let dst_sums = SubsetSums::new(dst);
    let mut best: f64 = 0.0;
    for t in 0u64..(1u64 << nd) {
        let mut s = 0.0;
        let mut reach = 0u64;
        for (i, &m) in nbr_mask.iter().enumerate() {
            if m & !t == 0 {
                s += src[i];
                reach |= m;
            }
        }
        let e = s - dst_sums.sum(&[reach]);
        if e > best {
            best = e;
        }
    }
    best
}

/// Whether `μ(A) ≤ η(B(A,ε)) + ε` and `η(A) ≤ μ(B(A,ε)) + ε` for all `A`.
pub fn prokhorov_feasible(mu: &AtomicMeasure, eta: &AtomicMeasure, metric: &impl Metric, eps: f64) -> Result<bool> {
    if eps <= 0.0 {
        return Err(Error::PreconditionViolated("eps must be positive".into()));
    }
    Bipartite::on_space(mu, eta, metric).feasible(eps)
}

/// Prokhorov distance between two measures on one space.
///
/// The value is exact up to rounding, so it is in particular within `tol`
/// of the infimum.
pub fn prokhorov(mu: &AtomicMeasure, eta: &AtomicMeasure, metric: &impl Metric, tol: f64) -> Result<f64> {
    if tol <= 0.0 {
        return Err(Error::PreconditionViolated("tol must be positive".into()));
    }
    if mu == eta {
        return Ok(0.0);
    }
    Bipartite::on_space(mu, eta, metric).distance()
}
