//! Equivalence of m2m spaces via a backtracking isometry search between
//! effective supports.

use crate::measure::{AtomicMeasure, TwoLevelMeasure};
use crate::space::Metric;
use crate::M2MSpace;

#[derive(Debug, Clone, PartialEq)]
pub struct Equivalence {
    pub equivalent: bool,
    /// `(x, y)` pairs in the original point indexing of both spaces.
    pub witness: Option<Vec<(usize, usize)>>,
}

impl Equivalence {
    fn no() -> Self {
        Self { equivalent: false, witness: None }
    }
}

/// Decides whether `x` and `y` are equivalent up to `tol`: a bijection
/// between effective supports that preserves distances, maps the moment
/// measure onto the moment measure and the atoms of `ν` onto those of `λ`.
///
/// Candidate images are tried in order of moment-weight discrepancy, then
/// distance-profile discrepancy, then index; the first witness is returned.
pub fn are_equivalent(x: &M2MSpace, y: &M2MSpace, tol: f64) -> Equivalence {
    assert!(tol > 0.0, "tolerance must be positive");
    let sx = x.effective_support();
    let sy = y.effective_support();
    if sx.len() != sy.len() || (x.mass() - y.mass()).abs() > tol {
        return Equivalence::no();
    }
    let rx = x.restrict_to_support();
    let ry = y.restrict_to_support();
    if rx.nu().atoms().len() != ry.nu().atoms().len() {
        return Equivalence::no();
    }
    let n = sx.len();
    if n == 0 {
        // both measures only charge the null measure; the masses already agree
        return Equivalence { equivalent: true, witness: Some(Vec::new()) };
    }

    let mmx = weights_of(&rx.nu().moment_measure(), n);
    let mmy = weights_of(&ry.nu().moment_measure(), n);
    let px = profiles(&rx);
    let py = profiles(&ry);

    let mut candidates: Vec<Vec<usize>> = Vec::with_capacity(n);
    for i in 0..n {
        let mut c: Vec<(f64, f64, usize)> = (0..n)
            .filter_map(|j| {
                let dm = (mmx[i] - mmy[j]).abs();
                let (dmax, dsum) = profile_diff(&px[i], &py[j]);
                (dm <= tol && dmax <= tol).then_some((dm, dsum, j))
            })
            .collect();
        if c.is_empty() {
            return Equivalence::no();
        }
        c.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)).then(a.2.cmp(&b.2)));
        candidates.push(c.into_iter().map(|t| t.2).collect());
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&i| (candidates[i].len(), i));

    let mut search = Search {
        x: &rx,
        y: &ry,
        tol,
        order: &order,
        candidates: &candidates,
        assign: vec![usize::MAX; n],
        used: vec![false; n],
    };
    if search.run(0) {
        let witness = (0..n).map(|i| (sx[i], sy[search.assign[i]])).collect();
        Equivalence { equivalent: true, witness: Some(witness) }
    } else {
        Equivalence::no()
    }
}

struct Search<'a> {
    x: &'a M2MSpace,
    y: &'a M2MSpace,
    tol: f64,
    order: &'a [usize],
    candidates: &'a [Vec<usize>],
    assign: Vec<usize>,
    used: Vec<bool>,
}

impl Search<'_> {
    fn run(&mut self, depth: usize) -> bool {
        if depth == self.order.len() {
            return self.atoms_match();
        }
        let i = self.order[depth];
        for &j in &self.candidates[i] {
            if self.used[j] || !self.consistent(depth, i, j) {
                continue;
            }
            self.assign[i] = j;
            self.used[j] = true;
            if self.run(depth + 1) {
                return true;
            }
            self.used[j] = false;
            self.assign[i] = usize::MAX;
        }
        false
    }

    fn consistent(&self, depth: usize, i: usize, j: usize) -> bool {
        let (dx, dy) = (self.x.space(), self.y.space());
        self.order[..depth].iter().all(|&k| (dx.distance(i, k) - dy.distance(j, self.assign[k])).abs() <= self.tol)
    }

    fn atoms_match(&self) -> bool {
        let pushed = self.x.nu().pushforward(|p| Some(self.assign[p])).expect("assignment is total on the support");
        atoms_match(&pushed, self.y.nu(), self.tol)
    }
}

/// Multiset equality of atoms up to `tol` (outer weights and weight maps),
/// decided by bipartite matching.
pub fn atoms_match(a: &TwoLevelMeasure, b: &TwoLevelMeasure, tol: f64) -> bool {
    let (aa, bb) = (a.atoms(), b.atoms());
    if aa.len() != bb.len() {
        return false;
    }
    let compatible = |i: usize, j: usize| (aa[i].0 - bb[j].0).abs() <= tol && aa[i].1.max_abs_diff(&bb[j].1) <= tol;
    let mut owner: Vec<Option<usize>> = vec![None; bb.len()];
    for i in 0..aa.len() {
        let mut seen = vec![false; bb.len()];
        if !augment(i, &compatible, &mut owner, &mut seen) {
            return false;
        }
    }
    true
}

fn augment(
    i: usize,
    compatible: &impl Fn(usize, usize) -> bool,
    owner: &mut [Option<usize>],
    seen: &mut [bool],
) -> bool {
    for j in 0..owner.len() {
        if seen[j] || !compatible(i, j) {
            continue;
        }
        seen[j] = true;
        let free = match owner[j] {
            None => true,
            Some(k) => augment(k, compatible, owner, seen),
        };
        if free {
            owner[j] = Some(i);
            return true;
        }
    }
    false
}

fn weights_of(mu: &AtomicMeasure, n: usize) -> Vec<f64> {
    let mut w = vec![0.0; n];
    for &(p, v) in mu.atoms() {
        w[p] = v;
    }
    w
}

fn profiles(x: &M2MSpace) -> Vec<Vec<f64>> {
    let s = x.space();
    (0..s.len())
        .map(|i| {
            let mut row = s.row(i).to_vec();
            row.sort_by(f64::total_cmp);
            row
        })
        .collect()
}

fn profile_diff(a: &[f64], b: &[f64]) -> (f64, f64) {
    a.iter().zip(b).fold((0.0f64, 0.0f64), |(m, s), (u, v)| {
        let d = (u - v).abs();
        (m.max(d), s + d)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{random_m2m, random_permutation, rng_from_seed};
    use crate::FiniteMetricSpace;

    fn two_point(d: f64) -> M2MSpace {
        let space = FiniteMetricSpace::new(vec![vec![0.0, d], vec![d, 0.0]]).unwrap();
        let mu = AtomicMeasure::from_weights([(0, 0.5), (1, 0.5)]).unwrap();
        M2MSpace::new(space, TwoLevelMeasure::dirac(mu, 1.0)).unwrap()
    }

    #[test]
    fn relabeled_copy_is_equivalent_with_permutation_witness() {
        let x = random_m2m(6, 3, 4, 1.0, 11);
        let mut rng = rng_from_seed(3);
        let perm = random_permutation(6, &mut rng);
        let y = x.permuted(&perm).unwrap();
        let eq = are_equivalent(&x, &y, 1e-9);
        assert!(eq.equivalent);
        for (a, b) in eq.witness.unwrap() {
            // witness must be an isometry on the support carrying the same weights
            assert_eq!(x.nu().moment_measure().weight(a), y.nu().moment_measure().weight(b));
        }
    }

    #[test]
    fn null_measures_with_different_mass_differ() {
        let e = FiniteMetricSpace::empty();
        let x = M2MSpace::new(e.clone(), TwoLevelMeasure::dirac(AtomicMeasure::null(), 2.0)).unwrap();
        let y = M2MSpace::new(e, TwoLevelMeasure::dirac(AtomicMeasure::null(), 3.0)).unwrap();
        assert!(!are_equivalent(&x, &y, 1e-9).equivalent);
        assert!(are_equivalent(&x, &x, 1e-9).equivalent);
    }

    #[test]
    fn different_distances_not_equivalent() {
        assert!(!are_equivalent(&two_point(1.0), &two_point(2.0), 1e-9).equivalent);
        assert!(are_equivalent(&two_point(1.0), &two_point(1.0 + 1e-12), 1e-9).equivalent);
    }

    #[test]
    fn atoms_must_match_not_only_moments() {
        // same moment measure (uniform on two points), different atom structure
        let space = FiniteMetricSpace::new(vec![vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        let split =
            TwoLevelMeasure::from_atoms([(0.5, AtomicMeasure::dirac(0, 1.0)), (0.5, AtomicMeasure::dirac(1, 1.0))])
                .unwrap();
        let joint = TwoLevelMeasure::dirac(AtomicMeasure::from_weights([(0, 0.5), (1, 0.5)]).unwrap(), 1.0);
        let x = M2MSpace::new(space.clone(), split).unwrap();
        let y = M2MSpace::new(space, joint).unwrap();
        assert_eq!(x.nu().moment_measure(), y.nu().moment_measure());
        assert!(!are_equivalent(&x, &y, 1e-9).equivalent);
    }

    #[test]
    fn unused_points_are_ignored() {
        let big = FiniteMetricSpace::new(vec![vec![0.0, 1.0, 7.0], vec![1.0, 0.0, 7.0], vec![7.0, 7.0, 0.0]]).unwrap();
        let mu = AtomicMeasure::from_weights([(0, 0.5), (1, 0.5)]).unwrap();
        let x = M2MSpace::new(big, TwoLevelMeasure::dirac(mu, 1.0)).unwrap();
        assert!(are_equivalent(&x, &two_point(1.0), 1e-9).equivalent);
    }
}
