mod common;

use common::simpson;
use m2m_core::coalescent::{
    cross_species_cdf, distance_law_check, erlang2_cdf, exp_cdf, hypoexponential_cdf, simulate, simulate_sizes,
    CoalescentParams,
};
use m2m_core::stats::ks_two_sample;
use m2m_core::{Error, Metric};
use proptest::prelude::*;

fn params(m: usize, n: usize) -> CoalescentParams {
    CoalescentParams { gamma_s: 1.0, gamma_g: 1.0, m, n }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn trees_are_nested_ultrametrics(seed in any::<u64>(), m in 1usize..5, n in 1usize..5, gs in 0.2f64..5.0, gg in 0.2f64..5.0) {
        let p = CoalescentParams { gamma_s: gs, gamma_g: gg, m, n };
        let t = simulate(&p, seed).unwrap();
        prop_assert!(t.is_nested());
        prop_assert_eq!(t.gene_events().len(), m * n - 1);
        prop_assert_eq!(t.species_events().len(), m - 1);
        let l = t.leaf_count();
        for a in 0..l {
            prop_assert_eq!(t.distance(a, a), 0.0);
            for b in 0..l {
                prop_assert_eq!(t.distance(a, b), t.distance(b, a));
                if a != b {
                    prop_assert!(t.distance(a, b) > 0.0);
                }
                for c in 0..l {
                    prop_assert!(t.distance(a, c) <= t.distance(a, b).max(t.distance(b, c)));
                }
            }
        }
        // genes of different species meet only after some species merge
        if m > 1 {
            let first = t.species_events()[0].0;
            for a in 0..l {
                for b in 0..l {
                    if t.individual(a).0 != t.individual(b).0 {
                        prop_assert!(t.distance(a, b) > first);
                    }
                }
            }
        }
    }

    #[test]
    fn block_counts_run_from_all_leaves_to_one(seed in any::<u64>(), m in 1usize..6, n in 1usize..6) {
        let t = simulate(&params(m, n), seed).unwrap();
        let last = t.gene_events().last().map_or(0.0, |e| e.0);
        let rows = t.block_counts(&[0.0, last]);
        prop_assert_eq!((rows[0].gene_blocks, rows[0].species_blocks), (m * n, m));
        prop_assert_eq!(rows[1].gene_blocks, 1);
        let grid: Vec<f64> = (0..50).map(|k| k as f64 * last / 49.0).collect();
        let counts = t.block_counts(&grid);
        for w in counts.windows(2) {
            prop_assert!(w[1].gene_blocks <= w[0].gene_blocks);
            prop_assert!(w[1].species_blocks <= w[0].species_blocks);
            prop_assert!(w[1].species_blocks <= w[1].gene_blocks);
        }
    }

    #[test]
    fn relative_frequencies(seed in any::<u64>(), m in 1usize..4, n in 1usize..6) {
        let t = simulate(&params(m, n), seed).unwrap();
        let h = t.gene_events().last().map_or(0.0, |e| e.0);
        for i in 0..m {
            prop_assert_eq!(t.relative_frequency(i, i, 0.0).unwrap(), 1.0 / n as f64);
            for l in 0..m {
                prop_assert_eq!(t.relative_frequency(i, l, h).unwrap(), 1.0);
                let mut prev = 0.0;
                for k in 0..10 {
                    let f = t.relative_frequency(i, l, h * k as f64 / 9.0).unwrap();
                    prop_assert!(f >= prev);
                    prev = f;
                }
            }
        }
    }
}

#[test]
fn uneven_species_sizes() {
    let t = simulate_sizes(1.0, 2.0, &[3, 1, 4], 5).unwrap();
    assert_eq!(t.leaf_count(), 8);
    assert!(t.is_nested());
    assert_eq!(t.individual(t.leaf(2, 3).unwrap()), (2, 3));
    assert!(matches!(t.leaf(1, 1), Err(Error::UnknownLeaf { species: 1, individual: 1 })));
    let x = t.build_m2m().unwrap();
    assert!((x.mass() - 1.0).abs() < 1e-12);
}

#[test]
fn invalid_parameters() {
    assert!(matches!(simulate(&params(0, 3), 0), Err(Error::InvalidParams(_))));
    let bad = CoalescentParams { gamma_s: -1.0, ..params(2, 2) };
    assert!(matches!(simulate(&bad, 0), Err(Error::InvalidParams(_))));
    assert!(matches!(hypoexponential_cdf(1.0, 1.0, 1.0), Err(Error::DegenerateParams { .. })));
}

#[test]
fn cdfs_match_quadrature_of_their_densities() {
    for &(gs, gg) in &[(1.0, 2.0), (3.0, 0.5), (0.7, 0.71)] {
        let density = |s: f64| gg * gs / (gs - gg) * ((-gg * s).exp() - (-gs * s).exp());
        for &t in &[0.1, 0.5, 1.0, 3.0, 8.0] {
            let q = simpson(density, 0.0, t, 2000);
            let f = hypoexponential_cdf(gs, gg, t).unwrap();
            assert!((f - q).abs() < 1e-8, "({gs},{gg},{t}): {f} vs {q}");
        }
    }
    for &t in &[0.2, 1.0, 4.0] {
        let q = simpson(|s| 1.5 * 1.5 * s * (-1.5 * s).exp(), 0.0, t, 2000);
        assert!((erlang2_cdf(1.5, t) - q).abs() < 1e-8);
        let q = simpson(|s| 2.0 * (-2.0 * s).exp(), 0.0, t, 2000);
        assert!((exp_cdf(2.0, t) - q).abs() < 1e-8);
    }
    let near = cross_species_cdf(1.0, 1.0 + 1e-9).unwrap();
    assert!((near(1.3) - erlang2_cdf(1.0, 1.3)).abs() < 1e-8);
}

#[test]
fn distance_laws_hold_for_unequal_rates() {
    let p = CoalescentParams { gamma_s: 0.5, gamma_g: 2.0, m: 3, n: 3 };
    let c = distance_law_check(&p, 4000, 9).unwrap();
    assert!(c.ks_same_species < 0.035, "{c:?}");
    assert!(c.ks_cross_species < 0.035, "{c:?}");
    assert!((c.cross_species.mean - 2.5).abs() < 4.0 * c.cross_species.stderr, "{c:?}");
}

#[test]
fn individuals_are_exchangeable() {
    let p = params(3, 4);
    let mut first = Vec::new();
    let mut last = Vec::new();
    for seed in 0..3000 {
        let t = simulate(&p, seed).unwrap();
        first.push(t.pairwise_distance((0, 0), (0, 1)).unwrap());
        last.push(t.pairwise_distance((2, 3), (2, 1)).unwrap());
    }
    assert!(ks_two_sample(&first, &last) < 0.05);
}

fn clip_entry_spec(m: usize, n: Vec<usize>, c: f64) -> m2m_core::functionals::TestFunctionalSpec {
    use m2m_core::functionals::{ChiSpec, PhiSpec, PsiSpec, TestFunctionalSpec, TfKind};
    TestFunctionalSpec {
        kind: TfKind::TF3,
        m,
        n,
        chi: Some(ChiSpec::Clip { c: 10.0, offset: 0.0 }),
        psi: Some(PsiSpec::ClipProduct { c: 10.0 }),
        phi: Some(PhiSpec::ClipEntry { i: 0, j: 1, c }),
    }
}

#[test]
fn cross_species_limit_is_truncated_hypoexponential_mean() {
    let (gs, gg, c) = (0.5, 2.0, 3.0);
    let spec = clip_entry_spec(2, vec![1, 1], c);
    let p = CoalescentParams { gamma_s: gs, gamma_g: gg, m: 2, n: 2 };
    let e = m2m_core::coalescent::estimate_limit_statistic(&spec, &p, 40_000, 21).unwrap();
    // chi(1) = 1 and psi(1, 1) = 1/10 multiply E[min(T, C)] = ∫_0^C P(T > t) dt
    let survival = |t: f64| 1.0 - hypoexponential_cdf(gs, gg, t).unwrap();
    let expected = 0.1 * simpson(survival, 0.0, c, 2000);
    assert!((e.mean - expected).abs() < 4.0 * e.stderr, "{e:?} vs {expected}");
}

#[test]
fn q_stderr_shrinks_like_inverse_root_replicates() {
    use m2m_core::coalescent::estimate_q;
    use m2m_core::functionals::EvalMode;
    let spec = clip_entry_spec(1, vec![2], 10.0);
    let p = params(2, 3);
    let small = estimate_q(&spec, &p, 100, 4, EvalMode::Exact).unwrap();
    let large = estimate_q(&spec, &p, 10_000, 4, EvalMode::Exact).unwrap();
    let ratio = small.stderr / large.stderr;
    assert!((7.0..14.0).contains(&ratio), "ratio {ratio}");
}
