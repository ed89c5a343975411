use proptest::prelude::*;
use rand::Rng;
use rfsurrogate_core::{FrequencyGrid, RngStream};
use rfsurrogate_sampling::{cumtrapz, mixture_probabilities, sample_geometry, uaw_afs, MixtureConfig, SamplingError};
use statrs::distribution::{ChiSquared, ContinuousCDF};

fn grid(n: usize) -> FrequencyGrid {
    FrequencyGrid::linspace(1e9, 8e9, n).unwrap()
}

fn mass(c: &[f64], l: usize, r: usize) -> f64 {
    c[r.min(c.len() - 1)] - c[l]
}

#[test]
fn constant_uncertainty_gives_equal_widths() {
    let g = grid(100);
    let d = uaw_afs(&g, &[0.7; 100], 4, &mut RngStream::new(1, "c")).unwrap();
    assert!(!d.uniform_fallback);
    for &(l, r) in &d.partitions {
        assert!((r - l).abs_diff(25) <= 1, "width {}", r - l);
    }
    assert_eq!(d.indices.len(), 4);
}

#[test]
fn triangular_bump_pulls_samples_up() {
    let g = grid(201);
    let u: Vec<f64> = (0..201)
        .map(|i| {
            let t = (i as f64 - 150.0).abs() / 50.0;
            if i >= 100 { (1.0 - t).max(0.0) } else { 0.0 }
        })
        .collect();
    // the bump holds all the mass, so every partition edge lies in [100, 200]
    let c = cumtrapz(&u, g.points());
    assert!(c[100] == 0.0 && c[200] > 0.0);
    for seed in 0..20 {
        let d = uaw_afs(&g, &u, 8, &mut RngStream::new(seed, "tri")).unwrap();
        let upper = d.indices.iter().filter(|&&i| i >= 100).count();
        assert!(upper >= 6, "seed {seed}: {:?}", d.indices);
    }
}

#[test]
fn saturation_returns_every_index() {
    let g = grid(37);
    let mut rng = RngStream::new(2, "sat");
    let u: Vec<f64> = (0..37).map(|_| rng.random::<f64>()).collect();
    let d = uaw_afs(&g, &u, 37, &mut rng).unwrap();
    assert_eq!(d.indices, (0..37).collect::<Vec<_>>());
}

#[test]
fn zero_uncertainty_falls_back_to_equal_widths() {
    let g = grid(50);
    let d = uaw_afs(&g, &[0.0; 50], 5, &mut RngStream::new(3, "z")).unwrap();
    assert!(d.uniform_fallback);
    assert!(d.partitions.iter().all(|&(l, r)| r - l == 10));
}

#[test]
fn spike_collapses_partitions_without_duplicates() {
    let g = grid(60);
    let mut u = vec![0.0; 60];
    u[30] = 1.0;
    let d = uaw_afs(&g, &u, 10, &mut RngStream::new(4, "spike")).unwrap();
    assert_eq!(d.indices.len(), 10);
    assert!(d.indices.windows(2).all(|w| w[0] < w[1]));
    assert!(d.partitions.iter().any(|&(l, r)| l == r));
}

#[test]
fn invalid_requests() {
    let g = grid(10);
    let mut rng = RngStream::new(5, "bad");
    assert!(uaw_afs(&g, &[1.0; 10], 0, &mut rng).is_err());
    assert!(uaw_afs(&g, &[1.0; 10], 11, &mut rng).is_err());
    assert!(uaw_afs(&g, &[1.0; 9], 3, &mut rng).is_err());
    let mut neg = vec![1.0; 10];
    neg[3] = -0.1;
    assert!(uaw_afs(&g, &neg, 3, &mut rng).is_err());
}

#[test]
fn partitions_carry_equal_mass_on_random_curves() {
    for seed in 0..100u64 {
        let mut rng = RngStream::new(seed, "curves");
        let n_grid = rng.random_range(20..400);
        let g = grid(n_grid);
        let u: Vec<f64> = (0..n_grid).map(|i| (rng.random::<f64>() * 3.0 + (i as f64 * 0.05).sin()).max(0.0)).collect();
        let n = rng.random_range(1..=n_grid.min(40));
        let d = uaw_afs(&g, &u, n, &mut rng).unwrap();
        let c = cumtrapz(&u, g.points());
        let cell = c.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max);
        let target = c[n_grid - 1] / n as f64;
        for &(l, r) in &d.partitions {
            let m = mass(&c, l, r);
            assert!((m - target).abs() <= cell * (1.0 + 1e-12), "seed {seed}: mass {m} vs {target} (cell {cell})");
        }
        assert_eq!(d.indices.len(), n);
        assert!(d.indices.windows(2).all(|w| w[0] < w[1]), "seed {seed}: duplicates");
    }
}

#[test]
fn uniform_limit_passes_chi_square() {
    let agg = [0.3, 5.0, 0.0, 2.2, 9.1, 0.4, 1.0, 3.3, 0.0, 7.5];
    let pool: Vec<usize> = (0..10).collect();
    let config = MixtureConfig { lambda: 1.0, batch: 1 };
    let mut rng = RngStream::new(42, "chi");
    let mut counts = [0usize; 10];
    let draws = 100_000;
    for _ in 0..draws {
        counts[sample_geometry(&agg, &pool, &config, &mut rng).unwrap().indices[0]] += 1;
    }
    let expected = draws as f64 / 10.0;
    let stat: f64 = counts.iter().map(|&k| (k as f64 - expected).powi(2) / expected).sum();
    let p = 1.0 - ChiSquared::new(9.0).unwrap().cdf(stat);
    assert!(p > 0.01, "chi-square {stat}, p {p}");
}

#[test]
fn uncertainty_limit_is_proportional() {
    let agg = [3.0, 1.0, 0.0, 0.0];
    let pool = [0, 1, 2, 3];
    let config = MixtureConfig { lambda: 0.0, batch: 1 };
    let mut rng = RngStream::new(7, "prop");
    let mut counts = [0usize; 4];
    let trials = 100_000;
    for _ in 0..trials {
        counts[sample_geometry(&agg, &pool, &config, &mut rng).unwrap().indices[0]] += 1;
    }
    let f: Vec<f64> = counts.iter().map(|&k| k as f64 / trials as f64).collect();
    assert!((f[0] - 0.75).abs() < 0.02 && (f[1] - 0.25).abs() < 0.02, "{f:?}");
    assert_eq!(counts[2] + counts[3], 0);
}

#[test]
fn mixture_is_renormalized_over_the_pool() {
    let agg = [4.0, 1.0, 100.0, 3.0];
    let (p, flat) = mixture_probabilities(&agg, &[0, 1, 3], 0.4);
    assert!(!flat);
    let expect = [0.4 / 3.0 + 0.6 * 0.5, 0.4 / 3.0 + 0.6 * 0.125, 0.4 / 3.0 + 0.6 * 0.375];
    for (a, b) in p.iter().zip(expect) {
        assert!((a - b).abs() < 1e-15);
    }
}

#[test]
fn exhausting_the_pool_returns_each_once() {
    let agg = [1.0, 0.0, 2.0, 5.0, 0.5];
    let pool = [4, 0, 2, 1];
    let d = sample_geometry(&agg, &pool, &MixtureConfig { lambda: 0.0, batch: 4 }, &mut RngStream::new(8, "ex")).unwrap();
    let mut got = d.indices.clone();
    got.sort_unstable();
    assert_eq!(got, vec![0, 1, 2, 4]);
    // index 1 has zero uncertainty, so it is only reachable once the rest is gone
    assert_eq!(d.indices[3], 1);
    assert!(d.uniform_fallback);
}

#[test]
fn zero_uncertainty_falls_back_to_uniform() {
    let d = sample_geometry(&[0.0; 6], &[0, 1, 2, 3, 4, 5], &MixtureConfig { lambda: 0.0, batch: 3 }, &mut RngStream::new(9, "z"))
        .unwrap();
    assert!(d.uniform_fallback);
    assert_eq!(d.indices.len(), 3);
}

#[test]
fn batch_larger_than_pool_is_an_error() {
    let err = sample_geometry(&[1.0; 3], &[0, 1], &MixtureConfig { lambda: 0.5, batch: 3 }, &mut RngStream::new(1, "e")).unwrap_err();
    assert!(matches!(err, SamplingError::PoolTooSmall { batch: 3, pool: 2 }));
    assert!(sample_geometry(&[1.0; 3], &[0, 1], &MixtureConfig { lambda: 1.5, batch: 1 }, &mut RngStream::new(1, "e")).is_err());
}

proptest! {
    #[test]
    fn scaling_u_keeps_partitions(seed in 0u64..1000, pow in -20i32..20, n in 1usize..30) {
        let mut rng = RngStream::new(seed, "scale");
        let g = grid(120);
        let u: Vec<f64> = (0..120).map(|_| rng.random::<f64>().powi(3)).collect();
        let scaled: Vec<f64> = u.iter().map(|v| v * 2f64.powi(pow)).collect();
        let a = uaw_afs(&g, &u, n, &mut RngStream::new(seed, "draw")).unwrap();
        let b = uaw_afs(&g, &scaled, n, &mut RngStream::new(seed, "draw")).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn scaling_aggregate_keeps_geometry_draws(seed in 0u64..1000, pow in -20i32..20) {
        let mut rng = RngStream::new(seed, "agg");
        let agg: Vec<f64> = (0..30).map(|_| rng.random::<f64>()).collect();
        let scaled: Vec<f64> = agg.iter().map(|v| v * 2f64.powi(pow)).collect();
        let pool: Vec<usize> = (0..30).step_by(2).collect();
        let cfg = MixtureConfig { lambda: 0.0, batch: 5 };
        let a = sample_geometry(&agg, &pool, &cfg, &mut RngStream::new(seed, "d")).unwrap();
        let b = sample_geometry(&scaled, &pool, &cfg, &mut RngStream::new(seed, "d")).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn always_n_distinct_indices(seed in 0u64..10_000, n_grid in 1usize..80, frac in 0.0f64..1.0, sparse in proptest::bool::ANY) {
        let mut rng = RngStream::new(seed, "n");
        let g = grid(n_grid.max(2));
        let len = g.len();
        let n = ((len as f64 * frac) as usize).clamp(1, len);
        let u: Vec<f64> = (0..len).map(|_| if sparse && rng.random_bool(0.8) { 0.0 } else { rng.random::<f64>() }).collect();
        let d = uaw_afs(&g, &u, n, &mut rng).unwrap();
        prop_assert_eq!(d.indices.len(), n);
        prop_assert!(d.indices.windows(2).all(|w| w[0] < w[1]));
        prop_assert!(*d.indices.last().unwrap() < len);
    }
}
