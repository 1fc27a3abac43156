mod common;

use common::{normal_cdf, Lcg};
use maxent_bo::gp::{Domain, GpPosterior, KernelParams, ObservationSet};
use maxent_bo::maxvalue::{
    build_feature_map, maximize_feature_function, sample_max_features, FeaturePosterior, FeatureSearch, GridStats,
    EULER_GAMMA,
};
use maxent_bo::rng::{substream, uniform_in};
use proptest::prelude::*;

fn random_stats(rng: &mut Lcg, n: usize) -> GridStats {
    let grid = (0..n).map(|i| vec![i as f64]).collect();
    let means = (0..n).map(|_| rng.range(-2.0, 2.0)).collect();
    let stds = (0..n).map(|_| rng.range(0.1, 1.5)).collect();
    GridStats::new(grid, means, stds, 1e-9).unwrap()
}

#[test]
fn prior_grid_has_prior_stds_and_is_reproducible() {
    let params = KernelParams::new(2.5, vec![0.2], 0.01).unwrap();
    let post = GpPosterior::fit(ObservationSet::default(), params).unwrap();
    let dom = Domain::new(vec![-1.0], vec![3.0]).unwrap();
    let a = GridStats::from_posterior(&post, &dom, 2, &mut substream(1, 0)).unwrap();
    assert!(a.stds().iter().all(|s| (s - 2.5f64.sqrt()).abs() < 1e-12));
    let b = GridStats::from_posterior(&post, &dom, 500, &mut substream(1, 0)).unwrap();
    let c = GridStats::from_posterior(&post, &dom, 500, &mut substream(1, 0)).unwrap();
    assert!(b.grid().iter().all(|x| dom.contains(x)));
    assert_eq!(b.grid(), c.grid());
}

#[test]
fn log_cdf_matches_product_of_normal_cdfs() {
    let single = GridStats::new(vec![vec![0.0]], vec![0.0], vec![1.0], 1e-9).unwrap();
    assert!((single.log_cdf_max(0.0) - 0.5f64.ln()).abs() < 1e-15);
    let double = GridStats::new(vec![vec![0.0], vec![1.0]], vec![0.0; 2], vec![1.0; 2], 1e-9).unwrap();
    assert!((double.log_cdf_max(0.0) - 0.25f64.ln()).abs() < 1e-15);

    let mut rng = Lcg::new(21);
    let stats = random_stats(&mut rng, 20);
    // the quadrature oracle loses relative accuracy deep in the lower tail
    let mut checked = 0;
    for z in [-1.0, 0.0, 1.0, 2.5, 4.0] {
        let args: Vec<f64> = stats.means().iter().zip(stats.stds()).map(|(m, s)| (z - m) / s).collect();
        if args.iter().any(|u| *u < -4.0) {
            continue;
        }
        let direct: f64 = args.iter().map(|u| normal_cdf(*u).ln()).sum();
        assert!((stats.log_cdf_max(z) - direct).abs() <= 1e-9, "z={z}");
        checked += 1;
    }
    assert!(checked >= 2);
    let zs: Vec<f64> = (0..500).map(|i| -6.0 + 0.025 * i as f64).collect();
    assert!(zs.windows(2).all(|w| stats.log_cdf_max(w[1]) >= stats.log_cdf_max(w[0])));
}

#[test]
fn inversion_behaviour() {
    let single = GridStats::new(vec![vec![0.0]], vec![0.0], vec![1.0], 1e-9).unwrap();
    assert!(single.invert_cdf_max(0.5, 1e-9).unwrap().abs() < 1e-6);
    assert!(single.invert_cdf_max(0.0, 1e-9).is_err());
    assert!(single.invert_cdf_max(1.0, 1e-9).is_err());
    let mut rng = Lcg::new(22);
    for _ in 0..20 {
        let stats = random_stats(&mut rng, 50);
        let tol = 1e-8;
        let z = stats.invert_cdf_max(0.9, tol).unwrap();
        assert!((stats.log_cdf_max(z) - 0.9f64.ln()).abs() <= tol);
        assert!(stats.invert_cdf_max(0.25, tol).unwrap() < stats.invert_cdf_max(0.75, tol).unwrap());
    }
}

#[test]
fn gumbel_fit_and_sampling() {
    let mut rng = Lcg::new(23);
    for _ in 0..100 {
        let n = 1 + (rng.next() * 60.0) as usize;
        let stats = random_stats(&mut rng, n);
        let g = stats.fit_gumbel(stats.default_tol()).unwrap();
        assert!(g.b > 0.0);
        assert!((g.quantile((-1f64).exp()) - g.a).abs() < 1e-12 * g.a.abs().max(1.0));
        let y1 = stats.invert_cdf_max(0.25, stats.default_tol()).unwrap();
        assert!((g.quantile(0.25) - y1).abs() < 1e-9 * y1.abs().max(1.0));
    }

    let stats = random_stats(&mut rng, 30);
    let g = stats.fit_gumbel(1e-9).unwrap();
    let draws = g.sample(&mut substream(5, 0), 100_000);
    let n = draws.len() as f64;
    let mean = draws.values.iter().sum::<f64>() / n;
    // Gumbel variance is π²b²/6
    let se = (std::f64::consts::PI * g.b / 6f64.sqrt()) / n.sqrt();
    assert!((mean - (g.a + EULER_GAMMA * g.b)).abs() <= 3.0 * se, "mean {mean} vs {}", g.mean());
}

#[test]
fn feature_norm_concentrates_at_scale() {
    let params = KernelParams::isotropic(1.0, 0.3, 2, 0.0).unwrap();
    let map = build_feature_map(&params, 10_000, &mut substream(24, 0), None).unwrap();
    for x in [[0.1, 0.2], [0.7, 0.9], [0.5, 0.0]] {
        let phi = map.features(&x);
        let norm: f64 = phi.iter().map(|v| v * v).sum();
        assert!((norm - 1.0).abs() <= 0.05, "{norm}");
    }
}

#[test]
fn weight_draws_have_posterior_covariance() {
    let params = KernelParams::new(1.0, vec![0.3], 0.0).unwrap();
    let map = build_feature_map(&params, 4, &mut substream(25, 0), None).unwrap();
    let data = ObservationSet::new(vec![vec![0.2], vec![0.6]], vec![0.5, -0.3]).unwrap();
    let fp = FeaturePosterior::fit(std::slice::from_ref(&map), &data, 0.05).unwrap();
    let cov = fp.covariance();
    let n = 10_000;
    let mut rng = substream(25, 1);
    let draws: Vec<Vec<f64>> = (0..n).map(|_| fp.sample_weights(&mut rng)).collect();
    let mean: Vec<f64> = (0..4).map(|j| draws.iter().map(|d| d[j]).sum::<f64>() / n as f64).collect();
    let spectral = (0..4).map(|i| cov[(i, i)]).sum::<f64>();
    for i in 0..4 {
        for j in 0..4 {
            let emp = draws.iter().map(|d| (d[i] - mean[i]) * (d[j] - mean[j])).sum::<f64>() / (n - 1) as f64;
            assert!((emp - cov[(i, j)]).abs() <= 5.0 / (n as f64).sqrt() * spectral, "({i},{j})");
        }
    }
    let frozen = fp.with_covariance_scale(0.0);
    assert_eq!(frozen.sample_weights(&mut substream(9, 9)), fp.nu());
    assert_ne!(fp.sample_weights(&mut substream(1, 0)), fp.sample_weights(&mut substream(2, 0)));
}

#[test]
fn single_cosine_maximum() {
    let params = KernelParams::new(3.0, vec![0.2, 0.2], 0.0).unwrap();
    let map = build_feature_map(&params, 1, &mut substream(26, 0), None).unwrap();
    let dom = Domain::cube(2, 0.0, 10.0);
    let (x, v) = maximize_feature_function(&map, &[1.0], &dom, FeatureSearch::default(), &mut substream(26, 1));
    assert!((v - (2.0 * 3.0f64).sqrt()).abs() < 1e-6, "{v}");
    assert!(dom.contains(&x));
}

#[test]
fn sampled_maxima_dominate_probes_and_respect_floor() {
    let params = KernelParams::new(1.0, vec![0.15, 0.3], 0.0).unwrap();
    let dom = Domain::unit(2);
    let map = build_feature_map(&params, 300, &mut substream(27, 0), None).unwrap();
    let w: Vec<f64> = (0..300).map(|i| ((i * 7919) % 13) as f64 / 6.0 - 1.0).collect();
    let (_, best) = maximize_feature_function(&map, &w, &dom, FeatureSearch::default(), &mut substream(27, 1));
    let mut rng = substream(27, 2);
    for _ in 0..1000 {
        let x = uniform_in(&dom, &mut rng);
        assert!(best >= map.value(&w, &x));
    }

    let data = ObservationSet::new(vec![vec![0.5, 0.5]], vec![0.2]).unwrap();
    let fp = FeaturePosterior::fit(std::slice::from_ref(&map), &data, 0.01).unwrap();
    let ys =
        sample_max_features(&fp, &map, &dom, &mut substream(27, 3), 5, FeatureSearch::default(), Some(10.01)).unwrap();
    assert!(ys.values.iter().all(|v| *v >= 10.01));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn round_trip_within_tolerance(seed in 0u64..10_000, r in 0.01f64..0.99) {
        let mut rng = Lcg::new(seed);
        let stats = random_stats(&mut rng, 1 + (seed % 40) as usize);
        let tol = stats.default_tol();
        let z = stats.invert_cdf_max(r, tol).unwrap();
        prop_assert!((stats.log_cdf_max(z) - r.ln()).abs() <= tol);
    }
}
