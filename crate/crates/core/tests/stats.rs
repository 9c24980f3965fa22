use polyaforge::boltzmann::BoltzmannContext;
use polyaforge::enumeration::TreeCounts;
use polyaforge::stats::{
    calibrate_from_samples, collect_diameters, crt_cdf, crt_quantile, e_class_decay, fit_tail, ks_against,
    ks_distance, neighborhood_census, tv_distance, CensusMode, DiameterSample,
};
use polyaforge::{CanonicalCode, DegreeSet, Error, ScalingCalibration, TailFit};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn nat_ctx(max_n: usize) -> BoltzmannContext {
    BoltzmannContext::new(&DegreeSet::naturals(), max_n).unwrap()
}

#[test]
fn diameters_of_small_trees() {
    let ctx = nat_ctx(10);
    assert!(collect_diameters(&ctx, 2, 50, 1).unwrap().values.iter().all(|&d| d == 1));
    assert!(collect_diameters(&ctx, 3, 50, 1).unwrap().values.iter().all(|&d| d == 2));
    let s = collect_diameters(&ctx, 4, 10_000, 1).unwrap();
    let sigma = 0.5 / (10_000f64).sqrt();
    assert!((s.mean() - 2.5).abs() < 3.0 * sigma, "{}", s.mean());
    assert!(matches!(collect_diameters(&ctx, 1, 5, 1), Err(Error::UnsupportedSize { .. })));
    assert_eq!(collect_diameters(&ctx, 8, 20, 4).unwrap(), collect_diameters(&ctx, 8, 20, 4).unwrap());
}

/// Integer diameters `round(√n D_CRT / e)` for a synthetic scale `e`.
fn synthetic(n: usize, e: f64, count: usize, seed: u64) -> DiameterSample {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let values = (0..count)
        .map(|_| {
            let u: f64 = rng.random_range(1e-12..1.0 - 1e-12);
            ((n as f64).sqrt() * crt_quantile(u).unwrap() / e).round() as usize
        })
        .collect();
    DiameterSample { omega: DegreeSet::naturals(), n, values, seed }
}

#[test]
fn ks_on_model_samples() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let xs: Vec<f64> = (0..10_000).map(|_| crt_quantile(rng.random_range(1e-12..1.0)).unwrap()).collect();
    let d = ks_against(&xs, crt_cdf).unwrap();
    assert!(d < 1.63 / 100.0, "{d}");
    assert_eq!(d, ks_against(&xs, crt_cdf).unwrap());
}

#[test]
fn calibration_recovers_synthetic_scale() {
    let samples: Vec<DiameterSample> = [1_000_000, 4_000_000]
        .iter()
        .enumerate()
        .map(|(i, &n)| synthetic(n, 2.0, 10_000, i as u64))
        .collect();
    let calib: ScalingCalibration = calibrate_from_samples(&samples).unwrap();
    assert!((calib.e_hat - 2.0).abs() < 3.0 * calib.stderr, "{calib:?}");
    assert_eq!(calib.per_n_estimates.len(), 2);
    let d = ks_distance(&samples[1], &calib).unwrap();
    assert!(d < 0.02, "{d}");
}

#[test]
fn tail_fit_on_gaussian_square_tails() {
    let n = 1_000_000;
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let values = (0..20_000)
        .map(|_| {
            let u: f64 = rng.random_range(1e-12..1.0);
            ((n as f64) * -u.ln() / 2.0).sqrt().round() as usize
        })
        .collect();
    let sample = DiameterSample { omega: DegreeSet::naturals(), n, values, seed: 11 };
    let fit: TailFit = fit_tail(&sample).unwrap();
    assert!((fit.c_hat - 2.0).abs() < 0.1, "{fit:?}");
    assert!(fit.r_squared > 0.99);
}

#[test]
fn census_examples() {
    let ctx = nat_ctx(10);
    let edge = neighborhood_census(&ctx, 2, 1, 100, 1, CensusMode::UniformVertex).unwrap();
    assert_eq!(edge.counts.len(), 1);
    assert_eq!(edge.total, 100);
    assert_eq!(edge.probability(&CanonicalCode(vec![1, 0])), 1.0);

    let leaf = CanonicalCode(vec![1, 0]);
    let count = 20_000;
    let one = neighborhood_census(&ctx, 4, 1, count, 2, CensusMode::UniformVertex).unwrap();
    assert_eq!(one.total, count as u64);
    let sigma = (5.0 / 8.0 * 3.0 / 8.0 / count as f64).sqrt();
    assert!((one.probability(&leaf) - 5.0 / 8.0).abs() < 3.5 * sigma);

    let all = neighborhood_census(&ctx, 4, 1, count, 2, CensusMode::AllVertices).unwrap();
    assert_eq!(all.total, 4 * count as u64);
    assert!((all.probability(&leaf) - 5.0 / 8.0).abs() < 3.5 * sigma);
    assert_eq!(all.counts.values().sum::<u64>(), all.total);

    let k2 = neighborhood_census(&ctx, 4, 2, 10, 2, CensusMode::AllVertices).unwrap();
    assert_eq!(tv_distance(&all, &k2), Err(Error::RadiusMismatch(1, 2)));
    assert!(matches!(neighborhood_census(&ctx, 4, 0, 10, 2, CensusMode::AllVertices), Err(Error::InvalidArgument(_))));
}

#[test]
fn cubic_leaf_fraction() {
    let ctx = BoltzmannContext::new(&DegreeSet::finite([1, 3]), 100).unwrap();
    let n = 100;
    let d = neighborhood_census(&ctx, n, 1, 200, 5, CensusMode::AllVertices).unwrap();
    for code in d.counts.keys() {
        assert!(code.0[0] == 1 || code.0[0] == 3, "{code}");
    }
    let leaf = d.probability(&CanonicalCode(vec![1, 0]));
    assert!((leaf - (n + 2) as f64 / (2 * n) as f64).abs() < 1e-12);
}

#[test]
fn e_class_decays_geometrically() {
    let counts = TreeCounts::compute(&DegreeSet::naturals(), 200).unwrap();
    let fit = e_class_decay(&counts, 2).unwrap();
    assert!(fit.gamma < 0.7, "{}", fit.gamma);
    assert!(fit.r_squared > 0.99);
    assert!(fit.ratios.iter().all(|&(n, _)| n % 2 == 0));
    for &(n, r) in &fit.ratios {
        assert!(r <= fit.envelope * fit.gamma.powi(n as i32) * (1.0 + 1e-12));
    }
}
