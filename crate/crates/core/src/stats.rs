//! Statistics on samples of uniform random trees: diameters against the
//! CRT diameter law, tail shape, neighborhood censuses.

use std::collections::BTreeMap;

use num_traits::Float;
use rayon::prelude::*;
use serde::Serialize;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::boltzmann::{sample_unrooted_exact, BoltzmannContext, RandomSource, UnrootedSample};
use crate::canon::{neighborhood_code, CanonicalCode};
use crate::crt::{crt_diameter_moment, crt_diameter_tail};
use crate::degree::DegreeSet;
use crate::enumeration::{big_ln, TreeCounts};
use crate::error::{Error, Result};

const CDF_TOL: f64 = 1e-14;

fn f<F: Float>(v: f64) -> F {
    F::from(v).expect("representable")
}

/// Random stream of replicate `index` at size `n`.
pub fn stream_id(n: usize, index: usize) -> u64 {
    ((n as u64) << 32) | index as u64
}

/// Draws `count` independent uniform trees of size `n` (in parallel on the
/// current rayon pool) and maps each one; results are ordered by replicate.
pub fn sample_map<T, M>(ctx: &BoltzmannContext, n: usize, count: usize, seed: u64, map: M) -> Result<Vec<T>>
where
    T: Send,
    M: Fn(UnrootedSample) -> T + Sync,
{
    (0..count)
        .into_par_iter()
        .map(|i| {
            let mut rng = RandomSource::new(seed, stream_id(n, i)).rng();
            sample_unrooted_exact(ctx, n, &mut rng).map(&map)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiameterSample {
    pub omega: DegreeSet,
    pub n: usize,
    pub values: Vec<usize>,
    pub seed: u64,
}

impl DiameterSample {
    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<usize>() as f64 / self.values.len() as f64
    }

    /// Standard error of the mean.
    pub fn mean_stderr(&self) -> f64 {
        let m = self.mean();
        let n = self.values.len() as f64;
        let var = self.values.iter().map(|&v| (v as f64 - m).powi(2)).sum::<f64>() / (n - 1.0).max(1.0);
        (var / n).sqrt()
    }
}

pub fn collect_diameters(ctx: &BoltzmannContext, n: usize, count: usize, seed: u64) -> Result<DiameterSample> {
    if count == 0 {
        return Err(Error::InvalidArgument("count must be >= 1".into()));
    }
    let values = sample_map(ctx, n, count, seed, |s| s.tree.diameter())?;
    Ok(DiameterSample {
        omega: ctx.omega().clone(),
        n,
        values,
        seed,
    })
}

/// Kolmogorov-Smirnov distance between the empirical law of `values` and a
/// continuous CDF.
pub fn ks_against<F: Float>(values: &[F], cdf: impl Fn(F) -> F) -> Result<F> {
    if values.is_empty() {
        return Err(Error::EmptySample);
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("no NaN"));
    let total = F::from(sorted.len()).unwrap();
    let mut worst = F::zero();
    let mut i = 0;
    while i < sorted.len() {
        let mut j = i;
        while j < sorted.len() && sorted[j] == sorted[i] {
            j += 1;
        }
        let model = cdf(sorted[i]);
        let below = F::from(i).unwrap() / total;
        let upto = F::from(j).unwrap() / total;
        worst = worst.max((upto - model).abs()).max((model - below).abs());
        i = j;
    }
    Ok(worst)
}

/// CDF of the CRT diameter.
pub fn crt_cdf<F: Float>(x: F) -> F {
    if x <= F::zero() {
        return F::zero();
    }
    F::one() - crt_diameter_tail(x, f(CDF_TOL)).expect("valid arguments").value
}

/// Inverse of [`crt_cdf`] by bisection, for inverse-transform sampling.
pub fn crt_quantile<F: Float>(p: F) -> Result<F> {
    if !(p > F::zero() && p < F::one()) {
        return Err(Error::InvalidArgument("quantile level must lie in (0, 1)".into()));
    }
    let (mut lo, mut hi) = (F::zero(), f::<F>(1.0));
    while crt_cdf(hi) < p {
        hi = hi + hi;
    }
    for _ in 0..200 {
        let mid = (lo + hi) / f(2.0);
        if mid <= lo || mid >= hi {
            break;
        }
        if crt_cdf(mid) < p {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok((lo + hi) / f(2.0))
}

/// Scale estimates `ê(n) = E[D(T_e)] √n / mean D(T_n)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalingCalibration<F = f64> {
    pub omega: DegreeSet,
    pub e_hat: F,
    pub per_n_estimates: BTreeMap<usize, F>,
    pub per_n_stderr: BTreeMap<usize, F>,
    pub stderr: F,
}

/// Inverse-variance weighted calibration from samples at several sizes.
pub fn calibrate_from_samples<F: Float>(samples: &[DiameterSample]) -> Result<ScalingCalibration<F>> {
    let first = samples.first().ok_or(Error::EmptySample)?;
    let mean_crt: F = crt_diameter_moment::<F>(1)?.value;
    let mut per_n = BTreeMap::new();
    let mut per_n_stderr = BTreeMap::new();
    let mut weight_sum = F::zero();
    let mut weighted = F::zero();
    for s in samples {
        if s.values.is_empty() {
            return Err(Error::EmptySample);
        }
        let mean = F::from(s.mean()).unwrap();
        let e = mean_crt * F::from(s.n).unwrap().sqrt() / mean;
        let se = e * F::from(s.mean_stderr()).unwrap() / mean;
        per_n.insert(s.n, e);
        per_n_stderr.insert(s.n, se);
        let w = if se > F::zero() { F::one() / (se * se) } else { F::one() };
        weight_sum = weight_sum + w;
        weighted = weighted + w * e;
    }
    let (e_hat, stderr) = if per_n.len() == 1 {
        let (&n, &e) = per_n.iter().next().unwrap();
        (e, per_n_stderr[&n])
    } else {
        (weighted / weight_sum, F::one() / weight_sum.sqrt())
    };
    Ok(ScalingCalibration {
        omega: first.omega.clone(),
        e_hat,
        per_n_estimates: per_n,
        per_n_stderr,
        stderr,
    })
}

/// Samples every size in `n_list` and calibrates.
pub fn calibrate_scaling(
    ctx: &BoltzmannContext,
    n_list: &[usize],
    count: usize,
    seed: u64,
) -> Result<(ScalingCalibration<f64>, Vec<DiameterSample>)> {
    let samples = n_list
        .iter()
        .map(|&n| collect_diameters(ctx, n, count, seed))
        .collect::<Result<Vec<_>>>()?;
    Ok((calibrate_from_samples(&samples)?, samples))
}

/// Rescaled diameters `ê D / √n`.
pub fn rescaled<F: Float>(sample: &DiameterSample, e_hat: F) -> Vec<F> {
    let root = F::from(sample.n).unwrap().sqrt();
    sample.values.iter().map(|&v| e_hat * F::from(v).unwrap() / root).collect()
}

/// KS distance between calibrated rescaled diameters and the CRT law.
pub fn ks_distance<F: Float>(sample: &DiameterSample, calib: &ScalingCalibration<F>) -> Result<F> {
    ks_against(&rescaled(sample, calib.e_hat), crt_cdf)
}

/// `mean((ê D / √n)^k)`.
pub fn rescaled_moment<F: Float>(sample: &DiameterSample, e_hat: F, k: i32) -> Result<F> {
    let values = rescaled(sample, e_hat);
    if values.is_empty() {
        return Err(Error::EmptySample);
    }
    let total = values.iter().fold(F::zero(), |acc, &v| acc + v.powi(k));
    Ok(total / F::from(values.len()).unwrap())
}

/// Least-squares fit `log P(D >= x) ≈ log C - c x² / n`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TailFit<F = f64> {
    pub c_hat: F,
    pub big_c_hat: F,
    pub r_squared: F,
    pub points: usize,
}

/// Survival levels used by [`fit_tail`].
pub const TAIL_FIT_RANGE: (f64, f64) = (1e-3, 0.5);

pub fn fit_tail<F: Float>(sample: &DiameterSample) -> Result<TailFit<F>> {
    let count = sample.values.len();
    if count < 1000 {
        return Err(Error::InsufficientData(format!("{count} values, need at least 1000")));
    }
    let mut hist: BTreeMap<usize, usize> = BTreeMap::new();
    for &v in &sample.values {
        *hist.entry(v).or_default() += 1;
    }
    let total = count as f64;
    let n = sample.n as f64;
    let mut at_least = count;
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for (&x, &c) in &hist {
        let survival = at_least as f64 / total;
        if survival >= TAIL_FIT_RANGE.0 && survival <= TAIL_FIT_RANGE.1 {
            xs.push((x * x) as f64 / n);
            ys.push(survival.ln());
        }
        at_least -= c;
    }
    if xs.len() < 3 {
        return Err(Error::InsufficientData(format!(
            "only {} distinct values with survival in [{}, {}]",
            xs.len(),
            TAIL_FIT_RANGE.0,
            TAIL_FIT_RANGE.1
        )));
    }
    let (slope, intercept, r2) = linear_fit(&xs, &ys);
    Ok(TailFit {
        c_hat: f(-slope),
        big_c_hat: f(intercept.exp()),
        r_squared: f(r2),
        points: xs.len(),
    })
}

/// Ordinary least squares `y ≈ a x + b`; returns `(a, b, R²)`.
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r2 = if syy > 0.0 { sxy * sxy / (sxx * syy) } else { 1.0 };
    (slope, intercept, r2)
}

/// Which vertices of each sampled tree enter a census.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub enum CensusMode {
    /// One uniformly random vertex per tree.
    #[default]
    UniformVertex,
    /// Every vertex, each weighted `1/n`; same expected law, less noise.
    AllVertices,
}

/// Empirical law of rooted radius-`k` neighborhoods.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NeighborhoodDist {
    pub k: usize,
    pub counts: BTreeMap<CanonicalCode, u64>,
    pub total: u64,
}

impl NeighborhoodDist {
    pub fn new(k: usize) -> Self {
        NeighborhoodDist {
            k,
            counts: BTreeMap::new(),
            total: 0,
        }
    }

    pub fn add(&mut self, code: CanonicalCode, weight: u64) {
        *self.counts.entry(code).or_default() += weight;
        self.total += weight;
    }

    pub fn merge(&mut self, other: NeighborhoodDist) {
        for (code, c) in other.counts {
            self.add(code, c);
        }
    }

    pub fn probability(&self, code: &CanonicalCode) -> f64 {
        if self.total == 0 {
            return 0.0;
        }
        self.counts.get(code).copied().unwrap_or(0) as f64 / self.total as f64
    }
}

pub fn neighborhood_census(
    ctx: &BoltzmannContext,
    n: usize,
    k: usize,
    count: usize,
    seed: u64,
    mode: CensusMode,
) -> Result<NeighborhoodDist> {
    if k == 0 {
        return Err(Error::InvalidArgument("radius must be >= 1".into()));
    }
    let per_tree: Vec<NeighborhoodDist> = (0..count)
        .into_par_iter()
        .map(|i| {
            let mut rng = RandomSource::new(seed, stream_id(n, i)).rng();
            let sample = sample_unrooted_exact(ctx, n, &mut rng)?;
            let mut dist = NeighborhoodDist::new(k);
            match mode {
                CensusMode::UniformVertex => {
                    let u = rand::Rng::random_range(&mut rng, 0..n);
                    dist.add(neighborhood_code(&sample.tree, u, k), 1);
                }
                CensusMode::AllVertices => {
                    for u in 0..n {
                        dist.add(neighborhood_code(&sample.tree, u, k), 1);
                    }
                }
            }
            Ok(dist)
        })
        .collect::<Result<_>>()?;
    let mut total = NeighborhoodDist::new(k);
    for d in per_tree {
        total.merge(d);
    }
    Ok(total)
}

/// `½ Σ |p₁ - p₂|` over the union of supports.
pub fn tv_distance(d1: &NeighborhoodDist, d2: &NeighborhoodDist) -> Result<f64> {
    if d1.k != d2.k {
        return Err(Error::RadiusMismatch(d1.k, d2.k));
    }
    if d1.total == 0 || d2.total == 0 {
        return Err(Error::EmptySample);
    }
    let mut sum = 0.0;
    for (code, _) in d1.counts.iter() {
        sum += (d1.probability(code) - d2.probability(code)).abs();
    }
    for (code, _) in d2.counts.iter() {
        if !d1.counts.contains_key(code) {
            sum += d2.probability(code);
        }
    }
    Ok(sum / 2.0)
}

/// Pearson chi-square goodness-of-fit result.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChiSquareTest {
    pub statistic: f64,
    pub dof: usize,
    pub p_value: f64,
}

/// Tests observed counts against expected probabilities (which are normalised).
pub fn chi_square(observed: &[u64], expected: &[f64]) -> Result<ChiSquareTest> {
    if observed.len() != expected.len() || observed.is_empty() {
        return Err(Error::InvalidArgument("observed and expected differ in length".into()));
    }
    let total: u64 = observed.iter().sum();
    let norm: f64 = expected.iter().sum();
    let mut stat = 0.0;
    for (&o, &e) in observed.iter().zip(expected) {
        let e = e / norm * total as f64;
        if e <= 0.0 {
            if o > 0 {
                return Ok(ChiSquareTest { statistic: f64::INFINITY, dof: observed.len() - 1, p_value: 0.0 });
            }
            continue;
        }
        stat += (o as f64 - e).powi(2) / e;
    }
    let dof = observed.len() - 1;
    let p_value = if dof == 0 {
        1.0
    } else {
        ChiSquared::new(dof as f64)
            .map_err(|e| Error::InvalidArgument(e.to_string()))?
            .sf(stat)
    };
    Ok(ChiSquareTest { statistic: stat, dof, p_value })
}

pub fn chi_square_uniform(observed: &[u64]) -> Result<ChiSquareTest> {
    chi_square(observed, &vec![1.0; observed.len()])
}

/// Exponential fit of `e_n / (n f_n)` over even `n`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecayFit {
    /// `exp(slope)` of the least-squares line through `log ratio`.
    pub gamma: f64,
    /// Smallest `C` with `ratio_n <= C γ^n` at every fitted size.
    pub envelope: f64,
    pub r_squared: f64,
    /// `(n, e_n / (n f_n))`.
    pub ratios: Vec<(usize, f64)>,
}

pub fn e_class_decay(counts: &TreeCounts, min_n: usize) -> Result<DecayFit> {
    let mut ratios = Vec::new();
    for n in min_n.max(2)..=counts.max_n() {
        let e = counts.e().get(n);
        let pointed = counts.pointed().get(n);
        if num_traits::Zero::is_zero(e) || num_traits::Zero::is_zero(pointed) {
            continue;
        }
        ratios.push((n, (big_ln(e) - big_ln(pointed)).exp()));
    }
    if ratios.len() < 3 {
        return Err(Error::InsufficientData("fewer than three sizes with e_n > 0".into()));
    }
    let xs: Vec<f64> = ratios.iter().map(|r| r.0 as f64).collect();
    let ys: Vec<f64> = ratios.iter().map(|r| r.1.ln()).collect();
    let (slope, _, r2) = linear_fit(&xs, &ys);
    let gamma = slope.exp();
    let envelope = ratios
        .iter()
        .map(|&(n, r)| r / gamma.powi(n as i32))
        .fold(0.0, f64::max);
    Ok(DecayFit { gamma, envelope, r_squared: r2, ratios })
}
