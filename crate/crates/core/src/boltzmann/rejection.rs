//! Pólya-Boltzmann samplers at the critical parameter `x = ρ`.
//!
//! A rooted tree at scale `i` stands for `i` identical copies (it sits inside
//! a cycle of length `i` of the ambient symmetry). Its root draws the cycle
//! type of its children from `Z_{SET_{Ω*}}(s_i, s_{2i}, ...)`, and every
//! `j`-cycle becomes one subtree at scale `ij` copied `j` times. Only the
//! isomorphism type is kept. Exact sizes are obtained by rejection, aborting
//! an attempt as soon as it grows past the target.

use rand::Rng;
use rand_distr::{Distribution, Poisson};

use crate::boltzmann::context::BoltzmannContext;
use crate::boltzmann::shape::Shape;
use crate::degree::DegreeSet;
use crate::error::{Error, Result};
use crate::trees::RootedTree;

/// Default size budget for unconditioned draws.
pub const DEFAULT_BUDGET: usize = 1 << 20;

/// Cycle type `(m_1, m_2, ...)`: `counts[j - 1]` cycles of length `j`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CycleType {
    pub counts: Vec<usize>,
}

impl CycleType {
    fn push(&mut self, j: usize) {
        if self.counts.len() < j {
            self.counts.resize(j, 0);
        }
        self.counts[j - 1] += 1;
    }

    /// `Σ j m_j`.
    pub fn size(&self) -> usize {
        self.counts.iter().enumerate().map(|(k, &m)| (k + 1) * m).sum()
    }

    /// Number of cycles of length `j`.
    pub fn m(&self, j: usize) -> usize {
        self.counts.get(j - 1).copied().unwrap_or(0)
    }

    /// Cycle lengths, with repetition.
    pub fn lengths(&self) -> impl Iterator<Item = usize> + '_ {
        self.counts
            .iter()
            .enumerate()
            .flat_map(|(k, &m)| std::iter::repeat_n(k + 1, m))
    }
}

fn pick<R: Rng + ?Sized>(weights: impl Iterator<Item = (usize, f64)>, total: f64, rng: &mut R) -> Option<usize> {
    let mut u = rng.random::<f64>() * total;
    let mut last = None;
    for (key, w) in weights {
        if w > 0.0 {
            last = Some(key);
            if u < w {
                return last;
            }
            u -= w;
        }
    }
    last
}

/// Draws a cycle type with `Σ j m_j ∈ lambda` and probability proportional
/// to `Π_j s_{ij}^{m_j} / (m_j! j^{m_j})`.
pub fn sample_set_partition<R: Rng + ?Sized>(
    ctx: &BoltzmannContext,
    lambda: &DegreeSet,
    scale: usize,
    rng: &mut R,
) -> Result<CycleType> {
    if scale == 0 || scale > ctx.i_max() {
        return Err(Error::InvalidArgument(format!("scale {scale} outside 1..={}", ctx.i_max())));
    }
    let p = ctx.layer_upto(scale, lambda.cap());
    let p = &p[..];
    let limit = lambda.tail_min().unwrap_or(usize::MAX);
    let mut options: Vec<(usize, f64)> = lambda
        .finite_part()
        .filter(|&d| d < limit)
        .map(|d| (d, p[d]))
        .collect();
    const TAIL: usize = usize::MAX;
    if let Some(t) = lambda.tail_min() {
        let head: f64 = p[..t.min(p.len())].iter().sum();
        options.push((TAIL, (ctx.set_total(scale) - head).max(0.0)));
    }
    let total: f64 = options.iter().map(|o| o.1).sum();
    if !(total > 0.0) {
        return Err(Error::InfeasibleRestriction);
    }
    let d = pick(options.into_iter(), total, rng).expect("positive total");

    let mut cycles = CycleType::default();
    if d == TAIL {
        // Poisson cycle counts, conditioned on a size in the tail
        let t = lambda.tail_min().expect("tail option");
        let rates: Vec<f64> = (1..=ctx.i_max() / scale)
            .map(|j| ctx.s(scale * j) / j as f64)
            .collect();
        let laws: Vec<Option<Poisson<f64>>> = rates
            .iter()
            .map(|&r| if r > 0.0 { Poisson::new(r).ok() } else { None })
            .collect();
        loop {
            cycles = CycleType::default();
            for (k, law) in laws.iter().enumerate() {
                if let Some(law) = law {
                    let m = law.sample(rng) as usize;
                    for _ in 0..m {
                        cycles.push(k + 1);
                    }
                }
            }
            if cycles.size() >= t {
                return Ok(cycles);
            }
        }
    }

    // split d through d P_d = Σ_j s_{ij} P_{d-j}
    let mut rest = d;
    while rest > 0 {
        let weights = (1..=rest).map(|j| (j, ctx.s(scale * j) * p[rest - j]));
        let total = d_total(ctx, p, scale, rest);
        let j = pick(weights, total, rng).expect("positive layer weight");
        cycles.push(j);
        rest -= j;
    }
    Ok(cycles)
}

fn d_total(ctx: &BoltzmannContext, p: &[f64], scale: usize, d: usize) -> f64 {
    (1..=d).map(|j| ctx.s(scale * j) * p[d - j]).sum()
}

/// Grows the subtrees below `node` (at scale `scale`, children restricted to
/// `lambda`). `size` counts vertices including all copies; returns `false`
/// once it would exceed `limit`.
pub(crate) fn grow<R: Rng + ?Sized>(
    ctx: &BoltzmannContext,
    shape: &mut Shape,
    node: usize,
    scale: usize,
    lambda: &DegreeSet,
    size: &mut usize,
    limit: usize,
    rng: &mut R,
) -> Result<bool> {
    let mut stack = vec![(node, scale, lambda)];
    while let Some((at, scale, restriction)) = stack.pop() {
        let cycles = sample_set_partition(ctx, restriction, scale, rng)?;
        for j in cycles.lengths() {
            let child_scale = scale * j;
            *size += child_scale;
            if *size > limit {
                return Ok(false);
            }
            let child = shape.add(at, j);
            stack.push((child, child_scale, ctx.omega_star()));
        }
    }
    Ok(true)
}

/// One unconditioned Pólya-Boltzmann tree; `None` if it outgrows `budget`.
/// Sizes follow `P(n) = a_n ρ^n / Ã(ρ)` (conditioned on `n <= budget`).
pub fn sample_rooted_symmetry_bounded<R: Rng + ?Sized>(
    ctx: &BoltzmannContext,
    budget: usize,
    rng: &mut R,
) -> Result<Option<RootedTree>> {
    let mut shape = Shape::new();
    let mut size = 1;
    if grow(ctx, &mut shape, 0, 1, ctx.omega_star(), &mut size, budget, rng)? {
        Ok(Some(shape.tree()))
    } else {
        Ok(None)
    }
}

/// Unconditioned Pólya-Boltzmann tree, redrawing the rare draws larger than
/// [`DEFAULT_BUDGET`].
pub fn sample_rooted_symmetry<R: Rng + ?Sized>(ctx: &BoltzmannContext, rng: &mut R) -> Result<RootedTree> {
    loop {
        if let Some(t) = sample_rooted_symmetry_bounded(ctx, DEFAULT_BUDGET, rng)? {
            return Ok(t);
        }
    }
}

/// Uniform rooted tree of size `n` by rejection; returns the number of attempts.
pub(crate) fn polya_exact<R: Rng + ?Sized>(ctx: &BoltzmannContext, n: usize, rng: &mut R) -> Result<(RootedTree, u64)> {
    ctx.check_rooted(n)?;
    let mut attempts = 0u64;
    loop {
        attempts += 1;
        let mut shape = Shape::new();
        let mut size = 1;
        if grow(ctx, &mut shape, 0, 1, ctx.omega_star(), &mut size, n, rng)? && size == n {
            return Ok((shape.tree(), attempts));
        }
    }
}

/// S class: a root with children count in `Ω`.
pub(crate) fn s_exact<R: Rng + ?Sized>(ctx: &BoltzmannContext, n: usize, rng: &mut R) -> Result<(Shape, u64)> {
    let mut attempts = 0u64;
    loop {
        attempts += 1;
        let mut shape = Shape::new();
        let mut size = 1;
        if grow(ctx, &mut shape, 0, 1, ctx.omega(), &mut size, n, rng)? && size == n {
            return Ok((shape, attempts));
        }
    }
}

/// V class: root, marked orbit of `ℓ >= 2` copies of one tree, remaining
/// children with a count in `Ω - ℓ`. Returns the shape and the orbit node.
pub(crate) fn v_exact<R: Rng + ?Sized>(ctx: &BoltzmannContext, n: usize, rng: &mut R) -> Result<(Shape, usize, u64)> {
    let omega = ctx.omega();
    // ℓ with weight t_ℓ Z_{SET_{Ω-ℓ}}(s)
    let mut ell_options = Vec::new();
    for ell in 2..=ctx.i_max().min(n.saturating_sub(1)) {
        let rest = omega.shift_down(ell);
        if rest.is_empty() {
            break;
        }
        let w = ctx.t(ell) * ctx.set_weight(&rest, 1);
        if w > 0.0 {
            ell_options.push((ell, w));
        }
    }
    let ell_total: f64 = ell_options.iter().map(|o| o.1).sum();
    if !(ell_total > 0.0) {
        return Err(Error::InfeasibleRestriction);
    }
    let tables = ctx.tables();
    let rho = ctx.rho();
    let mut attempts = 0u64;
    loop {
        attempts += 1;
        let ell = pick(ell_options.iter().copied(), ell_total, rng).expect("positive total");
        // orbit tree size m with weight m a_m ρ^{ℓm}; sizes past the target abort
        let t_ell = ctx.t(ell);
        let mut u = rng.random::<f64>() * t_ell;
        let mut m_pick = None;
        for m in 1..=(n - 1) / ell {
            let w = m as f64 * tables.a_hat(m) * rho.powi(((ell - 1) * m) as i32);
            if u < w {
                m_pick = Some(m);
                break;
            }
            u -= w;
        }
        let Some(m) = m_pick else { continue };
        let (orbit_tree, inner) = polya_exact(ctx, m, rng)?;
        attempts += inner - 1;
        let mut shape = Shape::new();
        let orbit = shape.graft(0, &orbit_tree, ell);
        let mut size = 1 + ell * m;
        let rest = omega.shift_down(ell);
        if grow(ctx, &mut shape, 0, 1, &rest, &mut size, n, rng)? && size == n {
            return Ok((shape, orbit, attempts));
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boltzmann::rng::RandomSource;

    #[test]
    fn trivial_partitions() {
        let ctx = BoltzmannContext::new(&DegreeSet::naturals(), 10).unwrap();
        let mut rng = RandomSource::new(1, 0).rng();
        for _ in 0..100 {
            let c = sample_set_partition(&ctx, &DegreeSet::singleton(0), 1, &mut rng).unwrap();
            assert_eq!(c.size(), 0);
            let c = sample_set_partition(&ctx, &DegreeSet::singleton(1), 1, &mut rng).unwrap();
            assert_eq!(c.m(1), 1);
            assert_eq!(c.size(), 1);
        }
        assert_eq!(
            sample_set_partition(&ctx, &DegreeSet::finite([]), 1, &mut rng),
            Err(Error::InfeasibleRestriction)
        );
    }

    #[test]
    fn pair_ratio() {
        let ctx = BoltzmannContext::new(&DegreeSet::naturals(), 10).unwrap();
        let mut rng = RandomSource::new(2, 0).rng();
        let draws = 200_000;
        let mut two_fix = 0usize;
        for _ in 0..draws {
            let c = sample_set_partition(&ctx, &DegreeSet::singleton(2), 1, &mut rng).unwrap();
            if c.m(1) == 2 {
                two_fix += 1;
            }
        }
        let s1 = ctx.s(1);
        let s2 = ctx.s(2);
        let p = (s1 * s1 / 2.0) / (s1 * s1 / 2.0 + s2 / 2.0);
        let sigma = (p * (1.0 - p) / draws as f64).sqrt();
        let freq = two_fix as f64 / draws as f64;
        assert!((freq - p).abs() < 4.0 * sigma, "{freq} vs {p}");
    }

    #[test]
    fn tail_partitions_reach_the_tail() {
        let ctx = BoltzmannContext::new(&DegreeSet::naturals(), 10).unwrap();
        let mut rng = RandomSource::new(3, 0).rng();
        let lambda = DegreeSet::new([], Some(3));
        for _ in 0..1000 {
            assert!(sample_set_partition(&ctx, &lambda, 1, &mut rng).unwrap().size() >= 3);
        }
    }

    #[test]
    fn rooted_outdegrees_respect_the_set() {
        let ctx = BoltzmannContext::new(&DegreeSet::finite([1, 3]), 10).unwrap();
        let mut rng = RandomSource::new(4, 0).rng();
        for _ in 0..500 {
            if let Some(t) = sample_rooted_symmetry_bounded(&ctx, 200, &mut rng).unwrap() {
                assert!((0..t.n()).all(|v| matches!(t.outdegree(v), 0 | 2)));
            }
        }
    }
}
