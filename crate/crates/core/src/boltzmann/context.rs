use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::Zero;
use serde::Serialize;

use crate::boltzmann::recursive::SizeTables;
use crate::degree::DegreeSet;
use crate::enumeration::{big_ln, radius_of_convergence, Singularity, TreeCounts};
use crate::error::{Error, Result};

/// Sizes up to which class probabilities come from exact big-integer counts.
pub const EXACT_CLASS_LIMIT: usize = 400;

const RHO_PRECISION: f64 = 1e-13;

/// Series values below this are dropped from the scale tables.
const SCALE_CUTOFF: f64 = 1e-16;

/// How exact-size samples are produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub enum Method {
    /// Table-driven recursive sampling (no rejection except for tail buckets).
    #[default]
    Recursive,
    /// Pólya-Boltzmann sampling at `x = ρ`, conditioned by rejection.
    Boltzmann,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Method::Recursive => write!(f, "recursive"),
            Method::Boltzmann => write!(f, "boltzmann"),
        }
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "recursive" => Ok(Method::Recursive),
            "boltzmann" => Ok(Method::Boltzmann),
            other => Err(Error::Parse(format!("unknown method `{other}`"))),
        }
    }
}

/// The three parts of the cycle-pointed decomposition of unrooted trees.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum PointedClass {
    /// Marked fixpoint.
    S,
    /// Marked symmetric cycle centered at an edge.
    E,
    /// Marked symmetric cycle centered at a vertex.
    V,
}

impl PointedClass {
    pub const ALL: [PointedClass; 3] = [PointedClass::S, PointedClass::E, PointedClass::V];
}

impl fmt::Display for PointedClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            PointedClass::S => "S",
            PointedClass::E => "E",
            PointedClass::V => "V",
        };
        write!(f, "{s}")
    }
}

impl FromStr for PointedClass {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "S" | "s" => Ok(PointedClass::S),
            "E" | "e" => Ok(PointedClass::E),
            "V" | "v" => Ok(PointedClass::V),
            other => Err(Error::Parse(format!("unknown class `{other}`"))),
        }
    }
}

/// Everything a sampler needs for one degree set, up to a maximal size.
/// Immutable once built; share it freely between threads.
#[derive(Debug, Clone)]
pub struct BoltzmannContext {
    omega: DegreeSet,
    omega_star: DegreeSet,
    singularity: Singularity<f64>,
    /// `layer_weights[i - 1][d]` is `P_d` at scale `i`.
    layer_weights: Vec<Vec<f64>>,
    /// `exp(Σ_j s_{ij} / j)`, the unrestricted set total at scale `i`.
    set_totals: Vec<f64>,
    i_max: usize,
    d_max: usize,
    tail_bound: f64,
    tables: SizeTables,
    counts: Option<TreeCounts>,
    method: Method,
}

impl BoltzmannContext {
    /// Builds a context able to sample trees with up to `max_n` vertices.
    pub fn new(omega: &DegreeSet, max_n: usize) -> Result<Self> {
        omega.validate_degrees()?;
        let omega_star = omega.shifted();
        let singularity = radius_of_convergence(&omega_star, RHO_PRECISION)?;
        let rho = singularity.rho;

        let i_max = singularity
            .s_values
            .iter()
            .position(|&s| s < SCALE_CUTOFF)
            .unwrap_or(singularity.s_values.len())
            .max(1);
        // Ã(x) <= (x / ρ) Ã(ρ) for x <= ρ, summed over the dropped scales
        let tail_bound = singularity.s(1) * rho.powi(i_max as i32) / (1.0 - rho);

        let d_max = omega.cap().max(1);
        let s_at = |k: usize| -> f64 {
            if k <= i_max {
                singularity.s(k)
            } else {
                0.0
            }
        };
        let mut layer_weights = Vec::with_capacity(i_max);
        let mut set_totals = Vec::with_capacity(i_max);
        for i in 1..=i_max {
            let mut p = vec![1.0];
            for d in 1..=d_max {
                let acc: f64 = (1..=d).map(|j| s_at(i * j) * p[d - j]).sum();
                p.push(acc / d as f64);
            }
            layer_weights.push(p);
            let log_total: f64 = (1..=i_max / i).map(|j| s_at(i * j) / j as f64).sum();
            set_totals.push(log_total.exp());
        }

        let tables = SizeTables::build(&omega_star, omega.cap(), rho, max_n.max(2));
        let counts = if max_n <= EXACT_CLASS_LIMIT {
            Some(TreeCounts::compute(omega, max_n.max(2))?)
        } else {
            None
        };

        Ok(BoltzmannContext {
            omega: omega.clone(),
            omega_star,
            singularity,
            layer_weights,
            set_totals,
            i_max,
            d_max,
            tail_bound,
            tables,
            counts,
            method: Method::default(),
        })
    }

    pub fn with_method(mut self, method: Method) -> Self {
        self.method = method;
        self
    }

    pub fn method(&self) -> Method {
        self.method
    }

    pub fn omega(&self) -> &DegreeSet {
        &self.omega
    }

    pub fn omega_star(&self) -> &DegreeSet {
        &self.omega_star
    }

    pub fn rho(&self) -> f64 {
        self.singularity.rho
    }

    pub fn singularity(&self) -> &Singularity<f64> {
        &self.singularity
    }

    /// `Ã(ρ^i)`, zero beyond `i_max`.
    pub fn s(&self, i: usize) -> f64 {
        if i == 0 || i > self.i_max {
            0.0
        } else {
            self.singularity.s(i)
        }
    }

    /// `Ã°(ρ^i) = Σ_m m a_m ρ^{im}`, zero beyond `i_max`; infinite at `i = 1`.
    pub fn t(&self, i: usize) -> f64 {
        if i == 0 || i > self.i_max {
            0.0
        } else {
            self.singularity.t(i)
        }
    }

    pub fn i_max(&self) -> usize {
        self.i_max
    }

    pub fn d_max(&self) -> usize {
        self.d_max
    }

    /// Bound on `Σ_{i > i_max} Ã(ρ^i)`, the mass ignored by the scale tables.
    pub fn tail_bound(&self) -> f64 {
        self.tail_bound
    }

    pub fn max_n(&self) -> usize {
        self.tables.max_n()
    }

    pub fn tables(&self) -> &SizeTables {
        &self.tables
    }

    pub fn counts(&self) -> Option<&TreeCounts> {
        self.counts.as_ref()
    }

    /// `P_0..=P_{d_max}` at scale `i`.
    pub fn layer(&self, scale: usize) -> &[f64] {
        &self.layer_weights[scale - 1]
    }

    /// `P_0..=P_d` at scale `i`, extending the stored table when needed.
    pub fn layer_upto(&self, scale: usize, d: usize) -> std::borrow::Cow<'_, [f64]> {
        let stored = self.layer(scale);
        if d < stored.len() {
            return std::borrow::Cow::Borrowed(stored);
        }
        let mut p = stored.to_vec();
        for k in p.len()..=d {
            let acc: f64 = (1..=k).map(|j| self.s(scale * j) * p[k - j]).sum();
            p.push(acc / k as f64);
        }
        std::borrow::Cow::Owned(p)
    }

    pub(crate) fn set_total(&self, scale: usize) -> f64 {
        self.set_totals[scale - 1]
    }

    /// `Z_{SET_Λ}(s_i, s_{2i}, ...)`.
    pub fn set_weight(&self, lambda: &DegreeSet, scale: usize) -> f64 {
        let p = self.layer_upto(scale, lambda.cap());
        let limit = lambda.tail_min().unwrap_or(usize::MAX);
        let mut total: f64 = lambda
            .finite_part()
            .filter(|&d| d < limit)
            .map(|d| p.get(d).copied().unwrap_or(0.0))
            .sum();
        if let Some(t) = lambda.tail_min() {
            let head: f64 = p[..t.min(p.len())].iter().sum();
            total += (self.set_total(scale) - head).max(0.0);
        }
        total
    }

    pub(crate) fn check_size(&self, n: usize) -> Result<()> {
        if n > self.max_n() {
            return Err(Error::InvalidArgument(format!(
                "size {n} exceeds the context limit {}",
                self.max_n()
            )));
        }
        Ok(())
    }

    fn unsupported(&self, n: usize) -> Error {
        Error::UnsupportedSize {
            n,
            rule: self.omega.size_rule(),
        }
    }

    /// Fails unless some rooted tree with `n` vertices exists.
    pub(crate) fn check_rooted(&self, n: usize) -> Result<()> {
        self.check_size(n)?;
        let exists = match &self.counts {
            Some(c) => n >= 1 && !c.rooted().get(n).is_zero(),
            None => n >= 1 && self.tables.a_hat(n) > 0.0,
        };
        if exists {
            Ok(())
        } else {
            Err(self.unsupported(n))
        }
    }

    /// Unnormalised probabilities of the classes S, E, V at size `n`.
    pub fn class_weights(&self, n: usize) -> Result<[f64; 3]> {
        self.check_size(n)?;
        if n < 2 {
            return Err(self.unsupported(n));
        }
        let weights = match &self.counts {
            Some(c) => {
                let total = big_ln(c.pointed().get(n));
                let part = |x: &BigUint| (big_ln(x) - total).exp();
                [part(c.s().get(n)), part(c.e().get(n)), part(c.v().get(n))]
            }
            None => self.table_class_weights(n),
        };
        if weights.iter().all(|&w| !(w > 0.0)) {
            return Err(self.unsupported(n));
        }
        Ok(weights)
    }

    /// Class weights `z^n (s_n, e_n, v_n)` from the float tables.
    pub fn table_class_weights(&self, n: usize) -> [f64; 3] {
        let tables = &self.tables;
        let z = tables.z();
        let s = z * tables.weight(&self.omega, n - 1);
        let e = if n % 2 == 0 {
            (n / 2) as f64 * tables.a_hat(n / 2) * tables.zpow(n / 2)
        } else {
            0.0
        };
        let v: f64 = self.v_options(n).iter().map(|o| o.2).sum();
        [s, e, v]
    }

    /// The terms `(ℓ, m, weight)` of `z^n v_n`: a marked orbit of `ℓ` copies
    /// of a tree with `m` vertices, the rest of the root's children having a
    /// count in `Ω - ℓ`.
    pub(crate) fn v_options(&self, n: usize) -> Vec<(usize, usize, f64)> {
        let tables = &self.tables;
        let z = tables.z();
        let mut out = Vec::new();
        for ell in 2..n {
            let rest = self.omega.shift_down(ell);
            if rest.is_empty() {
                break;
            }
            for m in 1..=(n - 1) / ell {
                let a = tables.a_hat(m);
                if a == 0.0 {
                    continue;
                }
                let w = tables.weight(&rest, n - 1 - ell * m);
                if w > 0.0 {
                    out.push((ell, m, z * m as f64 * a * tables.zpow((ell - 1) * m) * w));
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn layers_follow_the_recurrence() {
        let ctx = BoltzmannContext::new(&DegreeSet::naturals(), 20).unwrap();
        let p = ctx.layer(1);
        assert_eq!(p[0], 1.0);
        assert!((p[1] - ctx.s(1)).abs() < 1e-15);
        let p2 = ctx.layer(2);
        assert!((p2[1] - ctx.s(2)).abs() < 1e-15);
        assert!(ctx.tail_bound() < 1e-14);
        // s values decrease with the scale
        for i in 1..ctx.i_max() {
            assert!(ctx.s(i + 1) < ctx.s(i));
        }
    }

    #[test]
    fn fixed_point_holds_at_rho() {
        // Ã(ρ) = ρ Z_{SET_{Ω*}}(Ã(ρ), Ã(ρ²), ...)
        for omega in [DegreeSet::naturals(), DegreeSet::finite([1, 3]), DegreeSet::finite([1, 2, 4])] {
            let ctx = BoltzmannContext::new(&omega, 10).unwrap();
            let rhs = ctx.rho() * ctx.set_weight(ctx.omega_star(), 1);
            assert!((rhs - ctx.s(1)).abs() < 1e-6, "{omega}: {rhs} vs {}", ctx.s(1));
        }
    }

    #[test]
    fn float_class_weights_match_exact() {
        let omega = DegreeSet::naturals();
        let ctx = BoltzmannContext::new(&omega, 60).unwrap();
        for n in [6, 21, 60] {
            let exact = ctx.class_weights(n).unwrap();
            let approx = ctx.table_class_weights(n);
            let total: f64 = approx.iter().sum();
            for c in 0..3 {
                assert!((exact[c] - approx[c] / total).abs() < 1e-9, "n={n} c={c}");
            }
        }
    }

    #[test]
    fn unsupported_sizes() {
        let ctx = BoltzmannContext::new(&DegreeSet::finite([1, 3]), 20).unwrap();
        assert!(matches!(ctx.class_weights(5), Err(Error::UnsupportedSize { .. })));
        assert!(matches!(ctx.class_weights(1), Err(Error::UnsupportedSize { .. })));
        assert!(ctx.class_weights(6).is_ok());
        assert!(ctx.check_rooted(4).is_err());
        assert!(ctx.check_rooted(5).is_ok());
    }

    #[test]
    fn method_parsing() {
        assert_eq!("boltzmann".parse::<Method>().unwrap(), Method::Boltzmann);
        assert!("other".parse::<Method>().is_err());
        assert_eq!("V".parse::<PointedClass>().unwrap(), PointedClass::V);
    }
}
