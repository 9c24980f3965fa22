//! Numeric location of the dominant singularity of the rooted-tree series.
//!
//! With `Φ(y, z) = z Z_{SET_{Ω*}}(y, Ã(z²), Ã(z³), ...)` the series satisfies
//! `Ã(z) = Φ(Ã(z), z)`, and at the singularity the fixed point is a tangency:
//! `∂Φ/∂y = 1`. For each `z` the tangency abscissa `y*(z)` is found by
//! bisection, and `g(z) = Φ(y*, z) - y*` changes sign exactly at `ρ`.

use num_bigint::BigUint;
use num_traits::{Float, ToPrimitive};

use crate::degree::DegreeSet;
use crate::enumeration::counts::rooted_counts;
use crate::error::{Error, Result};

const MAX_ITER: usize = 400;
const MAX_COEFFS: usize = 3000;

/// Natural logarithm of a big integer (`-inf` for zero).
pub fn big_ln(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits == 0 {
        return f64::NEG_INFINITY;
    }
    if bits < 1000 {
        return x.to_f64().expect("finite").ln();
    }
    let shift = bits - 64;
    let top = (x >> shift).to_f64().expect("finite");
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

/// `ρ` and the series values needed by Boltzmann samplers.
#[derive(Debug, Clone)]
pub struct Singularity<F> {
    pub rho: F,
    /// `s_values[i - 1] = Ã(ρ^i)`.
    pub s_values: Vec<F>,
    /// `t_values[i - 1] = Ã°(ρ^i) = Σ m a_m ρ^{im}`; infinite for `i = 1`.
    pub t_values: Vec<F>,
    /// Number of exact coefficients used for the inner series.
    pub coefficients_used: usize,
    /// Bound on the coefficient truncation error of `Ã(ρ²)`.
    pub truncation_bound: F,
}

impl<F: Float> Singularity<F> {
    pub fn i_max(&self) -> usize {
        self.s_values.len()
    }

    /// `Ã(ρ^i)`, zero beyond the stored range.
    pub fn s(&self, i: usize) -> F {
        self.s_values.get(i - 1).copied().unwrap_or_else(F::zero)
    }

    pub fn t(&self, i: usize) -> F {
        self.t_values.get(i - 1).copied().unwrap_or_else(F::zero)
    }
}

struct Evaluator<'a, F> {
    ln_a: &'a [F],
    outdegrees: &'a DegreeSet,
    eps: F,
}

impl<F: Float> Evaluator<'_, F> {
    fn series(&self, w: F, pointed: bool) -> F {
        let ln_w = w.ln();
        let mut total = F::zero();
        for (n, &la) in self.ln_a.iter().enumerate().skip(1) {
            if la == F::neg_infinity() {
                continue;
            }
            let nf = F::from(n).unwrap();
            let term = (la + nf * ln_w).exp();
            total = total + if pointed { nf * term } else { term };
        }
        total
    }

    /// `(Ã(z^i))_{i >= 2}` until the values drop below `eps`.
    fn inner(&self, z: F) -> Vec<F> {
        let mut out = Vec::new();
        let mut w = z * z;
        while w > self.eps * self.eps {
            out.push(self.series(w, false));
            w = w * z;
        }
        out
    }

    /// Returns `(Φ, ∂Φ/∂y)` at `(y, z)` given the inner values.
    fn phi(&self, y: F, z: F, inner: &[F]) -> (F, F) {
        let cap = self.outdegrees.cap();
        // P_d with s_1 = y, s_i = inner[i - 2]
        let s = |j: usize| -> F {
            if j == 1 {
                y
            } else {
                inner.get(j - 2).copied().unwrap_or_else(F::zero)
            }
        };
        let mut p = vec![F::one()];
        for d in 1..=cap {
            let mut acc = F::zero();
            for j in 1..=d {
                acc = acc + s(j) * p[d - j];
            }
            p.push(acc / F::from(d).unwrap());
        }
        let below = |d: usize| -> F { if d == 0 { F::zero() } else { p[d - 1] } };
        let mut value = F::zero();
        let mut slope = F::zero();
        let tail = self.outdegrees.tail_min();
        let finite_limit = tail.unwrap_or(cap + 1);
        for d in 0..finite_limit.min(cap + 1) {
            if self.outdegrees.contains(d) {
                value = value + p[d];
                slope = slope + below(d);
            }
        }
        if let Some(t) = tail {
            let mut log_total = y;
            for (k, &v) in inner.iter().enumerate() {
                log_total = log_total + v / F::from(k + 2).unwrap();
            }
            let total = log_total.exp();
            let mut head = F::zero();
            let mut head_slope = F::zero();
            for d in 0..t {
                head = head + p[d];
                head_slope = head_slope + below(d);
            }
            value = value + (total - head);
            slope = slope + (total - head_slope);
        }
        (z * value, z * slope)
    }

    /// Tangency point `y*` with `∂Φ/∂y = 1`, and `g = Φ(y*) - y*`.
    fn tangency(&self, z: F) -> Option<(F, F)> {
        let inner = self.inner(z);
        if inner.iter().any(|v| !v.is_finite()) {
            return None;
        }
        let one = F::one();
        let mut lo = F::zero();
        let mut hi = one;
        let mut guard = 0;
        while self.phi(hi, z, &inner).1 < one {
            hi = hi + hi;
            guard += 1;
            if guard > 2000 || !hi.is_finite() {
                return None;
            }
        }
        for _ in 0..MAX_ITER {
            let mid = (lo + hi) / (one + one);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.phi(mid, z, &inner).1 < one {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let y = (lo + hi) / (one + one);
        let (value, _) = self.phi(y, z, &inner);
        Some((y, value - y))
    }
}

/// Solves for `ρ` to absolute precision `precision` and evaluates `Ã(ρ^i)`,
/// `Ã°(ρ^i)`.
pub fn radius_of_convergence<F: Float>(omega_star: &DegreeSet, precision: F) -> Result<Singularity<F>> {
    if !(precision > F::zero()) || !precision.is_finite() {
        return Err(Error::InvalidTolerance);
    }
    omega_star.validate_outdegrees()?;
    let eps = F::from(1e-17).unwrap().max(F::epsilon());
    let mut n_coeffs = 256;
    loop {
        let a = rooted_counts(omega_star, n_coeffs)?;
        let ln_a: Vec<F> = a
            .coeffs
            .iter()
            .map(|c| F::from(big_ln(c)).unwrap())
            .collect();
        let eval = Evaluator {
            ln_a: &ln_a,
            outdegrees: omega_star,
            eps,
        };

        let one = F::one();
        let two = one + one;
        let mut lo = F::from(1e-6).unwrap();
        let mut hi = one - F::from(1e-9).unwrap();
        match eval.tangency(lo) {
            Some((_, g)) if g < F::zero() => {}
            _ => return Err(Error::NonConvergence(0)),
        }
        let mut iterations = 0;
        while hi - lo > precision {
            iterations += 1;
            if iterations > MAX_ITER {
                return Err(Error::NonConvergence(MAX_ITER));
            }
            let mid = (lo + hi) / two;
            if mid <= lo || mid >= hi {
                break;
            }
            match eval.tangency(mid) {
                Some((_, g)) if g < F::zero() => lo = mid,
                _ => hi = mid,
            }
        }
        let rho = (lo + hi) / two;

        // enough coefficients that the neglected terms of Ã(ρ²) are tiny
        let tail_ratio = rho;
        let last = *ln_a.last().unwrap();
        let n_last = F::from(n_coeffs).unwrap();
        let truncation = (last + two * n_last * rho.ln()).exp() * tail_ratio / (one - tail_ratio);
        if truncation > eps && n_coeffs < MAX_COEFFS {
            let needed = (eps.ln() / rho.ln()).to_f64().unwrap_or(f64::MAX) * 1.2 + 16.0;
            n_coeffs = (needed.ceil() as usize).clamp(n_coeffs * 2, MAX_COEFFS);
            continue;
        }

        let (y_star, _) = eval.tangency(rho).ok_or(Error::NonConvergence(iterations))?;
        let mut s_values = vec![y_star];
        let mut t_values = vec![F::infinity()];
        let mut w = rho * rho;
        while w > eps * eps {
            s_values.push(eval.series(w, false));
            t_values.push(eval.series(w, true));
            w = w * rho;
        }
        return Ok(Singularity {
            rho,
            s_values,
            t_values,
            coefficients_used: n_coeffs,
            truncation_bound: truncation,
        });
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn big_ln_matches_float() {
        let x = BigUint::from(123456789u64);
        assert!((big_ln(&x) - (123456789f64).ln()).abs() < 1e-12);
        let big = BigUint::from(3u32).pow(2000);
        assert!((big_ln(&big) - 2000.0 * 3f64.ln()).abs() < 1e-9);
        assert_eq!(big_ln(&BigUint::from(0u32)), f64::NEG_INFINITY);
    }

    #[test]
    fn otter_constant() {
        let sing = radius_of_convergence(&DegreeSet::all(), 1e-14).unwrap();
        assert!((sing.rho - 0.338_321_856_899_2).abs() < 1e-10, "{}", sing.rho);
        // unrestricted case: Ã(ρ) = 1
        assert!((sing.s(1) - 1.0).abs() < 1e-8, "{}", sing.s(1));
    }

    #[test]
    fn works_in_single_precision() {
        let sing = radius_of_convergence::<f32>(&DegreeSet::all(), 1e-6).unwrap();
        assert!((sing.rho - 0.338_321_85).abs() < 1e-4);
    }

    #[test]
    fn rejects_bad_precision() {
        assert!(radius_of_convergence(&DegreeSet::all(), 0.0).is_err());
    }
}
