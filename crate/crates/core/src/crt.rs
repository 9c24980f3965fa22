//! Diameter law of the Brownian continuum random tree.
//!
//! `P(D > x) = Σ_{k>=1} (k²-1)(2/3 k⁴x⁴ - 4k²x² + 2) exp(-k²x²/2)` for
//! `x > 0`, its moments, the Broutin-Flajolet constants `c_r`, and the
//! special functions they need.
//!
//! For small `x` the terms of that series are huge and cancel, so below
//! [`DUAL_SWITCH`] the complementary probability is computed from the
//! Poisson-summed (Jacobi theta) form instead: with `t = x²/2`,
//! `a_k = π²k²`,
//!
//! ```text
//! P(D <= x) = 2√π Σ_{k>=1} t^{-9/2} (2a_k/3)(2a_k² + 2a_k t² - 9a_k t + 6t²) exp(-a_k/t).
//! ```

use num_traits::Float;
use serde::Serialize;

use crate::error::{Error, Result};

/// Value of the survival function with its truncation certificate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TailEvaluation<F> {
    pub x: F,
    pub value: F,
    pub terms_used: usize,
    pub truncation_bound: F,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MomentValue<F> {
    pub k: u32,
    pub value: F,
}

fn c<F: Float>(v: f64) -> F {
    F::from(v).expect("representable constant")
}

fn pi<F: Float>() -> F {
    c(std::f64::consts::PI)
}

/// Below this `x` the survival function is evaluated through the dual series.
pub const DUAL_SWITCH: f64 = 1.5;

/// `|k-th term|`, which also bounds the term itself.
fn term_bound<F: Float>(k: F, x: F) -> F {
    let k2 = k * k;
    let x2 = x * x;
    (k2 - F::one()) * (c::<F>(2.0 / 3.0) * k2 * k2 * x2 * x2 + c::<F>(4.0) * k2 * x2 + c::<F>(2.0))
        * (-k2 * x2 / c(2.0)).exp()
}

/// `P(D(T_e) > x)`. The series is summed until a geometric bound on the
/// remaining terms (valid once the term ratio is below one) drops below `tol`.
pub fn crt_diameter_tail<F: Float>(x: F, tol: F) -> Result<TailEvaluation<F>> {
    if !(tol > F::zero()) || !tol.is_finite() {
        return Err(Error::InvalidTolerance);
    }
    if !(x >= F::zero()) || !x.is_finite() {
        return Err(Error::InvalidArgument("x must be finite and non-negative".into()));
    }
    if x == F::zero() {
        return Ok(TailEvaluation {
            x,
            value: F::one(),
            terms_used: 0,
            truncation_bound: F::zero(),
        });
    }
    if x < c(DUAL_SWITCH) {
        return Ok(dual_tail(x, tol));
    }
    let x2 = x * x;
    let mut sum = F::zero();
    let mut k = 1usize;
    loop {
        let kf = F::from(k).unwrap();
        let k2 = kf * kf;
        let term = (k2 - F::one())
            * (c::<F>(2.0 / 3.0) * k2 * k2 * x2 * x2 - c::<F>(4.0) * k2 * x2 + c::<F>(2.0))
            * (-k2 * x2 / c(2.0)).exp();
        sum = sum + term;
        let next = term_bound(F::from(k + 1).unwrap(), x);
        let after = term_bound(F::from(k + 2).unwrap(), x);
        // past the peak the bounds decrease with a decreasing ratio
        if k >= 2 && next > F::zero() {
            let ratio = after / next;
            if ratio < F::one() && kf * x > F::one() {
                let remainder = next / (F::one() - ratio);
                if remainder < tol {
                    return Ok(TailEvaluation {
                        x,
                        value: sum.max(F::zero()).min(F::one()),
                        terms_used: k,
                        truncation_bound: remainder,
                    });
                }
            }
        } else if k >= 2 && next == F::zero() {
            return Ok(TailEvaluation {
                x,
                value: sum.max(F::zero()).min(F::one()),
                terms_used: k,
                truncation_bound: F::zero(),
            });
        }
        k += 1;
    }
}

fn dual_term<F: Float>(k: usize, t: F, absolute: bool) -> F {
    let kf = F::from(k).unwrap();
    let a = pi::<F>() * pi::<F>() * kf * kf;
    let two = c::<F>(2.0);
    let nine = if absolute { c::<F>(-9.0) } else { c::<F>(9.0) };
    let poly = two * a * a + two * a * t * t - nine * a * t + c::<F>(6.0) * t * t;
    t.powf(c(-4.5)) * (two * a / c(3.0)) * poly * (-a / t).exp()
}

/// `1 - P(D <= x)` from the dual series; every term is positive past its
/// first and the bounds decay faster than geometrically.
fn dual_tail<F: Float>(x: F, tol: F) -> TailEvaluation<F> {
    let t = x * x / c(2.0);
    let scale = c::<F>(2.0) * pi::<F>().sqrt();
    let mut cdf = F::zero();
    let mut k = 1usize;
    loop {
        cdf = cdf + scale * dual_term(k, t, false);
        let next = scale * dual_term(k + 1, t, true);
        let after = scale * dual_term(k + 2, t, true);
        let ratio = if next > F::zero() { after / next } else { F::zero() };
        if ratio < F::one() {
            let remainder = next / (F::one() - ratio);
            if remainder < tol || next == F::zero() {
                return TailEvaluation {
                    x,
                    value: (F::one() - cdf).max(F::zero()).min(F::one()),
                    terms_used: k,
                    truncation_bound: remainder,
                };
            }
        }
        k += 1;
    }
}

/// `Γ(k/2)` by `Γ(s + 1) = s Γ(s)` from `Γ(1) = 1`, `Γ(1/2) = √π`.
pub fn gamma_half<F: Float>(k: u32) -> Result<F> {
    if k == 0 {
        return Err(Error::InvalidArgument("gamma_half needs k >= 1".into()));
    }
    let (mut value, mut s) = if k % 2 == 0 {
        (F::one(), F::one())
    } else {
        (pi::<F>().sqrt(), c::<F>(0.5))
    };
    let target = F::from(k).unwrap() / c(2.0);
    while s < target {
        value = value * s;
        s = s + F::one();
    }
    Ok(value)
}

/// Bernoulli numbers `B_2, B_4, ..., B_20`.
const BERNOULLI: [f64; 10] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
    43867.0 / 798.0,
    -174611.0 / 330.0,
];

/// `ζ(m)` for integer `m >= 2`: a direct sum up to `N` plus the
/// Euler-Maclaurin tail, with `N` doubled until the last correction is
/// below `tol`.
pub fn zeta<F: Float>(m: u32, tol: F) -> Result<F> {
    if m < 2 {
        return Err(Error::InvalidArgument(format!("zeta needs m >= 2, got {m}")));
    }
    if !(tol > F::zero()) {
        return Err(Error::InvalidTolerance);
    }
    let mf = F::from(m).unwrap();
    let mut n_terms = 16usize;
    loop {
        let nf = F::from(n_terms).unwrap();
        let mut sum = F::zero();
        for j in (1..n_terms).rev() {
            sum = sum + F::from(j).unwrap().powf(-mf);
        }
        sum = sum + nf.powf(F::one() - mf) / (mf - F::one()) + nf.powf(-mf) / c(2.0);
        // B_{2k}/(2k)! · m(m+1)...(m+2k-2) · N^{-m-2k+1}
        let mut rising = mf;
        let mut factorial = c::<F>(2.0);
        let mut last = F::infinity();
        for (i, &b) in BERNOULLI.iter().enumerate() {
            let kk = i + 1;
            let correction = c::<F>(b) / factorial * rising * nf.powf(-mf - F::from(2 * kk - 1).unwrap());
            if correction.abs() > last.abs() {
                break;
            }
            sum = sum + correction;
            last = correction;
            rising = rising * (mf + F::from(2 * kk - 1).unwrap()) * (mf + F::from(2 * kk).unwrap());
            factorial = factorial * F::from((2 * kk + 1) * (2 * kk + 2)).unwrap();
        }
        if last.abs() < tol || n_terms > 1 << 20 {
            return Ok(sum);
        }
        n_terms *= 2;
    }
}

const ZETA_TOL: f64 = 1e-15;

/// `E[D(T_e)^k]`.
pub fn crt_diameter_moment<F: Float>(k: u32) -> Result<MomentValue<F>> {
    let value = match k {
        0 => return Err(Error::InvalidArgument("moment order must be >= 1".into())),
        1 => c::<F>(4.0 / 3.0) * (pi::<F>() / c(2.0)).sqrt(),
        2 => c::<F>(2.0 / 3.0) * (F::one() + pi::<F>() * pi::<F>() / c(3.0)),
        3 => c::<F>(2.0) * (c::<F>(2.0) * pi::<F>()).sqrt(),
        _ => {
            let kf = F::from(k).unwrap();
            let tol = c::<F>(ZETA_TOL).max(F::epsilon());
            c::<F>(2.0).powf(kf / c(2.0)) / c(3.0)
                * kf
                * (kf - F::one())
                * (kf - c(3.0))
                * gamma_half::<F>(k)?
                * (zeta::<F>(k - 2, tol)? - zeta::<F>(k, tol)?)
        }
    };
    Ok(MomentValue { k, value })
}

/// Constants `c_r` in the asymptotic moments of the height-like functional
/// studied for binary trees.
pub fn broutin_flajolet_c<F: Float>(r: u32) -> Result<F> {
    let sqrt_pi = pi::<F>().sqrt();
    Ok(match r {
        0 => return Err(Error::InvalidArgument("r must be >= 1".into())),
        1 => c::<F>(8.0 / 3.0) * sqrt_pi,
        2 => c::<F>(16.0 / 3.0) * (F::one() + pi::<F>() * pi::<F>() / c(3.0)),
        3 => c::<F>(64.0) * sqrt_pi,
        _ => {
            let rf = F::from(r).unwrap();
            let tol = c::<F>(ZETA_TOL).max(F::epsilon());
            c::<F>(4.0).powf(rf) / c(3.0)
                * rf
                * (rf - F::one())
                * (rf - c(3.0))
                * gamma_half::<F>(r)?
                * (zeta::<F>(r - 2, tol)? - zeta::<F>(r, tol)?)
        }
    })
}

/// `∫_a^b f` by adaptive Simpson with Richardson correction.
pub fn integrate<F: Float, G: Fn(F) -> F>(f: &G, a: F, b: F, tol: F) -> F {
    fn simpson<F: Float, G: Fn(F) -> F>(f: &G, a: F, fa: F, b: F, fb: F) -> (F, F, F) {
        let two = F::one() + F::one();
        let m = (a + b) / two;
        let fm = f(m);
        (m, fm, (b - a) / F::from(6.0).unwrap() * (fa + F::from(4.0).unwrap() * fm + fb))
    }
    #[allow(clippy::too_many_arguments)]
    fn recurse<F: Float, G: Fn(F) -> F>(
        f: &G,
        a: F,
        fa: F,
        b: F,
        fb: F,
        m: F,
        fm: F,
        whole: F,
        tol: F,
        depth: u32,
    ) -> F {
        let (lm, flm, left) = simpson(f, a, fa, m, fm);
        let (rm, frm, right) = simpson(f, m, fm, b, fb);
        let delta = left + right - whole;
        let fifteen = F::from(15.0).unwrap();
        if depth == 0 || delta.abs() <= fifteen * tol {
            return left + right + delta / fifteen;
        }
        let half = tol / (F::one() + F::one());
        recurse(f, a, fa, m, fm, lm, flm, left, half, depth - 1)
            + recurse(f, m, fm, b, fb, rm, frm, right, half, depth - 1)
    }
    let fa = f(a);
    let fb = f(b);
    let (m, fm, whole) = simpson(f, a, fa, b, fb);
    recurse(f, a, fa, b, fb, m, fm, whole, tol, 50)
}

/// `∫_0^∞ P(D > x) dx` evaluated numerically; equals `E[D]`.
pub fn integrated_tail(power: u32, tol: f64) -> f64 {
    let k = power as f64;
    let f = |x: f64| {
        let tail = crt_diameter_tail(x, 1e-17).map(|t| t.value).unwrap_or(0.0);
        k * x.powf(k - 1.0) * tail
    };
    // the survival function is below 1e-30 past x = 13
    integrate(&f, 0.0, 4.0, tol / 4.0) + integrate(&f, 4.0, 13.0, tol / 4.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tail_endpoints() {
        assert_eq!(crt_diameter_tail(0.0, 1e-12).unwrap().value, 1.0);
        let far = crt_diameter_tail(10.0f64, 1e-20).unwrap();
        assert!(far.value < 1e-15);
        assert!(crt_diameter_tail(1.0, 0.0).is_err());
        assert!(crt_diameter_tail(-1.0, 1e-9).is_err());
    }

    #[test]
    fn tail_is_monotone() {
        let mut prev = 1.0;
        for i in 1..=1000 {
            let x = i as f64 * 0.006;
            let t = crt_diameter_tail(x, 1e-14).unwrap();
            assert!(t.value <= prev + 1e-12, "x={x}");
            assert!((0.0..=1.0).contains(&t.value));
            assert!(t.truncation_bound < 1e-14);
            prev = t.value;
        }
    }

    #[test]
    fn direct_and_dual_series_agree() {
        for x in [0.9, 1.2, 1.5, 1.8, 2.5] {
            let t = x * x / 2.0;
            let dual = dual_tail(x, 1e-17).value;
            // direct sum, forced
            let mut direct = 0.0;
            for k in 1..200 {
                let k2 = (k * k) as f64;
                direct += (k2 - 1.0) * (2.0 / 3.0 * k2 * k2 * 4.0 * t * t - 8.0 * k2 * t + 2.0) * (-k2 * t).exp();
            }
            assert!((dual - direct).abs() < 1e-12, "x={x}: {dual} vs {direct}");
        }
        // reference value 1 - P(D > 1) = 2.21449712264087e-4
        let v = crt_diameter_tail(1.0f64, 1e-16).unwrap().value;
        assert!((1.0 - v - 2.214_497_122_640_87e-4).abs() < 1e-15);
    }

    #[test]
    fn special_functions() {
        let pi = std::f64::consts::PI;
        assert!((zeta::<f64>(2, 1e-15).unwrap() - pi * pi / 6.0).abs() < 1e-14);
        assert!((zeta::<f64>(4, 1e-15).unwrap() - pi.powi(4) / 90.0).abs() < 1e-14);
        let z3a = zeta::<f64>(3, 1e-15).unwrap();
        assert!((z3a - 1.202_056_903_159_594_2).abs() < 1e-14);
        assert!(zeta::<f64>(1, 1e-9).is_err());
        assert!((gamma_half::<f64>(1).unwrap() - pi.sqrt()).abs() < 1e-15);
        assert_eq!(gamma_half::<f64>(6).unwrap(), 2.0);
        assert!((gamma_half::<f64>(5).unwrap() - 0.75 * pi.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn moments_and_constants() {
        let m1 = crt_diameter_moment::<f64>(1).unwrap().value;
        assert!((m1 - 1.671_085_5).abs() < 1e-7);
        let m3 = crt_diameter_moment::<f64>(3).unwrap().value;
        assert!((m3 - 5.013_256_5).abs() < 1e-7);
        let m4 = crt_diameter_moment::<f64>(4).unwrap().value;
        assert!((m4 - 9.00177).abs() < 1e-5, "{m4}");
        // the published decimals are rounded
        let close = |a: f64, b: f64| ((a - b) / b).abs() < 1e-4;
        assert!(close(broutin_flajolet_c::<f64>(1).unwrap(), 4.7264));
        assert!(close(broutin_flajolet_c::<f64>(2).unwrap(), 22.8795));
        assert!(close(broutin_flajolet_c::<f64>(3).unwrap(), 113.4340));
    }

    #[test]
    fn single_precision_moment() {
        let m: f32 = crt_diameter_moment::<f32>(5).unwrap().value;
        let d = crt_diameter_moment::<f64>(5).unwrap().value;
        assert!(((m as f64) - d).abs() / d < 1e-5);
    }

    #[test]
    fn quadrature() {
        let v = integrate(&|x: f64| x * x, 0.0, 3.0, 1e-12);
        assert!((v - 9.0).abs() < 1e-10);
    }
}
