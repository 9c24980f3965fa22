//! Exact coefficient tables.
//!
//! Rooted trees are counted with a multiset-layer dynamic program: tree
//! sizes are processed in increasing order and for each size `s` with `a_s`
//! types, taking `m` of them (with repetition) contributes
//! `C(a_s + m - 1, m)` multisets. The table is indexed by (number of
//! children, total size); child counts at or above the tracked cap share one
//! bucket when the restriction is cofinite.
//!
//! Unrooted trees are counted through the cycle-pointed decomposition
//! `n f_n = s_n + e_n + v_n` (marked fixpoint / symmetric cycle centered at
//! an edge / symmetric cycle centered at a vertex).

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::degree::DegreeSet;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SeriesId {
    A,
    S,
    E,
    V,
    Fpointed,
    F,
}

/// Exact coefficients `coeffs[n]` for `n = 0..=max_n`. Entry 0 is zero for
/// every series except `F`, which counts the empty tree once.
#[derive(Debug, Clone, PartialEq)]
pub struct CoeffTable {
    pub series: SeriesId,
    pub coeffs: Vec<BigUint>,
}

impl CoeffTable {
    pub fn get(&self, n: usize) -> &BigUint {
        &self.coeffs[n]
    }

    pub fn max_n(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Coefficients for sizes `1..=max_n`.
    pub fn sizes(&self) -> &[BigUint] {
        &self.coeffs[1..]
    }
}

/// `[z^t]` of `Z_{SET_Λ}(Ã(z), Ã(z^2), ...)` for `t = 0..=max_n`.
#[derive(Debug, Clone, PartialEq)]
pub struct SetLayerTable {
    pub restriction: DegreeSet,
    pub coeffs: Vec<BigUint>,
}

/// Counts of multisets of trees by (child-count bucket, total size).
#[derive(Debug, Clone)]
pub(crate) struct MultisetTable {
    cap: usize,
    cofinite: bool,
    rows: Vec<Vec<BigUint>>,
}

impl MultisetTable {
    fn new(cap: usize, cofinite: bool, max_t: usize) -> Self {
        let mut rows = vec![vec![BigUint::zero(); max_t + 1]; cap + 1];
        rows[0][0] = BigUint::one();
        MultisetTable {
            cap,
            cofinite,
            rows,
        }
    }

    fn max_t(&self) -> usize {
        self.rows[0].len() - 1
    }

    /// Whether bucket `c` lies inside `lambda`. Panics if `lambda` splits the
    /// overflow bucket, which cannot be answered from this table.
    fn bucket_in(&self, lambda: &DegreeSet, c: usize) -> bool {
        if c < self.cap || !self.cofinite {
            return lambda.contains(c);
        }
        match lambda.tail_min() {
            Some(t) if t <= self.cap => true,
            _ => {
                assert!(
                    lambda.finite_part().all(|v| v < self.cap),
                    "restriction {lambda} is incompatible with a table capped at {}",
                    self.cap
                );
                false
            }
        }
    }

    /// Sum over the buckets admitted by `lambda` at total size `t`.
    fn restricted(&self, lambda: &DegreeSet, t: usize) -> BigUint {
        let mut total = BigUint::zero();
        for c in 0..=self.cap {
            if self.bucket_in(lambda, c) {
                total += &self.rows[c][t];
            }
        }
        total
    }

    fn layer(&self, lambda: &DegreeSet) -> Vec<BigUint> {
        (0..=self.max_t()).map(|t| self.restricted(lambda, t)).collect()
    }

    /// Adds `types` distinct objects of the given size, with repetition.
    fn absorb(&mut self, size: usize, types: &BigUint) {
        if types.is_zero() {
            return;
        }
        let max_t = self.max_t();
        let max_mult = max_t / size;
        let mut binom = Vec::with_capacity(max_mult + 1);
        binom.push(BigUint::one());
        for m in 1..=max_mult {
            let next = &binom[m - 1] * (types + BigUint::from(m - 1)) / BigUint::from(m);
            binom.push(next);
        }
        for t in (0..=max_t).rev() {
            for c in (0..=self.cap).rev() {
                if self.rows[c][t].is_zero() {
                    continue;
                }
                let base = self.rows[c][t].clone();
                for m in 1..=(max_t - t) / size {
                    let target = c + m;
                    let bucket = if target <= self.cap {
                        target
                    } else if self.cofinite {
                        self.cap
                    } else {
                        break;
                    };
                    let add = &binom[m] * &base;
                    self.rows[bucket][t + m * size] += add;
                }
            }
        }
    }
}

/// Runs the rooted-tree DP; returns `a_0..=a_max_n` and the final multiset
/// table (capped according to `table_set`).
fn grow_rooted(
    outdegrees: &DegreeSet,
    table_set: &DegreeSet,
    max_n: usize,
) -> (Vec<BigUint>, MultisetTable) {
    let mut table = MultisetTable::new(table_set.cap(), table_set.is_cofinite(), max_n);
    let mut a = vec![BigUint::zero(); max_n + 1];
    for n in 1..=max_n {
        a[n] = table.restricted(outdegrees, n - 1);
        let count = a[n].clone();
        table.absorb(n, &count);
    }
    (a, table)
}

/// Numbers of unlabelled rooted trees with all outdegrees in `omega_star`.
pub fn rooted_counts(omega_star: &DegreeSet, max_n: usize) -> Result<CoeffTable> {
    omega_star.validate_outdegrees()?;
    let (a, _) = grow_rooted(omega_star, omega_star, max_n);
    Ok(CoeffTable {
        series: SeriesId::A,
        coeffs: a,
    })
}

/// Coefficients of `Z_{SET_Λ}(Ã(z), Ã(z^2), ...)` up to `z^max_n`.
pub fn set_layer(a: &CoeffTable, lambda: &DegreeSet, max_n: usize) -> SetLayerTable {
    assert!(a.max_n() >= max_n, "base series too short");
    let mut table = MultisetTable::new(lambda.cap(), lambda.is_cofinite(), max_n);
    for s in 1..=max_n {
        table.absorb(s, &a.coeffs[s]);
    }
    SetLayerTable {
        restriction: lambda.clone(),
        coeffs: table.layer(lambda),
    }
}

/// All exact counts for a degree set, up to a maximal size.
#[derive(Debug, Clone)]
pub struct TreeCounts {
    omega: DegreeSet,
    a: CoeffTable,
    s: CoeffTable,
    e: CoeffTable,
    v: CoeffTable,
    pointed: CoeffTable,
    f: CoeffTable,
}

impl TreeCounts {
    pub fn compute(omega: &DegreeSet, max_n: usize) -> Result<Self> {
        omega.validate_degrees()?;
        let omega_star = omega.shifted();
        let (a, table) = grow_rooted(&omega_star, omega, max_n);

        let mut s = vec![BigUint::zero(); max_n + 1];
        let mut e = vec![BigUint::zero(); max_n + 1];
        let mut v = vec![BigUint::zero(); max_n + 1];
        let mut pointed = vec![BigUint::zero(); max_n + 1];
        let mut f = vec![BigUint::zero(); max_n + 1];

        let root_layer = table.layer(omega);
        for n in 1..=max_n {
            s[n] = root_layer[n - 1].clone();
            if n % 2 == 0 {
                e[n] = BigUint::from(n / 2) * &a[n / 2];
            }
        }

        // marked orbit of ℓ >= 2 identical pointed subtrees at the root; the
        // remaining children have a count in Ω - ℓ
        for ell in 2..max_n.max(2) {
            let rest = omega.shift_down(ell);
            if rest.is_empty() {
                break;
            }
            let layer = table.layer(&rest);
            for m in 1..=(max_n.saturating_sub(1)) / ell {
                if a[m].is_zero() {
                    continue;
                }
                let weight = BigUint::from(m) * &a[m];
                for n in (1 + ell * m)..=max_n {
                    let t = n - 1 - ell * m;
                    if !layer[t].is_zero() {
                        v[n] += &weight * &layer[t];
                    }
                }
            }
        }

        // empty tree convention, as in the usual free-tree sequence
        f[0] = BigUint::one();
        for n in 1..=max_n {
            pointed[n] = &s[n] + &e[n] + &v[n];
            if n == 1 {
                // the single vertex, by convention
                f[1] = BigUint::one();
                continue;
            }
            let (q, r) = pointed[n].div_rem(&BigUint::from(n));
            if !r.is_zero() {
                return Err(Error::IntegralityViolation { n });
            }
            f[n] = q;
        }

        let table = |series, coeffs| CoeffTable { series, coeffs };
        Ok(TreeCounts {
            omega: omega.clone(),
            a: table(SeriesId::A, a),
            s: table(SeriesId::S, s),
            e: table(SeriesId::E, e),
            v: table(SeriesId::V, v),
            pointed: table(SeriesId::Fpointed, pointed),
            f: table(SeriesId::F, f),
        })
    }

    pub fn omega(&self) -> &DegreeSet {
        &self.omega
    }

    pub fn max_n(&self) -> usize {
        self.a.max_n()
    }

    pub fn rooted(&self) -> &CoeffTable {
        &self.a
    }

    pub fn s(&self) -> &CoeffTable {
        &self.s
    }

    pub fn e(&self) -> &CoeffTable {
        &self.e
    }

    pub fn v(&self) -> &CoeffTable {
        &self.v
    }

    pub fn pointed(&self) -> &CoeffTable {
        &self.pointed
    }

    pub fn free(&self) -> &CoeffTable {
        &self.f
    }

    /// Whether `n f_n = s_n + e_n + v_n` holds (trivially true where `f_n`
    /// was derived from it; meaningful when checked against an independent
    /// free count).
    pub fn identity_holds(&self, n: usize) -> bool {
        n >= 2 && &self.f.coeffs[n] * BigUint::from(n) == self.pointed.coeffs[n]
    }
}

pub fn s_counts(omega: &DegreeSet, max_n: usize) -> Result<CoeffTable> {
    Ok(TreeCounts::compute(omega, max_n)?.s)
}

pub fn e_counts(omega: &DegreeSet, max_n: usize) -> Result<CoeffTable> {
    Ok(TreeCounts::compute(omega, max_n)?.e)
}

pub fn v_counts(omega: &DegreeSet, max_n: usize) -> Result<CoeffTable> {
    Ok(TreeCounts::compute(omega, max_n)?.v)
}

pub fn free_counts(omega: &DegreeSet, max_n: usize) -> Result<CoeffTable> {
    Ok(TreeCounts::compute(omega, max_n)?.f)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(t: &CoeffTable) -> Vec<u64> {
        t.sizes().iter().map(|x| u64::try_from(x).unwrap()).collect()
    }

    #[test]
    fn rooted_unrestricted() {
        let a = rooted_counts(&DegreeSet::all(), 10).unwrap();
        assert_eq!(ints(&a), vec![1, 1, 2, 4, 9, 20, 48, 115, 286, 719]);
    }

    #[test]
    fn rooted_binary() {
        let a = rooted_counts(&DegreeSet::finite([0, 2]), 9).unwrap();
        assert_eq!(ints(&a), vec![1, 0, 1, 0, 1, 0, 2, 0, 3]);
    }

    #[test]
    fn rooted_rejects_bad_sets() {
        assert!(rooted_counts(&DegreeSet::finite([1, 2]), 5).is_err());
        assert!(rooted_counts(&DegreeSet::finite([0, 1]), 5).is_err());
    }

    #[test]
    fn layers() {
        let a = rooted_counts(&DegreeSet::all(), 8).unwrap();
        let empty = set_layer(&a, &DegreeSet::singleton(0), 8);
        assert_eq!(empty.coeffs[0], BigUint::one());
        assert!(empty.coeffs[1..].iter().all(|c| c.is_zero()));
        let pairs = set_layer(&a, &DegreeSet::singleton(2), 8);
        let got: Vec<u64> = pairs.coeffs[..5].iter().map(|x| u64::try_from(x).unwrap()).collect();
        assert_eq!(got, vec![0, 0, 1, 1, 3]);

        // base series z alone: one multiset of n atoms for every n
        let mut atom = CoeffTable {
            series: SeriesId::A,
            coeffs: vec![BigUint::zero(); 9],
        };
        atom.coeffs[1] = BigUint::one();
        let all = set_layer(&atom, &DegreeSet::all(), 8);
        assert!(all.coeffs.iter().all(|c| c.is_one()));
    }

    #[test]
    fn class_counts_naturals() {
        let c = TreeCounts::compute(&DegreeSet::naturals(), 10).unwrap();
        assert_eq!(c.s().get(6), &BigUint::from(20u32));
        assert_eq!(c.e().get(6), &BigUint::from(6u32));
        assert_eq!(c.v().get(6), &BigUint::from(10u32));
        assert_eq!(c.free().get(6), &BigUint::from(6u32));
        assert!(c.s().get(1).is_zero());
        assert!(c.v().get(1).is_zero());
        assert_eq!(c.e().get(2), &BigUint::one());
        assert!(c.e().get(5).is_zero());
        let from_zero: Vec<u64> = c.free().coeffs[..10].iter().map(|x| u64::try_from(x).unwrap()).collect();
        assert_eq!(from_zero, vec![1, 1, 1, 1, 2, 3, 6, 11, 23, 47]);
        assert_eq!(c.free().get(5), &BigUint::from(3u32));
    }

    #[test]
    fn class_counts_cubic() {
        let c = TreeCounts::compute(&DegreeSet::finite([1, 3]), 10).unwrap();
        assert_eq!(c.s().get(4), &BigUint::from(2u32));
        // a marked 2-cycle and a marked 3-cycle of leaves of the star
        assert_eq!(c.v().get(4), &BigUint::from(2u32));
        let f: Vec<u64> = [2, 4, 6, 8, 10]
            .iter()
            .map(|&n| u64::try_from(c.free().get(n)).unwrap())
            .collect();
        assert_eq!(f, vec![1, 1, 1, 1, 2]);
        for n in [3, 5, 7, 9] {
            assert!(c.free().get(n).is_zero());
        }
    }
}
