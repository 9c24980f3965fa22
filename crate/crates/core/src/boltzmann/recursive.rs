//! Exact-size sampling from counting tables (a generalisation of the
//! Nijenhuis-Wilf RANRUT method to restricted child counts).
//!
//! With `a_k` the number of rooted trees of size `k`, the multisets of total
//! size `t` satisfy
//!
//! ```text
//! t U(t)   = Σ_{j,k} k a_k U(t - jk)                  (no count restriction)
//! c F_c(t) = Σ_{j<=c} Σ_k a_k F_{c-j}(t - jk)         (exactly c elements)
//! ```
//!
//! Each term corresponds to removing `j` copies of one tree of size `k`,
//! and every multiset is hit equally often (`t` resp. `c` times), so drawing
//! a term proportionally to its weight and recursing gives uniform
//! multisets. All tables are stored scaled by `z^t` with `z` the radius of
//! convergence, which keeps them of order one.

use rand::Rng;

use crate::boltzmann::shape::Shape;
use crate::degree::DegreeSet;

/// Relative size below which a difference of table entries counts as zero.
const CANCELLATION: f64 = 1e-9;

#[derive(Debug, Clone)]
pub struct SizeTables {
    z: f64,
    omega_star: DegreeSet,
    zpow: Vec<f64>,
    a_hat: Vec<f64>,
    u_hat: Vec<f64>,
    f_hat: Vec<Vec<f64>>,
}

impl SizeTables {
    /// Tables for trees up to `max_n` vertices; child counts below
    /// `count_cap` are tracked individually.
    pub fn build(omega_star: &DegreeSet, count_cap: usize, z: f64, max_n: usize) -> Self {
        let max_n = max_n.max(1);
        let zpow: Vec<f64> = (0..=max_n).map(|k| z.powi(k as i32)).collect();
        let mut tables = SizeTables {
            z,
            omega_star: omega_star.clone(),
            zpow,
            a_hat: vec![0.0; max_n + 1],
            u_hat: vec![0.0; max_n],
            f_hat: vec![vec![0.0; max_n]; count_cap + 1],
        };
        let mut d_hat = vec![0.0; max_n];
        tables.u_hat[0] = 1.0;
        tables.f_hat[0][0] = 1.0;
        for t in 0..max_n {
            if t > 0 {
                let k = t;
                tables.a_hat[k] = z * tables.weight(omega_star, k - 1);
                // contributions k â_k z^{m-k} of this size to every multiple m
                let mut m = k;
                while m < max_n {
                    d_hat[m] += k as f64 * tables.a_hat[k] * tables.zpow[m - k];
                    m += k;
                }
                let mut acc = 0.0;
                for m in 1..=t {
                    acc += d_hat[m] * tables.u_hat[t - m];
                }
                tables.u_hat[t] = acc / t as f64;
                for c in 1..=count_cap {
                    let mut acc = 0.0;
                    for j in 1..=c {
                        for k in 1..=t / j {
                            let rest = tables.f_hat[c - j][t - j * k];
                            if rest != 0.0 {
                                acc += tables.a_hat[k] * tables.zpow[(j - 1) * k] * rest;
                            }
                        }
                    }
                    tables.f_hat[c][t] = acc / c as f64;
                }
            }
        }
        tables.a_hat[max_n] = z * tables.weight(omega_star, max_n - 1);
        tables
    }

    pub fn z(&self) -> f64 {
        self.z
    }

    /// Largest tree size covered.
    pub fn max_n(&self) -> usize {
        self.a_hat.len() - 1
    }

    /// `a_k z^k`.
    pub fn a_hat(&self, k: usize) -> f64 {
        self.a_hat.get(k).copied().unwrap_or(0.0)
    }

    pub fn zpow(&self, k: usize) -> f64 {
        self.zpow.get(k).copied().unwrap_or_else(|| self.z.powi(k as i32))
    }

    fn count_cap(&self) -> usize {
        self.f_hat.len() - 1
    }

    fn tail_weight(&self, from: usize, t: usize) -> f64 {
        let head: f64 = (0..from).map(|c| self.f_hat[c][t]).sum();
        let diff = self.u_hat[t] - head;
        if diff <= CANCELLATION * self.u_hat[t] {
            0.0
        } else {
            diff
        }
    }

    /// `z^t` times the number of multisets of total size `t` with a count in `lambda`.
    pub fn weight(&self, lambda: &DegreeSet, t: usize) -> f64 {
        let cap = self.count_cap();
        let mut total = 0.0;
        let limit = lambda.tail_min().unwrap_or(cap + 1);
        for c in lambda.finite_part().filter(|&c| c < limit) {
            assert!(c <= cap, "count {c} exceeds the tracked cap {cap}");
            total += self.f_hat[c][t];
        }
        if let Some(tail) = lambda.tail_min() {
            assert!(tail <= cap + 1, "tail {tail} exceeds the tracked cap {cap}");
            total += self.tail_weight(tail, t);
        }
        total
    }

    /// Draws a uniform multiset of total size `t` with count in `lambda`,
    /// as groups `(copies, tree size)`. Returns `None` if there is none.
    pub(crate) fn sample_multiset<R: Rng + ?Sized>(
        &self,
        lambda: &DegreeSet,
        t: usize,
        rng: &mut R,
    ) -> Option<Vec<(usize, usize)>> {
        let limit = lambda.tail_min().unwrap_or(self.count_cap() + 1);
        let mut options: Vec<(Option<usize>, f64)> = lambda
            .finite_part()
            .filter(|&c| c < limit)
            .map(|c| (Some(c), self.f_hat[c][t]))
            .collect();
        if let Some(tail) = lambda.tail_min() {
            options.push((None, self.tail_weight(tail, t)));
        }
        let total: f64 = options.iter().map(|o| o.1).sum();
        if total <= 0.0 {
            return None;
        }
        let mut u = rng.random::<f64>() * total;
        let mut chosen = None;
        for &(c, w) in &options {
            if w > 0.0 {
                chosen = Some(c);
                if u < w {
                    break;
                }
                u -= w;
            }
        }
        match chosen.expect("positive total") {
            Some(c) => Some(self.exact_count_plan(c, t, rng)),
            None => {
                let tail = lambda.tail_min().expect("tail option");
                loop {
                    let plan = self.free_count_plan(t, rng);
                    if plan.iter().map(|g| g.0).sum::<usize>() >= tail {
                        return Some(plan);
                    }
                }
            }
        }
    }

    fn exact_count_plan<R: Rng + ?Sized>(&self, mut c: usize, mut t: usize, rng: &mut R) -> Vec<(usize, usize)> {
        let mut plan = Vec::new();
        while c > 0 {
            let mut u = rng.random::<f64>() * c as f64 * self.f_hat[c][t];
            let mut pick = None;
            'scan: for j in 1..=c {
                for k in 1..=t / j {
                    let rest = self.f_hat[c - j][t - j * k];
                    if rest == 0.0 || self.a_hat[k] == 0.0 {
                        continue;
                    }
                    let w = self.a_hat[k] * self.zpow[(j - 1) * k] * rest;
                    pick = Some((j, k));
                    if u < w {
                        break 'scan;
                    }
                    u -= w;
                }
            }
            let (j, k) = pick.expect("a positive table entry has a positive term");
            plan.push((j, k));
            c -= j;
            t -= j * k;
        }
        plan
    }

    fn free_count_plan<R: Rng + ?Sized>(&self, mut t: usize, rng: &mut R) -> Vec<(usize, usize)> {
        let mut plan = Vec::new();
        while t > 0 {
            let mut u = rng.random::<f64>() * t as f64 * self.u_hat[t];
            let mut pick = None;
            // single copies carry most of the mass, so scan them first
            'scan: for j in 1..=t {
                for k in 1..=t / j {
                    let rest = self.u_hat[t - j * k];
                    if rest == 0.0 || self.a_hat[k] == 0.0 {
                        continue;
                    }
                    let w = k as f64 * self.a_hat[k] * self.zpow[(j - 1) * k] * rest;
                    pick = Some((j, k));
                    if u < w {
                        break 'scan;
                    }
                    u -= w;
                }
            }
            let (j, k) = pick.expect("a positive table entry has a positive term");
            plan.push((j, k));
            t -= j * k;
        }
        plan
    }

    /// Fills `node` of `shape` with a uniform rooted tree of `size` vertices.
    pub(crate) fn fill_tree<R: Rng + ?Sized>(&self, shape: &mut Shape, node: usize, size: usize, rng: &mut R) {
        let mut stack = vec![(node, size)];
        while let Some((at, size)) = stack.pop() {
            let plan = self
                .sample_multiset(&self.omega_star, size - 1, rng)
                .expect("tree size with positive weight");
            for (copies, k) in plan {
                let child = shape.add(at, copies);
                stack.push((child, k));
            }
        }
    }

    /// Fills `node` with children forming a uniform multiset of total size
    /// `t` and count in `lambda`.
    pub(crate) fn fill_children<R: Rng + ?Sized>(
        &self,
        shape: &mut Shape,
        node: usize,
        lambda: &DegreeSet,
        t: usize,
        rng: &mut R,
    ) -> bool {
        let Some(plan) = self.sample_multiset(lambda, t, rng) else {
            return false;
        };
        for (copies, k) in plan {
            let child = shape.add(node, copies);
            self.fill_tree(shape, child, k, rng);
        }
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::enumeration::rooted_counts;
    use num_traits::ToPrimitive;

    fn check_against_exact(omega_star: DegreeSet, cap: usize) {
        let z = 0.37;
        let tables = SizeTables::build(&omega_star, cap, z, 30);
        let exact = rooted_counts(&omega_star, 30).unwrap();
        for k in 1..=30 {
            let a = exact.get(k).to_f64().unwrap();
            let approx = tables.a_hat(k) / z.powi(k as i32);
            assert!((a - approx).abs() <= 1e-9 * a.max(1.0), "k={k}: {a} vs {approx}");
        }
    }

    #[test]
    fn tables_reproduce_exact_counts() {
        check_against_exact(DegreeSet::all(), 1);
        check_against_exact(DegreeSet::finite([0, 2]), 3);
        check_against_exact(DegreeSet::finite([0, 1, 3]), 4);
        check_against_exact(DegreeSet::new([0], Some(2)), 3);
    }
}
