//! Exact-size samplers for the classes S, E, V and for unrooted trees.
//!
//! Two projection facts make the class samplers simple:
//!
//! * E: an E-object is two copies of a cycle-pointed rooted tree of size
//!   `n/2` joined by an edge. A rooted tree of size `m` carries exactly `m`
//!   cycle pointings, so the half tree of a uniform E-object is a uniform
//!   rooted tree.
//! * V: a V-object is a root, a marked orbit of `ℓ` copies of a
//!   cycle-pointed tree of size `m`, and further children. Again every
//!   tree of size `m` has `m` pointings, so once `(ℓ, m)` is drawn with
//!   weight `m a_m · #rest` the orbit tree is uniform and the internal
//!   pointing can be dropped.
//!
//! Choosing the class with probability `(s_n, e_n, v_n) / (n f_n)` then
//! gives a uniform cycle-pointed tree, whose underlying tree is uniform
//! because every tree of size `n` has exactly `n` pointings.

use rand::Rng;

use crate::boltzmann::context::{BoltzmannContext, Method, PointedClass};
use crate::boltzmann::rejection;
use crate::boltzmann::shape::Shape;
use crate::error::{Error, Result};
use crate::trees::{RootedTree, Tree};

/// An unrooted tree with one marked cycle of one of its automorphisms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CyclePointedTree {
    pub tree: Tree,
    pub marked_cycle: Vec<usize>,
}

/// One exact-size draw with its class and the number of attempts spent.
#[derive(Debug, Clone)]
pub struct UnrootedSample {
    pub tree: Tree,
    pub class: PointedClass,
    pub attempts: u64,
}

/// Uniform rooted tree with `n` vertices and outdegrees in `Ω*`.
pub fn sample_polya_exact<R: Rng + ?Sized>(ctx: &BoltzmannContext, n: usize, rng: &mut R) -> Result<RootedTree> {
    Ok(polya_exact(ctx, n, rng)?.0)
}

fn polya_exact<R: Rng + ?Sized>(ctx: &BoltzmannContext, n: usize, rng: &mut R) -> Result<(RootedTree, u64)> {
    ctx.check_rooted(n)?;
    match ctx.method() {
        Method::Boltzmann => rejection::polya_exact(ctx, n, rng),
        Method::Recursive => {
            let mut shape = Shape::new();
            ctx.tables().fill_tree(&mut shape, 0, n, rng);
            Ok((shape.tree(), 1))
        }
    }
}

fn check_class(ctx: &BoltzmannContext, n: usize, class: PointedClass) -> Result<()> {
    let weights = ctx.class_weights(n)?;
    let idx = PointedClass::ALL.iter().position(|&c| c == class).unwrap();
    if weights[idx] > 0.0 {
        Ok(())
    } else {
        Err(Error::UnsupportedSize {
            n,
            rule: format!("{}; class {class} is empty at n = {n}", ctx.omega().size_rule()),
        })
    }
}

fn s_pointed<R: Rng + ?Sized>(ctx: &BoltzmannContext, n: usize, rng: &mut R) -> Result<(CyclePointedTree, u64)> {
    check_class(ctx, n, PointedClass::S)?;
    let (shape, attempts) = match ctx.method() {
        Method::Boltzmann => rejection::s_exact(ctx, n, rng)?,
        Method::Recursive => {
            let mut shape = Shape::new();
            if !ctx.tables().fill_children(&mut shape, 0, ctx.omega(), n - 1, rng) {
                return Err(Error::InfeasibleRestriction);
            }
            (shape, 1)
        }
    };
    let tree = shape.tree().to_tree();
    Ok((CyclePointedTree { tree, marked_cycle: vec![0] }, attempts))
}

/// Two copies of `half` joined at their roots (vertices `0` and `half.n()`).
fn doubled(half: &RootedTree) -> Tree {
    let m = half.n();
    let mut edges = Vec::with_capacity(2 * m - 1);
    for v in 1..m {
        let p = half.parent(v).expect("non-root vertex");
        edges.push((p, v));
        edges.push((p + m, v + m));
    }
    edges.push((0, m));
    Tree::from_edges(2 * m, &edges).expect("two copies of a tree joined by an edge")
}

fn e_pointed<R: Rng + ?Sized>(ctx: &BoltzmannContext, n: usize, rng: &mut R) -> Result<(CyclePointedTree, u64)> {
    check_class(ctx, n, PointedClass::E)?;
    let (half, attempts) = polya_exact(ctx, n / 2, rng)?;
    let tree = doubled(&half);
    Ok((CyclePointedTree { tree, marked_cycle: vec![0, n / 2] }, attempts))
}

fn v_pointed<R: Rng + ?Sized>(ctx: &BoltzmannContext, n: usize, rng: &mut R) -> Result<(CyclePointedTree, u64)> {
    check_class(ctx, n, PointedClass::V)?;
    let (shape, orbit, attempts) = match ctx.method() {
        Method::Boltzmann => rejection::v_exact(ctx, n, rng)?,
        Method::Recursive => {
            let options = ctx.v_options(n);
            let total: f64 = options.iter().map(|o| o.2).sum();
            let mut u = rng.random::<f64>() * total;
            let mut chosen = options[options.len() - 1];
            for &o in &options {
                if u < o.2 {
                    chosen = o;
                    break;
                }
                u -= o.2;
            }
            let (ell, m, _) = chosen;
            let tables = ctx.tables();
            let mut shape = Shape::new();
            let orbit = shape.add(0, ell);
            tables.fill_tree(&mut shape, orbit, m, rng);
            let rest = ctx.omega().shift_down(ell);
            if !tables.fill_children(&mut shape, 0, &rest, n - 1 - ell * m, rng) {
                return Err(Error::InfeasibleRestriction);
            }
            (shape, orbit, 1)
        }
    };
    let (rooted, marked) = shape.materialize(Some(orbit));
    Ok((CyclePointedTree { tree: rooted.to_tree(), marked_cycle: marked }, attempts))
}

/// Uniform cycle-pointed tree of the given class and size, carrying a
/// representative marked cycle (the fixpoint, the central edge swap, or the
/// orbit of the marked subtree roots).
pub fn sample_class_pointed<R: Rng + ?Sized>(
    ctx: &BoltzmannContext,
    n: usize,
    class: PointedClass,
    rng: &mut R,
) -> Result<(CyclePointedTree, u64)> {
    match class {
        PointedClass::S => s_pointed(ctx, n, rng),
        PointedClass::E => e_pointed(ctx, n, rng),
        PointedClass::V => v_pointed(ctx, n, rng),
    }
}

pub fn sample_s_exact<R: Rng + ?Sized>(ctx: &BoltzmannContext, n: usize, rng: &mut R) -> Result<Tree> {
    Ok(s_pointed(ctx, n, rng)?.0.tree)
}

pub fn sample_e_exact<R: Rng + ?Sized>(ctx: &BoltzmannContext, n: usize, rng: &mut R) -> Result<Tree> {
    Ok(e_pointed(ctx, n, rng)?.0.tree)
}

pub fn sample_v_exact<R: Rng + ?Sized>(ctx: &BoltzmannContext, n: usize, rng: &mut R) -> Result<Tree> {
    Ok(v_pointed(ctx, n, rng)?.0.tree)
}

/// Draws the class with probability `(s_n, e_n, v_n) / (n f_n)`.
pub fn choose_class<R: Rng + ?Sized>(ctx: &BoltzmannContext, n: usize, rng: &mut R) -> Result<PointedClass> {
    let w = ctx.class_weights(n)?;
    let total: f64 = w.iter().sum();
    let mut u = rng.random::<f64>() * total;
    for (i, &wi) in w.iter().enumerate() {
        if wi > 0.0 {
            if u < wi {
                return Ok(PointedClass::ALL[i]);
            }
            u -= wi;
        }
    }
    let last = w.iter().rposition(|&x| x > 0.0).expect("a positive class weight");
    Ok(PointedClass::ALL[last])
}

/// Uniform unrooted tree with `n` vertices and all degrees in `Ω`.
pub fn sample_unrooted_exact<R: Rng + ?Sized>(ctx: &BoltzmannContext, n: usize, rng: &mut R) -> Result<UnrootedSample> {
    let class = choose_class(ctx, n, rng)?;
    sample_class_exact(ctx, n, class, rng)
}

/// A draw from one class, projected to its unrooted tree.
pub fn sample_class_exact<R: Rng + ?Sized>(
    ctx: &BoltzmannContext,
    n: usize,
    class: PointedClass,
    rng: &mut R,
) -> Result<UnrootedSample> {
    let (pointed, attempts) = sample_class_pointed(ctx, n, class, rng)?;
    Ok(UnrootedSample {
        tree: pointed.tree,
        class,
        attempts,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boltzmann::rng::RandomSource;
    use crate::degree::DegreeSet;

    fn degrees_ok(t: &Tree, omega: &DegreeSet) -> bool {
        t.degree_histogram().keys().all(|&d| omega.contains(d))
    }

    #[test]
    fn small_cases() {
        for method in [Method::Recursive, Method::Boltzmann] {
            let ctx = BoltzmannContext::new(&DegreeSet::naturals(), 12).unwrap().with_method(method);
            let mut rng = RandomSource::new(5, 0).rng();
            let t = sample_unrooted_exact(&ctx, 2, &mut rng).unwrap().tree;
            assert_eq!(t.n(), 2);
            let t = sample_v_exact(&ctx, 3, &mut rng).unwrap();
            assert_eq!(t.diameter(), 2);
            assert!(sample_unrooted_exact(&ctx, 1, &mut rng).is_err());
            assert!(sample_e_exact(&ctx, 5, &mut rng).is_err());
            assert_eq!(sample_polya_exact(&ctx, 1, &mut rng).unwrap().n(), 1);

            let cubic = BoltzmannContext::new(&DegreeSet::finite([1, 3]), 12).unwrap().with_method(method);
            let star = sample_v_exact(&cubic, 4, &mut rng).unwrap();
            assert_eq!(star.degree_histogram().get(&3), Some(&1));
        }
    }

    #[test]
    fn outputs_are_structurally_valid() {
        for omega in [DegreeSet::naturals(), DegreeSet::finite([1, 3]), DegreeSet::finite([1, 2, 4])] {
            for method in [Method::Recursive, Method::Boltzmann] {
                let ctx = BoltzmannContext::new(&omega, 40).unwrap().with_method(method);
                let mut rng = RandomSource::new(6, 1).rng();
                for n in [10, 20, 30] {
                    if ctx.class_weights(n).is_err() {
                        continue;
                    }
                    for _ in 0..20 {
                        let s = sample_unrooted_exact(&ctx, n, &mut rng).unwrap();
                        assert_eq!(s.tree.n(), n);
                        assert!(degrees_ok(&s.tree, &omega), "{omega} {method}");
                    }
                }
            }
        }
    }

    #[test]
    fn marked_orbits() {
        let ctx = BoltzmannContext::new(&DegreeSet::naturals(), 20).unwrap();
        let mut rng = RandomSource::new(7, 0).rng();
        for _ in 0..50 {
            let (p, _) = sample_class_pointed(&ctx, 15, PointedClass::V, &mut rng).unwrap();
            assert!(p.marked_cycle.len() >= 2);
            let parents: Vec<_> = p.marked_cycle.iter().map(|&v| p.tree.distance(0, v).unwrap()).collect();
            assert!(parents.iter().all(|&d| d == 1));
        }
    }
}
