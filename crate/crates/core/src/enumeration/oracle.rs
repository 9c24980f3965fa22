//! Brute-force enumeration, used as an independent check on the counting DP.
//!
//! Rooted trees come from canonical level sequences (Beyer-Hedetniemi
//! successor rule), which list every unlabelled rooted tree exactly once.
//! Free trees and the fixpoint-pointed class are obtained by deduplicating
//! canonical codes over all rootings. Cycle-pointed objects are built
//! explicitly: a pointed rooted tree either marks its root or carries an
//! orbit of `ℓ >= 1` identical pointed subtrees beside a multiset of plain
//! subtrees.

use std::collections::BTreeSet;

use crate::canon::{canonical_code, free_canonical_code, CanonicalCode};
use crate::degree::DegreeSet;
use crate::error::{Error, Result};
use crate::trees::{RootedTree, Tree};

pub const ORACLE_LIMIT: usize = 14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ObjectKind {
    Rooted,
    Free,
    S,
    E,
    V,
}

/// All rooted trees with `n` vertices, one per isomorphism class.
pub fn rooted_trees(n: usize) -> Vec<RootedTree> {
    assert!(n >= 1);
    let mut levels: Vec<usize> = (0..n).collect();
    let mut out = Vec::new();
    loop {
        out.push(tree_from_levels(&levels));
        let Some(p) = levels.iter().rposition(|&l| l > 1) else {
            break;
        };
        let q = levels[..p]
            .iter()
            .rposition(|&l| l == levels[p] - 1)
            .expect("a parent level exists");
        let shift = p - q;
        for i in p..n {
            levels[i] = levels[i - shift];
        }
    }
    out
}

fn tree_from_levels(levels: &[usize]) -> RootedTree {
    let mut parents = vec![None];
    let mut last_at_level = vec![0usize; levels.len()];
    for (i, &l) in levels.iter().enumerate().skip(1) {
        parents.push(Some(last_at_level[l - 1]));
        last_at_level[l] = i;
    }
    RootedTree::from_parents(&parents).expect("level sequence yields a tree")
}

fn outdegrees_in(t: &RootedTree, omega_star: &DegreeSet) -> bool {
    (0..t.n()).all(|v| omega_star.contains(t.outdegree(v)))
}

fn degrees_in(t: &Tree, omega: &DegreeSet) -> bool {
    (0..t.n()).all(|v| omega.contains(t.degree(v)))
}

/// Representatives of the free trees with `n` vertices and all degrees in `omega`.
pub fn free_trees(omega: &DegreeSet, n: usize) -> Result<Vec<Tree>> {
    check_limit(n)?;
    if n == 1 {
        return Ok(vec![Tree::single_vertex()]);
    }
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for rooted in rooted_trees(n) {
        let t = rooted.to_tree();
        if degrees_in(&t, omega) && seen.insert(free_canonical_code(&t)) {
            out.push(t);
        }
    }
    Ok(out)
}

fn check_limit(n: usize) -> Result<()> {
    if n > ORACLE_LIMIT {
        Err(Error::SizeLimitExceeded {
            n,
            limit: ORACLE_LIMIT,
        })
    } else {
        Ok(())
    }
}

/// Rooted trees with outdegrees in a set, grouped by size `0..=max_n`.
struct RootedCatalog {
    by_size: Vec<Vec<CanonicalCode>>,
}

impl RootedCatalog {
    fn new(omega_star: &DegreeSet, max_n: usize) -> Self {
        let mut by_size = vec![Vec::new(); max_n + 1];
        for (m, slot) in by_size.iter_mut().enumerate().skip(1) {
            let mut codes: Vec<CanonicalCode> = rooted_trees(m)
                .into_iter()
                .filter(|t| outdegrees_in(t, omega_star))
                .map(|t| canonical_code(&t))
                .collect();
            codes.sort();
            *slot = codes;
        }
        RootedCatalog { by_size }
    }

    /// All multisets of catalogued trees with the given total size whose
    /// cardinality lies in `counts`, each as a sorted list of codes.
    fn multisets(&self, total: usize, counts: &DegreeSet) -> Vec<Vec<CanonicalCode>> {
        let items: Vec<&CanonicalCode> = self.by_size.iter().flatten().collect();
        let mut out = Vec::new();
        let mut current = Vec::new();
        fn rec<'a>(
            items: &[&'a CanonicalCode],
            start: usize,
            remaining: usize,
            counts: &DegreeSet,
            current: &mut Vec<&'a CanonicalCode>,
            out: &mut Vec<Vec<CanonicalCode>>,
        ) {
            if remaining == 0 {
                if counts.contains(current.len()) {
                    let mut ms: Vec<CanonicalCode> = current.iter().map(|c| (*c).clone()).collect();
                    ms.sort();
                    out.push(ms);
                }
                return;
            }
            for i in start..items.len() {
                let size = items[i].len();
                if size <= remaining {
                    current.push(items[i]);
                    rec(items, i, remaining - size, counts, current, out);
                    current.pop();
                }
            }
        }
        rec(&items, 0, total, counts, &mut current, &mut out);
        out
    }
}

const TAG_ROOT: u32 = 0;
const TAG_ORBIT: u32 = 1;
const TAG_E: u32 = 2;
const TAG_V: u32 = 3;

fn push_multiset(code: &mut Vec<u32>, rest: &[CanonicalCode]) {
    code.push(rest.len() as u32);
    for c in rest {
        code.extend_from_slice(c.as_slice());
    }
}

/// Codes of all cycle-pointed rooted trees of each size `0..=max_n`.
fn pointed_rooted(catalog: &RootedCatalog, omega_star: &DegreeSet, max_n: usize) -> Vec<Vec<Vec<u32>>> {
    let mut pointed: Vec<Vec<Vec<u32>>> = vec![Vec::new(); max_n + 1];
    for m in 1..=max_n {
        let mut found = Vec::new();
        for t in &catalog.by_size[m] {
            let mut code = vec![TAG_ROOT];
            code.extend_from_slice(t.as_slice());
            found.push(code);
        }
        for ell in 1..m {
            let rest_counts = omega_star.shift_down(ell);
            if rest_counts.is_empty() {
                continue;
            }
            for p in 1..=(m - 1) / ell {
                let remaining = m - 1 - ell * p;
                let rests = catalog.multisets(remaining, &rest_counts);
                for sub in &pointed[p] {
                    for rest in &rests {
                        let mut code = vec![TAG_ORBIT, ell as u32];
                        code.extend_from_slice(sub);
                        push_multiset(&mut code, rest);
                        found.push(code);
                    }
                }
            }
        }
        found.sort();
        found.dedup();
        pointed[m] = found;
    }
    pointed
}

/// Exhaustive, duplicate-free list of codes of all objects of one kind and size.
pub fn brute_force_enumerate(omega: &DegreeSet, n: usize, kind: ObjectKind) -> Result<Vec<CanonicalCode>> {
    check_limit(n)?;
    if n == 0 {
        return Ok(Vec::new());
    }
    let omega_star = omega.shifted();
    let mut codes: Vec<CanonicalCode> = match kind {
        ObjectKind::Rooted => rooted_trees(n)
            .into_iter()
            .filter(|t| outdegrees_in(t, &omega_star))
            .map(|t| canonical_code(&t))
            .collect(),
        ObjectKind::Free => free_trees(omega, n)?
            .iter()
            .map(free_canonical_code)
            .collect(),
        ObjectKind::S => {
            let mut set = BTreeSet::new();
            if n >= 2 {
                for t in free_trees(omega, n)? {
                    for v in 0..n {
                        set.insert(canonical_code(&t.rooted_at(v)?));
                    }
                }
            }
            set.into_iter().collect()
        }
        ObjectKind::E => {
            if n % 2 != 0 {
                Vec::new()
            } else {
                let half = n / 2;
                let catalog = RootedCatalog::new(&omega_star, half);
                pointed_rooted(&catalog, &omega_star, half)[half]
                    .iter()
                    .map(|p| {
                        let mut code = vec![TAG_E];
                        code.extend_from_slice(p);
                        CanonicalCode(code)
                    })
                    .collect()
            }
        }
        ObjectKind::V => {
            let catalog = RootedCatalog::new(&omega_star, n);
            let pointed = pointed_rooted(&catalog, &omega_star, n);
            let mut out = Vec::new();
            for ell in 2..n {
                let rest_counts = omega.shift_down(ell);
                if rest_counts.is_empty() {
                    continue;
                }
                for p in 1..=(n - 1) / ell {
                    let remaining = n - 1 - ell * p;
                    let rests = catalog.multisets(remaining, &rest_counts);
                    for sub in &pointed[p] {
                        for rest in &rests {
                            let mut code = vec![TAG_V, ell as u32];
                            code.extend_from_slice(sub);
                            push_multiset(&mut code, rest);
                            out.push(CanonicalCode(code));
                        }
                    }
                }
            }
            out
        }
    };
    codes.sort();
    codes.dedup();
    Ok(codes)
}

/// Reads one rooted preorder outdegree code from the front of `code`,
/// appending its vertices below `parent`.
fn read_rooted(code: &[u32], pos: &mut usize, parent: Option<usize>, parents: &mut Vec<Option<usize>>) -> Result<usize> {
    let deg = *code.get(*pos).ok_or_else(|| Error::Parse("truncated code".into()))? as usize;
    *pos += 1;
    let v = parents.len();
    parents.push(parent);
    for _ in 0..deg {
        read_rooted(code, pos, Some(v), parents)?;
    }
    Ok(v)
}

/// Copies the subtree of `root` (from `parents`) below `parent`.
fn copy_subtree(parents: &mut Vec<Option<usize>>, root: usize, end: usize, parent: usize) {
    let offset = parents.len();
    parents.push(Some(parent));
    for v in root + 1..end {
        let p = parents[v].expect("non-root vertex");
        parents.push(Some(p - root + offset));
    }
}

fn read_pointed(code: &[u32], pos: &mut usize, parent: Option<usize>, parents: &mut Vec<Option<usize>>) -> Result<usize> {
    let tag = *code.get(*pos).ok_or_else(|| Error::Parse("truncated code".into()))?;
    *pos += 1;
    match tag {
        TAG_ROOT => read_rooted(code, pos, parent, parents),
        TAG_ORBIT => {
            let v = parents.len();
            parents.push(parent);
            read_orbit(code, pos, v, parents)?;
            Ok(v)
        }
        _ => Err(Error::Parse(format!("unexpected tag {tag}"))),
    }
}

/// `ℓ`, one pointed subtree repeated `ℓ` times, then a counted list of rooted trees.
fn read_orbit(code: &[u32], pos: &mut usize, root: usize, parents: &mut Vec<Option<usize>>) -> Result<()> {
    let ell = *code.get(*pos).ok_or_else(|| Error::Parse("truncated code".into()))? as usize;
    *pos += 1;
    let first = read_pointed(code, pos, Some(root), parents)?;
    let end = parents.len();
    for _ in 1..ell {
        copy_subtree(parents, first, end, root);
    }
    let rest = *code.get(*pos).ok_or_else(|| Error::Parse("truncated code".into()))? as usize;
    *pos += 1;
    for _ in 0..rest {
        read_rooted(code, pos, Some(root), parents)?;
    }
    Ok(())
}

/// The unrooted tree underlying an object code returned by
/// [`brute_force_enumerate`] (pointings are forgotten).
pub fn object_tree(kind: ObjectKind, code: &CanonicalCode) -> Result<Tree> {
    let code = code.as_slice();
    let mut parents = Vec::new();
    let mut pos = 0;
    match kind {
        ObjectKind::Rooted | ObjectKind::S => {
            read_rooted(code, &mut pos, None, &mut parents)?;
        }
        ObjectKind::Free => return free_from_code(code),
        ObjectKind::E => {
            if code.first() != Some(&TAG_E) {
                return Err(Error::Parse("not an E code".into()));
            }
            pos = 1;
            read_pointed(code, &mut pos, None, &mut parents)?;
            let end = parents.len();
            copy_subtree(&mut parents, 0, end, 0);
        }
        ObjectKind::V => {
            if code.first() != Some(&TAG_V) {
                return Err(Error::Parse("not a V code".into()));
            }
            pos = 1;
            parents.push(None);
            read_orbit(code, &mut pos, 0, &mut parents)?;
        }
    }
    if pos != code.len() {
        return Err(Error::Parse("trailing entries in code".into()));
    }
    Ok(RootedTree::from_parents(&parents)?.to_tree())
}

/// Free codes are one rooted code (one center) or two concatenated half
/// codes (two centers, joined by an edge).
fn free_from_code(code: &[u32]) -> Result<Tree> {
    let mut parents = Vec::new();
    let mut pos = 0;
    read_rooted(code, &mut pos, None, &mut parents)?;
    if pos < code.len() {
        let second = parents.len();
        read_rooted(code, &mut pos, Some(0), &mut parents)?;
        debug_assert!(second > 0);
    }
    if pos != code.len() {
        return Err(Error::Parse("trailing entries in code".into()));
    }
    Ok(RootedTree::from_parents(&parents)?.to_tree())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn level_sequences_count_rooted_trees() {
        let counts: Vec<usize> = (1..=12).map(|n| rooted_trees(n).len()).collect();
        assert_eq!(counts, vec![1, 1, 2, 4, 9, 20, 48, 115, 286, 719, 1842, 4766]);
    }

    #[test]
    fn level_sequences_are_distinct() {
        let trees = rooted_trees(9);
        let codes: BTreeSet<_> = trees.iter().map(canonical_code).collect();
        assert_eq!(codes.len(), trees.len());
    }

    #[test]
    fn small_free_counts() {
        let nat = DegreeSet::naturals();
        assert_eq!(brute_force_enumerate(&nat, 1, ObjectKind::Free).unwrap().len(), 1);
        assert_eq!(brute_force_enumerate(&nat, 4, ObjectKind::Free).unwrap().len(), 2);
        assert_eq!(brute_force_enumerate(&nat, 6, ObjectKind::Free).unwrap().len(), 6);
    }

    #[test]
    fn pointed_classes_at_six() {
        let nat = DegreeSet::naturals();
        assert_eq!(brute_force_enumerate(&nat, 6, ObjectKind::S).unwrap().len(), 20);
        assert_eq!(brute_force_enumerate(&nat, 6, ObjectKind::E).unwrap().len(), 6);
        assert_eq!(brute_force_enumerate(&nat, 6, ObjectKind::V).unwrap().len(), 10);
        assert_eq!(brute_force_enumerate(&nat, 3, ObjectKind::V).unwrap().len(), 1);
    }

    #[test]
    fn cubic_classes_at_four() {
        let cubic = DegreeSet::finite([1, 3]);
        assert_eq!(brute_force_enumerate(&cubic, 4, ObjectKind::S).unwrap().len(), 2);
        assert_eq!(brute_force_enumerate(&cubic, 4, ObjectKind::V).unwrap().len(), 2);
    }

    #[test]
    fn object_codes_decode_to_trees() {
        let nat = DegreeSet::naturals();
        for kind in [ObjectKind::Rooted, ObjectKind::Free, ObjectKind::S, ObjectKind::E, ObjectKind::V] {
            for code in brute_force_enumerate(&nat, 8, kind).unwrap() {
                let t = object_tree(kind, &code).unwrap();
                assert_eq!(t.n(), 8, "{kind:?} {code}");
            }
        }
        // free codes round-trip
        for code in brute_force_enumerate(&nat, 9, ObjectKind::Free).unwrap() {
            let t = object_tree(ObjectKind::Free, &code).unwrap();
            assert_eq!(free_canonical_code(&t), code);
        }
        // the only V object at n = 3 is the path
        let v = brute_force_enumerate(&nat, 3, ObjectKind::V).unwrap();
        assert_eq!(object_tree(ObjectKind::V, &v[0]).unwrap().diameter(), 2);
    }

    #[test]
    fn limit_enforced() {
        assert_eq!(
            brute_force_enumerate(&DegreeSet::naturals(), 15, ObjectKind::Free),
            Err(Error::SizeLimitExceeded { n: 15, limit: 14 })
        );
    }
}
