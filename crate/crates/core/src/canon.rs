//! Isomorphism-invariant encodings of rooted and unrooted trees.
//!
//! A code is the sequence of outdegrees read in preorder after ordering every
//! vertex's children canonically (AHU level ranks). The preorder outdegree
//! sequence determines an ordered tree, so equal codes mean isomorphic trees;
//! its length is the number of vertices.

use std::fmt;

use crate::trees::{RootedTree, Tree};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CanonicalCode(pub Vec<u32>);

impl CanonicalCode {
    pub fn as_slice(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl serde::Serialize for CanonicalCode {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl fmt::Display for CanonicalCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for v in &self.0 {
            if !first {
                write!(f, ".")?;
            }
            write!(f, "{v}")?;
            first = false;
        }
        Ok(())
    }
}

/// Code of a rooted tree; equal exactly for rooted-isomorphic trees.
/// Every vertex contributes its outdegree followed by the codes of its
/// children in increasing lexicographic order.
pub fn canonical_code(t: &RootedTree) -> CanonicalCode {
    let order = t.preorder();
    let mut codes: Vec<Vec<u32>> = vec![Vec::new(); t.n()];
    for &v in order.iter().rev() {
        let mut parts: Vec<Vec<u32>> = t.children(v).iter().map(|&c| std::mem::take(&mut codes[c])).collect();
        parts.sort_unstable();
        let mut code = Vec::with_capacity(1 + parts.iter().map(Vec::len).sum::<usize>());
        code.push(parts.len() as u32);
        for p in parts {
            code.extend(p);
        }
        codes[v] = code;
    }
    CanonicalCode(std::mem::take(&mut codes[0]))
}

/// Code of the radius-`k` ball around `v`, rooted at `v`; equal to
/// `canonical_code(&t.k_neighborhood(v, k))` without building the ball.
pub fn neighborhood_code(t: &Tree, v: usize, k: usize) -> CanonicalCode {
    fn code(t: &Tree, u: usize, parent: usize, depth: usize) -> Vec<u32> {
        if depth == 0 {
            return vec![0];
        }
        let mut parts: Vec<Vec<u32>> = t
            .neighbors(u)
            .iter()
            .filter(|&&w| w != parent)
            .map(|&w| code(t, w, u, depth - 1))
            .collect();
        parts.sort_unstable();
        let mut out = vec![parts.len() as u32];
        for p in parts {
            out.extend(p);
        }
        out
    }
    CanonicalCode(code(t, v, usize::MAX, k))
}

/// Code of an unrooted tree: the rooted code at the center, or for two
/// centers the two half-tree codes in sorted order, concatenated.
pub fn free_canonical_code(t: &Tree) -> CanonicalCode {
    let centers = t.centers();
    match centers.as_slice() {
        [c] => canonical_code(&t.rooted_at(*c).expect("center is a vertex")),
        [u, v] => {
            let a = half_code(t, *u, *v);
            let b = half_code(t, *v, *u);
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            let mut code = lo.0;
            code.extend(hi.0);
            CanonicalCode(code)
        }
        _ => unreachable!("a tree has one or two centers"),
    }
}

fn half_code(t: &Tree, root: usize, banned: usize) -> CanonicalCode {
    let mut index = vec![usize::MAX; t.n()];
    let mut parent = vec![usize::MAX];
    let mut order = vec![root];
    index[root] = 0;
    index[banned] = usize::MAX - 1;
    let mut head = 0;
    while head < order.len() {
        let u = order[head];
        head += 1;
        for &w in t.neighbors(u) {
            if index[w] == usize::MAX {
                index[w] = order.len();
                order.push(w);
                parent.push(index[u]);
            }
        }
    }
    canonical_code(&RootedTree::from_parent_unchecked(parent))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rooted(parents: &[Option<usize>]) -> RootedTree {
        RootedTree::from_parents(parents).unwrap()
    }

    #[test]
    fn smallest_tree() {
        assert_eq!(canonical_code(&RootedTree::single_vertex()).0, vec![0]);
        assert_eq!(free_canonical_code(&Tree::single_vertex()).0, vec![0]);
    }

    #[test]
    fn path_rootings_differ() {
        let end = rooted(&[None, Some(0), Some(1)]);
        let mid = rooted(&[None, Some(0), Some(0)]);
        assert_ne!(canonical_code(&end), canonical_code(&mid));
        assert_eq!(canonical_code(&end).len(), 3);
    }

    #[test]
    fn child_order_is_irrelevant() {
        // root with a leaf child and a child carrying one leaf, in both orders
        let a = rooted(&[None, Some(0), Some(0), Some(2)]);
        let b = rooted(&[None, Some(0), Some(0), Some(1)]);
        assert_eq!(canonical_code(&a), canonical_code(&b));
    }

    #[test]
    fn free_code_relabelling() {
        let p = Tree::from_edges(4, &[(2, 0), (0, 3), (3, 1)]).unwrap();
        assert_eq!(free_canonical_code(&p), free_canonical_code(&Tree::path(4)));
        assert_ne!(free_canonical_code(&Tree::star(4)), free_canonical_code(&Tree::path(4)));
    }

    #[test]
    fn bicentral_and_unicentral_never_collide() {
        // both have 6 vertices; one has two centers, the other one
        let bi = Tree::path(6);
        let uni = Tree::from_edges(6, &[(0, 1), (1, 2), (2, 3), (3, 4), (2, 5)]).unwrap();
        assert_eq!(bi.centers().len(), 2);
        assert_eq!(uni.centers().len(), 1);
        assert_ne!(free_canonical_code(&bi), free_canonical_code(&uni));
    }
}
