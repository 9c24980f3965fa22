use crate::trees::{RootedTree, TreeBuilder};

/// A rooted tree in compressed form: every node stands for `copies`
/// identical subtrees hanging from each instance of its parent.
#[derive(Debug, Clone)]
pub(crate) struct Shape {
    parent: Vec<usize>,
    copies: Vec<usize>,
}

impl Shape {
    pub fn new() -> Self {
        Shape {
            parent: vec![usize::MAX],
            copies: vec![1],
        }
    }

    pub fn add(&mut self, parent: usize, copies: usize) -> usize {
        self.parent.push(parent);
        self.copies.push(copies);
        self.parent.len() - 1
    }

    /// Hangs `copies` copies of `tree` below `parent`; returns the node of
    /// the tree's root.
    pub fn graft(&mut self, parent: usize, tree: &RootedTree, copies: usize) -> usize {
        let mut map = vec![0usize; tree.n()];
        map[0] = self.add(parent, copies);
        for v in tree.preorder().into_iter().skip(1) {
            let p = tree.parent(v).expect("non-root vertex");
            map[v] = self.add(map[p], 1);
        }
        map[0]
    }

    /// Expands the copies. Returns the tree and the vertices created for the
    /// node `watch`.
    pub fn materialize(&self, watch: Option<usize>) -> (RootedTree, Vec<usize>) {
        let mut children = vec![Vec::new(); self.parent.len()];
        for (v, &p) in self.parent.iter().enumerate().skip(1) {
            children[p].push(v);
        }
        let mut builder = TreeBuilder::with_root();
        let mut watched = Vec::new();
        if watch == Some(0) {
            watched.push(0);
        }
        let mut stack = vec![(0usize, 0usize)];
        while let Some((node, vertex)) = stack.pop() {
            for &c in &children[node] {
                for _ in 0..self.copies[c] {
                    let v = builder.add_child(vertex);
                    if watch == Some(c) {
                        watched.push(v);
                    }
                    stack.push((c, v));
                }
            }
        }
        (builder.finish(), watched)
    }

    pub fn tree(&self) -> RootedTree {
        self.materialize(None).0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::canon::canonical_code;

    #[test]
    fn copies_expand() {
        let mut s = Shape::new();
        let a = s.add(0, 3);
        s.add(a, 2);
        let (t, watched) = s.materialize(Some(a));
        assert_eq!(t.n(), 1 + 3 + 6);
        assert_eq!(watched.len(), 3);
        assert!(watched.iter().all(|&v| t.parent(v) == Some(0)));
    }

    #[test]
    fn graft_keeps_structure() {
        let path = RootedTree::from_parents(&[None, Some(0), Some(1)]).unwrap();
        let mut s = Shape::new();
        s.graft(0, &path, 2);
        let t = s.tree();
        let expected = RootedTree::from_parents(&[
            None,
            Some(0),
            Some(1),
            Some(2),
            Some(0),
            Some(4),
            Some(5),
        ])
        .unwrap();
        assert_eq!(canonical_code(&t), canonical_code(&expected));
    }
}
