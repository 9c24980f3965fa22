//! Tree representations and metric functionals.

use std::collections::{BTreeMap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const NO_PARENT: usize = usize::MAX;

/// An unrooted tree on the vertices `0..n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Tree {
    adjacency: Vec<Vec<usize>>,
}

impl Tree {
    pub fn single_vertex() -> Self {
        Tree {
            adjacency: vec![Vec::new()],
        }
    }

    /// Builds a tree from an edge list, checking that it is connected with
    /// `n - 1` simple edges.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidTree("a tree has at least one vertex".into()));
        }
        if edges.len() != n - 1 {
            return Err(Error::InvalidTree(format!(
                "{} edges given for {n} vertices",
                edges.len()
            )));
        }
        let mut adjacency = vec![Vec::new(); n];
        for &(u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::IndexOutOfRange { index: u.max(v), n });
            }
            if u == v {
                return Err(Error::InvalidTree(format!("self-loop at {u}")));
            }
            adjacency[u].push(v);
            adjacency[v].push(u);
        }
        let tree = Tree { adjacency };
        // n - 1 edges and connected implies acyclic and simple
        let dist = tree.bfs_distances(0);
        if dist.iter().any(|&d| d == usize::MAX) {
            return Err(Error::InvalidTree("graph is not connected".into()));
        }
        Ok(tree)
    }

    pub fn path(n: usize) -> Self {
        let edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        Tree::from_edges(n, &edges).expect("path is a tree")
    }

    pub fn star(n: usize) -> Self {
        let edges: Vec<_> = (1..n).map(|i| (0, i)).collect();
        Tree::from_edges(n, &edges).expect("star is a tree")
    }

    pub fn n(&self) -> usize {
        self.adjacency.len()
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].len()
    }

    /// Edges `(u, v)` with `u < v`, ordered by `u` and then by adjacency order.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.n().saturating_sub(1));
        for (u, nb) in self.adjacency.iter().enumerate() {
            for &v in nb {
                if u < v {
                    out.push((u, v));
                }
            }
        }
        out
    }

    fn check_vertex(&self, v: usize) -> Result<()> {
        if v >= self.n() {
            Err(Error::IndexOutOfRange { index: v, n: self.n() })
        } else {
            Ok(())
        }
    }

    /// Breadth-first distances from `source` (`usize::MAX` if unreachable).
    pub fn bfs_distances(&self, source: usize) -> Vec<usize> {
        let mut dist = vec![usize::MAX; self.n()];
        let mut queue = VecDeque::new();
        dist[source] = 0;
        queue.push_back(source);
        while let Some(u) = queue.pop_front() {
            for &w in &self.adjacency[u] {
                if dist[w] == usize::MAX {
                    dist[w] = dist[u] + 1;
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    pub fn distance(&self, u: usize, v: usize) -> Result<usize> {
        self.check_vertex(u)?;
        self.check_vertex(v)?;
        Ok(self.bfs_distances(u)[v])
    }

    fn farthest_from(&self, source: usize) -> (usize, usize) {
        let dist = self.bfs_distances(source);
        let mut best = (source, 0);
        for (v, &d) in dist.iter().enumerate() {
            if d > best.1 {
                best = (v, d);
            }
        }
        best
    }

    /// Length of a longest path, by double breadth-first search.
    pub fn diameter(&self) -> usize {
        let (a, _) = self.farthest_from(0);
        self.farthest_from(a).1
    }

    /// The one or two central vertices, found by peeling leaves.
    pub fn centers(&self) -> Vec<usize> {
        let n = self.n();
        if n <= 2 {
            return (0..n).collect();
        }
        let mut degree: Vec<usize> = self.adjacency.iter().map(Vec::len).collect();
        let mut layer: Vec<usize> = (0..n).filter(|&v| degree[v] == 1).collect();
        let mut remaining = n;
        while remaining > 2 {
            remaining -= layer.len();
            let mut next = Vec::new();
            for &leaf in &layer {
                for &w in &self.adjacency[leaf] {
                    if degree[w] > 1 {
                        degree[w] -= 1;
                        if degree[w] == 1 {
                            next.push(w);
                        }
                    }
                }
                degree[leaf] = 0;
            }
            layer = next;
        }
        let mut centers = layer;
        centers.sort_unstable();
        centers
    }

    pub fn degree_histogram(&self) -> BTreeMap<usize, usize> {
        let mut hist = BTreeMap::new();
        for nb in &self.adjacency {
            *hist.entry(nb.len()).or_insert(0) += 1;
        }
        hist
    }

    /// The tree rooted at `root`, relabelled in breadth-first order.
    pub fn rooted_at(&self, root: usize) -> Result<RootedTree> {
        self.check_vertex(root)?;
        self.neighborhood_inner(root, usize::MAX)
    }

    /// The subtree spanned by all vertices within distance `k` of `v`, rooted at `v`.
    pub fn k_neighborhood(&self, v: usize, k: usize) -> Result<RootedTree> {
        self.check_vertex(v)?;
        self.neighborhood_inner(v, k)
    }

    fn neighborhood_inner(&self, root: usize, radius: usize) -> Result<RootedTree> {
        let mut index = vec![usize::MAX; self.n()];
        let mut parent = vec![NO_PARENT];
        let mut depth = vec![0usize];
        let mut order = vec![root];
        index[root] = 0;
        let mut head = 0;
        while head < order.len() {
            let u = order[head];
            let du = depth[head];
            head += 1;
            if du == radius {
                continue;
            }
            for &w in &self.adjacency[u] {
                if index[w] == usize::MAX {
                    index[w] = order.len();
                    order.push(w);
                    parent.push(index[u]);
                    depth.push(du + 1);
                }
            }
        }
        Ok(RootedTree::from_parent_unchecked(parent))
    }
}

/// A rooted tree with root `0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RootedTree {
    parent: Vec<usize>,
    children: Vec<Vec<usize>>,
}

impl RootedTree {
    pub fn single_vertex() -> Self {
        RootedTree {
            parent: vec![NO_PARENT],
            children: vec![Vec::new()],
        }
    }

    /// `parent[0]` must be `None`, every other vertex must have a parent, and
    /// following parents from any vertex must reach the root.
    pub fn from_parents(parent: &[Option<usize>]) -> Result<Self> {
        let n = parent.len();
        if n == 0 {
            return Err(Error::InvalidTree("a tree has at least one vertex".into()));
        }
        if parent[0].is_some() {
            return Err(Error::InvalidTree("vertex 0 must be the root".into()));
        }
        let mut raw = Vec::with_capacity(n);
        raw.push(NO_PARENT);
        for (v, p) in parent.iter().enumerate().skip(1) {
            match p {
                Some(p) if *p < n && *p != v => raw.push(*p),
                Some(p) => return Err(Error::IndexOutOfRange { index: *p, n }),
                None => {
                    return Err(Error::InvalidTree(format!("vertex {v} has no parent")))
                }
            }
        }
        let tree = RootedTree::from_parent_unchecked(raw);
        let reached = tree.preorder().len();
        if reached != n {
            return Err(Error::InvalidTree("parent structure contains a cycle".into()));
        }
        Ok(tree)
    }

    pub(crate) fn from_parent_unchecked(parent: Vec<usize>) -> Self {
        let mut children = vec![Vec::new(); parent.len()];
        for (v, &p) in parent.iter().enumerate().skip(1) {
            children[p].push(v);
        }
        RootedTree { parent, children }
    }

    pub fn n(&self) -> usize {
        self.parent.len()
    }

    pub fn parent(&self, v: usize) -> Option<usize> {
        match self.parent[v] {
            NO_PARENT => None,
            p => Some(p),
        }
    }

    pub fn children(&self, v: usize) -> &[usize] {
        &self.children[v]
    }

    pub fn outdegree(&self, v: usize) -> usize {
        self.children[v].len()
    }

    pub fn preorder(&self) -> Vec<usize> {
        let mut order = Vec::with_capacity(self.n());
        let mut stack = vec![0];
        while let Some(v) = stack.pop() {
            order.push(v);
            stack.extend(self.children[v].iter().rev());
        }
        order
    }

    /// Depth of each vertex.
    pub fn depths(&self) -> Vec<usize> {
        let mut depth = vec![0; self.n()];
        for v in self.preorder() {
            for &c in &self.children[v] {
                depth[c] = depth[v] + 1;
            }
        }
        depth
    }

    pub fn height(&self) -> usize {
        self.depths().into_iter().max().unwrap_or(0)
    }

    /// Forgets the root.
    pub fn to_tree(&self) -> Tree {
        let mut adjacency = vec![Vec::new(); self.n()];
        for (v, &p) in self.parent.iter().enumerate().skip(1) {
            adjacency[p].push(v);
            adjacency[v].push(p);
        }
        Tree { adjacency }
    }

    /// Parent array with `-1` for the root.
    pub fn parent_array(&self) -> Vec<i64> {
        self.parent
            .iter()
            .map(|&p| if p == NO_PARENT { -1 } else { p as i64 })
            .collect()
    }
}

/// Incrementally builds a rooted tree whose vertices are appended in order.
#[derive(Debug, Clone, Default)]
pub(crate) struct TreeBuilder {
    parent: Vec<usize>,
}

impl TreeBuilder {
    pub fn with_root() -> Self {
        TreeBuilder {
            parent: vec![NO_PARENT],
        }
    }

    pub fn add_child(&mut self, parent: usize) -> usize {
        self.parent.push(parent);
        self.parent.len() - 1
    }

    pub fn finish(self) -> RootedTree {
        RootedTree::from_parent_unchecked(self.parent)
    }
}

/// NDJSON record for a rooted tree: `{"n": .., "parent": [-1, ..]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RootedRecord {
    pub n: usize,
    pub parent: Vec<i64>,
}

/// NDJSON record for an unrooted tree: `{"n": .., "edges": [[u, v], ..]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeRecord {
    pub n: usize,
    pub edges: Vec<[usize; 2]>,
}

impl From<&RootedTree> for RootedRecord {
    fn from(t: &RootedTree) -> Self {
        RootedRecord {
            n: t.n(),
            parent: t.parent_array(),
        }
    }
}

impl From<&Tree> for TreeRecord {
    fn from(t: &Tree) -> Self {
        TreeRecord {
            n: t.n(),
            edges: t.edges().into_iter().map(|(u, v)| [u, v]).collect(),
        }
    }
}

impl TryFrom<&RootedRecord> for RootedTree {
    type Error = Error;

    fn try_from(r: &RootedRecord) -> Result<Self> {
        if r.parent.len() != r.n {
            return Err(Error::Parse("parent array length differs from n".into()));
        }
        let parents: Vec<Option<usize>> = r
            .parent
            .iter()
            .map(|&p| if p < 0 { None } else { Some(p as usize) })
            .collect();
        RootedTree::from_parents(&parents)
    }
}

impl TryFrom<&TreeRecord> for Tree {
    type Error = Error;

    fn try_from(r: &TreeRecord) -> Result<Self> {
        let edges: Vec<_> = r.edges.iter().map(|e| (e[0], e[1])).collect();
        Tree::from_edges(r.n, &edges)
    }
}

impl Tree {
    pub fn to_ndjson(&self) -> String {
        serde_json::to_string(&TreeRecord::from(self)).expect("serializable")
    }

    pub fn from_ndjson(line: &str) -> Result<Self> {
        let record: TreeRecord =
            serde_json::from_str(line).map_err(|e| Error::Parse(e.to_string()))?;
        Tree::try_from(&record)
    }
}

impl RootedTree {
    pub fn to_ndjson(&self) -> String {
        serde_json::to_string(&RootedRecord::from(self)).expect("serializable")
    }

    pub fn from_ndjson(line: &str) -> Result<Self> {
        let record: RootedRecord =
            serde_json::from_str(line).map_err(|e| Error::Parse(e.to_string()))?;
        RootedTree::try_from(&record)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diameters() {
        assert_eq!(Tree::path(7).diameter(), 6);
        assert_eq!(Tree::star(6).diameter(), 2);
        assert_eq!(Tree::single_vertex().diameter(), 0);
    }

    #[test]
    fn distances() {
        let p5 = Tree::path(5);
        assert_eq!(p5.distance(0, 4).unwrap(), 4);
        assert_eq!(p5.distance(2, 3).unwrap(), 1);
        assert_eq!(p5.distance(3, 3).unwrap(), 0);
        assert_eq!(
            p5.distance(0, 5),
            Err(Error::IndexOutOfRange { index: 5, n: 5 })
        );
    }

    #[test]
    fn centers_of_small_trees() {
        assert_eq!(Tree::path(3).centers(), vec![1]);
        assert_eq!(Tree::path(4).centers(), vec![1, 2]);
        assert_eq!(Tree::star(5).centers(), vec![0]);
        assert_eq!(Tree::single_vertex().centers(), vec![0]);
        assert_eq!(Tree::path(2).centers(), vec![0, 1]);
    }

    #[test]
    fn histograms() {
        let h = Tree::path(4).degree_histogram();
        assert_eq!(h, BTreeMap::from([(1, 2), (2, 2)]));
        let h = Tree::star(4).degree_histogram();
        assert_eq!(h, BTreeMap::from([(1, 3), (3, 1)]));
        let h = Tree::single_vertex().degree_histogram();
        assert_eq!(h, BTreeMap::from([(0, 1)]));
    }

    #[test]
    fn neighborhoods() {
        let star = Tree::star(5);
        assert_eq!(star.k_neighborhood(2, 0).unwrap().n(), 1);
        let nb = star.k_neighborhood(0, 1).unwrap();
        assert_eq!(nb.n(), 5);
        assert_eq!(nb.outdegree(0), 4);
        let nb = Tree::path(5).k_neighborhood(2, 1).unwrap();
        assert_eq!(nb.n(), 3);
        assert_eq!(nb.outdegree(0), 2);
        assert!(Tree::path(5).k_neighborhood(9, 1).is_err());
    }

    #[test]
    fn invalid_inputs_rejected() {
        assert!(Tree::from_edges(3, &[(0, 1)]).is_err());
        assert!(Tree::from_edges(3, &[(0, 1), (0, 1)]).is_err());
        assert!(Tree::from_edges(2, &[(1, 1)]).is_err());
        assert!(RootedTree::from_parents(&[None, Some(2), Some(1)]).is_err());
        assert!(RootedTree::from_parents(&[Some(0)]).is_err());
    }

    #[test]
    fn ndjson_formats() {
        let t = RootedTree::from_parents(&[None, Some(0), Some(0), Some(1)]).unwrap();
        assert_eq!(t.to_ndjson(), r#"{"n":4,"parent":[-1,0,0,1]}"#);
        assert_eq!(RootedTree::from_ndjson(&t.to_ndjson()).unwrap(), t);
        let u = t.to_tree();
        assert_eq!(u.to_ndjson(), r#"{"n":4,"edges":[[0,1],[0,2],[1,3]]}"#);
        assert_eq!(Tree::from_ndjson(&u.to_ndjson()).unwrap(), u);
        assert!(Tree::from_ndjson(r#"{"n":3,"edges":[[0,1]]}"#).is_err());
    }
}
