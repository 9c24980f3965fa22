use std::collections::BTreeSet;

use polyaforge::{canonical_code, free_canonical_code, neighborhood_code, DegreeSet, Tree};
use proptest::prelude::*;

/// Decodes a Prüfer sequence over `0..seq.len() + 2`.
fn from_prufer(seq: &[usize]) -> Tree {
    let n = seq.len() + 2;
    let mut degree = vec![1; n];
    for &s in seq {
        degree[s] += 1;
    }
    let mut edges = Vec::with_capacity(n - 1);
    let mut leaves: BTreeSet<usize> = (0..n).filter(|&v| degree[v] == 1).collect();
    for &s in seq {
        let leaf = leaves.pop_first().unwrap();
        edges.push((leaf, s));
        degree[s] -= 1;
        if degree[s] == 1 {
            leaves.insert(s);
        }
    }
    let rest: Vec<usize> = leaves.into_iter().collect();
    edges.push((rest[0], rest[1]));
    Tree::from_edges(n, &edges).unwrap()
}

fn tree_strategy() -> impl Strategy<Value = Tree> {
    (2usize..40).prop_flat_map(|n| proptest::collection::vec(0..n, n - 2).prop_map(|s| from_prufer(&s)))
}

fn relabel(t: &Tree, perm: &[usize]) -> Tree {
    let edges: Vec<(usize, usize)> = t.edges().into_iter().map(|(u, v)| (perm[u], perm[v])).collect();
    Tree::from_edges(t.n(), &edges).unwrap()
}

fn tree_and_perm() -> impl Strategy<Value = (Tree, Vec<usize>)> {
    tree_strategy().prop_flat_map(|t| {
        let n = t.n();
        (Just(t), Just((0..n).collect::<Vec<_>>()).prop_shuffle())
    })
}

proptest! {
    #[test]
    fn free_code_is_label_invariant((t, perm) in tree_and_perm()) {
        prop_assert_eq!(free_canonical_code(&t), free_canonical_code(&relabel(&t, &perm)));
    }

    #[test]
    fn rooted_code_is_label_invariant((t, perm) in tree_and_perm(), root in 0usize..40) {
        let root = root % t.n();
        let relabelled = relabel(&t, &perm);
        prop_assert_eq!(
            canonical_code(&t.rooted_at(root).unwrap()),
            canonical_code(&relabelled.rooted_at(perm[root]).unwrap())
        );
    }

    #[test]
    fn degree_sum(t in tree_strategy()) {
        let total: usize = (0..t.n()).map(|v| t.degree(v)).sum();
        prop_assert_eq!(total, 2 * (t.n() - 1));
        prop_assert_eq!(t.edges().len(), t.n() - 1);
    }

    #[test]
    fn neighborhood_code_matches_extracted_ball(t in tree_strategy(), v in 0usize..40, k in 1usize..5) {
        let v = v % t.n();
        let ball = t.k_neighborhood(v, k).unwrap();
        prop_assert_eq!(neighborhood_code(&t, v, k), canonical_code(&ball));
    }

    #[test]
    fn diameter_is_max_eccentricity(t in tree_strategy()) {
        let ecc = (0..t.n()).map(|v| *t.bfs_distances(v).iter().max().unwrap()).max().unwrap();
        prop_assert_eq!(t.diameter(), ecc);
    }

    #[test]
    fn ndjson_round_trip(t in tree_strategy()) {
        let back = Tree::from_ndjson(&t.to_ndjson()).unwrap();
        prop_assert_eq!(free_canonical_code(&back), free_canonical_code(&t));
    }

    #[test]
    fn degree_set_round_trip(finite in proptest::collection::btree_set(0usize..12, 0..5), tail in proptest::option::of(1usize..15)) {
        let set = DegreeSet::new(finite, tail);
        if !set.is_empty() {
            let parsed: DegreeSet = set.to_string().parse().unwrap();
            prop_assert_eq!(parsed, set);
        }
    }
}
