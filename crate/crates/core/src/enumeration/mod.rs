//! Exact counting, brute-force enumeration and the numeric singularity.

pub mod counts;
pub mod oracle;
pub mod singularity;

pub use counts::{
    e_counts, free_counts, rooted_counts, s_counts, set_layer, v_counts, CoeffTable, SeriesId,
    SetLayerTable, TreeCounts,
};
pub use oracle::{brute_force_enumerate, free_trees, object_tree, rooted_trees, ObjectKind, ORACLE_LIMIT};
pub use singularity::{big_ln, radius_of_convergence, Singularity};
