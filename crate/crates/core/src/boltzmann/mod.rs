//! Exact-size uniform samplers: Pólya-Boltzmann rejection and a
//! table-driven recursive method sharing one context.

mod classes;
mod context;
mod recursive;
mod rejection;
mod rng;
mod shape;

pub use classes::{
    choose_class, sample_class_exact, sample_class_pointed, sample_e_exact, sample_polya_exact,
    sample_s_exact, sample_unrooted_exact, sample_v_exact, CyclePointedTree, UnrootedSample,
};
pub use context::{BoltzmannContext, Method, PointedClass, EXACT_CLASS_LIMIT};
pub use recursive::SizeTables;
pub use rejection::{
    sample_rooted_symmetry, sample_rooted_symmetry_bounded, sample_set_partition, CycleType,
    DEFAULT_BUDGET,
};
pub use rng::RandomSource;
