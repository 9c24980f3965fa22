//! Enumeration and exact-size uniform generation of unlabelled trees with
//! vertex-degree restrictions, with statistics for their diameters and local
//! neighborhoods.

pub mod boltzmann;
pub mod canon;
pub mod crt;
pub mod degree;
pub mod enumeration;
pub mod error;
pub mod stats;
pub mod trees;

pub use canon::{canonical_code, free_canonical_code, neighborhood_code, CanonicalCode};
pub use degree::DegreeSet;
pub use error::{Error, Result};
pub use trees::{RootedTree, Tree};

/// Scalar type used by the samplers and the command-line tool.
pub type Real = f64;
pub type TailEvaluation = crt::TailEvaluation<Real>;
pub type MomentValue = crt::MomentValue<Real>;
pub type Singularity = enumeration::Singularity<Real>;
pub type ScalingCalibration = stats::ScalingCalibration<Real>;
pub type TailFit = stats::TailFit<Real>;
