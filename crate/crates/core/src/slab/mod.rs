//! Time-slab scheme: on each slab of a partition, a linear problem with
//! slab-averaged coefficients, closed by successive approximation of the
//! averages.

mod galerkin;
mod partition;
mod provider;
mod scheme;
mod solve;

pub use galerkin::{delta_star, DeltaStar, MAX_DIAGNOSTIC_N};
pub use partition::{
    build_partition, compute_kstar, PartitionPolicy, Slab, TimePartition, VelocityNormSample,
};
pub use provider::{ReferenceVelocity, VelocityProvider};
pub use scheme::{run_slab_scheme, SlabRecord, SlabRun, SlabSchemeConfig, DEFAULT_SAMPLES_PER_SLAB};
pub use solve::{
    linear_slab_solve, picard_solve_slab, slab_average, PicardConfig, PicardDiagnostics,
    SlabAverages, SlabSolution,
};
