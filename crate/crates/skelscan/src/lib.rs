//! Density-scan skeleton extraction for point clouds in R^N.
//!
//! The core idea: lay a cubic grid of step `r` over the data, count how many
//! points fall inside the ball of radius `r` around each grid node, rank the
//! nodes by count, and join the top-ranked nodes into polylines, triangle
//! strips, or higher simplex strips. Dense low-dimensional structure shows up
//! as chains of heavy nodes; everything else falls below the count threshold.
//!
//! Modules:
//! - [`geometry`] — points, datasets, Euclidean distance.
//! - [`gridscan`] — the sparse grid index, ball counts, the ranked density
//!   table, and the count threshold.
//! - [`skeleton`] — chaining ranked nodes into polylines and simplex strips,
//!   plus recovery-quality metrics.
//! - [`baselines`] — least-squares regression line and PCA for comparison.
//! - [`tuning`] — multiplicative search for a workable count threshold or
//!   grid step.
//! - [`synth`] — deterministic synthetic datasets with planted structure.
//! - [`pipeline`] — CSV ingestion, run configuration, end-to-end orchestration,
//!   and report serialization. The `skelscan` binary is a thin layer over it.

pub mod baselines;
pub mod geometry;
pub mod gridscan;
pub mod pipeline;
pub mod rng;
pub mod skeleton;
pub mod synth;
pub mod tuning;

mod error;

pub use error::{Error, Result};
