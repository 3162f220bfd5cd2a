//! Exact single-site DMRG viewed as closest-point iteration on the unit
//! sphere.
//!
//! A matrix-product state in mixed-canonical gauge is fitted to a dense
//! target unit vector. Each update keeps every site but one fixed, which
//! pins a linear subspace of the full space; the iterate is replaced by the
//! unit vector of that subspace closest to the target, then the free site
//! moves along the chain. The overlap with the target can only go up.
//!
//! - [`tensor`]: contraction and sign-fixed QR.
//! - [`mps`]: the state type, gauge moves, dense conversion, overlaps.
//! - [`target`]: target vectors from counts, names, seeds and files.
//! - [`engine`]: projection tensors, single-site updates, sweeps, training.
//! - [`oracle`]: brute-force dense reference used to check the engine.
//! - [`io`] and [`cli`]: run artifacts and the command-line front end.

pub mod cli;
pub mod engine;
pub mod error;
pub mod io;
pub mod mps;
pub mod oracle;
pub mod target;
pub mod tensor;

pub use engine::{
    compute_projection_tensor, optimal_update, sweep, train, MetricRecord, ProjectionTensor,
    TargetSpec, Termination, TrainConfig, TrainResult,
};
pub use error::{Error, Result};
pub use mps::{random_mps, Direction, Mps, SiteTensor};
pub use target::{named_state, state_from_counts, DenseState};
pub use tensor::{contract, qr_orthonormalize, Tensor};
