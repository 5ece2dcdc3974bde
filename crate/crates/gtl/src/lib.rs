//! Sampling, reconstruction and graphon/graph neural network transfer for
//! band-limited signals on the torus.
//!
//! Layout:
//!
//! - [`signal`]: band-limited signals, uniform samples, DFT helpers, L2 errors
//! - [`kernels`]: periodic Gaussian, the regularized sampling kernel, alias
//!   factors, the error bound and the parameter planner
//! - [`graphon`]: built-in graphons, local averages, deterministic and random
//!   graphs, adjacency I/O
//! - [`wnn`] / [`gnn`]: the two-layer graphon network and its graph discretization
//! - [`experiments`]: JSON configs, reports and the check suite behind the `gtl` binary
//!
//! Examples (`cargo run --release --example <name>`): `plan`, `exact_sampling`,
//! `regularized_sampling`, `periodic_gaussian`, `graphons`, `wnn_forward`,
//! `gnn_transfer`, `random_trials`, `experiment_config`.

pub mod dd;
pub mod error;
pub mod experiments;
pub mod format;
pub mod gnn;
pub mod graphon;
pub mod kernels;
pub mod quadrature;
pub mod signal;
pub mod wnn;

pub use error::{Error, Result};
