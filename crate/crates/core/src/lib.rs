//! Metastability of Glauber spin-flip dynamics on random multigraphs.
//!
//! The crate is organised bottom-up:
//!
//! - [`graph`]: degree sequences, Configuration Model (static, dynamic and
//!   coupled constructions), Erdős–Rényi and lattice reference graphs.
//! - [`energy`]: spin configurations, model parameters and the Ising
//!   Hamiltonian with its single-flip differences.
//! - [`landscape`]: exhaustive energy-landscape analysis (communication
//!   heights, barrier, stability levels, metastable set, gates).
//! - [`bounds`]: closed-form barrier bounds and the entropy function `I_δ`.
//! - [`dynamics`]: rejection-free continuous-time Metropolis simulation and
//!   the hitting-time statistics built on it.
//! - [`experiments`]: reproducible experiment orchestration used by the CLI.

// `!(x > 0.0)` is how NaN gets rejected alongside out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod dynamics;
pub mod energy;
pub mod error;
pub mod experiments;
pub mod graph;
pub mod landscape;
pub mod rng;
pub mod stats;

pub use energy::{ModelParams, SpinConfig};
pub use error::{Error, Result};
pub use graph::{DegreeSequence, MultiGraph};
