//! Sparse subspace clustering with greedy neighbor selection (matching
//! pursuit and orthogonal matching pursuit) under deterministic bounded
//! noise.
//!
//! The crate bundles the regression loops, the similarity-graph and
//! spectral-clustering pipeline, coherence and in-radius geometry, the
//! extremal noisy-inner-product solver behind the noise-aware correctness
//! certificates, a synthetic data generator, and experiment drivers that
//! write plot-ready CSV tables.

pub mod clustering;
pub mod error;
pub mod extremal;
pub mod geometry;
pub mod greedy;
pub mod guarantees;
pub mod harness;
pub mod numerics;
pub mod synth;

pub use error::{Error, Result};
