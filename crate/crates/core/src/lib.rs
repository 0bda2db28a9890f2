//! Packet routing on square, triangular and hexagonal grids.
//!
//! A store-and-forward simulator with node-local policies, lower/upper bound
//! calculators, adversarial instance generators, grid embeddings and
//! edge-coloring schedules.

pub mod algorithms;
pub mod analysis;
pub mod batch;
pub mod coloring;
pub mod embeddings;
pub mod engine;
pub mod error;
pub mod experiment;
pub mod grid;
pub mod instances;

pub use error::{Error, Result};
