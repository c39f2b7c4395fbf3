//! Situated perceptual knowledge graphs for abstract-concept image labeling.
//!
//! The crate covers the full post-detector pipeline: reify detector output
//! into a knowledge graph, strip label leakage, train translational
//! embeddings, re-express vectors relative to class-stratified anchors, fuse
//! them with vision embeddings, classify, and explain predictions through
//! nearest neighbors and shared graph nodes.

pub mod error;
pub mod fusion;
pub mod ingest;
pub mod kg;
pub mod kge;
pub mod repr;
pub mod seed;
pub mod vocab;

pub use error::{Error, Result};
