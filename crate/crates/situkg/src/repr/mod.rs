//! Embedding stores, anchor selection and relative representations.

mod anchors;
mod relative;
mod store;

pub use anchors::{select_anchors, AnchorSet};
pub use relative::{cosine, relativize};
pub use store::{EmbeddingStore, Family, Provenance};
