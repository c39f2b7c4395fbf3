//! Stage-scoped seed derivation.
//!
//! One global seed drives the whole pipeline; each stochastic stage hashes
//! its name into it so that stages draw from independent streams while the
//! run as a whole stays reproducible from a single number.

use sha2::{Digest, Sha256};

pub fn derive_seed(global: u64, stage: &str) -> u64 {
    let mut hasher = Sha256::new();
    hasher.update(stage.as_bytes());
    hasher.update(global.to_le_bytes());
    let digest = hasher.finalize();
    u64::from_le_bytes(digest[..8].try_into().expect("sha256 yields 32 bytes"))
}
