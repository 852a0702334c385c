//! Reproducible RNG streams.
//!
//! Every chain replica, SL path or estimator draws from its own ChaCha8
//! stream. The 256-bit stream key is `SHA-256(seed_le || replica_le || label)`,
//! so streams are independent of thread scheduling and identical across
//! platforms.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

pub type StreamRng = ChaCha8Rng;

/// Human-readable description of the stream derivation, echoed in output
/// summaries.
pub const STREAM_DERIVATION: &str =
    "ChaCha8 keyed by SHA-256(seed as u64 LE || replica as u64 LE || label UTF-8)";

pub fn stream(seed: u64, replica: u64, label: &str) -> StreamRng {
    let mut hasher = Sha256::new();
    hasher.update(seed.to_le_bytes());
    hasher.update(replica.to_le_bytes());
    hasher.update(label.as_bytes());
    let digest = hasher.finalize();
    let mut key = [0u8; 32];
    key.copy_from_slice(&digest);
    ChaCha8Rng::from_seed(key)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let a: Vec<u64> = stream(7, 0, "chain").random_iter().take(4).collect();
        let b: Vec<u64> = stream(7, 0, "chain").random_iter().take(4).collect();
        let c: Vec<u64> = stream(7, 1, "chain").random_iter().take(4).collect();
        let d: Vec<u64> = stream(7, 0, "sl").random_iter().take(4).collect();
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert_ne!(a, d);
    }
}
