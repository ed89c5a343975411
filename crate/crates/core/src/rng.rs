//! Labeled, reproducible random streams.
//!
//! A stream is identified by `(seed, label)`. The ChaCha key is the SHA-256
//! digest of both, so distinct labels give independent streams and the same
//! pair always replays the same draws. Sub-streams are derived by extending
//! the label, which lets parallel work pull index-addressed noise blocks whose
//! contents do not depend on scheduling.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

#[derive(Debug, Clone)]
pub struct RngStream {
    seed: u64,
    label: String,
    rng: ChaCha8Rng,
}

pub fn rng_stream(seed: u64, label: &str) -> RngStream {
    RngStream::new(seed, label)
}

impl RngStream {
    pub fn new(seed: u64, label: &str) -> Self {
        let mut hasher = Sha256::new();
        hasher.update(seed.to_le_bytes());
        hasher.update((label.len() as u64).to_le_bytes());
        hasher.update(label.as_bytes());
        let digest = hasher.finalize();
        let mut key = [0u8; 32];
        key.copy_from_slice(&digest[..32]);
        Self {
            seed,
            label: label.to_string(),
            rng: ChaCha8Rng::from_seed(key),
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Independent stream named `label/sub`; does not advance `self`.
    pub fn child(&self, sub: &str) -> RngStream {
        RngStream::new(self.seed, &format!("{}/{}", self.label, sub))
    }

    /// Independent stream for block `index`; does not advance `self`.
    pub fn indexed(&self, index: u64) -> RngStream {
        RngStream::new(self.seed, &format!("{}#{}", self.label, index))
    }
}

impl RngCore for RngStream {
    fn next_u32(&mut self) -> u32 {
        self.rng.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.rng.fill_bytes(dst)
    }
}
