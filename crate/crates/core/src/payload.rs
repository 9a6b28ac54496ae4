//! Synthetic intermediate values.

use crate::algebra::GaloisField;
use crate::instance::{IvKey, SystemInstance};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Deterministic pseudo-random IV contents keyed by (seed, IV).
#[derive(Clone, Copy, Debug)]
pub struct PayloadSource {
    pub seed: u64,
    pub mask: u32,
}

impl PayloadSource {
    pub fn new(seed: u64, field: &GaloisField) -> Self {
        PayloadSource { seed, mask: field.mask() }
    }

    /// `len` sub-symbols of v[q,n].
    pub fn payload(&self, key: IvKey, len: usize) -> Vec<u32> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(((key.q as u64) << 32) | key.n as u64);
        (0..len).map(|_| rng.gen::<u32>() & self.mask).collect()
    }
}

/// What a single node can compute locally: the IVs of the files it maps.
pub struct LocalStore<'a> {
    pub node: usize,
    pub inst: &'a SystemInstance,
    pub source: PayloadSource,
}

impl<'a> LocalStore<'a> {
    pub fn new(node: usize, inst: &'a SystemInstance, source: PayloadSource) -> Self {
        LocalStore { node, inst, source }
    }

    pub fn knows(&self, key: IvKey) -> bool {
        self.inst.maps(self.node, key.n)
    }

    pub fn get(&self, key: IvKey, len: usize) -> Option<Vec<u32>> {
        self.knows(key).then(|| self.source.payload(key, len))
    }
}
