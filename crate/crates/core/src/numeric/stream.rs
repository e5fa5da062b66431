use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Stride of the stream-id block reserved per simulation replicate:
/// replicate `r`, knockoff draw `b` maps to `stream_id = r * REPLICATE_STRIDE + b`.
pub const REPLICATE_STRIDE: u64 = 1 << 20;

/// A deterministic random stream: a master seed plus a substream selector.
///
/// Backed by ChaCha8, whose 64-bit stream counter provides 2^64 independent
/// substreams per seed. Identical `(seed, stream_id)` pairs reproduce the
/// same draw sequence on every run and under any thread schedule, so parallel
/// work is made reproducible by assigning disjoint stream ids up front.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct SeededStream {
    pub seed: u64,
    pub stream_id: u64,
}

impl SeededStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        SeededStream { seed, stream_id }
    }

    /// A generator positioned at the start of this stream.
    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream_id);
        rng
    }

    /// The sibling stream `stream_id + offset` under the same seed.
    pub fn offset(&self, offset: u64) -> SeededStream {
        SeededStream {
            seed: self.seed,
            stream_id: self.stream_id.wrapping_add(offset),
        }
    }

    /// Derive an independent child stream family keyed by `tag`.
    ///
    /// Children get a fresh seed hashed from `(seed, stream_id, tag)` with
    /// their own full stream-id space, so nested operations can branch
    /// without colliding with sibling stream ids.
    pub fn child(&self, tag: u64) -> SeededStream {
        let mut h = splitmix64(self.seed.wrapping_add(0x9e37_79b9_7f4a_7c15));
        h = splitmix64(h ^ self.stream_id);
        h = splitmix64(h ^ tag);
        SeededStream { seed: h, stream_id: 0 }
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn same_stream_same_sequence() {
        let a: Vec<u64> = SeededStream::new(7, 3).rng().random_iter().take(16).collect();
        let b: Vec<u64> = SeededStream::new(7, 3).rng().random_iter().take(16).collect();
        assert_eq!(a, b);
    }

    #[test]
    fn distinct_streams_diverge() {
        let mut a = SeededStream::new(7, 0).rng();
        let mut b = SeededStream::new(7, 1).rng();
        let xs: Vec<u64> = (0..8).map(|_| a.random()).collect();
        let ys: Vec<u64> = (0..8).map(|_| b.random()).collect();
        assert_ne!(xs, ys);
    }

    #[test]
    fn offset_shifts_stream_id() {
        let s = SeededStream::new(1, 10);
        assert_eq!(s.offset(5), SeededStream::new(1, 15));
    }

    #[test]
    fn child_streams_are_deterministic_and_distinct() {
        let s = SeededStream::new(1, 10);
        assert_eq!(s.child(3), s.child(3));
        assert_ne!(s.child(3), s.child(4));
        assert_ne!(s.child(3).seed, s.seed);
        // Children of distinct parents with the same tag differ.
        assert_ne!(SeededStream::new(1, 11).child(3), s.child(3));
    }
}
