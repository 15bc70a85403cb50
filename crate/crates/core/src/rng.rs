//! Counter-based random streams.
//!
//! Every random quantity is a pure function of a key such as
//! `(seed, stream, edge coordinates)`. Nothing is carried between calls, so
//! results do not depend on query order or on how work is split across
//! threads.

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;
const TWO_POW_M53: f64 = 1.0 / (1u64 << 53) as f64;

/// SplitMix64 finaliser.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Absorbs a sequence of words into a 64-bit digest.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct KeyedHash {
    state: u64,
}

impl KeyedHash {
    #[inline]
    pub fn new(seed: u64) -> Self {
        Self {
            state: mix64(seed ^ GOLDEN),
        }
    }

    #[inline]
    pub fn absorb(self, word: u64) -> Self {
        Self {
            state: mix64(self.state.wrapping_add(GOLDEN) ^ mix64(word.wrapping_add(0x632B_E59B_D9B4_E019))),
        }
    }

    #[inline]
    pub fn absorb_i64(self, word: i64) -> Self {
        self.absorb(word as u64)
    }

    #[inline]
    pub fn finish(self) -> u64 {
        mix64(self.state ^ (self.state >> 29))
    }
}

/// Uniform on `[0, 1)` with 53 random bits.
#[inline]
pub fn unit_half_open(bits: u64) -> f64 {
    (bits >> 11) as f64 * TWO_POW_M53
}

/// Uniform on `(0, 1]` with 53 random bits.
#[inline]
pub fn unit_open_closed(bits: u64) -> f64 {
    ((bits >> 11) + 1) as f64 * TWO_POW_M53
}

/// Derives the seed of replicate `index` from a base seed.
pub fn derive_seed(base: u64, index: u64) -> u64 {
    KeyedHash::new(base).absorb(0x5EED).absorb(index).finish()
}

/// A sequential stream over a fixed key: draw `n` is `hash(key, n)`.
#[derive(Clone, Debug)]
pub struct CounterStream {
    key: KeyedHash,
    counter: u64,
}

impl CounterStream {
    pub fn new(seed: u64, label: u64) -> Self {
        Self {
            key: KeyedHash::new(seed).absorb(label),
            counter: 0,
        }
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        let out = self.key.absorb(self.counter).finish();
        self.counter += 1;
        out
    }

    /// Uniform on `[0, 1)`.
    #[inline]
    pub fn next_unit(&mut self) -> f64 {
        unit_half_open(self.next_u64())
    }

    /// Bernoulli draw with success probability `p`.
    #[inline]
    pub fn bernoulli(&mut self, p: f64) -> bool {
        self.next_unit() < p
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stream_is_reproducible() {
        let mut a = CounterStream::new(7, 3);
        let mut b = CounterStream::new(7, 3);
        for _ in 0..100 {
            assert_eq!(a.next_u64(), b.next_u64());
        }
        let mut c = CounterStream::new(7, 4);
        assert_ne!(CounterStream::new(7, 3).next_u64(), c.next_u64());
    }

    #[test]
    fn unit_ranges() {
        assert_eq!(unit_half_open(0), 0.0);
        assert!(unit_half_open(u64::MAX) < 1.0);
        assert!(unit_open_closed(0) > 0.0);
        assert_eq!(unit_open_closed(u64::MAX), 1.0);
    }

    #[test]
    fn bits_are_balanced() {
        let mut s = CounterStream::new(11, 0);
        let n = 20_000;
        let mut ones = [0u32; 64];
        for _ in 0..n {
            let x = s.next_u64();
            for (b, count) in ones.iter_mut().enumerate() {
                *count += ((x >> b) & 1) as u32;
            }
        }
        // 5 standard deviations of a Binomial(n, 1/2).
        let sd = (n as f64 * 0.25).sqrt();
        for &c in &ones {
            assert!((c as f64 - n as f64 / 2.0).abs() < 5.0 * sd);
        }
    }
}
