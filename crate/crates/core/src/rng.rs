//! Deterministic randomness for the whole crate.
//!
//! Everything that consumes randomness is driven by [`SplitMix64`], seeded
//! through [`derive_seed`]. The generator is counter-based: output `k` of the
//! stream seeded with `s` is `mix(s + (k+1)*GAMMA)`, so any position in a
//! stream can be computed in O(1) without generating its predecessors. Graph
//! sampling relies on this for random access to individual vertex pairs.
//!
//! No platform-dependent state is involved anywhere: identical seeds give
//! bit-identical streams on every architecture.

/// Weyl-sequence increment of SplitMix64.
pub const GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 finalizer (Stafford variant 13 mixer).
#[inline]
pub fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Output `k` (0-based) of the SplitMix64 stream seeded with `seed`.
#[inline]
pub fn stream_at(seed: u64, k: u64) -> u64 {
    mix(seed.wrapping_add(k.wrapping_add(1).wrapping_mul(GAMMA)))
}

/// Sequential SplitMix64 generator.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GAMMA);
        mix(self.state)
    }

    /// Uniform value in `0..bound` via 128-bit multiply (Lemire reduction
    /// without the rejection step; bias is < 2^-64 per draw and identical on
    /// every platform).
    #[inline]
    pub fn below(&mut self, bound: u64) -> u64 {
        debug_assert!(bound > 0);
        ((self.next_u64() as u128 * bound as u128) >> 64) as u64
    }

    /// Uniform f64 in [0,1) with 53 random bits.
    #[inline]
    pub fn unit_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// `k` distinct values from `0..n`, ascending. Partial Fisher-Yates over
    /// a lazily materialized index map.
    pub fn distinct_sorted(&mut self, n: u64, k: usize) -> Vec<u64> {
        assert!(
            (k as u64) <= n,
            "cannot draw {k} distinct values from 0..{n}"
        );
        use std::collections::HashMap;
        let mut swap: HashMap<u64, u64> = HashMap::new();
        let mut out = Vec::with_capacity(k);
        for i in 0..k as u64 {
            let j = i + self.below(n - i);
            let vi = *swap.get(&i).unwrap_or(&i);
            let vj = *swap.get(&j).unwrap_or(&j);
            swap.insert(j, vi);
            out.push(vj);
        }
        out.sort_unstable();
        out
    }

    /// Shuffle a slice in place (Fisher-Yates).
    pub fn shuffle<T>(&mut self, xs: &mut [T]) {
        for i in (1..xs.len()).rev() {
            let j = self.below(i as u64 + 1) as usize;
            xs.swap(i, j);
        }
    }
}

/// Derive a component seed from a base seed, a component tag and an index.
///
/// The derivation is `mix(mix(base ^ fnv1a(tag)) + (index+1)*GAMMA)`. Every
/// subsystem that needs its own stream (spy strategy randomness, per-trial
/// property sampling, per-cell sweep seeds) goes through this function, so a
/// single `--seed` pins the entire run.
pub fn derive_seed(base: u64, tag: &str, index: u64) -> u64 {
    mix(mix(base ^ fnv1a(tag.as_bytes())).wrapping_add(index.wrapping_add(1).wrapping_mul(GAMMA)))
}

fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xCBF2_9CE4_8422_2325;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01B3);
    }
    h
}
