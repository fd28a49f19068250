//! Counter-based per-site random numbers.
//!
//! Every uniform is a pure function of `(seed, stream, c1, c2)`, so values
//! do not depend on box shape, iteration order or thread count. The mixer
//! is SplitMix64's finalizer applied to a keyed combination of the inputs.

use crate::lattice::Site;

/// Stream used for bulk weights.
pub const STREAM_BULK: u64 = 0;
/// Stream used for stationary boundary increments on the top row.
pub const STREAM_BOUNDARY_ROW: u64 = 1;
/// Stream used for stationary boundary increments on the right column.
pub const STREAM_BOUNDARY_COL: u64 = 2;

#[inline]
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

const GOLDEN: u64 = 0x9e37_79b9_7f4a_7c15;

/// 64 random bits keyed by `(seed, stream, site)`.
#[inline]
pub fn site_bits(seed: u64, stream: u64, x: Site) -> u64 {
    let mut h = mix64(seed ^ GOLDEN);
    h = mix64(h ^ stream.wrapping_mul(GOLDEN).wrapping_add(0x632b_e59b_d9b4_e019));
    h = mix64(h ^ (x.c1 as u64).wrapping_mul(0xd6e8_feb8_6659_fd93));
    mix64(h ^ (x.c2 as u64).wrapping_mul(0xa076_1d64_78bd_642f).wrapping_add(GOLDEN))
}

/// Uniform on the open interval `(0, 1)`.
#[inline]
pub fn site_uniform(seed: u64, stream: u64, x: Site) -> f64 {
    ((site_bits(seed, stream, x) >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
}

/// Sequential generator for per-seed auxiliary randomness (random measures,
/// random start grids). Deterministic in its seed.
#[derive(Debug, Clone)]
pub struct SplitMix {
    state: u64,
}

impl SplitMix {
    pub fn new(seed: u64) -> Self {
        SplitMix { state: mix64(seed ^ 0x5851_f42d_4c95_7f2d) }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN);
        mix64(self.state)
    }

    /// Uniform on `(0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        ((self.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform integer in `0..n`.
    pub fn below(&mut self, n: u64) -> u64 {
        assert!(n > 0);
        ((self.next_u64() as u128 * n as u128) >> 64) as u64
    }
}
