//! Deterministic 64-bit pseudo-random numbers.
//!
//! The generator is SplitMix64 (Steele, Lea and Flood, 2014): the state
//! advances by the constant `0x9E3779B97F4A7C15` and each output is the
//! state passed through [`mix64`]. Bounded integers use Lemire's
//! multiply-shift method with rejection, so they are exactly uniform. All
//! arithmetic is wrapping `u64`, which makes every stream identical across
//! platforms.

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 finalizer (variant 13 of Stafford's mixers).
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed for one cross-validation fit, derived from the split seed and the
/// (split, combo, fold) task indices. Independent of scheduling order.
pub fn task_seed(split_seed: u64, split: usize, combo: usize, fold: usize) -> u64 {
    let mut h = mix64(split_seed ^ GOLDEN_GAMMA);
    for idx in [split, combo, fold] {
        h = mix64(h ^ (idx as u64).wrapping_mul(GOLDEN_GAMMA));
    }
    h
}

#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN_GAMMA);
        mix64(self.state)
    }

    /// Uniform integer in `0..bound`. Panics if `bound == 0`.
    pub fn below(&mut self, bound: u64) -> u64 {
        assert!(bound > 0, "bound must be positive");
        let mut m = u128::from(self.next_u64()) * u128::from(bound);
        let mut low = m as u64;
        if low < bound {
            let threshold = bound.wrapping_neg() % bound;
            while low < threshold {
                m = u128::from(self.next_u64()) * u128::from(bound);
                low = m as u64;
            }
        }
        (m >> 64) as u64
    }

    /// Uniform index in `0..len`.
    pub fn index(&mut self, len: usize) -> usize {
        self.below(len as u64) as usize
    }

    /// In-place Fisher-Yates shuffle, walking from the last position down.
    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        for i in (1..items.len()).rev() {
            let j = self.index(i + 1);
            items.swap(i, j);
        }
    }
}
