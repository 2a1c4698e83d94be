//! SplitMix64: the crate's only source of randomness.
//!
//! State update and output, for reimplementation in other languages:
//!
//! ```text
//! state = state + 0x9E3779B97F4A7C15           (mod 2^64)
//! z = state
//! z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9     (mod 2^64)
//! z = (z ^ (z >> 27)) * 0x94D049BB133111EB     (mod 2^64)
//! output z ^ (z >> 31)
//! ```
//!
//! Uniform doubles take the top 53 bits: `(x >> 11) * 2^-53`, so they lie in
//! `[0, 1)`. Independent streams for trial `i` of a run seeded with `s` start
//! from the state `mix(s ^ mix(i + 0x632BE59BD9B4E019))` (see [`SplitMix64::substream`]),
//! which keeps every trial reproducible regardless of execution order.

const GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Counter-based 64-bit generator; the state is a Weyl sequence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    /// Generator for the `index`-th independent stream derived from `seed`.
    pub fn substream(seed: u64, index: u64) -> Self {
        Self::new(mix(seed ^ mix(index.wrapping_add(0x632B_E59B_D9B4_E019))))
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GAMMA);
        mix(self.state)
    }

    /// Uniform on `[0, 1)`.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform integer in `[0, bound)` by rejection; `bound` must be positive.
    pub fn next_below(&mut self, bound: u64) -> u64 {
        assert!(bound > 0, "bound must be positive");
        let zone = u64::MAX - u64::MAX % bound;
        loop {
            let x = self.next_u64();
            if x < zone {
                return x % bound;
            }
        }
    }

    /// Bernoulli draw with success probability `p`.
    pub fn bernoulli(&mut self, p: f64) -> bool {
        self.next_f64() < p
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_outputs_seed_zero() {
        // Published SplitMix64 outputs for seed 0.
        let mut r = SplitMix64::new(0);
        assert_eq!(r.next_u64(), 0xE220_A839_7B1D_CDAF);
        assert_eq!(r.next_u64(), 0x6E78_9E6A_A1B9_65F4);
        assert_eq!(r.next_u64(), 0x06C4_5D18_8009_454F);
    }

    #[test]
    fn same_seed_same_stream() {
        let mut a = SplitMix64::new(42);
        let mut b = SplitMix64::new(42);
        for _ in 0..1000 {
            assert_eq!(a.next_u64(), b.next_u64());
        }
    }

    #[test]
    fn substreams_differ() {
        let mut a = SplitMix64::substream(7, 0);
        let mut b = SplitMix64::substream(7, 1);
        let mut c = SplitMix64::substream(8, 0);
        let (x, y, z) = (a.next_u64(), b.next_u64(), c.next_u64());
        assert_ne!(x, y);
        assert_ne!(x, z);
    }

    #[test]
    fn f64_in_unit_interval_with_correct_mean() {
        let mut r = SplitMix64::new(3);
        let n = 100_000;
        let mut sum = 0.0;
        for _ in 0..n {
            let u = r.next_f64();
            assert!((0.0..1.0).contains(&u));
            sum += u;
        }
        // sd of the mean is 1/sqrt(12 n) ~ 9e-4
        assert!((sum / n as f64 - 0.5).abs() < 5e-3);
    }

    #[test]
    fn next_below_covers_range() {
        let mut r = SplitMix64::new(11);
        let mut seen = [0usize; 5];
        for _ in 0..5000 {
            seen[r.next_below(5) as usize] += 1;
        }
        assert!(seen.iter().all(|&c| c > 850 && c < 1150));
    }
}
