//! Deterministic pseudo-randomness.
//!
//! Every random choice in this crate (measurement row selection, sign
//! scrambling, noise draws, synthetic phantoms) goes through [`SplitMix64`].
//! The generator is fixed by contract: two runs seeded identically must
//! produce bit-identical operators and noise vectors, including across
//! machines, so we do not delegate to an external RNG crate whose stream
//! could change between versions.

/// SplitMix64 generator (Steele, Lea, Flood; the `java.util.SplittableRandom`
/// mixer). State advances by the golden-ratio increment and each output is
/// finalised with two xor-multiply rounds.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    /// Seeds the generator. The seed is the initial state verbatim.
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform f64 in [0, 1), 53 mantissa bits.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform f64 in (0, 1]; safe as a logarithm argument.
    pub fn next_f64_open(&mut self) -> f64 {
        ((self.next_u64() >> 11) + 1) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform integer in [0, bound) via the widening-multiply reduction.
    /// The reduction is biased by at most 2^-64 per draw, which is irrelevant
    /// here; what matters is that it is branch-free and reproducible.
    pub fn next_below(&mut self, bound: u64) -> u64 {
        debug_assert!(bound > 0);
        ((self.next_u64() as u128 * bound as u128) >> 64) as u64
    }

    /// Random sign, +1.0 or -1.0, from the top output bit.
    pub fn next_sign(&mut self) -> f64 {
        if self.next_u64() >> 63 == 0 {
            1.0
        } else {
            -1.0
        }
    }

    /// Standard normal deviate via Box-Muller. Draws two uniforms per call
    /// and discards the sine branch, keeping the stream position a simple
    /// function of the number of calls.
    pub fn next_gaussian(&mut self) -> f64 {
        let u1 = self.next_f64_open();
        let u2 = self.next_f64();
        (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
    }
}

/// In-place Fisher-Yates shuffle, iterating from the last index down.
pub fn shuffle<T>(items: &mut [T], rng: &mut SplitMix64) {
    for i in (1..items.len()).rev() {
        let j = rng.next_below(i as u64 + 1) as usize;
        items.swap(i, j);
    }
}

/// First `k` elements of a Fisher-Yates shuffle of `0..n`: `k` distinct
/// indices in shuffle order.
pub fn sample_distinct(n: usize, k: usize, rng: &mut SplitMix64) -> Vec<usize> {
    debug_assert!(k <= n);
    let mut perm: Vec<usize> = (0..n).collect();
    shuffle(&mut perm, rng);
    perm.truncate(k);
    perm
}
