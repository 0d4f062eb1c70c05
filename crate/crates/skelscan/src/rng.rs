//! Deterministic random streams.
//!
//! Everything here is specified to the bit so that other implementations can
//! reproduce identical datasets from the same seed:
//!
//! - The raw stream is SplitMix64: state advances by the 64-bit golden-gamma
//!   constant and each output is a finalizing mix of the new state.
//! - Uniform doubles take the top 53 bits of an output word: `(x >> 11) * 2^-53`,
//!   giving values in `[0, 1)`.
//! - Gaussian values use the Marsaglia polar transform on consecutive uniform
//!   pairs; [`gaussian_vec`] draws whole pairs and discards the spare half when
//!   an odd count is requested, so the number of words consumed depends only on
//!   the requested length.

/// SplitMix64 stream.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
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

    /// Uniform double in `[0, 1)`.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform double in `[lo, hi)`.
    pub fn range(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.next_f64()
    }

    /// Uniform integer in `[0, n)` by scaling; fine for test-scale `n`.
    pub fn below(&mut self, n: usize) -> usize {
        ((self.next_f64() * n as f64) as usize).min(n.saturating_sub(1))
    }
}

/// One standard-normal pair via the Marsaglia polar method.
pub fn gaussian_pair(rng: &mut SplitMix64) -> (f64, f64) {
    loop {
        let u = 2.0 * rng.next_f64() - 1.0;
        let v = 2.0 * rng.next_f64() - 1.0;
        let s = u * u + v * v;
        if s > 0.0 && s < 1.0 {
            let m = (-2.0 * s.ln() / s).sqrt();
            return (u * m, v * m);
        }
    }
}

/// `n` standard-normal values; draws `ceil(n/2)` polar pairs and discards the
/// unused half when `n` is odd.
pub fn gaussian_vec(rng: &mut SplitMix64, n: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let (a, b) = gaussian_pair(rng);
        out.push(a);
        if out.len() < n {
            out.push(b);
        }
    }
    out
}
