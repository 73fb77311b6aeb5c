//! Deterministic, platform-independent random number generation.
//!
//! The harnesses use SplitMix64: a 64-bit counter-based generator whose
//! state advances by a fixed odd constant and whose output is a finalizer
//! (bit-mixing) function of the state. Because the output depends only on
//! the counter value, independent substreams are derived by hashing a
//! `(seed, domain, index)` triple into a fresh starting counter. Reports
//! pin the generator name (`splitmix64`) so results reproduce exactly
//! across platforms and parallel schedules.

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 finalizer: avalanching bit mix of a 64-bit word.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Counter-based 64-bit generator (SplitMix64).
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN_GAMMA);
        mix64(self.state)
    }

    /// Uniform f64 in [0, 1) with 53 random bits.
    #[inline]
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform index in `0..n`. Uses rejection to avoid modulo bias.
    pub fn next_index(&mut self, n: usize) -> usize {
        assert!(n > 0, "next_index requires a nonempty range");
        let n = n as u64;
        let zone = u64::MAX - (u64::MAX % n);
        loop {
            let v = self.next_u64();
            if v < zone {
                return (v % n) as usize;
            }
        }
    }

    /// Standard exponential draw via inversion. Strictly positive.
    pub fn next_exp(&mut self) -> f64 {
        // 1 - U is in (0, 1], so the log is finite.
        -(1.0 - self.next_f64()).ln()
    }

    /// Draw an index from a categorical distribution given cumulative
    /// weights (last entry is the total mass).
    pub fn next_categorical(&mut self, cumulative: &[f64]) -> usize {
        let total = *cumulative.last().expect("nonempty cumulative weights");
        let u = self.next_f64() * total;
        // First index whose cumulative weight strictly exceeds u; skips
        // zero-mass outcomes even when u lands exactly on a boundary.
        cumulative
            .partition_point(|&c| c <= u)
            .min(cumulative.len() - 1)
    }
}

/// Derive an independent substream for `(seed, domain, index)`.
///
/// Domains separate the fixed world draws (distribution, prediction
/// table, prior) from per-trial draws; the index enumerates trials.
/// Reordering or parallelizing trials therefore cannot change any
/// per-trial result.
pub fn derive_stream(seed: u64, domain: u64, index: u64) -> SplitMix64 {
    SplitMix64::new(mix64(mix64(mix64(seed) ^ domain) ^ index))
}

/// Stream domains used by the validation harnesses.
pub mod domains {
    pub const DISTRIBUTION: u64 = 0;
    pub const PREDICTIONS: u64 = 1;
    pub const PRIOR: u64 = 2;
    pub const TRIAL_SAMPLE: u64 = 3;
    pub const TRIAL_POSTERIOR: u64 = 4;
}
