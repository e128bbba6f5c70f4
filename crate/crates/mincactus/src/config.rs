//! Pipeline configuration and deterministic seed derivation.

/// Knobs for the randomized parts of the construction. Everything is
/// deterministic given `seed`.
#[derive(Debug, Clone)]
pub struct Config {
    /// Master PRNG seed.
    pub seed: u64,
    /// Sampling repetitions per rate are `ceil(repetition_c * ln n)`.
    pub repetition_c: f64,
    /// Recompute every candidate split's cut value against lambda before
    /// use, turning silent sampling failures into hard errors.
    pub defensive_verify: bool,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            seed: 0,
            repetition_c: 48.0,
            defensive_verify: true,
        }
    }
}

impl Config {
    pub fn with_seed(seed: u64) -> Self {
        Config {
            seed,
            ..Config::default()
        }
    }

    /// Repetition count for a structure with `n` vertices.
    pub fn repetitions(&self, n: usize) -> usize {
        let n = n.max(2) as f64;
        (self.repetition_c * n.ln()).ceil() as usize
    }
}

/// splitmix64-style mixing, stable across platforms. Streams for sampling
/// rounds and subproblems are derived from (seed, a, b) tuples so that runs
/// are reproducible and subproblems independent.
pub fn derive_seed(base: u64, a: u64, b: u64) -> u64 {
    let mut z = base
        .wrapping_add(0x9e3779b97f4a7c15)
        .wrapping_add(a.wrapping_mul(0xbf58476d1ce4e5b9))
        .wrapping_add(b.wrapping_mul(0x94d049bb133111eb));
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}
