//! Fixtures shared by the pipeline benchmarks.

use ciftem::experiment::{BiasMode, Prepared, TrialConfig};

/// 80 Hz signal encoded with `b = α·c`, `α = 6`.
pub fn fixture(seed: u64) -> Prepared {
    let cfg = TrialConfig { bias: BiasMode::Alpha(6.0), seed, ..TrialConfig::default() };
    Prepared::new(&cfg).expect("benchmark fixture encodes")
}
