//! Shared inputs for the benchmarks.

use entrosig_core::pipeline::{generate_white_noise, NoiseSpec};
use entrosig_core::SignalBuffer;

pub const SAMPLE_RATE: u32 = 48_000;

/// `samples` of white noise at the benchmark reference level.
pub fn noise(samples: usize) -> SignalBuffer {
    generate_white_noise(
        &NoiseSpec::new(2000.0, 1).expect("valid noise"),
        samples,
        SAMPLE_RATE,
    )
    .expect("noise renders")
}
