//! Information criteria over sliding windows of a sampled signal.
//!
//! The crate turns frames of a real signal into discrete probability
//! distributions (amplitude histogram `p^t`, normalized magnitudes `p^0`,
//! grouped magnitudes `p^1` and periodogram `p^s`), evaluates entropic
//! criteria on them, and thresholds the resulting per-frame tracks to flag
//! the appearance of a useful signal inside additive white noise.
//!
//! | Module | Contents |
//! |--------|----------|
//! | [`distributions`] | framing, `p^t`, `p^0`, `p^1`/`p^t` grouping, `p^s` |
//! | [`criteria`] | entropy, KL, JSD, SID, LH, disequilibrium, complexities, Gaussian closed forms |
//! | [`variation`] | entropy-variation decomposition and its numerical checks |
//! | [`multidim`] | product-distribution entropy, disequilibrium and complexity |
//! | [`pipeline`] | noise, synthesis, mixing, criterion tracks, detection, sweeps |
//!
//! ```
//! use entrosig_core::{criteria, DiscreteDistribution};
//!
//! let p = DiscreteDistribution::new(vec![0.75, 0.25]).unwrap();
//! let u = DiscreteDistribution::uniform(2);
//! assert!((criteria::d_sq(&p) - 0.125).abs() < 1e-15);
//! assert!((criteria::disequilibrium(&p, &u).unwrap() - 0.125).abs() < 1e-15);
//! ```

pub mod criteria;
pub mod distributions;
mod error;
pub mod multidim;
pub mod pipeline;
pub mod variation;

pub use criteria::{EntropyScale, GaussianParams, SupportPolicy};
pub use distributions::{
    AmplitudeTransform, DiscreteDistribution, Frame, HistogramConfig, Sidedness, SignalBuffer,
    SpectralAnalyzer, SpectralConfig, TailPolicy, WindowFunction,
};
pub use error::{Error, Result};
pub use multidim::ProductDistribution2D;
pub use pipeline::{
    AnalysisConfig, Calibration, Criterion, CriterionTrack, DetectionReport, Event, NoiseSpec,
    Polarity, SynthKind, SynthSpec, ThresholdPolicy,
};
