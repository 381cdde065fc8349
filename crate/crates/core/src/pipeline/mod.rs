//! Windowed detection: frame the signal, build distributions, evaluate
//! criteria per frame, threshold the resulting tracks.
//!
//! Frames with no mass to normalize (digital silence) have no `p^0` or `p^s`.
//! They are evaluated as if the distribution were uniform: no structure, so
//! entropies read 1 and divergences, disequilibria and complexities read 0.
//! A constant frame's `p^t` is the delta in the first level (entropy 0).

mod detect;
mod signal;
mod sweep;

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::criteria::{self, EntropyScale, GaussianParams, SupportPolicy};
use crate::distributions::{
    dist_time_grouped, dist_time_histogram, dist_time_samples, frame_signal, Frame,
    HistogramConfig, SpectralAnalyzer, SpectralConfig, TailPolicy,
};
use crate::{DiscreteDistribution, Error, Result, SignalBuffer};

pub use detect::{
    detect, Calibration, DetectionReport, Event, ThresholdPolicy, MIN_CALIBRATION_FRAMES,
};
pub use signal::{
    generate_white_noise, mix, synthesize, tone_amplitude_for_snr, Mixture, NoiseSpec, SynthKind,
    SynthSpec,
};
pub use sweep::{
    event_covers_burst, frame_truth, separation_margin, sweep, Benchmark, BenchmarkRun, FrameTruth,
    SweepRow, BENCHMARK_AMPLITUDE, PRESET_SIGMAS, REFERENCE_SIGMA,
};

/// Whether a criterion moves up or down when a signal appears in white noise.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Polarity {
    RisesOnSignal,
    FallsOnSignal,
}

/// The fixed registry of per-frame criteria.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Criterion {
    /// Normalized entropy of the amplitude histogram `p^t`.
    TimeHistEntropy,
    /// Normalized entropy of the sample distribution `p^0`.
    TimeSampleEntropy,
    /// Normalized entropy of the grouped distribution `p^1`.
    TimeGroupedEntropy,
    /// Normalized spectral entropy of `p^s`.
    SpectralEntropy,
    /// SID between `p^s` and the uniform (white) spectrum.
    Sid,
    /// JSD between `p^s` and the uniform spectrum.
    Jsd,
    /// `D_SQ` of `p^s`.
    DSq,
    /// `C_SQ` of `p^s`.
    CSq,
    /// `C_JSD` of `p^s`.
    CJsd,
    /// `H (H_max - H)` of `p^s`, in bits squared.
    CGeneral,
    /// Gaussian `LH` of the frame against the calibrated noise, equal means.
    Lh,
}

impl Criterion {
    pub const ALL: [Criterion; 11] = [
        Criterion::TimeHistEntropy,
        Criterion::TimeSampleEntropy,
        Criterion::TimeGroupedEntropy,
        Criterion::SpectralEntropy,
        Criterion::Sid,
        Criterion::Jsd,
        Criterion::DSq,
        Criterion::CSq,
        Criterion::CJsd,
        Criterion::CGeneral,
        Criterion::Lh,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Criterion::TimeHistEntropy => "h_t",
            Criterion::TimeSampleEntropy => "h_0",
            Criterion::TimeGroupedEntropy => "h_1",
            Criterion::SpectralEntropy => "h_s",
            Criterion::Sid => "sid",
            Criterion::Jsd => "jsd",
            Criterion::DSq => "d_sq",
            Criterion::CSq => "c_sq",
            Criterion::CJsd => "c_jsd",
            Criterion::CGeneral => "c_gen",
            Criterion::Lh => "lh",
        }
    }

    pub fn polarity(self) -> Polarity {
        match self {
            Criterion::TimeSampleEntropy | Criterion::SpectralEntropy => Polarity::FallsOnSignal,
            _ => Polarity::RisesOnSignal,
        }
    }

    fn needs_spectrum(self) -> bool {
        matches!(
            self,
            Criterion::SpectralEntropy
                | Criterion::Sid
                | Criterion::Jsd
                | Criterion::DSq
                | Criterion::CSq
                | Criterion::CJsd
                | Criterion::CGeneral
        )
    }
}

impl fmt::Display for Criterion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Criterion {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Criterion::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| {
                let known: Vec<&str> = Criterion::ALL.iter().map(|c| c.name()).collect();
                Error::InvalidParameter(format!(
                    "unknown criterion '{s}' (known: {})",
                    known.join(", ")
                ))
            })
    }
}

/// Everything `run_criteria` needs besides the signal.
#[derive(Debug, Clone, PartialEq)]
pub struct AnalysisConfig {
    pub window: usize,
    pub hop: usize,
    pub tail: TailPolicy,
    pub histogram: HistogramConfig,
    pub spectral: SpectralConfig,
    /// Zero handling for SID against the uniform spectrum.
    pub support: SupportPolicy,
    pub complexity_scale: EntropyScale,
    /// Noise reference for [`Criterion::Lh`].
    pub noise_reference: Option<GaussianParams>,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        Self::with_window(2048)
    }
}

impl AnalysisConfig {
    /// Non-overlapping frames of `window` samples with `n_fft = window`.
    pub fn with_window(window: usize) -> Self {
        Self {
            window,
            hop: window,
            tail: TailPolicy::Drop,
            histogram: HistogramConfig::default(),
            spectral: SpectralConfig::with_n_fft(window),
            support: SupportPolicy::EpsilonFloor,
            complexity_scale: EntropyScale::Normalized,
            noise_reference: None,
        }
    }
}

/// One criterion evaluated on every frame.
#[derive(Debug, Clone, PartialEq)]
pub struct CriterionTrack {
    pub criterion: Criterion,
    pub values: Vec<f64>,
    /// Start time of each frame in seconds.
    pub frame_times: Vec<f64>,
    /// Frame length in seconds; each value holds over `[t, t + frame_duration)`.
    pub frame_duration: f64,
    pub polarity: Polarity,
    pub normalized: bool,
}

impl CriterionTrack {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn frame_end(&self, i: usize) -> f64 {
        self.frame_times[i] + self.frame_duration
    }
}

/// Lazily built distributions of one frame.
struct FrameDists<'a> {
    frame: &'a Frame,
    cfg: &'a AnalysisConfig,
    spectral: &'a SpectralAnalyzer,
    p0: Option<DiscreteDistribution>,
    ps: Option<DiscreteDistribution>,
}

impl<'a> FrameDists<'a> {
    fn p0(&mut self) -> Result<&DiscreteDistribution> {
        if self.p0.is_none() {
            let p0 = match dist_time_samples(self.frame, self.cfg.histogram.amplitude_transform) {
                Err(Error::Degenerate(_)) => DiscreteDistribution::uniform(self.frame.len()),
                other => other?,
            };
            self.p0 = Some(p0);
        }
        Ok(self.p0.as_ref().expect("set above"))
    }

    fn ps(&mut self) -> Result<&DiscreteDistribution> {
        if self.ps.is_none() {
            let ps = match self.spectral.distribution(&self.frame.samples) {
                Err(Error::Degenerate(_)) => {
                    DiscreteDistribution::uniform(self.spectral.config().bins())
                }
                other => other?,
            };
            self.ps = Some(ps);
        }
        Ok(self.ps.as_ref().expect("set above"))
    }

    fn evaluate(&mut self, criterion: Criterion) -> Result<f64> {
        let scale = self.cfg.complexity_scale;
        Ok(match criterion {
            Criterion::TimeHistEntropy => criteria::normalized_entropy(&dist_time_histogram(
                self.frame,
                &self.cfg.histogram,
            )?)?,
            Criterion::TimeSampleEntropy => criteria::normalized_entropy(self.p0()?)?,
            Criterion::TimeGroupedEntropy => {
                let n = self.cfg.histogram.n_levels;
                let (p1, _) = dist_time_grouped(self.p0()?, n)?;
                criteria::normalized_entropy(&p1)?
            }
            Criterion::SpectralEntropy => criteria::normalized_entropy(self.ps()?)?,
            Criterion::Sid => {
                let policy = self.cfg.support;
                let ps = self.ps()?;
                criteria::sid_with(ps, &DiscreteDistribution::uniform(ps.size()), policy)?
            }
            Criterion::Jsd => criteria::d_jsd(self.ps()?),
            Criterion::DSq => criteria::d_sq(self.ps()?),
            Criterion::CSq => criteria::c_sq(self.ps()?, scale),
            Criterion::CJsd => criteria::c_jsd(self.ps()?, scale),
            Criterion::CGeneral => criteria::c_general(self.ps()?),
            Criterion::Lh => {
                let reference = self.cfg.noise_reference.ok_or_else(|| {
                    Error::InvalidParameter("the lh criterion needs a noise reference".into())
                })?;
                frame_lh(&self.frame.samples, &reference)
            }
        })
    }
}

/// Gaussian LH of a frame's spread against `reference`, with the frame mean
/// taken equal to the reference mean.
fn frame_lh(samples: &[f64], reference: &GaussianParams) -> f64 {
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    let sd = (samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n).sqrt();
    match GaussianParams::new(reference.mu(), sd) {
        Ok(frame) => criteria::gaussian_lh(&frame, reference),
        // Silent frame: sigma_p = 0.
        Err(_) => -0.5,
    }
}

/// Evaluates every requested criterion on every frame of `buf`.
///
/// Distributions are built once per frame and shared by the criteria that
/// need them. Frames are processed in parallel; output order follows frame
/// order and does not depend on scheduling.
pub fn run_criteria(
    buf: &SignalBuffer,
    criteria: &[Criterion],
    cfg: &AnalysisConfig,
) -> Result<Vec<CriterionTrack>> {
    if cfg.spectral.n_fft < cfg.window && criteria.iter().any(|c| c.needs_spectrum()) {
        return Err(Error::InvalidParameter(format!(
            "n_fft = {} is shorter than the window of {} samples",
            cfg.spectral.n_fft, cfg.window
        )));
    }
    if criteria.contains(&Criterion::Lh) && cfg.noise_reference.is_none() {
        return Err(Error::InvalidParameter(
            "the lh criterion needs a noise reference".into(),
        ));
    }
    let frames = frame_signal(buf, cfg.window, cfg.hop, cfg.tail)?;
    let spectral = SpectralAnalyzer::new(cfg.spectral)?;
    let per_frame: Vec<Vec<f64>> = frames
        .par_iter()
        .map(|frame| {
            let mut dists = FrameDists {
                frame,
                cfg,
                spectral: &spectral,
                p0: None,
                ps: None,
            };
            criteria
                .iter()
                .map(|&c| dists.evaluate(c))
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<_>>()?;
    let frame_times: Vec<f64> = frames.iter().map(|f| f.start_time).collect();
    let frame_duration = cfg.window as f64 / f64::from(buf.sample_rate());
    Ok(criteria
        .iter()
        .enumerate()
        .map(|(k, &criterion)| CriterionTrack {
            criterion,
            values: per_frame.iter().map(|row| row[k]).collect(),
            frame_times: frame_times.clone(),
            frame_duration,
            polarity: criterion.polarity(),
            normalized: false,
        })
        .collect())
}

/// Min-max scales a track to `[0, 1]`; a constant track maps to zeros.
pub fn normalize_track(track: &CriterionTrack) -> CriterionTrack {
    let (lo, hi) = track
        .values
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
            (lo.min(v), hi.max(v))
        });
    let range = hi - lo;
    let values = if range > 0.0 && range.is_finite() {
        track.values.iter().map(|v| (v - lo) / range).collect()
    } else {
        vec![0.0; track.values.len()]
    };
    CriterionTrack {
        values,
        normalized: true,
        ..track.clone()
    }
}

/// Sample mean and standard deviation of a noise-only stretch.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseEstimate {
    pub mean: f64,
    pub std: f64,
    pub samples: usize,
}

impl NoiseEstimate {
    /// True when the region had no spread (silence or a constant).
    pub fn is_degenerate(&self) -> bool {
        self.std == 0.0
    }

    pub fn params(&self) -> Result<GaussianParams> {
        GaussianParams::new(self.mean, self.std)
    }

    /// Like [`NoiseEstimate::params`] but with `std` raised to at least `floor`.
    pub fn params_floored(&self, floor: f64) -> Result<GaussianParams> {
        GaussianParams::new(self.mean, self.std.max(floor))
    }
}

/// Estimates the noise level from `buf[region]`.
pub fn estimate_noise_sigma(
    buf: &SignalBuffer,
    region: std::ops::Range<usize>,
) -> Result<NoiseEstimate> {
    if region.start >= region.end || region.end > buf.len() {
        return Err(Error::InvalidParameter(format!(
            "calibration region {region:?} is empty or outside a buffer of {} samples",
            buf.len()
        )));
    }
    let xs = &buf.samples()[region];
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = if xs.len() > 1 {
        xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)
    } else {
        0.0
    };
    Ok(NoiseEstimate {
        mean,
        std: var.sqrt(),
        samples: xs.len(),
    })
}

/// Floor applied by [`leading_noise_reference`] when the span is silent.
pub const NOISE_SIGMA_FLOOR: f64 = 1e-9;

/// Noise reference for the LH criterion from the first `secs` seconds of
/// `buf`, with the spread floored at [`NOISE_SIGMA_FLOOR`].
pub fn leading_noise_reference(buf: &SignalBuffer, secs: f64) -> Result<GaussianParams> {
    let end = buf.index_at(secs).clamp(1, buf.len().max(1));
    estimate_noise_sigma(buf, 0..end)?.params_floored(NOISE_SIGMA_FLOOR)
}
