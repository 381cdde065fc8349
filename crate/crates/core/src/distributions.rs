//! Framing and the four per-frame distributions.
//!
//! * `p^t` ([`dist_time_histogram`]): occupancy of `n` equal-width amplitude
//!   levels spanning `[x_min, x_max]`.
//! * `p^0` ([`dist_time_samples`]): the (transformed) samples themselves,
//!   normalized to unit mass.
//! * `p^1`, `p^t` ([`dist_time_grouped`]): `p^0` grouped into `n` levels of
//!   `[0, max p^0]`; `p^1` is the mass per level, `p^t` the index count.
//! * `p^s` ([`dist_spectral`]): periodogram `|X(f)|^2 / N_fft` normalized to
//!   unit mass.

use std::fmt;
use std::sync::Arc;

use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use crate::{Error, Result};

/// Tolerance on the total mass of a [`DiscreteDistribution`].
pub const NORMALIZATION_TOLERANCE: f64 = 1e-9;

/// Real samples with their sampling rate.
#[derive(Debug, Clone, PartialEq)]
pub struct SignalBuffer {
    samples: Vec<f64>,
    sample_rate: u32,
}

impl SignalBuffer {
    pub fn new(samples: Vec<f64>, sample_rate: u32) -> Result<Self> {
        if sample_rate == 0 {
            return Err(Error::InvalidParameter(
                "sample_rate must be positive".into(),
            ));
        }
        Ok(Self {
            samples,
            sample_rate,
        })
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<f64> {
        self.samples
    }

    pub fn sample_rate(&self) -> u32 {
        self.sample_rate
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn duration_secs(&self) -> f64 {
        self.samples.len() as f64 / f64::from(self.sample_rate)
    }

    /// Sample index nearest to time `t` (seconds), clamped to the buffer.
    pub fn index_at(&self, t: f64) -> usize {
        let idx = (t * f64::from(self.sample_rate)).round();
        (idx.max(0.0) as usize).min(self.samples.len())
    }
}

/// A window of `W` contiguous samples cut from a [`SignalBuffer`].
#[derive(Debug, Clone, PartialEq)]
pub struct Frame {
    pub samples: Vec<f64>,
    pub start_index: usize,
    pub start_time: f64,
}

impl Frame {
    /// A free-standing frame starting at sample 0.
    pub fn from_samples(samples: Vec<f64>) -> Self {
        Self {
            samples,
            start_index: 0,
            start_time: 0.0,
        }
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }
}

/// What happens to trailing samples that do not fill a whole window.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum TailPolicy {
    #[default]
    Drop,
    ZeroPad,
}

/// Cuts `buf` into frames of `window` samples starting every `hop` samples.
pub fn frame_signal(
    buf: &SignalBuffer,
    window: usize,
    hop: usize,
    tail: TailPolicy,
) -> Result<Vec<Frame>> {
    if buf.is_empty() {
        return Err(Error::EmptySignal);
    }
    if window == 0 || hop == 0 {
        return Err(Error::InvalidParameter(
            "window and hop must be at least 1".into(),
        ));
    }
    if window > buf.len() {
        return Err(Error::WindowTooLong {
            window,
            len: buf.len(),
        });
    }
    let rate = f64::from(buf.sample_rate());
    let samples = buf.samples();
    let mut frames = Vec::with_capacity(buf.len() / hop + 1);
    let mut start = 0;
    while start + window <= samples.len() {
        frames.push(Frame {
            samples: samples[start..start + window].to_vec(),
            start_index: start,
            start_time: start as f64 / rate,
        });
        start += hop;
    }
    if tail == TailPolicy::ZeroPad && start < samples.len() {
        let mut padded = samples[start..].to_vec();
        padded.resize(window, 0.0);
        frames.push(Frame {
            samples: padded,
            start_index: start,
            start_time: start as f64 / rate,
        });
    }
    Ok(frames)
}

/// A finite probability vector: non-negative entries summing to one.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteDistribution {
    probs: Vec<f64>,
}

impl DiscreteDistribution {
    /// Validates `probs` as given; no renormalization is applied.
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::InvalidDistribution(
                "distribution must have at least one entry".into(),
            ));
        }
        if let Some((i, &v)) = probs
            .iter()
            .enumerate()
            .find(|(_, v)| !v.is_finite() || **v < 0.0)
        {
            return Err(Error::InvalidDistribution(format!("entry {i} is {v}")));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > NORMALIZATION_TOLERANCE {
            return Err(Error::InvalidDistribution(format!(
                "entries sum to {total}"
            )));
        }
        Ok(Self { probs })
    }

    /// Normalizes non-negative weights to unit mass.
    pub fn from_weights(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::InvalidDistribution(
                "distribution must have at least one entry".into(),
            ));
        }
        if let Some((i, &v)) = weights
            .iter()
            .enumerate()
            .find(|(_, v)| !v.is_finite() || **v < 0.0)
        {
            return Err(Error::InvalidDistribution(format!("weight {i} is {v}")));
        }
        let total: f64 = weights.iter().sum();
        if total <= 0.0 {
            return Err(Error::Degenerate("weights carry no mass"));
        }
        let probs = weights.into_iter().map(|w| w / total).collect();
        Ok(Self { probs })
    }

    pub fn uniform(n: usize) -> Self {
        assert!(n >= 1, "uniform distribution needs at least one state");
        Self {
            probs: vec![1.0 / n as f64; n],
        }
    }

    /// All mass on `index`.
    pub fn delta(n: usize, index: usize) -> Self {
        assert!(index < n, "delta index {index} out of range for {n} states");
        let mut probs = vec![0.0; n];
        probs[index] = 1.0;
        Self { probs }
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn size(&self) -> usize {
        self.probs.len()
    }

    pub fn into_probs(self) -> Vec<f64> {
        self.probs
    }

    pub fn max_prob(&self) -> f64 {
        self.probs.iter().copied().fold(0.0, f64::max)
    }
}

impl AsRef<[f64]> for DiscreteDistribution {
    fn as_ref(&self) -> &[f64] {
        &self.probs
    }
}

/// Map from samples to the non-negative weights behind `p^0`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum AmplitudeTransform {
    #[default]
    Absolute,
    Squared,
    /// `x - min(x)` over the frame.
    RawShifted,
}

impl AmplitudeTransform {
    pub fn apply(self, samples: &[f64]) -> Vec<f64> {
        match self {
            AmplitudeTransform::Absolute => samples.iter().map(|x| x.abs()).collect(),
            AmplitudeTransform::Squared => samples.iter().map(|x| x * x).collect(),
            AmplitudeTransform::RawShifted => {
                let min = samples.iter().copied().fold(f64::INFINITY, f64::min);
                samples.iter().map(|x| x - min).collect()
            }
        }
    }
}

impl fmt::Display for AmplitudeTransform {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AmplitudeTransform::Absolute => "absolute",
            AmplitudeTransform::Squared => "squared",
            AmplitudeTransform::RawShifted => "raw-shifted",
        })
    }
}

impl std::str::FromStr for AmplitudeTransform {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "absolute" | "abs" => Ok(Self::Absolute),
            "squared" | "sq" => Ok(Self::Squared),
            "raw-shifted" | "shifted" => Ok(Self::RawShifted),
            other => Err(Error::InvalidParameter(format!(
                "unknown amplitude transform '{other}'"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HistogramConfig {
    /// Alphabet size `n`.
    pub n_levels: usize,
    pub amplitude_transform: AmplitudeTransform,
}

impl Default for HistogramConfig {
    fn default() -> Self {
        Self {
            n_levels: 64,
            amplitude_transform: AmplitudeTransform::Absolute,
        }
    }
}

fn check_levels(n_levels: usize) -> Result<()> {
    if n_levels < 2 {
        return Err(Error::InvalidParameter(format!(
            "n_levels must be at least 2, got {n_levels}"
        )));
    }
    Ok(())
}

/// Level index of `value` among `n` equal-width levels of `[lo, lo + range]`.
///
/// Interior edges belong to the upper level; the top edge belongs to the last.
fn level_of(value: f64, lo: f64, range: f64, n: usize) -> usize {
    let pos = ((value - lo) * n as f64 / range).floor();
    if pos <= 0.0 {
        0
    } else {
        (pos as usize).min(n - 1)
    }
}

/// Per-level occupancy counts of the frame amplitudes; they sum to the frame length.
pub fn time_histogram_counts(samples: &[f64], n_levels: usize) -> Result<Vec<usize>> {
    check_levels(n_levels)?;
    if samples.is_empty() {
        return Err(Error::EmptySignal);
    }
    let (lo, hi) = samples
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| {
            (lo.min(x), hi.max(x))
        });
    let mut counts = vec![0usize; n_levels];
    let range = hi - lo;
    if range <= 0.0 {
        // Constant frame: everything in the first level.
        counts[0] = samples.len();
        return Ok(counts);
    }
    for &x in samples {
        counts[level_of(x, lo, range, n_levels)] += 1;
    }
    Ok(counts)
}

/// `p^t`: relative population of `n` amplitude levels over `[x_min, x_max]`.
pub fn dist_time_histogram(frame: &Frame, cfg: &HistogramConfig) -> Result<DiscreteDistribution> {
    let counts = time_histogram_counts(&frame.samples, cfg.n_levels)?;
    let total = frame.len() as f64;
    DiscreteDistribution::new(counts.into_iter().map(|c| c as f64 / total).collect())
}

/// `p^0`: transformed samples normalized to unit mass.
pub fn dist_time_samples(
    frame: &Frame,
    transform: AmplitudeTransform,
) -> Result<DiscreteDistribution> {
    if frame.is_empty() {
        return Err(Error::EmptySignal);
    }
    DiscreteDistribution::from_weights(transform.apply(&frame.samples)).map_err(|e| match e {
        Error::Degenerate(_) => Error::Degenerate("frame has zero total amplitude"),
        other => other,
    })
}

/// Groups `p^0` into `n_levels` levels of `[0, max p^0]`.
///
/// Returns `(p^1, p^t)`: the `p^0` mass collected by each level and the
/// fraction of indices falling into it.
pub fn dist_time_grouped(
    p0: &DiscreteDistribution,
    n_levels: usize,
) -> Result<(DiscreteDistribution, DiscreteDistribution)> {
    check_levels(n_levels)?;
    let max = p0.max_prob();
    if max <= 0.0 {
        return Err(Error::Degenerate("p0 has no positive entry"));
    }
    let mut mass = vec![0.0; n_levels];
    let mut counts = vec![0usize; n_levels];
    for &p in p0.probs() {
        let j = level_of(p, 0.0, max, n_levels);
        mass[j] += p;
        counts[j] += 1;
    }
    let n = p0.size() as f64;
    let p1 = DiscreteDistribution::from_weights(mass)?;
    let pt = DiscreteDistribution::new(counts.into_iter().map(|c| c as f64 / n).collect())?;
    Ok((p1, pt))
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum Sidedness {
    /// DC through Nyquist, `n_fft / 2 + 1` bins.
    #[default]
    OneSided,
    /// All `n_fft` bins.
    TwoSided,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum WindowFunction {
    #[default]
    Rectangular,
    /// Periodic Hann.
    Hann,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SpectralConfig {
    pub n_fft: usize,
    pub sidedness: Sidedness,
    pub window_function: WindowFunction,
}

impl Default for SpectralConfig {
    fn default() -> Self {
        Self {
            n_fft: 2048,
            sidedness: Sidedness::OneSided,
            window_function: WindowFunction::Rectangular,
        }
    }
}

impl SpectralConfig {
    pub fn with_n_fft(n_fft: usize) -> Self {
        Self {
            n_fft,
            ..Self::default()
        }
    }

    /// Number of bins in the resulting `p^s`.
    pub fn bins(&self) -> usize {
        match self.sidedness {
            Sidedness::OneSided => self.n_fft / 2 + 1,
            Sidedness::TwoSided => self.n_fft,
        }
    }
}

/// Reusable periodogram engine for one [`SpectralConfig`].
///
/// Holds the FFT plan and window taps so many frames can be transformed
/// without re-planning. Cheap to clone and safe to share across threads.
#[derive(Clone)]
pub struct SpectralAnalyzer {
    cfg: SpectralConfig,
    fft: Arc<dyn Fft<f64>>,
    taps: Option<Arc<[f64]>>,
}

impl fmt::Debug for SpectralAnalyzer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SpectralAnalyzer")
            .field("cfg", &self.cfg)
            .finish()
    }
}

impl SpectralAnalyzer {
    pub fn new(cfg: SpectralConfig) -> Result<Self> {
        if cfg.n_fft < 2 {
            return Err(Error::InvalidParameter(format!(
                "n_fft must be at least 2, got {}",
                cfg.n_fft
            )));
        }
        let fft = FftPlanner::new().plan_fft_forward(cfg.n_fft);
        let taps = match cfg.window_function {
            WindowFunction::Rectangular => None,
            WindowFunction::Hann => {
                let n = cfg.n_fft as f64;
                Some(
                    (0..cfg.n_fft)
                        .map(|i| 0.5 - 0.5 * (2.0 * std::f64::consts::PI * i as f64 / n).cos())
                        .collect(),
                )
            }
        };
        Ok(Self { cfg, fft, taps })
    }

    pub fn config(&self) -> &SpectralConfig {
        &self.cfg
    }

    /// Power spectral density estimate `s(f_i) = |X(f_i)|^2 / N_fft`.
    ///
    /// Frames shorter than `n_fft` are zero-padded.
    pub fn power_spectrum(&self, samples: &[f64]) -> Result<Vec<f64>> {
        let n = self.cfg.n_fft;
        if samples.is_empty() {
            return Err(Error::EmptySignal);
        }
        if samples.len() > n {
            return Err(Error::InvalidParameter(format!(
                "frame of {} samples exceeds n_fft = {n}",
                samples.len()
            )));
        }
        let mut buf: Vec<Complex<f64>> = Vec::with_capacity(n);
        match &self.taps {
            Some(taps) => buf.extend(
                samples
                    .iter()
                    .zip(taps.iter())
                    .map(|(x, w)| Complex::new(x * w, 0.0)),
            ),
            None => buf.extend(samples.iter().map(|&x| Complex::new(x, 0.0))),
        }
        buf.resize(n, Complex::new(0.0, 0.0));
        self.fft.process(&mut buf);
        let scale = 1.0 / n as f64;
        Ok(buf[..self.cfg.bins()]
            .iter()
            .map(|c| c.norm_sqr() * scale)
            .collect())
    }

    /// `p^s`: the power spectrum normalized to unit mass.
    pub fn distribution(&self, samples: &[f64]) -> Result<DiscreteDistribution> {
        let power = self.power_spectrum(samples)?;
        DiscreteDistribution::from_weights(power).map_err(|e| match e {
            Error::Degenerate(_) => Error::Degenerate("frame has zero spectral power"),
            other => other,
        })
    }
}

/// `p^s` of one frame. Plans a fresh FFT; use [`SpectralAnalyzer`] for many frames.
pub fn dist_spectral(frame: &Frame, cfg: &SpectralConfig) -> Result<DiscreteDistribution> {
    SpectralAnalyzer::new(*cfg)?.distribution(&frame.samples)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn frame(xs: &[f64]) -> Frame {
        Frame::from_samples(xs.to_vec())
    }

    fn assert_probs(d: &DiscreteDistribution, expected: &[f64]) {
        assert_eq!(d.size(), expected.len());
        for (a, b) in d.probs().iter().zip(expected) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-12);
        }
    }

    #[test]
    fn framing_offsets() {
        let buf = SignalBuffer::new((0..10).map(f64::from).collect(), 10).unwrap();
        let frames = frame_signal(&buf, 5, 5, TailPolicy::Drop).unwrap();
        assert_eq!(
            frames.iter().map(|f| f.start_index).collect::<Vec<_>>(),
            [0, 5]
        );
        assert_abs_diff_eq!(frames[1].start_time, 0.5);

        let buf = SignalBuffer::new(vec![1.0; 11], 10).unwrap();
        let frames = frame_signal(&buf, 5, 5, TailPolicy::Drop).unwrap();
        assert_eq!(frames.len(), 2);

        let padded = frame_signal(&buf, 5, 5, TailPolicy::ZeroPad).unwrap();
        assert_eq!(padded.len(), 3);
        assert_eq!(padded[2].samples, [1.0, 0.0, 0.0, 0.0, 0.0]);

        let buf = SignalBuffer::new(vec![0.0; 8], 8).unwrap();
        let frames = frame_signal(&buf, 4, 2, TailPolicy::Drop).unwrap();
        assert_eq!(
            frames.iter().map(|f| f.start_index).collect::<Vec<_>>(),
            [0, 2, 4]
        );
    }

    #[test]
    fn framing_errors() {
        let empty = SignalBuffer::new(vec![], 8).unwrap();
        assert_eq!(
            frame_signal(&empty, 1, 1, TailPolicy::Drop),
            Err(Error::EmptySignal)
        );
        let buf = SignalBuffer::new(vec![0.0; 4], 8).unwrap();
        assert_eq!(
            frame_signal(&buf, 5, 5, TailPolicy::Drop),
            Err(Error::WindowTooLong { window: 5, len: 4 })
        );
        assert!(frame_signal(&buf, 2, 0, TailPolicy::Drop).is_err());
        assert!(SignalBuffer::new(vec![1.0], 0).is_err());
    }

    #[test]
    fn distribution_validation() {
        assert!(DiscreteDistribution::new(vec![]).is_err());
        assert!(DiscreteDistribution::new(vec![0.5, 0.6]).is_err());
        assert!(DiscreteDistribution::new(vec![1.5, -0.5]).is_err());
        assert!(DiscreteDistribution::new(vec![f64::NAN, 1.0]).is_err());
        assert!(DiscreteDistribution::new(vec![0.5, 0.5 + 1e-10]).is_ok());
        assert_eq!(
            DiscreteDistribution::from_weights(vec![0.0, 0.0]),
            Err(Error::Degenerate("weights carry no mass"))
        );
    }

    #[test]
    fn time_histogram_examples() {
        let cfg = |n| HistogramConfig {
            n_levels: n,
            ..Default::default()
        };
        assert_probs(
            &dist_time_histogram(&frame(&[0., 0., 1., 1.]), &cfg(2)).unwrap(),
            &[0.5, 0.5],
        );
        assert_probs(
            &dist_time_histogram(&frame(&[0., 1., 2., 3.]), &cfg(4)).unwrap(),
            &[0.25; 4],
        );
        // Edges at 0, 1, 2, 3: the three zeros fill level 1, the 3 closes level 3.
        assert_probs(
            &dist_time_histogram(&frame(&[0., 0., 0., 3.]), &cfg(3)).unwrap(),
            &[0.75, 0.0, 0.25],
        );
        // Interior edge value goes to the upper level.
        assert_probs(
            &dist_time_histogram(&frame(&[0., 1., 3.]), &cfg(3)).unwrap(),
            &[1. / 3., 1. / 3., 1. / 3.],
        );
        // Silence collapses to a delta in the first level.
        assert_probs(
            &dist_time_histogram(&frame(&[2.; 5]), &cfg(4)).unwrap(),
            &[1., 0., 0., 0.],
        );
        assert!(dist_time_histogram(&frame(&[0., 1.]), &cfg(1)).is_err());
    }

    #[test]
    fn time_samples_examples() {
        let abs = AmplitudeTransform::Absolute;
        assert_probs(
            &dist_time_samples(&frame(&[1.; 4]), abs).unwrap(),
            &[0.25; 4],
        );
        assert_probs(
            &dist_time_samples(&frame(&[1., -1., 1., -1.]), abs).unwrap(),
            &[0.25; 4],
        );
        assert_probs(
            &dist_time_samples(&frame(&[3., 1., 0., 0.]), abs).unwrap(),
            &[0.75, 0.25, 0., 0.],
        );
        assert_probs(
            &dist_time_samples(&frame(&[2., -1., 1.]), AmplitudeTransform::Squared).unwrap(),
            &[4. / 6., 1. / 6., 1. / 6.],
        );
        assert_probs(
            &dist_time_samples(&frame(&[1., -1., 2.]), AmplitudeTransform::RawShifted).unwrap(),
            &[2. / 5., 0., 3. / 5.],
        );
        assert!(matches!(
            dist_time_samples(&frame(&[0.; 4]), abs),
            Err(Error::Degenerate(_))
        ));
    }

    /// Classifies each index straight from the closed-interval definition,
    /// resolving shared edges upward.
    fn brute_force_grouping(p0: &[f64], n: usize) -> (Vec<f64>, Vec<f64>) {
        let max = p0.iter().copied().fold(0.0, f64::max);
        let mut p1 = vec![0.0; n];
        let mut pt = vec![0.0; n];
        for &p in p0 {
            let mut chosen = None;
            for j in 1..=n {
                let lo = (j - 1) as f64 / n as f64 * max;
                let hi = j as f64 / n as f64 * max;
                if p >= lo && p <= hi {
                    chosen = Some(j - 1);
                }
            }
            let j = chosen.expect("every value lies in some closed level");
            p1[j] += p;
            pt[j] += 1.0 / p0.len() as f64;
        }
        (p1, pt)
    }

    #[test]
    fn grouped_examples() {
        let (p1, pt) = dist_time_grouped(&DiscreteDistribution::uniform(8), 4).unwrap();
        assert_probs(&p1, &[0., 0., 0., 1.]);
        assert_probs(&pt, &[0., 0., 0., 1.]);

        let p0 = DiscreteDistribution::new(vec![0.5, 0.5, 0., 0.]).unwrap();
        let (p1, pt) = dist_time_grouped(&p0, 2).unwrap();
        assert_probs(&p1, &[0., 1.]);
        assert_probs(&pt, &[0.5, 0.5]);

        // max = 0.4, shared edge at 0.2 resolves upward: I_1 = {0.1}, I_2 = {0.2, 0.3, 0.4}.
        let raw = [0.4, 0.3, 0.2, 0.1];
        let p0 = DiscreteDistribution::new(raw.to_vec()).unwrap();
        let (p1, pt) = dist_time_grouped(&p0, 2).unwrap();
        let (bp1, bpt) = brute_force_grouping(&raw, 2);
        assert_probs(&p1, &bp1);
        assert_probs(&pt, &bpt);
        assert_probs(&p1, &[0.1, 0.9]);
        assert_probs(&pt, &[0.25, 0.75]);

        assert!(dist_time_grouped(&p0, 1).is_err());
    }

    fn naive_power(x: &[f64]) -> Vec<f64> {
        let n = x.len();
        (0..n)
            .map(|k| {
                let (mut re, mut im) = (0.0, 0.0);
                for (t, &v) in x.iter().enumerate() {
                    let ang = -2.0 * PI * (k * t % n) as f64 / n as f64;
                    re += v * ang.cos();
                    im += v * ang.sin();
                }
                (re * re + im * im) / n as f64
            })
            .collect()
    }

    #[test]
    fn spectral_examples() {
        let two = SpectralConfig {
            n_fft: 16,
            sidedness: Sidedness::TwoSided,
            ..Default::default()
        };
        let ps = dist_spectral(&frame(&[2.5; 16]), &two).unwrap();
        assert_abs_diff_eq!(ps.probs()[0], 1.0, epsilon = 1e-12);

        let n = 64;
        let k = 5;
        let cos: Vec<f64> = (0..n)
            .map(|t| (2.0 * PI * (k * t) as f64 / n as f64).cos())
            .collect();
        let ps = dist_spectral(&frame(&cos), &SpectralConfig::with_n_fft(n)).unwrap();
        assert_eq!(ps.size(), n / 2 + 1);
        assert_abs_diff_eq!(ps.probs()[k], 1.0, epsilon = 1e-12);

        assert!(matches!(
            dist_spectral(&frame(&[0.0; 16]), &two),
            Err(Error::Degenerate(_))
        ));
        assert!(dist_spectral(&frame(&[1.0; 17]), &two).is_err());
        assert!(SpectralAnalyzer::new(SpectralConfig::with_n_fft(1)).is_err());
    }

    #[test]
    fn spectral_matches_naive_dft() {
        let x: Vec<f64> = (0..24).map(|t| ((t * 7919) % 13) as f64 - 6.0).collect();
        let an = SpectralAnalyzer::new(SpectralConfig {
            n_fft: 24,
            sidedness: Sidedness::TwoSided,
            window_function: WindowFunction::Rectangular,
        })
        .unwrap();
        let fast = an.power_spectrum(&x).unwrap();
        for (a, b) in fast.iter().zip(naive_power(&x)) {
            assert_abs_diff_eq!(*a, b, epsilon = 1e-9);
        }
    }

    #[test]
    fn zero_padding_and_hann() {
        let an = SpectralAnalyzer::new(SpectralConfig {
            n_fft: 8,
            sidedness: Sidedness::TwoSided,
            window_function: WindowFunction::Hann,
        })
        .unwrap();
        let padded = an.power_spectrum(&[1.0, 1.0, 1.0]).unwrap();
        let mut x = vec![1.0, 1.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0];
        for (i, v) in x.iter_mut().enumerate() {
            *v *= 0.5 - 0.5 * (2.0 * PI * i as f64 / 8.0).cos();
        }
        for (a, b) in padded.iter().zip(naive_power(&x)) {
            assert_abs_diff_eq!(*a, b, epsilon = 1e-12);
        }
    }

    fn signal() -> impl Strategy<Value = Vec<f64>> {
        prop::collection::vec(-1000.0f64..1000.0, 4..200)
    }

    proptest! {
        #[test]
        fn distributions_are_normalized(xs in signal(), n in 2usize..70) {
            let f = frame(&xs);
            let checks = [
                dist_time_histogram(&f, &HistogramConfig { n_levels: n, ..Default::default() }).ok(),
                dist_time_samples(&f, AmplitudeTransform::Absolute).ok(),
                dist_spectral(&f, &SpectralConfig::with_n_fft(xs.len())).ok(),
            ];
            for d in checks.into_iter().flatten() {
                let total: f64 = d.probs().iter().sum();
                prop_assert!((total - 1.0).abs() < 1e-9);
                prop_assert!(d.probs().iter().all(|&p| p >= 0.0));
            }
        }

        #[test]
        fn histogram_counts_sum_to_window(xs in signal(), n in 2usize..70) {
            let counts = time_histogram_counts(&xs, n).unwrap();
            prop_assert_eq!(counts.iter().sum::<usize>(), xs.len());
        }

        #[test]
        fn grouping_matches_brute_force(xs in prop::collection::vec(0.0f64..10.0, 1..100), n in 2usize..40) {
            prop_assume!(xs.iter().any(|&x| x > 0.0));
            let p0 = DiscreteDistribution::from_weights(xs).unwrap();
            let (p1, pt) = dist_time_grouped(&p0, n).unwrap();
            let (bp1, bpt) = brute_force_grouping(p0.probs(), n);
            for (a, b) in p1.probs().iter().zip(&bp1) {
                prop_assert!((a - b).abs() < 1e-12);
            }
            for (a, b) in pt.probs().iter().zip(&bpt) {
                prop_assert!((a - b).abs() < 1e-12);
            }
        }

        #[test]
        fn spectral_scale_invariant(xs in signal(), alpha in prop_oneof![-50.0f64..-0.01, 0.01f64..50.0]) {
            let cfg = SpectralConfig::with_n_fft(xs.len());
            let base = dist_spectral(&frame(&xs), &cfg);
            prop_assume!(base.is_ok());
            let scaled: Vec<f64> = xs.iter().map(|x| alpha * x).collect();
            let other = dist_spectral(&frame(&scaled), &cfg).unwrap();
            for (a, b) in base.unwrap().probs().iter().zip(other.probs()) {
                prop_assert!((a - b).abs() < 1e-12);
            }
        }

        #[test]
        fn parseval(xs in signal()) {
            let an = SpectralAnalyzer::new(SpectralConfig {
                n_fft: xs.len(),
                sidedness: Sidedness::TwoSided,
                window_function: WindowFunction::Rectangular,
            }).unwrap();
            let total: f64 = an.power_spectrum(&xs).unwrap().iter().sum();
            let energy: f64 = xs.iter().map(|x| x * x).sum();
            prop_assert!((total - energy).abs() <= 1e-6 * energy.max(1e-300));
        }
    }
}
