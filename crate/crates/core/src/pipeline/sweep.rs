//! The synthetic tone-burst benchmark and noise-level sweeps over it.

use super::detect::{detect, Calibration, DetectionReport, Event, ThresholdPolicy};
use super::signal::{generate_white_noise, mix, synthesize, Mixture, NoiseSpec, SynthSpec};
use super::{leading_noise_reference, run_criteria, AnalysisConfig, Criterion, CriterionTrack};
use crate::Result;

/// Tone amplitude of the preset; with noise at [`REFERENCE_SIGMA`] the
/// burst-interval SNR is about -10 dB.
pub const BENCHMARK_AMPLITUDE: f64 = 900.0;

/// The reference noise level used for the time-criterion comparison.
pub const REFERENCE_SIGMA: f64 = 2000.0;

pub const PRESET_SIGMAS: [f64; 4] = [500.0, 1000.0, 2000.0, 4000.0];

/// Fraction of a burst an event must cover to count as a detection.
const DETECTION_OVERLAP: f64 = 0.5;

const TIME_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct Benchmark {
    pub sample_rate: u32,
    pub duration: f64,
    pub signal: SynthSpec,
    pub analysis: AnalysisConfig,
    pub policy: ThresholdPolicy,
}

impl Default for Benchmark {
    /// 12 s at 48 kHz, a 1500 Hz tone (bin 64 of a 2048-point frame) in
    /// bursts over 4-7 s and 9-10.5 s, 3 s of leading noise for calibration.
    fn default() -> Self {
        Self {
            sample_rate: 48_000,
            duration: 12.0,
            signal: SynthSpec::tone(1500.0, BENCHMARK_AMPLITUDE, vec![(4.0, 7.0), (9.0, 10.5)]),
            analysis: AnalysisConfig::default(),
            policy: ThresholdPolicy::default(),
        }
    }
}

/// Per-frame ground truth.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FrameTruth {
    /// The frame lies entirely inside a burst.
    Signal,
    /// The frame touches no burst.
    Noise,
    /// The frame straddles a burst edge; excluded from margins.
    Partial,
}

/// Everything produced by one rendering of the benchmark.
#[derive(Debug, Clone)]
pub struct BenchmarkRun {
    pub sigma: f64,
    pub seed: u64,
    pub mixture: Mixture,
    pub tracks: Vec<CriterionTrack>,
    pub truth: Vec<FrameTruth>,
    pub reports: Vec<DetectionReport>,
}

impl BenchmarkRun {
    pub fn track(&self, criterion: Criterion) -> Option<&CriterionTrack> {
        self.tracks.iter().find(|t| t.criterion == criterion)
    }

    pub fn report(&self, criterion: Criterion) -> Option<&DetectionReport> {
        self.reports.iter().find(|r| r.criterion == criterion)
    }

    pub fn margin(&self, criterion: Criterion) -> Option<f64> {
        self.track(criterion)
            .map(|t| separation_margin(&t.values, &self.truth))
    }
}

impl Benchmark {
    /// The preset with the tone amplitude replaced.
    pub fn with_amplitude(amplitude: f64) -> Self {
        let mut b = Self::default();
        b.signal.amplitude = amplitude;
        b
    }

    fn calibration_secs(&self) -> f64 {
        match &self.policy.calibration {
            Calibration::LeadingSeconds(s) => *s,
            Calibration::Frames(r) => {
                r.end as f64 * self.analysis.hop as f64 / f64::from(self.sample_rate)
            }
        }
    }

    /// Signal plus seeded noise of level `sigma`.
    pub fn render(&self, sigma: f64, seed: u64) -> Result<Mixture> {
        let clean = synthesize(&self.signal, self.sample_rate, self.duration)?;
        let noise =
            generate_white_noise(&NoiseSpec::new(sigma, seed)?, clean.len(), self.sample_rate)?;
        let active = self.signal.burst_ranges(self.sample_rate, clean.len());
        mix(&clean, &noise, &active)
    }

    /// Renders, evaluates `criteria` and thresholds every track.
    ///
    /// The LH criterion is referenced to the noise estimated from the
    /// calibration span.
    pub fn run(&self, sigma: f64, seed: u64, criteria: &[Criterion]) -> Result<BenchmarkRun> {
        let mixture = self.render(sigma, seed)?;
        let buf = &mixture.buffer;
        let mut analysis = self.analysis.clone();
        if criteria.contains(&Criterion::Lh) {
            analysis.noise_reference = Some(leading_noise_reference(buf, self.calibration_secs())?);
        }
        let tracks = run_criteria(buf, criteria, &analysis)?;
        let truth = tracks
            .first()
            .map(|t| frame_truth(t, &self.signal.bursts))
            .unwrap_or_default();
        let reports = tracks
            .iter()
            .map(|t| detect(t, &self.policy))
            .collect::<Result<_>>()?;
        Ok(BenchmarkRun {
            sigma,
            seed,
            mixture,
            tracks,
            truth,
            reports,
        })
    }

    /// True when some event in `report` covers at least half of some burst.
    pub fn detected(&self, report: &DetectionReport) -> bool {
        self.signal
            .bursts
            .iter()
            .any(|&b| report.events.iter().any(|e| event_covers_burst(e, b)))
    }
}

/// Labels each frame of `track` against burst intervals in seconds.
pub fn frame_truth(track: &CriterionTrack, bursts: &[(f64, f64)]) -> Vec<FrameTruth> {
    (0..track.len())
        .map(|i| {
            let (a, b) = (track.frame_times[i], track.frame_end(i));
            if bursts
                .iter()
                .any(|&(s, e)| a >= s - TIME_SLACK && b <= e + TIME_SLACK)
            {
                FrameTruth::Signal
            } else if bursts
                .iter()
                .all(|&(s, e)| b <= s + TIME_SLACK || a >= e - TIME_SLACK)
            {
                FrameTruth::Noise
            } else {
                FrameTruth::Partial
            }
        })
        .collect()
}

/// `|mean(signal frames) - mean(noise frames)| / std(noise frames)`.
///
/// NaN without signal frames or with fewer than two noise frames; infinite
/// when the noise frames are constant and the means differ.
pub fn separation_margin(values: &[f64], truth: &[FrameTruth]) -> f64 {
    let pick = |label: FrameTruth| -> Vec<f64> {
        values
            .iter()
            .zip(truth)
            .filter(|(_, &t)| t == label)
            .map(|(&v, _)| v)
            .collect()
    };
    let (sig, noise) = (pick(FrameTruth::Signal), pick(FrameTruth::Noise));
    if sig.is_empty() || noise.len() < 2 {
        return f64::NAN;
    }
    let mean = |xs: &[f64]| xs.iter().sum::<f64>() / xs.len() as f64;
    let (ms, mn) = (mean(&sig), mean(&noise));
    let sd =
        (noise.iter().map(|v| (v - mn).powi(2)).sum::<f64>() / (noise.len() - 1) as f64).sqrt();
    let gap = (ms - mn).abs();
    if sd > 0.0 {
        gap / sd
    } else if gap > 0.0 {
        f64::INFINITY
    } else {
        0.0
    }
}

/// True when `event` covers at least half of the `(start, end)` burst.
pub fn event_covers_burst(event: &Event, burst: (f64, f64)) -> bool {
    let (s, e) = burst;
    event.overlap_secs(s, e) >= DETECTION_OVERLAP * (e - s) - TIME_SLACK
}

/// One line of a sweep table.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub sigma: f64,
    pub criterion: Criterion,
    pub snr_db: f64,
    pub separation_margin: f64,
    pub detected: bool,
}

/// Runs the benchmark at each noise level with the same seed.
pub fn sweep(
    bench: &Benchmark,
    sigmas: &[f64],
    criteria: &[Criterion],
    seed: u64,
) -> Result<Vec<SweepRow>> {
    let mut rows = Vec::with_capacity(sigmas.len() * criteria.len());
    for &sigma in sigmas {
        let run = bench.run(sigma, seed, criteria)?;
        for (track, report) in run.tracks.iter().zip(&run.reports) {
            rows.push(SweepRow {
                sigma,
                criterion: track.criterion,
                snr_db: run.mixture.snr_db,
                separation_margin: separation_margin(&track.values, &run.truth),
                detected: bench.detected(report),
            });
        }
    }
    Ok(rows)
}
