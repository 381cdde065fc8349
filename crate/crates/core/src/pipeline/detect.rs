//! Noise-calibrated thresholding of criterion tracks.

use std::ops::Range;

use super::{Criterion, CriterionTrack, Polarity};
use crate::{Error, Result};

/// Fewest calibration frames accepted by [`detect`].
pub const MIN_CALIBRATION_FRAMES: usize = 8;

/// Slack when comparing frame edges in seconds against the calibration span.
const TIME_SLACK: f64 = 1e-9;

/// Where the noise-only statistics come from.
#[derive(Debug, Clone, PartialEq)]
pub enum Calibration {
    /// Every frame that ends within the first this-many seconds.
    LeadingSeconds(f64),
    /// An explicit range of frame indices.
    Frames(Range<usize>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdPolicy {
    pub calibration: Calibration,
    pub k_sigma: f64,
    pub min_event_frames: usize,
}

impl Default for ThresholdPolicy {
    fn default() -> Self {
        Self {
            calibration: Calibration::LeadingSeconds(3.0),
            k_sigma: 3.0,
            min_event_frames: 2,
        }
    }
}

impl ThresholdPolicy {
    pub fn validate(&self) -> Result<()> {
        if !(self.k_sigma > 0.0 && self.k_sigma.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "k_sigma must be > 0, got {}",
                self.k_sigma
            )));
        }
        if self.min_event_frames == 0 {
            return Err(Error::InvalidParameter(
                "min_event_frames must be >= 1".into(),
            ));
        }
        match &self.calibration {
            Calibration::LeadingSeconds(s) if !(*s > 0.0 && s.is_finite()) => Err(
                Error::InvalidParameter(format!("calibration duration must be > 0, got {s}")),
            ),
            Calibration::Frames(r) if r.is_empty() => Err(Error::InvalidParameter(
                "calibration frame range is empty".into(),
            )),
            _ => Ok(()),
        }
    }

    fn calibration_frames(&self, track: &CriterionTrack) -> Range<usize> {
        match &self.calibration {
            Calibration::LeadingSeconds(secs) => {
                let n = (0..track.len())
                    .take_while(|&i| track.frame_end(i) <= secs + TIME_SLACK)
                    .count();
                0..n
            }
            Calibration::Frames(r) => r.start.min(track.len())..r.end.min(track.len()),
        }
    }
}

/// A run of consecutive frames beyond the threshold.
#[derive(Debug, Clone, PartialEq)]
pub struct Event {
    pub start_frame: usize,
    /// Exclusive.
    pub end_frame: usize,
    pub start_s: f64,
    pub end_s: f64,
    /// The most extreme value in the run, in the direction of the polarity.
    pub peak_value: f64,
    pub criterion: Criterion,
}

impl Event {
    pub fn frames(&self) -> usize {
        self.end_frame - self.start_frame
    }

    /// Seconds shared with `[start, end)`.
    pub fn overlap_secs(&self, start: f64, end: f64) -> f64 {
        (self.end_s.min(end) - self.start_s.max(start)).max(0.0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DetectionReport {
    pub criterion: Criterion,
    pub polarity: Polarity,
    pub events: Vec<Event>,
    pub calibration_frames: Range<usize>,
    pub calibration_mean: f64,
    /// Sample standard deviation over the calibration frames.
    pub calibration_std: f64,
    pub threshold: f64,
}

/// Thresholds `track` at the calibration mean plus `k` standard deviations
/// (minus, for criteria that fall on signal). Frames strictly beyond the
/// threshold form runs; runs of at least `min_event_frames` become events.
pub fn detect(track: &CriterionTrack, policy: &ThresholdPolicy) -> Result<DetectionReport> {
    policy.validate()?;
    let calib = policy.calibration_frames(track);
    if calib.len() < MIN_CALIBRATION_FRAMES {
        return Err(Error::CalibrationTooShort {
            found: calib.len(),
            needed: MIN_CALIBRATION_FRAMES,
        });
    }
    let xs = &track.values[calib.clone()];
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let std = (xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt();
    let (threshold, sign) = match track.polarity {
        Polarity::RisesOnSignal => (mean + policy.k_sigma * std, 1.0),
        Polarity::FallsOnSignal => (mean - policy.k_sigma * std, -1.0),
    };
    let beyond = |v: f64| sign * (v - threshold) > 0.0;

    let mut events = Vec::new();
    let mut i = 0;
    while i < track.len() {
        if !beyond(track.values[i]) {
            i += 1;
            continue;
        }
        let start = i;
        while i < track.len() && beyond(track.values[i]) {
            i += 1;
        }
        if i - start >= policy.min_event_frames {
            let peak_value = track.values[start..i]
                .iter()
                .copied()
                .fold(f64::NAN, |best, v| {
                    if best.is_nan() || sign * (v - best) > 0.0 {
                        v
                    } else {
                        best
                    }
                });
            events.push(Event {
                start_frame: start,
                end_frame: i,
                start_s: track.frame_times[start],
                end_s: track.frame_end(i - 1),
                peak_value,
                criterion: track.criterion,
            });
        }
    }
    Ok(DetectionReport {
        criterion: track.criterion,
        polarity: track.polarity,
        events,
        calibration_frames: calib,
        calibration_mean: mean,
        calibration_std: std,
        threshold,
    })
}
