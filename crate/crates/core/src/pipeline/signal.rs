//! Test signals: seeded white noise, synthetic bursts and their mixture.

use std::f64::consts::PI;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::{Error, Result, SignalBuffer};

/// Zero-mean Gaussian white noise with standard deviation `sigma`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseSpec {
    pub sigma: f64,
    pub seed: u64,
}

impl NoiseSpec {
    pub fn new(sigma: f64, seed: u64) -> Result<Self> {
        if !(sigma >= 0.0 && sigma.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "noise sigma must be >= 0, got {sigma}"
            )));
        }
        Ok(Self { sigma, seed })
    }
}

/// Draws `n_samples` i.i.d. normal samples; identical seeds give identical buffers.
pub fn generate_white_noise(
    spec: &NoiseSpec,
    n_samples: usize,
    sample_rate: u32,
) -> Result<SignalBuffer> {
    NoiseSpec::new(spec.sigma, spec.seed)?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let samples = if spec.sigma == 0.0 {
        vec![0.0; n_samples]
    } else {
        (0..n_samples)
            .map(|_| {
                let z: f64 = StandardNormal.sample(&mut rng);
                spec.sigma * z
            })
            .collect()
    };
    SignalBuffer::new(samples, sample_rate)
}

#[derive(Debug, Clone, PartialEq)]
pub enum SynthKind {
    /// Sinusoid at the carrier frequency, phase referenced to `t = 0`.
    ToneBurst,
    /// Linear sweep from the carrier to `end_hz` across each burst.
    Chirp { end_hz: f64 },
    /// Carrier plus its first `harmonics - 1` overtones, sharing the amplitude.
    MultiTone { harmonics: usize },
}

/// A clean signal that is silent outside its burst intervals.
#[derive(Debug, Clone, PartialEq)]
pub struct SynthSpec {
    pub kind: SynthKind,
    pub carrier_hz: f64,
    /// `(start_s, end_s)` per burst, sorted and non-overlapping.
    pub bursts: Vec<(f64, f64)>,
    /// Peak amplitude in sample units.
    pub amplitude: f64,
}

impl SynthSpec {
    pub fn tone(carrier_hz: f64, amplitude: f64, bursts: Vec<(f64, f64)>) -> Self {
        Self {
            kind: SynthKind::ToneBurst,
            carrier_hz,
            bursts,
            amplitude,
        }
    }

    pub fn validate(&self, sample_rate: u32, duration: f64) -> Result<()> {
        let nyquist = f64::from(sample_rate) / 2.0;
        if !(duration > 0.0 && duration.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "duration must be positive, got {duration}"
            )));
        }
        if !self.amplitude.is_finite() {
            return Err(Error::InvalidParameter("amplitude must be finite".into()));
        }
        let mut freqs = vec![self.carrier_hz];
        match &self.kind {
            SynthKind::ToneBurst => {}
            SynthKind::Chirp { end_hz } => freqs.push(*end_hz),
            SynthKind::MultiTone { harmonics } => {
                if *harmonics == 0 {
                    return Err(Error::InvalidParameter(
                        "multi-tone needs at least one harmonic".into(),
                    ));
                }
                freqs.push(self.carrier_hz * *harmonics as f64);
            }
        }
        if let Some(f) = freqs.iter().find(|&&f| !(f > 0.0 && f < nyquist)) {
            return Err(Error::InvalidParameter(format!(
                "frequency {f} Hz outside (0, {nyquist}) Hz"
            )));
        }
        let mut prev_end = 0.0;
        for &(start, end) in &self.bursts {
            if !(start >= prev_end && start < end && end <= duration + 1e-12) {
                return Err(Error::InvalidParameter(format!(
                    "burst ({start}, {end}) must be ordered, non-overlapping and inside [0, {duration}]"
                )));
            }
            prev_end = end;
        }
        Ok(())
    }

    /// `[start, end)` sample ranges of the bursts.
    pub fn burst_ranges(&self, sample_rate: u32, n_samples: usize) -> Vec<std::ops::Range<usize>> {
        let fs = f64::from(sample_rate);
        self.bursts
            .iter()
            .map(|&(s, e)| {
                let a = ((s * fs).round() as usize).min(n_samples);
                let b = ((e * fs).round() as usize).min(n_samples);
                a..b
            })
            .collect()
    }
}

/// Renders `spec` over `duration` seconds.
pub fn synthesize(spec: &SynthSpec, sample_rate: u32, duration: f64) -> Result<SignalBuffer> {
    spec.validate(sample_rate, duration)?;
    let fs = f64::from(sample_rate);
    let n = (duration * fs).round() as usize;
    if n == 0 {
        return Err(Error::InvalidParameter("duration yields no samples".into()));
    }
    let mut samples = vec![0.0; n];
    for (range, &(burst_start, burst_end)) in spec
        .burst_ranges(sample_rate, n)
        .into_iter()
        .zip(&spec.bursts)
    {
        for i in range {
            let t = i as f64 / fs;
            samples[i] = spec.amplitude
                * match &spec.kind {
                    SynthKind::ToneBurst => (2.0 * PI * spec.carrier_hz * t).sin(),
                    SynthKind::Chirp { end_hz } => {
                        let tau = t - burst_start;
                        let rate = (end_hz - spec.carrier_hz) / (burst_end - burst_start);
                        (2.0 * PI * (spec.carrier_hz * tau + 0.5 * rate * tau * tau)).sin()
                    }
                    SynthKind::MultiTone { harmonics } => {
                        let h = *harmonics as f64;
                        (1..=*harmonics)
                            .map(|k| (2.0 * PI * spec.carrier_hz * k as f64 * t).sin())
                            .sum::<f64>()
                            / h
                    }
                };
        }
    }
    SignalBuffer::new(samples, sample_rate)
}

/// A signal-plus-noise buffer and its SNR.
#[derive(Debug, Clone, PartialEq)]
pub struct Mixture {
    pub buffer: SignalBuffer,
    /// `10 log10(P_signal / P_noise)` over the measured region; `+inf` when
    /// the noise carries no power.
    pub snr_db: f64,
}

impl Mixture {
    pub fn snr_unbounded(&self) -> bool {
        self.snr_db == f64::INFINITY
    }
}

/// Sums `signal` and `noise` samplewise.
///
/// Powers are measured over `active` sample ranges (the bursts), or over the
/// whole buffer when `active` is empty.
pub fn mix(
    signal: &SignalBuffer,
    noise: &SignalBuffer,
    active: &[std::ops::Range<usize>],
) -> Result<Mixture> {
    if signal.len() != noise.len() || signal.sample_rate() != noise.sample_rate() {
        return Err(Error::InvalidParameter(format!(
            "cannot mix {} samples at {} Hz with {} samples at {} Hz",
            signal.len(),
            signal.sample_rate(),
            noise.len(),
            noise.sample_rate()
        )));
    }
    let whole = 0..signal.len();
    let ranges = if active.is_empty() {
        std::slice::from_ref(&whole)
    } else {
        active
    };
    let (mut ps, mut pn, mut count) = (0.0, 0.0, 0usize);
    for r in ranges {
        for i in r.clone() {
            ps += signal.samples()[i].powi(2);
            pn += noise.samples()[i].powi(2);
        }
        count += r.len();
    }
    let snr_db = if count == 0 || pn == 0.0 {
        f64::INFINITY
    } else {
        10.0 * (ps / pn).log10()
    };
    let samples = signal
        .samples()
        .iter()
        .zip(noise.samples())
        .map(|(a, b)| a + b)
        .collect();
    Ok(Mixture {
        buffer: SignalBuffer::new(samples, signal.sample_rate())?,
        snr_db,
    })
}

/// Peak amplitude of a sinusoid whose power is `snr_db` above white noise of
/// standard deviation `sigma`: `sigma * sqrt(2 * 10^(snr/10))`.
pub fn tone_amplitude_for_snr(snr_db: f64, sigma: f64) -> f64 {
    sigma * (2.0 * 10f64.powf(snr_db / 10.0)).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn noise_is_seeded_and_scaled() {
        let spec = NoiseSpec::new(3.0, 7).unwrap();
        let a = generate_white_noise(&spec, 1000, 8000).unwrap();
        let b = generate_white_noise(&spec, 1000, 8000).unwrap();
        assert_eq!(a, b);
        let c = generate_white_noise(&NoiseSpec::new(3.0, 8).unwrap(), 1000, 8000).unwrap();
        assert_ne!(a, c);
        let silent = generate_white_noise(&NoiseSpec::new(0.0, 7).unwrap(), 16, 8000).unwrap();
        assert!(silent.samples().iter().all(|&x| x == 0.0));
        assert!(NoiseSpec::new(-1.0, 0).is_err());
    }

    #[test]
    fn noise_moments() {
        let sigma = 2.5;
        let buf =
            generate_white_noise(&NoiseSpec::new(sigma, 11).unwrap(), 1_000_000, 48_000).unwrap();
        let n = buf.len() as f64;
        let mean = buf.samples().iter().sum::<f64>() / n;
        let sd = (buf
            .samples()
            .iter()
            .map(|x| (x - mean).powi(2))
            .sum::<f64>()
            / (n - 1.0))
            .sqrt();
        assert!((sd / sigma - 1.0).abs() < 0.005, "sd {sd}");
        assert!(mean.abs() < 5.0 * sigma / n.sqrt());
    }

    #[test]
    fn synth_bursts_land_on_sample_indices() {
        let spec = SynthSpec::tone(1000.0, 1.0, vec![(0.25, 0.5)]);
        let buf = synthesize(&spec, 8000, 1.0).unwrap();
        assert_eq!(buf.len(), 8000);
        let first = buf.samples().iter().position(|&x| x != 0.0).unwrap();
        let last = buf.samples().iter().rposition(|&x| x != 0.0).unwrap();
        // sin is zero at t = 0.25 s exactly (phase 500 pi), so the first
        // non-zero sample is the next one.
        assert!(first == 2000 || first == 2001);
        assert!((3998..4000).contains(&last));
        assert_eq!(spec.burst_ranges(8000, 8000), vec![2000..4000]);
    }

    #[test]
    fn synth_zero_amplitude_is_silent() {
        let spec = SynthSpec::tone(1000.0, 0.0, vec![(0.0, 1.0)]);
        let buf = synthesize(&spec, 8000, 1.0).unwrap();
        assert!(buf.samples().iter().all(|&x| x == 0.0));
    }

    #[test]
    fn synth_kinds_stay_bounded() {
        for kind in [
            SynthKind::Chirp { end_hz: 3000.0 },
            SynthKind::MultiTone { harmonics: 3 },
        ] {
            let spec = SynthSpec {
                kind,
                carrier_hz: 500.0,
                bursts: vec![(0.1, 0.9)],
                amplitude: 2.0,
            };
            let buf = synthesize(&spec, 16_000, 1.0).unwrap();
            assert!(buf.samples().iter().all(|x| x.abs() <= 2.0 + 1e-12));
            assert!(buf.samples().iter().any(|&x| x.abs() > 1.0));
        }
    }

    #[test]
    fn synth_validation() {
        let bad = [
            SynthSpec::tone(1000.0, 1.0, vec![(0.5, 0.2)]),
            SynthSpec::tone(1000.0, 1.0, vec![(0.1, 0.5), (0.4, 0.6)]),
            SynthSpec::tone(1000.0, 1.0, vec![(0.5, 1.5)]),
            SynthSpec::tone(5000.0, 1.0, vec![]),
            SynthSpec {
                kind: SynthKind::MultiTone { harmonics: 0 },
                ..SynthSpec::tone(100.0, 1.0, vec![])
            },
        ];
        for spec in bad {
            assert!(synthesize(&spec, 8000, 1.0).is_err(), "{spec:?}");
        }
        assert!(synthesize(&SynthSpec::tone(100.0, 1.0, vec![]), 8000, 0.0).is_err());
    }

    #[test]
    fn mix_snr() {
        let fs = 8000;
        let silent = SignalBuffer::new(vec![0.0; 100], fs).unwrap();
        let ones = SignalBuffer::new(vec![1.0; 100], fs).unwrap();
        let m = mix(&ones, &silent, &[]).unwrap();
        assert!(m.snr_unbounded());
        let minus = SignalBuffer::new(vec![-1.0; 100], fs).unwrap();
        let m = mix(&ones, &minus, &[]).unwrap();
        assert_abs_diff_eq!(m.snr_db, 0.0);
        assert!(m.buffer.samples().iter().all(|&x| x == 0.0));
        assert!(mix(&ones, &SignalBuffer::new(vec![0.0; 99], fs).unwrap(), &[]).is_err());
    }

    #[test]
    fn mix_tone_snr_matches_closed_form() {
        let (fs, a, sigma) = (48_000, 300.0, 1000.0);
        let spec = SynthSpec::tone(1500.0, a, vec![(1.0, 9.0)]);
        let clean = synthesize(&spec, fs, 10.0).unwrap();
        let noise =
            generate_white_noise(&NoiseSpec::new(sigma, 3).unwrap(), clean.len(), fs).unwrap();
        let m = mix(&clean, &noise, &spec.burst_ranges(fs, clean.len())).unwrap();
        let expected = 10.0 * (a * a / (2.0 * sigma * sigma)).log10();
        assert!(
            (m.snr_db - expected).abs() < 0.05,
            "{} vs {expected}",
            m.snr_db
        );
        assert_abs_diff_eq!(tone_amplitude_for_snr(expected, sigma), a, epsilon = 1e-9);
    }
}
