//! RIFF WAV ingestion and 16-bit export.
//!
//! Integer PCM keeps its native scale (16-bit samples span -32768..=32767),
//! so noise levels read the same as in recordings of that format.

use std::path::Path;

use entrosig_core::SignalBuffer;
use hound::{SampleFormat, WavReader, WavSpec, WavWriter};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WavInfo {
    pub sample_rate: u32,
    pub channels: u16,
    pub bits_per_sample: u16,
    pub float: bool,
}

/// Reads channel 0 of a PCM WAV (8/16/24/32-bit int or 32-bit float).
pub fn ingest_wav(path: &Path) -> Result<(SignalBuffer, WavInfo), CliError> {
    let reader = WavReader::open(path).map_err(|e| wav_error(path, e))?;
    let spec = reader.spec();
    let info = WavInfo {
        sample_rate: spec.sample_rate,
        channels: spec.channels,
        bits_per_sample: spec.bits_per_sample,
        float: spec.sample_format == SampleFormat::Float,
    };
    let supported = match spec.sample_format {
        SampleFormat::Int => matches!(spec.bits_per_sample, 8 | 16 | 24 | 32),
        SampleFormat::Float => spec.bits_per_sample == 32,
    };
    if !supported {
        return Err(CliError::Input(format!(
            "{}: unsupported sample format ({:?}, {} bits)",
            path.display(),
            spec.sample_format,
            spec.bits_per_sample
        )));
    }
    if spec.channels > 1 {
        log::warn!(
            "{}: {} channels, analysing channel 0 only",
            path.display(),
            spec.channels
        );
    }
    let stride = usize::from(spec.channels.max(1));
    let samples: Vec<f64> = match spec.sample_format {
        SampleFormat::Int => reader
            .into_samples::<i32>()
            .step_by(stride)
            .map(|s| s.map(f64::from))
            .collect::<Result<_, _>>(),
        SampleFormat::Float => reader
            .into_samples::<f32>()
            .step_by(stride)
            .map(|s| s.map(f64::from))
            .collect::<Result<_, _>>(),
    }
    .map_err(|e| {
        CliError::Input(format!(
            "{}: truncated or corrupt sample data ({e})",
            path.display()
        ))
    })?;
    if samples.is_empty() {
        return Err(CliError::Input(format!("{}: no samples", path.display())));
    }
    let buf = SignalBuffer::new(samples, spec.sample_rate)?;
    Ok((buf, info))
}

/// Writes `buf` as mono 16-bit PCM, rounding to the nearest integer.
///
/// Returns the number of samples clipped to the 16-bit range.
pub fn write_wav_i16(path: &Path, buf: &SignalBuffer) -> Result<usize, CliError> {
    let spec = WavSpec {
        channels: 1,
        sample_rate: buf.sample_rate(),
        bits_per_sample: 16,
        sample_format: SampleFormat::Int,
    };
    let mut writer = WavWriter::create(path, spec).map_err(|e| wav_error(path, e))?;
    let mut clipped = 0;
    for &x in buf.samples() {
        let r = x.round();
        let v = r.clamp(f64::from(i16::MIN), f64::from(i16::MAX));
        if v != r {
            clipped += 1;
        }
        writer
            .write_sample(v as i16)
            .map_err(|e| wav_error(path, e))?;
    }
    writer.finalize().map_err(|e| wav_error(path, e))?;
    if clipped > 0 {
        log::warn!(
            "{}: {clipped} samples clipped to the 16-bit range",
            path.display()
        );
    }
    Ok(clipped)
}

fn wav_error(path: &Path, e: hound::Error) -> CliError {
    match e {
        hound::Error::IoError(io)
            if matches!(
                io.kind(),
                std::io::ErrorKind::NotFound | std::io::ErrorKind::PermissionDenied
            ) =>
        {
            CliError::Io(format!("{}: {io}", path.display()))
        }
        hound::Error::IoError(io) => {
            CliError::Input(format!("{}: malformed file ({io})", path.display()))
        }
        other => CliError::Input(format!("{}: {other}", path.display())),
    }
}
