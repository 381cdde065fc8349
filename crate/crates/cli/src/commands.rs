//! The subcommands. Each returns the bytes it would print, so outputs can be
//! compared without going through a process.

use entrosig_core::pipeline::{
    detect, generate_white_noise, leading_noise_reference, mix, normalize_track, run_criteria,
    sweep, synthesize, AnalysisConfig, Benchmark, Calibration, Criterion, CriterionTrack,
    DetectionReport, NoiseSpec, Polarity, ThresholdPolicy, PRESET_SIGMAS,
};
use entrosig_core::{HistogramConfig, SignalBuffer, SpectralConfig};
use serde_json::{json, Value};

use crate::config::{Format, RunConfig, Source, SynthDescription};
use crate::output::{
    csv_number, json_number, json_numbers, to_json_bytes, write_csv, SCHEMA_VERSION,
};
use crate::verify::{self, Kernels};
use crate::wav::{ingest_wav, write_wav_i16};
use crate::CliError;

/// What a subcommand produced.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Output {
    pub bytes: Vec<u8>,
    /// False when the command ran but its checks failed.
    pub success: bool,
}

impl Output {
    fn ok(bytes: Vec<u8>) -> Self {
        Self {
            bytes,
            success: true,
        }
    }
}

/// The analysed signal and how it was obtained.
#[derive(Debug, Clone)]
pub struct LoadedSignal {
    pub buffer: SignalBuffer,
    /// Noise level added to a synthetic signal; `None` for WAV input.
    pub sigma: Option<f64>,
    /// Burst-interval SNR of a synthetic mixture.
    pub snr_db: Option<f64>,
}

/// Reads the WAV input or renders the synthetic mixture.
pub fn load_signal(cfg: &RunConfig) -> Result<LoadedSignal, CliError> {
    match &cfg.source {
        None => Err(CliError::Usage(
            "an --input WAV or a --synth description is required".into(),
        )),
        Some(Source::Wav(path)) => {
            let (buffer, _) = ingest_wav(path)?;
            Ok(LoadedSignal {
                buffer,
                sigma: None,
                snr_db: None,
            })
        }
        Some(Source::Synth(d)) => {
            let sigma = cfg.single_sigma()?;
            let clean = synthesize(&d.spec, d.sample_rate, d.duration)?;
            let noise = generate_white_noise(
                &NoiseSpec::new(sigma, cfg.seed)?,
                clean.len(),
                d.sample_rate,
            )?;
            let m = mix(
                &clean,
                &noise,
                &d.spec.burst_ranges(d.sample_rate, clean.len()),
            )?;
            Ok(LoadedSignal {
                buffer: m.buffer,
                sigma: Some(sigma),
                snr_db: Some(m.snr_db),
            })
        }
    }
}

/// Library analysis settings for `cfg`; LH gets its noise reference from the
/// calibration span of `buf`.
pub fn analysis_config(
    cfg: &RunConfig,
    buf: &SignalBuffer,
    criteria: &[Criterion],
) -> Result<AnalysisConfig, CliError> {
    let mut a = AnalysisConfig::with_window(cfg.window);
    a.hop = cfg.hop;
    a.histogram = HistogramConfig {
        n_levels: cfg.levels,
        ..HistogramConfig::default()
    };
    a.spectral = SpectralConfig::with_n_fft(cfg.n_fft);
    if criteria.contains(&Criterion::Lh) {
        a.noise_reference = Some(leading_noise_reference(buf, cfg.calib_secs)?);
    }
    Ok(a)
}

pub fn threshold_policy(cfg: &RunConfig) -> ThresholdPolicy {
    ThresholdPolicy {
        calibration: Calibration::LeadingSeconds(cfg.calib_secs),
        k_sigma: cfg.k_sigma,
        min_event_frames: cfg.min_event_frames,
    }
}

fn format_or(
    cfg: &RunConfig,
    default: Format,
    allowed: &[Format],
    command: &str,
) -> Result<Format, CliError> {
    let f = cfg.format.unwrap_or(default);
    if allowed.contains(&f) {
        Ok(f)
    } else {
        Err(CliError::Usage(format!("{command} does not write {f}")))
    }
}

fn polarity_name(p: Polarity) -> &'static str {
    match p {
        Polarity::RisesOnSignal => "rises_on_signal",
        Polarity::FallsOnSignal => "falls_on_signal",
    }
}

fn criteria_names(cs: &[Criterion]) -> Value {
    Value::Array(cs.iter().map(|c| Value::from(c.name())).collect())
}

/// The resolved configuration as recorded in JSON outputs.
pub fn config_echo(cfg: &RunConfig, criteria: &[Criterion], sigmas: &[f64]) -> Value {
    let (input, synth) = match &cfg.source {
        Some(Source::Wav(p)) => (Value::from(p.display().to_string()), Value::Null),
        Some(Source::Synth(d)) => (Value::Null, Value::from(d.to_string())),
        None => (Value::Null, Value::Null),
    };
    json!({
        "input": input,
        "synth": synth,
        "window": cfg.window,
        "n_fft": cfg.n_fft,
        "hop": cfg.hop,
        "levels": cfg.levels,
        "criteria": criteria_names(criteria),
        "sigma": json_numbers(sigmas),
        "seed": cfg.seed,
        "k_sigma": json_number(cfg.k_sigma),
        "calib_secs": json_number(cfg.calib_secs),
        "min_event_frames": cfg.min_event_frames,
    })
}

fn signal_info(sig: &LoadedSignal) -> Value {
    json!({
        "sample_rate": sig.buffer.sample_rate(),
        "samples": sig.buffer.len(),
        "sigma": sig.sigma.map_or(Value::Null, json_number),
        "snr_db": sig.snr_db.map_or(Value::Null, json_number),
        "snr_unbounded": sig.snr_db == Some(f64::INFINITY),
        "snr_measured_over": "burst intervals",
    })
}

/// Per-frame criterion values, raw and min-max normalised.
pub fn cmd_analyze(cfg: &RunConfig) -> Result<Output, CliError> {
    let format = format_or(cfg, Format::Csv, &[Format::Csv, Format::Json], "analyze")?;
    let criteria = cfg
        .criteria
        .clone()
        .unwrap_or_else(|| Criterion::ALL.to_vec());
    let sig = load_signal(cfg)?;
    let analysis = analysis_config(cfg, &sig.buffer, &criteria)?;
    let tracks = run_criteria(&sig.buffer, &criteria, &analysis)?;
    let normalized: Vec<CriterionTrack> = tracks.iter().map(normalize_track).collect();
    let frames = tracks.first().map_or(0, CriterionTrack::len);
    let bytes = match format {
        Format::Csv => {
            let mut header = vec!["frame_start_s".to_string(), "frame_end_s".to_string()];
            for c in &criteria {
                header.push(c.name().to_string());
                header.push(format!("{}_norm", c.name()));
            }
            let rows: Vec<Vec<String>> = (0..frames)
                .map(|i| {
                    let t0 = &tracks[0];
                    let mut row = vec![csv_number(t0.frame_times[i]), csv_number(t0.frame_end(i))];
                    for (raw, norm) in tracks.iter().zip(&normalized) {
                        row.push(csv_number(raw.values[i]));
                        row.push(csv_number(norm.values[i]));
                    }
                    row
                })
                .collect();
            write_csv(&header, &rows)
        }
        _ => {
            let t0 = tracks.first();
            let starts: Vec<f64> = t0.map_or(Vec::new(), |t| t.frame_times.clone());
            let ends: Vec<f64> = t0.map_or(Vec::new(), |t| {
                (0..t.len()).map(|i| t.frame_end(i)).collect()
            });
            let tracks_json: Vec<Value> = tracks
                .iter()
                .zip(&normalized)
                .map(|(raw, norm)| {
                    json!({
                        "criterion": raw.criterion.name(),
                        "polarity": polarity_name(raw.polarity),
                        "values": json_numbers(&raw.values),
                        "normalized": json_numbers(&norm.values),
                    })
                })
                .collect();
            to_json_bytes(&json!({
                "schema_version": SCHEMA_VERSION,
                "config": config_echo(cfg, &criteria, sig.sigma.as_slice()),
                "signal": signal_info(&sig),
                "frame_start_s": json_numbers(&starts),
                "frame_end_s": json_numbers(&ends),
                "tracks": tracks_json,
            }))
        }
    };
    Ok(Output::ok(bytes))
}

fn report_json(report: &DetectionReport) -> Value {
    json!({
        "criterion": report.criterion.name(),
        "polarity": polarity_name(report.polarity),
        "threshold": json_number(report.threshold),
        "calibration": {
            "mean": json_number(report.calibration_mean),
            "std": json_number(report.calibration_std),
            "first_frame": report.calibration_frames.start,
            "end_frame": report.calibration_frames.end,
        },
        "events": report.events.iter().map(|e| json!({
            "start_s": json_number(e.start_s),
            "end_s": json_number(e.end_s),
            "start_frame": e.start_frame,
            "end_frame": e.end_frame,
            "peak_value": json_number(e.peak_value),
            "criterion": e.criterion.name(),
        })).collect::<Vec<_>>(),
    })
}

/// Thresholded events of a single criterion (C_SQ unless `--criteria` names another).
pub fn cmd_detect(cfg: &RunConfig) -> Result<Output, CliError> {
    let format = format_or(cfg, Format::Json, &[Format::Json, Format::Csv], "detect")?;
    let criterion = match cfg.criteria.as_deref() {
        None => Criterion::CSq,
        Some([c]) => *c,
        Some(_) => return Err(CliError::Usage("detect takes exactly one criterion".into())),
    };
    let sig = load_signal(cfg)?;
    let analysis = analysis_config(cfg, &sig.buffer, &[criterion])?;
    let track = run_criteria(&sig.buffer, &[criterion], &analysis)?.remove(0);
    let report = detect(&track, &threshold_policy(cfg))?;
    let bytes = match format {
        Format::Csv => {
            let header: Vec<String> = [
                "start_s",
                "end_s",
                "start_frame",
                "end_frame",
                "peak_value",
                "criterion",
            ]
            .map(String::from)
            .into();
            let rows: Vec<Vec<String>> = report
                .events
                .iter()
                .map(|e| {
                    vec![
                        csv_number(e.start_s),
                        csv_number(e.end_s),
                        e.start_frame.to_string(),
                        e.end_frame.to_string(),
                        csv_number(e.peak_value),
                        e.criterion.name().to_string(),
                    ]
                })
                .collect();
            write_csv(&header, &rows)
        }
        _ => {
            let mut doc = report_json(&report);
            let obj = doc.as_object_mut().expect("report is an object");
            obj.insert("schema_version".into(), SCHEMA_VERSION.into());
            obj.insert(
                "config".into(),
                config_echo(cfg, &[criterion], sig.sigma.as_slice()),
            );
            obj.insert("signal".into(), signal_info(&sig));
            to_json_bytes(&doc)
        }
    };
    Ok(Output::ok(bytes))
}

/// The benchmark described by `cfg`: the `--synth` signal (or the preset)
/// analysed and thresholded with the configured settings.
pub fn benchmark(cfg: &RunConfig) -> Result<Benchmark, CliError> {
    let d = match &cfg.source {
        Some(Source::Wav(_)) => {
            return Err(CliError::Usage(
                "sweep needs a clean --synth signal, not a WAV input".into(),
            ));
        }
        Some(Source::Synth(d)) => d.clone(),
        None => SynthDescription::default(),
    };
    let mut analysis = AnalysisConfig::with_window(cfg.window);
    analysis.hop = cfg.hop;
    analysis.histogram = HistogramConfig {
        n_levels: cfg.levels,
        ..HistogramConfig::default()
    };
    analysis.spectral = SpectralConfig::with_n_fft(cfg.n_fft);
    Ok(Benchmark {
        sample_rate: d.sample_rate,
        duration: d.duration,
        signal: d.spec,
        analysis,
        policy: threshold_policy(cfg),
    })
}

/// Separation margin and detection flag per (noise level, criterion).
pub fn cmd_sweep(cfg: &RunConfig) -> Result<Output, CliError> {
    let format = format_or(cfg, Format::Csv, &[Format::Csv, Format::Json], "sweep")?;
    let criteria = cfg
        .criteria
        .clone()
        .unwrap_or_else(|| Criterion::ALL.to_vec());
    let sigmas = cfg.sigmas.clone().unwrap_or_else(|| PRESET_SIGMAS.to_vec());
    let bench = benchmark(cfg)?;
    let rows = sweep(&bench, &sigmas, &criteria, cfg.seed)?;
    let bytes = match format {
        Format::Csv => {
            let header: Vec<String> = [
                "sigma",
                "criterion",
                "snr_db",
                "separation_margin",
                "detected",
            ]
            .map(String::from)
            .into();
            let cells: Vec<Vec<String>> = rows
                .iter()
                .map(|r| {
                    vec![
                        csv_number(r.sigma),
                        r.criterion.name().to_string(),
                        csv_number(r.snr_db),
                        csv_number(r.separation_margin),
                        r.detected.to_string(),
                    ]
                })
                .collect();
            write_csv(&header, &cells)
        }
        _ => to_json_bytes(&json!({
            "schema_version": SCHEMA_VERSION,
            "config": config_echo(cfg, &criteria, &sigmas),
            "snr_measured_over": "burst intervals",
            "rows": rows.iter().map(|r| json!({
                "sigma": json_number(r.sigma),
                "criterion": r.criterion.name(),
                "snr_db": json_number(r.snr_db),
                "separation_margin": json_number(r.separation_margin),
                "detected": r.detected,
            })).collect::<Vec<_>>(),
        })),
    };
    Ok(Output::ok(bytes))
}

/// The identity and order checks; unsuccessful when any check fails.
pub fn cmd_verify(
    seed: u64,
    format: Option<Format>,
    kernels: &Kernels,
) -> Result<Output, CliError> {
    let json = match format.unwrap_or(Format::Text) {
        Format::Text => false,
        Format::Json => true,
        Format::Csv => return Err(CliError::Usage("verify writes text or json".into())),
    };
    let report = verify::run_suite(kernels, seed);
    Ok(Output {
        bytes: verify::render(&report, json),
        success: report.passed(),
    })
}

/// Writes the synthetic mixture as 16-bit PCM to `--output` and returns a
/// JSON summary.
pub fn cmd_synth(cfg: &RunConfig) -> Result<Output, CliError> {
    let path = cfg
        .output
        .as_ref()
        .ok_or_else(|| CliError::Usage("synth needs --output".into()))?;
    if !matches!(cfg.source, Some(Source::Synth(_))) {
        return Err(CliError::Usage("synth needs a --synth description".into()));
    }
    let sig = load_signal(cfg)?;
    let clipped = write_wav_i16(path, &sig.buffer)?;
    Ok(Output::ok(to_json_bytes(&json!({
        "schema_version": SCHEMA_VERSION,
        "output": path.display().to_string(),
        "signal": signal_info(&sig),
        "clipped_samples": clipped,
        "config": config_echo(cfg, &[], sig.sigma.as_slice()),
    }))))
}
