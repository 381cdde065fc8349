//! Run configuration: defaults, an optional `key = value` file, then flags.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::Args;
use entrosig_core::pipeline::{Criterion, SynthKind, SynthSpec, REFERENCE_SIGMA};
use serde::Deserialize;

use crate::CliError;

pub const SEED_ENV: &str = "ENTROSIG_SEED";

/// Flags shared by the signal subcommands. Every field is optional so that
/// values from `--config` can fill the gaps.
#[derive(Debug, Clone, Default, Args)]
pub struct RunArgs {
    /// PCM WAV file to analyse.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Synthetic signal, e.g. `kind=tone,freq=1500,amp=900,bursts=4-7;9-10.5,duration=12,rate=48000`.
    #[arg(long)]
    pub synth: Option<String>,
    /// Frame length W in samples.
    #[arg(long)]
    pub window: Option<usize>,
    /// FFT length (defaults to the window).
    #[arg(long = "n-fft")]
    pub n_fft: Option<usize>,
    /// Frame advance in samples (defaults to the window).
    #[arg(long)]
    pub hop: Option<usize>,
    /// Amplitude alphabet size for the time distributions.
    #[arg(long)]
    pub levels: Option<usize>,
    /// Comma-separated criterion names.
    #[arg(long)]
    pub criteria: Option<String>,
    /// Comma-separated noise standard deviations.
    #[arg(long)]
    pub sigma: Option<String>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long = "k-sigma")]
    pub k_sigma: Option<f64>,
    /// Leading noise-only seconds used for calibration.
    #[arg(long = "calib-secs")]
    pub calib_secs: Option<f64>,
    #[arg(long = "min-event-frames")]
    pub min_event_frames: Option<usize>,
    #[arg(long, value_parser = ["csv", "json", "text"])]
    pub format: Option<String>,
    /// Output path (stdout when omitted; required by `synth`).
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Flat `key = value` file with the same keys as the flags.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Accept window and FFT lengths that are not powers of two.
    #[arg(long = "allow-non-pow2")]
    pub allow_non_pow2: bool,
}

/// Keys accepted in a config file; names follow the flags with `_` for `-`.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    input: Option<PathBuf>,
    synth: Option<String>,
    window: Option<usize>,
    n_fft: Option<usize>,
    hop: Option<usize>,
    levels: Option<usize>,
    criteria: Option<String>,
    sigma: Option<SigmaValue>,
    seed: Option<u64>,
    k_sigma: Option<f64>,
    calib_secs: Option<f64>,
    min_event_frames: Option<usize>,
    format: Option<String>,
    output: Option<PathBuf>,
    allow_non_pow2: Option<bool>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum SigmaValue {
    One(f64),
    Many(Vec<f64>),
    Text(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
    Text,
}

impl FromStr for Format {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            "text" => Ok(Format::Text),
            other => Err(CliError::Usage(format!(
                "unknown format '{other}' (csv, json, text)"
            ))),
        }
    }
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Format::Csv => "csv",
            Format::Json => "json",
            Format::Text => "text",
        })
    }
}

/// A parsed `--synth` description: the clean signal and its rendering.
#[derive(Debug, Clone, PartialEq)]
pub struct SynthDescription {
    pub spec: SynthSpec,
    pub duration: f64,
    pub sample_rate: u32,
}

impl Default for SynthDescription {
    /// The benchmark preset.
    fn default() -> Self {
        let bench = entrosig_core::pipeline::Benchmark::default();
        Self {
            spec: bench.signal,
            duration: bench.duration,
            sample_rate: bench.sample_rate,
        }
    }
}

impl FromStr for SynthDescription {
    type Err = CliError;

    /// Comma-separated `key=value` pairs over the preset: `kind` (tone,
    /// chirp, multitone), `freq`, `amp`, `bursts` (`a-b;c-d` seconds, or
    /// `none`), `duration`, `rate`, `end` (chirp end Hz), `harmonics`.
    fn from_str(s: &str) -> Result<Self, CliError> {
        let mut d = SynthDescription::default();
        let mut kind = "tone".to_string();
        let mut end_hz = None;
        let mut harmonics = 3usize;
        let bad =
            |key: &str, v: &str| CliError::Usage(format!("--synth: bad value '{v}' for '{key}'"));
        for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (key, value) = part.split_once('=').ok_or_else(|| {
                CliError::Usage(format!("--synth: expected key=value, got '{part}'"))
            })?;
            let (key, value) = (key.trim(), value.trim());
            let num = || value.parse::<f64>().map_err(|_| bad(key, value));
            match key {
                "kind" => kind = value.to_string(),
                "freq" => d.spec.carrier_hz = num()?,
                "amp" => d.spec.amplitude = num()?,
                "duration" => d.duration = num()?,
                "rate" => d.sample_rate = value.parse().map_err(|_| bad(key, value))?,
                "end" => end_hz = Some(num()?),
                "harmonics" => harmonics = value.parse().map_err(|_| bad(key, value))?,
                "bursts" => d.spec.bursts = parse_bursts(value).ok_or_else(|| bad(key, value))?,
                other => return Err(CliError::Usage(format!("--synth: unknown key '{other}'"))),
            }
        }
        d.spec.kind = match kind.as_str() {
            "tone" => SynthKind::ToneBurst,
            "chirp" => SynthKind::Chirp {
                end_hz: end_hz.unwrap_or(2.0 * d.spec.carrier_hz),
            },
            "multitone" => SynthKind::MultiTone { harmonics },
            other => return Err(CliError::Usage(format!("--synth: unknown kind '{other}'"))),
        };
        d.spec
            .validate(d.sample_rate, d.duration)
            .map_err(|e| CliError::Usage(format!("--synth: {e}")))?;
        Ok(d)
    }
}

impl fmt::Display for SynthDescription {
    /// The canonical form, which parses back to the same description.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.spec.kind {
            SynthKind::ToneBurst => write!(f, "kind=tone")?,
            SynthKind::Chirp { end_hz } => write!(f, "kind=chirp,end={end_hz}")?,
            SynthKind::MultiTone { harmonics } => {
                write!(f, "kind=multitone,harmonics={harmonics}")?
            }
        }
        let bursts = if self.spec.bursts.is_empty() {
            "none".to_string()
        } else {
            self.spec
                .bursts
                .iter()
                .map(|(a, b)| format!("{a}-{b}"))
                .collect::<Vec<_>>()
                .join(";")
        };
        write!(
            f,
            ",freq={},amp={},bursts={bursts},duration={},rate={}",
            self.spec.carrier_hz, self.spec.amplitude, self.duration, self.sample_rate
        )
    }
}

fn parse_bursts(s: &str) -> Option<Vec<(f64, f64)>> {
    if s == "none" {
        return Some(Vec::new());
    }
    s.split(';')
        .map(|iv| {
            let (a, b) = iv.split_once('-')?;
            Some((a.trim().parse().ok()?, b.trim().parse().ok()?))
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub enum Source {
    Wav(PathBuf),
    Synth(SynthDescription),
}

/// Fully resolved settings for one invocation.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub source: Option<Source>,
    pub window: usize,
    pub n_fft: usize,
    pub hop: usize,
    pub levels: usize,
    /// `None` means the subcommand's default set.
    pub criteria: Option<Vec<Criterion>>,
    /// `None` means the subcommand's default levels.
    pub sigmas: Option<Vec<f64>>,
    pub seed: u64,
    pub k_sigma: f64,
    pub calib_secs: f64,
    pub min_event_frames: usize,
    pub format: Option<Format>,
    pub output: Option<PathBuf>,
}

impl RunConfig {
    /// Merges defaults, the config file named by `--config`, the seed
    /// environment variable and the flags, in increasing precedence (the
    /// environment only supplies a seed that neither file nor flag sets).
    pub fn resolve(args: &RunArgs, env_seed: Option<String>) -> Result<Self, CliError> {
        let file = match &args.config {
            Some(path) => read_config_file(path)?,
            None => FileConfig::default(),
        };
        let input = args.input.clone().or(file.input);
        let synth = args.synth.clone().or(file.synth);
        let source = match (input, synth) {
            (Some(_), Some(_)) => {
                return Err(CliError::Usage(
                    "give either --input or --synth, not both".into(),
                ))
            }
            (Some(path), None) => Some(Source::Wav(path)),
            (None, Some(s)) => Some(Source::Synth(s.parse()?)),
            (None, None) => None,
        };
        let window = args.window.or(file.window).unwrap_or(2048);
        let n_fft = args.n_fft.or(file.n_fft).unwrap_or(window);
        let hop = args.hop.or(file.hop).unwrap_or(window);
        let levels = args.levels.or(file.levels).unwrap_or(64);
        let allow_non_pow2 = args.allow_non_pow2 || file.allow_non_pow2.unwrap_or(false);
        if window == 0 || hop == 0 || levels == 0 {
            return Err(CliError::Usage(
                "window, hop and levels must be positive".into(),
            ));
        }
        if n_fft < window {
            return Err(CliError::Usage(format!(
                "n_fft ({n_fft}) must be at least the window ({window})"
            )));
        }
        if !allow_non_pow2 && !(window.is_power_of_two() && n_fft.is_power_of_two()) {
            return Err(CliError::Usage(format!(
                "window ({window}) and n_fft ({n_fft}) must be powers of two (or pass --allow-non-pow2)"
            )));
        }
        let criteria = args
            .criteria
            .clone()
            .or(file.criteria)
            .map(|s| parse_criteria(&s))
            .transpose()?;
        let sigmas = match (&args.sigma, file.sigma) {
            (Some(s), _) => Some(parse_list(s, "--sigma")?),
            (None, Some(SigmaValue::One(x))) => Some(vec![x]),
            (None, Some(SigmaValue::Many(xs))) => Some(xs),
            (None, Some(SigmaValue::Text(s))) => Some(parse_list(&s, "sigma")?),
            (None, None) => None,
        };
        if let Some(xs) = &sigmas {
            if xs.is_empty() || xs.iter().any(|s| !(*s >= 0.0 && s.is_finite())) {
                return Err(CliError::Usage(
                    "noise sigmas must be finite and >= 0".into(),
                ));
            }
        }
        let seed = match args.seed.or(file.seed) {
            Some(s) => s,
            None => match env_seed {
                Some(v) => v.trim().parse().map_err(|_| {
                    CliError::Usage(format!("{SEED_ENV}='{v}' is not an unsigned integer"))
                })?,
                None => 0,
            },
        };
        let k_sigma = args.k_sigma.or(file.k_sigma).unwrap_or(3.0);
        let calib_secs = args.calib_secs.or(file.calib_secs).unwrap_or(3.0);
        let min_event_frames = args.min_event_frames.or(file.min_event_frames).unwrap_or(2);
        if !(k_sigma > 0.0 && k_sigma.is_finite()) {
            return Err(CliError::Usage(format!(
                "k_sigma must be > 0, got {k_sigma}"
            )));
        }
        if !(calib_secs > 0.0 && calib_secs.is_finite()) {
            return Err(CliError::Usage(format!(
                "calib_secs must be > 0, got {calib_secs}"
            )));
        }
        if min_event_frames == 0 {
            return Err(CliError::Usage("min_event_frames must be >= 1".into()));
        }
        let format = args
            .format
            .clone()
            .or(file.format)
            .map(|f| f.parse())
            .transpose()?;
        let output = args.output.clone().or(file.output);
        Ok(Self {
            source,
            window,
            n_fft,
            hop,
            levels,
            criteria,
            sigmas,
            seed,
            k_sigma,
            calib_secs,
            min_event_frames,
            format,
            output,
        })
    }

    /// The single noise level for analyze, detect and synth.
    pub fn single_sigma(&self) -> Result<f64, CliError> {
        match self.sigmas.as_deref() {
            None => Ok(REFERENCE_SIGMA),
            Some([s]) => Ok(*s),
            Some(_) => Err(CliError::Usage(
                "this command takes a single --sigma value".into(),
            )),
        }
    }
}

fn read_config_file(path: &Path) -> Result<FileConfig, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    toml::from_str(&text)
        .map_err(|e| CliError::Usage(format!("{}: {}", path.display(), e.message())))
}

pub fn parse_criteria(s: &str) -> Result<Vec<Criterion>, CliError> {
    let list: Vec<Criterion> = s
        .split(',')
        .map(str::trim)
        .filter(|x| !x.is_empty())
        .map(|name| {
            name.parse::<Criterion>()
                .map_err(|e| CliError::Usage(e.to_string()))
        })
        .collect::<Result<_, _>>()?;
    if list.is_empty() {
        return Err(CliError::Usage("empty criteria list".into()));
    }
    Ok(list)
}

fn parse_list(s: &str, what: &str) -> Result<Vec<f64>, CliError> {
    s.split(',')
        .map(str::trim)
        .filter(|x| !x.is_empty())
        .map(|x| {
            x.parse::<f64>()
                .map_err(|_| CliError::Usage(format!("{what}: '{x}' is not a number")))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn resolve(args: RunArgs) -> Result<RunConfig, CliError> {
        RunConfig::resolve(&args, None)
    }

    #[test]
    fn defaults() {
        let c = resolve(RunArgs::default()).unwrap();
        assert_eq!((c.window, c.n_fft, c.hop, c.levels), (2048, 2048, 2048, 64));
        assert_eq!(
            (c.k_sigma, c.calib_secs, c.min_event_frames, c.seed),
            (3.0, 3.0, 2, 0)
        );
        assert_eq!(c.single_sigma().unwrap(), REFERENCE_SIGMA);
        assert!(c.source.is_none());
    }

    #[test]
    fn file_then_flags_then_env() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.conf");
        std::fs::write(
            &path,
            "window = 1024\nsigma = \"500, 1000\"\nseed = 5\ncriteria = \"c_sq,h_s\"\n",
        )
        .unwrap();
        let args = RunArgs {
            config: Some(path.clone()),
            window: Some(512),
            ..Default::default()
        };
        let c = RunConfig::resolve(&args, Some("9".into())).unwrap();
        assert_eq!(c.window, 512);
        assert_eq!(c.sigmas, Some(vec![500.0, 1000.0]));
        assert_eq!(c.seed, 5);
        assert_eq!(
            c.criteria,
            Some(vec![Criterion::CSq, Criterion::SpectralEntropy])
        );
        assert!(c.single_sigma().is_err());

        std::fs::write(&path, "sigma = [1.5, 2.5]\n").unwrap();
        let c = RunConfig::resolve(
            &RunArgs {
                config: Some(path.clone()),
                ..Default::default()
            },
            Some("9".into()),
        )
        .unwrap();
        assert_eq!(c.seed, 9);
        assert_eq!(c.sigmas, Some(vec![1.5, 2.5]));

        std::fs::write(&path, "bogus = 1\n").unwrap();
        assert!(matches!(
            RunConfig::resolve(
                &RunArgs {
                    config: Some(path),
                    ..Default::default()
                },
                None
            ),
            Err(CliError::Usage(_))
        ));
        assert!(RunConfig::resolve(&RunArgs::default(), Some("x".into())).is_err());
    }

    #[test]
    fn validation() {
        assert!(resolve(RunArgs {
            window: Some(1000),
            ..Default::default()
        })
        .is_err());
        assert!(resolve(RunArgs {
            window: Some(1000),
            allow_non_pow2: true,
            ..Default::default()
        })
        .is_ok());
        assert!(resolve(RunArgs {
            n_fft: Some(1024),
            ..Default::default()
        })
        .is_err());
        assert!(resolve(RunArgs {
            criteria: Some("c_sq,nope".into()),
            ..Default::default()
        })
        .is_err());
        assert!(resolve(RunArgs {
            sigma: Some("-1".into()),
            ..Default::default()
        })
        .is_err());
        assert!(resolve(RunArgs {
            k_sigma: Some(0.0),
            ..Default::default()
        })
        .is_err());
        let both = RunArgs {
            input: Some("a.wav".into()),
            synth: Some("kind=tone".into()),
            ..Default::default()
        };
        assert!(resolve(both).is_err());
    }

    #[test]
    fn synth_strings() {
        let d: SynthDescription =
            "kind=tone,freq=1000,amp=50,bursts=1-2;3-3.5,duration=4,rate=8000"
                .parse()
                .unwrap();
        assert_eq!(d.spec.carrier_hz, 1000.0);
        assert_eq!(d.spec.bursts, vec![(1.0, 2.0), (3.0, 3.5)]);
        assert_eq!(d.sample_rate, 8000);
        assert_eq!(d.to_string().parse::<SynthDescription>().unwrap(), d);
        let preset: SynthDescription = "".parse().unwrap();
        assert_eq!(preset, SynthDescription::default());
        let chirp: SynthDescription = "kind=chirp,end=3000,bursts=none".parse().unwrap();
        assert_eq!(chirp.spec.kind, SynthKind::Chirp { end_hz: 3000.0 });
        assert_eq!(
            chirp.to_string().parse::<SynthDescription>().unwrap(),
            chirp
        );
        for bad in [
            "kind=saw",
            "freq=abc",
            "bursts=5",
            "bursts=1-20",
            "duration=0",
            "nokey",
        ] {
            assert!(bad.parse::<SynthDescription>().is_err(), "{bad}");
        }
    }
}
