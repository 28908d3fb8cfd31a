//! Declarative pipeline configuration.
//!
//! A flat TOML file with one section per module; every key has a documented
//! default and unknown keys are rejected. An empty file therefore yields the
//! stock pipeline (min segment 1 s, end padding 2 s, reliability cutoff 0.5).

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Default, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct Config {
    pub dsp: DspSection,
    pub sync: SyncSection,
    pub nlms: NlmsSection,
    pub isolate: IsolateSection,
    pub segment: SegmentSection,
    pub align: AlignSection,
    pub corpus: CorpusSection,
    /// Per-movie jobs for the `pipeline` subcommand.
    pub jobs: Vec<JobSpec>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct DspSection {
    /// Analysis window length in seconds.
    pub frame_sec: f64,
    /// Window hop in seconds.
    pub hop_sec: f64,
}

impl Default for DspSection {
    fn default() -> Self {
        DspSection {
            frame_sec: 0.064,
            hop_sec: 0.016,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct SyncSection {
    /// Offset search half-window in seconds.
    pub max_lag_sec: f64,
}

impl Default for SyncSection {
    fn default() -> Self {
        SyncSection { max_lag_sec: 2.0 }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct NlmsSection {
    pub taps: usize,
    pub mu: f64,
    pub eps: f64,
}

impl Default for NlmsSection {
    fn default() -> Self {
        NlmsSection {
            taps: 64,
            mu: 0.5,
            eps: 1e-6,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct IsolateSection {
    /// Side-bleed subtraction factor for center extraction; 0 keeps plain mid.
    pub center_side_gain: f64,
}

impl Default for IsolateSection {
    fn default() -> Self {
        IsolateSection {
            center_side_gain: 0.0,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct SegmentSection {
    /// Fixed activity threshold; when absent the per-movie automatic
    /// threshold (quantile x factor) is used.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub threshold: Option<f64>,
    pub quantile: f64,
    pub factor: f64,
    /// Lower bound for the automatic threshold. Keeps numerically-silent
    /// residuals (identical input tracks cancel to float rounding) from
    /// turning into spurious activity; well below 16-bit quantization noise.
    pub threshold_floor: f64,
    pub min_seg_sec: f64,
    pub min_gap_sec: f64,
    pub pad_end_sec: f64,
}

impl Default for SegmentSection {
    fn default() -> Self {
        SegmentSection {
            threshold: None,
            quantile: 0.5,
            factor: 3.0,
            threshold_floor: 1e-6,
            min_seg_sec: 1.0,
            min_gap_sec: 0.5,
            pad_end_sec: 2.0,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct AlignSection {
    /// Penalty per skipped element in the script/subtitle alignment.
    pub gap_penalty: f64,
    /// Reliability cutoff for aligned sentences.
    pub min_score: f64,
}

impl Default for AlignSection {
    fn default() -> Self {
        AlignSection {
            gap_penalty: 0.1,
            min_score: 0.5,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct CorpusSection {
    /// Entries fully inside the first/last stretch of this length are
    /// dropped as introduction/ending material.
    pub intro_outro_sec: f64,
    /// Minimum clip length; shorter clips are symmetrically expanded.
    pub min_clip_sec: f64,
}

impl Default for CorpusSection {
    fn default() -> Self {
        CorpusSection {
            intro_outro_sec: 90.0,
            min_clip_sec: 2.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SegmentationMode {
    Auto,
    Semi,
}

impl Default for SegmentationMode {
    fn default() -> Self {
        SegmentationMode::Auto
    }
}

/// One movie's inputs for the `pipeline` subcommand.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct JobSpec {
    pub id: String,
    pub movie_wav: PathBuf,
    pub ad_wav: PathBuf,
    #[serde(default)]
    pub mode: SegmentationMode,
    /// Subtitles for the script-alignment stage.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub srt: Option<PathBuf>,
    /// Movie script for the script-alignment stage.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub script: Option<PathBuf>,
    /// AD transcript, one sentence per line, paired with detected segments.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub transcript: Option<PathBuf>,
    /// Movie duration override; defaults to the movie track duration.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub duration_sec: Option<f64>,
}

impl Config {
    /// Parse a TOML config. Unknown keys are rejected with their key path;
    /// an empty string yields all defaults.
    pub fn from_toml(text: &str) -> Result<Config> {
        let cfg: Config =
            toml::from_str(text).map_err(|e| Error::BadConfig(e.message().to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Load a TOML config file; a missing `path` of `None` yields defaults.
    pub fn load(path: impl AsRef<Path>) -> Result<Config> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Config::from_toml(&text)
    }

    pub fn validate(&self) -> Result<()> {
        fn positive(name: &str, v: f64) -> Result<()> {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::BadConfig(format!("{name} must be positive, got {v}")))
            }
        }
        positive("dsp.frame_sec", self.dsp.frame_sec)?;
        positive("dsp.hop_sec", self.dsp.hop_sec)?;
        positive("sync.max_lag_sec", self.sync.max_lag_sec)?;
        if self.nlms.taps == 0 {
            return Err(Error::BadConfig("nlms.taps must be at least 1".into()));
        }
        if !(self.nlms.mu > 0.0 && self.nlms.mu <= 2.0) {
            return Err(Error::BadConfig(format!(
                "nlms.mu must be in (0, 2], got {}",
                self.nlms.mu
            )));
        }
        positive("nlms.eps", self.nlms.eps)?;
        if !(self.segment.quantile > 0.0 && self.segment.quantile < 1.0) {
            return Err(Error::BadConfig(format!(
                "segment.quantile must be in (0, 1), got {}",
                self.segment.quantile
            )));
        }
        positive("segment.factor", self.segment.factor)?;
        positive("segment.threshold_floor", self.segment.threshold_floor)?;
        if let Some(t) = self.segment.threshold {
            positive("segment.threshold", t)?;
        }
        for (name, v) in [
            ("segment.min_seg_sec", self.segment.min_seg_sec),
            ("segment.min_gap_sec", self.segment.min_gap_sec),
            ("segment.pad_end_sec", self.segment.pad_end_sec),
            ("align.gap_penalty", self.align.gap_penalty),
            ("align.min_score", self.align.min_score),
            ("corpus.intro_outro_sec", self.corpus.intro_outro_sec),
        ] {
            if !(v >= 0.0) || !v.is_finite() {
                return Err(Error::BadConfig(format!(
                    "{name} must be non-negative, got {v}"
                )));
            }
        }
        positive("corpus.min_clip_sec", self.corpus.min_clip_sec)?;
        Ok(())
    }
}
