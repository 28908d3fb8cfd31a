//! Narration segment detection and the end-to-end segmentation pipelines.
//!
//! An energy envelope (NLMS residual in the automatic path, spectrogram
//! difference in the semi-automatic one) is thresholded into active frames;
//! active runs separated by short gaps are merged, runs still shorter than
//! the minimum segment length are discarded, and every surviving segment is
//! end-padded to compensate for narration lagging the scene.

use serde::{Deserialize, Serialize};

use crate::audio::{energy_envelope, spectrogram, to_mono, AudioTrack, Envelope};
use crate::config::{Config, SegmentationMode};
use crate::error::{Error, Result};
use crate::isolate::{extract_center, nlms_cancel, spectral_difference};
use crate::sync::{apply_offset, estimate_offset, OffsetEstimate};

/// A timestamped AD narration interval with its envelope statistics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NarrationSegment {
    pub start_sec: f64,
    pub end_sec: f64,
    pub peak_energy: f64,
    pub mean_energy: f64,
}

impl NarrationSegment {
    pub fn duration_sec(&self) -> f64 {
        self.end_sec - self.start_sec
    }
}

/// Threshold an envelope into segments.
///
/// Frames strictly above `threshold` are active. Adjacent active runs whose
/// gap is shorter than `min_gap_sec` merge first; merged runs shorter than
/// `min_seg_sec` are then discarded. Returned segments are sorted and
/// disjoint.
pub fn threshold_segments(
    env: &Envelope,
    threshold: f64,
    min_seg_sec: f64,
    min_gap_sec: f64,
) -> Result<Vec<NarrationSegment>> {
    if env.is_empty() {
        return Err(Error::EmptyEnvelope);
    }
    if !(threshold > 0.0) {
        return Err(Error::BadParam("threshold must be positive".into()));
    }
    if min_seg_sec < 0.0 || min_gap_sec < 0.0 {
        return Err(Error::BadParam(
            "min_seg_sec and min_gap_sec must be non-negative".into(),
        ));
    }

    // active frame runs as inclusive index ranges
    let mut runs: Vec<(usize, usize)> = Vec::new();
    for (i, &v) in env.values.iter().enumerate() {
        if v > threshold {
            match runs.last_mut() {
                Some((_, end)) if *end + 1 == i => *end = i,
                _ => runs.push((i, i)),
            }
        }
    }

    // merge across gaps shorter than min_gap_sec (gap measured between the
    // end of one run's window and the start of the next one's)
    let min_gap_frames = (min_gap_sec / env.hop_sec).ceil() as usize;
    let mut merged: Vec<(usize, usize)> = Vec::new();
    for (start, end) in runs {
        match merged.last_mut() {
            Some((_, prev_end)) if start - *prev_end <= min_gap_frames => *prev_end = end,
            _ => merged.push((start, end)),
        }
    }

    let frame = env.frame_sec;
    let hop = env.hop_sec;
    let origin = env.origin_sec;
    let mut segments = Vec::new();
    for (i, j) in merged {
        let start = (origin + i as f64 * hop - frame / 2.0).max(0.0);
        let end = origin + j as f64 * hop + frame / 2.0;
        if end - start < min_seg_sec {
            continue;
        }
        let window = &env.values[i..=j];
        segments.push(NarrationSegment {
            start_sec: start,
            end_sec: end,
            peak_energy: window.iter().cloned().fold(f64::MIN, f64::max),
            mean_energy: window.iter().sum::<f64>() / window.len() as f64,
        });
    }
    Ok(segments)
}

/// Automatically chosen threshold: `factor x quantile(values)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AutoThreshold {
    pub value: f64,
    /// The quantile collapsed to zero and the threshold fell back to
    /// `factor x mean`; callers should surface this as a warning.
    pub degenerate: bool,
}

/// Per-movie threshold selection, replacing the manual per-disc adjustment:
/// `factor x quantile(env)`, with a fallback to `factor x mean(env)` when the
/// quantile is zero (silent-dominated envelopes).
pub fn auto_threshold(env: &Envelope, quantile: f64, factor: f64) -> Result<AutoThreshold> {
    if env.is_empty() {
        return Err(Error::EmptyEnvelope);
    }
    if !(quantile > 0.0 && quantile < 1.0) {
        return Err(Error::BadParam("quantile must be in (0, 1)".into()));
    }
    if !(factor > 0.0) {
        return Err(Error::BadParam("factor must be positive".into()));
    }
    let mut sorted = env.values.clone();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let pos = quantile * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    let q = if lo == hi {
        sorted[lo]
    } else {
        sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
    };
    let value = factor * q;
    if value > 0.0 {
        Ok(AutoThreshold {
            value,
            degenerate: false,
        })
    } else {
        let mean = env.values.iter().sum::<f64>() / env.len() as f64;
        Ok(AutoThreshold {
            value: factor * mean,
            degenerate: true,
        })
    }
}

/// Extend each segment's end by `pad_end_sec`, clamped to the track
/// duration; overlaps created by the padding are merged.
pub fn pad_segments(
    segments: &[NarrationSegment],
    pad_end_sec: f64,
    track_duration_sec: f64,
) -> Vec<NarrationSegment> {
    let mut out: Vec<NarrationSegment> = Vec::with_capacity(segments.len());
    for seg in segments {
        let mut padded = seg.clone();
        padded.end_sec = (padded.end_sec + pad_end_sec).min(track_duration_sec);
        match out.last_mut() {
            Some(prev) if padded.start_sec < prev.end_sec => {
                // merge; energy stats combine weighted by original durations
                let (da, db) = (prev.duration_sec(), seg.duration_sec());
                prev.mean_energy =
                    (prev.mean_energy * da + seg.mean_energy * db) / (da + db);
                prev.peak_energy = prev.peak_energy.max(seg.peak_energy);
                prev.end_sec = prev.end_sec.max(padded.end_sec);
            }
            _ => out.push(padded),
        }
    }
    out
}

/// Warnings surfaced by the pipelines without failing them.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum PipelineWarning {
    /// The offset estimate's secondary peak is close to the primary one.
    LowConfidence { secondary_ratio: f64 },
    /// The automatic threshold quantile collapsed to zero.
    DegenerateThreshold,
}

/// Everything a segmentation run produces besides the segments themselves.
#[derive(Debug, Clone)]
pub struct PipelineResult {
    pub segments: Vec<NarrationSegment>,
    pub offset: OffsetEstimate,
    pub threshold: f64,
    pub warnings: Vec<PipelineWarning>,
}

fn isolate_voice(track: &AudioTrack, cfg: &Config) -> Result<AudioTrack> {
    if track.is_stereo() {
        extract_center(track, cfg.isolate.center_side_gain)
    } else {
        Ok(to_mono(track))
    }
}

fn detect(env: &Envelope, cfg: &Config, warnings: &mut Vec<PipelineWarning>) -> Result<(Vec<NarrationSegment>, f64)> {
    let threshold = match cfg.segment.threshold {
        Some(t) => t,
        None => {
            let auto = auto_threshold(env, cfg.segment.quantile, cfg.segment.factor)?;
            if auto.degenerate {
                warnings.push(PipelineWarning::DegenerateThreshold);
            }
            auto.value.max(cfg.segment.threshold_floor)
        }
    };
    if !(threshold > 0.0) {
        // an all-zero envelope has nothing to detect
        return Ok((Vec::new(), threshold));
    }
    let segments = threshold_segments(
        env,
        threshold,
        cfg.segment.min_seg_sec,
        cfg.segment.min_gap_sec,
    )?;
    Ok((segments, threshold))
}

fn align_tracks(
    movie: &AudioTrack,
    ad: &AudioTrack,
    cfg: &Config,
    warnings: &mut Vec<PipelineWarning>,
) -> Result<(AudioTrack, OffsetEstimate)> {
    let offset = estimate_offset(movie, ad, cfg.sync.max_lag_sec)?;
    if offset.is_low_confidence() {
        warnings.push(PipelineWarning::LowConfidence {
            secondary_ratio: offset.secondary_ratio,
        });
    }
    let aligned = if offset.offset_samples != 0 {
        apply_offset(ad, -offset.offset_samples)?
    } else {
        ad.clone()
    };
    Ok((aligned, offset))
}

/// Fully automatic segmentation: vocal isolation, offset alignment, NLMS
/// cancellation of the movie track out of the AD-mixed track, envelope
/// thresholding, end padding.
pub fn auto_ad_pipeline(
    movie: &AudioTrack,
    ad_mixed: &AudioTrack,
    cfg: &Config,
) -> Result<PipelineResult> {
    if movie.sample_rate() != ad_mixed.sample_rate() {
        return Err(Error::RateMismatch {
            a: movie.sample_rate(),
            b: ad_mixed.sample_rate(),
        });
    }
    let mut warnings = Vec::new();
    let movie_voice = isolate_voice(movie, cfg)?;
    let ad_voice = isolate_voice(ad_mixed, cfg)?;
    let (ad_aligned, offset) = align_tracks(&movie_voice, &ad_voice, cfg, &mut warnings)?;

    let n = movie_voice.len().min(ad_aligned.len());
    let movie_trim = AudioTrack::mono(movie_voice.samples()?[..n].to_vec(), movie.sample_rate());
    let ad_trim = AudioTrack::mono(ad_aligned.samples()?[..n].to_vec(), movie.sample_rate());

    let residual = nlms_cancel(&ad_trim, &movie_trim, cfg.nlms.taps, cfg.nlms.mu, cfg.nlms.eps)?;
    let env = energy_envelope(&residual, cfg.dsp.frame_sec, cfg.dsp.hop_sec)?;
    let (segments, threshold) = detect(&env, cfg, &mut warnings)?;
    let segments = pad_segments(&segments, cfg.segment.pad_end_sec, movie.duration_sec());
    Ok(PipelineResult {
        segments,
        offset,
        threshold,
        warnings,
    })
}

/// Semi-automatic segmentation: as [`auto_ad_pipeline`], but the activity
/// envelope is the per-frame spectrogram difference of the two aligned
/// streams instead of the NLMS residual.
pub fn semi_auto_pipeline(
    movie: &AudioTrack,
    ad_mixed: &AudioTrack,
    cfg: &Config,
) -> Result<PipelineResult> {
    if movie.sample_rate() != ad_mixed.sample_rate() {
        return Err(Error::RateMismatch {
            a: movie.sample_rate(),
            b: ad_mixed.sample_rate(),
        });
    }
    let mut warnings = Vec::new();
    let movie_voice = isolate_voice(movie, cfg)?;
    let ad_voice = isolate_voice(ad_mixed, cfg)?;
    let (ad_aligned, offset) = align_tracks(&movie_voice, &ad_voice, cfg, &mut warnings)?;

    let n = movie_voice.len().min(ad_aligned.len());
    let movie_trim = AudioTrack::mono(movie_voice.samples()?[..n].to_vec(), movie.sample_rate());
    let ad_trim = AudioTrack::mono(ad_aligned.samples()?[..n].to_vec(), movie.sample_rate());

    let spec_movie = spectrogram(&movie_trim, cfg.dsp.frame_sec, cfg.dsp.hop_sec)?;
    let spec_ad = spectrogram(&ad_trim, cfg.dsp.frame_sec, cfg.dsp.hop_sec)?;
    let env = spectral_difference(&spec_ad, &spec_movie)?;
    let (segments, threshold) = detect(&env, cfg, &mut warnings)?;
    let segments = pad_segments(&segments, cfg.segment.pad_end_sec, movie.duration_sec());
    Ok(PipelineResult {
        segments,
        offset,
        threshold,
        warnings,
    })
}

/// Run the configured segmentation mode.
pub fn run_pipeline(
    movie: &AudioTrack,
    ad_mixed: &AudioTrack,
    mode: SegmentationMode,
    cfg: &Config,
) -> Result<PipelineResult> {
    match mode {
        SegmentationMode::Auto => auto_ad_pipeline(movie, ad_mixed, cfg),
        SegmentationMode::Semi => semi_auto_pipeline(movie, ad_mixed, cfg),
    }
}

/// Segment list JSON: a sorted array of objects with fixed key order and
/// three-decimal fields, so identical runs are byte-identical.
pub fn segments_to_json(segments: &[NarrationSegment]) -> String {
    let mut out = String::from("[\n");
    for (i, s) in segments.iter().enumerate() {
        out.push_str(&format!(
            "  {{\"start_sec\": {:.3}, \"end_sec\": {:.3}, \"peak_energy\": {:.3}, \"mean_energy\": {:.3}}}{}\n",
            s.start_sec,
            s.end_sec,
            s.peak_energy,
            s.mean_energy,
            if i + 1 < segments.len() { "," } else { "" }
        ));
    }
    out.push_str("]\n");
    out
}

/// Parse a segment list written by [`segments_to_json`].
pub fn segments_from_json(text: &str) -> Result<Vec<NarrationSegment>> {
    serde_json::from_str(text).map_err(|e| Error::MalformedJson(e.to_string()))
}
