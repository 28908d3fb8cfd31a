//! Waveform containers and elementary transforms.
//!
//! Samples are stored as `f64` amplitudes normalized to [-1, 1], one vector
//! per channel. All downstream DSP (offset estimation, NLMS cancellation,
//! envelopes, spectrograms) operates on these.

mod wav;

pub use wav::{load_wav, write_wav, BitDepth};

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use crate::error::{Error, Result};

/// A sampled waveform: 1 or 2 channels of equal length at a fixed rate.
#[derive(Debug, Clone, PartialEq)]
pub struct AudioTrack {
    channels: Vec<Vec<f64>>,
    sample_rate: u32,
}

impl AudioTrack {
    /// Build a track from per-channel sample vectors.
    pub fn new(channels: Vec<Vec<f64>>, sample_rate: u32) -> Result<Self> {
        if sample_rate == 0 {
            return Err(Error::BadParam("sample_rate must be positive".into()));
        }
        if channels.is_empty() || channels.len() > 2 {
            return Err(Error::BadParam(format!(
                "expected 1 or 2 channels, got {}",
                channels.len()
            )));
        }
        if channels.len() == 2 && channels[0].len() != channels[1].len() {
            return Err(Error::LengthMismatch {
                a: channels[0].len(),
                b: channels[1].len(),
            });
        }
        Ok(AudioTrack {
            channels,
            sample_rate,
        })
    }

    pub fn mono(samples: Vec<f64>, sample_rate: u32) -> Self {
        AudioTrack {
            channels: vec![samples],
            sample_rate,
        }
    }

    pub fn stereo(left: Vec<f64>, right: Vec<f64>, sample_rate: u32) -> Result<Self> {
        AudioTrack::new(vec![left, right], sample_rate)
    }

    pub fn sample_rate(&self) -> u32 {
        self.sample_rate
    }

    pub fn channel_count(&self) -> usize {
        self.channels.len()
    }

    pub fn is_stereo(&self) -> bool {
        self.channels.len() == 2
    }

    /// Samples per channel.
    pub fn len(&self) -> usize {
        self.channels[0].len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn duration_sec(&self) -> f64 {
        self.len() as f64 / self.sample_rate as f64
    }

    pub fn channel(&self, index: usize) -> &[f64] {
        &self.channels[index]
    }

    /// The single channel of a mono track.
    pub fn samples(&self) -> Result<&[f64]> {
        if self.channels.len() != 1 {
            return Err(Error::NotMono);
        }
        Ok(&self.channels[0])
    }
}

/// Frame-level energy sequence with its framing geometry.
///
/// `origin_sec` is the time of the first frame center; frame `i` is centered
/// at `origin_sec + i * hop_sec`.
#[derive(Debug, Clone, PartialEq)]
pub struct Envelope {
    pub values: Vec<f64>,
    pub frame_sec: f64,
    pub hop_sec: f64,
    pub origin_sec: f64,
}

impl Envelope {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Frame-major magnitude spectrogram with the same framing geometry as
/// [`Envelope`].
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrogram {
    /// `magnitudes[frame][bin]`, every row of length `bins`.
    pub magnitudes: Vec<Vec<f64>>,
    pub bins: usize,
    pub frame_sec: f64,
    pub hop_sec: f64,
    pub origin_sec: f64,
}

impl Spectrogram {
    pub fn frames(&self) -> usize {
        self.magnitudes.len()
    }
}

/// Mono mixdown: stereo becomes (L+R)/2, mono is returned unchanged.
pub fn to_mono(track: &AudioTrack) -> AudioTrack {
    match track.channels.len() {
        1 => track.clone(),
        _ => {
            let (l, r) = (&track.channels[0], &track.channels[1]);
            let mixed = l.iter().zip(r).map(|(a, b)| (a + b) / 2.0).collect();
            AudioTrack::mono(mixed, track.sample_rate)
        }
    }
}

/// Mid/side decomposition: mid = (L+R)/2, side = (L-R)/2.
///
/// Reconstruction is exact to float rounding: L = mid+side, R = mid-side.
pub fn mid_side(track: &AudioTrack) -> Result<(AudioTrack, AudioTrack)> {
    if !track.is_stereo() {
        return Err(Error::NotStereo);
    }
    let (l, r) = (&track.channels[0], &track.channels[1]);
    let mid = l.iter().zip(r.iter()).map(|(a, b)| (a + b) / 2.0).collect();
    let side = l.iter().zip(r.iter()).map(|(a, b)| (a - b) / 2.0).collect();
    Ok((
        AudioTrack::mono(mid, track.sample_rate),
        AudioTrack::mono(side, track.sample_rate),
    ))
}

/// Framing shared by [`energy_envelope`] and [`spectrogram`]: full windows at
/// `hop` spacing, plus one final partial window when at least half a frame of
/// samples remains past the last full window.
fn frame_starts(n: usize, frame_len: usize, hop_len: usize) -> Vec<(usize, usize)> {
    let mut spans = Vec::new();
    let mut start = 0usize;
    while start + frame_len <= n {
        spans.push((start, frame_len));
        start += hop_len;
    }
    if start < n && 2 * (n - start) >= frame_len {
        spans.push((start, n - start));
    }
    spans
}

fn framing_params(track: &AudioTrack, frame_sec: f64, hop_sec: f64) -> Result<(usize, usize)> {
    if !(frame_sec > 0.0) || !(hop_sec > 0.0) {
        return Err(Error::BadParam(
            "frame_sec and hop_sec must be positive".into(),
        ));
    }
    let rate = track.sample_rate as f64;
    let frame_len = ((frame_sec * rate).round() as usize).max(1);
    let hop_len = ((hop_sec * rate).round() as usize).max(1);
    Ok((frame_len, hop_len))
}

/// Per-window RMS energy of a mono track.
pub fn energy_envelope(track: &AudioTrack, frame_sec: f64, hop_sec: f64) -> Result<Envelope> {
    let samples = track.samples()?;
    if samples.is_empty() {
        return Err(Error::EmptyInput);
    }
    let (frame_len, hop_len) = framing_params(track, frame_sec, hop_sec)?;
    let rate = track.sample_rate as f64;
    let values = frame_starts(samples.len(), frame_len, hop_len)
        .into_iter()
        .map(|(start, len)| {
            let window = &samples[start..start + len];
            (window.iter().map(|x| x * x).sum::<f64>() / len as f64).sqrt()
        })
        .collect();
    Ok(Envelope {
        values,
        frame_sec: frame_len as f64 / rate,
        hop_sec: hop_len as f64 / rate,
        origin_sec: frame_len as f64 / (2.0 * rate),
    })
}

/// Periodic Hann window; a length-1 window degenerates to a pass-through.
fn hann(len: usize) -> Vec<f64> {
    if len <= 1 {
        return vec![1.0; len];
    }
    (0..len)
        .map(|i| 0.5 * (1.0 - (2.0 * std::f64::consts::PI * i as f64 / len as f64).cos()))
        .collect()
}

/// Magnitude spectrogram of a mono track: Hann-windowed frames, zero-padded
/// to the next power of two, one-sided bins (fft_len/2 + 1).
pub fn spectrogram(track: &AudioTrack, frame_sec: f64, hop_sec: f64) -> Result<Spectrogram> {
    let samples = track.samples()?;
    if samples.is_empty() {
        return Err(Error::EmptyInput);
    }
    let (frame_len, hop_len) = framing_params(track, frame_sec, hop_sec)?;
    let rate = track.sample_rate as f64;
    let fft_len = frame_len.next_power_of_two();
    let bins = fft_len / 2 + 1;
    let window = hann(frame_len);

    let mut planner = FftPlanner::new();
    let fft = planner.plan_fft_forward(fft_len);
    let mut magnitudes = Vec::new();
    for (start, len) in frame_starts(samples.len(), frame_len, hop_len) {
        let mut buf = vec![Complex::new(0.0, 0.0); fft_len];
        for i in 0..len {
            buf[i] = Complex::new(samples[start + i] * window[i], 0.0);
        }
        fft.process(&mut buf);
        magnitudes.push(buf[..bins].iter().map(|c| c.norm()).collect());
    }
    Ok(Spectrogram {
        magnitudes,
        bins,
        frame_sec: frame_len as f64 / rate,
        hop_sec: hop_len as f64 / rate,
        origin_sec: frame_len as f64 / (2.0 * rate),
    })
}
