//! RIFF/WAVE reading and writing: PCM 16-bit and IEEE-float 32-bit,
//! little-endian, 1-2 channels. No resampling, no other codecs.

use std::path::Path;

use crate::audio::AudioTrack;
use crate::error::{Error, Result};

/// Output sample encoding for [`write_wav`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BitDepth {
    /// 16-bit signed PCM.
    Pcm16,
    /// 32-bit IEEE float.
    Float32,
}

fn format_err(path: &Path, reason: impl Into<String>) -> Error {
    Error::Format {
        path: path.to_path_buf(),
        reason: reason.into(),
    }
}

fn map_hound(path: &Path, err: hound::Error) -> Error {
    match err {
        hound::Error::IoError(e) => Error::io(path, e),
        other => format_err(path, other.to_string()),
    }
}

/// Once the header has parsed, a failed sample read on a regular file means
/// the data chunk is truncated or corrupt.
fn map_hound_read(path: &Path, err: hound::Error) -> Error {
    match err {
        hound::Error::IoError(e)
            if matches!(
                e.kind(),
                std::io::ErrorKind::UnexpectedEof | std::io::ErrorKind::Other
            ) =>
        {
            format_err(path, "truncated data chunk")
        }
        other => map_hound(path, other),
    }
}

/// Load a WAV file into normalized floating amplitudes.
///
/// 16-bit PCM samples are divided by 32768; float samples are taken as-is.
/// The sample rate is preserved; anything other than 1-2 channels or the two
/// supported encodings is a format error.
pub fn load_wav(path: impl AsRef<Path>) -> Result<AudioTrack> {
    let path = path.as_ref();
    let mut reader = hound::WavReader::open(path).map_err(|e| map_hound(path, e))?;
    let spec = reader.spec();
    if spec.channels == 0 || spec.channels > 2 {
        return Err(format_err(
            path,
            format!("unsupported channel count {}", spec.channels),
        ));
    }
    let interleaved: Vec<f64> = match (spec.sample_format, spec.bits_per_sample) {
        (hound::SampleFormat::Int, 16) => reader
            .samples::<i16>()
            .map(|s| s.map(|v| v as f64 / 32768.0))
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| map_hound_read(path, e))?,
        (hound::SampleFormat::Float, 32) => reader
            .samples::<f32>()
            .map(|s| s.map(|v| v as f64))
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| map_hound_read(path, e))?,
        (fmt, bits) => {
            return Err(format_err(
                path,
                format!("unsupported encoding: {bits}-bit {fmt:?}"),
            ))
        }
    };
    let n_ch = spec.channels as usize;
    if interleaved.len() % n_ch != 0 {
        return Err(format_err(path, "truncated data chunk"));
    }
    let mut channels = vec![Vec::with_capacity(interleaved.len() / n_ch); n_ch];
    for (i, v) in interleaved.into_iter().enumerate() {
        channels[i % n_ch].push(v);
    }
    AudioTrack::new(channels, spec.sample_rate)
}

/// Write a track as WAV; amplitudes outside [-1, 1] saturate.
pub fn write_wav(track: &AudioTrack, path: impl AsRef<Path>, depth: BitDepth) -> Result<()> {
    let path = path.as_ref();
    let spec = hound::WavSpec {
        channels: track.channel_count() as u16,
        sample_rate: track.sample_rate(),
        bits_per_sample: match depth {
            BitDepth::Pcm16 => 16,
            BitDepth::Float32 => 32,
        },
        sample_format: match depth {
            BitDepth::Pcm16 => hound::SampleFormat::Int,
            BitDepth::Float32 => hound::SampleFormat::Float,
        },
    };
    let mut writer = hound::WavWriter::create(path, spec).map_err(|e| map_hound(path, e))?;
    for i in 0..track.len() {
        for ch in 0..track.channel_count() {
            let v = track.channel(ch)[i];
            match depth {
                BitDepth::Pcm16 => {
                    let scaled = (v * 32768.0).round().clamp(-32768.0, 32767.0) as i16;
                    writer.write_sample(scaled).map_err(|e| map_hound(path, e))?;
                }
                BitDepth::Float32 => {
                    let clipped = v.clamp(-1.0, 1.0) as f32;
                    writer
                        .write_sample(clipped)
                        .map_err(|e| map_hound(path, e))?;
                }
            }
        }
    }
    writer.finalize().map_err(|e| map_hound(path, e))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn temp_path(name: &str) -> std::path::PathBuf {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join(name);
        // keep the dir alive for the remainder of the test
        std::mem::forget(dir);
        path
    }

    #[test]
    fn header_round_trip_stereo_16bit() {
        let rate = 44100;
        let n = rate as usize; // 1 s
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let l: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let r: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let t = AudioTrack::stereo(l, r, rate).unwrap();
        let path = temp_path("rt.wav");
        write_wav(&t, &path, BitDepth::Pcm16).unwrap();
        let back = load_wav(&path).unwrap();
        assert_eq!(back.channel_count(), 2);
        assert_eq!(back.sample_rate(), rate);
        assert_eq!(back.len(), n);
    }

    #[test]
    fn pcm16_round_trip_within_quantization() {
        let samples = vec![0.0, 0.5, -0.5, 0.999, -0.999, 1.0, -1.0];
        let t = AudioTrack::mono(samples.clone(), 8000);
        let path = temp_path("q.wav");
        write_wav(&t, &path, BitDepth::Pcm16).unwrap();
        let back = load_wav(&path).unwrap();
        for (a, b) in samples.iter().zip(back.samples().unwrap()) {
            assert!((a - b).abs() <= 1.0 / 32768.0, "{a} vs {b}");
        }
    }

    #[test]
    fn float32_round_trip_is_lossless_at_f32() {
        let samples = vec![0.0, 0.25, -0.75, 1.0];
        let t = AudioTrack::mono(samples.clone(), 8000);
        let path = temp_path("f.wav");
        write_wav(&t, &path, BitDepth::Float32).unwrap();
        let back = load_wav(&path).unwrap();
        for (a, b) in samples.iter().zip(back.samples().unwrap()) {
            assert_eq!(*a as f32, *b as f32);
        }
    }

    #[test]
    fn zero_track_writes_zero_data() {
        let t = AudioTrack::mono(vec![0.0; 100], 8000);
        let path = temp_path("z.wav");
        write_wav(&t, &path, BitDepth::Pcm16).unwrap();
        let bytes = std::fs::read(&path).unwrap();
        // everything after the 44-byte canonical header must be zero
        assert!(bytes[44..].iter().all(|&b| b == 0));
    }

    #[test]
    fn out_of_range_sample_saturates() {
        let t = AudioTrack::mono(vec![2.0, -2.0], 8000);
        let path = temp_path("s.wav");
        write_wav(&t, &path, BitDepth::Pcm16).unwrap();
        let mut reader = hound::WavReader::open(&path).unwrap();
        let raw: Vec<i16> = reader.samples::<i16>().map(|s| s.unwrap()).collect();
        assert_eq!(raw, vec![32767, -32768]);
    }

    #[test]
    fn truncated_data_chunk_is_format_error() {
        let t = AudioTrack::mono(vec![0.1; 1000], 8000);
        let path = temp_path("t.wav");
        write_wav(&t, &path, BitDepth::Pcm16).unwrap();
        let bytes = std::fs::read(&path).unwrap();
        std::fs::write(&path, &bytes[..bytes.len() - 501]).unwrap();
        match load_wav(&path) {
            Err(Error::Format { .. }) => {}
            other => panic!("expected Format error, got {other:?}"),
        }
    }

    #[test]
    fn non_wav_is_format_error() {
        let path = temp_path("n.wav");
        std::fs::write(&path, b"this is not a riff file at all........").unwrap();
        assert!(matches!(load_wav(&path), Err(Error::Format { .. })));
    }

    #[test]
    fn missing_file_is_io_error() {
        assert!(matches!(
            load_wav("/nonexistent/nope.wav"),
            Err(Error::Io { .. })
        ));
    }
}
