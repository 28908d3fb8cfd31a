//! Global temporal offset estimation between two mono tracks.
//!
//! The offset is the lag of track B relative to track A that maximizes the
//! normalized cross-correlation, computed over FFTs zero-padded to at least
//! `len(a) + len(b) - 1`. Normalization divides each lag's raw correlation by
//! the L2 norms of the overlapping windows, so the peak value is comparable
//! across inputs and bounded by 1 in magnitude.

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use crate::audio::AudioTrack;
use crate::error::{Error, Result};

/// Below this peak/second-peak ratio an estimate is flagged low-confidence
/// (center-mixed discs tend to produce flat correlation landscapes).
pub const LOW_CONFIDENCE_RATIO: f64 = 1.2;

/// Result of [`estimate_offset`].
#[derive(Debug, Clone, PartialEq)]
pub struct OffsetEstimate {
    /// Lag of track B relative to track A, in samples. Positive means B is
    /// delayed.
    pub offset_samples: i64,
    /// Normalized cross-correlation at the peak, in [-1, 1].
    pub peak_correlation: f64,
    /// Peak divided by the highest correlation outside the peak's
    /// neighborhood; clamped to [1, 1e6].
    pub secondary_ratio: f64,
}

impl OffsetEstimate {
    pub fn is_low_confidence(&self) -> bool {
        self.secondary_ratio < LOW_CONFIDENCE_RATIO
    }

    pub fn offset_sec(&self, sample_rate: u32) -> f64 {
        self.offset_samples as f64 / sample_rate as f64
    }
}

/// Normalized cross-correlation of `b` against `a` for lags in
/// `[-max_lag, +max_lag]`; element `k + max_lag` holds lag `k`.
///
/// Lag `k` correlates `a[n]` with `b[n + k]`, each window divided by its own
/// L2 norm over the overlap.
pub fn cross_correlation(a: &[f64], b: &[f64], max_lag: usize) -> Result<Vec<f64>> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptyInput);
    }
    if max_lag >= a.len().min(b.len()) {
        return Err(Error::LagTooLarge {
            max_lag,
            len: a.len().min(b.len()),
        });
    }
    let (la, lb) = (a.len(), b.len());
    let fft_len = (la + lb - 1).next_power_of_two();
    let mut planner = FftPlanner::new();
    let fft = planner.plan_fft_forward(fft_len);
    let ifft = planner.plan_fft_inverse(fft_len);

    let mut fa: Vec<Complex<f64>> = a
        .iter()
        .map(|&x| Complex::new(x, 0.0))
        .chain(std::iter::repeat(Complex::new(0.0, 0.0)))
        .take(fft_len)
        .collect();
    let mut fb: Vec<Complex<f64>> = b
        .iter()
        .map(|&x| Complex::new(x, 0.0))
        .chain(std::iter::repeat(Complex::new(0.0, 0.0)))
        .take(fft_len)
        .collect();
    fft.process(&mut fa);
    fft.process(&mut fb);
    let mut prod: Vec<Complex<f64>> = fa
        .iter()
        .zip(&fb)
        .map(|(x, y)| x.conj() * y)
        .collect();
    ifft.process(&mut prod);
    let scale = 1.0 / fft_len as f64;

    // prefix sums of squares for O(1) window norms
    let prefix = |xs: &[f64]| {
        let mut p = Vec::with_capacity(xs.len() + 1);
        p.push(0.0);
        for &x in xs {
            p.push(p.last().unwrap() + x * x);
        }
        p
    };
    let (pa, pb) = (prefix(a), prefix(b));

    let lag_range = -(max_lag as i64)..=(max_lag as i64);
    let mut out = Vec::with_capacity(2 * max_lag + 1);
    for k in lag_range {
        let raw = if k >= 0 {
            prod[k as usize].re * scale
        } else {
            prod[fft_len - (-k) as usize].re * scale
        };
        // overlap of a[n] with b[n+k]: n in [max(0,-k), min(la, lb-k))
        let n0 = 0.max(-k) as usize;
        let n1 = (la as i64).min(lb as i64 - k).max(n0 as i64) as usize;
        if n1 <= n0 {
            out.push(0.0);
            continue;
        }
        let na = (pa[n1] - pa[n0]).sqrt();
        let b0 = (n0 as i64 + k) as usize;
        let b1 = (n1 as i64 + k) as usize;
        let nb = (pb[b1] - pb[b0]).sqrt();
        if na == 0.0 || nb == 0.0 {
            out.push(0.0);
        } else {
            out.push(raw / (na * nb));
        }
    }
    Ok(out)
}

/// Estimate the lag of `b` relative to `a` maximizing normalized
/// cross-correlation. Ties break toward the smaller |lag|.
pub fn estimate_offset(a: &AudioTrack, b: &AudioTrack, max_lag_sec: f64) -> Result<OffsetEstimate> {
    if a.sample_rate() != b.sample_rate() {
        return Err(Error::RateMismatch {
            a: a.sample_rate(),
            b: b.sample_rate(),
        });
    }
    if !(max_lag_sec > 0.0) {
        return Err(Error::BadParam("max_lag_sec must be positive".into()));
    }
    let xa = a.samples()?;
    let xb = b.samples()?;
    let rate = a.sample_rate();
    let max_lag = (max_lag_sec * rate as f64).round() as usize;
    let corr = cross_correlation(xa, xb, max_lag)?;

    let mut best_idx = 0usize;
    let mut best = f64::NEG_INFINITY;
    for (i, &v) in corr.iter().enumerate() {
        let lag = i as i64 - max_lag as i64;
        let best_lag = best_idx as i64 - max_lag as i64;
        if v > best || (v == best && lag.abs() < best_lag.abs()) {
            best = v;
            best_idx = i;
        }
    }
    let offset_samples = best_idx as i64 - max_lag as i64;

    // second peak outside a 10 ms exclusion zone around the winner
    let exclusion = ((rate as f64 * 0.01).round() as usize).max(1);
    let second = corr
        .iter()
        .enumerate()
        .filter(|(i, _)| i.abs_diff(best_idx) > exclusion)
        .map(|(_, &v)| v)
        .fold(f64::NEG_INFINITY, f64::max);
    let secondary_ratio = if best <= 0.0 || !second.is_finite() {
        1.0
    } else if second <= 0.0 {
        1e6
    } else {
        (best / second).clamp(1.0, 1e6)
    };

    Ok(OffsetEstimate {
        offset_samples,
        peak_correlation: best,
        secondary_ratio,
    })
}

/// Materialize an estimated shift: positive offsets prepend zeros and drop
/// the tail, negative offsets drop the head and append zeros. Length and
/// channel layout are preserved.
pub fn apply_offset(track: &AudioTrack, offset_samples: i64) -> Result<AudioTrack> {
    let len = track.len();
    if offset_samples.unsigned_abs() as usize >= len && offset_samples != 0 {
        return Err(Error::OffsetTooLarge {
            offset: offset_samples,
            len,
        });
    }
    let shift_channel = |xs: &[f64]| -> Vec<f64> {
        if offset_samples >= 0 {
            let k = offset_samples as usize;
            let mut out = vec![0.0; k];
            out.extend_from_slice(&xs[..len - k]);
            out
        } else {
            let k = (-offset_samples) as usize;
            let mut out = Vec::with_capacity(len);
            out.extend_from_slice(&xs[k..]);
            out.resize(len, 0.0);
            out
        }
    };
    let channels = (0..track.channel_count())
        .map(|c| shift_channel(track.channel(c)))
        .collect();
    AudioTrack::new(channels, track.sample_rate())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn noise(n: usize, seed: u64) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()
    }

    /// Direct O(N·L) normalized cross-correlation; the independent oracle for
    /// the FFT path.
    fn direct_xcorr(a: &[f64], b: &[f64], max_lag: usize) -> Vec<f64> {
        let (la, lb) = (a.len() as i64, b.len() as i64);
        (-(max_lag as i64)..=(max_lag as i64))
            .map(|k| {
                let n0 = 0.max(-k);
                let n1 = la.min(lb - k);
                if n1 <= n0 {
                    return 0.0;
                }
                let mut dot = 0.0;
                let mut na = 0.0;
                let mut nb = 0.0;
                for n in n0..n1 {
                    let x = a[n as usize];
                    let y = b[(n + k) as usize];
                    dot += x * y;
                    na += x * x;
                    nb += y * y;
                }
                if na == 0.0 || nb == 0.0 {
                    0.0
                } else {
                    dot / (na.sqrt() * nb.sqrt())
                }
            })
            .collect()
    }

    #[test]
    fn fft_matches_direct_on_random_inputs() {
        for seed in 0..5 {
            let a = noise(1000, seed);
            let b = noise(1000, seed + 100);
            let fft = cross_correlation(&a, &b, 200).unwrap();
            let direct = direct_xcorr(&a, &b, 200);
            for (x, y) in fft.iter().zip(&direct) {
                assert!((x - y).abs() < 1e-6, "{x} vs {y}");
            }
        }
    }

    #[test]
    fn fft_matches_direct_on_unequal_lengths() {
        let a = noise(777, 3);
        let b = noise(450, 4);
        let fft = cross_correlation(&a, &b, 100).unwrap();
        let direct = direct_xcorr(&a, &b, 100);
        for (x, y) in fft.iter().zip(&direct) {
            assert!((x - y).abs() < 1e-6);
        }
    }

    #[test]
    fn recovers_known_shift() {
        let rate = 44100;
        let a = AudioTrack::mono(noise(rate as usize, 7), rate);
        let b = apply_offset(&a, 441).unwrap();
        let est = estimate_offset(&a, &b, 0.05).unwrap();
        assert_eq!(est.offset_samples, 441);
        assert!(est.peak_correlation > 0.99);
    }

    #[test]
    fn identical_tracks_have_zero_offset_and_unit_peak() {
        let a = AudioTrack::mono(noise(8000, 9), 16000);
        let est = estimate_offset(&a, &a, 0.1).unwrap();
        assert_eq!(est.offset_samples, 0);
        assert!((est.peak_correlation - 1.0).abs() <= 1e-6);
        assert!(!est.is_low_confidence());
    }

    #[test]
    fn offset_estimation_is_antisymmetric() {
        let a = AudioTrack::mono(noise(4000, 11), 8000);
        let b = apply_offset(&a, 123).unwrap();
        let ab = estimate_offset(&a, &b, 0.1).unwrap();
        let ba = estimate_offset(&b, &a, 0.1).unwrap();
        assert_eq!(ab.offset_samples, -ba.offset_samples);
    }

    #[test]
    fn round_trip_over_lag_range() {
        let a = AudioTrack::mono(noise(6000, 13), 8000);
        for k in (-100i64..=100).step_by(25) {
            let b = apply_offset(&a, k).unwrap();
            let est = estimate_offset(&a, &b, 0.02).unwrap();
            assert_eq!(est.offset_samples, k, "failed to recover shift {k}");
        }
    }

    #[test]
    fn apply_offset_definitional_cases() {
        let t = AudioTrack::mono(vec![1.0, 2.0, 3.0, 4.0, 5.0], 10);
        assert_eq!(apply_offset(&t, 0).unwrap(), t);
        assert_eq!(
            apply_offset(&t, 3).unwrap().samples().unwrap(),
            &[0.0, 0.0, 0.0, 1.0, 2.0]
        );
        assert_eq!(
            apply_offset(&t, -2).unwrap().samples().unwrap(),
            &[3.0, 4.0, 5.0, 0.0, 0.0]
        );
        assert!(matches!(
            apply_offset(&t, 5),
            Err(Error::OffsetTooLarge { .. })
        ));
    }

    #[test]
    fn rejects_rate_mismatch_and_empty() {
        let a = AudioTrack::mono(noise(100, 1), 8000);
        let b = AudioTrack::mono(noise(100, 2), 16000);
        assert!(matches!(
            estimate_offset(&a, &b, 0.001),
            Err(Error::RateMismatch { .. })
        ));
        let empty = AudioTrack::mono(vec![], 8000);
        assert!(matches!(
            estimate_offset(&a, &empty, 0.001),
            Err(Error::EmptyInput)
        ));
    }

    #[test]
    fn rejects_excessive_lag() {
        let a = AudioTrack::mono(noise(100, 1), 8000);
        assert!(matches!(
            estimate_offset(&a, &a, 1.0),
            Err(Error::LagTooLarge { .. })
        ));
    }
}
