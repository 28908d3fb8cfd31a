//! Vocal isolation and dialogue suppression.
//!
//! Two routes produce a signal in which AD narration dominates: the fully
//! automatic path runs center extraction followed by NLMS cancellation of the
//! original soundtrack out of the AD-mixed one; the semi-automatic path
//! compares the magnitude spectrograms of the two aligned streams.

use crate::audio::{mid_side, AudioTrack, Envelope, Spectrogram};
use crate::error::{Error, Result};

/// Center-channel extraction by mid/side processing.
///
/// Returns `mid - side_gain * side`; with the default `side_gain = 0` this is
/// the plain mid channel, in which side-panned content cancels exactly.
/// `side_gain` subtracts additional side bleed when a disc mixes background
/// wide but not fully out of phase.
pub fn extract_center(stereo: &AudioTrack, side_gain: f64) -> Result<AudioTrack> {
    let (mid, side) = mid_side(stereo)?;
    if side_gain == 0.0 {
        return Ok(mid);
    }
    let m = mid.samples()?;
    let s = side.samples()?;
    let out = m
        .iter()
        .zip(s)
        .map(|(a, b)| a - side_gain * b)
        .collect();
    Ok(AudioTrack::mono(out, stereo.sample_rate()))
}

/// Normalized-LMS adaptive cancellation.
///
/// The filter predicts `primary` from a sliding window of `reference` and
/// returns the prediction error (residual), which keeps whatever `primary`
/// contains that `reference` cannot explain — the narration. Per sample:
///
/// ```text
/// y[n] = w · x[n]                 x[n] = reference[n..n-taps+1]
/// e[n] = primary[n] - y[n]
/// w   += mu / (eps + ||x[n]||²) · e[n] · x[n]
/// ```
///
/// Inputs must be pre-aligned (see [`crate::sync`]) with equal rates and
/// lengths. The recursion is order-dependent, so it runs as one sequential
/// pass; the function itself is pure.
pub fn nlms_cancel(
    primary: &AudioTrack,
    reference: &AudioTrack,
    taps: usize,
    mu: f64,
    eps: f64,
) -> Result<AudioTrack> {
    if primary.sample_rate() != reference.sample_rate() {
        return Err(Error::RateMismatch {
            a: primary.sample_rate(),
            b: reference.sample_rate(),
        });
    }
    let d = primary.samples()?;
    let x = reference.samples()?;
    if d.len() != x.len() {
        return Err(Error::LengthMismatch {
            a: d.len(),
            b: x.len(),
        });
    }
    if taps == 0 {
        return Err(Error::BadParam("taps must be at least 1".into()));
    }
    if !(mu > 0.0 && mu <= 2.0) {
        return Err(Error::BadParam("mu must be in (0, 2]".into()));
    }
    if !(eps > 0.0) {
        return Err(Error::BadParam("eps must be positive".into()));
    }

    let mut weights = vec![0.0f64; taps];
    let mut residual = Vec::with_capacity(d.len());
    for n in 0..d.len() {
        let mut y = 0.0;
        let mut norm = 0.0;
        for k in 0..taps.min(n + 1) {
            let v = x[n - k];
            y += weights[k] * v;
            norm += v * v;
        }
        let e = d[n] - y;
        let gain = mu / (eps + norm) * e;
        for k in 0..taps.min(n + 1) {
            weights[k] += gain * x[n - k];
        }
        residual.push(e);
    }
    Ok(AudioTrack::mono(residual, primary.sample_rate()))
}

/// Per-frame L1 distance between two spectrograms, normalized by bin count.
///
/// Framing parameters and bin counts must match; the resulting envelope keeps
/// the shared framing, so it feeds directly into segment thresholding.
pub fn spectral_difference(a: &Spectrogram, b: &Spectrogram) -> Result<Envelope> {
    if a.bins != b.bins
        || a.frames() != b.frames()
        || a.frame_sec != b.frame_sec
        || a.hop_sec != b.hop_sec
        || a.origin_sec != b.origin_sec
    {
        return Err(Error::FramingMismatch);
    }
    let values = a
        .magnitudes
        .iter()
        .zip(&b.magnitudes)
        .map(|(ra, rb)| {
            ra.iter()
                .zip(rb)
                .map(|(x, y)| (x - y).abs())
                .sum::<f64>()
                / a.bins as f64
        })
        .collect();
    Ok(Envelope {
        values,
        frame_sec: a.frame_sec,
        hop_sec: a.hop_sec,
        origin_sec: a.origin_sec,
    })
}

/// Difference of per-window mean powers, floored at zero.
///
/// Convenience for the squared-signal reading of dialogue suppression: each
/// envelope value is `max(0, mean(primary²) - mean(reference²))` over the
/// window.
pub fn power_difference(
    primary: &AudioTrack,
    reference: &AudioTrack,
    frame_sec: f64,
    hop_sec: f64,
) -> Result<Envelope> {
    if primary.sample_rate() != reference.sample_rate() {
        return Err(Error::RateMismatch {
            a: primary.sample_rate(),
            b: reference.sample_rate(),
        });
    }
    let p = crate::audio::energy_envelope(primary, frame_sec, hop_sec)?;
    let r = crate::audio::energy_envelope(reference, frame_sec, hop_sec)?;
    if p.len() != r.len() {
        return Err(Error::LengthMismatch {
            a: p.len(),
            b: r.len(),
        });
    }
    let values = p
        .values
        .iter()
        .zip(&r.values)
        .map(|(a, b)| (a * a - b * b).max(0.0))
        .collect();
    Ok(Envelope { values, ..p })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::audio::spectrogram;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn noise(n: usize, seed: u64, amp: f64) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n).map(|_| rng.gen_range(-amp..amp)).collect()
    }

    fn rms(xs: &[f64]) -> f64 {
        (xs.iter().map(|x| x * x).sum::<f64>() / xs.len() as f64).sqrt()
    }

    #[test]
    fn center_extraction_keeps_centered_voice() {
        // center-panned voice plus side-only noise
        let v = noise(500, 1, 0.5);
        let n = noise(500, 2, 0.3);
        let l: Vec<f64> = v.iter().zip(&n).map(|(a, b)| a + b).collect();
        let r: Vec<f64> = v.iter().zip(&n).map(|(a, b)| a - b).collect();
        let t = AudioTrack::stereo(l, r, 8000).unwrap();
        let out = extract_center(&t, 0.0).unwrap();
        for (a, b) in out.samples().unwrap().iter().zip(&v) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn center_extraction_cancels_pure_side() {
        let n = noise(300, 3, 0.8);
        let neg: Vec<f64> = n.iter().map(|x| -x).collect();
        let t = AudioTrack::stereo(n, neg, 8000).unwrap();
        let out = extract_center(&t, 0.0).unwrap();
        assert!(out.samples().unwrap().iter().all(|&x| x.abs() < 1e-12));
    }

    #[test]
    fn center_extraction_is_identity_on_duplicated_mono() {
        let v = noise(300, 4, 0.5);
        let t = AudioTrack::stereo(v.clone(), v.clone(), 8000).unwrap();
        let out = extract_center(&t, 0.0).unwrap();
        for (a, b) in out.samples().unwrap().iter().zip(&v) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn center_extraction_requires_stereo() {
        let t = AudioTrack::mono(vec![0.0; 10], 8000);
        assert!(matches!(extract_center(&t, 0.0), Err(Error::NotStereo)));
    }

    #[test]
    fn nlms_converges_on_identical_inputs() {
        // primary == reference: the filter learns a unit tap and the residual
        // collapses; final 10% must be down by at least a factor 100
        let x = noise(16000, 5, 0.5);
        let t = AudioTrack::mono(x.clone(), 16000);
        let res = nlms_cancel(&t, &t, 8, 0.5, 1e-6).unwrap();
        let e = res.samples().unwrap();
        let tail = &e[e.len() - e.len() / 10..];
        let xtail = &x[x.len() - x.len() / 10..];
        assert!(rms(tail) < 1e-2 * rms(xtail), "tail rms {}", rms(tail));
    }

    #[test]
    fn nlms_with_zero_reference_passes_primary_through() {
        let d = noise(1000, 6, 0.4);
        let p = AudioTrack::mono(d.clone(), 8000);
        let r = AudioTrack::mono(vec![0.0; 1000], 8000);
        let res = nlms_cancel(&p, &r, 16, 0.5, 1e-6).unwrap();
        assert_eq!(res.samples().unwrap(), &d[..]);
    }

    #[test]
    fn nlms_rejects_bad_params() {
        let t = AudioTrack::mono(vec![0.0; 10], 8000);
        assert!(matches!(
            nlms_cancel(&t, &t, 0, 0.5, 1e-6),
            Err(Error::BadParam(_))
        ));
        assert!(matches!(
            nlms_cancel(&t, &t, 4, 2.5, 1e-6),
            Err(Error::BadParam(_))
        ));
        assert!(matches!(
            nlms_cancel(&t, &t, 4, 0.5, 0.0),
            Err(Error::BadParam(_))
        ));
        let short = AudioTrack::mono(vec![0.0; 5], 8000);
        assert!(matches!(
            nlms_cancel(&t, &short, 4, 0.5, 1e-6),
            Err(Error::LengthMismatch { .. })
        ));
    }

    #[test]
    fn nlms_burst_retention_and_background_suppression() {
        // thresholds confirmed against the independent textbook recursion
        // (see the acceptance suite for the oracle itself)
        let rate = 16000usize;
        let n = 8 * rate;
        let background = noise(n, 21, 0.3);
        let burst_src = noise(rate / 2, 22, 0.5);
        let b0 = 4 * rate;
        let b1 = b0 + rate / 2;
        let mut primary = background.clone();
        let mut burst_energy = 0.0;
        for i in b0..b1 {
            let t = (i - b0) as f64 / (rate as f64 * 0.5);
            let v = (std::f64::consts::PI * t).sin() * burst_src[i - b0];
            primary[i] += v;
            burst_energy += v * v;
        }
        let p = AudioTrack::mono(primary.clone(), rate as u32);
        let r = AudioTrack::mono(background.clone(), rate as u32);
        let res = nlms_cancel(&p, &r, 64, 0.5, 1e-6).unwrap();
        let e = res.samples().unwrap();

        let resid_burst: f64 = e[b0..b1].iter().map(|x| x * x).sum();
        assert!(
            resid_burst >= 0.8 * burst_energy,
            "burst retention {:.3}",
            resid_burst / burst_energy
        );

        let span = 2 * rate..4 * rate;
        let in_bg: f64 = primary[span.clone()].iter().map(|x| x * x).sum();
        let out_bg: f64 = e[span].iter().map(|x| x * x).sum();
        let suppression_db = 10.0 * (in_bg / out_bg.max(1e-300)).log10();
        assert!(suppression_db >= 20.0, "suppression {suppression_db:.1} dB");
    }

    #[test]
    fn spectral_difference_of_identical_spectrograms_is_zero() {
        let t = AudioTrack::mono(noise(4000, 8, 0.5), 8000);
        let s = spectrogram(&t, 0.064, 0.016).unwrap();
        let d = spectral_difference(&s, &s).unwrap();
        assert!(d.values.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn spectral_difference_localizes_changed_frame() {
        let t = AudioTrack::mono(noise(4000, 9, 0.5), 8000);
        let a = spectrogram(&t, 0.064, 0.016).unwrap();
        let mut b = a.clone();
        for v in &mut b.magnitudes[3] {
            *v = 0.0;
        }
        let d = spectral_difference(&a, &b).unwrap();
        for (i, &v) in d.values.iter().enumerate() {
            if i == 3 {
                assert!(v > 0.0);
            } else {
                assert_eq!(v, 0.0);
            }
        }
    }

    #[test]
    fn spectral_difference_is_symmetric() {
        let ta = AudioTrack::mono(noise(4000, 10, 0.5), 8000);
        let tb = AudioTrack::mono(noise(4000, 11, 0.5), 8000);
        let a = spectrogram(&ta, 0.064, 0.016).unwrap();
        let b = spectrogram(&tb, 0.064, 0.016).unwrap();
        let ab = spectral_difference(&a, &b).unwrap();
        let ba = spectral_difference(&b, &a).unwrap();
        assert_eq!(ab.values, ba.values);
        assert!(ab.values.iter().all(|&v| v >= 0.0));
    }

    #[test]
    fn spectral_difference_rejects_framing_mismatch() {
        let t = AudioTrack::mono(noise(4000, 12, 0.5), 8000);
        let a = spectrogram(&t, 0.064, 0.016).unwrap();
        let b = spectrogram(&t, 0.032, 0.016).unwrap();
        assert!(matches!(
            spectral_difference(&a, &b),
            Err(Error::FramingMismatch)
        ));
    }

    #[test]
    fn power_difference_floors_at_zero() {
        let quiet = AudioTrack::mono(vec![0.1; 1000], 8000);
        let loud = AudioTrack::mono(vec![0.5; 1000], 8000);
        let d = power_difference(&quiet, &loud, 0.05, 0.025).unwrap();
        assert!(d.values.iter().all(|&v| v == 0.0));
        let d = power_difference(&loud, &quiet, 0.05, 0.025).unwrap();
        for &v in &d.values {
            assert!((v - 0.24).abs() < 1e-12);
        }
    }
}
