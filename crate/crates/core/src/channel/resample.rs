use std::f64::consts::PI;

use super::trace::AccelTrace;
use crate::error::{Error, Result};

/// Anti-alias cutoff as a fraction of the target rate.
pub const CUTOFF_FRACTION: f64 = 0.45;
/// Kernel half-width in zero crossings of the low-pass sinc.
const ZERO_CROSSINGS: f64 = 12.0;

fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-12 {
        1.0
    } else {
        (PI * x).sin() / (PI * x)
    }
}

fn blackman(x: f64) -> f64 {
    // x in [-1, 1]
    if x.abs() >= 1.0 {
        return 0.0;
    }
    let u = (x + 1.0) / 2.0;
    0.42 - 0.5 * (2.0 * PI * u).cos() + 0.08 * (4.0 * PI * u).cos()
}

/// Band-limited resampling to a lower rate.
///
/// Each output sample is a Blackman-windowed sinc interpolation of the source
/// with cutoff `0.45 * target_rate`, which low-pass filters and decimates in
/// one pass and handles non-integer ratios such as 700 -> 200 Hz.
pub fn resample(trace: &AccelTrace, target_rate: f64) -> Result<AccelTrace> {
    let src = trace.sample_rate;
    if (target_rate - src).abs() < 1e-9 {
        return Ok(trace.clone());
    }
    if !(target_rate > 0.0) || target_rate > src {
        return Err(Error::UpsampleUnsupported {
            from: src,
            to: target_rate,
        });
    }
    let cutoff = CUTOFF_FRACTION * target_rate;
    // normalized to the source sample spacing
    let bandwidth = 2.0 * cutoff / src;
    let half_width = ZERO_CROSSINGS / bandwidth;
    let n_out = ((trace.len() as f64 / src) * target_rate - 1e-9).ceil().max(0.0) as usize;
    let n_in = trace.len() as isize;

    let samples = (0..n_out)
        .map(|k| {
            let centre = k as f64 * src / target_rate;
            let lo = ((centre - half_width).ceil() as isize).max(0);
            let hi = ((centre + half_width).floor() as isize).min(n_in - 1);
            let mut acc = [0.0; 3];
            let mut weight_sum = 0.0;
            for n in lo..=hi {
                let d = centre - n as f64;
                let w = sinc(bandwidth * d) * blackman(d / half_width);
                let s = trace.samples[n as usize];
                for (a, v) in acc.iter_mut().zip(s) {
                    *a += w * v;
                }
                weight_sum += w;
            }
            if weight_sum.abs() > 1e-12 {
                acc.iter_mut().for_each(|a| *a /= weight_sum);
            }
            acc
        })
        .collect();
    Ok(AccelTrace::new(target_rate, samples))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tone(freq: f64, rate: f64, len: usize) -> AccelTrace {
        AccelTrace::new(
            rate,
            (0..len)
                .map(|i| {
                    let v = (2.0 * PI * freq * i as f64 / rate).sin();
                    [v, 0.5 * v, 0.0]
                })
                .collect(),
        )
    }

    fn rms_axis0(t: &AccelTrace, skip: usize) -> f64 {
        let body = &t.samples[skip..t.len() - skip];
        (body.iter().map(|s| s[0] * s[0]).sum::<f64>() / body.len() as f64).sqrt()
    }

    #[test]
    fn same_rate_is_identity() {
        let t = tone(150.0, 700.0, 300);
        assert_eq!(resample(&t, 700.0).unwrap(), t);
    }

    #[test]
    fn upsampling_rejected() {
        let t = tone(50.0, 200.0, 100);
        assert!(matches!(
            resample(&t, 700.0),
            Err(Error::UpsampleUnsupported { .. })
        ));
    }

    #[test]
    fn duration_preserved() {
        let t = tone(20.0, 700.0, 7001);
        let out = resample(&t, 200.0).unwrap();
        assert!((out.duration_s() - t.duration_s()).abs() <= 1.0 / 200.0);
    }

    #[test]
    fn passband_tone_survives() {
        let t = tone(30.0, 700.0, 7000);
        let out = resample(&t, 200.0).unwrap();
        let ratio = rms_axis0(&out, 50) / rms_axis0(&t, 0);
        assert!((ratio - 1.0).abs() < 0.01, "ratio {ratio}");
    }

    #[test]
    fn tone_above_new_nyquist_removed() {
        let t = tone(300.0, 700.0, 7000);
        let out = resample(&t, 200.0).unwrap();
        let ratio = rms_axis0(&out, 50) / rms_axis0(&t, 0);
        assert!(ratio < 1e-3, "ratio {ratio}");
    }
}
