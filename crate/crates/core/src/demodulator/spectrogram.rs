use std::f64::consts::PI;

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use crate::channel::AccelTrace;
use crate::error::{Error, Result};

pub const WINDOW_LEN: usize = 128;
pub const OVERLAP: usize = 124;
pub const HOP: usize = WINDOW_LEN - OVERLAP;
/// Rows below this frequency are dropped before normalization.
pub const MIN_FREQ_HZ: f64 = 40.0;

/// Short-time magnitude spectrum of a 3-axis trace.
///
/// Stored window-major: `magnitudes[w * n_bins + b]` is retained bin `b` of
/// window `w`. Retained bins start at the first bin at or above 40 Hz and
/// stop below Nyquist.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrogram {
    pub magnitudes: Vec<f64>,
    pub n_bins: usize,
    /// FFT index of retained bin 0.
    pub first_bin: usize,
    pub bin_hz: f64,
    pub hop_samples: usize,
    pub sample_rate: f64,
    /// Start time of each window in seconds.
    pub window_start_times: Vec<f64>,
}

impl Spectrogram {
    pub fn n_windows(&self) -> usize {
        self.window_start_times.len()
    }

    pub fn window(&self, w: usize) -> &[f64] {
        &self.magnitudes[w * self.n_bins..(w + 1) * self.n_bins]
    }

    pub fn frequency(&self, bin: usize) -> f64 {
        (self.first_bin + bin) as f64 * self.bin_hz
    }

    pub fn frequencies(&self) -> Vec<f64> {
        (0..self.n_bins).map(|b| self.frequency(b)).collect()
    }

    /// Time between consecutive windows in seconds.
    pub fn hop_s(&self) -> f64 {
        self.hop_samples as f64 / self.sample_rate
    }
}

/// Number of full windows that fit in `n` samples.
pub fn window_count(n: usize) -> usize {
    if n < WINDOW_LEN {
        0
    } else {
        (n - WINDOW_LEN) / HOP + 1
    }
}

/// Normalized, band-limited spectrogram: 128-sample Hann windows with a
/// 4-sample hop, sub-40 Hz rows removed, then mean/variance normalized over
/// the whole matrix.
///
/// The axes are combined per bin as `sqrt(|X|^2 + |Y|^2 + |Z|^2)`, which is
/// invariant under any rotation of the sensor frame.
pub fn spectrogram(trace: &AccelTrace) -> Result<Spectrogram> {
    spectrogram_at(trace, 0.0)
}

/// As [`spectrogram`], with window start times shifted by `-time_offset_s`.
pub(crate) fn spectrogram_at(trace: &AccelTrace, time_offset_s: f64) -> Result<Spectrogram> {
    let mut spec = magnitude_spectrogram_at(trace, time_offset_s)?;
    normalize(&mut spec.magnitudes);
    Ok(spec)
}

/// Band-limited magnitude spectrogram before normalization.
pub fn magnitude_spectrogram(trace: &AccelTrace) -> Result<Spectrogram> {
    magnitude_spectrogram_at(trace, 0.0)
}

fn magnitude_spectrogram_at(trace: &AccelTrace, time_offset_s: f64) -> Result<Spectrogram> {
    let n = trace.len();
    if n < WINDOW_LEN {
        return Err(Error::TooShort {
            len: n,
            needed: WINDOW_LEN,
        });
    }
    let rate = trace.sample_rate;
    let bin_hz = rate / WINDOW_LEN as f64;
    let first_bin = (MIN_FREQ_HZ / bin_hz).ceil() as usize;
    // exclusive of the Nyquist bin
    let last_bin = WINDOW_LEN / 2;
    let n_bins = last_bin.saturating_sub(first_bin);
    let n_windows = window_count(n);

    let hann: Vec<f64> = (0..WINDOW_LEN)
        .map(|i| 0.5 - 0.5 * (2.0 * PI * i as f64 / WINDOW_LEN as f64).cos())
        .collect();
    let fft = FftPlanner::<f64>::new().plan_fft_forward(WINDOW_LEN);
    let mut scratch = vec![Complex::new(0.0, 0.0); fft.get_inplace_scratch_len()];
    let mut buf = vec![Complex::new(0.0, 0.0); WINDOW_LEN];
    let mut power = vec![0.0f64; n_bins];
    let mut magnitudes = Vec::with_capacity(n_windows * n_bins);

    for w in 0..n_windows {
        let frame = &trace.samples[w * HOP..w * HOP + WINDOW_LEN];
        power.iter_mut().for_each(|p| *p = 0.0);
        for axis in 0..3 {
            let mean = frame.iter().map(|s| s[axis]).sum::<f64>() / WINDOW_LEN as f64;
            for ((slot, s), h) in buf.iter_mut().zip(frame).zip(&hann) {
                *slot = Complex::new((s[axis] - mean) * h, 0.0);
            }
            fft.process_with_scratch(&mut buf, &mut scratch);
            for (p, c) in power.iter_mut().zip(&buf[first_bin..last_bin]) {
                *p += c.norm_sqr();
            }
        }
        magnitudes.extend(power.iter().map(|p| p.sqrt()));
    }

    let window_start_times = (0..n_windows)
        .map(|w| (w * HOP) as f64 / rate - time_offset_s)
        .collect();
    Ok(Spectrogram {
        magnitudes,
        n_bins,
        first_bin,
        bin_hz,
        hop_samples: HOP,
        sample_rate: rate,
        window_start_times,
    })
}

/// Zero mean, unit variance over the whole matrix. A constant matrix maps to
/// all zeros.
fn normalize(values: &mut [f64]) {
    if values.is_empty() {
        return;
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    let std = var.sqrt();
    let scale = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if std <= scale * 1e-12 || std == 0.0 {
        values.iter_mut().for_each(|v| *v = 0.0);
        return;
    }
    values.iter_mut().for_each(|v| *v = (*v - mean) / std);
}
