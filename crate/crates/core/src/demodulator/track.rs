use serde::{Deserialize, Serialize};

use super::spectrogram::Spectrogram;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrackerConfig {
    /// Minimum normalized magnitude for a window to count as vibrating.
    pub presence_threshold: f64,
    /// Second/first peak magnitude ratio at which both overtones are averaged.
    pub ratio_threshold: f64,
    /// Minimum distance between the two selected peaks, in bins.
    pub min_peak_separation: usize,
}

impl Default for TrackerConfig {
    fn default() -> Self {
        TrackerConfig {
            presence_threshold: 3.0,
            ratio_threshold: 0.1,
            min_peak_separation: 2,
        }
    }
}

/// Per-window dominant frequency `y` in Hz; 0 where nothing vibrates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrequencyTrack {
    pub y: Vec<f64>,
    pub hop_samples: usize,
    pub sample_rate: f64,
}

impl FrequencyTrack {
    pub fn new(y: Vec<f64>, hop_samples: usize, sample_rate: f64) -> Self {
        FrequencyTrack {
            y,
            hop_samples,
            sample_rate,
        }
    }

    /// Duration of `windows` hops in milliseconds.
    pub fn windows_to_ms(&self, windows: usize) -> f64 {
        (windows * self.hop_samples) as f64 * 1000.0 / self.sample_rate
    }

    pub fn len(&self) -> usize {
        self.y.len()
    }

    pub fn is_empty(&self) -> bool {
        self.y.is_empty()
    }
}

/// A local maximum of a magnitude spectrum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Peak {
    pub bin: usize,
    pub magnitude: f64,
}

/// Up to two most prominent local maxima, strongest first.
///
/// Equal magnitudes prefer the lower bin. The second peak must be at least
/// `min_separation` bins away from the first.
pub fn two_strongest_peaks(mags: &[f64], min_separation: usize) -> Vec<Peak> {
    let n = mags.len();
    let mut peaks: Vec<Peak> = (0..n)
        .filter(|&b| (b == 0 || mags[b] > mags[b - 1]) && (b + 1 == n || mags[b] >= mags[b + 1]))
        .map(|bin| Peak {
            bin,
            magnitude: mags[bin],
        })
        .collect();
    peaks.sort_by(|a, b| b.magnitude.total_cmp(&a.magnitude).then(a.bin.cmp(&b.bin)));
    let mut chosen: Vec<Peak> = Vec::with_capacity(2);
    for p in peaks {
        if chosen.iter().all(|c| c.bin.abs_diff(p.bin) >= min_separation) {
            chosen.push(p);
            if chosen.len() == 2 {
                break;
            }
        }
    }
    chosen
}

/// Frequency estimate for one window given its magnitudes and bin frequencies.
pub fn estimate_window(mags: &[f64], freqs: &[f64], cfg: &TrackerConfig) -> f64 {
    let max = mags.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !(max >= cfg.presence_threshold) {
        return 0.0;
    }
    let peaks = two_strongest_peaks(mags, cfg.min_peak_separation);
    match peaks.as_slice() {
        [first, second] if second.magnitude > 0.0 && second.magnitude / first.magnitude >= cfg.ratio_threshold => {
            (freqs[first.bin] + freqs[second.bin]) / 2.0
        }
        [first, ..] => freqs[first.bin],
        [] => 0.0,
    }
}

pub fn track_frequency(spec: &Spectrogram, cfg: &TrackerConfig) -> FrequencyTrack {
    let freqs = spec.frequencies();
    let y = (0..spec.n_windows())
        .map(|w| estimate_window(spec.window(w), &freqs, cfg))
        .collect();
    FrequencyTrack::new(y, spec.hop_samples, spec.sample_rate)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spectrum(peaks: &[(usize, f64)], n: usize) -> Vec<f64> {
        let mut m = vec![-0.2; n];
        for &(b, v) in peaks {
            m[b] = v;
        }
        m
    }

    #[test]
    fn two_overtones_are_averaged() {
        // bins at 5 Hz spacing: bin 30 = 150 Hz, bin 60 = 300 Hz
        let freqs: Vec<f64> = (0..70).map(|b| b as f64 * 5.0).collect();
        let m = spectrum(&[(30, 5.0), (60, 4.0)], 70);
        assert_eq!(estimate_window(&m, &freqs, &TrackerConfig::default()), 225.0);
    }

    #[test]
    fn weak_second_overtone_ignored() {
        let freqs: Vec<f64> = (0..70).map(|b| b as f64 * 5.0).collect();
        let m = spectrum(&[(50, 5.0), (25, 0.3)], 70);
        assert_eq!(estimate_window(&m, &freqs, &TrackerConfig::default()), 250.0);
    }

    #[test]
    fn silent_window() {
        let freqs: Vec<f64> = (0..10).map(|b| b as f64).collect();
        assert_eq!(estimate_window(&[0.0; 10], &freqs, &TrackerConfig::default()), 0.0);
        let quiet = spectrum(&[(4, 2.9)], 10);
        assert_eq!(estimate_window(&quiet, &freqs, &TrackerConfig::default()), 0.0);
    }

    #[test]
    fn ties_prefer_lower_bin() {
        let m = spectrum(&[(3, 4.0), (7, 4.0), (12, 4.0)], 16);
        let p = two_strongest_peaks(&m, 2);
        assert_eq!(p.iter().map(|p| p.bin).collect::<Vec<_>>(), vec![3, 7]);
    }

    #[test]
    fn separation_enforced() {
        let m = vec![0.0, 5.0, 0.0, 4.0, 0.0, 0.0, 3.0, 0.0];
        let p = two_strongest_peaks(&m, 3);
        assert_eq!(p.iter().map(|p| p.bin).collect::<Vec<_>>(), vec![1, 6]);
    }
}
