use serde::{Deserialize, Serialize};

use super::track::FrequencyTrack;
use crate::error::{Error, Result};

/// Number of silent windows that delimit a vibration.
pub const BOUNDARY_ZEROS: usize = 3;
/// Vibrations shorter than this are treated as impulsive noise.
pub const MIN_ON_MS: f64 = 200.0;

/// Per-symbol measurements recovered from a frequency track.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RawSymbolEstimates {
    pub on_ms: Vec<f64>,
    /// Gap between symbol `i` and `i + 1`; one shorter than `on_ms`.
    pub off_ms: Vec<f64>,
    /// Mean tracked frequency over each symbol, Hz.
    pub pwm_freq: Vec<f64>,
    /// First and last window index of each symbol (inclusive).
    pub start: Vec<usize>,
    pub end: Vec<usize>,
}

impl RawSymbolEstimates {
    pub fn len(&self) -> usize {
        self.on_ms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.on_ms.is_empty()
    }
}

/// First and last windows of every vibration.
///
/// Window `i` ends a vibration when `y[i] > 0` and the next three windows are
/// silent, and starts one when `y[i] > 0` and the previous three are silent.
/// Windows outside the track count as silent.
pub fn boundaries(y: &[f64]) -> (Vec<usize>, Vec<usize>) {
    let silent = |i: isize| i < 0 || i as usize >= y.len() || y[i as usize] <= 0.0;
    let mut starts = Vec::new();
    let mut ends = Vec::new();
    for (i, &v) in y.iter().enumerate() {
        if v <= 0.0 {
            continue;
        }
        let i = i as isize;
        if (1..=BOUNDARY_ZEROS as isize).all(|k| silent(i + k)) {
            ends.push(i as usize);
        }
        if (1..=BOUNDARY_ZEROS as isize).all(|k| silent(i - k)) {
            starts.push(i as usize);
        }
    }
    (starts, ends)
}

/// Splits a frequency track into symbols.
///
/// ON time is the inclusive window count of each vibration converted to ms;
/// vibrations under `min_on_ms` are dropped before OFF gaps are measured, so
/// the gaps around a dropped one merge. A symbol's frequency is the mean of
/// its non-zero track values.
pub fn separate_symbols(track: &FrequencyTrack, min_on_ms: f64) -> Result<RawSymbolEstimates> {
    let (starts, ends) = boundaries(&track.y);
    debug_assert_eq!(starts.len(), ends.len());

    let mut est = RawSymbolEstimates::default();
    for (&s, &e) in starts.iter().zip(&ends) {
        let on = track.windows_to_ms(e - s + 1);
        if on < min_on_ms {
            continue;
        }
        let active: Vec<f64> = track.y[s..=e].iter().copied().filter(|&v| v > 0.0).collect();
        est.on_ms.push(on);
        est.pwm_freq.push(active.iter().sum::<f64>() / active.len() as f64);
        est.start.push(s);
        est.end.push(e);
    }
    if est.is_empty() {
        return Err(Error::NoSymbolsFound);
    }
    est.off_ms = est
        .start
        .iter()
        .skip(1)
        .zip(&est.end)
        .map(|(&next_start, &prev_end)| track.windows_to_ms(next_start - prev_end - 1))
        .collect();
    Ok(est)
}
