//! Accelerometer trace to bits.
//!
//! The pipeline runs in four stages:
//!
//! 1. [`spectrogram`]: 128-sample Hann STFT with a 4-sample hop, bins under
//!    40 Hz removed, mean/variance normalized.
//! 2. [`track_frequency`]: per window, the mean frequency of the two most
//!    prominent peaks (or the strongest alone when the second is an order of
//!    magnitude weaker); 0 when nothing exceeds the presence threshold.
//! 3. [`separate_symbols`]: ON/OFF boundaries from runs of non-zero track
//!    values, rejecting anything shorter than 200 ms.
//! 4. [`map_with_pilot`]: thresholds calibrated on the trailing pilot, then
//!    demapping to bits through the encoding profile.

mod pilot;
mod separate;
mod spectrogram;
mod track;

use serde::{Deserialize, Serialize};

pub use pilot::{classify, map_message, map_with_pilot, nominal_anchors, pilot_anchors, Anchors, PilotOffsets};
pub use separate::{boundaries, separate_symbols, RawSymbolEstimates, BOUNDARY_ZEROS, MIN_ON_MS};
pub use spectrogram::{
    magnitude_spectrogram, spectrogram, window_count, Spectrogram, HOP, MIN_FREQ_HZ, OVERLAP, WINDOW_LEN,
};
pub use track::{estimate_window, track_frequency, two_strongest_peaks, FrequencyTrack, Peak, TrackerConfig};

use crate::channel::{AccelTrace, ChannelConfig};
use crate::error::Error;
use crate::framing::{decode_symbols, BitMessage, EncodingProfile, Symbol};

/// Receiver settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DecoderConfig {
    pub tracker: TrackerConfig,
    pub min_on_ms: f64,
    /// Frequency the tracker is expected to report for each profile PWM level.
    pub pwm_anchor_hz: [f64; 4],
}

impl Default for DecoderConfig {
    fn default() -> Self {
        DecoderConfig::for_channel(&ChannelConfig::default(), &EncodingProfile::default())
    }
}

impl DecoderConfig {
    /// Anchors derived from a channel's overtone table.
    pub fn for_channel(channel: &ChannelConfig, profile: &EncodingProfile) -> Self {
        let tracker = TrackerConfig::default();
        let pwm_anchor_hz = profile
            .pwm_levels
            .map(|pwm| channel.tracked_frequency(f64::from(pwm), tracker.ratio_threshold));
        DecoderConfig {
            tracker,
            min_on_ms: MIN_ON_MS,
            pwm_anchor_hz,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DecodeFlag {
    /// The trace was too short for a single analysis window.
    TooShort,
    NoSymbolsFound,
    /// The tail did not look like a pilot; bits were demapped with nominal thresholds.
    PilotNotFound,
    /// Decoded bit count differs from the expected message length.
    LengthMismatch,
}

/// Everything the receiver recovered from one trace.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct DecodeResult {
    pub bits: BitMessage,
    pub symbols: Vec<Symbol>,
    pub estimates: RawSymbolEstimates,
    pub pilot_offsets: Option<PilotOffsets>,
    pub flags: Vec<DecodeFlag>,
}

impl DecodeResult {
    pub fn has_flag(&self, flag: DecodeFlag) -> bool {
        self.flags.contains(&flag)
    }

    pub fn is_clean(&self) -> bool {
        self.flags.is_empty()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("decode result serializes")
    }
}

/// Zero samples added on each side so that window centres cover the whole trace.
const EDGE_PAD: usize = WINDOW_LEN / 2;

/// Trace to bits without a length check.
pub fn decode(trace: &AccelTrace, profile: &EncodingProfile, cfg: &DecoderConfig) -> DecodeResult {
    decode_expecting(trace, profile, cfg, None)
}

/// Trace to bits. When `expected_bits` is given the result is checked
/// against it: a matching padded length is truncated to the true length,
/// anything else raises [`DecodeFlag::LengthMismatch`].
///
/// Stage failures become flags; a trace never makes this panic or error out.
pub fn decode_expecting(
    trace: &AccelTrace,
    profile: &EncodingProfile,
    cfg: &DecoderConfig,
    expected_bits: Option<usize>,
) -> DecodeResult {
    let mut result = DecodeResult::default();

    let track = match frequency_track(trace, &cfg.tracker) {
        Ok(track) => track,
        Err(_) => {
            result.flags.push(DecodeFlag::TooShort);
            finish_length_check(&mut result, profile, expected_bits);
            return result;
        }
    };
    let estimates = match separate_symbols(&track, cfg.min_on_ms) {
        Ok(est) => est,
        Err(_) => {
            result.flags.push(DecodeFlag::NoSymbolsFound);
            finish_length_check(&mut result, profile, expected_bits);
            return result;
        }
    };

    let symbols = match map_with_pilot(&estimates, profile, &cfg.pwm_anchor_hz) {
        Ok((symbols, offsets)) => {
            result.pilot_offsets = Some(offsets);
            symbols
        }
        Err(_) => {
            result.flags.push(DecodeFlag::PilotNotFound);
            map_message(&estimates, profile, &nominal_anchors(profile, &cfg.pwm_anchor_hz))
        }
    };
    result.bits = decode_symbols(&symbols, profile).expect("mapped symbols use profile values");
    result.symbols = symbols;
    result.estimates = estimates;
    finish_length_check(&mut result, profile, expected_bits);
    result
}

fn finish_length_check(result: &mut DecodeResult, profile: &EncodingProfile, expected_bits: Option<usize>) {
    let Some(expected) = expected_bits else {
        return;
    };
    let word = profile.bits_per_symbol();
    let padded = expected.div_ceil(word) * word;
    if result.bits.len() == padded {
        result.bits = result.bits.truncated(expected);
    } else {
        result.flags.push(DecodeFlag::LengthMismatch);
    }
}

/// Mean-removes each axis, pads half a window of silence on both ends, and
/// tracks the dominant frequency. Window `i` is centred on sample `4 i`.
pub fn frequency_track(trace: &AccelTrace, cfg: &TrackerConfig) -> Result<FrequencyTrack, Error> {
    if trace.is_empty() {
        return Err(Error::TooShort {
            len: 0,
            needed: 1,
        });
    }
    let n = trace.len() as f64;
    let mut mean = [0.0; 3];
    for s in &trace.samples {
        for (m, v) in mean.iter_mut().zip(s) {
            *m += v / n;
        }
    }
    let centred: Vec<[f64; 3]> = trace
        .samples
        .iter()
        .map(|s| [s[0] - mean[0], s[1] - mean[1], s[2] - mean[2]])
        .collect();
    let peak = |v: &[[f64; 3]]| v.iter().flatten().fold(0.0f64, |m, x| m.max(x.abs()));
    // a constant trace leaves only rounding residue, which normalization would amplify
    let still = peak(&centred) <= 1e-12 * peak(&trace.samples);
    let mut samples = vec![[0.0; 3]; EDGE_PAD];
    if still {
        samples.resize(EDGE_PAD + trace.len(), [0.0; 3]);
    } else {
        samples.extend(centred);
    }
    samples.extend(std::iter::repeat_n([0.0; 3], EDGE_PAD));
    let padded = AccelTrace::new(trace.sample_rate, samples);
    let spec = spectrogram::spectrogram_at(&padded, EDGE_PAD as f64 / trace.sample_rate)?;
    Ok(track_frequency(&spec, cfg))
}
