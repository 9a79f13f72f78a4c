//! Experiment harness: many messages through encode, channel and decode,
//! over a grid of channel and protocol settings.

use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{bit_error_rate, bit_rate, detect_failed, ConfusionMatrix, ModeErrors};
use crate::channel::motion::{synthetic_motion, MotionKind};
use crate::channel::{resample, superimpose, synthesize, ChannelConfig, Placement};
use crate::demodulator::{decode_expecting, DecodeFlag, DecoderConfig};
use crate::error::{Error, Result};
use crate::framing::{encode, BitMessage, EncodingProfile, Mode, PilotSequence};
use crate::modulator::{airtime_s, schedule};

/// A sweep: shared settings plus one cell per point of the grid.
///
/// Read from TOML:
///
/// ```toml
/// name = "noise"
/// messages = 50          # per cell
/// message_bits = 128
/// seed = 1
///
/// [channel]              # base ChannelConfig, any subset of its fields
/// sampling_rate = 700.0
///
/// [profile]              # base EncodingProfile
/// mode = "full"
///
/// [[cells]]
/// label = "sigma=0.2"
/// white_sigma = 0.2
///
/// [[cells]]
/// label = "200 Hz"
/// white_sigma = 0.2
/// sample_rate = 200.0
/// ```
///
/// Message `m` uses the same bits and channel seed in every cell, so cells
/// differ only in the settings they override.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentSpec {
    pub name: String,
    pub messages: usize,
    pub message_bits: usize,
    pub seed: u64,
    pub channel: ChannelConfig,
    pub profile: EncodingProfile,
    pub cells: Vec<CellSpec>,
}

impl Default for ExperimentSpec {
    fn default() -> Self {
        ExperimentSpec {
            name: "sweep".into(),
            messages: 20,
            message_bits: 128,
            seed: 0,
            channel: ChannelConfig::default(),
            profile: EncodingProfile::default(),
            cells: vec![CellSpec::default()],
        }
    }
}

impl ExperimentSpec {
    pub fn from_toml_str(s: &str) -> Result<Self> {
        let spec: ExperimentSpec = toml::from_str(s).map_err(|e| Error::Config(e.to_string()))?;
        spec.channel.validate()?;
        spec.profile.validate()?;
        if spec.message_bits == 0 {
            return Err(Error::Config("message_bits must be positive".into()));
        }
        Ok(spec)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }
}

/// Recorded-style motion noise superimposed on the received trace.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MotionSpec {
    pub kind: MotionKind,
    /// Approximate RMS level, m/s^2.
    pub level: f64,
}

/// Overrides applied to the base settings for one grid point.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CellSpec {
    pub label: String,
    pub white_sigma: Option<f64>,
    pub drift_amplitude: Option<f64>,
    pub placement: Option<Placement>,
    pub attenuation: Option<f64>,
    /// Receiver sampling rate; lower than the channel rate means resampling.
    pub sample_rate: Option<f64>,
    /// Multiplies every ON and OFF duration of the profile.
    pub time_scale: Option<f64>,
    pub mode: Option<Mode>,
    pub motion: Option<MotionSpec>,
    /// Chance that a transmission loses one random message symbol.
    pub deletion_probability: f64,
    /// Retransmissions allowed after a length mismatch.
    pub max_retries: u32,
}

impl CellSpec {
    pub fn labelled(label: impl Into<String>) -> Self {
        CellSpec {
            label: label.into(),
            ..Default::default()
        }
    }

    fn channel(&self, base: &ChannelConfig) -> ChannelConfig {
        let mut cfg = base.clone();
        if let Some(p) = self.placement {
            cfg = cfg.with_placement(p);
        }
        if let Some(a) = self.attenuation {
            cfg.attenuation = a;
        }
        if let Some(s) = self.white_sigma {
            cfg.noise.white_sigma = s;
        }
        if let Some(d) = self.drift_amplitude {
            cfg.noise.drift_amplitude = d;
        }
        cfg
    }

    fn profile(&self, base: &EncodingProfile) -> EncodingProfile {
        let mut p = base.clone();
        if let Some(mode) = self.mode {
            p.mode = mode;
        }
        if let Some(scale) = self.time_scale {
            p = p.with_time_scale(scale);
        }
        p
    }
}

/// Outcome of one message (after any retransmissions).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial: usize,
    pub seed: u64,
    pub ber: f64,
    pub bit_rate_bps: f64,
    pub flags: Vec<DecodeFlag>,
    pub attempts: u32,
    pub accepted: bool,
    pub deletions_injected: u32,
    pub deletions_flagged: u32,
    #[serde(skip)]
    pub confusion: ConfusionMatrix,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FlagCounts {
    pub too_short: u64,
    pub no_symbols_found: u64,
    pub pilot_not_found: u64,
    pub length_mismatch: u64,
}

impl FlagCounts {
    fn add(&mut self, flags: &[DecodeFlag]) {
        for f in flags {
            match f {
                DecodeFlag::TooShort => self.too_short += 1,
                DecodeFlag::NoSymbolsFound => self.no_symbols_found += 1,
                DecodeFlag::PilotNotFound => self.pilot_not_found += 1,
                DecodeFlag::LengthMismatch => self.length_mismatch += 1,
            }
        }
    }
}

/// Aggregates for one cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellReport {
    pub label: String,
    pub trials: usize,
    pub mean_ber: f64,
    pub std_ber: f64,
    pub p50_ber: f64,
    pub p90_ber: f64,
    pub p95_ber: f64,
    pub mean_bit_rate_bps: f64,
    pub accepted: usize,
    /// Mean BER over accepted messages only.
    pub accepted_mean_ber: f64,
    pub retransmissions: u64,
    pub deletions_injected: u64,
    pub deletions_flagged: u64,
    pub flags: FlagCounts,
    pub confusion: ConfusionMatrix,
    pub mode_errors: ModeErrors,
    #[serde(skip)]
    pub records: Vec<TrialRecord>,
}

impl CellReport {
    /// Per-trial CSV: `trial,seed,ber,bit_rate_bps,flags`.
    pub fn trials_csv(&self) -> String {
        let mut out = String::from("trial,seed,ber,bit_rate_bps,flags\n");
        for r in &self.records {
            let flags: Vec<String> = r.flags.iter().map(|f| format!("{f:?}")).collect();
            out.push_str(&format!(
                "{},{},{:.6},{:.6},{}\n",
                r.trial,
                r.seed,
                r.ber,
                r.bit_rate_bps,
                flags.join("|")
            ));
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub name: String,
    pub messages: usize,
    pub message_bits: usize,
    pub seed: u64,
    pub cells: Vec<CellReport>,
}

impl SweepReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    let mut z = x;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed of message `index` in a sweep seeded with `base`.
pub fn message_seed(base: u64, index: usize) -> u64 {
    splitmix64(base ^ splitmix64(index as u64))
}

fn percentile(sorted: &[f64], p: f64) -> f64 {
    if sorted.is_empty() {
        return 0.0;
    }
    let rank = ((p / 100.0) * sorted.len() as f64).ceil() as usize;
    sorted[rank.clamp(1, sorted.len()) - 1]
}

pub fn run_sweep(spec: &ExperimentSpec) -> Result<SweepReport> {
    let cells = spec
        .cells
        .iter()
        .map(|cell| run_cell(spec, cell))
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepReport {
        name: spec.name.clone(),
        messages: spec.messages,
        message_bits: spec.message_bits,
        seed: spec.seed,
        cells,
    })
}

pub fn run_cell(spec: &ExperimentSpec, cell: &CellSpec) -> Result<CellReport> {
    let channel = cell.channel(&spec.channel);
    channel.validate()?;
    let profile = cell.profile(&spec.profile);
    profile.validate()?;
    let decoder = DecoderConfig::for_channel(&channel, &profile);

    let records = (0..spec.messages)
        .into_par_iter()
        .map(|m| run_trial(spec, cell, &channel, &profile, &decoder, m))
        .collect::<Result<Vec<_>>>()?;
    Ok(aggregate(cell.label.clone(), records))
}

fn run_trial(
    spec: &ExperimentSpec,
    cell: &CellSpec,
    channel: &ChannelConfig,
    profile: &EncodingProfile,
    decoder: &DecoderConfig,
    index: usize,
) -> Result<TrialRecord> {
    let seed = message_seed(spec.seed, index);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let message = BitMessage::new((0..spec.message_bits).map(|_| rng.gen()).collect());
    let sent = encode(&message, profile)?;
    let payload = &sent[..sent.len() - PilotSequence::LEN];
    let rate_bps = bit_rate(spec.message_bits, airtime_s(payload));

    let mut record = TrialRecord {
        trial: index,
        seed,
        ber: 1.0,
        bit_rate_bps: rate_bps,
        flags: Vec::new(),
        attempts: 0,
        accepted: false,
        deletions_injected: 0,
        deletions_flagged: 0,
        confusion: ConfusionMatrix::default(),
    };

    for attempt in 0..=cell.max_retries {
        record.attempts = attempt + 1;
        let attempt_seed = splitmix64(seed ^ u64::from(attempt).wrapping_mul(0xa076_1d64_78bd_642f));
        let mut fault_rng = ChaCha8Rng::seed_from_u64(attempt_seed);
        let mut transmitted = sent.clone();
        let deleted = fault_rng.gen_bool(cell.deletion_probability.clamp(0.0, 1.0));
        if deleted {
            transmitted.remove(fault_rng.gen_range(0..payload.len()));
            record.deletions_injected += 1;
        }

        // attempt 0 reuses the message seed so cells share channel noise
        let channel_seed = if attempt == 0 { seed } else { attempt_seed };
        let mut trace = synthesize(&schedule(&transmitted), channel, channel_seed)?;
        if let Some(motion) = cell.motion {
            let noise = synthetic_motion(
                motion.kind,
                trace.duration_s(),
                trace.sample_rate,
                motion.level,
                channel_seed ^ 0x6d6f_7469_6f6e,
            );
            trace = superimpose(&trace, &noise)?;
        }
        if let Some(rate) = cell.sample_rate {
            trace = resample(&trace, rate)?;
        }

        let result = decode_expecting(&trace, profile, decoder, Some(spec.message_bits));
        let failed = detect_failed(spec.message_bits, &result);
        if deleted && failed {
            record.deletions_flagged += 1;
        }
        record.ber = bit_error_rate(&message, &result.bits);
        record.flags = result.flags.clone();
        record.accepted = !failed;
        record.confusion = ConfusionMatrix::default();
        if !deleted && result.symbols.len() == payload.len() {
            record.confusion.tally(payload, &result.symbols, profile)?;
        }
        if !failed {
            break;
        }
    }
    Ok(record)
}

fn aggregate(label: String, records: Vec<TrialRecord>) -> CellReport {
    let n = records.len();
    let bers: Vec<f64> = records.iter().map(|r| r.ber).collect();
    let mean = |v: &[f64]| if v.is_empty() { 0.0 } else { v.iter().sum::<f64>() / v.len() as f64 };
    let mean_ber = mean(&bers);
    let std_ber = if n > 1 {
        (bers.iter().map(|b| (b - mean_ber).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt()
    } else {
        0.0
    };
    let mut sorted = bers.clone();
    sorted.sort_by(f64::total_cmp);

    let accepted_bers: Vec<f64> = records.iter().filter(|r| r.accepted).map(|r| r.ber).collect();
    let mut confusion = ConfusionMatrix::default();
    let mut flags = FlagCounts::default();
    for r in &records {
        confusion.merge(&r.confusion);
        flags.add(&r.flags);
    }
    let rates: Vec<f64> = records.iter().map(|r| r.bit_rate_bps).collect();

    CellReport {
        label,
        trials: n,
        mean_ber,
        std_ber,
        p50_ber: percentile(&sorted, 50.0),
        p90_ber: percentile(&sorted, 90.0),
        p95_ber: percentile(&sorted, 95.0),
        mean_bit_rate_bps: mean(&rates),
        accepted: accepted_bers.len(),
        accepted_mean_ber: mean(&accepted_bers),
        retransmissions: records.iter().map(|r| u64::from(r.attempts - 1)).sum(),
        deletions_injected: records.iter().map(|r| u64::from(r.deletions_injected)).sum(),
        deletions_flagged: records.iter().map(|r| u64::from(r.deletions_flagged)).sum(),
        flags,
        mode_errors: confusion.mode_errors(),
        confusion,
        records,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn percentile_nearest_rank() {
        let v = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0];
        assert_eq!(percentile(&v, 50.0), 0.5);
        assert_eq!(percentile(&v, 90.0), 0.9);
        assert_eq!(percentile(&v, 95.0), 1.0);
        assert_eq!(percentile(&[], 50.0), 0.0);
    }

    #[test]
    fn single_clean_message() {
        let spec = ExperimentSpec {
            messages: 1,
            ..Default::default()
        };
        let report = run_sweep(&spec).unwrap();
        let cell = &report.cells[0];
        assert_eq!(cell.trials, 1);
        assert_eq!(cell.mean_ber, 0.0);
        assert_eq!(cell.accepted, 1);
        assert!(cell.confusion.is_diagonal());
    }

    #[test]
    fn spec_from_toml() {
        let spec = ExperimentSpec::from_toml_str(
            r#"
            name = "t"
            messages = 3
            [channel]
            attenuation = 0.9
            [[cells]]
            label = "a"
            white_sigma = 0.1
            placement = "middle"
            [cells.motion]
            kind = "vehicle"
            level = 0.2
            "#,
        )
        .unwrap();
        assert_eq!(spec.messages, 3);
        assert_eq!(spec.channel.attenuation, 0.9);
        assert_eq!(spec.cells[0].placement, Some(Placement::Middle));
        assert_eq!(spec.cells[0].motion.unwrap().kind, MotionKind::Vehicle);
        assert!(ExperimentSpec::from_toml_str("unknown = 1").is_err());
    }
}
