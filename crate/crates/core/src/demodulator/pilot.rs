use serde::{Deserialize, Serialize};

use super::separate::RawSymbolEstimates;
use crate::error::{Error, Result};
use crate::framing::{EncodingProfile, Mode, PilotSequence, Symbol};

/// How far the received pilot sits from its nominal values.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct PilotOffsets {
    /// Mean estimated-minus-nominal frequency over the pilot PWM anchors, Hz.
    pub pwm_hz: f64,
    /// Estimated-minus-nominal for the short and long ON time, ms.
    pub on_ms: [f64; 2],
    /// Estimated-minus-nominal for the short and long OFF time, ms.
    pub off_ms: [f64; 2],
}

/// Receiver-side anchors measured from the pilot, one per parameter value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Anchors {
    /// Estimated tracked frequency for each PWM level, in profile order.
    pub pwm: [f64; 4],
    pub on_ms: [f64; 2],
    pub off_ms: [f64; 2],
}

/// Index of the anchor a value maps to under the midpoint rule: `value`
/// belongs to anchor `j` if it lies below the mean of anchors `j` and `j + 1`.
pub fn classify(value: f64, anchors: &[f64]) -> usize {
    for j in 0..anchors.len() - 1 {
        if value < (anchors[j] + anchors[j + 1]) / 2.0 {
            return j;
        }
    }
    anchors.len() - 1
}

/// Derives anchors from the three pilot estimates at the end of `est`.
///
/// `nominal_pwm` holds the frequency the tracker reports for each profile
/// PWM level on an ideal channel (or, as in the hand-worked example, the PWM
/// values themselves). The pilot covers only the three lowest levels; the top
/// level's anchor is its nominal value shifted by the mean pilot offset.
pub fn pilot_anchors(
    est: &RawSymbolEstimates,
    profile: &EncodingProfile,
    nominal_pwm: &[f64; 4],
) -> Result<(Anchors, PilotOffsets)> {
    let n = est.len();
    if n < PilotSequence::LEN {
        return Err(Error::PilotNotFound);
    }
    let tail = n - PilotSequence::LEN;
    let on = &est.on_ms[tail..];
    let off = &est.off_ms[tail..];
    let freq = &est.pwm_freq[tail..];
    let pilot = profile.pilot();

    let on_short = (on[0] + on[2]) / 2.0;
    let on_long = on[1];
    let within = |measured: f64, nominal: f64| {
        measured > 0.5 * nominal && measured < 1.5 * nominal
    };
    let on_gap = f64::from(pilot.on_ms[1] - pilot.on_ms[0]);
    let off_gap = f64::from(pilot.off_ms[1] - pilot.off_ms[0]);
    if !within(on_long - on[0], on_gap) || !within(on_long - on[2], on_gap) {
        return Err(Error::PilotNotFound);
    }
    if !within(off[1] - off[0], off_gap) {
        return Err(Error::PilotNotFound);
    }

    let (pwm, pwm_offset) = match profile.mode {
        Mode::Full => {
            if !(freq[0] < freq[1] && freq[1] < freq[2]) {
                return Err(Error::PilotNotFound);
            }
            let deviations: Vec<f64> = (0..3).map(|i| freq[i] - nominal_pwm[i]).collect();
            let offset = deviations.iter().sum::<f64>() / 3.0;
            let spread = deviations.iter().fold(f64::NEG_INFINITY, |m, &d| m.max(d))
                - deviations.iter().fold(f64::INFINITY, |m, &d| m.min(d));
            let min_gap = nominal_pwm
                .windows(2)
                .map(|w| w[1] - w[0])
                .fold(f64::INFINITY, f64::min);
            if spread >= min_gap {
                return Err(Error::PilotNotFound);
            }
            ([freq[0], freq[1], freq[2], nominal_pwm[3] + offset], offset)
        }
        Mode::TimeOnly => (*nominal_pwm, 0.0),
    };

    let anchors = Anchors {
        pwm,
        on_ms: [on_short, on_long],
        off_ms: [off[0], off[1]],
    };
    let offsets = PilotOffsets {
        pwm_hz: pwm_offset,
        on_ms: [
            on_short - f64::from(pilot.on_ms[0]),
            on_long - f64::from(pilot.on_ms[1]),
        ],
        off_ms: [
            off[0] - f64::from(pilot.off_ms[0]),
            off[1] - f64::from(pilot.off_ms[1]),
        ],
    };
    Ok((anchors, offsets))
}

/// Anchors for an uncalibrated receiver: every parameter at its nominal value.
pub fn nominal_anchors(profile: &EncodingProfile, nominal_pwm: &[f64; 4]) -> Anchors {
    Anchors {
        pwm: *nominal_pwm,
        on_ms: profile.on_ms.map(f64::from),
        off_ms: profile.off_ms.map(f64::from),
    }
}

/// Classifies the message estimates (everything before the last three) against `anchors`.
pub fn map_message(est: &RawSymbolEstimates, profile: &EncodingProfile, anchors: &Anchors) -> Vec<Symbol> {
    let count = est.len().saturating_sub(PilotSequence::LEN);
    (0..count)
        .map(|i| {
            let pwm = match profile.mode {
                Mode::Full => profile.pwm_levels[classify(est.pwm_freq[i], &anchors.pwm)],
                Mode::TimeOnly => profile.fixed_pwm,
            };
            Symbol {
                pwm,
                on_ms: profile.on_ms[classify(est.on_ms[i], &anchors.on_ms)],
                off_ms: profile.off_ms[classify(est.off_ms[i], &anchors.off_ms)],
            }
        })
        .collect()
}

/// Calibrates on the trailing pilot and maps every message estimate to a
/// legal symbol. The pilot itself is not part of the output.
pub fn map_with_pilot(
    est: &RawSymbolEstimates,
    profile: &EncodingProfile,
    nominal_pwm: &[f64; 4],
) -> Result<(Vec<Symbol>, PilotOffsets)> {
    let (anchors, offsets) = pilot_anchors(est, profile, nominal_pwm)?;
    Ok((map_message(est, profile, &anchors), offsets))
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Estimates for `message` followed by a pilot, all in "ideal" units.
    fn estimates(message: &[(f64, f64, f64)], pilot_pwm: [f64; 3], pilot_on: [f64; 3], pilot_off: [f64; 2]) -> RawSymbolEstimates {
        let mut est = RawSymbolEstimates::default();
        for &(f, on, off) in message {
            est.pwm_freq.push(f);
            est.on_ms.push(on);
            est.off_ms.push(off);
        }
        est.pwm_freq.extend(pilot_pwm);
        est.on_ms.extend(pilot_on);
        est.off_ms.extend(pilot_off);
        let n = est.on_ms.len();
        est.start = (0..n).collect();
        est.end = (0..n).collect();
        est
    }

    #[test]
    fn midpoint_rule() {
        assert_eq!(classify(27.0, &[24.0, 35.0, 66.0]), 0);
        assert_eq!(classify(29.5, &[24.0, 35.0, 66.0]), 1);
        assert_eq!(classify(80.0, &[24.0, 35.0, 66.0]), 2);
    }

    #[test]
    fn worked_pwm_example() {
        let est = estimates(
            &[(27.0, 260.0, 150.0)],
            [24.0, 35.0, 66.0],
            [255.0, 510.0, 255.0],
            [150.0, 300.0],
        );
        let nominal = [20.0, 30.0, 60.0, 100.0];
        let (symbols, offsets) = map_with_pilot(&est, &EncodingProfile::default(), &nominal).unwrap();
        assert_eq!(symbols, vec![Symbol::new(20, 250, 150)]);
        assert_eq!(offsets.pwm_hz, 5.0);
        assert_eq!(offsets.on_ms, [5.0, 10.0]);
    }

    #[test]
    fn top_level_uses_offset_anchor() {
        let nominal = [20.0, 30.0, 60.0, 100.0];
        let est = estimates(
            &[(104.0, 500.0, 300.0), (80.0, 250.0, 150.0), (90.0, 250.0, 150.0)],
            [24.0, 35.0, 66.0],
            [250.0, 500.0, 250.0],
            [150.0, 300.0],
        );
        let (symbols, _) = map_with_pilot(&est, &EncodingProfile::default(), &nominal).unwrap();
        // anchors 24, 35, 66, 105: thresholds 29.5, 50.5, 85.5
        let pwms: Vec<u32> = symbols.iter().map(|s| s.pwm).collect();
        assert_eq!(pwms, vec![100, 60, 100]);
    }

    #[test]
    fn pilot_with_swapped_on_times_rejected() {
        let nominal = [20.0, 30.0, 60.0, 100.0];
        let est = estimates(&[], [24.0, 35.0, 66.0], [500.0, 250.0, 250.0], [150.0, 300.0]);
        assert_eq!(
            map_with_pilot(&est, &EncodingProfile::default(), &nominal),
            Err(Error::PilotNotFound)
        );
    }

    #[test]
    fn too_few_symbols() {
        let mut est = RawSymbolEstimates::default();
        est.on_ms = vec![250.0, 500.0];
        est.off_ms = vec![150.0];
        est.pwm_freq = vec![20.0, 30.0];
        assert_eq!(
            map_with_pilot(&est, &EncodingProfile::default(), &[20.0, 30.0, 60.0, 100.0]),
            Err(Error::PilotNotFound)
        );
    }

    #[test]
    fn unordered_pilot_frequencies_rejected() {
        let est = estimates(&[], [35.0, 24.0, 66.0], [250.0, 500.0, 250.0], [150.0, 300.0]);
        assert!(map_with_pilot(&est, &EncodingProfile::default(), &[20.0, 30.0, 60.0, 100.0]).is_err());
    }
}
