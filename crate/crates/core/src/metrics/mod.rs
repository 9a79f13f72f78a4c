//! Error and throughput metrics.

mod sweep;

use serde::{Deserialize, Serialize};

pub use sweep::{
    run_cell, run_sweep, CellReport, CellSpec, ExperimentSpec, FlagCounts, MotionSpec, SweepReport,
    TrialRecord,
};

use crate::demodulator::DecodeResult;
use crate::error::{Error, Result};
use crate::framing::{BitMessage, EncodingProfile, Symbol};

/// Unit-cost edit distance (substitutions, insertions, deletions).
pub fn edit_distance(a: &[bool], b: &[bool]) -> usize {
    let mut prev: Vec<usize> = (0..=b.len()).collect();
    let mut row = vec![0usize; b.len() + 1];
    for (i, &x) in a.iter().enumerate() {
        row[0] = i + 1;
        for (j, &y) in b.iter().enumerate() {
            let substitute = prev[j] + usize::from(x != y);
            row[j + 1] = substitute.min(prev[j + 1] + 1).min(row[j] + 1);
        }
        std::mem::swap(&mut prev, &mut row);
    }
    prev[b.len()]
}

/// Fraction of incorrectly received bits.
///
/// Equal lengths compare position by position. Otherwise the two sequences
/// are aligned by edit distance, and every substitution, insertion and
/// deletion counts as one error against the sent length, capped at 1.
pub fn bit_error_rate(sent: &BitMessage, received: &BitMessage) -> f64 {
    let (s, r) = (sent.bits(), received.bits());
    if s.is_empty() {
        return if r.is_empty() { 0.0 } else { 1.0 };
    }
    let errors = if s.len() == r.len() {
        s.iter().zip(r).filter(|(a, b)| a != b).count()
    } else {
        edit_distance(s, r)
    };
    (errors as f64 / s.len() as f64).min(1.0)
}

/// Payload bits per second.
pub fn bit_rate(payload_bits: usize, duration_s: f64) -> f64 {
    if payload_bits == 0 || duration_s <= 0.0 {
        return 0.0;
    }
    payload_bits as f64 / duration_s
}

/// A transmission failed when the receiver produced a different number of
/// bits than the fixed message length.
pub fn detect_failed(expected_bits: usize, result: &DecodeResult) -> bool {
    result.bits.len() != expected_bits
}

/// Parameter classes in matrix order: four PWM levels, two ON times, two OFF times.
pub const CLASS_COUNT: usize = 8;
const PWM_CLASSES: std::ops::Range<usize> = 0..4;
const ON_CLASSES: std::ops::Range<usize> = 4..6;
const OFF_CLASSES: std::ops::Range<usize> = 6..8;

/// Transmitted-versus-received tallies per symbol parameter.
///
/// Rows are sent classes, columns received classes. Each symbol adds one
/// count to the PWM block, one to the ON block and one to the OFF block.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub counts: [[u64; CLASS_COUNT]; CLASS_COUNT],
}

/// Per-parameter error rates.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct ModeErrors {
    pub pwm: f64,
    pub on: f64,
    pub off: f64,
}

impl ConfusionMatrix {
    pub fn tally(&mut self, sent: &[Symbol], received: &[Symbol], profile: &EncodingProfile) -> Result<()> {
        if sent.len() != received.len() {
            return Err(Error::Unaligned {
                sent: sent.len(),
                received: received.len(),
            });
        }
        for (s, r) in sent.iter().zip(received) {
            let pwm = |sym: &Symbol| profile.pwm_levels.iter().position(|&v| v == sym.pwm);
            if let (Some(a), Some(b)) = (pwm(s), pwm(r)) {
                self.counts[a][b] += 1;
            }
            let on = |sym: &Symbol| class_of(&profile.on_ms, sym.on_ms, "on_ms");
            self.counts[4 + on(s)?][4 + on(r)?] += 1;
            let off = |sym: &Symbol| class_of(&profile.off_ms, sym.off_ms, "off_ms");
            self.counts[6 + off(s)?][6 + off(r)?] += 1;
        }
        Ok(())
    }

    pub fn merge(&mut self, other: &ConfusionMatrix) {
        for (row, other_row) in self.counts.iter_mut().zip(&other.counts) {
            for (c, o) in row.iter_mut().zip(other_row) {
                *c += o;
            }
        }
    }

    pub fn row_sum(&self, class: usize) -> u64 {
        self.counts[class].iter().sum()
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }

    pub fn is_diagonal(&self) -> bool {
        (0..CLASS_COUNT).all(|i| (0..CLASS_COUNT).all(|j| i == j || self.counts[i][j] == 0))
    }

    fn block_error(&self, block: std::ops::Range<usize>) -> f64 {
        let mut total = 0u64;
        let mut wrong = 0u64;
        for i in block.clone() {
            for j in block.clone() {
                total += self.counts[i][j];
                if i != j {
                    wrong += self.counts[i][j];
                }
            }
        }
        if total == 0 {
            0.0
        } else {
            wrong as f64 / total as f64
        }
    }

    pub fn mode_errors(&self) -> ModeErrors {
        ModeErrors {
            pwm: self.block_error(PWM_CLASSES),
            on: self.block_error(ON_CLASSES),
            off: self.block_error(OFF_CLASSES),
        }
    }

    /// Off-diagonal PWM counts between neighbouring levels.
    pub fn adjacent_pwm_errors(&self) -> u64 {
        (0..3).map(|i| self.counts[i][i + 1] + self.counts[i + 1][i]).sum()
    }

    /// All off-diagonal PWM counts.
    pub fn pwm_errors(&self) -> u64 {
        PWM_CLASSES
            .flat_map(|i| PWM_CLASSES.map(move |j| (i, j)))
            .filter(|(i, j)| i != j)
            .map(|(i, j)| self.counts[i][j])
            .sum()
    }
}

fn class_of(table: &[u32; 2], value: u32, field: &'static str) -> Result<usize> {
    table
        .iter()
        .position(|&v| v == value)
        .ok_or(Error::IllegalParameter { field, value })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::demodulator::DecodeResult;

    fn bits(s: &str) -> BitMessage {
        BitMessage::from_bit_str(s).unwrap()
    }

    #[test]
    fn ber_basics() {
        assert_eq!(bit_error_rate(&bits("1010"), &bits("1010")), 0.0);
        assert_eq!(bit_error_rate(&bits("1111"), &bits("0000")), 1.0);
        assert_eq!(bit_error_rate(&bits("1111"), &bits("")), 1.0);
        assert_eq!(bit_error_rate(&bits("10"), &bits("1011111111")), 1.0);
    }

    #[test]
    fn ber_with_deleted_word() {
        let sent: Vec<bool> = (0..128).map(|i| (i * 7 + i / 3) % 5 < 2).collect();
        let mut received = sent.clone();
        received.drain(40..44);
        let ber = bit_error_rate(&BitMessage::new(sent), &BitMessage::new(received));
        assert_eq!(ber, 4.0 / 128.0);
    }

    #[test]
    fn rates() {
        assert!((bit_rate(4, 0.6) - 6.6667).abs() < 1e-3);
        assert!((bit_rate(2, 0.6) - 3.3333).abs() < 1e-3);
        assert_eq!(bit_rate(0, 1.0), 0.0);
    }

    #[test]
    fn failure_detection() {
        let mut r = DecodeResult::default();
        r.bits = BitMessage::new(vec![false; 128]);
        assert!(!detect_failed(128, &r));
        r.bits = BitMessage::new(vec![false; 124]);
        assert!(detect_failed(128, &r));
    }

    #[test]
    fn confusion_identity_is_diagonal() {
        let p = EncodingProfile::default();
        let syms = vec![Symbol::new(20, 250, 150), Symbol::new(100, 500, 300), Symbol::new(30, 250, 300)];
        let mut m = ConfusionMatrix::default();
        m.tally(&syms, &syms, &p).unwrap();
        assert!(m.is_diagonal());
        assert_eq!(m.total(), 9);
        assert_eq!(m.mode_errors(), ModeErrors::default());
    }

    #[test]
    fn confusion_adjacent_pwm() {
        let p = EncodingProfile::default();
        let sent = vec![Symbol::new(30, 250, 150); 5];
        let recv = vec![Symbol::new(20, 250, 150); 5];
        let mut m = ConfusionMatrix::default();
        m.tally(&sent, &recv, &p).unwrap();
        assert_eq!(m.counts[1][0], 5);
        assert_eq!(m.row_sum(1), 5);
        assert_eq!(m.adjacent_pwm_errors(), 5);
        assert_eq!(m.mode_errors().pwm, 1.0);
        assert_eq!(m.mode_errors().on, 0.0);
    }

    #[test]
    fn confusion_single_symbol_and_unaligned() {
        let p = EncodingProfile::default();
        let mut m = ConfusionMatrix::default();
        m.tally(&[Symbol::new(60, 500, 150)], &[Symbol::new(60, 500, 150)], &p).unwrap();
        assert_eq!(m.counts[2][2], 1);
        assert!(matches!(
            m.tally(&[Symbol::new(60, 500, 150)], &[], &p),
            Err(Error::Unaligned { .. })
        ));
    }
}
