//! Symbol sequence to timed motor drive schedule.

use serde::{Deserialize, Serialize};

use crate::framing::Symbol;

/// One motor activation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DriveCommand {
    pub pwm: u32,
    /// Offset from transmission start.
    pub start_ms: u64,
    /// ON duration.
    pub duration_ms: u64,
}

impl DriveCommand {
    pub fn end_ms(&self) -> u64 {
        self.start_ms + self.duration_ms
    }
}

/// Ordered, non-overlapping motor activations.
///
/// The OFF gap after each command is implied: it runs until the next
/// command starts, or until `total_ms` for the last one.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DriveSchedule {
    pub commands: Vec<DriveCommand>,
    pub total_ms: u64,
}

impl DriveSchedule {
    pub fn is_empty(&self) -> bool {
        self.commands.is_empty()
    }

    pub fn len(&self) -> usize {
        self.commands.len()
    }

    /// OFF gap following command `i`.
    pub fn off_after(&self, i: usize) -> u64 {
        let end = self.commands[i].end_ms();
        match self.commands.get(i + 1) {
            Some(next) => next.start_ms - end,
            None => self.total_ms - end,
        }
    }

    /// Reconstructs the symbol sequence the schedule was built from.
    pub fn symbols(&self) -> Vec<Symbol> {
        (0..self.commands.len())
            .map(|i| {
                let c = &self.commands[i];
                Symbol::new(c.pwm, c.duration_ms as u32, self.off_after(i) as u32)
            })
            .collect()
    }

    /// Checks ordering and the `total_ms` bound.
    pub fn is_consistent(&self) -> bool {
        self.commands
            .windows(2)
            .all(|w| w[0].end_ms() <= w[1].start_ms && w[0].start_ms < w[1].start_ms)
            && self.commands.last().is_none_or(|c| c.end_ms() <= self.total_ms)
    }
}

/// Lays symbols out back to back, each ON followed by its OFF.
pub fn schedule(symbols: &[Symbol]) -> DriveSchedule {
    let mut t = 0u64;
    let commands = symbols
        .iter()
        .map(|s| {
            let cmd = DriveCommand {
                pwm: s.pwm,
                start_ms: t,
                duration_ms: u64::from(s.on_ms),
            };
            t += u64::from(s.on_ms) + u64::from(s.off_ms);
            cmd
        })
        .collect();
    DriveSchedule {
        commands,
        total_ms: t,
    }
}

pub fn duration_ms(schedule: &DriveSchedule) -> u64 {
    schedule.total_ms
}

/// Air time of `symbols` in seconds.
pub fn airtime_s(symbols: &[Symbol]) -> f64 {
    symbols.iter().map(|s| f64::from(s.period_ms())).sum::<f64>() / 1000.0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::framing::EncodingProfile;

    #[test]
    fn single_symbol() {
        let s = schedule(&[Symbol::new(20, 250, 150)]);
        assert_eq!(
            s.commands,
            vec![DriveCommand {
                pwm: 20,
                start_ms: 0,
                duration_ms: 250
            }]
        );
        assert_eq!(duration_ms(&s), 400);
    }

    #[test]
    fn pilot_layout() {
        let pilot = EncodingProfile::default().pilot().symbols();
        let s = schedule(&pilot);
        let spans: Vec<_> = s.commands.iter().map(|c| (c.start_ms, c.end_ms())).collect();
        assert_eq!(spans, vec![(0, 250), (400, 900), (1200, 1450)]);
        assert_eq!(s.total_ms, 1600);
        assert_eq!(s.off_after(2), 150);
        assert_eq!(s.symbols(), pilot.to_vec());
        assert!(s.is_consistent());
    }

    #[test]
    fn empty_schedule() {
        let s = schedule(&[]);
        assert!(s.is_empty());
        assert_eq!(duration_ms(&s), 0);
    }
}
