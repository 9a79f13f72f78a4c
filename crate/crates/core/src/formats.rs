//! File formats shared by the library and the command-line tool.
//!
//! Drive schedule CSV:
//!
//! ```text
//! start_ms,duration_ms,pwm
//! 0,250,20
//! 400,500,30
//! # total_ms=1600
//! ```
//!
//! The trailing comment carries the total duration including the final OFF
//! gap. Without it the schedule is assumed to end 150 ms after the last
//! command.
//!
//! Accelerometer trace CSV:
//!
//! ```text
//! t,ax,ay,az
//! 0.000000,0.0123,-0.0040,0.0311
//! ```
//!
//! `t` is in seconds with six decimals, accelerations in m/s^2. The sampling
//! rate is recovered from the spacing of `t`.

use std::io::{Read, Write};

use crate::channel::AccelTrace;
use crate::error::{Error, Result};
use crate::modulator::{DriveCommand, DriveSchedule};

pub const SCHEDULE_HEADER: [&str; 3] = ["start_ms", "duration_ms", "pwm"];
pub const TRACE_HEADER: [&str; 4] = ["t", "ax", "ay", "az"];
/// OFF gap assumed after the last command when the total is not recorded.
pub const DEFAULT_TRAILING_OFF_MS: u64 = 150;

fn csv_error(err: csv::Error) -> Error {
    let line = err.position().map_or(0, |p| p.line());
    match err.into_kind() {
        csv::ErrorKind::Io(e) => Error::Io(e.to_string()),
        csv::ErrorKind::UnequalLengths { expected_len, len, .. } => Error::Parse {
            line,
            msg: format!("expected {expected_len} fields, found {len}"),
        },
        other => Error::Parse {
            line,
            msg: format!("{other:?}"),
        },
    }
}

fn check_header(found: &csv::StringRecord, expected: &[&str]) -> Result<()> {
    let found: Vec<&str> = found.iter().map(str::trim).collect();
    if found != expected {
        return Err(Error::Parse {
            line: 1,
            msg: format!("expected header {}, found {}", expected.join(","), found.join(",")),
        });
    }
    Ok(())
}

fn field<T: std::str::FromStr>(record: &csv::StringRecord, i: usize, name: &str) -> Result<T> {
    let line = record.position().map_or(0, |p| p.line());
    let raw = record.get(i).ok_or_else(|| Error::Parse {
        line,
        msg: format!("missing field {name}"),
    })?;
    raw.trim().parse().map_err(|_| Error::Parse {
        line,
        msg: format!("invalid {name} value {raw:?}"),
    })
}

pub fn write_schedule<W: Write>(schedule: &DriveSchedule, mut out: W) -> Result<()> {
    writeln!(out, "{}", SCHEDULE_HEADER.join(","))?;
    for c in &schedule.commands {
        writeln!(out, "{},{},{}", c.start_ms, c.duration_ms, c.pwm)?;
    }
    writeln!(out, "# total_ms={}", schedule.total_ms)?;
    Ok(())
}

pub fn schedule_to_string(schedule: &DriveSchedule) -> String {
    let mut buf = Vec::new();
    write_schedule(schedule, &mut buf).expect("writing to a Vec cannot fail");
    String::from_utf8(buf).expect("schedule CSV is ASCII")
}

pub fn read_schedule<R: Read>(mut input: R) -> Result<DriveSchedule> {
    let mut text = String::new();
    input.read_to_string(&mut text)?;
    let total_ms = text
        .lines()
        .filter_map(|l| l.trim().strip_prefix('#'))
        .filter_map(|c| c.trim().strip_prefix("total_ms="))
        .next_back()
        .map(|v| {
            v.trim().parse::<u64>().map_err(|_| Error::Parse {
                line: 0,
                msg: format!("invalid total_ms {v:?}"),
            })
        })
        .transpose()?;

    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    check_header(reader.headers().map_err(csv_error)?, &SCHEDULE_HEADER)?;
    let mut commands: Vec<DriveCommand> = Vec::new();
    for record in reader.records() {
        let record = record.map_err(csv_error)?;
        let cmd = DriveCommand {
            start_ms: field(&record, 0, "start_ms")?,
            duration_ms: field(&record, 1, "duration_ms")?,
            pwm: field(&record, 2, "pwm")?,
        };
        if let Some(prev) = commands.last() {
            if cmd.start_ms < prev.end_ms() {
                return Err(Error::Parse {
                    line: record.position().map_or(0, |p| p.line()),
                    msg: "commands overlap or are out of order".into(),
                });
            }
        }
        commands.push(cmd);
    }
    let end = commands.last().map_or(0, DriveCommand::end_ms);
    let total_ms = match total_ms {
        Some(t) if t < end => {
            return Err(Error::Parse {
                line: 0,
                msg: format!("total_ms {t} ends before the last command ({end})"),
            })
        }
        Some(t) => t,
        None if commands.is_empty() => 0,
        None => end + DEFAULT_TRAILING_OFF_MS,
    };
    Ok(DriveSchedule { commands, total_ms })
}

pub fn write_trace<W: Write>(trace: &AccelTrace, out: W) -> Result<()> {
    let mut out = std::io::BufWriter::new(out);
    writeln!(out, "{}", TRACE_HEADER.join(","))?;
    for (i, s) in trace.samples.iter().enumerate() {
        writeln!(out, "{:.6},{},{},{}", trace.time_of(i), s[0], s[1], s[2])?;
    }
    out.flush()?;
    Ok(())
}

pub fn trace_to_string(trace: &AccelTrace) -> String {
    let mut buf = Vec::new();
    write_trace(trace, &mut buf).expect("writing to a Vec cannot fail");
    String::from_utf8(buf).expect("trace CSV is ASCII")
}

/// Reads a trace CSV. The sampling rate comes from the time column; a file
/// with fewer than two rows needs `fallback_rate`.
pub fn read_trace<R: Read>(input: R, fallback_rate: Option<f64>) -> Result<AccelTrace> {
    let mut reader = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(input);
    check_header(reader.headers().map_err(csv_error)?, &TRACE_HEADER)?;
    let mut times = Vec::new();
    let mut samples = Vec::new();
    for record in reader.records() {
        let record = record.map_err(csv_error)?;
        times.push(field::<f64>(&record, 0, "t")?);
        samples.push([
            field(&record, 1, "ax")?,
            field(&record, 2, "ay")?,
            field(&record, 3, "az")?,
        ]);
    }
    let rate = if times.len() >= 2 {
        let span = times[times.len() - 1] - times[0];
        if !(span > 0.0) {
            return Err(Error::Parse {
                line: 2,
                msg: "time column is not increasing".into(),
            });
        }
        let rate = (times.len() - 1) as f64 / span;
        // timestamps carry 1 us resolution; snap to whole Hz when that close
        if (rate - rate.round()).abs() < 0.05 {
            rate.round()
        } else {
            rate
        }
    } else {
        fallback_rate.ok_or_else(|| Error::Parse {
            line: 2,
            msg: "need at least two samples to infer the sampling rate".into(),
        })?
    };
    Ok(AccelTrace::new(rate, samples))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::framing::{encode, BitMessage, EncodingProfile};
    use crate::modulator::schedule;

    #[test]
    fn schedule_round_trip() {
        let syms = encode(&BitMessage::from_hex("a5").unwrap(), &EncodingProfile::default()).unwrap();
        let s = schedule(&syms);
        let text = schedule_to_string(&s);
        assert!(text.starts_with("start_ms,duration_ms,pwm\n"));
        assert_eq!(read_schedule(text.as_bytes()).unwrap(), s);
    }

    #[test]
    fn schedule_without_total_gets_default_tail() {
        let s = read_schedule("start_ms,duration_ms,pwm\n0,250,20\n".as_bytes()).unwrap();
        assert_eq!(s.total_ms, 400);
    }

    #[test]
    fn overlapping_schedule_rejected() {
        let err = read_schedule("start_ms,duration_ms,pwm\n0,250,20\n100,250,30\n".as_bytes()).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }), "{err:?}");
    }

    #[test]
    fn trace_round_trip() {
        let t = AccelTrace::new(700.0, (0..50).map(|i| [i as f64 * 0.1, -0.25, 1e-7]).collect());
        let text = trace_to_string(&t);
        assert!(text.starts_with("t,ax,ay,az\n0.000000,0,-0.25,0.0000001\n"));
        assert_eq!(read_trace(text.as_bytes(), None).unwrap(), t);
    }

    #[test]
    fn truncated_trace_reports_line() {
        let text = "t,ax,ay,az\n0.000000,1,2,3\n0.001429,1,2,3\n0.002857,1,2\n";
        let err = read_trace(text.as_bytes(), None).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 4, .. }), "{err:?}");
    }

    #[test]
    fn bad_number_reports_line() {
        let text = "t,ax,ay,az\n0.000000,1,2,3\n0.005000,1,x,3\n";
        let err = read_trace(text.as_bytes(), None).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }), "{err:?}");
    }

    #[test]
    fn wrong_header_rejected() {
        assert!(read_trace("a,b,c,d\n".as_bytes(), None).is_err());
    }
}
