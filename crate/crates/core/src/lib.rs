//! Software modem for vibration side channels.
//!
//! Bits are carried by a vibration motor as symbols of (PWM level, ON time,
//! OFF time) and recovered from a wrist accelerometer by spectrogram
//! analysis. The crate covers the full path:
//!
//! - [`framing`]: bits to symbols and back, padding and the pilot sequence.
//! - [`modulator`]: symbols to a timed motor drive schedule.
//! - [`channel`]: a simulated motor -> skin -> accelerometer path.
//! - [`demodulator`]: accelerometer trace to symbols and bits.
//! - [`metrics`]: bit error rate, bit rate, confusion matrices, experiment sweeps.
//! - [`formats`]: the CSV and text formats shared with the `vibrolink` binary.

pub mod channel;
pub mod cli;
pub mod demodulator;
mod error;
pub mod formats;
pub mod framing;
pub mod metrics;
pub mod modulator;

pub use error::{Error, Result};
