//! The `vibrolink` command-line tool.
//!
//! Stages talk through files or standard streams in the formats of
//! [`formats`](crate::formats), so they compose in a shell:
//!
//! ```text
//! vibrolink encode --hex 1726 | vibrolink simulate --seed 3 | vibrolink decode --expected-len 16
//! ```
//!
//! Exit codes: 0 success, 1 I/O failure, 2 unparsable input, 3 invalid
//! configuration, 4 decoding finished with flags raised.

use std::fs::File;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::channel::{resample, superimpose, synthesize, AccelTrace, ChannelConfig};
use crate::demodulator::{decode_expecting, DecodeResult, DecoderConfig};
use crate::error::Error;
use crate::formats;
use crate::framing::{encode, BitMessage, EncodingProfile};
use crate::metrics::{bit_error_rate, run_sweep, ExperimentSpec};
use crate::modulator::{airtime_s, duration_ms, schedule, DriveSchedule};

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_CONFIG: i32 = 3;
pub const EXIT_DECODE_FLAGGED: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "vibrolink", version, about = "Vibration-channel software modem")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Bits to a drive schedule CSV.
    Encode {
        #[command(flatten)]
        message: MessageArgs,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Drive schedule CSV to an accelerometer trace CSV.
    Simulate {
        /// Schedule CSV; standard input when omitted or "-".
        #[arg(long)]
        schedule: Option<PathBuf>,
        #[command(flatten)]
        channel: ChannelArgs,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Accelerometer trace CSV to bits and diagnostics (JSON).
    Decode {
        /// Trace CSV; standard input when omitted or "-".
        #[arg(long)]
        trace: Option<PathBuf>,
        /// Expected message length in bits; enables the length-mismatch check.
        #[arg(long)]
        expected_len: Option<usize>,
        /// Channel config whose overtone table sets the PWM anchors.
        #[arg(long)]
        channel: Option<PathBuf>,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Bit error rate between a sent and a received bit string.
    Evaluate {
        #[command(flatten)]
        message: MessageArgs,
        /// Received bits as '0'/'1'.
        #[arg(long)]
        received: String,
    },
    /// Encode, simulate and decode in one go.
    Roundtrip {
        #[command(flatten)]
        message: MessageArgs,
        #[command(flatten)]
        channel: ChannelArgs,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Run an experiment grid from a TOML spec and print the JSON report.
    Sweep {
        #[arg(long)]
        spec: PathBuf,
        /// Directory for per-cell trial CSVs.
        #[arg(long)]
        trials_dir: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Secret transfer demos.
    Demo {
        #[arg(value_enum)]
        kind: DemoKind,
        /// PIN digits or password text.
        #[arg(long)]
        secret: Option<String>,
        #[command(flatten)]
        channel: ChannelArgs,
        #[command(flatten)]
        common: CommonArgs,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DemoKind {
    /// 4-digit PIN sent as a 32-bit integer.
    Pin,
    /// 8-character password sent as ASCII.
    Password,
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
pub struct MessageArgs {
    /// Message as a string of '0'/'1'.
    #[arg(long)]
    pub bits: Option<String>,
    /// Message as hex digits.
    #[arg(long)]
    pub hex: Option<String>,
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// Encoding profile TOML.
    #[arg(long)]
    pub profile: Option<PathBuf>,
    /// Output file; standard output when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ChannelArgs {
    /// Channel config TOML.
    #[arg(long)]
    pub channel: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Receiver sampling rate in Hz; resamples when below the channel rate.
    #[arg(long)]
    pub rate: Option<f64>,
    /// Recorded motion trace CSV to superimpose.
    #[arg(long)]
    pub noise: Option<PathBuf>,
}

/// Failure of a command, carrying its exit code.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl From<Error> for CliError {
    fn from(err: Error) -> Self {
        let code = match &err {
            Error::Io(_) => EXIT_IO,
            Error::Parse { .. } | Error::InvalidBit(_) | Error::InvalidHex(_) | Error::EmptyMessage => EXIT_PARSE,
            Error::NoSymbolsFound | Error::PilotNotFound => EXIT_DECODE_FLAGGED,
            _ => EXIT_CONFIG,
        };
        CliError {
            code,
            message: err.to_string(),
        }
    }
}

impl From<io::Error> for CliError {
    fn from(err: io::Error) -> Self {
        CliError {
            code: EXIT_IO,
            message: err.to_string(),
        }
    }
}

type CliResult = Result<i32, CliError>;

/// Parses `args` and runs the command. Returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_PARSE } else { EXIT_OK };
        }
    };
    match run(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {}", e.message);
            e.code
        }
    }
}

pub fn run(command: Command) -> CliResult {
    match command {
        Command::Encode { message, common } => {
            let profile = load_profile(common.profile.as_deref())?;
            let bits = parse_message(&message)?;
            let sched = schedule(&encode(&bits, &profile)?);
            emit(common.out.as_deref(), formats::schedule_to_string(&sched).as_bytes())?;
            Ok(EXIT_OK)
        }
        Command::Simulate {
            schedule: path,
            channel,
            common,
        } => {
            let sched = formats::read_schedule(open_input(path.as_deref())?)?;
            let trace = simulate(&sched, &channel)?;
            write_trace(common.out.as_deref(), &trace)?;
            Ok(EXIT_OK)
        }
        Command::Decode {
            trace,
            expected_len,
            channel,
            common,
        } => {
            let profile = load_profile(common.profile.as_deref())?;
            let channel_cfg = load_channel(channel.as_deref())?;
            let trace = formats::read_trace(open_input(trace.as_deref())?, Some(channel_cfg.sampling_rate))?;
            let decoder = DecoderConfig::for_channel(&channel_cfg, &profile);
            let result = decode_expecting(&trace, &profile, &decoder, expected_len);
            emit(common.out.as_deref(), (result.to_json() + "\n").as_bytes())?;
            Ok(decode_exit(&result))
        }
        Command::Evaluate { message, received } => {
            let sent = parse_message(&message)?;
            let received = BitMessage::from_bit_str(&received)?;
            println!("{{\"ber\": {}, \"sent_bits\": {}, \"received_bits\": {}}}", bit_error_rate(&sent, &received), sent.len(), received.len());
            Ok(EXIT_OK)
        }
        Command::Roundtrip {
            message,
            channel,
            common,
        } => {
            let bits = parse_message(&message)?;
            let outcome = roundtrip(&bits, &channel, common.profile.as_deref())?;
            emit(common.out.as_deref(), (serde_json::to_string_pretty(&outcome).unwrap() + "\n").as_bytes())?;
            Ok(decode_exit(&outcome.result))
        }
        Command::Sweep { spec, trials_dir, out } => {
            let spec = ExperimentSpec::load(&spec)?;
            let report = run_sweep(&spec)?;
            if let Some(dir) = trials_dir {
                std::fs::create_dir_all(&dir)?;
                for (i, cell) in report.cells.iter().enumerate() {
                    std::fs::write(dir.join(format!("cell{i:02}.csv")), cell.trials_csv())?;
                }
            }
            emit(out.as_deref(), (report.to_json() + "\n").as_bytes())?;
            Ok(EXIT_OK)
        }
        Command::Demo {
            kind,
            secret,
            channel,
            common,
        } => {
            let bits = match kind {
                DemoKind::Pin => {
                    let pin = secret.unwrap_or_else(|| "5926".into());
                    pin_bits(&pin)?
                }
                DemoKind::Password => password_bits(&secret.unwrap_or_else(|| "hunter42".into())),
            };
            let outcome = roundtrip(&bits, &channel, common.profile.as_deref())?;
            emit(common.out.as_deref(), (serde_json::to_string_pretty(&outcome).unwrap() + "\n").as_bytes())?;
            Ok(decode_exit(&outcome.result))
        }
    }
}

/// A 4-digit PIN as a 32-bit big-endian integer.
pub fn pin_bits(pin: &str) -> Result<BitMessage, Error> {
    let value: u32 = pin
        .trim()
        .parse()
        .map_err(|_| Error::Parse {
            line: 0,
            msg: format!("PIN {pin:?} is not a number"),
        })?;
    Ok(BitMessage::from_u64(u64::from(value), 32))
}

/// A password as ASCII bytes.
pub fn password_bits(password: &str) -> BitMessage {
    BitMessage::from_bytes(password.as_bytes())
}

#[derive(Debug, Serialize)]
pub struct RoundtripOutcome {
    pub sent: String,
    pub received: String,
    pub ber: f64,
    /// Total air time including the pilot, seconds.
    pub transmission_s: f64,
    /// Payload bits per second of payload air time.
    pub payload_bit_rate_bps: f64,
    pub result: DecodeResult,
}

fn roundtrip(bits: &BitMessage, channel: &ChannelArgs, profile: Option<&Path>) -> Result<RoundtripOutcome, CliError> {
    let profile = load_profile(profile)?;
    let symbols = encode(bits, &profile)?;
    let sched = schedule(&symbols);
    let trace = simulate(&sched, channel)?;
    let channel_cfg = load_channel(channel.channel.as_deref())?;
    let decoder = DecoderConfig::for_channel(&channel_cfg, &profile);
    let result = decode_expecting(&trace, &profile, &decoder, Some(bits.len()));
    let payload = &symbols[..symbols.len() - 3];
    Ok(RoundtripOutcome {
        sent: bits.to_string(),
        received: result.bits.to_string(),
        ber: bit_error_rate(bits, &result.bits),
        transmission_s: duration_ms(&sched) as f64 / 1000.0,
        payload_bit_rate_bps: crate::metrics::bit_rate(bits.len(), airtime_s(payload)),
        result,
    })
}

fn decode_exit(result: &DecodeResult) -> i32 {
    if result.is_clean() {
        EXIT_OK
    } else {
        EXIT_DECODE_FLAGGED
    }
}

fn simulate(sched: &DriveSchedule, args: &ChannelArgs) -> Result<AccelTrace, CliError> {
    let channel = load_channel(args.channel.as_deref())?;
    let noise = args
        .noise
        .as_deref()
        .map(|p| -> Result<AccelTrace, CliError> {
            Ok(formats::read_trace(open_input(Some(p))?, Some(channel.sampling_rate))?)
        })
        .transpose()?;
    let mut trace = synthesize(sched, &channel, args.seed)?;
    if let Some(noise) = noise {
        trace = superimpose(&trace, &noise)?;
    }
    if let Some(rate) = args.rate {
        trace = resample(&trace, rate)?;
    }
    Ok(trace)
}

fn parse_message(args: &MessageArgs) -> Result<BitMessage, Error> {
    let bits = match (&args.bits, &args.hex) {
        (Some(b), _) => BitMessage::from_bit_str(b)?,
        (None, Some(h)) => BitMessage::from_hex(h)?,
        (None, None) => BitMessage::default(),
    };
    if bits.is_empty() {
        return Err(Error::EmptyMessage);
    }
    Ok(bits)
}

fn load_profile(path: Option<&Path>) -> Result<EncodingProfile, Error> {
    let Some(path) = path else {
        return Ok(EncodingProfile::default());
    };
    let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    let profile: EncodingProfile = toml::from_str(&text).map_err(|e| Error::Config(e.to_string()))?;
    profile.validate()?;
    Ok(profile)
}

fn load_channel(path: Option<&Path>) -> Result<ChannelConfig, Error> {
    match path {
        Some(p) => ChannelConfig::load(p),
        None => Ok(ChannelConfig::default()),
    }
}

fn open_input(path: Option<&Path>) -> Result<Box<dyn Read>, CliError> {
    match path {
        None => Ok(Box::new(io::stdin())),
        Some(p) if p == Path::new("-") => Ok(Box::new(io::stdin())),
        Some(p) => File::open(p).map(|f| Box::new(f) as Box<dyn Read>).map_err(|e| CliError {
            code: EXIT_IO,
            message: format!("{}: {e}", p.display()),
        }),
    }
}

fn emit(path: Option<&Path>, bytes: &[u8]) -> io::Result<()> {
    match path {
        Some(p) => std::fs::write(p, bytes),
        None => {
            let mut out = io::stdout().lock();
            out.write_all(bytes)?;
            out.flush()
        }
    }
}

fn write_trace(path: Option<&Path>, trace: &AccelTrace) -> Result<(), CliError> {
    match path {
        Some(p) => formats::write_trace(trace, File::create(p)?)?,
        None => formats::write_trace(trace, io::stdout().lock())?,
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pin_is_32_bit_integer() {
        assert_eq!(pin_bits("5926").unwrap(), BitMessage::from_u64(5926, 32));
        assert!(pin_bits("12a4").is_err());
    }

    #[test]
    fn error_classes() {
        assert_eq!(CliError::from(Error::EmptyMessage).code, EXIT_PARSE);
        assert_eq!(CliError::from(Error::Config("x".into())).code, EXIT_CONFIG);
        assert_eq!(CliError::from(Error::Parse { line: 3, msg: "x".into() }).code, EXIT_PARSE);
        assert_eq!(CliError::from(Error::Io("x".into())).code, EXIT_IO);
    }
}
