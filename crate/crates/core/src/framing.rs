//! Bit framing: 4-bit words to (PWM, ON, OFF) symbols and back.
//!
//! A word `b0 b1 b2 b3` is carried by one symbol. The first two bits pick the
//! PWM level, the third picks the ON duration and the fourth the OFF
//! duration. Every parameter table is monotone in its bit pattern
//! (`00 -> 20`, `01 -> 30`, `10 -> 60`, `11 -> 100`; `0 -> 250/150`,
//! `1 -> 500/300`), so a receiver can demap by thresholding.
//!
//! A fixed three-symbol pilot is appended after the message symbols. The
//! receiver measures it to calibrate its thresholds.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Ordered sequence of bits. Serialized as a `"0101"` string.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub struct BitMessage(Vec<bool>);

impl BitMessage {
    pub fn new(bits: Vec<bool>) -> Self {
        BitMessage(bits)
    }

    /// Parses a string of `'0'`/`'1'` characters. Whitespace and `_` are skipped.
    pub fn from_bit_str(s: &str) -> Result<Self> {
        s.chars()
            .filter(|c| !c.is_whitespace() && *c != '_')
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::InvalidBit(other)),
            })
            .collect::<Result<Vec<_>>>()
            .map(BitMessage)
    }

    /// Parses a hex string, most significant bit of each nibble first.
    pub fn from_hex(s: &str) -> Result<Self> {
        let s = s.trim();
        let s = s
            .strip_prefix("0x")
            .or_else(|| s.strip_prefix("0X"))
            .unwrap_or(s);
        let mut bits = Vec::with_capacity(s.len() * 4);
        for c in s.chars() {
            let nibble = c
                .to_digit(16)
                .ok_or_else(|| Error::InvalidHex(format!("unexpected character {c:?}")))?;
            bits.extend((0..4).rev().map(|i| (nibble >> i) & 1 == 1));
        }
        Ok(BitMessage(bits))
    }

    /// Bits of `bytes`, MSB first.
    pub fn from_bytes(bytes: &[u8]) -> Self {
        BitMessage(
            bytes
                .iter()
                .flat_map(|b| (0..8).rev().map(move |i| (b >> i) & 1 == 1))
                .collect(),
        )
    }

    /// The low `width` bits of `value`, MSB first.
    pub fn from_u64(value: u64, width: usize) -> Self {
        BitMessage((0..width).rev().map(|i| (value >> i) & 1 == 1).collect())
    }

    pub fn bits(&self) -> &[bool] {
        &self.0
    }

    pub fn into_bits(self) -> Vec<bool> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn truncated(&self, len: usize) -> BitMessage {
        BitMessage(self.0[..len.min(self.0.len())].to_vec())
    }
}

impl fmt::Display for BitMessage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.0 {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl From<BitMessage> for String {
    fn from(m: BitMessage) -> String {
        m.to_string()
    }
}

impl TryFrom<String> for BitMessage {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        BitMessage::from_bit_str(&s)
    }
}

impl From<Vec<bool>> for BitMessage {
    fn from(bits: Vec<bool>) -> Self {
        BitMessage(bits)
    }
}

/// A zero-padded message together with the length it had before padding.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PaddedMessage {
    pub bits: BitMessage,
    pub original_len: usize,
}

/// Zero-pads `message` to a multiple of 4 bits.
pub fn pad(message: &BitMessage) -> PaddedMessage {
    pad_to(message, 4)
}

/// Zero-pads `message` to a multiple of `word` bits.
pub fn pad_to(message: &BitMessage, word: usize) -> PaddedMessage {
    let original_len = message.len();
    let mut bits = message.0.clone();
    let rem = original_len % word;
    if rem != 0 {
        bits.resize(original_len + word - rem, false);
    }
    PaddedMessage {
        bits: BitMessage(bits),
        original_len,
    }
}

/// One transmitted vibration: PWM duty level, ON time and trailing OFF time.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Symbol {
    pub pwm: u32,
    pub on_ms: u32,
    pub off_ms: u32,
}

impl Symbol {
    pub const fn new(pwm: u32, on_ms: u32, off_ms: u32) -> Self {
        Symbol { pwm, on_ms, off_ms }
    }

    pub fn period_ms(&self) -> u32 {
        self.on_ms + self.off_ms
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {} ms, {} ms)", self.pwm, self.on_ms, self.off_ms)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    /// PWM, ON and OFF all carry data: 4 bits per symbol.
    Full,
    /// Only ON and OFF carry data at a fixed PWM: 2 bits per symbol.
    TimeOnly,
}

/// Parameter tables used to map words onto symbols.
///
/// Each table is indexed by the bit pattern it encodes and must be strictly
/// increasing, which makes it a bijection and lets the receiver demap with
/// midpoint thresholds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EncodingProfile {
    pub mode: Mode,
    pub pwm_levels: [u32; 4],
    pub on_ms: [u32; 2],
    pub off_ms: [u32; 2],
    /// PWM level used for every symbol in time-only mode.
    pub fixed_pwm: u32,
}

impl Default for EncodingProfile {
    fn default() -> Self {
        EncodingProfile {
            mode: Mode::Full,
            pwm_levels: [20, 30, 60, 100],
            on_ms: [250, 500],
            off_ms: [150, 300],
            fixed_pwm: 60,
        }
    }
}

impl EncodingProfile {
    pub fn full() -> Self {
        Self::default()
    }

    pub fn time_only() -> Self {
        EncodingProfile {
            mode: Mode::TimeOnly,
            ..Self::default()
        }
    }

    /// Default tables with every ON and OFF duration multiplied by `factor`.
    pub fn with_time_scale(mut self, factor: f64) -> Self {
        let scale = |v: u32| (f64::from(v) * factor).round().max(1.0) as u32;
        self.on_ms = self.on_ms.map(scale);
        self.off_ms = self.off_ms.map(scale);
        self
    }

    pub fn bits_per_symbol(&self) -> usize {
        match self.mode {
            Mode::Full => 4,
            Mode::TimeOnly => 2,
        }
    }

    pub fn validate(&self) -> Result<()> {
        fn increasing(values: &[u32]) -> bool {
            values.windows(2).all(|w| w[0] < w[1])
        }
        if !increasing(&self.pwm_levels) {
            return Err(Error::Config("pwm_levels must be strictly increasing".into()));
        }
        if !increasing(&self.on_ms) || !increasing(&self.off_ms) {
            return Err(Error::Config("on_ms and off_ms must be strictly increasing".into()));
        }
        if self.on_ms[0] == 0 {
            return Err(Error::Config("on_ms values must be positive".into()));
        }
        if self.fixed_pwm == 0 {
            return Err(Error::Config("fixed_pwm must be positive".into()));
        }
        Ok(())
    }

    /// The three pilot symbols appended to every message.
    pub fn pilot(&self) -> PilotSequence {
        let pwm = match self.mode {
            Mode::Full => [self.pwm_levels[0], self.pwm_levels[1], self.pwm_levels[2]],
            Mode::TimeOnly => [self.fixed_pwm; 3],
        };
        PilotSequence {
            pwm,
            on_ms: [self.on_ms[0], self.on_ms[1], self.on_ms[0]],
            off_ms: [self.off_ms[0], self.off_ms[1]],
            trailing_off_ms: self.off_ms[0],
        }
    }

    fn symbol_for(&self, word: &[bool]) -> Symbol {
        let bit = |b: bool| usize::from(b);
        match self.mode {
            Mode::Full => Symbol {
                pwm: self.pwm_levels[bit(word[0]) << 1 | bit(word[1])],
                on_ms: self.on_ms[bit(word[2])],
                off_ms: self.off_ms[bit(word[3])],
            },
            Mode::TimeOnly => Symbol {
                pwm: self.fixed_pwm,
                on_ms: self.on_ms[bit(word[0])],
                off_ms: self.off_ms[bit(word[1])],
            },
        }
    }

    fn word_for(&self, symbol: &Symbol, out: &mut Vec<bool>) -> Result<()> {
        let on = index_of(&self.on_ms, symbol.on_ms, "on_ms")?;
        let off = index_of(&self.off_ms, symbol.off_ms, "off_ms")?;
        match self.mode {
            Mode::Full => {
                let pwm = index_of(&self.pwm_levels, symbol.pwm, "pwm")?;
                out.extend([pwm & 2 != 0, pwm & 1 != 0, on == 1, off == 1]);
            }
            Mode::TimeOnly => {
                if symbol.pwm != self.fixed_pwm {
                    return Err(Error::IllegalParameter {
                        field: "pwm",
                        value: symbol.pwm,
                    });
                }
                out.extend([on == 1, off == 1]);
            }
        }
        Ok(())
    }
}

fn index_of(table: &[u32], value: u32, field: &'static str) -> Result<usize> {
    table
        .iter()
        .position(|&v| v == value)
        .ok_or(Error::IllegalParameter { field, value })
}

/// Known symbol triple appended after the message.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PilotSequence {
    pub pwm: [u32; 3],
    pub on_ms: [u32; 3],
    /// Gaps between the first/second and second/third pilot symbols.
    pub off_ms: [u32; 2],
    /// OFF after the last pilot symbol. Carries no information.
    pub trailing_off_ms: u32,
}

impl PilotSequence {
    pub const LEN: usize = 3;

    pub fn symbols(&self) -> [Symbol; 3] {
        [
            Symbol::new(self.pwm[0], self.on_ms[0], self.off_ms[0]),
            Symbol::new(self.pwm[1], self.on_ms[1], self.off_ms[1]),
            Symbol::new(self.pwm[2], self.on_ms[2], self.trailing_off_ms),
        ]
    }
}

/// Encodes `message` as message symbols followed by the pilot.
pub fn encode(message: &BitMessage, profile: &EncodingProfile) -> Result<Vec<Symbol>> {
    if message.is_empty() {
        return Err(Error::EmptyMessage);
    }
    let mut symbols = encode_payload(message, profile);
    symbols.extend(profile.pilot().symbols());
    Ok(symbols)
}

/// Message symbols only, without the pilot.
pub fn encode_payload(message: &BitMessage, profile: &EncodingProfile) -> Vec<Symbol> {
    let width = profile.bits_per_symbol();
    let padded = pad_to(message, width);
    padded
        .bits
        .bits()
        .chunks(width)
        .map(|word| profile.symbol_for(word))
        .collect()
}

/// Inverse of [`encode_payload`]. The pilot must already be stripped.
pub fn decode_symbols(symbols: &[Symbol], profile: &EncodingProfile) -> Result<BitMessage> {
    let mut bits = Vec::with_capacity(symbols.len() * profile.bits_per_symbol());
    for symbol in symbols {
        profile.word_for(symbol, &mut bits)?;
    }
    Ok(BitMessage(bits))
}
