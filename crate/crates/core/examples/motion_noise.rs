//! Superimposes synthetic walking or vehicle motion on a transmission.
//! Also writes the motion trace as CSV so it can be fed to
//! `vibrolink simulate --noise`.
//!
//! cargo run --example motion_noise -- vehicle 0.2 vehicle.csv

use std::fs::File;

use vibrolink::channel::motion::{synthetic_motion, MotionKind};
use vibrolink::channel::{superimpose, synthesize, ChannelConfig};
use vibrolink::demodulator::{decode_expecting, DecoderConfig};
use vibrolink::formats::write_trace;
use vibrolink::framing::{encode, BitMessage, EncodingProfile};
use vibrolink::metrics::bit_error_rate;
use vibrolink::modulator::schedule;

fn main() -> vibrolink::Result<()> {
    let mut args = std::env::args().skip(1);
    let kind = match args.next().as_deref() {
        Some("walking") => MotionKind::Walking,
        _ => MotionKind::Vehicle,
    };
    let level: f64 = args.next().map_or(0.2, |s| s.parse().expect("motion level"));
    let out = args.next();

    let profile = EncodingProfile::default();
    let channel = ChannelConfig::default();
    let bits = BitMessage::from_bytes(b"vibe");
    let trace = synthesize(&schedule(&encode(&bits, &profile)?), &channel, 11)?;
    let motion = synthetic_motion(kind, trace.duration_s(), trace.sample_rate, level, 11);
    if let Some(path) = out {
        write_trace(&motion, File::create(&path)?)?;
        println!("wrote {} s of {} motion to {path}", motion.duration_s(), kind.name());
    }

    let noisy = superimpose(&trace, &motion)?;
    println!("signal rms {:.3}, motion rms {:.3} m/s^2", trace.rms(), motion.rms());
    let decoder = DecoderConfig::for_channel(&channel, &profile);
    let r = decode_expecting(&noisy, &profile, &decoder, Some(bits.len()));
    println!("{} motion at {level}: BER {:.4}, flags {:?}", kind.name(), bit_error_rate(&bits, &r.bits), r.flags);
    Ok(())
}
