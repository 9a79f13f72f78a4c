//! Sends a 4-digit PIN over the simulated vibration channel and decodes it.
//!
//! cargo run --example pin_transfer -- 5926 0.15

use vibrolink::channel::{synthesize, ChannelConfig};
use vibrolink::cli::pin_bits;
use vibrolink::demodulator::{decode_expecting, DecoderConfig};
use vibrolink::framing::{encode, EncodingProfile};
use vibrolink::metrics::bit_error_rate;
use vibrolink::modulator::{duration_ms, schedule};

fn main() -> vibrolink::Result<()> {
    let mut args = std::env::args().skip(1);
    let pin = args.next().unwrap_or_else(|| "5926".into());
    let sigma: f64 = args.next().map_or(0.1, |s| s.parse().expect("noise sigma"));

    let bits = pin_bits(&pin)?;
    let profile = EncodingProfile::default();
    let symbols = encode(&bits, &profile)?;
    let sched = schedule(&symbols);
    println!("PIN {pin} -> {bits} ({} symbols incl. pilot)", symbols.len());
    for s in &symbols {
        println!("  pwm {:>3}  on {:>3} ms  off {:>3} ms", s.pwm, s.on_ms, s.off_ms);
    }

    let channel = ChannelConfig::default().with_white_noise(sigma);
    let trace = synthesize(&sched, &channel, 1)?;
    let decoder = DecoderConfig::for_channel(&channel, &profile);
    let result = decode_expecting(&trace, &profile, &decoder, Some(bits.len()));

    let received = u32::from_str_radix(&result.bits.to_string(), 2).ok();
    println!("transmission {:.2} s, {} samples at {} Hz", duration_ms(&sched) as f64 / 1000.0, trace.len(), trace.sample_rate);
    println!("received {} -> PIN {:?}", result.bits, received);
    println!("BER {:.4}, flags {:?}", bit_error_rate(&bits, &result.bits), result.flags);
    if let Some(off) = &result.pilot_offsets {
        println!("pilot offset {:+.1} Hz", off.pwm_hz);
    }
    Ok(())
}
