use std::f64::consts::PI;

use vibrolink::channel::motion::{synthetic_motion, MotionKind};
use vibrolink::channel::{resample, sine_sweep, superimpose, synthesize, AccelTrace, ChannelConfig, Placement};
use vibrolink::demodulator::{
    decode, decode_expecting, frequency_track, spectrogram, DecodeFlag, DecoderConfig, TrackerConfig,
};
use vibrolink::framing::{encode, encode_payload, BitMessage, EncodingProfile, Symbol};
use vibrolink::metrics::bit_error_rate;
use vibrolink::modulator::schedule;
use vibrolink::Error;

fn tone(f: f64, n: usize) -> AccelTrace {
    AccelTrace::new(700.0, (0..n).map(|i| [0.0, (2.0 * PI * f * i as f64 / 700.0).sin(), 0.0]).collect())
}

fn round_trip(bits: &BitMessage, profile: &EncodingProfile, channel: &ChannelConfig, seed: u64) -> f64 {
    let trace = synthesize(&schedule(&encode(bits, profile).unwrap()), channel, seed).unwrap();
    let decoder = DecoderConfig::for_channel(channel, profile);
    let r = decode_expecting(&trace, profile, &decoder, Some(bits.len()));
    bit_error_rate(bits, &r.bits)
}

#[test]
fn spectrogram_of_one_window() {
    let spec = spectrogram(&tone(150.0, 128)).unwrap();
    assert_eq!(spec.n_windows(), 1);
    assert_eq!(spec.window_start_times, vec![0.0]);
    assert_eq!(spectrogram(&tone(150.0, 127)), Err(Error::TooShort { len: 127, needed: 128 }));
}

#[test]
fn tone_peaks_at_its_bin() {
    let spec = spectrogram(&tone(150.0, 700)).unwrap();
    for w in 0..spec.n_windows() {
        let m = spec.window(w);
        let best = (0..m.len()).max_by(|&a, &b| m[a].total_cmp(&m[b])).unwrap();
        assert!((spec.frequency(best) - 150.0).abs() <= spec.bin_hz);
    }
    assert!(spec.frequencies().iter().all(|f| (40.0..350.0).contains(f)));
}

#[test]
fn gravity_alone_has_no_peak() {
    let still = AccelTrace::new(700.0, vec![[0.0, 0.0, 9.81]; 1400]);
    let track = frequency_track(&still, &TrackerConfig::default()).unwrap();
    assert!(track.y.iter().all(|&v| v == 0.0));
    let r = decode(&still, &EncodingProfile::default(), &DecoderConfig::default());
    assert_eq!(r.flags, vec![DecodeFlag::NoSymbolsFound]);
}

#[test]
fn sweep_energy_peaks_at_resonance() {
    let cfg = ChannelConfig::default();
    let dwell = 1000;
    let trace = sine_sweep(&cfg, (10, 100), 10, dwell).unwrap();
    let per_step = trace.len() / 10;
    let energy: Vec<f64> = trace
        .samples
        .chunks(per_step)
        .map(|c| AccelTrace::new(700.0, c.to_vec()).rms())
        .collect();
    let best = (0..energy.len()).max_by(|&a, &b| energy[a].total_cmp(&energy[b])).unwrap();
    assert_eq!(10 + 10 * best as u32, 60, "{energy:?}");
}

#[test]
fn ringing_does_not_bridge_short_gap() {
    let cfg = ChannelConfig::default();
    let syms = [Symbol::new(100, 250, 150), Symbol::new(100, 250, 150)];
    let trace = synthesize(&schedule(&syms), &cfg, 0).unwrap();
    let r = decode(&trace, &EncodingProfile::default(), &DecoderConfig::default());
    assert_eq!(r.estimates.len(), 2, "{:?}", r.estimates);
    assert!((r.estimates.off_ms[0] - 150.0).abs() < 60.0, "{:?}", r.estimates.off_ms);
}

#[test]
fn every_word_in_both_modes() {
    let cfg = ChannelConfig::default();
    for profile in [EncodingProfile::full(), EncodingProfile::time_only()] {
        for w in 0..16 {
            let bits = BitMessage::from_u64(w, 4);
            assert_eq!(round_trip(&bits, &profile, &cfg, w), 0.0, "{:?} word {w}", profile.mode);
        }
    }
}

#[test]
fn odd_length_message_is_truncated() {
    let bits = BitMessage::from_bit_str("1011001").unwrap();
    assert_eq!(round_trip(&bits, &EncodingProfile::default(), &ChannelConfig::default(), 5), 0.0);
}

#[test]
fn missing_pilot_is_flagged() {
    let profile = EncodingProfile::default();
    let payload = encode_payload(&BitMessage::from_hex("c3a5").unwrap(), &profile);
    let trace = synthesize(&schedule(&payload), &ChannelConfig::default(), 1).unwrap();
    let r = decode(&trace, &profile, &DecoderConfig::default());
    assert!(r.has_flag(DecodeFlag::PilotNotFound), "{:?}", r.flags);
}

#[test]
fn dropped_symbol_fails_length_check() {
    let profile = EncodingProfile::default();
    let bits = BitMessage::from_hex("0123456789abcdef").unwrap();
    let mut syms = encode(&bits, &profile).unwrap();
    syms.remove(5);
    let trace = synthesize(&schedule(&syms), &ChannelConfig::default(), 2).unwrap();
    let r = decode_expecting(&trace, &profile, &DecoderConfig::default(), Some(64));
    assert!(r.has_flag(DecodeFlag::LengthMismatch));
    assert_eq!(r.bits.len(), 60);
}

#[test]
fn placement_orders_signal_strength() {
    let sched = schedule(&encode(&BitMessage::from_hex("ff").unwrap(), &EncodingProfile::default()).unwrap());
    let rms = |p: Placement| {
        synthesize(&sched, &ChannelConfig::default().with_placement(p), 0)
            .unwrap()
            .rms()
    };
    let (top, middle, bottom) = (rms(Placement::Top), rms(Placement::Middle), rms(Placement::Bottom));
    assert!(top > bottom && bottom > middle, "{top} {middle} {bottom}");
}

#[test]
fn time_only_mode_survives_resampling() {
    // below 700 Hz the anti-aliasing filter removes the 300 Hz overtone, but
    // time-only symbols never need the PWM level
    let profile = EncodingProfile::time_only();
    let bits = BitMessage::from_hex("5a").unwrap();
    let trace = synthesize(&schedule(&encode(&bits, &profile).unwrap()), &ChannelConfig::default(), 0).unwrap();
    let low = resample(&trace, 500.0).unwrap();
    assert!((low.duration_s() - trace.duration_s()).abs() < 0.01);
    let r = decode_expecting(&low, &profile, &DecoderConfig::for_channel(&ChannelConfig::default(), &profile), Some(8));
    assert_eq!(r.bits, bits, "{:?}", r.flags);
}

#[test]
fn light_walking_motion_is_tolerated() {
    let profile = EncodingProfile::default();
    let bits = BitMessage::from_hex("9e37").unwrap();
    let trace = synthesize(&schedule(&encode(&bits, &profile).unwrap()), &ChannelConfig::default(), 4).unwrap();
    let motion = synthetic_motion(MotionKind::Walking, trace.duration_s(), 700.0, 0.05, 4);
    let noisy = superimpose(&trace, &motion).unwrap();
    let r = decode_expecting(&noisy, &profile, &DecoderConfig::default(), Some(16));
    assert_eq!(r.bits, bits, "{:?}", r.flags);
}
