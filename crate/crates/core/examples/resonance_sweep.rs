//! Steps the motor through PWM 10..100 and prints the vibration level at the
//! sensor for each step, the way one would look for the housing resonance.
//!
//! cargo run --example resonance_sweep

use vibrolink::channel::{sine_sweep, AccelTrace, ChannelConfig};

fn main() -> vibrolink::Result<()> {
    let cfg = ChannelConfig::default();
    let dwell_ms = 1000;
    let levels: Vec<u32> = (10..=100).step_by(10).collect();
    let trace = sine_sweep(&cfg, (10, 100), 10, dwell_ms)?;
    let per_step = trace.len() / levels.len();

    let mut best = (0, 0.0);
    for (pwm, chunk) in levels.iter().zip(trace.samples.chunks(per_step)) {
        // skip the spin-up transient
        let steady = &chunk[chunk.len() / 4..];
        let rms = AccelTrace::new(trace.sample_rate, steady.to_vec()).rms();
        let o = cfg.overtone(f64::from(*pwm));
        println!(
            "pwm {pwm:>3}  rms {rms:.3} m/s^2  overtones {:>5.1}/{:>5.1} Hz  {}",
            o.f1,
            o.f2,
            "#".repeat((rms * 40.0) as usize)
        );
        if rms > best.1 {
            best = (*pwm, rms);
        }
    }
    println!("strongest response at PWM {}", best.0);
    Ok(())
}
