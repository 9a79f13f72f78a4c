use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use super::config::ChannelConfig;
use super::trace::AccelTrace;
use crate::error::{Error, Result};
use crate::modulator::{DriveCommand, DriveSchedule};

// Independent RNG streams so that changing the noise level never changes the
// vibration phases, and vice versa.
const PHASE_STREAM: u64 = 0;
const WHITE_STREAM: u64 = 1;
const DRIFT_STREAM: u64 = 2;

/// Ringing is simulated until the envelope has decayed by this factor.
const RINGING_FLOOR: f64 = 1e-4;

fn rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Number of samples covering `ms` milliseconds at `rate` Hz, rounded up.
pub fn samples_for(ms: u64, rate: f64) -> usize {
    let exact = ms as f64 * rate / 1000.0;
    (exact - 1e-9).ceil().max(0.0) as usize
}

/// Renders the accelerometer trace a drive schedule produces at the sensor.
///
/// Every ON interval contributes the two overtones of its PWM level, scaled
/// by the motor force, the resonance gain and the placement attenuation. The
/// envelope rises as `1 - exp(-t / ramp_up)` and after switch-off rings down
/// as `exp(-t / ramp_down)`. White noise and slow drift are added on every
/// axis. The output depends only on `(schedule, config, seed)`.
pub fn synthesize(schedule: &DriveSchedule, config: &ChannelConfig, seed: u64) -> Result<AccelTrace> {
    config.validate()?;
    let rate = config.sampling_rate;
    let len = samples_for(schedule.total_ms, rate);
    let mut signal = vec![0.0f64; len];

    let mut phases = rng(seed, PHASE_STREAM);
    for cmd in &schedule.commands {
        let overtone = config.overtone(f64::from(cmd.pwm));
        for f in [overtone.f1, overtone.f2] {
            if f >= config.nyquist() {
                return Err(Error::Config(format!(
                    "overtone {f} Hz for PWM {} is at or above Nyquist",
                    cmd.pwm
                )));
            }
        }
        let phase1 = phases.gen_range(0.0..2.0 * PI);
        let phase2 = phases.gen_range(0.0..2.0 * PI);
        render_burst(&mut signal, cmd, config, (phase1, phase2));
    }

    let dir = config.unit_direction();
    let mut samples: Vec<[f64; 3]> = signal
        .iter()
        .map(|&s| [dir[0] * s, dir[1] * s, dir[2] * s])
        .collect();
    add_white_noise(&mut samples, config.noise.white_sigma, seed);
    add_drift(&mut samples, config.noise.drift_amplitude, rate, seed);
    Ok(AccelTrace::new(rate, samples))
}

fn render_burst(out: &mut [f64], cmd: &DriveCommand, config: &ChannelConfig, phases: (f64, f64)) {
    let rate = config.sampling_rate;
    let pwm = f64::from(cmd.pwm);
    let o = config.overtone(pwm);
    let amp = config.amplitude(pwm);
    let tau_up = config.motor.ramp_up_ms / 1000.0;
    let tau_down = config.motor.ramp_down_ms / 1000.0;

    let t_on = cmd.start_ms as f64 / 1000.0;
    let t_off = cmd.end_ms() as f64 / 1000.0;
    let env_at_off = 1.0 - (-(t_off - t_on) / tau_up).exp();
    let t_stop = t_off - tau_down * RINGING_FLOOR.ln();

    let first = (t_on * rate - 1e-9).ceil().max(0.0) as usize;
    let last = ((t_stop * rate).ceil() as usize).min(out.len());
    for (i, slot) in out.iter_mut().enumerate().take(last).skip(first) {
        let t = i as f64 / rate;
        let env = if t < t_off {
            1.0 - (-(t - t_on) / tau_up).exp()
        } else {
            env_at_off * (-(t - t_off) / tau_down).exp()
        };
        let wave = o.a1 * (2.0 * PI * o.f1 * t + phases.0).sin()
            + o.a2 * (2.0 * PI * o.f2 * t + phases.1).sin();
        *slot += amp * env * wave;
    }
}

fn add_white_noise(samples: &mut [[f64; 3]], sigma: f64, seed: u64) {
    if sigma <= 0.0 {
        return;
    }
    let normal = Normal::new(0.0, sigma).expect("sigma is finite and positive");
    let mut rng = rng(seed, WHITE_STREAM);
    for s in samples.iter_mut() {
        for v in s.iter_mut() {
            *v += normal.sample(&mut rng);
        }
    }
}

/// Slow body motion: three random sinusoids between 0.5 and 20 Hz per axis.
fn add_drift(samples: &mut [[f64; 3]], amplitude: f64, rate: f64, seed: u64) {
    if amplitude <= 0.0 {
        return;
    }
    let mut rng = rng(seed, DRIFT_STREAM);
    let per_tone = amplitude / 3f64.sqrt();
    for axis in 0..3 {
        let tones: Vec<(f64, f64)> = (0..3)
            .map(|_| (rng.gen_range(0.5..20.0), rng.gen_range(0.0..2.0 * PI)))
            .collect();
        for (i, s) in samples.iter_mut().enumerate() {
            let t = i as f64 / rate;
            s[axis] += tones
                .iter()
                .map(|(f, p)| per_tone * (2.0 * PI * f * t + p).sin())
                .sum::<f64>();
        }
    }
}

/// Element-wise sum of `trace` and a recorded noise trace.
///
/// A noise trace shorter than `trace` is tiled periodically.
pub fn superimpose(trace: &AccelTrace, noise: &AccelTrace) -> Result<AccelTrace> {
    if (trace.sample_rate - noise.sample_rate).abs() > 1e-9 {
        return Err(Error::RateMismatch(trace.sample_rate, noise.sample_rate));
    }
    if noise.is_empty() {
        if trace.is_empty() {
            return Ok(trace.clone());
        }
        return Err(Error::Config("noise trace is empty".into()));
    }
    let samples = trace
        .samples
        .iter()
        .zip(noise.samples.iter().cycle())
        .map(|(a, b)| [a[0] + b[0], a[1] + b[1], a[2] + b[2]])
        .collect();
    Ok(AccelTrace::new(trace.sample_rate, samples))
}

/// Steps the motor through `pwm_range` in increments of `step`, holding each
/// level for `dwell_ms` with no gap in between.
pub fn sine_sweep(
    config: &ChannelConfig,
    pwm_range: (u32, u32),
    step: u32,
    dwell_ms: u64,
) -> Result<AccelTrace> {
    if step == 0 {
        return Err(Error::Config("sweep step must be positive".into()));
    }
    let commands: Vec<DriveCommand> = (pwm_range.0..=pwm_range.1)
        .step_by(step as usize)
        .enumerate()
        .map(|(i, pwm)| DriveCommand {
            pwm,
            start_ms: i as u64 * dwell_ms,
            duration_ms: dwell_ms,
        })
        .collect();
    let total_ms = commands.len() as u64 * dwell_ms;
    synthesize(&DriveSchedule { commands, total_ms }, config, 0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::framing::Symbol;
    use crate::modulator::schedule;

    fn noisy(sigma: f64) -> ChannelConfig {
        ChannelConfig::default().with_white_noise(sigma)
    }

    #[test]
    fn empty_schedule_gives_empty_trace() {
        let t = synthesize(&DriveSchedule::default(), &ChannelConfig::default(), 1).unwrap();
        assert!(t.is_empty());
    }

    #[test]
    fn length_matches_duration() {
        let s = schedule(&[Symbol::new(20, 250, 150)]);
        let t = synthesize(&s, &ChannelConfig::default(), 1).unwrap();
        assert_eq!(t.len(), 280);
        assert_eq!(samples_for(1, 700.0), 1);
        assert_eq!(samples_for(1000, 700.0), 700);
    }

    #[test]
    fn deterministic_per_seed() {
        let s = schedule(&[Symbol::new(60, 500, 300), Symbol::new(30, 250, 150)]);
        let cfg = noisy(0.3);
        let a = synthesize(&s, &cfg, 7).unwrap();
        let b = synthesize(&s, &cfg, 7).unwrap();
        let c = synthesize(&s, &cfg, 8).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn attenuation_scales_rms_linearly() {
        let s = schedule(&[Symbol::new(60, 500, 300), Symbol::new(100, 250, 150)]);
        let full = synthesize(&s, &ChannelConfig::default(), 3).unwrap();
        let mut cfg = ChannelConfig::default();
        cfg.attenuation = 0.5;
        let half = synthesize(&s, &cfg, 3).unwrap();
        assert!((half.rms() / full.rms() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn ringing_decays_within_min_off() {
        let motor = ChannelConfig::default().motor;
        let residual = (-150.0 / motor.ramp_down_ms).exp();
        assert!(residual < 0.05, "residual {residual}");
    }

    #[test]
    fn superimpose_linear() {
        let s = schedule(&[Symbol::new(30, 250, 150)]);
        let t = synthesize(&s, &noisy(0.1), 2).unwrap();
        let zero = AccelTrace::zeros(t.sample_rate, 10);
        assert_eq!(superimpose(&t, &zero).unwrap(), t);
        let doubled = superimpose(&t, &t).unwrap();
        assert_eq!(doubled, t.scaled(2.0));
        let other = AccelTrace::zeros(200.0, 10);
        assert!(matches!(superimpose(&t, &other), Err(Error::RateMismatch(..))));
    }

    #[test]
    fn superimpose_tiles_short_noise() {
        let t = AccelTrace::zeros(700.0, 5);
        let n = AccelTrace::new(700.0, vec![[1.0, 0.0, 0.0], [2.0, 0.0, 0.0]]);
        let out = superimpose(&t, &n).unwrap();
        let x: Vec<f64> = out.axis(0);
        assert_eq!(x, vec![1.0, 2.0, 1.0, 2.0, 1.0]);
    }

    #[test]
    fn sweep_geometry() {
        let cfg = ChannelConfig::default();
        let single = sine_sweep(&cfg, (60, 60), 10, 200).unwrap();
        assert_eq!(single.len(), samples_for(200, 700.0));
        let nine = sine_sweep(&cfg, (20, 100), 10, 200).unwrap();
        assert_eq!(nine.len(), samples_for(9 * 200, 700.0));
    }
}
