//! Synthetic stand-ins for recorded motion-sensor noise.
//!
//! These produce traces with the rough character of everyday activity so
//! experiments can exercise [`superimpose`](super::superimpose) without a
//! library of real recordings. Real recordings load through
//! [`formats::read_trace`](crate::formats::read_trace) and are used the same way.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::trace::AccelTrace;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MotionKind {
    /// Heel strikes about twice a second, each a short damped broadband knock.
    Walking,
    /// Engine harmonics plus broadband road rumble.
    Vehicle,
}

impl MotionKind {
    pub fn name(self) -> &'static str {
        match self {
            MotionKind::Walking => "walking",
            MotionKind::Vehicle => "vehicle",
        }
    }
}

/// `duration_s` seconds of synthetic motion noise with overall RMS close to `level`.
pub fn synthetic_motion(kind: MotionKind, duration_s: f64, rate: f64, level: f64, seed: u64) -> AccelTrace {
    let len = (duration_s * rate).ceil() as usize;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut samples = vec![[0.0f64; 3]; len];
    match kind {
        MotionKind::Walking => {
            let mut t = rng.gen_range(0.0..0.5);
            while t < duration_s {
                let start = (t * rate) as usize;
                let ring = rng.gen_range(40.0..90.0);
                let axis_gain = [rng.gen_range(0.3..1.0), rng.gen_range(0.3..1.0), 1.0];
                for (k, s) in samples.iter_mut().skip(start).take((0.08 * rate) as usize).enumerate() {
                    let dt = k as f64 / rate;
                    let v = 4.0 * level * (-dt / 0.015).exp() * (2.0 * PI * ring * dt).sin();
                    for (x, g) in s.iter_mut().zip(axis_gain) {
                        *x += g * v;
                    }
                }
                t += rng.gen_range(0.45..0.6);
            }
            // body sway
            for (i, s) in samples.iter_mut().enumerate() {
                s[2] += 0.5 * level * (2.0 * PI * 1.9 * i as f64 / rate).sin();
            }
        }
        MotionKind::Vehicle => {
            let rumble = Normal::new(0.0, 0.6 * level).unwrap();
            let engine = rng.gen_range(25.0..35.0);
            let phases: Vec<f64> = (0..3).map(|_| rng.gen_range(0.0..2.0 * PI)).collect();
            for (i, s) in samples.iter_mut().enumerate() {
                let t = i as f64 / rate;
                let hum: f64 = phases
                    .iter()
                    .enumerate()
                    .map(|(h, p)| (2.0 * PI * engine * (h + 1) as f64 * t + p).sin() / (h + 1) as f64)
                    .sum();
                for x in s.iter_mut() {
                    *x += 0.6 * level * hum + rumble.sample(&mut rng);
                }
            }
        }
    }
    AccelTrace::new(rate, samples)
}
