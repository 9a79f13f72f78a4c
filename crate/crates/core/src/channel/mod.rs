//! Motor -> skin -> accelerometer channel simulator.

mod config;
pub mod motion;
mod resample;
mod synth;
mod trace;

pub use config::{
    default_overtones, ChannelConfig, MotorModel, NoiseConfig, Overtone, Placement, Resonance,
};
pub use resample::{resample, CUTOFF_FRACTION};
pub use synth::{samples_for, sine_sweep, superimpose, synthesize};
pub use trace::AccelTrace;
