use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Eccentric rotating mass motor.
///
/// The centrifugal force of the spinning mass is `F = m r w^2` with the
/// angular velocity `w` an affine function of PWM duty.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MotorModel {
    /// Eccentric mass in kg.
    pub mass_kg: f64,
    /// Eccentric radius in m.
    pub radius_m: f64,
    /// Angular velocity at zero duty, rad/s.
    pub omega_base: f64,
    /// Angular velocity gained per PWM unit, rad/s.
    pub omega_per_pwm: f64,
    /// First-order rise constant after switch-on.
    pub ramp_up_ms: f64,
    /// Exponential decay constant of the ringing after switch-off.
    pub ramp_down_ms: f64,
}

impl Default for MotorModel {
    fn default() -> Self {
        let two_pi = 2.0 * std::f64::consts::PI;
        MotorModel {
            mass_kg: 1.0e-3,
            radius_m: 1.0e-3,
            omega_base: two_pi * 70.0,
            omega_per_pwm: two_pi * 0.1,
            ramp_up_ms: 30.0,
            ramp_down_ms: 50.0,
        }
    }
}

impl MotorModel {
    pub fn omega(&self, pwm: f64) -> f64 {
        self.omega_base + self.omega_per_pwm * pwm
    }

    /// Centrifugal force in newtons.
    pub fn force(&self, pwm: f64) -> f64 {
        let w = self.omega(pwm);
        self.mass_kg * self.radius_m * w * w
    }
}

/// The two dominant spectral components seen at the sensor for one PWM level.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Overtone {
    pub pwm: f64,
    pub f1: f64,
    pub f2: f64,
    pub a1: f64,
    pub a2: f64,
}

/// Skin/hand frequency response as a function of PWM.
///
/// Two-sided exponential around `peak_pwm`: `exp(-|pwm - peak| / width)`
/// with separate widths below and above the peak.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Resonance {
    pub peak_pwm: f64,
    pub width_below: f64,
    pub width_above: f64,
}

impl Default for Resonance {
    fn default() -> Self {
        Resonance {
            peak_pwm: 60.0,
            width_below: 200.0,
            width_above: 100.0,
        }
    }
}

impl Resonance {
    pub fn gain(&self, pwm: f64) -> f64 {
        let d = pwm - self.peak_pwm;
        let width = if d < 0.0 { self.width_below } else { self.width_above };
        (-d.abs() / width).exp()
    }
}

/// Receiver placement along the forearm.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Placement {
    /// 15 cm from the transmitter.
    Top,
    /// 7.5 cm.
    Middle,
    /// 2 cm.
    Bottom,
}

impl Placement {
    pub const ALL: [Placement; 3] = [Placement::Top, Placement::Middle, Placement::Bottom];

    pub fn attenuation(self) -> f64 {
        match self {
            Placement::Top => 1.0,
            Placement::Middle => 0.7,
            Placement::Bottom => 0.95,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Placement::Top => "top",
            Placement::Middle => "middle",
            Placement::Bottom => "bottom",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NoiseConfig {
    /// Standard deviation of white noise per axis, m/s^2.
    pub white_sigma: f64,
    /// Amplitude of slow (< 40 Hz) drift per axis, m/s^2.
    pub drift_amplitude: f64,
}

/// Physical channel between the motor and the accelerometer.
///
/// Stored on disk as TOML. Every field is optional and falls back to the
/// default below:
///
/// ```toml
/// sampling_rate = 700.0         # Hz
/// coupling = 4.0                # m/s^2 at the sensor per newton of motor force
/// attenuation = 1.0             # placement loss, see `Placement`
/// axis_direction = [0.8, 0.4, 0.45]
///
/// [motor]
/// mass_kg = 0.001
/// radius_m = 0.001
/// omega_base = 439.82           # rad/s
/// omega_per_pwm = 0.6283        # rad/s per PWM unit
/// ramp_up_ms = 30.0
/// ramp_down_ms = 50.0
///
/// [resonance]
/// peak_pwm = 60.0
/// width_below = 200.0
/// width_above = 100.0
///
/// [noise]
/// white_sigma = 0.0             # m/s^2
/// drift_amplitude = 0.0         # m/s^2
///
/// [[overtones]]
/// pwm = 20.0
/// f1 = 70.0
/// f2 = 140.0
/// a1 = 1.0
/// a2 = 0.8
/// ```
///
/// When a recorded noise trace is shorter than the signal it is tiled
/// periodically (see [`superimpose`](crate::channel::superimpose)).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ChannelConfig {
    pub sampling_rate: f64,
    pub coupling: f64,
    pub attenuation: f64,
    pub axis_direction: [f64; 3],
    pub motor: MotorModel,
    pub resonance: Resonance,
    pub noise: NoiseConfig,
    pub overtones: Vec<Overtone>,
}

impl Default for ChannelConfig {
    fn default() -> Self {
        ChannelConfig {
            sampling_rate: 700.0,
            coupling: 4.0,
            attenuation: 1.0,
            axis_direction: [0.8, 0.4, 0.45],
            motor: MotorModel::default(),
            resonance: Resonance::default(),
            noise: NoiseConfig::default(),
            overtones: default_overtones(),
        }
    }
}

pub fn default_overtones() -> Vec<Overtone> {
    let entry = |pwm, f1, f2, a1, a2| Overtone { pwm, f1, f2, a1, a2 };
    vec![
        entry(20.0, 70.0, 140.0, 1.0, 0.8),
        entry(30.0, 95.0, 190.0, 1.0, 0.8),
        entry(60.0, 150.0, 300.0, 1.0, 0.8),
        // one component holds nearly all of the energy
        entry(100.0, 250.0, 125.0, 1.0, 0.05),
    ]
}

impl ChannelConfig {
    pub fn from_toml_str(s: &str) -> Result<Self> {
        let cfg: ChannelConfig = toml::from_str(s).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string_pretty(self).expect("channel config serializes")
    }

    pub fn with_placement(mut self, placement: Placement) -> Self {
        self.attenuation = placement.attenuation();
        self
    }

    pub fn with_white_noise(mut self, sigma: f64) -> Self {
        self.noise.white_sigma = sigma;
        self
    }

    pub fn nyquist(&self) -> f64 {
        self.sampling_rate / 2.0
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        if !(self.sampling_rate > 0.0) {
            return bad(format!("sampling_rate must be positive, got {}", self.sampling_rate));
        }
        if self.overtones.is_empty() {
            return bad("overtone table is empty".into());
        }
        let nyquist = self.nyquist();
        for o in &self.overtones {
            for f in [o.f1, o.f2] {
                if !(f > 0.0) || f >= nyquist {
                    return bad(format!(
                        "overtone {f} Hz for PWM {} is outside (0, {nyquist}) Hz",
                        o.pwm
                    ));
                }
            }
            if o.a1 < 0.0 || o.a2 < 0.0 {
                return bad(format!("negative overtone amplitude for PWM {}", o.pwm));
            }
        }
        if self.resonance.width_below <= 0.0 || self.resonance.width_above <= 0.0 {
            return bad("resonance widths must be positive".into());
        }
        if self.motor.omega_per_pwm <= 0.0 || self.motor.omega(0.0) < 0.0 {
            return bad("motor angular velocity must be non-negative and increasing in PWM".into());
        }
        if self.motor.ramp_up_ms <= 0.0 || self.motor.ramp_down_ms <= 0.0 {
            return bad("ramp constants must be positive".into());
        }
        if self.noise.white_sigma < 0.0 || self.noise.drift_amplitude < 0.0 {
            return bad("noise levels must be non-negative".into());
        }
        if self.axis_direction.iter().all(|&c| c == 0.0) {
            return bad("axis_direction must be non-zero".into());
        }
        Ok(())
    }

    /// Overtones for an arbitrary PWM level: exact table entries, linear
    /// interpolation between them, and the nearest entry outside the table.
    pub fn overtone(&self, pwm: f64) -> Overtone {
        let mut table = self.overtones.clone();
        table.sort_by(|a, b| a.pwm.total_cmp(&b.pwm));
        let first = table[0];
        let last = table[table.len() - 1];
        if pwm <= first.pwm {
            return Overtone { pwm, ..first };
        }
        if pwm >= last.pwm {
            return Overtone { pwm, ..last };
        }
        let hi = table.iter().position(|o| o.pwm >= pwm).unwrap();
        let (a, b) = (table[hi - 1], table[hi]);
        if b.pwm == pwm {
            return b;
        }
        let t = (pwm - a.pwm) / (b.pwm - a.pwm);
        let lerp = |x: f64, y: f64| x + (y - x) * t;
        Overtone {
            pwm,
            f1: lerp(a.f1, b.f1),
            f2: lerp(a.f2, b.f2),
            a1: lerp(a.a1, b.a1),
            a2: lerp(a.a2, b.a2),
        }
    }

    /// Steady-state vibration amplitude at the sensor, m/s^2.
    pub fn amplitude(&self, pwm: f64) -> f64 {
        self.coupling * self.motor.force(pwm) * self.resonance.gain(pwm) * self.attenuation
    }

    /// Unit vector along which the vibration shows up in sensor axes.
    pub fn unit_direction(&self) -> [f64; 3] {
        let d = self.axis_direction;
        let norm = (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt();
        [d[0] / norm, d[1] / norm, d[2] / norm]
    }

    /// The frequency a receiver's peak tracker should report for `pwm`: the
    /// mean of both overtones when the weaker is within an order of
    /// magnitude of the stronger, otherwise the stronger alone.
    pub fn tracked_frequency(&self, pwm: f64, ratio_threshold: f64) -> f64 {
        let o = self.overtone(pwm);
        let (strong, weak, fs, fw) = if o.a1 >= o.a2 {
            (o.a1, o.a2, o.f1, o.f2)
        } else {
            (o.a2, o.a1, o.f2, o.f1)
        };
        if strong > 0.0 && weak / strong >= ratio_threshold {
            (fs + fw) / 2.0
        } else {
            fs
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        ChannelConfig::default().validate().unwrap();
    }

    #[test]
    fn overtone_above_nyquist_rejected() {
        let mut cfg = ChannelConfig::default();
        cfg.sampling_rate = 200.0;
        assert!(matches!(cfg.validate(), Err(Error::Config(_))));
    }

    #[test]
    fn force_increases_with_pwm() {
        let motor = MotorModel::default();
        let grid: Vec<f64> = (20..=240).map(f64::from).collect();
        for w in grid.windows(2) {
            assert!(motor.omega(w[1]) > motor.omega(w[0]));
            assert!(motor.force(w[1]) > motor.force(w[0]));
            assert!(motor.force(w[0]) >= 0.0);
        }
    }

    #[test]
    fn resonance_peaks_at_sixty() {
        let res = Resonance::default();
        let best = (20..=240)
            .max_by(|&a, &b| res.gain(f64::from(a)).total_cmp(&res.gain(f64::from(b))))
            .unwrap();
        assert_eq!(best, 60);
        assert!(res.gain(150.0) < res.gain(100.0));
    }

    #[test]
    fn overtone_interpolation() {
        let cfg = ChannelConfig::default();
        assert_eq!(cfg.overtone(60.0).f1, 150.0);
        assert_eq!(cfg.overtone(45.0).f1, 122.5);
        assert_eq!(cfg.overtone(240.0).f1, 250.0);
        assert_eq!(cfg.overtone(10.0).f1, 70.0);
    }

    #[test]
    fn tracked_frequencies() {
        let cfg = ChannelConfig::default();
        assert_eq!(cfg.tracked_frequency(20.0, 0.1), 105.0);
        assert_eq!(cfg.tracked_frequency(60.0, 0.1), 225.0);
        assert_eq!(cfg.tracked_frequency(100.0, 0.1), 250.0);
    }

    #[test]
    fn toml_round_trip_and_partial() {
        let cfg = ChannelConfig::default().with_white_noise(0.25);
        let back = ChannelConfig::from_toml_str(&cfg.to_toml_string()).unwrap();
        assert_eq!(back, cfg);
        let partial = ChannelConfig::from_toml_str("attenuation = 0.5\n[noise]\nwhite_sigma = 0.1\n").unwrap();
        assert_eq!(partial.attenuation, 0.5);
        assert_eq!(partial.overtones, default_overtones());
        assert!(ChannelConfig::from_toml_str("bogus = 1").is_err());
    }
}
