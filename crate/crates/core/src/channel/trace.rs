use serde::{Deserialize, Serialize};

/// Uniformly sampled 3-axis accelerometer recording in m/s^2.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AccelTrace {
    pub sample_rate: f64,
    pub samples: Vec<[f64; 3]>,
}

impl AccelTrace {
    pub fn new(sample_rate: f64, samples: Vec<[f64; 3]>) -> Self {
        AccelTrace {
            sample_rate,
            samples,
        }
    }

    pub fn zeros(sample_rate: f64, len: usize) -> Self {
        AccelTrace::new(sample_rate, vec![[0.0; 3]; len])
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn duration_s(&self) -> f64 {
        self.samples.len() as f64 / self.sample_rate
    }

    pub fn time_of(&self, index: usize) -> f64 {
        index as f64 / self.sample_rate
    }

    pub fn axis(&self, axis: usize) -> Vec<f64> {
        self.samples.iter().map(|s| s[axis]).collect()
    }

    pub fn scaled(&self, k: f64) -> AccelTrace {
        self.map(|s| [s[0] * k, s[1] * k, s[2] * k])
    }

    /// Applies a 3x3 matrix (row-major) to every sample.
    pub fn rotated(&self, m: &[[f64; 3]; 3]) -> AccelTrace {
        self.map(|s| {
            let row = |r: &[f64; 3]| r[0] * s[0] + r[1] * s[1] + r[2] * s[2];
            [row(&m[0]), row(&m[1]), row(&m[2])]
        })
    }

    /// Prepends `ms` milliseconds of zero samples.
    pub fn with_leading_silence(&self, ms: f64) -> AccelTrace {
        let n = (ms / 1000.0 * self.sample_rate).round() as usize;
        let mut samples = vec![[0.0; 3]; n];
        samples.extend_from_slice(&self.samples);
        AccelTrace::new(self.sample_rate, samples)
    }

    /// Root-mean-square of the per-sample vector magnitude.
    pub fn rms(&self) -> f64 {
        if self.samples.is_empty() {
            return 0.0;
        }
        let sum: f64 = self
            .samples
            .iter()
            .map(|s| s[0] * s[0] + s[1] * s[1] + s[2] * s[2])
            .sum();
        (sum / self.samples.len() as f64).sqrt()
    }

    fn map(&self, f: impl Fn(&[f64; 3]) -> [f64; 3]) -> AccelTrace {
        AccelTrace::new(self.sample_rate, self.samples.iter().map(f).collect())
    }
}
