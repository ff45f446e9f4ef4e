use std::f64::consts::PI;

use crate::SAMPLE_RATE;

/// Direct-form-I biquad, `a0 = 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Biquad {
    pub b: [f64; 3],
    pub a: [f64; 2],
    x: [f64; 2],
    y: [f64; 2],
}

impl Biquad {
    pub fn new(b: [f64; 3], a: [f64; 2]) -> Self {
        Biquad {
            b,
            a,
            x: [0.0; 2],
            y: [0.0; 2],
        }
    }

    /// Two-pole resonator at `freq_hz` with bandwidth `bw_hz`, unit gain at DC.
    pub fn resonator(freq_hz: f64, bw_hz: f64) -> Self {
        let r = (-PI * bw_hz / SAMPLE_RATE as f64).exp();
        let theta = 2.0 * PI * freq_hz / SAMPLE_RATE as f64;
        let a1 = -2.0 * r * theta.cos();
        let a2 = r * r;
        Biquad::new([1.0 + a1 + a2, 0.0, 0.0], [a1, a2])
    }

    /// Poles strictly inside the unit circle.
    pub fn is_stable(&self) -> bool {
        let [a1, a2] = self.a;
        a2.abs() < 1.0 && a1.abs() < 1.0 + a2
    }

    pub fn process(&mut self, x: f64) -> f64 {
        let y = self.b[0] * x + self.b[1] * self.x[0] + self.b[2] * self.x[1] - self.a[0] * self.y[0] - self.a[1] * self.y[1];
        self.x = [x, self.x[0]];
        self.y = [y, self.y[0]];
        y
    }

    pub fn reset(&mut self) {
        self.x = [0.0; 2];
        self.y = [0.0; 2];
    }
}

/// One-pole lowpass `y = (1-p)x + p·y[-1]`.
#[derive(Debug, Clone, Copy)]
pub struct OnePole {
    pub pole: f64,
    y: f64,
}

impl OnePole {
    pub fn new(pole: f64) -> Self {
        OnePole { pole, y: 0.0 }
    }

    pub fn process(&mut self, x: f64) -> f64 {
        self.y = (1.0 - self.pole) * x + self.pole * self.y;
        self.y
    }
}
