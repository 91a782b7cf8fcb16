//! Second-order IIR sections (RBJ cookbook coefficients).

use std::f64::consts::PI;

#[derive(Debug, Clone, Copy)]
pub struct Biquad {
    b0: f64,
    b1: f64,
    b2: f64,
    a1: f64,
    a2: f64,
    x1: f64,
    x2: f64,
    y1: f64,
    y2: f64,
}

impl Biquad {
    fn from_raw(b: [f64; 3], a: [f64; 3]) -> Self {
        Self {
            b0: b[0] / a[0],
            b1: b[1] / a[0],
            b2: b[2] / a[0],
            a1: a[1] / a[0],
            a2: a[2] / a[0],
            x1: 0.0,
            x2: 0.0,
            y1: 0.0,
            y2: 0.0,
        }
    }

    pub fn lowpass(cutoff_hz: f64, q: f64, sample_rate: f64) -> Self {
        let w0 = 2.0 * PI * cutoff_hz.min(0.49 * sample_rate) / sample_rate;
        let (sin, cos) = w0.sin_cos();
        let alpha = sin / (2.0 * q);
        Self::from_raw(
            [(1.0 - cos) / 2.0, 1.0 - cos, (1.0 - cos) / 2.0],
            [1.0 + alpha, -2.0 * cos, 1.0 - alpha],
        )
    }

    pub fn highpass(cutoff_hz: f64, q: f64, sample_rate: f64) -> Self {
        let w0 = 2.0 * PI * cutoff_hz.min(0.49 * sample_rate) / sample_rate;
        let (sin, cos) = w0.sin_cos();
        let alpha = sin / (2.0 * q);
        Self::from_raw(
            [(1.0 + cos) / 2.0, -(1.0 + cos), (1.0 + cos) / 2.0],
            [1.0 + alpha, -2.0 * cos, 1.0 - alpha],
        )
    }

    pub fn process(&mut self, x: f64) -> f64 {
        let y = self.b0 * x + self.b1 * self.x1 + self.b2 * self.x2 - self.a1 * self.y1 - self.a2 * self.y2;
        self.x2 = self.x1;
        self.x1 = x;
        self.y2 = self.y1;
        self.y1 = y;
        y
    }
}

/// Runs `samples` through a cascade of two identical Butterworth sections
/// (a fourth-order Linkwitz-Riley response).
pub fn lowpass4(samples: &mut [f64], cutoff_hz: f64, sample_rate: f64) {
    cascade(samples, [Biquad::lowpass(cutoff_hz, std::f64::consts::FRAC_1_SQRT_2, sample_rate); 2]);
}

pub fn highpass4(samples: &mut [f64], cutoff_hz: f64, sample_rate: f64) {
    cascade(samples, [Biquad::highpass(cutoff_hz, std::f64::consts::FRAC_1_SQRT_2, sample_rate); 2]);
}

fn cascade<const N: usize>(samples: &mut [f64], mut stages: [Biquad; N]) {
    for s in samples.iter_mut() {
        let mut v = *s;
        for stage in stages.iter_mut() {
            v = stage.process(v);
        }
        *s = v;
    }
}
