//! Procedural generators used as stand-ins for recorded sound assets.

use std::collections::BTreeMap;
use std::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::filter::{highpass4, lowpass4};
use super::{frames_for, AudioBuffer, AudioError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Generator {
    Sine,
    Square,
    Noise,
    FilteredNoise,
    Chirp,
    Pluck,
}

impl Generator {
    fn is_tonal(self) -> bool {
        !matches!(self, Generator::Noise | Generator::FilteredNoise)
    }
}

/// A generator plus its numeric parameters.
///
/// Parameters understood by every generator:
/// `amp` (output peak, default 0.9), `seed`, `am_rate_hz`/`am_depth`
/// (tremolo), `gate_rate_hz`/`gate_decay_s` (percussive retriggering),
/// `noise_mix`/`noise_cutoff_hz`/`noise_highpass_hz` (an added noise layer)
/// and `fade_s`.
///
/// Generator specific: `harmonics`, `step_ratio`, `vibrato_hz` and
/// `vibrato_cents` for sine/square/chirp; `end_freq_hz` for chirp;
/// `cutoff_hz`/`highpass_hz` for filtered noise; `decay` for pluck.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthSpec {
    pub generator: Generator,
    #[serde(default)]
    pub base_freq_hz: f64,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub params: BTreeMap<String, f64>,
}

impl SynthSpec {
    pub fn new(generator: Generator, base_freq_hz: f64) -> Self {
        Self { generator, base_freq_hz, params: BTreeMap::new() }
    }

    pub fn with(mut self, key: &str, value: f64) -> Self {
        self.params.insert(key.to_string(), value);
        self
    }

    fn param(&self, key: &str, default: f64) -> f64 {
        self.params.get(key).copied().unwrap_or(default)
    }

    pub fn validate(&self) -> Result<(), AudioError> {
        if self.generator.is_tonal() && (!self.base_freq_hz.is_finite() || self.base_freq_hz <= 0.0) {
            return Err(AudioError::InvalidArgument(format!(
                "{:?} needs a positive base frequency",
                self.generator
            )));
        }
        if let Some((k, v)) = self.params.iter().find(|(_, v)| !v.is_finite()) {
            return Err(AudioError::InvalidArgument(format!("parameter {k} is not finite ({v})")));
        }
        Ok(())
    }
}

/// Renders `spec` into a mono buffer of `round(duration_s * sample_rate)` frames
/// whose peak equals the `amp` parameter.
pub fn synth(spec: &SynthSpec, duration_s: f64, sample_rate: u32) -> Result<AudioBuffer, AudioError> {
    if !duration_s.is_finite() || duration_s <= 0.0 {
        return Err(AudioError::InvalidArgument(format!("duration must be positive, got {duration_s}")));
    }
    if sample_rate == 0 {
        return Err(AudioError::InvalidArgument("sample rate must be positive".into()));
    }
    spec.validate()?;

    let sr = f64::from(sample_rate);
    let n = frames_for(duration_s, sample_rate);
    let seed = spec.param("seed", 0.0) as u64;

    let mut out = match spec.generator {
        Generator::Sine | Generator::Square => tone(spec, n, sr),
        Generator::Chirp => chirp(spec, n, sr, duration_s),
        Generator::Noise => white_noise(n, seed),
        Generator::FilteredNoise => {
            let mut x = white_noise(n, seed);
            lowpass4(&mut x, spec.param("cutoff_hz", 1000.0), sr);
            if let Some(&hp) = spec.params.get("highpass_hz") {
                highpass4(&mut x, hp, sr);
            }
            x
        }
        Generator::Pluck => pluck(spec, n, sr, seed),
    };

    let noise_mix = spec.param("noise_mix", 0.0);
    if noise_mix > 0.0 {
        let mut layer = white_noise(n, seed.wrapping_add(1));
        lowpass4(&mut layer, spec.param("noise_cutoff_hz", 4000.0), sr);
        if let Some(&hp) = spec.params.get("noise_highpass_hz") {
            highpass4(&mut layer, hp, sr);
        }
        let (tp, lp) = (peak(&out), peak(&layer));
        if lp > 0.0 {
            let tone_gain = if tp > 0.0 { (1.0 - noise_mix) / tp } else { 0.0 };
            for (o, l) in out.iter_mut().zip(&layer) {
                *o = *o * tone_gain + l * noise_mix / lp;
            }
        }
    }

    let am_rate = spec.param("am_rate_hz", 0.0);
    let am_depth = spec.param("am_depth", 0.0).clamp(0.0, 1.0);
    if am_rate > 0.0 && am_depth > 0.0 {
        for (i, s) in out.iter_mut().enumerate() {
            let t = i as f64 / sr;
            *s *= 1.0 - am_depth * 0.5 * (1.0 - (TAU * am_rate * t).cos());
        }
    }

    let gate_rate = spec.param("gate_rate_hz", 0.0);
    if gate_rate > 0.0 {
        let period = 1.0 / gate_rate;
        let decay = spec.param("gate_decay_s", 0.05).max(1e-4);
        for (i, s) in out.iter_mut().enumerate() {
            let phase = (i as f64 / sr) % period;
            *s *= (-phase / decay).exp();
        }
    }

    let fade = frames_for(spec.param("fade_s", 0.005), sample_rate).min(n / 2);
    for i in 0..fade {
        let g = i as f64 / fade as f64;
        out[i] *= g;
        out[n - 1 - i] *= g;
    }

    let amp = spec.param("amp", 0.9).clamp(0.0, 1.0);
    let p = peak(&out);
    if p > 0.0 {
        let g = amp / p;
        out.iter_mut().for_each(|s| *s *= g);
    }
    AudioBuffer::mono(sample_rate, out)
}

fn peak(x: &[f64]) -> f64 {
    x.iter().fold(0.0_f64, |a, s| a.max(s.abs()))
}

fn white_noise(n: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| rng.random_range(-1.0..1.0)).collect()
}

fn harmonic_wave(phase: f64, harmonics: usize, square: bool) -> f64 {
    if square {
        return if phase.sin() >= 0.0 { 1.0 } else { -1.0 };
    }
    (1..=harmonics).map(|k| (k as f64 * phase).sin() / k as f64).sum()
}

fn tone(spec: &SynthSpec, n: usize, sr: f64) -> Vec<f64> {
    let harmonics = spec.param("harmonics", 1.0).max(1.0) as usize;
    let step_ratio = spec.param("step_ratio", 1.0);
    let vib_hz = spec.param("vibrato_hz", 0.0);
    let vib_cents = spec.param("vibrato_cents", 0.0);
    let square = spec.generator == Generator::Square;
    let mut phase = 0.0;
    (0..n)
        .map(|i| {
            let t = i as f64 / sr;
            let mut f = spec.base_freq_hz;
            if i >= n / 2 {
                f *= step_ratio;
            }
            if vib_hz > 0.0 {
                f *= 2f64.powf(vib_cents / 1200.0 * (TAU * vib_hz * t).sin());
            }
            let s = harmonic_wave(phase, harmonics, square);
            phase = (phase + TAU * f / sr) % (TAU * 64.0);
            s
        })
        .collect()
}

fn chirp(spec: &SynthSpec, n: usize, sr: f64, duration_s: f64) -> Vec<f64> {
    let f0 = spec.base_freq_hz;
    let f1 = spec.param("end_freq_hz", 2.0 * f0).max(1.0);
    let harmonics = spec.param("harmonics", 1.0).max(1.0) as usize;
    let mut phase = 0.0;
    (0..n)
        .map(|i| {
            let t = i as f64 / sr;
            let f = f0 * (f1 / f0).powf(t / duration_s);
            let s = harmonic_wave(phase, harmonics, false);
            phase = (phase + TAU * f / sr) % (TAU * 64.0);
            s
        })
        .collect()
}

/// Karplus-Strong plucked string.
fn pluck(spec: &SynthSpec, n: usize, sr: f64, seed: u64) -> Vec<f64> {
    let period = ((sr / spec.base_freq_hz).round() as usize).max(2);
    let decay = spec.param("decay", 0.996).clamp(0.0, 0.9999);
    let mut line = white_noise(period, seed);
    let mut out = Vec::with_capacity(n);
    let mut idx = 0;
    for _ in 0..n {
        let cur = line[idx];
        let next = line[(idx + 1) % period];
        out.push(cur);
        line[idx] = decay * 0.5 * (cur + next);
        idx = (idx + 1) % period;
    }
    out
}
