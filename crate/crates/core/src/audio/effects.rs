//! The auditory-variable chain: pitch, duration, envelope, gain, reverb and pan.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::{db_to_gain, frames_for, AudioBuffer, AudioError};

/// Comb delays of the reverb bank, in milliseconds.
pub const REVERB_COMB_DELAYS_MS: [f64; 4] = [29.7, 37.1, 41.1, 43.7];
pub const REVERB_FEEDBACK: f64 = 0.75;
/// Length of the decay tail appended when reverb is active.
pub const REVERB_TAIL_S: f64 = 0.8;
/// Peak above which [`soft_limit`] engages.
pub const LIMITER_THRESHOLD: f64 = 0.99;
const LIMITER_KNEE: f64 = 0.9;

/// Per-component sound parameters layered onto an asset.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AuditoryVariables {
    pub loudness_db: f64,
    pub pitch_semitones: f64,
    pub pan: f64,
    pub duration_scale: f64,
    pub attack_s: f64,
    pub decay_s: f64,
    pub reverb_depth: u32,
    pub start_offset_s: f64,
}

impl Default for AuditoryVariables {
    fn default() -> Self {
        Self {
            loudness_db: 0.0,
            pitch_semitones: 0.0,
            pan: 0.0,
            duration_scale: 1.0,
            attack_s: 0.0,
            decay_s: 0.0,
            reverb_depth: 0,
            start_offset_s: 0.0,
        }
    }
}

impl AuditoryVariables {
    pub fn validate(&self) -> Result<(), AudioError> {
        let finite = [
            self.loudness_db,
            self.pitch_semitones,
            self.pan,
            self.duration_scale,
            self.attack_s,
            self.decay_s,
            self.start_offset_s,
        ]
        .iter()
        .all(|v| v.is_finite());
        if !finite {
            return Err(AudioError::InvalidArgument("auditory variables must be finite".into()));
        }
        if !(-1.0..=1.0).contains(&self.pan) {
            return Err(AudioError::InvalidArgument(format!("pan {} outside [-1, 1]", self.pan)));
        }
        if self.duration_scale <= 0.0 {
            return Err(AudioError::InvalidArgument("duration_scale must be positive".into()));
        }
        if self.attack_s < 0.0 || self.decay_s < 0.0 || self.start_offset_s < 0.0 {
            return Err(AudioError::InvalidArgument("envelope times and offsets must be non-negative".into()));
        }
        Ok(())
    }

    /// Layers `extra` on top of `self`: gains and semitones add, pans sum and
    /// clamp, reverb depths add, duration scales multiply. Envelope and
    /// placement stay with `self`.
    pub fn compose(&self, extra: &AuditoryVariables) -> AuditoryVariables {
        AuditoryVariables {
            loudness_db: self.loudness_db + extra.loudness_db,
            pitch_semitones: self.pitch_semitones + extra.pitch_semitones,
            pan: (self.pan + extra.pan).clamp(-1.0, 1.0),
            duration_scale: self.duration_scale * extra.duration_scale,
            attack_s: self.attack_s,
            decay_s: self.decay_s,
            reverb_depth: self.reverb_depth + extra.reverb_depth,
            start_offset_s: self.start_offset_s,
        }
    }
}

/// Equal-power pan law: `theta = (p + 1) * pi / 4`, gains `(cos, sin)`.
pub fn pan_gains(pan: f64) -> (f64, f64) {
    let theta = (pan.clamp(-1.0, 1.0) + 1.0) * PI / 4.0;
    (theta.cos(), theta.sin())
}

/// Wet mix fraction for a reverb depth.
pub fn reverb_wet(depth: u32) -> f64 {
    (0.15 * f64::from(depth)).min(0.6)
}

/// Applies `vars` to `buf` and returns a stereo buffer.
///
/// Stereo input is downmixed first. Order: pitch shift (resampling),
/// duration scale (truncate or pad the tail), envelope, gain, reverb, pan.
pub fn apply_variables(buf: &AudioBuffer, vars: &AuditoryVariables) -> Result<AudioBuffer, AudioError> {
    vars.validate()?;
    let sr = buf.sample_rate();
    let mut x = buf.downmix();

    if vars.pitch_semitones != 0.0 {
        x = resample_by_rate(&x, 2f64.powf(vars.pitch_semitones / 12.0));
    }
    if vars.duration_scale != 1.0 {
        let target = (x.len() as f64 * vars.duration_scale).round() as usize;
        x.resize(target, 0.0);
    }
    apply_envelope(&mut x, vars.attack_s, vars.decay_s, sr);
    if vars.loudness_db != 0.0 {
        let g = db_to_gain(vars.loudness_db);
        x.iter_mut().for_each(|s| *s *= g);
    }
    if vars.reverb_depth > 0 {
        x = reverb(&x, reverb_wet(vars.reverb_depth), sr);
    }
    let (gl, gr) = pan_gains(vars.pan);
    let left = x.iter().map(|s| s * gl).collect();
    let right = x.iter().map(|s| s * gr).collect();
    AudioBuffer::stereo(sr, left, right)
}

/// Reads `x` at `rate` times normal speed with linear interpolation.
/// Output length is `round(len / rate)`.
pub fn resample_by_rate(x: &[f64], rate: f64) -> Vec<f64> {
    let out_len = (x.len() as f64 / rate).round() as usize;
    if x.is_empty() {
        return Vec::new();
    }
    let last = x.len() - 1;
    (0..out_len)
        .map(|i| {
            let pos = i as f64 * rate;
            let i0 = (pos.floor() as usize).min(last);
            let i1 = (i0 + 1).min(last);
            let frac = pos - i0 as f64;
            x[i0] + (x[i1] - x[i0]) * frac.min(1.0)
        })
        .collect()
}

/// Linear attack; after the attack an exponential decay reaching -60 dB
/// `decay_s` seconds later. Zero times leave the signal untouched.
fn apply_envelope(x: &mut [f64], attack_s: f64, decay_s: f64, sample_rate: u32) {
    let sr = f64::from(sample_rate);
    let attack = frames_for(attack_s, sample_rate);
    if attack > 0 {
        for (i, s) in x.iter_mut().take(attack).enumerate() {
            *s *= i as f64 / attack as f64;
        }
    }
    if decay_s > 0.0 {
        for (i, s) in x.iter_mut().enumerate().skip(attack) {
            let t = (i - attack) as f64 / sr;
            *s *= 10f64.powf(-3.0 * t / decay_s);
        }
    }
}

/// Schroeder-style parallel comb bank with a fixed tail, mixed
/// `(1 - wet) * dry + wet * reverberant`.
fn reverb(dry: &[f64], wet: f64, sample_rate: u32) -> Vec<f64> {
    let tail = frames_for(REVERB_TAIL_S, sample_rate);
    let n = dry.len() + tail;
    let mut acc = vec![0.0; n];
    for delay_ms in REVERB_COMB_DELAYS_MS {
        let d = frames_for(delay_ms / 1000.0, sample_rate).max(1);
        let mut y = vec![0.0; n];
        for i in 0..n {
            let input = dry.get(i).copied().unwrap_or(0.0);
            let fb = if i >= d { y[i - d] } else { 0.0 };
            y[i] = input + REVERB_FEEDBACK * fb;
        }
        for (a, v) in acc.iter_mut().zip(&y) {
            *a += v;
        }
    }
    let norm = (1.0 - REVERB_FEEDBACK) / REVERB_COMB_DELAYS_MS.len() as f64;
    (0..n)
        .map(|i| {
            let d = dry.get(i).copied().unwrap_or(0.0);
            (1.0 - wet) * d + wet * acc[i] * norm
        })
        .collect()
}

/// Sums buffers placed at their offsets without limiting. Mono inputs are
/// duplicated to stereo when any input is stereo.
pub fn mix_raw(buffers: &[(AudioBuffer, f64)]) -> Result<AudioBuffer, AudioError> {
    let Some((first, _)) = buffers.first() else {
        return Err(AudioError::InvalidArgument("nothing to mix".into()));
    };
    let sr = first.sample_rate();
    if let Some((b, _)) = buffers.iter().find(|(b, _)| b.sample_rate() != sr) {
        return Err(AudioError::InvalidArgument(format!(
            "sample rate mismatch: {} vs {}",
            sr,
            b.sample_rate()
        )));
    }
    if buffers.iter().any(|(_, off)| !(off.is_finite() && *off >= 0.0)) {
        return Err(AudioError::InvalidArgument("offsets must be non-negative".into()));
    }
    let channels = buffers.iter().map(|(b, _)| b.channel_count()).max().unwrap_or(1);
    let placed: Vec<(usize, &AudioBuffer)> = buffers.iter().map(|(b, off)| (frames_for(*off, sr), b)).collect();
    let len = placed.iter().map(|(start, b)| start + b.len()).max().unwrap_or(0);
    let mut out = vec![vec![0.0; len]; channels];
    for (start, b) in placed {
        for (ch, dst) in out.iter_mut().enumerate() {
            let src = b.channel(ch.min(b.channel_count() - 1));
            for (d, s) in dst[start..start + src.len()].iter_mut().zip(src) {
                *d += s;
            }
        }
    }
    AudioBuffer::new(sr, out)
}

/// Sums buffers at their offsets, then soft-limits the result.
pub fn mix(buffers: &[(AudioBuffer, f64)]) -> Result<AudioBuffer, AudioError> {
    Ok(soft_limit(&mix_raw(buffers)?))
}

/// tanh-shaped limiter: identity when the peak is at most
/// [`LIMITER_THRESHOLD`], otherwise samples above the knee are squashed
/// into `[knee, 1.0)`.
pub fn soft_limit(buf: &AudioBuffer) -> AudioBuffer {
    if buf.peak() <= LIMITER_THRESHOLD {
        return buf.clone();
    }
    let span = 1.0 - LIMITER_KNEE;
    buf.map_samples(|s| {
        let a = s.abs();
        if a <= LIMITER_KNEE {
            s
        } else {
            s.signum() * (LIMITER_KNEE + span * ((a - LIMITER_KNEE) / span).tanh())
        }
    })
}

/// Scales `buf` so its peak sits at `target_peak_db` dBFS.
pub fn normalize(buf: &AudioBuffer, target_peak_db: f64) -> Result<AudioBuffer, AudioError> {
    let peak = buf.peak();
    if peak == 0.0 {
        return Err(AudioError::CannotNormalize);
    }
    Ok(buf.scaled(db_to_gain(target_peak_db) / peak))
}
