use std::f64::consts::TAU;

use crate::audio::{frames_for, AudioBuffer, AuditoryVariables};
use crate::uml::Position;

use super::SonifierError;

/// Largest tilt applied by the vertical axis, in dB.
pub const LOUDNESS_TILT_DB: f64 = 1.0;

/// Maps a layout position and package depth to auditory variables:
/// horizontal position to pan, vertical position to a small loudness tilt
/// (upper elements slightly louder), depth to reverberation.
pub fn spatialize(pos: Position, depth: u32) -> Result<AuditoryVariables, SonifierError> {
    if Position::new(pos.x, pos.y).is_none() {
        return Err(SonifierError::InvalidArgument(format!("position ({}, {}) outside [0, 100]", pos.x, pos.y)));
    }
    Ok(AuditoryVariables {
        pan: 2.0 * (pos.x / 100.0) - 1.0,
        loudness_db: -2.0 * LOUDNESS_TILT_DB * (pos.y / 100.0 - 0.5),
        reverb_depth: depth,
        ..Default::default()
    })
}

/// Major pentatonic scale on C5, in Hz.
pub const PENTATONIC_HZ: [f64; 5] = [523.25, 587.33, 659.26, 783.99, 880.0];
const MOTIF_NOTE_S: f64 = 0.4;

/// FNV-1a, 64 bit.
pub fn fnv1a64(bytes: &[u8]) -> u64 {
    bytes.iter().fold(0xcbf2_9ce4_8422_2325, |h, b| (h ^ u64::from(*b)).wrapping_mul(0x0000_0100_0000_01b3))
}

/// Scale degrees of a diagram's motif: the three lowest base-5 digits of
/// the name's hash.
pub fn motif_notes(name: &str) -> [usize; 3] {
    let h = fnv1a64(name.as_bytes());
    [(h % 5) as usize, (h / 5 % 5) as usize, (h / 25 % 5) as usize]
}

/// Three plucked-bell notes identifying a diagram, 1.2 s in total.
pub fn diagram_motif(name: &str, sample_rate: u32) -> AudioBuffer {
    let sr = f64::from(sample_rate);
    let note_len = frames_for(MOTIF_NOTE_S, sample_rate);
    let mut out = Vec::with_capacity(note_len * 3);
    for degree in motif_notes(name) {
        let f = PENTATONIC_HZ[degree];
        out.extend((0..note_len).map(|i| {
            let t = i as f64 / sr;
            let attack = (t / 0.01).min(1.0);
            let env = attack * (-t / 0.12).exp();
            env * ((TAU * f * t).sin() + 0.3 * (TAU * 2.0 * f * t).sin())
        }));
    }
    let peak = out.iter().fold(0.0_f64, |a, s| a.max(s.abs()));
    let out: Vec<f64> = out.iter().map(|s| s * 0.7 / peak).collect();
    AudioBuffer::stereo(sample_rate, out.clone(), out).expect("motif buffers are well formed")
}
