//! PCM synthesis, effects, mixing, normalization and WAV I/O.
//!
//! Every operation here is a pure function over immutable buffers.

mod buffer;
mod effects;
mod filter;
mod synth;
mod wav;

pub use buffer::{db_to_gain, frames_for, gain_to_db, AudioBuffer, DEFAULT_SAMPLE_RATE};
pub use effects::{
    apply_variables, mix, mix_raw, normalize, pan_gains, resample_by_rate, reverb_wet, soft_limit,
    AuditoryVariables, LIMITER_THRESHOLD, REVERB_COMB_DELAYS_MS, REVERB_FEEDBACK, REVERB_TAIL_S,
};
pub use synth::{synth, Generator, SynthSpec};
pub use wav::{decode_wav, encode_wav, read_wav, write_wav};

#[derive(Debug, thiserror::Error)]
pub enum AudioError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("cannot normalize a silent buffer")]
    CannotNormalize,
    #[error("wav format error: {0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
