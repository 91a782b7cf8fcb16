use serde::{Deserialize, Serialize};

use super::AudioError;

pub const DEFAULT_SAMPLE_RATE: u32 = 44_100;

/// PCM samples for one or two channels at a fixed sample rate.
///
/// Samples are nominally in `[-1.0, 1.0]`; intermediate results may exceed
/// that range until they are limited or normalized.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AudioBuffer {
    sample_rate: u32,
    channels: Vec<Vec<f64>>,
}

impl AudioBuffer {
    pub fn new(sample_rate: u32, channels: Vec<Vec<f64>>) -> Result<Self, AudioError> {
        if sample_rate == 0 {
            return Err(AudioError::InvalidArgument("sample rate must be positive".into()));
        }
        if channels.is_empty() || channels.len() > 2 {
            return Err(AudioError::InvalidArgument(format!(
                "expected 1 or 2 channels, got {}",
                channels.len()
            )));
        }
        let len = channels[0].len();
        if channels.iter().any(|c| c.len() != len) {
            return Err(AudioError::InvalidArgument("channel lengths differ".into()));
        }
        Ok(Self { sample_rate, channels })
    }

    pub fn mono(sample_rate: u32, samples: Vec<f64>) -> Result<Self, AudioError> {
        Self::new(sample_rate, vec![samples])
    }

    pub fn stereo(sample_rate: u32, left: Vec<f64>, right: Vec<f64>) -> Result<Self, AudioError> {
        Self::new(sample_rate, vec![left, right])
    }

    /// A silent buffer with `frames` samples per channel.
    pub fn silence(sample_rate: u32, channel_count: usize, frames: usize) -> Result<Self, AudioError> {
        Self::new(sample_rate, vec![vec![0.0; frames]; channel_count])
    }

    pub fn sample_rate(&self) -> u32 {
        self.sample_rate
    }

    pub fn channel_count(&self) -> usize {
        self.channels.len()
    }

    /// Samples per channel.
    pub fn len(&self) -> usize {
        self.channels[0].len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn duration_s(&self) -> f64 {
        self.len() as f64 / f64::from(self.sample_rate)
    }

    pub fn channel(&self, index: usize) -> &[f64] {
        &self.channels[index]
    }

    pub fn channels(&self) -> &[Vec<f64>] {
        &self.channels
    }

    pub fn into_channels(self) -> Vec<Vec<f64>> {
        self.channels
    }

    pub fn peak(&self) -> f64 {
        self.channels
            .iter()
            .flat_map(|c| c.iter())
            .fold(0.0_f64, |acc, s| acc.max(s.abs()))
    }

    /// RMS over all channels and samples.
    pub fn rms(&self) -> f64 {
        let count = self.len() * self.channel_count();
        if count == 0 {
            return 0.0;
        }
        let sum: f64 = self.channels.iter().flat_map(|c| c.iter()).map(|s| s * s).sum();
        (sum / count as f64).sqrt()
    }

    /// Average of the channels as a single mono signal.
    pub fn downmix(&self) -> Vec<f64> {
        match self.channels.len() {
            1 => self.channels[0].clone(),
            _ => self.channels[0]
                .iter()
                .zip(&self.channels[1])
                .map(|(l, r)| 0.5 * (l + r))
                .collect(),
        }
    }

    pub fn to_mono(&self) -> AudioBuffer {
        AudioBuffer { sample_rate: self.sample_rate, channels: vec![self.downmix()] }
    }

    /// Duplicates a mono buffer into two identical channels; stereo is returned as is.
    pub fn to_stereo(&self) -> AudioBuffer {
        match self.channels.len() {
            1 => AudioBuffer {
                sample_rate: self.sample_rate,
                channels: vec![self.channels[0].clone(), self.channels[0].clone()],
            },
            _ => self.clone(),
        }
    }

    pub fn scaled(&self, gain: f64) -> AudioBuffer {
        self.map_samples(|s| s * gain)
    }

    pub fn map_samples(&self, f: impl Fn(f64) -> f64) -> AudioBuffer {
        AudioBuffer {
            sample_rate: self.sample_rate,
            channels: self.channels.iter().map(|c| c.iter().map(|&s| f(s)).collect()).collect(),
        }
    }

    /// Frames `[start, end)` of every channel.
    pub fn slice(&self, start: usize, end: usize) -> AudioBuffer {
        let end = end.min(self.len());
        let start = start.min(end);
        AudioBuffer {
            sample_rate: self.sample_rate,
            channels: self.channels.iter().map(|c| c[start..end].to_vec()).collect(),
        }
    }
}

pub fn db_to_gain(db: f64) -> f64 {
    10f64.powf(db / 20.0)
}

pub fn gain_to_db(gain: f64) -> f64 {
    20.0 * gain.log10()
}

/// Rounds a duration to a whole number of frames.
pub fn frames_for(duration_s: f64, sample_rate: u32) -> usize {
    (duration_s * f64::from(sample_rate)).round().max(0.0) as usize
}
