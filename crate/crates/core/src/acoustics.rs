//! Timbre features and pairwise distances for the perceptual
//! discriminability check.
//!
//! The feature set is a proxy chosen for this toolkit: 13 mel-band log
//! energies (relative to the frame's total power, so they do not move with
//! gain), spectral centroid, spectral flatness, zero-crossing rate and RMS.
//! Features are averaged over 2048-sample Hann frames with a 512 hop;
//! leading/trailing samples below -60 dBFS are trimmed and frames quieter
//! than -60 dBFS RMS are skipped.

use std::sync::Arc;

use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::audio::{db_to_gain, AudioBuffer};

pub const FRAME_SIZE: usize = 2048;
pub const HOP_SIZE: usize = 512;
pub const MEL_BANDS: usize = 13;
pub const MEL_MAX_HZ: f64 = 8000.0;
pub const SILENCE_FLOOR_DB: f64 = -60.0;
pub const MIN_DURATION_S: f64 = 0.05;
pub const FEATURE_DIMS: usize = MEL_BANDS + 4;
/// Relative band energies are floored at -60 dB before taking the log.
const MEL_FLOOR: f64 = 1e-6;

pub const FEATURE_NAMES: [&str; FEATURE_DIMS] = [
    "mel_0", "mel_1", "mel_2", "mel_3", "mel_4", "mel_5", "mel_6", "mel_7", "mel_8", "mel_9", "mel_10",
    "mel_11", "mel_12", "spectral_centroid_hz", "spectral_flatness", "zero_crossing_rate", "rms",
];

#[derive(Debug, thiserror::Error)]
pub enum AcousticsError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("sound {index}: {source}")]
    AtIndex {
        index: usize,
        #[source]
        source: Box<AcousticsError>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector {
    pub mel_band_log_energies: [f64; MEL_BANDS],
    pub spectral_centroid_hz: f64,
    pub spectral_flatness: f64,
    pub zero_crossing_rate: f64,
    pub rms: f64,
}

impl FeatureVector {
    pub fn to_array(&self) -> [f64; FEATURE_DIMS] {
        let mut out = [0.0; FEATURE_DIMS];
        out[..MEL_BANDS].copy_from_slice(&self.mel_band_log_energies);
        out[MEL_BANDS] = self.spectral_centroid_hz;
        out[MEL_BANDS + 1] = self.spectral_flatness;
        out[MEL_BANDS + 2] = self.zero_crossing_rate;
        out[MEL_BANDS + 3] = self.rms;
        out
    }

    pub fn from_array(v: [f64; FEATURE_DIMS]) -> Self {
        let mut mel = [0.0; MEL_BANDS];
        mel.copy_from_slice(&v[..MEL_BANDS]);
        Self {
            mel_band_log_energies: mel,
            spectral_centroid_hz: v[MEL_BANDS],
            spectral_flatness: v[MEL_BANDS + 1],
            zero_crossing_rate: v[MEL_BANDS + 2],
            rms: v[MEL_BANDS + 3],
        }
    }
}

fn hz_to_mel(f: f64) -> f64 {
    2595.0 * (1.0 + f / 700.0).log10()
}

fn mel_to_hz(m: f64) -> f64 {
    700.0 * (10f64.powf(m / 2595.0) - 1.0)
}

/// Triangular mel weights, one row per band, over the `FRAME_SIZE / 2 + 1` bins.
fn mel_filterbank(sample_rate: f64) -> Vec<Vec<f64>> {
    let bins = FRAME_SIZE / 2 + 1;
    let max_mel = hz_to_mel(MEL_MAX_HZ.min(sample_rate / 2.0));
    let edges: Vec<f64> = (0..MEL_BANDS + 2)
        .map(|i| mel_to_hz(max_mel * i as f64 / (MEL_BANDS + 1) as f64))
        .collect();
    (0..MEL_BANDS)
        .map(|m| {
            let (lo, mid, hi) = (edges[m], edges[m + 1], edges[m + 2]);
            (0..bins)
                .map(|k| {
                    let f = k as f64 * sample_rate / FRAME_SIZE as f64;
                    if f <= lo || f >= hi {
                        0.0
                    } else if f <= mid {
                        (f - lo) / (mid - lo)
                    } else {
                        (hi - f) / (hi - mid)
                    }
                })
                .collect()
        })
        .collect()
}

struct Analyzer {
    fft: Arc<dyn Fft<f64>>,
    window: Vec<f64>,
    filterbank: Vec<Vec<f64>>,
    sample_rate: f64,
}

impl Analyzer {
    fn new(sample_rate: f64) -> Self {
        let window = (0..FRAME_SIZE)
            .map(|i| 0.5 - 0.5 * (std::f64::consts::TAU * i as f64 / FRAME_SIZE as f64).cos())
            .collect();
        Self {
            fft: FftPlanner::new().plan_fft_forward(FRAME_SIZE),
            window,
            filterbank: mel_filterbank(sample_rate),
            sample_rate,
        }
    }

    fn frame(&self, frame: &[f64]) -> [f64; FEATURE_DIMS] {
        let mut spectrum: Vec<Complex<f64>> = frame
            .iter()
            .zip(&self.window)
            .map(|(s, w)| Complex::new(s * w, 0.0))
            .collect();
        self.fft.process(&mut spectrum);
        let bins = FRAME_SIZE / 2 + 1;
        let power: Vec<f64> = spectrum[..bins].iter().map(|c| c.norm_sqr()).collect();
        let total: f64 = power.iter().sum::<f64>().max(1e-30);

        let mut out = [0.0; FEATURE_DIMS];
        for (m, weights) in self.filterbank.iter().enumerate() {
            let e: f64 = weights.iter().zip(&power).map(|(w, p)| w * p).sum();
            out[m] = (e / total).max(MEL_FLOOR).ln();
        }

        let (mut num, mut den) = (0.0, 0.0);
        for (k, p) in power.iter().enumerate() {
            let mag = p.sqrt();
            num += k as f64 * self.sample_rate / FRAME_SIZE as f64 * mag;
            den += mag;
        }
        out[MEL_BANDS] = if den > 0.0 { num / den } else { 0.0 };

        let eps = 1e-20;
        let body = &power[1..];
        let log_mean = body.iter().map(|p| (p + eps).ln()).sum::<f64>() / body.len() as f64;
        let arith = body.iter().map(|p| p + eps).sum::<f64>() / body.len() as f64;
        out[MEL_BANDS + 1] = (log_mean.exp() / arith).clamp(0.0, 1.0);

        let crossings = frame.windows(2).filter(|w| (w[0] >= 0.0) != (w[1] >= 0.0)).count();
        out[MEL_BANDS + 2] = crossings as f64 / (frame.len() - 1) as f64;
        out[MEL_BANDS + 3] = frame_rms(frame);
        out
    }
}

fn frame_rms(frame: &[f64]) -> f64 {
    (frame.iter().map(|s| s * s).sum::<f64>() / frame.len() as f64).sqrt()
}

/// Frame-averaged timbre features of `buf` (stereo is downmixed).
pub fn extract_features(buf: &AudioBuffer) -> Result<FeatureVector, AcousticsError> {
    if buf.duration_s() < MIN_DURATION_S {
        return Err(AcousticsError::InvalidArgument(format!(
            "buffer of {:.4} s is shorter than {MIN_DURATION_S} s",
            buf.duration_s()
        )));
    }
    let floor = db_to_gain(SILENCE_FLOOR_DB);
    let mono = buf.downmix();
    // leading and trailing silence is trimmed so that frames straddling an
    // onset do not depend on how much padding surrounds the sound
    let first = mono.iter().position(|s| s.abs() >= floor).unwrap_or(0);
    let last = mono.iter().rposition(|s| s.abs() >= floor).map_or(0, |i| i + 1);
    let mut x = mono[first..last.max(first)].to_vec();
    if x.len() < FRAME_SIZE {
        x.resize(FRAME_SIZE, 0.0);
    }
    let analyzer = Analyzer::new(f64::from(buf.sample_rate()));

    let mut sum = [0.0; FEATURE_DIMS];
    let mut used = 0usize;
    let mut start = 0;
    while start + FRAME_SIZE <= x.len() {
        let frame = &x[start..start + FRAME_SIZE];
        if frame_rms(frame) >= floor {
            let f = analyzer.frame(frame);
            sum.iter_mut().zip(f).for_each(|(s, v)| *s += v);
            used += 1;
        }
        start += HOP_SIZE;
    }
    if used == 0 {
        return Err(AcousticsError::InvalidArgument("no frames above the -60 dBFS floor".into()));
    }
    Ok(FeatureVector::from_array(sum.map(|s| s / used as f64)))
}

/// Per-dimension mean and standard deviation over a set of feature vectors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormalizationStats {
    pub mean: [f64; FEATURE_DIMS],
    pub stddev: [f64; FEATURE_DIMS],
}

const ZERO_VARIANCE: f64 = 1e-12;


impl NormalizationStats {
    pub fn from_features(features: &[FeatureVector]) -> Self {
        let n = features.len().max(1) as f64;
        let mut mean = [0.0; FEATURE_DIMS];
        for f in features {
            mean.iter_mut().zip(f.to_array()).for_each(|(m, v)| *m += v / n);
        }
        let mut var = [0.0; FEATURE_DIMS];
        for f in features {
            var.iter_mut().zip(f.to_array().iter().zip(&mean)).for_each(|(s, (v, m))| *s += (v - m).powi(2) / n);
        }
        Self { mean, stddev: var.map(f64::sqrt) }
    }

    /// Names of dimensions with zero variance; they do not contribute to distances.
    pub fn dropped_dimensions(&self) -> Vec<&'static str> {
        self.stddev
            .iter()
            .zip(FEATURE_NAMES)
            .filter(|(s, _)| **s <= ZERO_VARIANCE)
            .map(|(_, n)| n)
            .collect()
    }
}

/// Euclidean distance between z-scored feature vectors.
pub fn feature_distance(a: &FeatureVector, b: &FeatureVector, norm: &NormalizationStats) -> f64 {
    a.to_array()
        .iter()
        .zip(b.to_array())
        .zip(norm.stddev)
        .filter(|(_, sd)| *sd > ZERO_VARIANCE)
        .map(|((x, y), sd)| ((x - y) / sd).powi(2))
        .sum::<f64>()
        .sqrt()
}

/// Pairwise z-space distances between sounds, normalized over the set itself.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscriminabilityMatrix {
    pub distances: Vec<Vec<f64>>,
    pub dropped_dimensions: Vec<String>,
    pub features: Vec<FeatureVector>,
}

impl DiscriminabilityMatrix {
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.distances[i][j]
    }

    pub fn len(&self) -> usize {
        self.distances.len()
    }

    pub fn is_empty(&self) -> bool {
        self.distances.is_empty()
    }
}

pub fn discriminability_matrix(sounds: &[AudioBuffer]) -> Result<DiscriminabilityMatrix, AcousticsError> {
    if sounds.len() < 2 {
        return Err(AcousticsError::InvalidArgument("need at least two sounds".into()));
    }
    let features = sounds
        .iter()
        .enumerate()
        .map(|(index, s)| {
            extract_features(s).map_err(|e| AcousticsError::AtIndex { index, source: Box::new(e) })
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(matrix_from_features(features))
}

pub fn matrix_from_features(features: Vec<FeatureVector>) -> DiscriminabilityMatrix {
    let norm = NormalizationStats::from_features(&features);
    let n = features.len();
    let mut distances = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in i + 1..n {
            let d = feature_distance(&features[i], &features[j], &norm);
            distances[i][j] = d;
            distances[j][i] = d;
        }
    }
    DiscriminabilityMatrix {
        distances,
        dropped_dimensions: norm.dropped_dimensions().into_iter().map(String::from).collect(),
        features,
    }
}
