use std::f64::consts::PI;

use proptest::prelude::*;
use sonoform_core::acoustics::{
    discriminability_matrix, extract_features, feature_distance, FeatureVector, NormalizationStats, FEATURE_DIMS,
    MEL_BANDS,
};
use sonoform_core::audio::{synth, AudioBuffer, AuditoryVariables, Generator, SynthSpec};
use sonoform_core::catalogue::{builtin_proposed, realize_binding};

const SR: u32 = 44_100;

fn sine(freq: f64) -> AudioBuffer {
    synth(&SynthSpec::new(Generator::Sine, freq), 0.5, SR).unwrap()
}

fn white(seed: f64) -> AudioBuffer {
    synth(&SynthSpec::new(Generator::Noise, 0.0).with("seed", seed), 0.5, SR).unwrap()
}

/// Hann-windowed naive DFT power of one frame, bins 0..=n/2.
fn oracle_power(frame: &[f64]) -> Vec<f64> {
    let n = frame.len();
    let w: Vec<f64> = (0..n).map(|i| frame[i] * (0.5 - 0.5 * (2.0 * PI * i as f64 / n as f64).cos())).collect();
    (0..=n / 2)
        .map(|k| {
            let (mut re, mut im) = (0.0, 0.0);
            for (t, v) in w.iter().enumerate() {
                let a = -2.0 * PI * (k * t % n) as f64 / n as f64;
                re += v * a.cos();
                im += v * a.sin();
            }
            re * re + im * im
        })
        .collect()
}

fn oracle_centroid(frame: &[f64]) -> f64 {
    let p = oracle_power(frame);
    let hz = f64::from(SR) / frame.len() as f64;
    let (num, den) = p.iter().enumerate().fold((0.0, 0.0), |(n, d), (k, v)| (n + k as f64 * hz * v.sqrt(), d + v.sqrt()));
    num / den
}

fn oracle_flatness(frame: &[f64]) -> f64 {
    let p: Vec<f64> = oracle_power(frame)[1..].iter().map(|v| v + 1e-20).collect();
    let geo = (p.iter().map(|v| v.ln()).sum::<f64>() / p.len() as f64).exp();
    geo / (p.iter().sum::<f64>() / p.len() as f64)
}

#[test]
fn sine_centroid_and_flatness_match_oracle() {
    let s = sine(440.0);
    let f = extract_features(&s).unwrap();
    let oracle = oracle_centroid(&s.channel(0)[4096..6144]);
    assert!((oracle - 440.0).abs() < 25.0, "oracle centroid {oracle}");
    assert!((f.spectral_centroid_hz - 440.0).abs() < 25.0, "centroid {}", f.spectral_centroid_hz);
    assert!(oracle_flatness(&s.channel(0)[4096..6144]) < 0.1);
    assert!(f.spectral_flatness < 0.1);
}

#[test]
fn white_noise_is_flat() {
    let n = white(3.0);
    let oracle = oracle_flatness(&n.channel(0)[4096..6144]);
    assert!(oracle > 0.5, "oracle flatness {oracle}");
    let f = extract_features(&n).unwrap();
    assert!(f.spectral_flatness > 0.5, "flatness {}", f.spectral_flatness);
}

#[test]
fn noise_is_further_from_a_sine_than_a_semitone() {
    let sounds = [sine(440.0), white(4.0), sine(466.16)];
    let m = discriminability_matrix(&sounds).unwrap();
    assert!(m.get(0, 1) > m.get(0, 2), "{:?}", m.distances);
}

#[test]
fn extraction_is_deterministic() {
    let s = white(9.0);
    assert_eq!(extract_features(&s).unwrap(), extract_features(&s).unwrap());
}

/// Halving the level moves the rms feature and leaves the spectral shape
/// features nearly untouched. Earcons in a catalogue are peak-normalized, so
/// the catalogue-wide rms spread is narrow and a -6 dB copy lands far away on
/// that one axis; the shape-only distance is what stays small.
#[test]
fn amplitude_scaling_only_moves_level() {
    let cat = builtin_proposed();
    let sounds: Vec<AudioBuffer> = cat
        .bindings
        .iter()
        .map(|b| realize_binding(&cat, &b.concept, &AuditoryVariables::default()).unwrap().audio)
        .collect();
    let features: Vec<FeatureVector> = sounds.iter().map(|s| extract_features(s).unwrap()).collect();
    let norm = NormalizationStats::from_features(&features);
    let mut shape_only = norm.clone();
    shape_only.stddev[FEATURE_DIMS - 1] = 0.0;
    let (mut worst_full, mut worst_shape): (f64, f64) = (0.0, 0.0);
    for (s, f) in sounds.iter().zip(&features) {
        let half = extract_features(&s.scaled(0.5)).unwrap();
        assert!((half.rms / f.rms - 0.5).abs() < 0.02, "rms ratio {}", half.rms / f.rms);
        worst_full = worst_full.max(feature_distance(f, &half, &norm));
        worst_shape = worst_shape.max(feature_distance(f, &half, &shape_only));
    }
    println!("half-level copy distance: full {worst_full:.4}, without rms {worst_shape:.4}");
    assert!(worst_shape < 0.2, "shape distance {worst_shape}");
}

fn arb_features() -> impl Strategy<Value = FeatureVector> {
    proptest::collection::vec(-10.0f64..10.0, FEATURE_DIMS).prop_map(|v| {
        let mut a = [0.0; FEATURE_DIMS];
        a.copy_from_slice(&v);
        FeatureVector::from_array(a)
    })
}

proptest! {
    #![proptest_config(ProptestConfig { failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn distance_is_a_pseudometric(
        a in arb_features(),
        b in arb_features(),
        c in arb_features(),
        extra in proptest::collection::vec(arb_features(), 0..4),
    ) {
        let mut set = vec![a.clone(), b.clone(), c.clone()];
        set.extend(extra);
        let norm = NormalizationStats::from_features(&set);
        let (ab, ba) = (feature_distance(&a, &b, &norm), feature_distance(&b, &a, &norm));
        let (ac, bc) = (feature_distance(&a, &c, &norm), feature_distance(&b, &c, &norm));
        prop_assert!(ab >= 0.0);
        prop_assert_eq!(feature_distance(&a, &a, &norm), 0.0);
        prop_assert!((ab - ba).abs() < 1e-12);
        prop_assert!(ac <= ab + bc + 1e-9);
    }

    #[test]
    fn constant_dimensions_are_dropped(a in arb_features(), b in arb_features(), fill in -5.0f64..5.0) {
        let mut x = a.to_array();
        let mut y = b.to_array();
        x[MEL_BANDS] = fill;
        y[MEL_BANDS] = fill;
        let set = [FeatureVector::from_array(x), FeatureVector::from_array(y)];
        let norm = NormalizationStats::from_features(&set);
        prop_assert!(norm.dropped_dimensions().contains(&"spectral_centroid_hz"));
        prop_assert!(feature_distance(&set[0], &set[1], &norm).is_finite());
    }
}
