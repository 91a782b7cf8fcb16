use std::f64::consts::PI;

use proptest::prelude::*;
use sonoform_core::audio::{
    apply_variables, decode_wav, encode_wav, mix, mix_raw, normalize, pan_gains, read_wav, synth, write_wav,
    AudioBuffer, AuditoryVariables, Generator, SynthSpec,
};

const SR: u32 = 44_100;

/// Energy per bin of a direct O(n^2) DFT over `x`, bins 0..=n/2.
fn naive_power_spectrum(x: &[f64]) -> Vec<f64> {
    let n = x.len();
    (0..=n / 2)
        .map(|k| {
            let (mut re, mut im) = (0.0, 0.0);
            for (t, v) in x.iter().enumerate() {
                let a = -2.0 * PI * (k * t % n) as f64 / n as f64;
                re += v * a.cos();
                im += v * a.sin();
            }
            re * re + im * im
        })
        .collect()
}

fn sine(freq: f64, secs: f64) -> AudioBuffer {
    synth(&SynthSpec::new(Generator::Sine, freq), secs, SR).unwrap()
}

fn noise(secs: f64, seed: f64) -> AudioBuffer {
    synth(&SynthSpec::new(Generator::Noise, 0.0).with("seed", seed), secs, SR).unwrap()
}

fn max_abs_diff(a: &AudioBuffer, b: &AudioBuffer) -> f64 {
    assert_eq!(a.channel_count(), b.channel_count());
    assert_eq!(a.len(), b.len());
    a.channels()
        .iter()
        .zip(b.channels())
        .flat_map(|(x, y)| x.iter().zip(y).map(|(p, q)| (p - q).abs()))
        .fold(0.0, f64::max)
}

#[test]
fn filtered_noise_energy_sits_below_twice_the_cutoff() {
    let spec = SynthSpec::new(Generator::FilteredNoise, 0.0).with("cutoff_hz", 800.0).with("seed", 5.0);
    let buf = synth(&spec, 1.0, SR).unwrap();
    assert_eq!(buf.len(), 44_100);
    // Oracle: average the naive spectrum over a few non-overlapping windows.
    let n = 2048;
    let mut power = vec![0.0; n / 2 + 1];
    for w in 0..4 {
        let seg = &buf.channel(0)[8000 + w * n..8000 + (w + 1) * n];
        for (p, v) in power.iter_mut().zip(naive_power_spectrum(seg)) {
            *p += v;
        }
    }
    let bin_hz = f64::from(SR) / n as f64;
    let below: f64 = power.iter().enumerate().filter(|(k, _)| *k as f64 * bin_hz < 1600.0).map(|(_, p)| p).sum();
    let total: f64 = power.iter().sum();
    assert!(below / total >= 0.9, "fraction below 1600 Hz = {}", below / total);
}

#[test]
fn sine_energy_peaks_at_its_frequency() {
    let buf = sine(1000.0, 0.2);
    let n = 4410;
    let spec = naive_power_spectrum(&buf.channel(0)[..n]);
    let (k, _) = spec.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1)).unwrap();
    assert_eq!(k as f64 * f64::from(SR) / n as f64, 1000.0);
}

#[test]
fn pan_examples() {
    let (l, r) = pan_gains(0.0);
    let h = std::f64::consts::FRAC_1_SQRT_2;
    assert!((l - h).abs() < 1e-12 && (r - h).abs() < 1e-12);
    let (l, r) = pan_gains(0.5);
    let theta = 3.0 * PI / 8.0;
    assert!((l - theta.cos()).abs() < 1e-12 && (r - theta.sin()).abs() < 1e-12);
    assert!((l - 0.38268).abs() < 1e-5 && (r - 0.92388).abs() < 1e-5);
}

#[test]
fn normalize_reaches_the_target_peak() {
    let buf = sine(440.0, 0.1).scaled(0.5 / 0.9);
    let out = normalize(&buf, -3.0).unwrap();
    assert!((out.peak() - 10f64.powf(-3.0 / 20.0)).abs() < 1e-4);
    assert!((out.peak() - 0.70795).abs() < 1e-4);
    let again = normalize(&out, -3.0).unwrap();
    assert!(max_abs_diff(&out, &again) < 1e-6);
}

#[test]
fn mix_places_buffers_and_limits() {
    let a = sine(440.0, 1.0);
    let out = mix(&[(a.clone(), 0.0), (a.clone(), 2.0)]).unwrap();
    assert!((out.duration_s() - 3.0).abs() < 1e-9);
    let half = a.scaled(0.5 / a.peak());
    let raw = mix_raw(&[(half.clone(), 0.0), (half.clone(), 0.0)]).unwrap();
    assert!((raw.peak() - 1.0).abs() < 1e-9);
    assert!(mix(&[(half.clone(), 0.0), (half, 0.0)]).unwrap().peak() <= 1.0);
    assert_eq!(mix(&[(a.clone(), 0.0)]).unwrap(), a);
}

#[test]
fn mismatched_rates_are_rejected() {
    let a = sine(440.0, 0.1);
    let b = synth(&SynthSpec::new(Generator::Sine, 440.0), 0.1, 22_050).unwrap();
    assert!(mix(&[(a, 0.0), (b, 0.0)]).is_err());
}

#[test]
fn wav_file_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("x.wav");
    let buf = apply_variables(&sine(330.0, 0.25), &AuditoryVariables { pan: -0.3, ..Default::default() }).unwrap();
    write_wav(&buf, &path).unwrap();
    let back = read_wav(&path).unwrap();
    assert_eq!(back.sample_rate(), SR);
    assert!(max_abs_diff(&buf, &back) <= 1.0 / 32768.0);
}

/// Length of the tail rendered past the dry signal, and its RMS.
fn tail_rms(dry: &AudioBuffer, depth: u32) -> f64 {
    let out = apply_variables(dry, &AuditoryVariables { reverb_depth: depth, ..Default::default() }).unwrap();
    let tail: Vec<f64> = out.channel(0).iter().skip(dry.len()).copied().collect();
    if tail.is_empty() {
        return 0.0;
    }
    (tail.iter().map(|v| v * v).sum::<f64>() / tail.len() as f64).sqrt()
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn equal_power_pan(p in -1.0f64..=1.0) {
        let (l, r) = pan_gains(p);
        prop_assert!((l * l + r * r - 1.0).abs() <= 1e-6);
    }

    #[test]
    fn pitch_shift_duration_law(s in -24.0f64..=24.0, len in 200usize..6000) {
        let buf = AudioBuffer::mono(SR, (0..len).map(|i| (i as f64 * 0.05).sin()).collect()).unwrap();
        let out = apply_variables(&buf, &AuditoryVariables { pitch_semitones: s, ..Default::default() }).unwrap();
        let expected = (len as f64 / 2f64.powf(s / 12.0)).round();
        prop_assert!((out.len() as f64 - expected).abs() <= 1.0);
    }

    #[test]
    fn octave_up_halves_duration(len in 100usize..20_000) {
        let buf = AudioBuffer::mono(SR, vec![0.25; len]).unwrap();
        let out = apply_variables(&buf, &AuditoryVariables { pitch_semitones: 12.0, ..Default::default() }).unwrap();
        prop_assert!((out.len() as f64 - len as f64 / 2.0).abs() <= 1.0);
    }

    #[test]
    fn mix_is_commutative_and_associative(
        offs in proptest::collection::vec(0.0f64..0.05, 3),
        seeds in proptest::collection::vec(0u32..1000, 3),
        lens in proptest::collection::vec(0.01f64..0.04, 3),
    ) {
        let b: Vec<AudioBuffer> = (0..3).map(|k| noise(lens[k], f64::from(seeds[k]))).collect();
        let abc = mix_raw(&[(b[0].clone(), offs[0]), (b[1].clone(), offs[1]), (b[2].clone(), offs[2])]).unwrap();
        let cba = mix_raw(&[(b[2].clone(), offs[2]), (b[1].clone(), offs[1]), (b[0].clone(), offs[0])]).unwrap();
        prop_assert!(max_abs_diff(&abc, &cba) <= 1e-6);

        // (a + b) + c with a and b already placed, versus a + (b + c).
        let ab = mix_raw(&[(b[0].clone(), offs[0]), (b[1].clone(), offs[1])]).unwrap();
        let left = mix_raw(&[(ab, 0.0), (b[2].clone(), offs[2])]).unwrap();
        let bc = mix_raw(&[(b[1].clone(), offs[1]), (b[2].clone(), offs[2])]).unwrap();
        let right = mix_raw(&[(b[0].clone(), offs[0]), (bc, 0.0)]).unwrap();
        prop_assert!(max_abs_diff(&left, &right) <= 1e-6);
    }

    #[test]
    fn wav_round_trip_error_is_bounded(
        left in proptest::collection::vec(-1.0f64..=1.0, 1..400),
        pan in -1.0f64..=1.0,
    ) {
        let (gl, gr) = pan_gains(pan);
        let buf = AudioBuffer::stereo(SR, left.iter().map(|v| v * gl).collect(), left.iter().map(|v| v * gr).collect()).unwrap();
        let back = decode_wav(&encode_wav(&buf)).unwrap();
        prop_assert!(max_abs_diff(&buf, &back) <= 1.0 / 32768.0);
    }

    #[test]
    fn reverb_tail_is_monotone_in_depth(seed in 0u32..500, freq in 100.0f64..2000.0) {
        let dry = mix_raw(&[(noise(0.1, f64::from(seed)), 0.0), (sine(freq, 0.1), 0.0)]).unwrap();
        let tails: Vec<f64> = (0..=4).map(|d| tail_rms(&dry, d)).collect();
        for w in tails.windows(2) {
            prop_assert!(w[1] >= w[0], "tails {:?}", tails);
        }
    }
}

#[test]
fn zero_depth_reverb_adds_no_tail() {
    let dry = sine(440.0, 0.1);
    assert_eq!(tail_rms(&dry, 0), 0.0);
    assert!(tail_rms(&dry, 1) > 0.0);
}
