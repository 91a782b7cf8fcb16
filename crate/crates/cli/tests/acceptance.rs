//! One PASS/FAIL line per primary acceptance criterion.
//!
//! Run with `cargo test -p sonoform-cli --test acceptance -- --nocapture` to see the lines.

use std::collections::BTreeSet;
use std::path::PathBuf;
use std::process::Command;
use std::time::Instant;

use serde_json::Value;
use sonoform_core::audio::{
    apply_variables, decode_wav, encode_wav, gain_to_db, mix_raw, pan_gains, synth, AudioBuffer, AuditoryVariables,
    Generator, SynthSpec,
};
use sonoform_core::catalogue::{builtin_baseline, builtin_proposed};
use sonoform_core::nav::{NavMove, NavState};
use sonoform_core::principles::{check_discriminability, LintConfig};
use sonoform_core::sonifier::{plan_walkthrough, render_timeline, Audience, EventSubject, RenderProfile};
use sonoform_core::stats::chi_square_p;
use sonoform_core::uml::{assign_layout, parse_diagram, ClassModel};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)*) => {
        if let false = $cond {
            return Err(format!($($msg)*));
        }
    };
}

const SR: u32 = 44_100;

const PREFERENCE_TABLE: [(&str, f64, f64); 11] = [
    ("Class", 16.516, 0.000),
    ("Attribute", 40.323, 0.000),
    ("Operation", 40.516, 0.000),
    ("Association", 45.742, 0.000),
    ("Inheritance", 12.645, 0.002),
    ("Realization", 11.097, 0.004),
    ("Dependency", 45.355, 0.000),
    ("Aggregation", 19.806, 0.000),
    ("Composition", 2.387, 0.303),
    ("AssociationClass", 8.581, 0.014),
    ("Package", 40.323, 0.000),
];

/// principle, mean, stddev, chi-square, p
const RELEVANCE_TABLE: [(&str, f64, f64, f64, f64); 9] = [
    ("SemioticClarity", 4.5161, 0.67680, 41.742, 0.000),
    ("PerceptualDiscriminability", 4.0000, 1.00000, 17.871, 0.001),
    ("SemanticTransparency", 4.1935, 0.94585, 24.323, 0.000),
    ("ComplexityManagement", 3.1613, 1.34404, 3.032, 0.552),
    ("CognitiveIntegration", 3.1613, 1.03591, 12.710, 0.013),
    ("AuditoryExpressiveness", 3.4516, 1.33763, 3.355, 0.500),
    ("DualCoding", 3.6774, 1.10716, 15.290, 0.004),
    ("AuditoryEconomy", 3.9355, 0.96386, 15.613, 0.004),
    ("CognitiveFit", 3.7097, 1.03902, 11.097, 0.025),
];

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name)
}

fn library() -> ClassModel {
    assign_layout(&parse_diagram(&std::fs::read_to_string(fixture("library.uml")).unwrap()).unwrap())
}

fn sonoform(args: &[&str]) -> Result<(i32, Value), String> {
    let out = Command::new(env!("CARGO_BIN_EXE_sonoform")).args(args).output().map_err(|e| e.to_string())?;
    let code = out.status.code().ok_or("killed by signal")?;
    let json = serde_json::from_slice(&out.stdout)
        .map_err(|e| format!("{args:?}: bad json ({e}); stderr {}", String::from_utf8_lossy(&out.stderr)))?;
    Ok((code, json))
}

fn pairs(report: &Value) -> BTreeSet<(String, Vec<String>)> {
    report["violations"]
        .as_array()
        .into_iter()
        .flatten()
        .filter(|v| v["severity"] == "error")
        .map(|v| {
            let mut subjects: Vec<String> =
                v["subjects"].as_array().unwrap().iter().map(|s| s.as_str().unwrap().to_string()).collect();
            subjects.sort();
            (v["principle"].as_str().unwrap().to_string(), subjects)
        })
        .collect()
}

fn baseline_violations() -> Outcome {
    let (code, report) = sonoform(&["validate", "builtin:baseline", "--json"])?;
    ensure!(code == 2, "baseline exit code {code}, want 2");
    let expected: BTreeSet<(String, Vec<String>)> = [
        ("SemioticClarity", &["Attribute", "Class"][..]),
        ("PerceptualDiscriminability", &["Attribute", "Class"]),
        ("SemioticClarity", &["Association", "Operation"]),
        ("PerceptualDiscriminability", &["Association", "Operation"]),
        ("SemioticClarity", &["Dependency", "Realization"]),
        ("PerceptualDiscriminability", &["Dependency", "Realization"]),
        ("AuditoryEconomy", &["Inheritance"]),
    ]
    .iter()
    .map(|(p, s)| (p.to_string(), s.iter().map(|x| x.to_string()).collect()))
    .collect();
    let got = pairs(&report);
    ensure!(got == expected, "baseline pairs differ: got {got:?}");
    let rules: BTreeSet<&str> = report["violations"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|v| v["principle"] == "AuditoryEconomy")
        .filter_map(|v| v["rule"].as_str())
        .collect();
    ensure!(rules.contains("too_long"), "no duration finding on Inheritance: {rules:?}");

    let (code, report) = sonoform(&["validate", "builtin:proposed", "--json"])?;
    ensure!(code == 0, "proposed exit code {code}");
    let bad: Vec<_> = pairs(&report)
        .into_iter()
        .filter(|(p, _)| p == "SemioticClarity" || p == "AuditoryEconomy")
        .collect();
    ensure!(bad.is_empty(), "proposed violations {bad:?}");
    Ok(format!("{} baseline pairs matched exactly, proposed clean", expected.len()))
}

fn within(got: &Value, want: f64, tol: f64, what: &str) -> Result<(), String> {
    let g = got.as_f64().ok_or(format!("{what}: missing"))?;
    if (g - want).abs() <= tol {
        Ok(())
    } else {
        Err(format!("{what}: {g:.4} vs published {want:.4}"))
    }
}

fn analyze() -> Result<(Value, f64), String> {
    let path = fixture("study.csv");
    let start = Instant::now();
    let (code, report) = sonoform(&["analyze", path.to_str().unwrap(), "--json"])?;
    ensure!(code == 0, "analyze exit code {code}");
    Ok((report, start.elapsed().as_secs_f64()))
}

fn statistics_tables() -> Outcome {
    let (report, secs) = analyze()?;
    ensure!(secs < 1.0, "analyze took {secs:.3} s");
    let pref = report["preference"].as_array().ok_or("no preference table")?;
    ensure!(pref.len() == PREFERENCE_TABLE.len(), "preference rows {}", pref.len());
    for (row, (name, chi, p)) in pref.iter().zip(PREFERENCE_TABLE) {
        ensure!(row["element"] == name, "row order: {} vs {name}", row["element"]);
        within(&row["chi_square"]["statistic"], chi, 0.01, &format!("{name} chi-square"))?;
        within(&row["chi_square"]["p"], p, 0.01, &format!("{name} p"))?;
    }
    let rel = report["relevance"].as_array().ok_or("no relevance table")?;
    ensure!(rel.len() == RELEVANCE_TABLE.len(), "relevance rows {}", rel.len());
    for (row, (name, mean, sd, chi, p)) in rel.iter().zip(RELEVANCE_TABLE) {
        ensure!(row["principle"] == name, "row order: {} vs {name}", row["principle"]);
        within(&row["descriptive"]["mean"], mean, 0.01, &format!("{name} mean"))?;
        within(&row["descriptive"]["stddev"], sd, 0.01, &format!("{name} stddev"))?;
        within(&row["chi_square"]["statistic"], chi, 0.01, &format!("{name} chi-square"))?;
        within(&row["chi_square"]["p"], p, 0.01, &format!("{name} p"))?;
    }
    Ok(format!("20 rows within 0.01, {secs:.3} s including process start"))
}

fn holm_outcomes() -> Outcome {
    let (report, _) = analyze()?;
    let pref = report["preference"].as_array().unwrap();
    let kept: Vec<&str> =
        pref.iter().filter(|r| r["significant_holm"] == false).map(|r| r["element"].as_str().unwrap()).collect();
    ensure!(kept == ["Composition"], "preference not significant after correction: {kept:?}");
    let rel = report["relevance"].as_array().unwrap();
    let sig = rel.iter().filter(|r| r["significant_holm"] == true).count();
    ensure!(sig == 5, "{sig} relevance tests significant, want 5");
    let ci = rel.iter().position(|r| r["principle"] == "CognitiveIntegration").unwrap();
    let h = report["relevance_correction"]["hypotheses"][ci].clone();
    within(&h["p"], 0.013, 0.0005, "Cognitive Integration p")?;
    within(&h["threshold"], 0.0125, 1e-12, "Cognitive Integration threshold")?;
    ensure!(h["significant"] == false, "Cognitive Integration passed its threshold");
    Ok(format!("{}/11 preference, {sig}/9 relevance, p {:.4} > 0.0125", 11 - kept.len(), h["p"].as_f64().unwrap()))
}

fn closed_forms() -> Outcome {
    let mut worst: f64 = 0.0;
    for step in 0..=600 {
        let x = f64::from(step) * 0.1;
        let two = (-x / 2.0).exp();
        let four = (1.0 + x / 2.0) * (-x / 2.0).exp();
        for (df, want) in [(2, two), (4, four)] {
            let got = chi_square_p(x, df);
            let err = (got - want).abs();
            ensure!(err <= 1e-9, "df {df} at x={x:.1}: {got} vs {want}");
            worst = worst.max(err);
        }
    }
    Ok(format!("1202 points, max error {worst:.1e}"))
}

struct Lcg(u64);

impl Lcg {
    fn unit(&mut self) -> f64 {
        self.0 = self.0.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        (self.0 >> 11) as f64 / (1u64 << 53) as f64
    }
}

fn max_abs_diff(a: &AudioBuffer, b: &AudioBuffer) -> f64 {
    a.channels().iter().zip(b.channels()).flat_map(|(x, y)| x.iter().zip(y).map(|(p, q)| (p - q).abs())).fold(0.0, f64::max)
}

fn dsp_suite() -> Outcome {
    let mut rng = Lcg(7);
    for k in 0..=200 {
        let p = -1.0 + f64::from(k) / 100.0;
        let (l, r) = pan_gains(p);
        ensure!((l * l + r * r - 1.0).abs() <= 1e-6, "pan {p}: {l}, {r}");
    }
    for len in [101usize, 1000, 4410, 12_345, 44_100] {
        let buf = AudioBuffer::mono(SR, (0..len).map(|i| (i as f64 * 0.03).sin()).collect()).map_err(|e| e.to_string())?;
        let out = apply_variables(&buf, &AuditoryVariables { pitch_semitones: 12.0, ..Default::default() })
            .map_err(|e| e.to_string())?;
        ensure!((out.len() as f64 - len as f64 / 2.0).abs() <= 1.0, "octave of {len} gave {}", out.len());
    }
    let dry = synth(&SynthSpec::new(Generator::Noise, 0.0).with("seed", 3.0), 0.1, SR).map_err(|e| e.to_string())?;
    let mut last = -1.0;
    for depth in 0..=4 {
        let wet = apply_variables(&dry, &AuditoryVariables { reverb_depth: depth, ..Default::default() })
            .map_err(|e| e.to_string())?;
        let tail: Vec<f64> = wet.channel(0)[dry.len()..].to_vec();
        let rms = if tail.is_empty() { 0.0 } else { (tail.iter().map(|v| v * v).sum::<f64>() / tail.len() as f64).sqrt() };
        ensure!(rms >= last, "tail rms fell at depth {depth}: {rms} < {last}");
        last = rms;
    }
    for _ in 0..20 {
        let n = 1 + (rng.unit() * 500.0) as usize;
        let left: Vec<f64> = (0..n).map(|_| rng.unit() * 2.0 - 1.0).collect();
        let right: Vec<f64> = (0..n).map(|_| rng.unit() * 2.0 - 1.0).collect();
        let buf = AudioBuffer::stereo(SR, left, right).map_err(|e| e.to_string())?;
        let back = decode_wav(&encode_wav(&buf)).map_err(|e| e.to_string())?;
        let err = max_abs_diff(&buf, &back);
        ensure!(err <= 1.0 / 32768.0, "wav round trip error {err}");
    }
    for _ in 0..20 {
        let parts: Vec<(AudioBuffer, f64)> = (0..3)
            .map(|_| {
                let secs = 0.01 + rng.unit() * 0.03;
                let spec = SynthSpec::new(Generator::Noise, 0.0).with("seed", (rng.unit() * 1000.0).floor());
                (synth(&spec, secs, SR).unwrap(), rng.unit() * 0.05)
            })
            .collect();
        let (a, b, c) = (&parts[0], &parts[1], &parts[2]);
        let ab = mix_raw(&[a.clone(), b.clone()]).map_err(|e| e.to_string())?;
        let left = mix_raw(&[(ab, 0.0), c.clone()]).map_err(|e| e.to_string())?;
        let bc = mix_raw(&[b.clone(), c.clone()]).map_err(|e| e.to_string())?;
        let right = mix_raw(&[a.clone(), (bc, 0.0)]).map_err(|e| e.to_string())?;
        let err = max_abs_diff(&left, &right);
        ensure!(err <= 1e-6, "mix associativity error {err}");
    }
    Ok("pan, octave, reverb tail, wav round trip, mix associativity".into())
}

fn sonifier_contract() -> Outcome {
    let model = library();
    let cat = builtin_proposed();
    let profile = RenderProfile::for_audience(Audience::Expert);
    let start = Instant::now();
    let timeline = plan_walkthrough(&model, &cat, &profile).map_err(|e| e.to_string())?;
    let rendered = render_timeline(&timeline, &cat, &profile).map_err(|e| e.to_string())?;
    let secs = start.elapsed().as_secs_f64();
    ensure!(secs < 10.0, "render took {secs:.2} s");
    let elements = timeline.events.iter().filter(|e| matches!(e.subject, EventSubject::Element { .. })).count();
    ensure!(elements == model.element_count(), "{elements} element events for {} elements", model.element_count());
    ensure!(timeline.events.len() == elements + 1, "motif missing");
    let mean = rendered.cue_rms_db.iter().sum::<f64>() / rendered.cue_rms_db.len() as f64;
    let spread = rendered.cue_rms_db.iter().map(|r| (r - mean).abs()).fold(0.0, f64::max);
    ensure!(spread <= profile.loudness_window_db, "rms spread {spread:.2} dB > {} dB", profile.loudness_window_db);
    let peak = gain_to_db(rendered.audio.peak());
    ensure!(peak <= -1.0, "peak {peak:.2} dBFS");
    ensure!(rendered.captions.cues.len() == timeline.events.len(), "caption count differs");
    Ok(format!(
        "{} events, rms within {spread:.2} dB, peak {peak:.2} dBFS, {secs:.2} s",
        timeline.events.len()
    ))
}

fn calibration() -> Outcome {
    let config = LintConfig::default();
    let (_, proposed) = check_discriminability(&builtin_proposed(), &config).map_err(|e| e.to_string())?;
    let n = proposed.concepts.len();
    let mut min = f64::INFINITY;
    let mut count = 0;
    for i in 0..n {
        for j in i + 1..n {
            count += 1;
            min = min.min(proposed.distances[i][j]);
        }
    }
    ensure!(count == 55, "{count} proposed pairs");
    ensure!(min >= proposed.threshold, "closest proposed pair {min:.3} < {}", proposed.threshold);
    let (_, baseline) = check_discriminability(&builtin_baseline(), &config).map_err(|e| e.to_string())?;
    let at = |a: &str, b: &str| {
        let i = baseline.concepts.iter().position(|c| c == a).unwrap();
        let j = baseline.concepts.iter().position(|c| c == b).unwrap();
        baseline.distances[i][j]
    };
    let water = at("Operation", "Association");
    let wind = at("Realization", "Dependency");
    ensure!(water < baseline.threshold && wind < baseline.threshold, "water {water:.3}, wind {wind:.3}");
    Ok(format!("proposed min {min:.3}, baseline water {water:.3}, wind {wind:.3}"))
}

fn script() -> Vec<NavMove> {
    use NavMove::*;
    vec![
        Into, NextSibling, Into, Into, FollowRelationship { index: 0 }, WhereAmI, Into, NextSibling, NextSibling,
        NextSibling, Out, Out, PrevSibling, PrevSibling, RepeatCue, NextSibling, FollowRelationship { index: 1 }, Out,
        Into, Out,
    ]
}

fn walk(model: &ClassModel) -> Result<Vec<(String, String)>, String> {
    let mut s = NavState::new(model, Audience::Expert).map_err(|e| e.to_string())?;
    script()
        .into_iter()
        .map(|mv| s.navigate(model, mv).map(|ev| (ev.focus_id, ev.cue_id)).map_err(|e| e.to_string()))
        .collect()
}

fn navigation() -> Outcome {
    let model = library();
    let first = walk(&model)?;
    ensure!(first.len() == 20, "{} events", first.len());
    ensure!(first == walk(&model)? && first == walk(&library())?, "runs differ");
    let mut checked = 0;
    for e in model.elements() {
        let mut s = NavState { audience: Audience::Expert, focus: e, history: vec![e] };
        let down = s.navigate(&model, NavMove::Into).map_err(|e| e.to_string())?;
        if down.moved {
            let up = s.navigate(&model, NavMove::Out).map_err(|e| e.to_string())?;
            ensure!(up.focus == e, "out after into from {e:?} landed on {:?}", up.focus);
            checked += 1;
        } else {
            ensure!(s.focus == e, "blocked into moved focus");
        }
    }
    Ok(format!("20-move script identical across runs, {checked} into/out round trips"))
}

#[test]
fn primary_criteria() {
    let criteria: [Criterion; 8] = [
        ("baseline violation reproduction", baseline_violations),
        ("statistics tables", statistics_tables),
        ("holm outcomes", holm_outcomes),
        ("exact p-value closed forms", closed_forms),
        ("dsp properties", dsp_suite),
        ("sonifier contract", sonifier_contract),
        ("discriminability calibration", calibration),
        ("navigation determinism", navigation),
    ];
    let mut failed = Vec::new();
    for (k, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("PASS criterion {}: {name} ({detail})", k + 1),
            Err(why) => {
                println!("FAIL criterion {}: {name} ({why})", k + 1);
                failed.push(k + 1);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria {failed:?}");
}
