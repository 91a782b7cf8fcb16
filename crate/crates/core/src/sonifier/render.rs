use std::fmt::Write as _;
use std::process::{Command, Stdio};

use serde::{Deserialize, Serialize};

use crate::audio::{db_to_gain, decode_wav, frames_for, resample_by_rate, AudioBuffer, AuditoryVariables};
use crate::catalogue::{realize_earcon, SoundCatalogue, RENDER_SAMPLE_RATE};
use crate::uml::{ClassModel, ClassifierKind, ElementRef, RelationshipKind};

use super::{diagram_motif, spatialize, Audience, RenderProfile, SonifierError};

/// Every cue is levelled to this RMS before the vertical tilt is applied.
pub const CUE_RMS_DB: f64 = -24.0;
/// Ceiling for cue peaks.
pub const CUE_PEAK_DB: f64 = -1.0;
/// Concept id of the opening motif event.
pub const MOTIF_CONCEPT: &str = "motif";
/// Level of spoken captions below their earcon, in dB.
const TTS_UNDER_DB: f64 = 6.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EventSubject {
    Motif { name: String },
    Element { element: ElementRef, id: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimelineEvent {
    pub start_s: f64,
    pub start_frame: usize,
    pub frames: usize,
    pub concept: String,
    pub subject: EventSubject,
    pub vars: AuditoryVariables,
    pub caption: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SonicTimeline {
    pub sample_rate: u32,
    pub events: Vec<TimelineEvent>,
}

impl SonicTimeline {
    pub fn total_frames(&self) -> usize {
        self.events.last().map_or(0, |e| e.start_frame + e.frames)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CaptionCue {
    pub start_s: f64,
    pub end_s: f64,
    pub text: String,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct CaptionTrack {
    pub cues: Vec<CaptionCue>,
}

fn vtt_time(t: f64) -> String {
    let ms = (t * 1000.0).round() as u64;
    format!("{:02}:{:02}:{:02}.{:03}", ms / 3_600_000, ms / 60_000 % 60, ms / 1000 % 60, ms % 1000)
}

impl CaptionTrack {
    pub fn to_webvtt(&self) -> String {
        let mut out = String::from("WEBVTT\n");
        for (k, c) in self.cues.iter().enumerate() {
            let _ = write!(out, "\n{}\n{} --> {}\n{}\n", k + 1, vtt_time(c.start_s), vtt_time(c.end_s), c.text);
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RenderedWalkthrough {
    pub audio: AudioBuffer,
    pub captions: CaptionTrack,
    /// Per-cue RMS in dBFS, in event order.
    pub cue_rms_db: Vec<f64>,
    pub warnings: Vec<String>,
}

/// Catalogue concept that sounds an element.
pub fn concept_of(model: &ClassModel, e: ElementRef) -> &'static str {
    match e {
        ElementRef::Package { .. } => "Package",
        ElementRef::Classifier { .. } => "Class",
        ElementRef::Attribute { .. } => "Attribute",
        ElementRef::Operation { .. } => "Operation",
        ElementRef::Relationship { index } => match model.relationships[index].kind {
            RelationshipKind::Association => "Association",
            RelationshipKind::Inheritance => "Inheritance",
            RelationshipKind::Realization => "Realization",
            RelationshipKind::Dependency => "Dependency",
            RelationshipKind::Aggregation => "Aggregation",
            RelationshipKind::Composition => "Composition",
            RelationshipKind::AssociationClass => "AssociationClass",
        },
    }
}

fn capitalize(s: &str) -> String {
    let mut c = s.chars();
    match c.next() {
        Some(f) => f.to_uppercase().chain(c).collect(),
        None => String::new(),
    }
}

/// Caption of an element. Novice captions add the location, the nesting
/// depth (which their audio does not convey) and the catalogue caption.
pub fn caption_for(model: &ClassModel, e: ElementRef, cat: &SoundCatalogue, audience: Audience) -> String {
    let base = match e {
        ElementRef::Package { .. } => format!("Package {}", model.display_name(e)),
        ElementRef::Classifier { index } => {
            let kind = match model.classifiers[index].kind {
                ClassifierKind::Class => "Class",
                ClassifierKind::Interface => "Interface",
            };
            format!("{kind} {}", model.display_name(e))
        }
        ElementRef::Attribute { .. } => format!("Attribute {}", model.display_name(e)),
        ElementRef::Operation { .. } => format!("Operation {}", model.display_name(e)),
        ElementRef::Relationship { .. } => capitalize(&model.display_name(e)),
    };
    if audience == Audience::Expert {
        return base;
    }
    let mut text = base;
    let trail = model.breadcrumb(e);
    if trail.len() > 2 {
        let _ = write!(text, ", in {}", trail[1..trail.len() - 1].join(" > "));
    }
    let depth = model.depth(e);
    if depth > 0 {
        let _ = write!(text, ", nested {depth} level{} deep", if depth == 1 { "" } else { "s" });
    }
    text.push('.');
    if let Some(b) = cat.binding(concept_of(model, e)) {
        if !b.recipe.caption.is_empty() {
            let _ = write!(text, " {}", b.recipe.caption);
        }
    }
    text
}

/// Spatial variables of an element under a profile. Novices hear neither
/// the loudness tilt nor reverberation.
pub fn event_vars(model: &ClassModel, e: ElementRef, profile: &RenderProfile) -> Result<AuditoryVariables, SonifierError> {
    let mut vars = spatialize(model.anchor(e), model.depth(e))?;
    if !profile.pan_from_x {
        vars.pan = 0.0;
    }
    if !profile.reverb_from_depth || profile.audience == Audience::Novice {
        vars.reverb_depth = 0;
    }
    if profile.audience == Audience::Novice {
        vars.loudness_db = 0.0;
    }
    Ok(vars)
}

fn soft_ceiling(buf: &AudioBuffer, ceiling: f64) -> AudioBuffer {
    let knee = 0.8 * ceiling;
    let span = ceiling - knee;
    buf.map_samples(|s| {
        let a = s.abs();
        if a <= knee {
            s
        } else {
            s.signum() * (knee + span * ((a - knee) / span).tanh())
        }
    })
}

/// Scales to `CUE_RMS_DB + tilt_db` RMS, then keeps peaks under the
/// ceiling. A few rounds recover the RMS the ceiling takes away.
fn level(buf: &AudioBuffer, tilt_db: f64) -> AudioBuffer {
    let target = db_to_gain(CUE_RMS_DB + tilt_db);
    let ceiling = db_to_gain(CUE_PEAK_DB);
    let rms = buf.rms();
    if rms == 0.0 {
        return buf.clone();
    }
    let mut out = buf.scaled(target / rms);
    for _ in 0..4 {
        if out.peak() < ceiling {
            break;
        }
        out = soft_ceiling(&out, ceiling);
        out = out.scaled(target / out.rms());
    }
    if out.peak() >= ceiling {
        out = soft_ceiling(&out, ceiling);
    }
    out
}

fn shell_quote(text: &str) -> String {
    format!("'{}'", text.replace('\'', r"'\''"))
}

fn speak(template: &str, text: &str) -> Result<AudioBuffer, String> {
    let cmd = template.replace("{text}", &shell_quote(text));
    let mut child = Command::new("sh")
        .arg("-c")
        .arg(&cmd)
        .stdin(Stdio::null())
        .stdout(Stdio::piped())
        .stderr(Stdio::null())
        .spawn()
        .map_err(|e| format!("cannot start text-to-speech command: {e}"))?;
    let mut stdout = child.stdout.take().expect("stdout is piped");
    let mut bytes = Vec::new();
    std::io::Read::read_to_end(&mut stdout, &mut bytes).map_err(|e| e.to_string())?;
    let status = child.wait().map_err(|e| e.to_string())?;
    if !status.success() {
        return Err(format!("text-to-speech command exited with {status}"));
    }
    let buf = decode_wav(&bytes).map_err(|e| format!("text-to-speech output: {e}"))?;
    let mono = if buf.sample_rate() == RENDER_SAMPLE_RATE {
        buf.downmix()
    } else {
        resample_by_rate(&buf.downmix(), f64::from(buf.sample_rate()) / f64::from(RENDER_SAMPLE_RATE))
    };
    AudioBuffer::mono(RENDER_SAMPLE_RATE, mono).map_err(|e| e.to_string())
}

/// Lays speech under a levelled cue, truncated to the cue's length.
fn with_speech(cue: &AudioBuffer, speech: &AudioBuffer) -> AudioBuffer {
    let srms = speech.rms();
    if srms == 0.0 || cue.is_empty() {
        return cue.clone();
    }
    let g = cue.rms() * db_to_gain(-TTS_UNDER_DB) / srms;
    let voice = speech.downmix();
    let channels = cue
        .channels()
        .iter()
        .map(|ch| ch.iter().enumerate().map(|(i, s)| s + g * voice.get(i).copied().unwrap_or(0.0)).collect())
        .collect();
    let mixed = AudioBuffer::new(cue.sample_rate(), channels).expect("same shape as the cue");
    soft_ceiling(&mixed, db_to_gain(CUE_PEAK_DB))
}

/// Renders one levelled cue. Returns the audio and a warning when the
/// speech hook failed.
fn cue_audio(
    concept: &str,
    subject: &EventSubject,
    vars: &AuditoryVariables,
    caption: &str,
    cat: &SoundCatalogue,
    profile: &RenderProfile,
) -> Result<(AudioBuffer, Option<String>), crate::catalogue::CatalogueError> {
    let raw = match subject {
        EventSubject::Motif { name } => diagram_motif(name, RENDER_SAMPLE_RATE),
        EventSubject::Element { .. } => {
            let binding =
                cat.binding(concept).ok_or_else(|| crate::catalogue::CatalogueError::Unbound(concept.to_string()))?;
            let extra = AuditoryVariables { loudness_db: 0.0, ..*vars };
            realize_earcon(&binding.recipe, cat, &extra)?.audio
        }
    };
    let cue = level(&raw, vars.loudness_db);
    match (&profile.tts_hook, profile.captions_enabled) {
        (Some(template), true) => match speak(template, caption) {
            Ok(speech) => Ok((with_speech(&cue, &speech), None)),
            Err(e) => Ok((cue, Some(e))),
        },
        _ => Ok((cue, None)),
    }
}

fn check_bound(model: &ClassModel, cat: &SoundCatalogue) -> Result<(), SonifierError> {
    for e in model.elements() {
        let concept = concept_of(model, e);
        if cat.binding(concept).is_none() {
            return Err(SonifierError::UnboundConcept(concept.to_string()));
        }
    }
    Ok(())
}

/// Orders every model element (after an optional motif) and times the
/// events back to back with the profile's gap.
pub fn plan_walkthrough(
    model: &ClassModel,
    cat: &SoundCatalogue,
    profile: &RenderProfile,
) -> Result<SonicTimeline, SonifierError> {
    profile.validate().map_err(SonifierError::InvalidArgument)?;
    check_bound(model, cat)?;
    let mut events = Vec::with_capacity(model.element_count() + 1);
    if profile.motif_enabled {
        events.push(TimelineEvent {
            start_s: 0.0,
            start_frame: 0,
            frames: 0,
            concept: MOTIF_CONCEPT.into(),
            subject: EventSubject::Motif { name: model.name.clone() },
            vars: AuditoryVariables::default(),
            caption: format!("Diagram {}", model.name),
        });
    }
    for e in model.elements() {
        events.push(TimelineEvent {
            start_s: 0.0,
            start_frame: 0,
            frames: 0,
            concept: concept_of(model, e).to_string(),
            subject: EventSubject::Element { element: e, id: model.element_id(e) },
            vars: event_vars(model, e, profile)?,
            caption: caption_for(model, e, cat, profile.audience),
        });
    }
    let gap = frames_for(profile.inter_cue_gap_s, RENDER_SAMPLE_RATE);
    let silent = RenderProfile { tts_hook: None, ..profile.clone() };
    let mut cursor = 0;
    for (index, ev) in events.iter_mut().enumerate() {
        let (audio, _) = cue_audio(&ev.concept, &ev.subject, &ev.vars, &ev.caption, cat, &silent)
            .map_err(|source| SonifierError::Event { index, source })?;
        if index > 0 {
            cursor += gap;
        }
        ev.start_frame = cursor;
        ev.start_s = cursor as f64 / f64::from(RENDER_SAMPLE_RATE);
        ev.frames = audio.len();
        cursor += audio.len();
    }
    Ok(SonicTimeline { sample_rate: RENDER_SAMPLE_RATE, events })
}

/// Mixes the timeline into one stereo buffer with aligned captions.
pub fn render_timeline(
    timeline: &SonicTimeline,
    cat: &SoundCatalogue,
    profile: &RenderProfile,
) -> Result<RenderedWalkthrough, SonifierError> {
    let total = timeline.total_frames();
    let mut left = vec![0.0; total];
    let mut right = vec![0.0; total];
    let mut captions = CaptionTrack::default();
    let mut cue_rms_db = Vec::with_capacity(timeline.events.len());
    let mut warnings = Vec::new();
    let sr = f64::from(timeline.sample_rate);
    for (index, ev) in timeline.events.iter().enumerate() {
        let (audio, warning) = cue_audio(&ev.concept, &ev.subject, &ev.vars, &ev.caption, cat, profile)
            .map_err(|source| SonifierError::Event { index, source })?;
        if let Some(w) = warning {
            warnings.push(format!("event {index}: {w}; caption left as text"));
        }
        let stereo = audio.to_stereo();
        let n = stereo.len().min(ev.frames);
        for i in 0..n {
            left[ev.start_frame + i] += stereo.channel(0)[i];
            right[ev.start_frame + i] += stereo.channel(1)[i];
        }
        cue_rms_db.push(crate::audio::gain_to_db(audio.rms()));
        if profile.captions_enabled {
            captions.cues.push(CaptionCue {
                start_s: ev.start_frame as f64 / sr,
                end_s: (ev.start_frame + ev.frames) as f64 / sr,
                text: ev.caption.clone(),
            });
        }
    }
    let audio = AudioBuffer::stereo(timeline.sample_rate, left, right).expect("channels have equal length");
    Ok(RenderedWalkthrough { audio, captions, cue_rms_db, warnings })
}

/// The cue an element gets in a walkthrough, rendered on its own.
pub fn element_cue(
    model: &ClassModel,
    e: ElementRef,
    cat: &SoundCatalogue,
    profile: &RenderProfile,
) -> Result<(AudioBuffer, String), SonifierError> {
    if !model.contains(e) {
        return Err(SonifierError::NotFound(format!("{e:?}")));
    }
    let concept = concept_of(model, e);
    if cat.binding(concept).is_none() {
        return Err(SonifierError::UnboundConcept(concept.to_string()));
    }
    let vars = event_vars(model, e, profile)?;
    let caption = caption_for(model, e, cat, profile.audience);
    let subject = EventSubject::Element { element: e, id: model.element_id(e) };
    let (audio, _) = cue_audio(concept, &subject, &vars, &caption, cat, profile)?;
    Ok((audio.to_stereo(), caption))
}
