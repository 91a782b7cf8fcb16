//! Keyboard-style navigation over a class model, producing one cue per
//! move.

use serde::{Deserialize, Serialize};

use crate::audio::{frames_for, mix_raw, AudioBuffer};
use crate::catalogue::{SoundCatalogue, RENDER_SAMPLE_RATE};
use crate::sonifier::{element_cue, fnv1a64, Audience, RenderProfile, SonifierError};
use crate::uml::{ClassModel, ElementRef};

/// Silence between the relationship cue and the target cue of a follow.
const FOLLOW_GAP_S: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "move", rename_all = "snake_case")]
pub enum NavMove {
    NextSibling,
    PrevSibling,
    Into,
    Out,
    FollowRelationship { index: usize },
    RepeatCue,
    WhereAmI,
}

impl NavMove {
    pub fn allowed_for(self, audience: Audience) -> bool {
        audience == Audience::Expert || !matches!(self, NavMove::FollowRelationship { .. })
    }

    pub fn name(self) -> &'static str {
        match self {
            NavMove::NextSibling => "next_sibling",
            NavMove::PrevSibling => "prev_sibling",
            NavMove::Into => "into",
            NavMove::Out => "out",
            NavMove::FollowRelationship { .. } => "follow_relationship",
            NavMove::RepeatCue => "repeat_cue",
            NavMove::WhereAmI => "where_am_i",
        }
    }
}

/// What a navigation cue sounds like.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "cue", rename_all = "snake_case")]
pub enum CueSpec {
    Element { element: ElementRef },
    /// Cues played back to back, e.g. a relationship then its target.
    Sequence { elements: Vec<ElementRef> },
    /// Reserved click marking the edge of a scope; not a catalogue sound.
    Boundary,
}

impl CueSpec {
    /// Deterministic id of this cue for one diagram and audience.
    pub fn id(&self, model: &ClassModel, audience: Audience) -> String {
        let key = format!(
            "{}|{}|{}",
            model.name,
            audience.as_str(),
            serde_json::to_string(self).expect("cue specs serialize")
        );
        format!("cue-{:016x}", fnv1a64(key.as_bytes()))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NavEvent {
    pub moved: bool,
    pub boundary: bool,
    pub focus: ElementRef,
    pub focus_id: String,
    pub caption: String,
    pub breadcrumb: Vec<String>,
    pub cue: CueSpec,
    pub cue_id: String,
}

#[derive(Debug, thiserror::Error)]
pub enum NavError {
    #[error("model has no elements to focus")]
    EmptyModel,
    #[error("move {0} is not available to novice users")]
    Forbidden(&'static str),
}

/// Focus and visit history of one navigation session.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NavState {
    pub audience: Audience,
    pub focus: ElementRef,
    pub history: Vec<ElementRef>,
}

/// First declared package, else the first classifier, else the first
/// relationship.
pub fn initial_focus(model: &ClassModel) -> Option<ElementRef> {
    if !model.packages.is_empty() {
        return Some(ElementRef::Package { index: 0 });
    }
    if !model.classifiers.is_empty() {
        return Some(ElementRef::Classifier { index: 0 });
    }
    (!model.relationships.is_empty()).then_some(ElementRef::Relationship { index: 0 })
}

impl NavState {
    pub fn new(model: &ClassModel, audience: Audience) -> Result<Self, NavError> {
        let focus = initial_focus(model).ok_or(NavError::EmptyModel)?;
        Ok(Self { audience, focus, history: vec![focus] })
    }

    /// Event describing the current focus without moving.
    pub fn current(&self, model: &ClassModel) -> NavEvent {
        self.event(model, false, false, model.display_name(self.focus), CueSpec::Element { element: self.focus })
    }

    fn event(&self, model: &ClassModel, moved: bool, boundary: bool, caption: String, cue: CueSpec) -> NavEvent {
        NavEvent {
            moved,
            boundary,
            focus: self.focus,
            focus_id: model.element_id(self.focus),
            caption,
            breadcrumb: model.breadcrumb(self.focus),
            cue_id: cue.id(model, self.audience),
            cue,
        }
    }

    fn go(&mut self, model: &ClassModel, to: ElementRef, cue: CueSpec) -> NavEvent {
        self.focus = to;
        self.history.push(to);
        let caption = model.display_name(to);
        self.event(model, true, false, caption, cue)
    }

    fn edge(&self, model: &ClassModel, scope: String) -> NavEvent {
        self.event(model, false, true, format!("edge of {scope}"), CueSpec::Boundary)
    }

    fn scope_name(&self, model: &ClassModel) -> String {
        model.parent(self.focus).map_or_else(|| model.name.clone(), |p| model.display_name(p))
    }

    pub fn navigate(&mut self, model: &ClassModel, mv: NavMove) -> Result<NavEvent, NavError> {
        if !mv.allowed_for(self.audience) {
            return Err(NavError::Forbidden(mv.name()));
        }
        let focus = self.focus;
        Ok(match mv {
            NavMove::NextSibling | NavMove::PrevSibling => {
                let sibs = model.siblings(focus);
                let pos = sibs.iter().position(|&s| s == focus).unwrap_or(0);
                let next = if mv == NavMove::NextSibling { pos.checked_add(1) } else { pos.checked_sub(1) };
                match next.and_then(|i| sibs.get(i)) {
                    Some(&to) => self.go(model, to, CueSpec::Element { element: to }),
                    None => self.edge(model, self.scope_name(model)),
                }
            }
            NavMove::Into => match model.children(focus).first() {
                Some(&to) => self.go(model, to, CueSpec::Element { element: to }),
                None => self.edge(model, model.display_name(focus)),
            },
            NavMove::Out => match model.parent(focus) {
                Some(to) => self.go(model, to, CueSpec::Element { element: to }),
                None => self.edge(model, model.name.clone()),
            },
            NavMove::FollowRelationship { index } => {
                let owner = match focus {
                    ElementRef::Classifier { index } => Some(index),
                    _ => None,
                };
                let target = owner.and_then(|c| {
                    let rel = *model.relationships_of(c).get(index)?;
                    let r = &model.relationships[rel];
                    let other = if r.source == c { r.target } else { r.source };
                    Some((rel, other))
                });
                match target {
                    Some((rel, other)) => {
                        let to = ElementRef::Classifier { index: other };
                        let cue = CueSpec::Sequence { elements: vec![ElementRef::Relationship { index: rel }, to] };
                        let mut ev = self.go(model, to, cue);
                        ev.caption = format!("{}, to {}", model.display_name(ElementRef::Relationship { index: rel }), ev.caption);
                        ev
                    }
                    None => self.edge(model, format!("relationships of {}", model.display_name(focus))),
                }
            }
            NavMove::RepeatCue => self.current(model),
            NavMove::WhereAmI => {
                let mut caption = model.breadcrumb(focus).join(" > ");
                if self.audience == Audience::Expert {
                    let sibs = model.siblings(focus);
                    let pos = sibs.iter().position(|&s| s == focus).unwrap_or(0);
                    caption += &format!(
                        "; item {} of {}; {} children",
                        pos + 1,
                        sibs.len(),
                        model.children(focus).len()
                    );
                    if let ElementRef::Classifier { index } = focus {
                        caption += &format!("; {} relationships", model.relationships_of(index).len());
                    }
                }
                self.event(model, false, false, caption, CueSpec::Element { element: focus })
            }
        })
    }
}

/// Short low click reserved for boundary events.
pub fn boundary_click(sample_rate: u32) -> AudioBuffer {
    let sr = f64::from(sample_rate);
    let n = frames_for(0.06, sample_rate);
    let x: Vec<f64> = (0..n)
        .map(|i| {
            let t = i as f64 / sr;
            0.5 * (-t / 0.012).exp() * (std::f64::consts::TAU * 110.0 * t).sin()
        })
        .collect();
    AudioBuffer::stereo(sample_rate, x.clone(), x).expect("click buffers are well formed")
}

/// Renders the audio of a navigation cue.
pub fn render_nav_cue(
    model: &ClassModel,
    cat: &SoundCatalogue,
    profile: &RenderProfile,
    cue: &CueSpec,
) -> Result<AudioBuffer, SonifierError> {
    match cue {
        CueSpec::Boundary => Ok(boundary_click(RENDER_SAMPLE_RATE)),
        CueSpec::Element { element } => Ok(element_cue(model, *element, cat, profile)?.0),
        CueSpec::Sequence { elements } => {
            let gap = frames_for(FOLLOW_GAP_S, RENDER_SAMPLE_RATE);
            let mut placed = Vec::new();
            let mut cursor = 0usize;
            for &e in elements {
                let (audio, _) = element_cue(model, e, cat, profile)?;
                let len = audio.len();
                placed.push((audio, cursor as f64 / f64::from(RENDER_SAMPLE_RATE)));
                cursor += len + gap;
            }
            mix_raw(&placed).map_err(|e| SonifierError::InvalidArgument(e.to_string()))
        }
    }
}
