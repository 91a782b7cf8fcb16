//! Walkthrough planning and rendering, spatial mapping, motifs and
//! single-element cues.

mod profile;
mod render;
mod spatial;

pub use profile::{Audience, RenderProfile};
pub use render::{
    caption_for, concept_of, element_cue, event_vars, plan_walkthrough, render_timeline, CaptionCue, CaptionTrack,
    EventSubject, RenderedWalkthrough, SonicTimeline, TimelineEvent, CUE_PEAK_DB, CUE_RMS_DB, MOTIF_CONCEPT,
};
pub use spatial::{diagram_motif, fnv1a64, motif_notes, spatialize, LOUDNESS_TILT_DB, PENTATONIC_HZ};

use crate::catalogue::CatalogueError;

#[derive(Debug, thiserror::Error)]
pub enum SonifierError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("concept \"{0}\" is used by the model but not bound in the catalogue")]
    UnboundConcept(String),
    #[error("element not found: {0}")]
    NotFound(String),
    #[error("event {index}: {source}")]
    Event {
        index: usize,
        #[source]
        source: CatalogueError,
    },
    #[error(transparent)]
    Catalogue(#[from] CatalogueError),
}
