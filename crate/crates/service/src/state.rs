use std::collections::HashMap;
use std::sync::Arc;
use std::time::{Duration, Instant};

use parking_lot::{Mutex, RwLock};
use sonoform_core::audio::encode_wav;
use sonoform_core::catalogue::SoundCatalogue;
use sonoform_core::nav::{render_nav_cue, CueSpec, NavState};
use sonoform_core::sonifier::{
    concept_of, plan_walkthrough, render_timeline, Audience, RenderProfile, SonifierError,
};
use sonoform_core::uml::ClassModel;
use tokio::sync::OnceCell;
use uuid::Uuid;

use crate::ApiError;

#[derive(Debug, Clone)]
pub struct ServiceConfig {
    pub idle_timeout: Duration,
    pub sweep_interval: Duration,
    /// Profile template; the audience is set per session.
    pub profile: RenderProfile,
}

impl Default for ServiceConfig {
    fn default() -> Self {
        Self {
            idle_timeout: Duration::from_secs(30 * 60),
            sweep_interval: Duration::from_secs(60),
            profile: RenderProfile::default(),
        }
    }
}

pub(crate) struct Session {
    pub nav: NavState,
    pub last_seen: Instant,
}

pub(crate) struct Walkthrough {
    pub wav: Vec<u8>,
    pub vtt: String,
}

/// Shared service state. The model and catalogue are immutable; sessions
/// are single-writer behind their own lock.
pub struct AppState {
    pub model: Arc<ClassModel>,
    pub catalogue: Arc<SoundCatalogue>,
    pub config: ServiceConfig,
    pub(crate) sessions: RwLock<HashMap<Uuid, Arc<tokio::sync::Mutex<Session>>>>,
    /// Cue id to what it renders and for whom.
    pub(crate) cue_specs: RwLock<HashMap<String, (CueSpec, Audience)>>,
    pub(crate) cue_audio: RwLock<HashMap<String, Arc<Vec<u8>>>>,
    pub(crate) walkthroughs: [OnceCell<Arc<Walkthrough>>; 2],
    render_lock: Mutex<()>,
}

impl AppState {
    pub fn new(model: ClassModel, catalogue: SoundCatalogue, config: ServiceConfig) -> Arc<Self> {
        Arc::new(Self {
            model: Arc::new(model),
            catalogue: Arc::new(catalogue),
            config,
            sessions: RwLock::new(HashMap::new()),
            cue_specs: RwLock::new(HashMap::new()),
            cue_audio: RwLock::new(HashMap::new()),
            walkthroughs: [OnceCell::new(), OnceCell::new()],
            render_lock: Mutex::new(()),
        })
    }

    pub fn profile(&self, audience: Audience) -> RenderProfile {
        RenderProfile { audience, ..self.config.profile.clone() }
    }

    /// First model concept without a binding, if any.
    pub fn unbound_concept(&self) -> Option<&'static str> {
        self.model.elements().into_iter().map(|e| concept_of(&self.model, e)).find(|c| self.catalogue.binding(c).is_none())
    }

    pub fn session_count(&self) -> usize {
        self.sessions.read().len()
    }

    pub(crate) fn remember_cue(&self, id: &str, spec: &CueSpec, audience: Audience) {
        if !self.cue_specs.read().contains_key(id) {
            self.cue_specs.write().entry(id.to_string()).or_insert_with(|| (spec.clone(), audience));
        }
    }

    /// WAV bytes of a cue, rendered on first request.
    pub(crate) async fn cue_wav(self: &Arc<Self>, id: &str) -> Result<Arc<Vec<u8>>, ApiError> {
        if let Some(bytes) = self.cue_audio.read().get(id) {
            return Ok(bytes.clone());
        }
        let (spec, audience) =
            self.cue_specs.read().get(id).cloned().ok_or_else(|| ApiError::NotFound(format!("unknown cue {id}")))?;
        let state = self.clone();
        let bytes = tokio::task::spawn_blocking(move || {
            let profile = state.profile(audience);
            render_nav_cue(&state.model, &state.catalogue, &profile, &spec).map(|b| Arc::new(encode_wav(&b)))
        })
        .await
        .map_err(|e| ApiError::Internal(e.to_string()))?
        .map_err(sonifier_error)?;
        Ok(self.cue_audio.write().entry(id.to_string()).or_insert(bytes).clone())
    }

    pub(crate) async fn walkthrough(self: &Arc<Self>, audience: Audience) -> Result<Arc<Walkthrough>, ApiError> {
        let slot = &self.walkthroughs[usize::from(audience == Audience::Expert)];
        slot.get_or_try_init(|| async {
            let state = self.clone();
            tokio::task::spawn_blocking(move || {
                // One full render at a time keeps memory bounded.
                let _guard = state.render_lock.lock();
                let profile = state.profile(audience);
                let timeline = plan_walkthrough(&state.model, &state.catalogue, &profile)?;
                let out = render_timeline(&timeline, &state.catalogue, &profile)?;
                Ok::<_, SonifierError>(Arc::new(Walkthrough { wav: encode_wav(&out.audio), vtt: out.captions.to_webvtt() }))
            })
            .await
            .map_err(|e| ApiError::Internal(e.to_string()))?
            .map_err(sonifier_error)
        })
        .await
        .cloned()
    }

    /// Drops sessions idle for longer than the configured timeout.
    pub fn sweep(&self) -> usize {
        let timeout = self.config.idle_timeout;
        let mut sessions = self.sessions.write();
        let before = sessions.len();
        sessions.retain(|_, s| s.try_lock().map_or(true, |s| s.last_seen.elapsed() < timeout));
        before - sessions.len()
    }
}

pub(crate) fn sonifier_error(e: SonifierError) -> ApiError {
    match e {
        SonifierError::UnboundConcept(_) => ApiError::Conflict(e.to_string()),
        SonifierError::NotFound(_) => ApiError::NotFound(e.to_string()),
        other => ApiError::Internal(other.to_string()),
    }
}

pub(crate) fn spawn_reaper(state: Arc<AppState>) -> tokio::task::JoinHandle<()> {
    tokio::spawn(async move {
        let mut tick = tokio::time::interval(state.config.sweep_interval);
        loop {
            tick.tick().await;
            let dropped = state.sweep();
            if dropped > 0 {
                tracing::info!(dropped, "expired idle sessions");
            }
        }
    })
}
