use crate::audio::{
    apply_variables, frames_for, mix_raw, normalize, read_wav, resample_by_rate, synth, AudioBuffer, AudioError,
    AuditoryVariables, REVERB_TAIL_S,
};

use super::{AssetSource, CatalogueError, EarconRecipe, RecipeMode, SoundCatalogue};

pub const RENDER_SAMPLE_RATE: u32 = 44_100;
/// Longest acceptable earcon, inclusive.
pub const MAX_EARCON_S: f64 = 3.0;
const EARCON_PEAK_DB: f64 = -3.0;

#[derive(Debug, Clone, PartialEq)]
pub struct Realization {
    pub audio: AudioBuffer,
    pub duration_s: f64,
    /// Set when `duration_s` exceeds [`MAX_EARCON_S`].
    pub over_limit: bool,
}

/// Raw audio of one asset at [`RENDER_SAMPLE_RATE`].
pub fn asset_audio(cat: &SoundCatalogue, id: &str) -> Result<AudioBuffer, CatalogueError> {
    let asset = cat.asset(id).ok_or_else(|| CatalogueError::UnknownAsset(id.to_string()))?;
    let wrap = |source: AudioError| CatalogueError::Asset { asset: id.to_string(), source };
    match &asset.source {
        AssetSource::Synth(spec) => synth(spec, asset.nominal_duration_s, RENDER_SAMPLE_RATE).map_err(wrap),
        AssetSource::File(path) => {
            let full = match &cat.base_dir {
                Some(dir) if path.is_relative() => dir.join(path),
                _ => path.clone(),
            };
            let buf = read_wav(&full).map_err(|e| match e {
                AudioError::Io(source) => CatalogueError::Io { path: full.clone(), source },
                other => wrap(other),
            })?;
            if buf.sample_rate() == RENDER_SAMPLE_RATE {
                return Ok(buf);
            }
            let rate = f64::from(buf.sample_rate()) / f64::from(RENDER_SAMPLE_RATE);
            AudioBuffer::mono(RENDER_SAMPLE_RATE, resample_by_rate(&buf.downmix(), rate)).map_err(wrap)
        }
    }
}

/// Renders `recipe` with `extra` layered onto every component, mixes the
/// components by the recipe mode and normalizes to -3 dBFS peak.
///
/// Overlong results are returned with `over_limit` set rather than as errors.
pub fn realize_earcon(
    recipe: &EarconRecipe,
    cat: &SoundCatalogue,
    extra: &AuditoryVariables,
) -> Result<Realization, CatalogueError> {
    let mut placed = Vec::with_capacity(recipe.components.len());
    let mut cursor = 0usize;
    for comp in &recipe.components {
        let raw = asset_audio(cat, &comp.asset)?;
        let vars = comp.vars.compose(extra);
        let buf = apply_variables(&raw, &vars)?;
        let start = match recipe.mode {
            RecipeMode::Sequence => cursor,
            RecipeMode::Overlay => 0,
            RecipeMode::Mixed => frames_for(comp.vars.start_offset_s, RENDER_SAMPLE_RATE),
        };
        // Reverb tails ring over the next component instead of delaying it.
        let tail = if vars.reverb_depth > 0 { frames_for(REVERB_TAIL_S, RENDER_SAMPLE_RATE) } else { 0 };
        cursor = start + buf.len().saturating_sub(tail);
        placed.push((buf, start as f64 / f64::from(RENDER_SAMPLE_RATE)));
    }
    if placed.is_empty() {
        return Err(AudioError::InvalidArgument("recipe has no components".into()).into());
    }
    let audio = normalize(&mix_raw(&placed)?, EARCON_PEAK_DB)?;
    let duration_s = audio.duration_s();
    Ok(Realization { audio, duration_s, over_limit: duration_s > MAX_EARCON_S + 1e-9 })
}

/// Realizes the first binding of `concept`.
pub fn realize_binding(
    cat: &SoundCatalogue,
    concept: &str,
    extra: &AuditoryVariables,
) -> Result<Realization, CatalogueError> {
    let binding = cat.binding(concept).ok_or_else(|| CatalogueError::Unbound(concept.to_string()))?;
    realize_earcon(&binding.recipe, cat, extra)
}
