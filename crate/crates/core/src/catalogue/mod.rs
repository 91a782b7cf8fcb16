//! Sound catalogues: concept-to-earcon bindings, the JSON manifest format,
//! earcon realization and the two built-in catalogues.

mod builtin;
mod manifest;
mod realize;

use std::collections::BTreeMap;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::audio::{AudioError, AuditoryVariables, SynthSpec};

pub use builtin::{builtin_baseline, builtin_proposed, uml_concepts};
pub use manifest::{load_manifest, parse_manifest, serialize_manifest};
pub use realize::{asset_audio, realize_binding, realize_earcon, Realization, MAX_EARCON_S, RENDER_SAMPLE_RATE};

/// The eleven UML class-diagram element kinds used as concept ids.
pub const UML_CONCEPT_IDS: [&str; 11] = [
    "Class",
    "Attribute",
    "Operation",
    "Association",
    "Inheritance",
    "Realization",
    "Dependency",
    "Aggregation",
    "Composition",
    "AssociationClass",
    "Package",
];

#[derive(Debug, thiserror::Error)]
pub enum CatalogueError {
    #[error("manifest line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("unknown asset \"{0}\"")]
    UnknownAsset(String),
    #[error("no binding for concept \"{0}\"")]
    Unbound(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("asset \"{asset}\": {source}")]
    Asset {
        asset: String,
        #[source]
        source: AudioError,
    },
    #[error(transparent)]
    Audio(#[from] AudioError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Concept {
    pub id: String,
    #[serde(default)]
    pub description: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AssetSource {
    Synth(SynthSpec),
    /// WAV file, relative paths resolve against the manifest directory.
    File(PathBuf),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SoundAsset {
    pub id: String,
    pub source: AssetSource,
    pub nominal_duration_s: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SignMode {
    Icon,
    Index,
    Symbol,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RecipeMode {
    /// Components back to back.
    #[default]
    Sequence,
    /// All components start together.
    Overlay,
    /// Each component starts at its own `start_offset_s`.
    Mixed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Component {
    pub asset: String,
    #[serde(default)]
    pub vars: AuditoryVariables,
}

impl Component {
    pub fn plain(asset: &str) -> Self {
        Self { asset: asset.to_string(), vars: AuditoryVariables::default() }
    }

    pub fn with_vars(asset: &str, vars: AuditoryVariables) -> Self {
        Self { asset: asset.to_string(), vars }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EarconRecipe {
    pub components: Vec<Component>,
    #[serde(default)]
    pub caption: String,
    #[serde(default)]
    pub mode: RecipeMode,
}

impl EarconRecipe {
    /// Normalized identity of the recipe: mode plus asset ids and variables
    /// rounded to three decimals. Equal signatures sound identical.
    pub fn signature(&self) -> String {
        let mode = match self.mode {
            RecipeMode::Sequence => "seq",
            RecipeMode::Overlay => "ovl",
            RecipeMode::Mixed => "mix",
        };
        let parts: Vec<String> = self
            .components
            .iter()
            .map(|c| {
                let v = &c.vars;
                format!(
                    "{}[{:.3},{:.3},{:.3},{:.3},{:.3},{:.3},{},{:.3}]",
                    c.asset,
                    v.loudness_db,
                    v.pitch_semitones,
                    v.pan,
                    v.duration_scale,
                    v.attack_s,
                    v.decay_s,
                    v.reverb_depth,
                    if self.mode == RecipeMode::Mixed { v.start_offset_s } else { 0.0 }
                )
            })
            .collect();
        format!("{mode}:{}", parts.join("+"))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConceptBinding {
    pub concept: String,
    pub recipe: EarconRecipe,
    pub sign_mode: SignMode,
    #[serde(default)]
    pub rationale: String,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub metadata: BTreeMap<String, serde_json::Value>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SoundCatalogue {
    pub name: String,
    pub version: String,
    pub concepts: Vec<Concept>,
    pub assets: Vec<SoundAsset>,
    pub bindings: Vec<ConceptBinding>,
    /// Directory that relative asset paths resolve against.
    #[serde(skip)]
    pub base_dir: Option<PathBuf>,
}

impl SoundCatalogue {
    pub fn asset(&self, id: &str) -> Option<&SoundAsset> {
        self.assets.iter().find(|a| a.id == id)
    }

    /// First binding for `concept`.
    pub fn binding(&self, concept: &str) -> Option<&ConceptBinding> {
        self.bindings.iter().find(|b| b.concept == concept)
    }

    pub fn declares(&self, concept: &str) -> bool {
        self.concepts.iter().any(|c| c.id == concept)
    }
}
