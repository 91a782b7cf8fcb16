use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Audience {
    Novice,
    #[default]
    Expert,
}

impl Audience {
    pub fn as_str(self) -> &'static str {
        match self {
            Audience::Novice => "novice",
            Audience::Expert => "expert",
        }
    }
}

impl std::str::FromStr for Audience {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "novice" => Ok(Audience::Novice),
            "expert" => Ok(Audience::Expert),
            other => Err(format!("unknown audience \"{other}\" (expected novice or expert)")),
        }
    }
}

/// How a model is rendered to sound.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RenderProfile {
    pub audience: Audience,
    /// Audience levels this profile family offers.
    pub audiences: Vec<Audience>,
    pub motif_enabled: bool,
    pub captions_enabled: bool,
    /// Shell command template; `{text}` is replaced by the quoted caption
    /// and the command must print a WAV stream on standard output.
    pub tts_hook: Option<String>,
    pub pan_from_x: bool,
    pub reverb_from_depth: bool,
    pub inter_cue_gap_s: f64,
    /// Allowed deviation of each cue's RMS from the mean, in dB.
    pub loudness_window_db: f64,
}

impl Default for RenderProfile {
    fn default() -> Self {
        Self {
            audience: Audience::Expert,
            audiences: vec![Audience::Novice, Audience::Expert],
            motif_enabled: true,
            captions_enabled: true,
            tts_hook: None,
            pan_from_x: true,
            reverb_from_depth: true,
            inter_cue_gap_s: 0.35,
            loudness_window_db: 1.0,
        }
    }
}

impl RenderProfile {
    pub fn for_audience(audience: Audience) -> Self {
        Self { audience, ..Self::default() }
    }

    pub fn validate(&self) -> Result<(), String> {
        if !(self.inter_cue_gap_s >= 0.0 && self.inter_cue_gap_s.is_finite()) {
            return Err("inter_cue_gap_s must be non-negative".into());
        }
        if !(self.loudness_window_db > 0.0 && self.loudness_window_db.is_finite()) {
            return Err("loudness_window_db must be positive".into());
        }
        Ok(())
    }
}
