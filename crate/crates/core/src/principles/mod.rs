//! Linter for the nine auditory-notation principles.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::acoustics::{matrix_from_features, extract_features, DiscriminabilityMatrix};
use crate::audio::AuditoryVariables;
use crate::catalogue::{realize_earcon, Realization, SoundCatalogue};
use crate::sonifier::RenderProfile;
use crate::stats::StudyReport;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum PrincipleId {
    SemioticClarity,
    PerceptualDiscriminability,
    SemanticTransparency,
    ComplexityManagement,
    CognitiveIntegration,
    AuditoryExpressiveness,
    DualCoding,
    AuditoryEconomy,
    CognitiveFit,
}

impl PrincipleId {
    pub const ALL: [PrincipleId; 9] = [
        PrincipleId::SemioticClarity,
        PrincipleId::PerceptualDiscriminability,
        PrincipleId::SemanticTransparency,
        PrincipleId::ComplexityManagement,
        PrincipleId::CognitiveIntegration,
        PrincipleId::AuditoryExpressiveness,
        PrincipleId::DualCoding,
        PrincipleId::AuditoryEconomy,
        PrincipleId::CognitiveFit,
    ];

    pub fn title(self) -> &'static str {
        match self {
            PrincipleId::SemioticClarity => "Semiotic Clarity",
            PrincipleId::PerceptualDiscriminability => "Perceptual Discriminability",
            PrincipleId::SemanticTransparency => "Semantic Transparency",
            PrincipleId::ComplexityManagement => "Complexity Management",
            PrincipleId::CognitiveIntegration => "Cognitive Integration",
            PrincipleId::AuditoryExpressiveness => "Auditory Expressiveness",
            PrincipleId::DualCoding => "Dual Coding",
            PrincipleId::AuditoryEconomy => "Auditory Economy",
            PrincipleId::CognitiveFit => "Cognitive Fit",
        }
    }
}

impl fmt::Display for PrincipleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.title())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Severity {
    Info,
    Warning,
    Error,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub principle: PrincipleId,
    pub severity: Severity,
    /// Machine-readable name of the failed rule, e.g. `overload`.
    pub rule: String,
    /// Sorted concept or asset ids.
    pub subjects: Vec<String>,
    pub detail: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub measured: Option<f64>,
    /// Annotation carried over from binding metadata (`lint_note`).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl Violation {
    fn new(principle: PrincipleId, severity: Severity, rule: &str, subjects: Vec<String>, detail: String) -> Self {
        let mut subjects = subjects;
        subjects.sort();
        subjects.dedup();
        Self { principle, severity, rule: rule.to_string(), subjects, detail, measured: None, note: None }
    }

    fn measured(mut self, value: f64) -> Self {
        self.measured = Some(value);
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Unchecked {
    pub principle: PrincipleId,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscriminabilityReport {
    /// Concept of each matrix row, in binding order.
    pub concepts: Vec<String>,
    pub distances: Vec<Vec<f64>>,
    pub threshold: f64,
    pub dropped_dimensions: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub catalogue: String,
    pub version: String,
    pub checked: Vec<PrincipleId>,
    pub unchecked: Vec<Unchecked>,
    pub violations: Vec<Violation>,
    pub discriminability: Option<DiscriminabilityReport>,
}

impl ValidationReport {
    pub fn error_count(&self) -> usize {
        self.violations.iter().filter(|v| v.severity == Severity::Error).count()
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("Catalogue {} (version {})\n", self.catalogue, self.version);
        let checked: Vec<&str> = self.checked.iter().map(|p| p.title()).collect();
        out += &format!("Checked: {}\n", checked.join(", "));
        for u in &self.unchecked {
            out += &format!("Unchecked: {} ({})\n", u.principle, u.reason);
        }
        if let Some(d) = &self.discriminability {
            out += &format!("Discriminability threshold: {} (z-space distance)\n", d.threshold);
            if !d.dropped_dimensions.is_empty() {
                out += &format!("Constant feature dimensions dropped: {}\n", d.dropped_dimensions.join(", "));
            }
        }
        if self.violations.is_empty() {
            out += "No violations.\n";
        }
        for v in &self.violations {
            let sev = match v.severity {
                Severity::Error => "error",
                Severity::Warning => "warning",
                Severity::Info => "info",
            };
            out += &format!("[{sev}] {} / {}: ", v.principle, v.rule);
            if !v.subjects.is_empty() {
                out += &format!("{{{}}} ", v.subjects.join(", "));
            }
            out += &v.detail;
            if let Some(m) = v.measured {
                out += &format!(" (measured {m:.3})");
            }
            if let Some(n) = &v.note {
                out += &format!(" [{n}]");
            }
            out.push('\n');
        }
        out += &format!("{} error(s)\n", self.error_count());
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LintConfig {
    pub discriminability_threshold: f64,
    pub max_earcons: usize,
    pub max_components_per_earcon: usize,
    pub max_earcon_s: f64,
    pub transparency_majority: f64,
}

impl Default for LintConfig {
    fn default() -> Self {
        Self {
            discriminability_threshold: 1.0,
            max_earcons: 12,
            max_components_per_earcon: 4,
            max_earcon_s: 3.0,
            transparency_majority: 0.5,
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum PrinciplesError {
    #[error("evidence mentions concepts not bound in the catalogue: {0:?}")]
    EvidenceMismatch(Vec<String>),
    #[error("binding {index} ({concept}) cannot be realized: {message}")]
    Realization { index: usize, concept: String, message: String },
}

fn note_of(cat: &SoundCatalogue, concepts: &[&str]) -> Option<String> {
    let notes: BTreeSet<&str> = cat
        .bindings
        .iter()
        .filter(|b| concepts.contains(&b.concept.as_str()))
        .filter_map(|b| b.metadata.get("lint_note").and_then(|v| v.as_str()))
        .collect();
    (!notes.is_empty()).then(|| notes.into_iter().collect::<Vec<_>>().join("; "))
}

/// Overload, redundancy, deficit and excess over recipe signatures.
pub fn check_semiotic_clarity(cat: &SoundCatalogue) -> Vec<Violation> {
    let mut out = Vec::new();
    let mut by_signature: BTreeMap<String, BTreeSet<&str>> = BTreeMap::new();
    for b in &cat.bindings {
        by_signature.entry(b.recipe.signature()).or_default().insert(&b.concept);
    }
    for concepts in by_signature.values().filter(|c| c.len() >= 2) {
        let subjects: Vec<String> = concepts.iter().map(|c| c.to_string()).collect();
        out.push(Violation::new(
            PrincipleId::SemioticClarity,
            Severity::Error,
            "overload",
            subjects.clone(),
            format!("one sound is bound to {} concepts", subjects.len()),
        ));
    }

    let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
    for b in &cat.bindings {
        *counts.entry(&b.concept).or_default() += 1;
    }
    for (concept, n) in counts.iter().filter(|(_, n)| **n >= 2) {
        out.push(
            Violation::new(
                PrincipleId::SemioticClarity,
                Severity::Error,
                "redundancy",
                vec![concept.to_string()],
                format!("concept is bound {n} times"),
            )
            .measured(*n as f64),
        );
    }
    for c in cat.concepts.iter().filter(|c| !counts.contains_key(c.id.as_str())) {
        out.push(Violation::new(
            PrincipleId::SemioticClarity,
            Severity::Error,
            "deficit",
            vec![c.id.clone()],
            "declared concept has no sound".into(),
        ));
    }
    for concept in counts.keys().filter(|c| !cat.declares(c)) {
        out.push(Violation::new(
            PrincipleId::SemioticClarity,
            Severity::Error,
            "excess",
            vec![concept.to_string()],
            "sound is bound to an undeclared concept".into(),
        ));
    }
    out
}

/// Realizes every binding with neutral extras.
pub fn realize_all(cat: &SoundCatalogue) -> Result<Vec<Realization>, PrinciplesError> {
    cat.bindings
        .iter()
        .enumerate()
        .map(|(index, b)| {
            realize_earcon(&b.recipe, cat, &AuditoryVariables::default()).map_err(|e| {
                PrinciplesError::Realization { index, concept: b.concept.clone(), message: e.to_string() }
            })
        })
        .collect()
}

fn matrix_of(realized: &[Realization]) -> Result<DiscriminabilityMatrix, PrinciplesError> {
    let features = realized
        .iter()
        .enumerate()
        .map(|(index, r)| {
            extract_features(&r.audio).map_err(|e| PrinciplesError::Realization {
                index,
                concept: String::new(),
                message: e.to_string(),
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(matrix_from_features(features))
}

/// Pairs of differently-bound concepts whose earcons sit closer than the
/// threshold. Returns the findings plus the matrix they were read from.
pub fn check_discriminability(
    cat: &SoundCatalogue,
    config: &LintConfig,
) -> Result<(Vec<Violation>, DiscriminabilityReport), PrinciplesError> {
    let realized = realize_all(cat)?;
    discriminability_from(cat, config, &realized)
}

fn discriminability_from(
    cat: &SoundCatalogue,
    config: &LintConfig,
    realized: &[Realization],
) -> Result<(Vec<Violation>, DiscriminabilityReport), PrinciplesError> {
    let report = DiscriminabilityReport {
        concepts: cat.bindings.iter().map(|b| b.concept.clone()).collect(),
        distances: Vec::new(),
        threshold: config.discriminability_threshold,
        dropped_dimensions: Vec::new(),
    };
    if realized.len() < 2 {
        return Ok((Vec::new(), report));
    }
    let m = matrix_of(realized)?;
    let report = DiscriminabilityReport { distances: m.distances.clone(), dropped_dimensions: m.dropped_dimensions.clone(), ..report };
    let mut out = Vec::new();
    for (i, j, d) in close_pairs(cat, &m, config.discriminability_threshold) {
        let (a, b) = (&cat.bindings[i].concept, &cat.bindings[j].concept);
        let mut v = Violation::new(
            PrincipleId::PerceptualDiscriminability,
            Severity::Error,
            "below_threshold",
            vec![a.clone(), b.clone()],
            format!("earcons are {d:.3} apart, threshold {}", config.discriminability_threshold),
        )
        .measured(d);
        v.note = note_of(cat, &[a, b]);
        out.push(v);
    }
    Ok((out, report))
}

/// Binding pairs with distinct concepts and distance below `tau`.
fn close_pairs(cat: &SoundCatalogue, m: &DiscriminabilityMatrix, tau: f64) -> Vec<(usize, usize, f64)> {
    let n = m.len();
    let mut out = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if cat.bindings[i].concept != cat.bindings[j].concept && m.get(i, j) < tau {
                out.push((i, j, m.get(i, j)));
            }
        }
    }
    out
}

/// Distinct recipes that nevertheless sound alike: a clarity overload the
/// signature comparison cannot see.
fn perceptual_overload(cat: &SoundCatalogue, m: &DiscriminabilityMatrix, tau: f64) -> Vec<Violation> {
    close_pairs(cat, m, tau)
        .into_iter()
        .filter(|(i, j, _)| cat.bindings[*i].recipe.signature() != cat.bindings[*j].recipe.signature())
        .map(|(i, j, d)| {
            let (a, b) = (&cat.bindings[i].concept, &cat.bindings[j].concept);
            let mut v = Violation::new(
                PrincipleId::SemioticClarity,
                Severity::Error,
                "perceptual_overload",
                vec![a.clone(), b.clone()],
                "two different sounds are heard as one symbol".into(),
            )
            .measured(d);
            v.note = note_of(cat, &[a, b]);
            v
        })
        .collect()
}

pub fn check_economy(cat: &SoundCatalogue, config: &LintConfig) -> Vec<Violation> {
    let mut out = Vec::new();
    let distinct: BTreeSet<String> = cat.bindings.iter().map(|b| b.recipe.signature()).collect();
    if distinct.len() > config.max_earcons {
        out.push(
            Violation::new(
                PrincipleId::AuditoryEconomy,
                Severity::Error,
                "too_many_earcons",
                cat.bindings.iter().map(|b| b.concept.clone()).collect(),
                format!("{} distinct earcons, limit {}", distinct.len(), config.max_earcons),
            )
            .measured(distinct.len() as f64),
        );
    }
    for b in cat.bindings.iter().filter(|b| b.recipe.components.len() > config.max_components_per_earcon) {
        out.push(
            Violation::new(
                PrincipleId::AuditoryEconomy,
                Severity::Error,
                "too_many_components",
                vec![b.concept.clone()],
                format!("{} components, limit {}", b.recipe.components.len(), config.max_components_per_earcon),
            )
            .measured(b.recipe.components.len() as f64),
        );
    }
    out
}

pub fn check_duration(cat: &SoundCatalogue, config: &LintConfig) -> Result<Vec<Violation>, PrinciplesError> {
    Ok(duration_from(cat, config, &realize_all(cat)?))
}

fn duration_from(cat: &SoundCatalogue, config: &LintConfig, realized: &[Realization]) -> Vec<Violation> {
    cat.bindings
        .iter()
        .zip(realized)
        .filter(|(_, r)| r.duration_s > config.max_earcon_s + 1e-9)
        .map(|(b, r)| {
            Violation::new(
                PrincipleId::AuditoryEconomy,
                Severity::Error,
                "too_long",
                vec![b.concept.clone()],
                format!("earcon lasts {:.3} s, limit {} s", r.duration_s, config.max_earcon_s),
            )
            .measured(r.duration_s)
        })
        .collect()
}

pub fn check_dual_coding(cat: &SoundCatalogue) -> Vec<Violation> {
    cat.bindings
        .iter()
        .filter(|b| b.recipe.caption.trim().is_empty())
        .map(|b| {
            Violation::new(
                PrincipleId::DualCoding,
                Severity::Warning,
                "missing_caption",
                vec![b.concept.clone()],
                "earcon has no caption for the text channel".into(),
            )
        })
        .collect()
}

/// Flags concepts whose proposed sound was preferred by fewer than
/// `transparency_majority` of respondents.
pub fn check_semantic_transparency(
    cat: &SoundCatalogue,
    evidence: &StudyReport,
    config: &LintConfig,
) -> Result<Vec<Violation>, PrinciplesError> {
    let fractions = evidence.transparency_evidence();
    let unknown: Vec<String> =
        fractions.iter().filter(|(c, _)| cat.binding(c).is_none()).map(|(c, _)| c.clone()).collect();
    if !unknown.is_empty() {
        return Err(PrinciplesError::EvidenceMismatch(unknown));
    }
    Ok(fractions
        .into_iter()
        .filter(|(_, f)| *f < config.transparency_majority)
        .map(|(concept, f)| {
            Violation::new(
                PrincipleId::SemanticTransparency,
                Severity::Warning,
                "low_preference",
                vec![concept],
                format!(
                    "{:.2}% of respondents preferred this sound, below {:.0}%",
                    f * 100.0,
                    config.transparency_majority * 100.0
                ),
            )
            .measured(f)
        })
        .collect())
}

pub fn check_profile_principles(profile: &RenderProfile) -> Vec<Violation> {
    let mut out = Vec::new();
    let info = |p, rule: &str, detail: &str| Violation::new(p, Severity::Info, rule, vec![], detail.to_string());
    if !profile.reverb_from_depth {
        out.push(info(
            PrincipleId::ComplexityManagement,
            "no_depth_reverb",
            "package depth is not mapped to reverberation",
        ));
    }
    if !profile.motif_enabled {
        out.push(info(PrincipleId::CognitiveIntegration, "no_motif", "walkthroughs do not open with a diagram motif"));
    }
    if !profile.captions_enabled {
        out.push(info(PrincipleId::CognitiveIntegration, "no_captions", "walkthroughs carry no captions"));
    }
    let levels: BTreeSet<_> = profile.audiences.iter().collect();
    if levels.len() < 2 {
        out.push(
            info(PrincipleId::CognitiveFit, "single_audience", "only one audience level is defined")
                .measured(levels.len() as f64),
        );
    }
    out
}

/// Names of the auditory variables the catalogue actually varies. Timbre
/// counts once any asset is used.
pub fn exercised_variables(cat: &SoundCatalogue) -> Vec<&'static str> {
    let mut used = BTreeSet::new();
    if !cat.bindings.is_empty() {
        used.insert("timbre");
    }
    let neutral = AuditoryVariables::default();
    for b in &cat.bindings {
        if b.recipe.components.len() > 1 && b.recipe.mode != crate::catalogue::RecipeMode::Overlay {
            used.insert("rhythm");
        }
        for c in &b.recipe.components {
            let v = &c.vars;
            if v.loudness_db != neutral.loudness_db {
                used.insert("loudness");
            }
            if v.pitch_semitones != neutral.pitch_semitones {
                used.insert("pitch");
            }
            if v.pan != neutral.pan {
                used.insert("pan");
            }
            if v.duration_scale != neutral.duration_scale {
                used.insert("duration");
            }
            if v.attack_s != neutral.attack_s || v.decay_s != neutral.decay_s {
                used.insert("envelope");
            }
            if v.reverb_depth != neutral.reverb_depth {
                used.insert("reverb");
            }
        }
    }
    used.into_iter().collect()
}

fn check_expressiveness(cat: &SoundCatalogue) -> Violation {
    let used = exercised_variables(cat);
    Violation::new(
        PrincipleId::AuditoryExpressiveness,
        Severity::Info,
        "variables_used",
        vec![],
        format!("auditory variables exercised: {}", used.join(", ")),
    )
    .measured(used.len() as f64)
}

/// Runs every check. Checks that cannot run are listed as unchecked with a
/// reason; the report always accounts for all nine principles.
pub fn validate(
    cat: &SoundCatalogue,
    config: &LintConfig,
    evidence: Option<&StudyReport>,
    profile: Option<&RenderProfile>,
) -> ValidationReport {
    let mut violations = check_semiotic_clarity(cat);
    let mut checked = BTreeSet::from([
        PrincipleId::SemioticClarity,
        PrincipleId::AuditoryEconomy,
        PrincipleId::DualCoding,
        PrincipleId::AuditoryExpressiveness,
    ]);
    let mut unchecked = Vec::new();
    let mut discriminability = None;

    violations.extend(check_economy(cat, config));
    violations.extend(check_dual_coding(cat));
    violations.push(check_expressiveness(cat));

    match realize_all(cat) {
        Ok(realized) => {
            violations.extend(duration_from(cat, config, &realized));
            match discriminability_from(cat, config, &realized) {
                Ok((found, report)) => {
                    violations.extend(found);
                    if realized.len() >= 2 {
                        let m = DiscriminabilityMatrix {
                            distances: report.distances.clone(),
                            dropped_dimensions: report.dropped_dimensions.clone(),
                            features: Vec::new(),
                        };
                        violations.extend(perceptual_overload(cat, &m, config.discriminability_threshold));
                    }
                    discriminability = Some(report);
                    checked.insert(PrincipleId::PerceptualDiscriminability);
                }
                Err(e) => unchecked.push(Unchecked {
                    principle: PrincipleId::PerceptualDiscriminability,
                    reason: e.to_string(),
                }),
            }
        }
        Err(e) => {
            unchecked.push(Unchecked { principle: PrincipleId::PerceptualDiscriminability, reason: e.to_string() });
            // Duration is part of economy; the structural economy rules still ran.
            violations.push(Violation::new(
                PrincipleId::AuditoryEconomy,
                Severity::Warning,
                "duration_unchecked",
                vec![],
                format!("earcon durations could not be measured: {e}"),
            ));
        }
    }

    match evidence {
        None => unchecked.push(Unchecked {
            principle: PrincipleId::SemanticTransparency,
            reason: "requires human-subject evidence".into(),
        }),
        Some(report) => match check_semantic_transparency(cat, report, config) {
            Ok(found) => {
                violations.extend(found);
                checked.insert(PrincipleId::SemanticTransparency);
            }
            Err(e) => unchecked.push(Unchecked { principle: PrincipleId::SemanticTransparency, reason: e.to_string() }),
        },
    }

    let profile_principles =
        [PrincipleId::ComplexityManagement, PrincipleId::CognitiveIntegration, PrincipleId::CognitiveFit];
    match profile {
        None => unchecked.extend(profile_principles.iter().map(|&principle| Unchecked {
            principle,
            reason: "requires a rendering profile".into(),
        })),
        Some(p) => {
            violations.extend(check_profile_principles(p));
            checked.extend(profile_principles);
        }
    }

    violations.sort_by(|a, b| {
        (a.principle, &a.subjects, &a.rule, b.severity).cmp(&(b.principle, &b.subjects, &b.rule, a.severity))
    });
    unchecked.sort_by_key(|u| u.principle);
    ValidationReport {
        catalogue: cat.name.clone(),
        version: cat.version.clone(),
        checked: checked.into_iter().collect(),
        unchecked,
        violations,
        discriminability,
    }
}
