//! The proposed catalogue and the catalogue of bad practices, built from
//! procedural stand-ins for recorded sounds.

use std::collections::BTreeMap;

use crate::audio::{AuditoryVariables, Generator, SynthSpec};

use super::{
    AssetSource, Component, Concept, ConceptBinding, EarconRecipe, RecipeMode, SignMode, SoundAsset, SoundCatalogue,
    UML_CONCEPT_IDS,
};

/// The eleven UML concepts with short descriptions.
pub fn uml_concepts() -> Vec<Concept> {
    let describe = |id: &str| match id {
        "Class" => "A classifier describing a set of objects",
        "Attribute" => "A typed property owned by a classifier",
        "Operation" => "A behavioural feature owned by a classifier",
        "Association" => "A structural link between classifiers",
        "Inheritance" => "Generalization from a child to its parent",
        "Realization" => "A classifier implementing an interface",
        "Dependency" => "A supplier/client usage relationship",
        "Aggregation" => "A shared whole/part association",
        "Composition" => "An owning whole/part association",
        "AssociationClass" => "An association that is also a class",
        "Package" => "A namespace grouping model elements",
        _ => "",
    };
    UML_CONCEPT_IDS.iter().map(|id| Concept { id: id.to_string(), description: describe(id).to_string() }).collect()
}

fn spec(generator: Generator, freq: f64, params: &[(&str, f64)]) -> SynthSpec {
    params.iter().fold(SynthSpec::new(generator, freq), |s, (k, v)| s.with(k, *v))
}

fn asset(id: &str, duration_s: f64, spec: SynthSpec) -> SoundAsset {
    SoundAsset { id: id.to_string(), source: AssetSource::Synth(spec), nominal_duration_s: duration_s }
}

fn bind(concept: &str, mode: RecipeMode, components: Vec<Component>, sign: SignMode, rationale: &str) -> ConceptBinding {
    let caption = format!("{concept}. {rationale}");
    let mut metadata = BTreeMap::new();
    metadata.insert("sign_mode_source".to_string(), serde_json::Value::from("interpretive"));
    ConceptBinding {
        concept: concept.to_string(),
        recipe: EarconRecipe { components, caption, mode },
        sign_mode: sign,
        rationale: rationale.to_string(),
        metadata,
    }
}

fn seq(concept: &str, assets: &[&str], sign: SignMode, rationale: &str) -> ConceptBinding {
    bind(concept, RecipeMode::Sequence, assets.iter().map(|a| Component::plain(a)).collect(), sign, rationale)
}

/// Tags a binding so linter findings about it carry `note`.
fn noted(mut b: ConceptBinding, note: &str) -> ConceptBinding {
    b.metadata.insert("lint_note".to_string(), serde_json::Value::from(note));
    b
}

const WIND_NOTE: &str = "similarity of the two winds is reported in the study discussion rather than the table";

fn pitched(asset: &str, semitones: f64) -> Component {
    Component::with_vars(asset, AuditoryVariables { pitch_semitones: semitones, ..Default::default() })
}

fn gained(asset: &str, db: f64) -> Component {
    Component::with_vars(asset, AuditoryVariables { loudness_db: db, ..Default::default() })
}

/// Register offset of the lower and upper book openings in Inheritance.
pub const INHERITANCE_REGISTER_SEMITONES: f64 = 5.0;

pub fn builtin_proposed() -> SoundCatalogue {
    use Generator::*;
    let assets = vec![
        asset(
            "book_opening",
            0.6,
            spec(Chirp, 260.0, &[("end_freq_hz", 780.0), ("harmonics", 3.0), ("noise_mix", 0.55), ("noise_cutoff_hz", 2500.0), ("noise_highpass_hz", 300.0), ("seed", 1.0), ("fade_s", 0.03)]),
        ),
        asset("positive_chime", 0.5, spec(Sine, 880.0, &[("harmonics", 2.0), ("step_ratio", 1.5), ("gate_rate_hz", 4.0), ("gate_decay_s", 0.12)])),
        asset("wooden_bricks", 0.7, spec(Pluck, 330.0, &[("decay", 0.95), ("gate_rate_hz", 5.0), ("gate_decay_s", 0.03), ("seed", 2.0)])),
        asset("notification_beeps", 0.6, spec(Square, 1250.0, &[("gate_rate_hz", 5.0), ("gate_decay_s", 0.06)])),
        asset(
            "keyboard_typing",
            1.0,
            spec(FilteredNoise, 0.0, &[("cutoff_hz", 7000.0), ("highpass_hz", 1800.0), ("gate_rate_hz", 11.0), ("gate_decay_s", 0.012), ("seed", 3.0)]),
        ),
        asset(
            "arrow_shot",
            0.5,
            spec(Chirp, 2400.0, &[("end_freq_hz", 300.0), ("noise_mix", 0.5), ("noise_cutoff_hz", 9000.0), ("noise_highpass_hz", 3000.0), ("seed", 4.0)]),
        ),
        asset("construction_bed", 1.2, spec(FilteredNoise, 0.0, &[("cutoff_hz", 250.0), ("am_rate_hz", 3.0), ("am_depth", 0.5), ("seed", 5.0)])),
        asset("hammering", 1.2, spec(Pluck, 140.0, &[("decay", 0.97), ("gate_rate_hz", 3.0), ("gate_decay_s", 0.05), ("seed", 6.0)])),
        asset(
            "baby_crying",
            1.5,
            spec(Sine, 460.0, &[("harmonics", 6.0), ("vibrato_hz", 6.0), ("vibrato_cents", 90.0), ("am_rate_hz", 1.6), ("am_depth", 0.9)]),
        ),
        asset(
            "sports_crowd",
            1.5,
            spec(FilteredNoise, 0.0, &[("cutoff_hz", 1800.0), ("highpass_hz", 250.0), ("am_rate_hz", 0.9), ("am_depth", 0.3), ("seed", 7.0)]),
        ),
        asset(
            "fire",
            1.5,
            spec(FilteredNoise, 0.0, &[("cutoff_hz", 6000.0), ("highpass_hz", 2500.0), ("gate_rate_hz", 13.0), ("gate_decay_s", 0.01), ("seed", 8.0)]),
        ),
        asset("page_turn", 0.35, spec(FilteredNoise, 0.0, &[("cutoff_hz", 9000.0), ("highpass_hz", 3500.0), ("am_rate_hz", 2.8), ("am_depth", 1.0), ("seed", 9.0)])),
        asset(
            "envelope_opening",
            0.5,
            spec(FilteredNoise, 0.0, &[("cutoff_hz", 3500.0), ("highpass_hz", 900.0), ("am_rate_hz", 2.0), ("am_depth", 1.0), ("seed", 10.0)]),
        ),
        asset("zip", 0.5, spec(Square, 95.0, &[("gate_rate_hz", 38.0), ("gate_decay_s", 0.006), ("noise_mix", 0.4), ("noise_cutoff_hz", 5000.0), ("seed", 11.0)])),
        asset("coins_falling", 0.8, spec(Sine, 3150.0, &[("harmonics", 2.0), ("gate_rate_hz", 7.0), ("gate_decay_s", 0.035), ("vibrato_hz", 7.0), ("vibrato_cents", 200.0)])),
    ];

    let r = INHERITANCE_REGISTER_SEMITONES;
    let bindings = vec![
        seq("Class", &["book_opening", "positive_chime"], SignMode::Index, "A book opens on a new definition, confirmed by a positive chime."),
        seq("Attribute", &["wooden_bricks", "notification_beeps"], SignMode::Icon, "Building bricks are the small parts a class is made of."),
        seq("Operation", &["keyboard_typing"], SignMode::Index, "Typing evokes the code that carries out behaviour."),
        seq("Association", &["arrow_shot"], SignMode::Icon, "An arrow flies from one class to another."),
        bind(
            "Inheritance",
            RecipeMode::Sequence,
            vec![pitched("book_opening", -r), Component::plain("coins_falling"), pitched("book_opening", r)],
            SignMode::Symbol,
            "A low book hands its coins down to a higher book, as a parent passes features to its child.",
        ),
        bind(
            "Realization",
            RecipeMode::Overlay,
            vec![Component::plain("construction_bed"), gained("hammering", -2.0)],
            SignMode::Index,
            "Construction work turns a plan into something real.",
        ),
        seq("Dependency", &["baby_crying"], SignMode::Symbol, "A crying baby depends on someone else."),
        seq("Aggregation", &["sports_crowd"], SignMode::Icon, "A crowd gathers individuals who remain independent."),
        bind(
            "Composition",
            RecipeMode::Overlay,
            vec![gained("sports_crowd", -4.0), Component::plain("fire")],
            SignMode::Symbol,
            "The crowd and the fire burn together: the parts perish with the whole.",
        ),
        seq(
            "AssociationClass",
            &["arrow_shot", "book_opening", "page_turn"],
            SignMode::Symbol,
            "An arrow lands in a book whose pages describe the link.",
        ),
        seq("Package", &["envelope_opening", "zip"], SignMode::Icon, "An envelope opens and a zip closes a group of elements."),
    ];

    SoundCatalogue {
        name: "proposed".into(),
        version: "1.0".into(),
        concepts: uml_concepts(),
        assets,
        bindings,
        base_dir: None,
    }
}

pub fn builtin_baseline() -> SoundCatalogue {
    use Generator::*;
    let water = |id: &str, cutoff: f64| {
        asset(
            id,
            1.5,
            spec(FilteredNoise, 0.0, &[("cutoff_hz", cutoff), ("highpass_hz", 200.0), ("am_rate_hz", 4.0), ("am_depth", 0.5), ("seed", 21.0)]),
        )
    };
    let wind = |id: &str, cutoff: f64| {
        asset(id, 2.0, spec(FilteredNoise, 0.0, &[("cutoff_hz", cutoff), ("am_rate_hz", 0.5), ("am_depth", 0.6), ("seed", 22.0), ("fade_s", 0.2)]))
    };
    let assets = vec![
        asset(
            "car_engine",
            1.5,
            spec(Sine, 55.0, &[("harmonics", 14.0), ("am_rate_hz", 24.0), ("am_depth", 0.5), ("noise_mix", 0.3), ("noise_cutoff_hz", 900.0), ("seed", 20.0)]),
        ),
        water("running_water_a", 1200.0),
        // Same seed, cutoff 5% higher: near-identical by construction.
        water("running_water_b", 1260.0),
        wind("wind_a", 500.0),
        wind("wind_b", 525.0),
        asset("farm_animals", 1.0, spec(Sine, 140.0, &[("harmonics", 8.0), ("vibrato_hz", 4.0), ("vibrato_cents", 60.0), ("am_rate_hz", 1.0), ("am_depth", 0.7)])),
        asset("piano_notes", 1.0, spec(Pluck, 523.0, &[("decay", 0.998), ("seed", 23.0)])),
        asset("window_cleaning", 0.8, spec(Sine, 2100.0, &[("vibrato_hz", 9.0), ("vibrato_cents", 300.0), ("am_rate_hz", 3.0), ("am_depth", 0.8)])),
        asset("tyres_breaking", 0.9, spec(Sine, 1700.0, &[("harmonics", 3.0), ("noise_mix", 0.5), ("noise_cutoff_hz", 6000.0), ("seed", 24.0)])),
        asset("plastic_bottle", 0.7, spec(FilteredNoise, 0.0, &[("cutoff_hz", 8000.0), ("highpass_hz", 1000.0), ("gate_rate_hz", 9.0), ("gate_decay_s", 0.02), ("seed", 25.0)])),
        asset("elephant", 1.2, spec(Chirp, 300.0, &[("end_freq_hz", 650.0), ("harmonics", 5.0), ("vibrato_hz", 8.0), ("vibrato_cents", 120.0)])),
        asset("cartoon_running", 1.0, spec(Sine, 520.0, &[("step_ratio", 1.26), ("gate_rate_hz", 10.0), ("gate_decay_s", 0.04)])),
        asset("doorbell", 1.2, spec(Sine, 660.0, &[("harmonics", 2.0), ("step_ratio", 0.8)])),
        asset("explosion", 1.5, spec(FilteredNoise, 0.0, &[("cutoff_hz", 350.0), ("gate_rate_hz", 0.5), ("gate_decay_s", 0.35), ("seed", 26.0)])),
    ];

    let staggered = ["farm_animals", "piano_notes", "window_cleaning", "tyres_breaking", "plastic_bottle", "car_engine"]
        .iter()
        .enumerate()
        .map(|(k, a)| {
            Component::with_vars(a, AuditoryVariables { start_offset_s: 0.45 * k as f64, ..Default::default() })
        })
        .collect();

    let bindings = vec![
        seq("Class", &["car_engine"], SignMode::Symbol, "A car engine."),
        seq("Attribute", &["car_engine"], SignMode::Symbol, "A car engine."),
        seq("Operation", &["running_water_a"], SignMode::Symbol, "Running water."),
        seq("Association", &["running_water_b"], SignMode::Symbol, "Running water."),
        bind(
            "Inheritance",
            RecipeMode::Mixed,
            staggered,
            SignMode::Symbol,
            "Farm animals, piano notes, window cleaning, tyres breaking, a crushed bottle and a car engine.",
        ),
        noted(seq("Realization", &["wind_a"], SignMode::Symbol, "Wind."), WIND_NOTE),
        noted(seq("Dependency", &["wind_b"], SignMode::Symbol, "Wind."), WIND_NOTE),
        seq("Aggregation", &["elephant"], SignMode::Symbol, "An elephant."),
        seq("Composition", &["cartoon_running"], SignMode::Symbol, "Cartoon running."),
        seq("AssociationClass", &["doorbell"], SignMode::Symbol, "A doorbell."),
        seq("Package", &["explosion"], SignMode::Symbol, "An explosion."),
    ];

    SoundCatalogue {
        name: "baseline".into(),
        version: "1.0".into(),
        concepts: uml_concepts(),
        assets,
        bindings,
        base_dir: None,
    }
}
