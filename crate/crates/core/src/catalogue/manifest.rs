use std::collections::HashSet;
use std::path::Path;

use super::{AssetSource, CatalogueError, SoundCatalogue};

/// Line of the `nth` (0-based) occurrence of `"needle"` in `text`, or 1.
fn line_of(text: &str, needle: &str, nth: usize) -> usize {
    let quoted = format!("\"{needle}\"");
    text.match_indices(&quoted)
        .nth(nth)
        .map(|(pos, _)| text[..pos].matches('\n').count() + 1)
        .unwrap_or(1)
}

fn parse_error(line: usize, message: impl Into<String>) -> CatalogueError {
    CatalogueError::Parse { line, message: message.into() }
}

/// Parses a JSON manifest and performs referential checks. Relative asset
/// paths are left unresolved; see [`load_manifest`].
pub fn parse_manifest(text: &str) -> Result<SoundCatalogue, CatalogueError> {
    let cat: SoundCatalogue = serde_json::from_str(text).map_err(|e| parse_error(e.line().max(1), e.to_string()))?;

    let mut seen = HashSet::new();
    for c in &cat.concepts {
        if !seen.insert(c.id.as_str()) {
            return Err(parse_error(line_of(text, &c.id, 1), format!("duplicate concept id \"{}\"", c.id)));
        }
    }
    let mut assets = HashSet::new();
    for a in &cat.assets {
        if !assets.insert(a.id.as_str()) {
            return Err(parse_error(line_of(text, &a.id, 1), format!("duplicate asset id \"{}\"", a.id)));
        }
        if !(a.nominal_duration_s > 0.0 && a.nominal_duration_s.is_finite()) {
            return Err(parse_error(line_of(text, &a.id, 0), format!("asset \"{}\" needs a positive duration", a.id)));
        }
        if let AssetSource::Synth(spec) = &a.source {
            spec.validate()
                .map_err(|e| parse_error(line_of(text, &a.id, 0), format!("asset \"{}\": {e}", a.id)))?;
        }
    }
    for b in &cat.bindings {
        if b.recipe.components.is_empty() {
            return Err(parse_error(
                line_of(text, &b.concept, 0),
                format!("binding for \"{}\" has no components", b.concept),
            ));
        }
        for c in &b.recipe.components {
            if !assets.contains(c.asset.as_str()) {
                // The first mention of an undeclared asset is its reference.
                return Err(parse_error(line_of(text, &c.asset, 0), format!("unknown asset \"{}\"", c.asset)));
            }
            c.vars
                .validate()
                .map_err(|e| parse_error(line_of(text, &c.asset, 0), format!("binding \"{}\": {e}", b.concept)))?;
        }
    }
    Ok(cat)
}

pub fn serialize_manifest(cat: &SoundCatalogue) -> String {
    serde_json::to_string_pretty(cat).expect("catalogue is always serializable")
}

/// Reads and parses a manifest file, resolving asset paths against its
/// directory.
pub fn load_manifest(path: impl AsRef<Path>) -> Result<SoundCatalogue, CatalogueError> {
    let path = path.as_ref();
    let text =
        std::fs::read_to_string(path).map_err(|source| CatalogueError::Io { path: path.to_path_buf(), source })?;
    let mut cat = parse_manifest(&text)?;
    cat.base_dir = Some(path.parent().map(Path::to_path_buf).unwrap_or_default());
    Ok(cat)
}
