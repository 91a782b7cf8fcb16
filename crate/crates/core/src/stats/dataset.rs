//! Response CSV: one row per respondent. Columns `pref_<Element>` hold
//! `proposed`, `baseline` or `none`; `relevance_<Principle>` hold 1..5;
//! `suggest_<Element>` hold free text. Empty cells are unanswered and any
//! other column is ignored.

use serde::{Deserialize, Serialize};

use super::StatsError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Preference {
    Proposed,
    Baseline,
    None,
}

impl Preference {
    fn parse(s: &str) -> Option<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "proposed" => Some(Preference::Proposed),
            "baseline" => Some(Preference::Baseline),
            "none" => Some(Preference::None),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PreferenceCounts {
    pub element: String,
    pub proposed: u64,
    pub baseline: u64,
    pub none: u64,
}

impl PreferenceCounts {
    pub fn total(&self) -> u64 {
        self.proposed + self.baseline + self.none
    }

    pub fn as_array(&self) -> [u64; 3] {
        [self.proposed, self.baseline, self.none]
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelevanceRatings {
    pub principle: String,
    pub ratings: Vec<u8>,
}

impl RelevanceRatings {
    /// Counts of ratings 1 through 5.
    pub fn counts(&self) -> [u64; 5] {
        let mut c = [0; 5];
        for &r in &self.ratings {
            c[usize::from(r) - 1] += 1;
        }
        c
    }
}

/// Free-text suggestion. Unsolicited ones (the respondent picked a sound
/// for that element) are kept for reference but never counted.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Suggestion {
    pub respondent: usize,
    pub element: String,
    pub text: String,
    pub solicited: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudyDataset {
    pub respondents: usize,
    pub preference_answers: Vec<PreferenceCounts>,
    pub relevance_ratings: Vec<RelevanceRatings>,
    pub free_text: Vec<Suggestion>,
}

enum Column {
    Pref(usize),
    Relevance(usize),
    Suggest(String),
    Other,
}

pub fn load_responses(csv_text: &str) -> Result<StudyDataset, StatsError> {
    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_reader(csv_text.as_bytes());
    let headers = reader
        .headers()
        .map_err(|e| StatsError::Row { line: 1, message: e.to_string() })?
        .clone();
    if headers.iter().all(|h| h.trim().is_empty()) {
        return Err(StatsError::Row { line: 1, message: "missing header row".into() });
    }

    let mut prefs = Vec::new();
    let mut rels = Vec::new();
    let columns: Vec<Column> = headers
        .iter()
        .map(|h| {
            let h = h.trim();
            if let Some(e) = h.strip_prefix("pref_") {
                prefs.push(PreferenceCounts { element: e.to_string(), proposed: 0, baseline: 0, none: 0 });
                Column::Pref(prefs.len() - 1)
            } else if let Some(p) = h.strip_prefix("relevance_") {
                rels.push(RelevanceRatings { principle: p.to_string(), ratings: vec![] });
                Column::Relevance(rels.len() - 1)
            } else if let Some(e) = h.strip_prefix("suggest_") {
                Column::Suggest(e.to_string())
            } else {
                Column::Other
            }
        })
        .collect();
    if prefs.is_empty() && rels.is_empty() {
        return Err(StatsError::Row { line: 1, message: "header has no pref_ or relevance_ columns".into() });
    }

    let mut free_text = Vec::new();
    let mut respondents = 0;
    for record in reader.records() {
        let record = record.map_err(|e| StatsError::Row {
            line: e.position().map_or(0, |p| p.line()),
            message: e.to_string(),
        })?;
        let line = record.position().map_or(0, |p| p.line());
        respondents += 1;
        let mut chosen = Vec::new();
        let mut suggestions = Vec::new();
        for (col, value) in columns.iter().zip(record.iter()) {
            let value = value.trim();
            if value.is_empty() {
                continue;
            }
            match col {
                Column::Pref(i) => {
                    let choice = Preference::parse(value).ok_or_else(|| StatsError::Validation {
                        line,
                        message: format!("preference for {} must be proposed, baseline or none, got {value:?}", prefs[*i].element),
                    })?;
                    let row = &mut prefs[*i];
                    match choice {
                        Preference::Proposed => row.proposed += 1,
                        Preference::Baseline => row.baseline += 1,
                        Preference::None => row.none += 1,
                    }
                    chosen.push((row.element.clone(), choice));
                }
                Column::Relevance(i) => {
                    let rating = value.parse::<u8>().ok().filter(|r| (1..=5).contains(r)).ok_or_else(|| {
                        StatsError::Validation {
                            line,
                            message: format!("rating for {} must be 1..5, got {value:?}", rels[*i].principle),
                        }
                    })?;
                    rels[*i].ratings.push(rating);
                }
                Column::Suggest(element) => suggestions.push((element.clone(), value.to_string())),
                Column::Other => {}
            }
        }
        for (element, text) in suggestions {
            let solicited = chosen.iter().any(|(e, c)| *e == element && *c == Preference::None);
            free_text.push(Suggestion { respondent: respondents, element, text, solicited });
        }
    }

    Ok(StudyDataset { respondents, preference_answers: prefs, relevance_ratings: rels, free_text })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_respondents() {
        let csv = "id,pref_Class,pref_Package,relevance_SemioticClarity,suggest_Class\n\
                   1,proposed,none,5,\n\
                   2,baseline,,4,\n";
        let d = load_responses(csv).unwrap();
        assert_eq!(d.respondents, 2);
        assert_eq!(d.preference_answers[0].as_array(), [1, 1, 0]);
        assert_eq!(d.preference_answers[1].total(), 1);
        assert_eq!(d.relevance_ratings[0].ratings, vec![5, 4]);
    }

    #[test]
    fn out_of_range_rating() {
        let csv = "pref_Class,relevance_DualCoding\nproposed,6\n";
        match load_responses(csv) {
            Err(StatsError::Validation { line, .. }) => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn bad_preference_and_ragged_row() {
        assert!(matches!(load_responses("pref_Class\nmaybe\n"), Err(StatsError::Validation { .. })));
        match load_responses("pref_Class,pref_Attribute\nproposed,none\nproposed\n") {
            Err(StatsError::Row { line, .. }) => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
        assert!(load_responses("").is_err());
        assert!(load_responses("id,name\n1,x\n").is_err());
    }

    #[test]
    fn unsolicited_text_kept_but_not_counted() {
        let csv = "pref_Inheritance,suggest_Inheritance\nproposed,a baby sound\nnone,an orchestra\n";
        let d = load_responses(csv).unwrap();
        assert_eq!(d.preference_answers[0].as_array(), [1, 0, 1]);
        assert_eq!(d.free_text.len(), 2);
        assert!(!d.free_text[0].solicited);
        assert!(d.free_text[1].solicited);
    }
}
