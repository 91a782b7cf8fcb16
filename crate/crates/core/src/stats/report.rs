use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::{
    chi_square_gof, descriptive_stats, holm_bonferroni, ChiSquareResult, CorrectionOutcome, DescriptiveStats,
    StudyDataset, Suggestion,
};

/// Expected counts below this make the chi-square approximation doubtful.
const LOW_EXPECTED: f64 = 5.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PreferenceRow {
    pub element: String,
    pub proposed: u64,
    pub baseline: u64,
    pub none: u64,
    pub proposed_fraction: f64,
    pub chi_square: Option<ChiSquareResult>,
    pub significant: bool,
    pub significant_holm: bool,
    pub low_n: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RelevanceRow {
    pub principle: String,
    /// Counts of ratings 1..5.
    pub counts: [u64; 5],
    pub descriptive: Option<DescriptiveStats>,
    pub chi_square: Option<ChiSquareResult>,
    pub significant: bool,
    pub significant_holm: bool,
    pub low_n: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudyReport {
    pub respondents: usize,
    pub alpha: f64,
    pub preference: Vec<PreferenceRow>,
    pub relevance: Vec<RelevanceRow>,
    pub preference_correction: CorrectionOutcome,
    pub relevance_correction: CorrectionOutcome,
    pub free_text: Vec<Suggestion>,
}

/// Applies Holm over the rows that have a test; rows without one stay
/// non-significant.
fn correct(pvals: &[Option<f64>], alpha: f64) -> (CorrectionOutcome, Vec<bool>) {
    let present: Vec<f64> = pvals.iter().flatten().copied().collect();
    let outcome = holm_bonferroni(&present, alpha).expect("p-values come from chi_square_p");
    let mut it = outcome.hypotheses.iter();
    let flags = pvals.iter().map(|p| p.is_some() && it.next().is_some_and(|h| h.significant)).collect();
    (outcome, flags)
}

pub fn study_report(dataset: &StudyDataset, alpha: f64) -> StudyReport {
    let mut preference: Vec<PreferenceRow> = dataset
        .preference_answers
        .iter()
        .map(|c| {
            let chi = chi_square_gof(&c.as_array()).ok();
            let total = c.total();
            PreferenceRow {
                element: c.element.clone(),
                proposed: c.proposed,
                baseline: c.baseline,
                none: c.none,
                proposed_fraction: if total > 0 { c.proposed as f64 / total as f64 } else { 0.0 },
                significant: chi.as_ref().is_some_and(|r| r.p < alpha),
                low_n: chi.as_ref().is_none_or(|r| r.expected[0] < LOW_EXPECTED),
                chi_square: chi,
                significant_holm: false,
            }
        })
        .collect();
    let (preference_correction, flags) =
        correct(&preference.iter().map(|r| r.chi_square.as_ref().map(|c| c.p)).collect::<Vec<_>>(), alpha);
    preference.iter_mut().zip(flags).for_each(|(r, f)| r.significant_holm = f);

    let mut relevance: Vec<RelevanceRow> = dataset
        .relevance_ratings
        .iter()
        .map(|r| {
            let counts = r.counts();
            let chi = chi_square_gof(&counts).ok();
            let values: Vec<f64> = r.ratings.iter().map(|&v| f64::from(v)).collect();
            RelevanceRow {
                principle: r.principle.clone(),
                counts,
                descriptive: descriptive_stats(&values).ok(),
                significant: chi.as_ref().is_some_and(|c| c.p < alpha),
                low_n: chi.as_ref().is_none_or(|c| c.expected[0] < LOW_EXPECTED),
                chi_square: chi,
                significant_holm: false,
            }
        })
        .collect();
    let (relevance_correction, flags) =
        correct(&relevance.iter().map(|r| r.chi_square.as_ref().map(|c| c.p)).collect::<Vec<_>>(), alpha);
    relevance.iter_mut().zip(flags).for_each(|(r, f)| r.significant_holm = f);

    StudyReport {
        respondents: dataset.respondents,
        alpha,
        preference,
        relevance,
        preference_correction,
        relevance_correction,
        free_text: dataset.free_text.clone(),
    }
}

impl StudyReport {
    /// Fraction of respondents preferring the proposed sound, per element.
    pub fn transparency_evidence(&self) -> Vec<(String, f64)> {
        self.preference.iter().map(|r| (r.element.clone(), r.proposed_fraction)).collect()
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let mark = |raw: bool, holm: bool| match (raw, holm) {
            (true, true) => "yes (Holm)",
            (true, false) => "yes",
            _ => "no",
        };
        let _ = writeln!(out, "Respondents: {}   alpha: {}", self.respondents, self.alpha);

        let _ = writeln!(out, "\nSound preference");
        let _ = writeln!(
            out,
            "{:<20} {:>8} {:>8} {:>5} {:>10} {:>3} {:>11}  Significant",
            "Element", "Proposed", "Baseline", "None", "Chi-square", "df", "Asymp. Sig."
        );
        for r in &self.preference {
            let (chi, df, p) = chi_cells(r.chi_square.as_ref());
            let caveat = if r.low_n { "  (low N)" } else { "" };
            let _ = writeln!(
                out,
                "{:<20} {:>8} {:>8} {:>5} {:>10} {:>3} {:>11}  {}{}",
                r.element,
                r.proposed,
                r.baseline,
                r.none,
                chi,
                df,
                p,
                mark(r.significant, r.significant_holm),
                caveat
            );
        }

        let _ = writeln!(out, "\nDescriptive statistics for perceived relevance");
        let _ = writeln!(out, "{:<28} {:>4} {:>8} {:>9} {:>5} {:>5}", "Principle", "N", "Mean", "StdDev", "Min", "Max");
        for r in &self.relevance {
            match &r.descriptive {
                Some(d) => {
                    let sd = d.stddev.map_or("-".to_string(), |s| format!("{s:.5}"));
                    let _ = writeln!(
                        out,
                        "{:<28} {:>4} {:>8.4} {:>9} {:>5.2} {:>5.2}",
                        r.principle, d.n, d.mean, sd, d.min, d.max
                    );
                }
                None => {
                    let _ = writeln!(out, "{:<28} {:>4}", r.principle, 0);
                }
            }
        }

        let _ = writeln!(out, "\nPerceived relevance of the principles");
        let _ = writeln!(
            out,
            "{:<28} {:>10} {:>3} {:>11}  Significant",
            "Principle", "Chi-square", "df", "Asymp. Sig."
        );
        for r in &self.relevance {
            let (chi, df, p) = chi_cells(r.chi_square.as_ref());
            let caveat = if r.low_n { "  (low N)" } else { "" };
            let _ = writeln!(
                out,
                "{:<28} {:>10} {:>3} {:>11}  {}{}",
                r.principle,
                chi,
                df,
                p,
                mark(r.significant, r.significant_holm),
                caveat
            );
        }

        let _ = writeln!(
            out,
            "\nHolm-Bonferroni: {}/{} preference tests and {}/{} relevance tests remain significant",
            self.preference_correction.significant_count(),
            self.preference_correction.m,
            self.relevance_correction.significant_count(),
            self.relevance_correction.m
        );
        if !self.free_text.is_empty() {
            let _ = writeln!(out, "\nSuggestions");
            for s in &self.free_text {
                let tag = if s.solicited { "" } else { " (unsolicited, not counted)" };
                let _ = writeln!(out, "  #{} {}: {}{}", s.respondent, s.element, s.text, tag);
            }
        }
        out
    }
}

fn chi_cells(c: Option<&ChiSquareResult>) -> (String, String, String) {
    match c {
        Some(c) => (format!("{:.3}", c.statistic), c.df.to_string(), format!("{:.3}", c.p)),
        None => ("-".into(), "-".into(), "-".into()),
    }
}
