//! Response-data analysis: frequency counts, descriptive statistics,
//! chi-square goodness of fit with exact tail probabilities, and
//! Holm-Bonferroni step-down correction.

mod dataset;
mod gamma;
mod report;

use serde::{Deserialize, Serialize};

pub use dataset::{load_responses, Preference, PreferenceCounts, RelevanceRatings, StudyDataset, Suggestion};
pub use gamma::{chi_square_p, ln_gamma, regularized_gamma_q};
pub use report::{study_report, PreferenceRow, RelevanceRow, StudyReport};

pub const DEFAULT_ALPHA: f64 = 0.05;

#[derive(Debug, thiserror::Error)]
pub enum StatsError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("line {line}: {message}")]
    Row { line: u64, message: String },
    #[error("line {line}: {message}")]
    Validation { line: u64, message: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DescriptiveStats {
    pub n: usize,
    pub mean: f64,
    /// Sample standard deviation (n - 1 denominator); `None` when n < 2.
    pub stddev: Option<f64>,
    pub min: f64,
    pub max: f64,
}

pub fn descriptive_stats(values: &[f64]) -> Result<DescriptiveStats, StatsError> {
    if values.is_empty() {
        return Err(StatsError::InvalidArgument("no values".into()));
    }
    let n = values.len();
    let mean = values.iter().sum::<f64>() / n as f64;
    let stddev = (n >= 2)
        .then(|| (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt());
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok(DescriptiveStats { n, mean, stddev, min, max })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChiSquareResult {
    pub statistic: f64,
    pub df: u32,
    pub p: f64,
    pub expected: Vec<f64>,
    pub observed: Vec<u64>,
}

/// Goodness of fit against equal expected frequencies `N / k`.
pub fn chi_square_gof(observed: &[u64]) -> Result<ChiSquareResult, StatsError> {
    let k = observed.len();
    if k < 2 {
        return Err(StatsError::InvalidArgument("need at least two categories".into()));
    }
    let total: u64 = observed.iter().sum();
    if total == 0 {
        return Err(StatsError::InvalidArgument("no observations".into()));
    }
    let e = total as f64 / k as f64;
    let statistic = observed.iter().map(|&o| (o as f64 - e).powi(2) / e).sum();
    let df = (k - 1) as u32;
    Ok(ChiSquareResult { statistic, df, p: chi_square_p(statistic, df), expected: vec![e; k], observed: observed.to_vec() })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HolmHypothesis {
    pub p: f64,
    /// 1-based position in ascending p order.
    pub rank: usize,
    pub threshold: f64,
    pub significant: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrectionOutcome {
    pub alpha: f64,
    pub m: usize,
    /// In the caller's original order.
    pub hypotheses: Vec<HolmHypothesis>,
}

impl CorrectionOutcome {
    pub fn significant_count(&self) -> usize {
        self.hypotheses.iter().filter(|h| h.significant).count()
    }
}

/// Holm-Bonferroni step-down procedure. Ties keep their input order.
pub fn holm_bonferroni(pvals: &[f64], alpha: f64) -> Result<CorrectionOutcome, StatsError> {
    if let Some(p) = pvals.iter().find(|p| !(0.0..=1.0).contains(*p)) {
        return Err(StatsError::InvalidArgument(format!("p-value {p} outside [0, 1]")));
    }
    let m = pvals.len();
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| pvals[a].total_cmp(&pvals[b]));

    let mut hypotheses = vec![HolmHypothesis { p: 0.0, rank: 0, threshold: 0.0, significant: false }; m];
    let mut rejecting = true;
    for (i, &idx) in order.iter().enumerate() {
        let rank = i + 1;
        let threshold = alpha / (m - rank + 1) as f64;
        rejecting = rejecting && pvals[idx] <= threshold;
        hypotheses[idx] = HolmHypothesis { p: pvals[idx], rank, threshold, significant: rejecting };
    }
    Ok(CorrectionOutcome { alpha, m, hypotheses })
}
