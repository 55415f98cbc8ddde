//! Evaluation arithmetic and corpus statistics.

use std::collections::{BTreeMap, HashSet};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::{Dataset, NliLabel, NliPair, PredictionSet};
use crate::tokenizer::{token_count, tokenize};
use crate::transforms::{SwapExpectation, TransformReport, ALLDROP_SEPARATOR};
use crate::{Error, Result};

fn uid_matches(original: &str, corrupted: &str) -> bool {
    corrupted == original
        || corrupted
            .strip_prefix(original)
            .is_some_and(|rest| rest.starts_with(ALLDROP_SEPARATOR))
}

/// Recomputes token removal by tokenizing both versions of every pair.
///
/// Pairs are aligned by position. A corrupted pair whose fields are the
/// original fields exchanged is counted crosswise, so a swap removes nothing.
pub fn removal_stats(original: &Dataset, corrupted: &Dataset) -> Result<TransformReport> {
    if original.len() != corrupted.len() {
        return Err(Error::Validation(format!(
            "pair count mismatch: original {} vs corrupted {}",
            original.len(),
            corrupted.len()
        )));
    }
    let per_pair: Vec<TransformReport> = original
        .pairs
        .par_iter()
        .zip(&corrupted.pairs)
        .map(|(o, c)| {
            if !uid_matches(&o.uid, &c.uid) {
                return Err(Error::Validation(format!(
                    "uid mismatch: original '{}' vs corrupted '{}'",
                    o.uid, c.uid
                )));
            }
            Ok(pair_removal(o, c))
        })
        .collect::<Result<_>>()?;
    let mut total = TransformReport::default();
    for r in &per_pair {
        total.add(r);
    }
    Ok(total)
}

fn pair_removal(o: &NliPair, c: &NliPair) -> TransformReport {
    let swapped = o.premise != o.hypothesis && c.premise == o.hypothesis && c.hypothesis == o.premise;
    let (op, oh) = if swapped {
        (&o.hypothesis, &o.premise)
    } else {
        (&o.premise, &o.hypothesis)
    };
    let (op, oh) = (token_count(op), token_count(oh));
    let (cp, ch) = (token_count(&c.premise), token_count(&c.hypothesis));
    let emptied = (op > 0 && cp == 0) || (oh > 0 && ch == 0);
    TransformReport::for_pair(op.saturating_sub(cp) as u64, oh.saturating_sub(ch) as u64, emptied)
}

fn content_types(text: &str) -> HashSet<String> {
    tokenize(text)
        .into_iter()
        .filter(|t| !t.is_punct)
        .map(|t| t.form.to_lowercase())
        .collect()
}

/// `(shared types, hypothesis types)` over case-folded non-punctuation tokens.
pub fn overlap_counts(pair: &NliPair) -> (usize, usize) {
    let premise = content_types(&pair.premise);
    let hypothesis = content_types(&pair.hypothesis);
    let shared = hypothesis.iter().filter(|t| premise.contains(*t)).count();
    (shared, hypothesis.len())
}

/// Share of hypothesis word types that also occur in the premise; 0 for an
/// empty hypothesis.
pub fn lexical_overlap(pair: &NliPair) -> f64 {
    match overlap_counts(pair) {
        (_, 0) => 0.0,
        (shared, total) => shared as f64 / total as f64,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OverlapStat {
    pub per_pair: Vec<f64>,
    pub dataset_mean_pct: f64,
}

pub fn dataset_overlap(dataset: &Dataset) -> Result<OverlapStat> {
    if dataset.is_empty() {
        return Err(Error::Validation("no pairs".into()));
    }
    let per_pair: Vec<f64> = dataset.pairs.par_iter().map(lexical_overlap).collect();
    let mean = per_pair.iter().sum::<f64>() / per_pair.len() as f64;
    Ok(OverlapStat {
        per_pair,
        dataset_mean_pct: mean * 100.0,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalResult {
    pub accuracy_pct: f64,
    pub delta_points: Option<f64>,
    pub n_evaluated: u64,
    pub n_missing_predictions: u64,
    /// Set when some gold pairs had no prediction.
    pub incomplete: bool,
}

impl EvalResult {
    pub fn from_counts(correct: u64, evaluated: u64, missing: u64, baseline_pct: Option<f64>) -> Self {
        let accuracy_pct = if evaluated == 0 {
            0.0
        } else {
            100.0 * correct as f64 / evaluated as f64
        };
        EvalResult {
            accuracy_pct,
            delta_points: baseline_pct.map(|b| delta(accuracy_pct, b)),
            n_evaluated: evaluated,
            n_missing_predictions: missing,
            incomplete: missing > 0,
        }
    }

    pub fn with_baseline(mut self, baseline_pct: Option<f64>) -> Self {
        self.delta_points = baseline_pct.map(|b| delta(self.accuracy_pct, b));
        self
    }
}

/// Corrupted accuracy minus baseline accuracy, in points.
pub fn delta(accuracy_pct: f64, baseline_pct: f64) -> f64 {
    accuracy_pct - baseline_pct
}

/// Accuracy of `predictions` over the gold pairs they cover.
pub fn accuracy(predictions: &PredictionSet, gold: &Dataset, baseline_pct: Option<f64>) -> Result<EvalResult> {
    let gold_uids: HashSet<&str> = gold.pairs.iter().map(|p| p.uid.as_str()).collect();
    if let Some(extra) = predictions.entries.keys().find(|u| !gold_uids.contains(u.as_str())) {
        return Err(Error::Validation(format!(
            "prediction for uid '{extra}' which is not in the gold set"
        )));
    }
    let (mut correct, mut evaluated, mut missing) = (0u64, 0u64, 0u64);
    for pair in &gold.pairs {
        match predictions.get(&pair.uid) {
            Some(label) => {
                evaluated += 1;
                correct += (label == pair.label) as u64;
            }
            None => missing += 1,
        }
    }
    if evaluated == 0 {
        return Err(Error::Validation(format!(
            "predictions '{}' cover none of the {} gold pairs",
            predictions.model_name,
            gold.len()
        )));
    }
    Ok(EvalResult::from_counts(correct, evaluated, missing, baseline_pct))
}

/// Per-gold-class swap consistency, in percent; `None` for absent classes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SwapConsistency {
    pub contradiction_pct: Option<f64>,
    pub entailment_pct: Option<f64>,
    pub neutral_pct: Option<f64>,
    pub counts: BTreeMap<NliLabel, u64>,
}

impl SwapConsistency {
    pub fn rate(&self, label: NliLabel) -> Option<f64> {
        match label {
            NliLabel::Contradiction => self.contradiction_pct,
            NliLabel::Entailment => self.entailment_pct,
            NliLabel::Neutral => self.neutral_pct,
        }
    }

    /// Contradiction and neutral at least `symmetric_pct` unchanged, and
    /// entailment at least `entailment_pct` changed. Absent classes are
    /// ignored; with no classes at all nothing holds.
    pub fn holds(&self, symmetric_pct: f64, entailment_pct: f64) -> bool {
        let checks = [
            (self.contradiction_pct, symmetric_pct),
            (self.neutral_pct, symmetric_pct),
            (self.entailment_pct, entailment_pct),
        ];
        checks.iter().any(|(r, _)| r.is_some())
            && checks.iter().all(|(r, min)| r.map_or(true, |r| r >= *min))
    }
}

pub fn swap_consistency(
    original: &PredictionSet,
    swapped: &PredictionSet,
    gold: &Dataset,
) -> Result<SwapConsistency> {
    let mut hits = [0u64; 3];
    let mut totals = [0u64; 3];
    for pair in &gold.pairs {
        let (Some(before), Some(after)) = (original.get(&pair.uid), swapped.get(&pair.uid)) else {
            return Err(Error::Validation(format!(
                "swap consistency needs predictions for every gold uid; '{}' is missing",
                pair.uid
            )));
        };
        let i = pair.label.index();
        totals[i] += 1;
        hits[i] += SwapExpectation::for_label(pair.label).is_consistent(before, after) as u64;
    }
    let rate = |i: usize| (totals[i] > 0).then(|| 100.0 * hits[i] as f64 / totals[i] as f64);
    Ok(SwapConsistency {
        contradiction_pct: rate(NliLabel::Contradiction.index()),
        entailment_pct: rate(NliLabel::Entailment.index()),
        neutral_pct: rate(NliLabel::Neutral.index()),
        counts: NliLabel::ALL.iter().map(|l| (*l, totals[l.index()])).collect(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RemovedRow {
    pub transform: String,
    pub tokens_removed: u64,
    pub accuracy_pct: f64,
    pub delta_points: Option<f64>,
}

pub fn accuracy_vs_removed<'a, I>(results: I) -> Vec<RemovedRow>
where
    I: IntoIterator<Item = (&'a str, &'a EvalResult, &'a TransformReport)>,
{
    results
        .into_iter()
        .map(|(name, eval, report)| RemovedRow {
            transform: name.to_string(),
            tokens_removed: report.total_tokens_removed,
            accuracy_pct: eval.accuracy_pct,
            delta_points: eval.delta_points,
        })
        .collect()
}

/// Two-decimal fixed formatting without a negative zero.
pub fn fmt2(x: f64) -> String {
    let s = format!("{x:.2}");
    if s == "-0.00" {
        "0.00".into()
    } else {
        s
    }
}

pub fn accuracy_vs_removed_csv(rows: &[RemovedRow]) -> String {
    let mut out = String::from("transform,tokens_removed,accuracy_pct,delta_points\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{}\n",
            csv_field(&r.transform),
            r.tokens_removed,
            fmt2(r.accuracy_pct),
            r.delta_points.map(fmt2).unwrap_or_default()
        ));
    }
    out
}

pub(crate) fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}
