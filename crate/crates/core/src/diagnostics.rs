//! The crash-test suite: run every configured transform, score it and render
//! a verdict.
//!
//! Scores come either from prediction files produced by an external model, or
//! from a probe trained and evaluated on a seeded split of each corrupted set.
//! The artefact susceptibility index (ASI) and the verdict thresholds are this
//! tool's own operationalization.

use std::collections::{BTreeMap, HashSet};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::{load_predictions, Dataset, Format, PredictionSet};
use crate::metrics::{
    accuracy, accuracy_vs_removed, accuracy_vs_removed_csv, csv_field, dataset_overlap, fmt2,
    swap_consistency, EvalResult, SwapConsistency,
};
use crate::probes::{eval_probe, split_dataset, train_probe, Featurizer};
use crate::transforms::{
    corrupt_dataset, default_suite_transforms, NamedTransform, PretaggedIndex, TagSource, TransformKind,
    TransformReport, TransformSpec,
};
use crate::{Error, Result};

pub const REPORT_SCHEMA_VERSION: u32 = 1;

/// Name of the unmodified dataset in prediction maps and directories.
pub const ORIGINAL: &str = "original";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SuiteMode {
    #[default]
    PredictionFiles,
    Probe,
}

impl std::str::FromStr for SuiteMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.replace('-', "_").as_str() {
            "prediction_files" | "predictions" => Ok(SuiteMode::PredictionFiles),
            "probe" => Ok(SuiteMode::Probe),
            other => Err(Error::Config(format!("unknown mode '{other}' (prediction_files, probe)"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProbeSettings {
    #[serde(default)]
    pub featurizer: Featurizer,
    #[serde(default = "default_epochs")]
    pub epochs: u32,
    #[serde(default = "default_train_fraction")]
    pub train_fraction: f64,
}

fn default_epochs() -> u32 {
    5
}

fn default_train_fraction() -> f64 {
    0.8
}

impl Default for ProbeSettings {
    fn default() -> Self {
        ProbeSettings {
            featurizer: Featurizer::HypBow,
            epochs: default_epochs(),
            train_fraction: default_train_fraction(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SwapTolerance {
    /// Minimum unchanged-prediction rate for contradiction and neutral pairs.
    pub symmetric_pct: f64,
    /// Minimum changed-prediction rate for entailment pairs.
    pub entailment_pct: f64,
}

impl Default for SwapTolerance {
    fn default() -> Self {
        SwapTolerance {
            symmetric_pct: 80.0,
            entailment_pct: 80.0,
        }
    }
}

fn default_chance() -> f64 {
    33.33
}

fn default_threshold() -> f64 {
    0.5
}

fn default_min_signal() -> f64 {
    5.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SuiteConfig {
    /// Seed for shuffles, probe training and the probe split.
    pub seed: u64,
    #[serde(default)]
    pub transforms: Option<Vec<NamedTransform>>,
    #[serde(default)]
    pub baseline_accuracy_pct: Option<f64>,
    #[serde(default = "default_chance")]
    pub chance_pct: f64,
    #[serde(default = "default_threshold")]
    pub asi_threshold: f64,
    /// ASI is left out when the baseline is less than this many points above
    /// chance.
    #[serde(default = "default_min_signal")]
    pub min_signal_points: f64,
    #[serde(default)]
    pub mode: SuiteMode,
    #[serde(default)]
    pub predictions: BTreeMap<String, PathBuf>,
    #[serde(default)]
    pub predictions_dir: Option<PathBuf>,
    #[serde(default)]
    pub probe: ProbeSettings,
    #[serde(default)]
    pub swap_tolerance: SwapTolerance,
}

impl SuiteConfig {
    pub fn new(seed: u64) -> Self {
        SuiteConfig {
            seed,
            transforms: None,
            baseline_accuracy_pct: None,
            chance_pct: default_chance(),
            asi_threshold: default_threshold(),
            min_signal_points: default_min_signal(),
            mode: SuiteMode::default(),
            predictions: BTreeMap::new(),
            predictions_dir: None,
            probe: ProbeSettings::default(),
            swap_tolerance: SwapTolerance::default(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let config: SuiteConfig =
            serde_json::from_str(text).map_err(|e| Error::Config(format!("suite config: {e}")))?;
        config.validate()?;
        Ok(config)
    }

    /// Reads a JSON config; relative prediction paths resolve against the
    /// config file's directory.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut config = Self::from_json(&text)?;
        let base = path.parent().unwrap_or(Path::new(""));
        for p in config.predictions.values_mut() {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        if let Some(dir) = config.predictions_dir.as_mut() {
            if dir.is_relative() {
                *dir = base.join(&*dir);
            }
        }
        Ok(config)
    }

    pub fn resolved_transforms(&self) -> Vec<NamedTransform> {
        self.transforms
            .clone()
            .unwrap_or_else(|| default_suite_transforms(self.seed))
    }

    pub fn validate(&self) -> Result<()> {
        let transforms = self.resolved_transforms();
        if transforms.is_empty() {
            return Err(Error::Config("no transforms configured".into()));
        }
        let mut names = HashSet::new();
        for t in &transforms {
            if t.name == ORIGINAL {
                return Err(Error::Config(format!("'{ORIGINAL}' is reserved for the unmodified dataset")));
            }
            if !names.insert(t.name.as_str()) {
                return Err(Error::Config(format!("duplicate transform name '{}'", t.name)));
            }
            t.spec.validate()?;
        }
        if !(self.asi_threshold > 0.0 && self.asi_threshold < 1.0) {
            return Err(Error::Config(format!("asi_threshold {} is not in (0, 1)", self.asi_threshold)));
        }
        if let Some(b) = self.baseline_accuracy_pct {
            if !(b > self.chance_pct) {
                return Err(Error::Config(format!(
                    "baseline {b} must be above chance {}",
                    self.chance_pct
                )));
            }
        }
        if !(self.probe.train_fraction > 0.0 && self.probe.train_fraction < 1.0) {
            return Err(Error::Config("probe.train_fraction must be in (0, 1)".into()));
        }
        if self.probe.epochs == 0 {
            return Err(Error::Config("probe.epochs must be at least 1".into()));
        }
        Ok(())
    }

    fn prediction_path(&self, name: &str) -> Option<PathBuf> {
        self.predictions
            .get(name)
            .cloned()
            .or_else(|| self.predictions_dir.as_ref().map(|d| d.join(format!("{name}.jsonl"))))
    }

    /// Loads the original predictions plus one set per configured transform.
    pub fn load_predictions(&self) -> Result<BTreeMap<String, PredictionSet>> {
        let mut out = BTreeMap::new();
        let names = std::iter::once(ORIGINAL.to_string())
            .chain(self.resolved_transforms().into_iter().map(|t| t.name));
        for name in names {
            let path = self
                .prediction_path(&name)
                .filter(|p| p.exists())
                .ok_or_else(|| Error::Config(format!("missing prediction file for transform '{name}'")))?;
            out.insert(name, load_predictions(&path, Format::from_path(&path))?);
        }
        Ok(out)
    }

    fn verdict_params(&self) -> VerdictParams {
        VerdictParams {
            asi_threshold: self.asi_threshold,
            swap_tolerance: self.swap_tolerance,
        }
    }
}

/// `(accuracy - chance) / (baseline - chance)`.
pub fn asi(accuracy_pct: f64, baseline_pct: f64, chance_pct: f64) -> f64 {
    (accuracy_pct - chance_pct) / (baseline_pct - chance_pct)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticRow {
    pub name: String,
    pub transform: TransformSpec,
    pub content_word: bool,
    pub accuracy_pct: f64,
    pub delta_points: Option<f64>,
    pub tokens_removed: u64,
    pub premise_tokens_removed: u64,
    pub hypothesis_tokens_removed: u64,
    pub pairs_left_empty: u64,
    pub overlap_pct: f64,
    pub asi: Option<f64>,
    pub n_evaluated: u64,
    pub incomplete: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum VerdictStatus {
    ArtefactProne,
    Robust,
    Inconclusive,
}

impl VerdictStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            VerdictStatus::ArtefactProne => "artefact-prone",
            VerdictStatus::Robust => "robust",
            VerdictStatus::Inconclusive => "inconclusive",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub status: VerdictStatus,
    pub triggers: Vec<String>,
    pub reason: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VerdictParams {
    pub asi_threshold: f64,
    pub swap_tolerance: SwapTolerance,
}

impl Default for VerdictParams {
    fn default() -> Self {
        VerdictParams {
            asi_threshold: default_threshold(),
            swap_tolerance: SwapTolerance::default(),
        }
    }
}

/// Applies the threshold rule to content-word rows (noun or verb drops and
/// keep-only combinations). Trigger labels are `<dataset>-<row>`.
pub fn verdict(
    dataset: &str,
    rows: &[DiagnosticRow],
    swap: Option<&SwapConsistency>,
    params: &VerdictParams,
) -> Verdict {
    let content: Vec<&DiagnosticRow> = rows.iter().filter(|r| r.content_word).collect();
    let triggers: Vec<String> = content
        .iter()
        .filter_map(|r| match r.asi {
            Some(a) if a > params.asi_threshold => Some(format!("{dataset}-{} (ASI {a:.3})", r.name)),
            _ => None,
        })
        .collect();
    if !triggers.is_empty() {
        return Verdict {
            status: VerdictStatus::ArtefactProne,
            reason: format!(
                "{} content-word transform(s) keep ASI above {}",
                triggers.len(),
                params.asi_threshold
            ),
            triggers,
        };
    }
    let inconclusive = |reason: &str| Verdict {
        status: VerdictStatus::Inconclusive,
        triggers: Vec::new(),
        reason: reason.to_string(),
    };
    if content.is_empty() {
        return inconclusive("no content-word transforms were run");
    }
    if content.iter().any(|r| r.asi.is_none()) {
        return inconclusive("no usable baseline, ASI unavailable");
    }
    let tol = params.swap_tolerance;
    match swap {
        None => inconclusive("content-word ASI within threshold but no swap results"),
        Some(s) if !s.holds(tol.symmetric_pct, tol.entailment_pct) => {
            inconclusive("content-word ASI within threshold but swap consistency outside tolerance")
        }
        Some(_) => Verdict {
            status: VerdictStatus::Robust,
            triggers: Vec::new(),
            reason: "content-word ASI within threshold and swap consistency holds".into(),
        },
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticReport {
    pub schema_version: u32,
    pub dataset: String,
    pub n_pairs: u64,
    pub mode: SuiteMode,
    pub baseline_accuracy_pct: Option<f64>,
    /// Accuracy measured on the unmodified data, when available.
    pub original_accuracy_pct: Option<f64>,
    pub chance_pct: f64,
    pub params: VerdictParams,
    pub rows: Vec<DiagnosticRow>,
    pub swap_consistency: Option<SwapConsistency>,
    pub verdict: Verdict,
    pub note: String,
}

impl DiagnosticReport {
    /// Recomputes the verdict from the stored rows and parameters.
    pub fn recompute_verdict(&self) -> Verdict {
        verdict(&self.dataset, &self.rows, self.swap_consistency.as_ref(), &self.params)
    }
}

const NOTE: &str = "ASI = (accuracy - chance) / (baseline - chance); the ASI threshold and swap tolerances are this tool's operationalization, not an established standard.";

struct Scored {
    eval: EvalResult,
    report: TransformReport,
    overlap_pct: f64,
}

/// Scores produced for the unmodified data and the swap transform.
struct SwapInputs {
    original: PredictionSet,
    swapped: PredictionSet,
    gold: Dataset,
}

/// Runs the suite, loading prediction files from the config in
/// prediction-files mode.
pub fn run_suite(dataset: &Dataset, config: &SuiteConfig, tags: Option<&TagSource>) -> Result<DiagnosticReport> {
    config.validate()?;
    match config.mode {
        SuiteMode::PredictionFiles => {
            let preds = config.load_predictions()?;
            run_suite_with_predictions(dataset, config, tags, &preds)
        }
        SuiteMode::Probe => run_suite_inner(dataset, config, tags, None),
    }
}

/// Prediction-files mode with in-memory prediction sets keyed by transform
/// name plus `original`.
pub fn run_suite_with_predictions(
    dataset: &Dataset,
    config: &SuiteConfig,
    tags: Option<&TagSource>,
    predictions: &BTreeMap<String, PredictionSet>,
) -> Result<DiagnosticReport> {
    config.validate()?;
    for name in std::iter::once(ORIGINAL.to_string()).chain(config.resolved_transforms().into_iter().map(|t| t.name)) {
        if !predictions.contains_key(&name) {
            return Err(Error::Config(format!("missing prediction file for transform '{name}'")));
        }
    }
    run_suite_inner(dataset, config, tags, Some(predictions))
}

fn run_suite_inner(
    dataset: &Dataset,
    config: &SuiteConfig,
    tags: Option<&TagSource>,
    predictions: Option<&BTreeMap<String, PredictionSet>>,
) -> Result<DiagnosticReport> {
    if dataset.is_empty() {
        return Err(Error::Validation("no pairs".into()));
    }
    let transforms = config.resolved_transforms();

    // Tag every sentence once instead of once per transform.
    let owned_index;
    let tags = match tags {
        Some(TagSource::Model(m)) if transforms.iter().any(|t| t.spec.needs_tags()) => {
            owned_index = PretaggedIndex::tag_dataset(dataset, m);
            Some(TagSource::Pretagged(&owned_index))
        }
        other => other.copied(),
    };

    let split = match config.mode {
        SuiteMode::Probe => Some(split_indices(dataset, config)?),
        SuiteMode::PredictionFiles => None,
    };

    let score = |data: &Dataset, report: TransformReport, name: &str| -> Result<(Scored, Option<PredictionSet>)> {
        let overlap_pct = dataset_overlap(data)?.dataset_mean_pct;
        let (eval, preds) = match (predictions, &split) {
            (Some(p), _) => (accuracy(&p[name], data, None)?, None),
            (None, Some((train_idx, held_idx))) => {
                let train = subset(data, train_idx);
                let held = subset(data, held_idx);
                let probe = train_probe(&train, config.probe.featurizer, config.probe.epochs, config.seed)?;
                let preds = probe.predict_dataset(&held);
                (eval_probe(&probe, &held)?.result, Some(preds))
            }
            (None, None) => unreachable!("probe mode always has a split"),
        };
        Ok((
            Scored {
                eval,
                report,
                overlap_pct,
            },
            preds,
        ))
    };

    let (original, original_preds) = score(
        dataset,
        TransformReport {
            pairs_processed: dataset.len() as u64,
            ..Default::default()
        },
        ORIGINAL,
    )?;

    let scored: Vec<(Scored, Option<Dataset>)> = transforms
        .par_iter()
        .map(|t| {
            let (corrupted, report) = corrupt_dataset(dataset, &t.spec, tags.as_ref())?;
            let (s, _) = score(&corrupted, report, &t.name)?;
            let keep = matches!(t.spec.kind, TransformKind::SwapPair).then_some(corrupted);
            Ok((s, keep))
        })
        .collect::<Result<_>>()?;

    let baseline = config.baseline_accuracy_pct.unwrap_or(original.eval.accuracy_pct);
    let has_signal = baseline - config.chance_pct >= config.min_signal_points;

    let mut swap = None;
    let mut rows = Vec::with_capacity(transforms.len());
    for (t, (s, swapped_data)) in transforms.iter().zip(scored) {
        if let (Some(swapped_data), None) = (&swapped_data, &swap) {
            swap = Some(swap_inputs(dataset, swapped_data, &t.name, config, predictions, split.as_ref(), original_preds.as_ref())?);
        }
        rows.push(DiagnosticRow {
            name: t.name.clone(),
            transform: t.spec,
            content_word: t.spec.is_content_word(),
            accuracy_pct: s.eval.accuracy_pct,
            delta_points: Some(s.eval.accuracy_pct - baseline),
            tokens_removed: s.report.total_tokens_removed,
            premise_tokens_removed: s.report.premise_tokens_removed,
            hypothesis_tokens_removed: s.report.hypothesis_tokens_removed,
            pairs_left_empty: s.report.pairs_left_empty,
            overlap_pct: s.overlap_pct,
            asi: has_signal.then(|| asi(s.eval.accuracy_pct, baseline, config.chance_pct)),
            n_evaluated: s.eval.n_evaluated,
            incomplete: s.eval.incomplete,
        });
    }
    let swap_consistency = swap
        .map(|s| swap_consistency(&s.original, &s.swapped, &s.gold))
        .transpose()?;

    let params = config.verdict_params();
    let verdict = verdict(&dataset.name, &rows, swap_consistency.as_ref(), &params);
    Ok(DiagnosticReport {
        schema_version: REPORT_SCHEMA_VERSION,
        dataset: dataset.name.clone(),
        n_pairs: dataset.len() as u64,
        mode: config.mode,
        baseline_accuracy_pct: Some(baseline),
        original_accuracy_pct: Some(original.eval.accuracy_pct),
        chance_pct: config.chance_pct,
        params,
        rows,
        swap_consistency,
        verdict,
        note: NOTE.into(),
    })
}

/// Swap consistency compares the original-data model on original and swapped
/// inputs. In probe mode that is the probe trained on the original split.
fn swap_inputs(
    dataset: &Dataset,
    swapped: &Dataset,
    name: &str,
    config: &SuiteConfig,
    predictions: Option<&BTreeMap<String, PredictionSet>>,
    split: Option<&(Vec<usize>, Vec<usize>)>,
    original_preds: Option<&PredictionSet>,
) -> Result<SwapInputs> {
    match (predictions, split) {
        (Some(p), _) => Ok(SwapInputs {
            original: p[ORIGINAL].clone(),
            swapped: p[name].clone(),
            gold: dataset.clone(),
        }),
        (None, Some((train_idx, held_idx))) => {
            let probe = train_probe(&subset(dataset, train_idx), config.probe.featurizer, config.probe.epochs, config.seed)?;
            let gold = subset(dataset, held_idx);
            Ok(SwapInputs {
                original: original_preds.cloned().unwrap_or_else(|| probe.predict_dataset(&gold)),
                swapped: probe.predict_dataset(&subset(swapped, held_idx)),
                gold,
            })
        }
        (None, None) => unreachable!("probe mode always has a split"),
    }
}

fn split_indices(dataset: &Dataset, config: &SuiteConfig) -> Result<(Vec<usize>, Vec<usize>)> {
    let indexed = Dataset {
        name: dataset.name.clone(),
        split: dataset.split,
        pairs: dataset
            .pairs
            .iter()
            .enumerate()
            .map(|(i, p)| crate::corpus::NliPair {
                uid: i.to_string(),
                ..p.clone()
            })
            .collect(),
    };
    let (train, held) = split_dataset(&indexed, config.probe.train_fraction, config.seed)?;
    let idx = |d: &Dataset| d.pairs.iter().map(|p| p.uid.parse().expect("index uid")).collect();
    let (train_idx, held_idx): (Vec<usize>, Vec<usize>) = (idx(&train), idx(&held));
    if held_idx.is_empty() || train_idx.is_empty() {
        return Err(Error::Degenerate("dataset too small for a train/held-out split".into()));
    }
    Ok((train_idx, held_idx))
}

fn subset(dataset: &Dataset, idx: &[usize]) -> Dataset {
    Dataset {
        name: dataset.name.clone(),
        split: dataset.split,
        pairs: idx.iter().map(|&i| dataset.pairs[i].clone()).collect(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Json,
    Markdown,
    /// Accuracy against tokens removed.
    Csv,
    /// Lexical overlap against accuracy.
    OverlapCsv,
}

impl std::str::FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(ReportFormat::Json),
            "markdown" | "md" => Ok(ReportFormat::Markdown),
            "csv" => Ok(ReportFormat::Csv),
            "overlap-csv" | "overlap_csv" => Ok(ReportFormat::OverlapCsv),
            other => Err(Error::Config(format!("unknown report format '{other}' (json, markdown, csv, overlap-csv)"))),
        }
    }
}

pub fn emit_report(report: &DiagnosticReport, format: ReportFormat) -> Result<String> {
    match format {
        ReportFormat::Json => Ok(serde_json::to_string_pretty(report)? + "\n"),
        ReportFormat::Markdown => Ok(markdown(report)),
        ReportFormat::Csv => {
            let evals: Vec<(EvalResult, TransformReport)> = report
                .rows
                .iter()
                .map(|r| {
                    (
                        EvalResult {
                            accuracy_pct: r.accuracy_pct,
                            delta_points: r.delta_points,
                            n_evaluated: r.n_evaluated,
                            n_missing_predictions: 0,
                            incomplete: r.incomplete,
                        },
                        TransformReport {
                            total_tokens_removed: r.tokens_removed,
                            ..Default::default()
                        },
                    )
                })
                .collect();
            let rows = accuracy_vs_removed(
                report
                    .rows
                    .iter()
                    .zip(&evals)
                    .map(|(r, (e, t))| (r.name.as_str(), e, t)),
            );
            Ok(accuracy_vs_removed_csv(&rows))
        }
        ReportFormat::OverlapCsv => {
            let mut out = String::from("transform,overlap_pct,accuracy_pct\n");
            for r in &report.rows {
                let _ = writeln!(out, "{},{},{}", csv_field(&r.name), fmt2(r.overlap_pct), fmt2(r.accuracy_pct));
            }
            Ok(out)
        }
    }
}

fn opt2(x: Option<f64>) -> String {
    x.map(fmt2).unwrap_or_else(|| "n/a".into())
}

fn markdown(report: &DiagnosticReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# Crash-test report: {}\n", report.dataset);
    let _ = writeln!(out, "- pairs: {}", report.n_pairs);
    let _ = writeln!(out, "- baseline accuracy: {}", opt2(report.baseline_accuracy_pct));
    let _ = writeln!(out, "- chance: {}", fmt2(report.chance_pct));
    let _ = writeln!(out, "- ASI threshold: {}\n", report.params.asi_threshold);
    out.push_str("| transform | accuracy | delta | tokens removed | overlap % | ASI |\n");
    out.push_str("|---|---:|---:|---:|---:|---:|\n");
    for r in &report.rows {
        let _ = writeln!(
            out,
            "| {} | {} | {} | {} | {} | {} |",
            r.name,
            fmt2(r.accuracy_pct),
            opt2(r.delta_points),
            r.tokens_removed,
            fmt2(r.overlap_pct),
            r.asi.map(|a| format!("{a:.3}")).unwrap_or_else(|| "n/a".into())
        );
    }
    if let Some(s) = &report.swap_consistency {
        out.push_str("\n## Swap consistency\n\n");
        let _ = writeln!(out, "- contradiction unchanged: {}", opt2(s.contradiction_pct));
        let _ = writeln!(out, "- neutral unchanged: {}", opt2(s.neutral_pct));
        let _ = writeln!(out, "- entailment changed: {}", opt2(s.entailment_pct));
    }
    let _ = writeln!(out, "\n## Verdict: {}\n", report.verdict.status.as_str());
    let _ = writeln!(out, "{}", report.verdict.reason);
    for t in &report.verdict.triggers {
        let _ = writeln!(out, "- {t}");
    }
    let _ = writeln!(out, "\n_{}_", report.note);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{NliLabel, NliPair, Split};
    use crate::tagger::UniversalPos;
    use crate::transforms::TagSet;

    fn row(name: &str, kind: TransformKind, acc: f64, baseline: Option<f64>) -> DiagnosticRow {
        let spec = TransformSpec::identity();
        let spec = TransformSpec { kind, ..spec };
        DiagnosticRow {
            name: name.into(),
            transform: spec,
            content_word: spec.is_content_word(),
            accuracy_pct: acc,
            delta_points: baseline.map(|b| acc - b),
            tokens_removed: 0,
            premise_tokens_removed: 0,
            hypothesis_tokens_removed: 0,
            pairs_left_empty: 0,
            overlap_pct: 0.0,
            asi: baseline.map(|b| asi(acc, b, 33.33)),
            n_evaluated: 1,
            incomplete: false,
        }
    }

    fn noun() -> TransformKind {
        TransformKind::DropPos([UniversalPos::Noun].into_iter().collect())
    }

    #[test]
    fn asi_anchor_points() {
        assert!((asi(69.80, 83.74, 33.33) - 0.7235).abs() < 5e-4);
        assert!((asi(43.7, 73.8, 33.33) - 0.2562).abs() < 5e-4);
        assert_eq!(asi(33.33, 83.74, 33.33), 0.0);
        assert_eq!(asi(83.74, 83.74, 33.33), 1.0);
    }

    #[test]
    fn verdict_rules() {
        let p = VerdictParams::default();
        let mnli = [row("noun", noun(), 69.80, Some(83.74))];
        let v = verdict("mnli", &mnli, None, &p);
        assert_eq!(v.status, VerdictStatus::ArtefactProne);
        assert_eq!(v.triggers, ["mnli-noun (ASI 0.723)"]);

        let anli = [row("noun", noun(), 43.7, Some(73.8))];
        assert_eq!(verdict("anli", &anli, None, &p).status, VerdictStatus::Inconclusive);
        let good_swap = SwapConsistency {
            contradiction_pct: Some(95.0),
            entailment_pct: Some(90.0),
            neutral_pct: Some(85.0),
            counts: BTreeMap::new(),
        };
        assert_eq!(verdict("anli", &anli, Some(&good_swap), &p).status, VerdictStatus::Robust);
        let bad_swap = SwapConsistency {
            entailment_pct: Some(10.0),
            ..good_swap.clone()
        };
        assert_eq!(verdict("anli", &anli, Some(&bad_swap), &p).status, VerdictStatus::Inconclusive);

        let no_baseline = [row("noun", noun(), 69.8, None)];
        assert_eq!(verdict("x", &no_baseline, Some(&good_swap), &p).status, VerdictStatus::Inconclusive);

        // a function-word drop with high ASI does not trigger
        let det = [row("det", TransformKind::DropPos([UniversalPos::Det].into_iter().collect()), 83.0, Some(83.74))];
        assert_eq!(verdict("x", &det, None, &p).status, VerdictStatus::Inconclusive);
    }

    fn fixture() -> Dataset {
        let pairs = (0..40)
            .map(|i| {
                let label = NliLabel::ALL[i % 3];
                let cue = ["not", "someone", "probably"][i % 3];
                NliPair::new(format!("p{i}"), "A man walks.", format!("The man {cue} walks {i}."), label)
            })
            .collect();
        Dataset::new("toy", Split::Dev, pairs).unwrap()
    }

    fn gold_preds(d: &Dataset) -> PredictionSet {
        let mut p = PredictionSet::new("gold");
        for pair in &d.pairs {
            p.insert(pair.uid.clone(), pair.label);
        }
        p
    }

    #[test]
    fn prediction_mode_end_to_end() {
        let d = fixture();
        let mut config = SuiteConfig::new(1);
        config.transforms = Some(vec![
            NamedTransform {
                name: "shuffle".into(),
                spec: TransformSpec::shuffle(1, 1).unwrap(),
            },
            NamedTransform {
                name: "swap".into(),
                spec: TransformSpec::new(TransformKind::SwapPair).unwrap(),
            },
        ]);
        let mut preds = BTreeMap::new();
        preds.insert(ORIGINAL.to_string(), gold_preds(&d));
        preds.insert("shuffle".to_string(), gold_preds(&d));
        let err = run_suite_with_predictions(&d, &config, None, &preds).unwrap_err();
        assert!(err.to_string().contains("'swap'"), "{err}");

        preds.insert("swap".to_string(), gold_preds(&d));
        let report = run_suite_with_predictions(&d, &config, None, &preds).unwrap();
        assert_eq!(report.rows.len(), 2);
        assert_eq!(report.rows[0].asi, Some(1.0));
        assert_eq!(report.baseline_accuracy_pct, Some(100.0));
        let swap = report.swap_consistency.as_ref().unwrap();
        assert_eq!(swap.entailment_pct, Some(0.0));
        // no content-word rows configured
        assert_eq!(report.verdict.status, VerdictStatus::Inconclusive);

        let json = emit_report(&report, ReportFormat::Json).unwrap();
        let back: DiagnosticReport = serde_json::from_str(&json).unwrap();
        assert_eq!(back, report);
        assert_eq!(back.recompute_verdict(), report.verdict);

        let md = emit_report(&report, ReportFormat::Markdown).unwrap();
        assert!(md.contains("| shuffle | 100.00 | 0.00 | 0 |"));
        let csv = emit_report(&report, ReportFormat::Csv).unwrap();
        assert_eq!(csv.lines().count(), 3);
        let ov = emit_report(&report, ReportFormat::OverlapCsv).unwrap();
        assert!(ov.starts_with("transform,overlap_pct,accuracy_pct\n"));
    }

    #[test]
    fn word_class_rows_need_tags() {
        let mut config = SuiteConfig::new(3);
        config.mode = SuiteMode::Probe;
        config.transforms = Some(vec![NamedTransform {
            name: "keep-all".into(),
            spec: TransformSpec::keep(TagSet::all()).unwrap(),
        }]);
        assert!(matches!(run_suite(&fixture(), &config, None), Err(Error::Config(_))));
    }

    #[test]
    fn config_validation() {
        let c = SuiteConfig::from_json(r#"{"seed": 1}"#).unwrap();
        assert_eq!(c.resolved_transforms().len(), 18);
        assert_eq!(c.chance_pct, 33.33);
        assert!(SuiteConfig::from_json(r#"{}"#).is_err());
        assert!(SuiteConfig::from_json(r#"{"seed":1,"asi_threshold":1.5}"#).is_err());
        assert!(SuiteConfig::from_json(r#"{"seed":1,"baseline_accuracy_pct":20}"#).is_err());
        assert!(SuiteConfig::from_json(
            r#"{"seed":1,"transforms":[{"preset":"noun"},{"name":"noun","kind":"swap"}]}"#
        )
        .is_err());
        assert!(SuiteConfig::from_json(r#"{"seed":1,"bogus":true}"#).is_err());
    }
}
