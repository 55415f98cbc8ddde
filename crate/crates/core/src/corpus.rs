//! NLI datasets and prediction files.
//!
//! The canonical on-disk form is JSONL with `uid`, `premise`, `hypothesis`,
//! `label` and optional `genre` / `source` fields. A TSV adapter reads the
//! MNLI column names and the loader accepts the usual field aliases
//! (`sentence1`/`sentence2`, `context`/`hypothesis`, `gold_label`, `pairID`).

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NliLabel {
    Contradiction,
    Entailment,
    Neutral,
}

impl NliLabel {
    /// All labels in lexicographic name order, which is also the tie-break order.
    pub const ALL: [NliLabel; 3] = [
        NliLabel::Contradiction,
        NliLabel::Entailment,
        NliLabel::Neutral,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            NliLabel::Contradiction => "contradiction",
            NliLabel::Entailment => "entailment",
            NliLabel::Neutral => "neutral",
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Option<NliLabel> {
        Self::ALL.get(i).copied()
    }
}

impl fmt::Display for NliLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseLabelError(pub String);

impl fmt::Display for ParseLabelError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "unknown label '{}'", self.0)
    }
}

impl std::error::Error for ParseLabelError {}

impl FromStr for NliLabel {
    type Err = ParseLabelError;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "entailment" => Ok(NliLabel::Entailment),
            "neutral" => Ok(NliLabel::Neutral),
            "contradiction" => Ok(NliLabel::Contradiction),
            _ => Err(ParseLabelError(s.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NliPair {
    pub uid: String,
    pub premise: String,
    pub hypothesis: String,
    pub label: NliLabel,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub genre: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source: Option<String>,
}

impl NliPair {
    pub fn new(
        uid: impl Into<String>,
        premise: impl Into<String>,
        hypothesis: impl Into<String>,
        label: NliLabel,
    ) -> Self {
        NliPair {
            uid: uid.into(),
            premise: premise.into(),
            hypothesis: hypothesis.into(),
            label,
            genre: None,
            source: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Train,
    Dev,
    Test,
}

impl Split {
    /// Guess the split from a file name; anything unrecognised is `Dev`.
    pub fn infer(name: &str) -> Split {
        let lower = name.to_ascii_lowercase();
        if lower.contains("train") {
            Split::Train
        } else if lower.contains("test") {
            Split::Test
        } else {
            Split::Dev
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Dataset {
    pub name: String,
    pub split: Split,
    pub pairs: Vec<NliPair>,
}

impl Dataset {
    /// Builds a dataset, rejecting empty or duplicate uids.
    pub fn new(name: impl Into<String>, split: Split, pairs: Vec<NliPair>) -> Result<Self> {
        check_uids(&pairs)?;
        Ok(Dataset {
            name: name.into(),
            split,
            pairs,
        })
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// Labels present in the dataset, in label order.
    pub fn label_set(&self) -> Vec<NliLabel> {
        let mut seen = [false; 3];
        for p in &self.pairs {
            seen[p.label.index()] = true;
        }
        NliLabel::ALL
            .iter()
            .copied()
            .filter(|l| seen[l.index()])
            .collect()
    }
}

fn check_uids(pairs: &[NliPair]) -> Result<()> {
    let mut seen = HashSet::with_capacity(pairs.len());
    for p in pairs {
        if p.uid.is_empty() {
            return Err(Error::Validation("empty uid".into()));
        }
        if !seen.insert(p.uid.as_str()) {
            return Err(Error::Validation(format!("duplicate uid '{}'", p.uid)));
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Jsonl,
    Tsv,
}

impl Format {
    /// `.tsv` and `.txt` map to TSV, everything else to JSONL.
    pub fn from_path(path: &Path) -> Format {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("tsv") || ext.eq_ignore_ascii_case("txt") => {
                Format::Tsv
            }
            _ => Format::Jsonl,
        }
    }
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "jsonl" | "json" => Ok(Format::Jsonl),
            "tsv" => Ok(Format::Tsv),
            other => Err(Error::Config(format!("unknown format '{other}' (jsonl, tsv)"))),
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct LoadOptions {
    /// Downgrade per-record validation failures to warnings and skip the record.
    pub skip_invalid: bool,
    /// Dataset name; defaults to the file stem.
    pub name: Option<String>,
}

/// Non-fatal events raised while loading.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LoadReport {
    pub warnings: Vec<String>,
    pub skipped: usize,
    pub empty_fields: usize,
}

pub fn load_dataset(path: impl AsRef<Path>, format: Format) -> Result<Dataset> {
    load_dataset_with(path, format, &LoadOptions::default()).map(|(d, _)| d)
}

pub fn load_dataset_with(
    path: impl AsRef<Path>,
    format: Format,
    options: &LoadOptions,
) -> Result<(Dataset, LoadReport)> {
    let path = path.as_ref();
    let name = options.name.clone().unwrap_or_else(|| {
        path.file_stem()
            .and_then(|s| s.to_str())
            .unwrap_or("dataset")
            .to_string()
    });
    let split = Split::infer(&path.file_name().and_then(|s| s.to_str()).unwrap_or(""));
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_dataset(BufReader::new(file), path, name, split, format, options)
}

/// Parses a dataset from in-memory text.
pub fn dataset_from_str(name: &str, text: &str, format: Format) -> Result<Dataset> {
    let split = Split::infer(name);
    read_dataset(text.as_bytes(), Path::new(name), name.to_string(), split, format, &LoadOptions::default())
        .map(|(d, _)| d)
}

fn read_dataset<R: BufRead>(
    reader: R,
    path: &Path,
    name: String,
    split: Split,
    format: Format,
    options: &LoadOptions,
) -> Result<(Dataset, LoadReport)> {
    let records = match format {
        Format::Jsonl => read_jsonl_records(reader, path)?,
        Format::Tsv => read_tsv_records(reader, path)?,
    };

    let mut report = LoadReport::default();
    let mut pairs = Vec::with_capacity(records.len());
    let mut seen = HashSet::new();
    for (line, record) in records {
        match pair_from_record(&name, line, record) {
            Ok(pair) => {
                if !seen.insert(pair.uid.clone()) {
                    let msg = format!("duplicate uid '{}' at line {line}", pair.uid);
                    if options.skip_invalid {
                        report.warnings.push(msg);
                        report.skipped += 1;
                        continue;
                    }
                    return Err(Error::Validation(msg));
                }
                if pair.premise.trim().is_empty() || pair.hypothesis.trim().is_empty() {
                    report.empty_fields += 1;
                    report
                        .warnings
                        .push(format!("empty premise or hypothesis at line {line} (uid '{}')", pair.uid));
                }
                pairs.push(pair);
            }
            Err(e) if options.skip_invalid && e.kind() == crate::ErrorKind::Validation => {
                report.warnings.push(e.to_string());
                report.skipped += 1;
            }
            Err(e) => return Err(e),
        }
    }
    Ok((
        Dataset {
            name,
            split,
            pairs,
        },
        report,
    ))
}

/// A loosely-typed record: field name to string value, with its 1-based line.
type Record = BTreeMap<String, String>;

fn read_jsonl_records<R: BufRead>(reader: R, path: &Path) -> Result<Vec<(usize, Record)>> {
    let mut out = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let lineno = i + 1;
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let value: Value = serde_json::from_str(&line).map_err(|e| Error::MalformedLine {
            line: lineno,
            message: e.to_string(),
        })?;
        let Value::Object(map) = value else {
            return Err(Error::MalformedLine {
                line: lineno,
                message: "expected a JSON object".into(),
            });
        };
        out.push((lineno, flatten_object(map)));
    }
    Ok(out)
}

fn flatten_object(map: Map<String, Value>) -> Record {
    map.into_iter()
        .filter_map(|(k, v)| match v {
            Value::String(s) => Some((k, s)),
            Value::Number(n) => Some((k, n.to_string())),
            Value::Bool(b) => Some((k, b.to_string())),
            _ => None,
        })
        .collect()
}

fn read_tsv_records<R: BufRead>(reader: R, path: &Path) -> Result<Vec<(usize, Record)>> {
    let mut lines = reader.lines();
    let header = match lines.next() {
        Some(h) => h.map_err(|e| Error::io(path, e))?,
        None => return Ok(Vec::new()),
    };
    let columns: Vec<String> = header.split('\t').map(|c| c.trim().to_string()).collect();
    let mut out = Vec::new();
    for (i, line) in lines.enumerate() {
        let lineno = i + 2;
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.is_empty() {
            continue;
        }
        let line = line.strip_suffix('\r').unwrap_or(&line);
        let cells: Vec<&str> = line.split('\t').collect();
        if cells.len() < columns.len() {
            return Err(Error::MalformedLine {
                line: lineno,
                message: format!("expected {} columns, found {}", columns.len(), cells.len()),
            });
        }
        let record = columns
            .iter()
            .zip(cells)
            .map(|(c, v)| (c.clone(), v.to_string()))
            .collect();
        out.push((lineno, record));
    }
    Ok(out)
}

fn first_field<'a>(record: &'a Record, names: &[&str]) -> Option<&'a str> {
    names
        .iter()
        .find_map(|n| record.get(*n))
        .map(String::as_str)
}

fn pair_from_record(name: &str, line: usize, record: Record) -> Result<NliPair> {
    let missing = |field: &str| Error::MalformedLine {
        line,
        message: format!("missing field '{field}'"),
    };
    let anli_schema = record.contains_key("context");
    let premise = first_field(&record, &["premise", "sentence1", "context"])
        .ok_or_else(|| missing("premise"))?
        .to_string();
    let hypothesis = first_field(&record, &["hypothesis", "sentence2"])
        .ok_or_else(|| missing("hypothesis"))?
        .to_string();
    let raw_label = first_field(&record, &["label", "gold_label"]).ok_or_else(|| missing("label"))?;
    let label = parse_record_label(raw_label, anli_schema).ok_or_else(|| Error::UnknownLabel {
        value: raw_label.to_string(),
        line,
    })?;
    let uid = match first_field(&record, &["uid", "pairID", "id"]) {
        Some(u) if !u.is_empty() => u.to_string(),
        _ => format!("{name}:{line}"),
    };
    Ok(NliPair {
        uid,
        premise,
        hypothesis,
        label,
        genre: record.get("genre").filter(|g| !g.is_empty()).cloned(),
        source: record.get("source").filter(|g| !g.is_empty()).cloned(),
    })
}

/// ANLI distributions abbreviate labels to `e` / `n` / `c`; only accepted for
/// records carrying the ANLI `context` field.
fn parse_record_label(raw: &str, anli_schema: bool) -> Option<NliLabel> {
    if let Ok(l) = raw.parse() {
        return Some(l);
    }
    if anli_schema {
        return match raw.trim() {
            "e" | "E" => Some(NliLabel::Entailment),
            "n" | "N" => Some(NliLabel::Neutral),
            "c" | "C" => Some(NliLabel::Contradiction),
            _ => None,
        };
    }
    None
}

pub fn save_dataset(dataset: &Dataset, path: impl AsRef<Path>, format: Format) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    write_dataset(dataset, &mut w, format).map_err(|e| match e {
        WriteError::Io(io) => Error::io(path, io),
        WriteError::Other(e) => e,
    })?;
    w.flush().map_err(|e| Error::io(path, e))
}

enum WriteError {
    Io(std::io::Error),
    Other(Error),
}

impl From<std::io::Error> for WriteError {
    fn from(e: std::io::Error) -> Self {
        WriteError::Io(e)
    }
}

fn write_dataset<W: Write>(dataset: &Dataset, w: &mut W, format: Format) -> Result<(), WriteError> {
    match format {
        Format::Jsonl => {
            for pair in &dataset.pairs {
                let line = serde_json::to_string(pair).map_err(|e| WriteError::Other(e.into()))?;
                writeln!(w, "{line}")?;
            }
        }
        Format::Tsv => {
            writeln!(w, "uid\tpremise\thypothesis\tlabel\tgenre\tsource")?;
            for pair in &dataset.pairs {
                let cells = [
                    pair.uid.as_str(),
                    &pair.premise,
                    &pair.hypothesis,
                    pair.label.as_str(),
                    pair.genre.as_deref().unwrap_or(""),
                    pair.source.as_deref().unwrap_or(""),
                ];
                if let Some(bad) = cells.iter().find(|c| c.contains(['\t', '\n', '\r'])) {
                    return Err(WriteError::Other(Error::Pair {
                        uid: pair.uid.clone(),
                        message: format!("field {bad:?} contains a tab or newline; use JSONL"),
                    }));
                }
                writeln!(w, "{}", cells.join("\t"))?;
            }
        }
    }
    Ok(())
}

/// Serializes a dataset to an in-memory JSONL string.
pub fn dataset_to_jsonl(dataset: &Dataset) -> Result<String> {
    let mut buf = Vec::new();
    write_dataset(dataset, &mut buf, Format::Jsonl).map_err(|e| match e {
        WriteError::Io(io) => Error::io("<memory>", io),
        WriteError::Other(e) => e,
    })?;
    Ok(String::from_utf8(buf).expect("serde_json emits UTF-8"))
}

/// Loads a dataset, picking the format from the file extension.
pub fn load(path: impl AsRef<Path>) -> Result<Dataset> {
    let path = path.as_ref();
    load_dataset(path, Format::from_path(path))
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PredictionSet {
    pub model_name: String,
    pub entries: BTreeMap<String, NliLabel>,
    /// Number of records whose uid had already been seen (last one wins).
    pub duplicates: usize,
}

impl PredictionSet {
    pub fn new(model_name: impl Into<String>) -> Self {
        PredictionSet {
            model_name: model_name.into(),
            ..Default::default()
        }
    }

    pub fn insert(&mut self, uid: impl Into<String>, label: NliLabel) {
        if self.entries.insert(uid.into(), label).is_some() {
            self.duplicates += 1;
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, uid: &str) -> Option<NliLabel> {
        self.entries.get(uid).copied()
    }
}

pub fn load_predictions(path: impl AsRef<Path>, format: Format) -> Result<PredictionSet> {
    let path = path.as_ref();
    let model_name = path
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("predictions")
        .to_string();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let reader = BufReader::new(file);
    let mut set = PredictionSet::new(model_name);
    match format {
        Format::Jsonl => {
            for (line, record) in read_jsonl_records(reader, path)? {
                let uid = first_field(&record, &["uid", "pairID", "id"]).ok_or(Error::MalformedLine {
                    line,
                    message: "missing field 'uid'".into(),
                })?;
                let raw = first_field(&record, &["label", "prediction", "pred"]).ok_or(
                    Error::MalformedLine {
                        line,
                        message: "missing field 'label'".into(),
                    },
                )?;
                let label = raw.parse().map_err(|_| Error::UnknownLabel {
                    value: raw.to_string(),
                    line,
                })?;
                set.insert(uid, label);
            }
        }
        Format::Tsv => {
            for (i, line) in reader.lines().enumerate() {
                let lineno = i + 1;
                let line = line.map_err(|e| Error::io(path, e))?;
                let line = line.trim_end_matches('\r');
                if line.is_empty() {
                    continue;
                }
                let mut cells = line.split('\t');
                let (Some(uid), Some(raw)) = (cells.next(), cells.next()) else {
                    return Err(Error::MalformedLine {
                        line: lineno,
                        message: "expected two tab-separated columns".into(),
                    });
                };
                if lineno == 1 && uid.eq_ignore_ascii_case("uid") {
                    continue;
                }
                let label = raw.parse().map_err(|_| Error::UnknownLabel {
                    value: raw.to_string(),
                    line: lineno,
                })?;
                set.insert(uid, label);
            }
        }
    }
    Ok(set)
}

pub fn save_predictions(set: &PredictionSet, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    for (uid, label) in &set.entries {
        let line = serde_json::json!({ "uid": uid, "label": label });
        writeln!(w, "{line}").map_err(|e| Error::io(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn write_tmp(dir: &tempfile::TempDir, name: &str, body: &str) -> std::path::PathBuf {
        let p = dir.path().join(name);
        let mut f = File::create(&p).unwrap();
        f.write_all(body.as_bytes()).unwrap();
        p
    }

    #[test]
    fn jsonl_line_maps_fields() {
        let dir = tempfile::tempdir().unwrap();
        let p = write_tmp(
            &dir,
            "x.jsonl",
            r#"{"uid":"a1","premise":"P","hypothesis":"H","label":"entailment"}"#,
        );
        let d = load_dataset(&p, Format::Jsonl).unwrap();
        assert_eq!(d.pairs, vec![NliPair::new("a1", "P", "H", NliLabel::Entailment)]);
    }

    #[test]
    fn label_parse_is_case_insensitive() {
        assert_eq!("ENTAILMENT".parse::<NliLabel>().unwrap(), NliLabel::Entailment);
        assert_eq!("Neutral".parse::<NliLabel>().unwrap(), NliLabel::Neutral);
        assert!("maybe".parse::<NliLabel>().is_err());
        assert!("-".parse::<NliLabel>().is_err());
    }

    #[test]
    fn unknown_label_reports_line() {
        let dir = tempfile::tempdir().unwrap();
        let p = write_tmp(
            &dir,
            "x.jsonl",
            "{\"uid\":\"a\",\"premise\":\"P\",\"hypothesis\":\"H\",\"label\":\"neutral\"}\n\
             {\"uid\":\"b\",\"premise\":\"P\",\"hypothesis\":\"H\",\"label\":\"maybe\"}\n",
        );
        let err = load_dataset(&p, Format::Jsonl).unwrap_err();
        assert_eq!(err.to_string(), "unknown label 'maybe' at line 2");
    }

    #[test]
    fn malformed_line_carries_line_number() {
        let dir = tempfile::tempdir().unwrap();
        let p = write_tmp(
            &dir,
            "x.jsonl",
            "{\"uid\":\"a\",\"premise\":\"P\",\"hypothesis\":\"H\",\"label\":\"neutral\"}\n{oops\n",
        );
        match load_dataset(&p, Format::Jsonl).unwrap_err() {
            Error::MalformedLine { line, .. } => assert_eq!(line, 2),
            e => panic!("unexpected {e}"),
        }
    }

    #[test]
    fn missing_uid_is_synthesized_deterministically() {
        let dir = tempfile::tempdir().unwrap();
        let body = "{\"premise\":\"P\",\"hypothesis\":\"H\",\"label\":\"neutral\"}\n\n\
                    {\"sentence1\":\"P2\",\"sentence2\":\"H2\",\"gold_label\":\"contradiction\"}\n";
        let p = write_tmp(&dir, "dev.jsonl", body);
        let a = load_dataset(&p, Format::Jsonl).unwrap();
        let b = load_dataset(&p, Format::Jsonl).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.pairs[0].uid, "dev:1");
        assert_eq!(a.pairs[1].uid, "dev:3");
        assert_eq!(a.pairs[1].premise, "P2");
    }

    #[test]
    fn mnli_unlabeled_rejected_unless_skipped() {
        let dir = tempfile::tempdir().unwrap();
        let body = "pairID\tsentence1\tsentence2\tgold_label\n\
                    1\tA man.\tA person.\tentailment\n\
                    2\tA dog.\tA cat.\t-\n";
        let p = write_tmp(&dir, "train.tsv", body);
        let err = load_dataset(&p, Format::Tsv).unwrap_err();
        assert!(matches!(err, Error::UnknownLabel { line: 3, .. }), "{err}");
        let opts = LoadOptions {
            skip_invalid: true,
            ..Default::default()
        };
        let (d, report) = load_dataset_with(&p, Format::Tsv, &opts).unwrap();
        assert_eq!(d.len(), 1);
        assert_eq!(d.split, Split::Train);
        assert_eq!(report.skipped, 1);
        assert_eq!(report.warnings.len(), 1);
    }

    #[test]
    fn anli_context_schema_accepts_letter_labels() {
        let dir = tempfile::tempdir().unwrap();
        let p = write_tmp(
            &dir,
            "test.jsonl",
            r#"{"uid":"r1","context":"C","hypothesis":"H","label":"c"}"#,
        );
        let d = load_dataset(&p, Format::Jsonl).unwrap();
        assert_eq!(d.pairs[0].label, NliLabel::Contradiction);
        assert_eq!(d.pairs[0].premise, "C");
    }

    #[test]
    fn duplicate_uid_is_validation_error() {
        let dir = tempfile::tempdir().unwrap();
        let line = "{\"uid\":\"a\",\"premise\":\"P\",\"hypothesis\":\"H\",\"label\":\"neutral\"}\n";
        let p = write_tmp(&dir, "x.jsonl", &line.repeat(2));
        assert!(matches!(load_dataset(&p, Format::Jsonl), Err(Error::Validation(_))));
    }

    #[test]
    fn empty_input_field_is_flagged() {
        let dir = tempfile::tempdir().unwrap();
        let p = write_tmp(
            &dir,
            "x.jsonl",
            r#"{"uid":"a","premise":"","hypothesis":"H","label":"neutral"}"#,
        );
        let (d, r) = load_dataset_with(&p, Format::Jsonl, &LoadOptions::default()).unwrap();
        assert_eq!(d.len(), 1);
        assert_eq!(r.empty_fields, 1);
    }

    fn sample() -> Dataset {
        let mut pairs = vec![
            NliPair::new("a", "Un café très chaud.", "Le café est froid.", NliLabel::Contradiction),
            NliPair::new("b", "", "Hypothesis only.", NliLabel::Neutral),
            NliPair::new("c", "Two plants died.", "A plant died.", NliLabel::Entailment),
        ];
        pairs[2].genre = Some("fiction".into());
        Dataset::new("sample", Split::Dev, pairs).unwrap()
    }

    #[test]
    fn round_trip_both_formats() {
        let dir = tempfile::tempdir().unwrap();
        let d = sample();
        for (fmt, name) in [(Format::Jsonl, "sample.jsonl"), (Format::Tsv, "sample.tsv")] {
            let p = dir.path().join(name);
            save_dataset(&d, &p, fmt).unwrap();
            let back = load(&p).unwrap();
            assert_eq!(back.pairs, d.pairs, "{fmt:?}");
        }
    }

    #[test]
    fn tsv_refuses_tabs_in_text() {
        let dir = tempfile::tempdir().unwrap();
        let d = Dataset::new(
            "t",
            Split::Dev,
            vec![NliPair::new("a", "x\ty", "h", NliLabel::Neutral)],
        )
        .unwrap();
        assert!(save_dataset(&d, dir.path().join("t.tsv"), Format::Tsv).is_err());
    }

    #[test]
    fn io_error_names_path() {
        let err = load_dataset("/nonexistent/dir/x.jsonl", Format::Jsonl).unwrap_err();
        assert!(err.to_string().contains("/nonexistent/dir/x.jsonl"));
    }

    #[test]
    fn predictions_last_wins_and_counts_duplicates() {
        let dir = tempfile::tempdir().unwrap();
        let p = write_tmp(
            &dir,
            "p.jsonl",
            "{\"uid\":\"a1\",\"label\":\"neutral\"}\n{\"uid\":\"a2\",\"label\":\"entailment\"}\n",
        );
        let s = load_predictions(&p, Format::Jsonl).unwrap();
        assert_eq!(s.len(), 2);

        let p = write_tmp(
            &dir,
            "d.jsonl",
            "{\"uid\":\"a1\",\"label\":\"neutral\"}\n{\"uid\":\"a1\",\"label\":\"entailment\"}\n",
        );
        let s = load_predictions(&p, Format::Jsonl).unwrap();
        assert_eq!(s.len(), 1);
        assert_eq!(s.duplicates, 1);
        assert_eq!(s.get("a1"), Some(NliLabel::Entailment));

        let p = write_tmp(&dir, "e.jsonl", "");
        assert!(load_predictions(&p, Format::Jsonl).unwrap().is_empty());

        let p = write_tmp(&dir, "t.tsv", "uid\tlabel\na1\tCONTRADICTION\n");
        let s = load_predictions(&p, Format::Tsv).unwrap();
        assert_eq!(s.get("a1"), Some(NliLabel::Contradiction));

        let p = write_tmp(&dir, "bad.tsv", "a1\tmaybe\n");
        assert!(matches!(
            load_predictions(&p, Format::Tsv),
            Err(Error::UnknownLabel { .. })
        ));
    }
}
