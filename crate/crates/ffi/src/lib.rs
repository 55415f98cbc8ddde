//! C ABI for nli-crashtest.
//!
//! Objects cross the boundary as opaque handles that the caller frees with
//! the matching `*_free` function. Every fallible call returns an
//! [`NctStatus`]; on failure [`nct_last_error`] describes what went wrong on
//! the calling thread. Structured results are returned as JSON strings owned
//! by the caller and released with [`nct_string_free`].

#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;

use nli_crashtest::corpus::{self, Dataset, NliLabel, NliPair};
use nli_crashtest::diagnostics::{emit_report, run_suite, ReportFormat, SuiteConfig, VerdictStatus};
use nli_crashtest::metrics::lexical_overlap;
use nli_crashtest::probes::{eval_probe, train_probe, Featurizer, ProbeModel};
use nli_crashtest::tagger::{self, bundled, load_pretagged, TaggerModel};
use nli_crashtest::transforms::{corrupt_dataset, TagSource, TransformSpec};
use nli_crashtest::{Error, ErrorKind};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NctStatus {
    Ok = 0,
    /// Bad configuration, unknown names, unreadable files.
    Usage = 1,
    /// Malformed or inconsistent data.
    Validation = 2,
    /// A bug; the library caught a panic.
    Internal = 4,
    /// A required pointer was null or a string was not UTF-8.
    InvalidArgument = 5,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NctVerdict {
    Robust = 0,
    Inconclusive = 1,
    ArtefactProne = 2,
}

/// An NLI dataset.
pub struct NctDataset {
    inner: Dataset,
}

/// A part-of-speech tagger model.
pub struct NctTagger {
    inner: TaggerModel,
}

/// A trained artefact probe.
pub struct NctProbe {
    inner: ProbeModel,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_last_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

enum Failure {
    Lib(Error),
    Arg(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

type FfiResult<T> = Result<T, Failure>;

fn guard(f: impl FnOnce() -> FfiResult<()>) -> NctStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_last_error("");
            NctStatus::Ok
        }
        Ok(Err(Failure::Arg(msg))) => {
            set_last_error(&msg);
            NctStatus::InvalidArgument
        }
        Ok(Err(Failure::Lib(e))) => {
            set_last_error(&e.to_string());
            match e.kind() {
                ErrorKind::Usage => NctStatus::Usage,
                ErrorKind::Validation => NctStatus::Validation,
                ErrorKind::Internal => NctStatus::Internal,
            }
        }
        Err(_) => {
            set_last_error("internal error: panic inside nli-crashtest");
            NctStatus::Internal
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, name: &str) -> FfiResult<&'a str> {
    if p.is_null() {
        return Err(Failure::Arg(format!("{name} is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure::Arg(format!("{name} is not valid UTF-8")))
}

unsafe fn ref_arg<'a, T>(p: *const T, name: &str) -> FfiResult<&'a T> {
    p.as_ref().ok_or_else(|| Failure::Arg(format!("{name} is null")))
}

fn out_arg<T>(p: *mut T, name: &str) -> FfiResult<*mut T> {
    if p.is_null() {
        Err(Failure::Arg(format!("{name} is null")))
    } else {
        Ok(p)
    }
}

fn into_c_string(s: String) -> *mut c_char {
    CString::new(s.replace('\0', " ")).unwrap_or_default().into_raw()
}

fn json<T: serde::Serialize>(value: &T) -> FfiResult<String> {
    serde_json::to_string(value).map_err(|e| Failure::Lib(Error::from(e)))
}

/// Message for the last failed call on this thread; empty after a success.
/// The pointer stays valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn nct_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn nct_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Releases a string returned by this library. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn nct_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Loads a JSONL or TSV dataset; the format follows the file extension.
#[no_mangle]
pub unsafe extern "C" fn nct_dataset_load(path: *const c_char, out: *mut *mut NctDataset) -> NctStatus {
    guard(|| {
        let path = str_arg(path, "path")?;
        let out = out_arg(out, "out")?;
        let inner = corpus::load(path)?;
        *out = Box::into_raw(Box::new(NctDataset { inner }));
        Ok(())
    })
}

/// Builds a dataset from JSONL text.
#[no_mangle]
pub unsafe extern "C" fn nct_dataset_from_jsonl(
    name: *const c_char,
    jsonl: *const c_char,
    out: *mut *mut NctDataset,
) -> NctStatus {
    guard(|| {
        let name = str_arg(name, "name")?;
        let text = str_arg(jsonl, "jsonl")?;
        let out = out_arg(out, "out")?;
        let inner = corpus::dataset_from_str(name, text, corpus::Format::Jsonl)?;
        *out = Box::into_raw(Box::new(NctDataset { inner }));
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn nct_dataset_save(dataset: *const NctDataset, path: *const c_char) -> NctStatus {
    guard(|| {
        let d = ref_arg(dataset, "dataset")?;
        let path = str_arg(path, "path")?;
        corpus::save_dataset(&d.inner, path, corpus::Format::from_path(Path::new(path)))?;
        Ok(())
    })
}

/// Serializes the dataset as JSONL into a new string.
#[no_mangle]
pub unsafe extern "C" fn nct_dataset_to_jsonl(dataset: *const NctDataset, out: *mut *mut c_char) -> NctStatus {
    guard(|| {
        let d = ref_arg(dataset, "dataset")?;
        let out = out_arg(out, "out")?;
        *out = into_c_string(corpus::dataset_to_jsonl(&d.inner)?);
        Ok(())
    })
}

/// Number of pairs; 0 for a null handle.
#[no_mangle]
pub unsafe extern "C" fn nct_dataset_len(dataset: *const NctDataset) -> usize {
    dataset.as_ref().map_or(0, |d| d.inner.len())
}

#[no_mangle]
pub unsafe extern "C" fn nct_dataset_free(dataset: *mut NctDataset) {
    if !dataset.is_null() {
        drop(Box::from_raw(dataset));
    }
}

/// The model trained on the bundled corpus (seed 1, 5 epochs).
#[no_mangle]
pub unsafe extern "C" fn nct_tagger_bundled(out: *mut *mut NctTagger) -> NctStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        *out = Box::into_raw(Box::new(NctTagger {
            inner: bundled::model().clone(),
        }));
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn nct_tagger_load(path: *const c_char, out: *mut *mut NctTagger) -> NctStatus {
    guard(|| {
        let path = str_arg(path, "path")?;
        let out = out_arg(out, "out")?;
        let inner = TaggerModel::load(path)?;
        *out = Box::into_raw(Box::new(NctTagger { inner }));
        Ok(())
    })
}

/// Trains on a vertical `form TAG` file with universal tags.
#[no_mangle]
pub unsafe extern "C" fn nct_tagger_train(
    corpus_path: *const c_char,
    epochs: u32,
    seed: u64,
    out: *mut *mut NctTagger,
) -> NctStatus {
    guard(|| {
        let path = str_arg(corpus_path, "corpus_path")?;
        let out = out_arg(out, "out")?;
        let sentences = load_pretagged(path)?;
        let inner = tagger::train_tagger(&sentences, epochs, seed, path)?;
        *out = Box::into_raw(Box::new(NctTagger { inner }));
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn nct_tagger_save(tagger: *const NctTagger, path: *const c_char) -> NctStatus {
    guard(|| {
        let t = ref_arg(tagger, "tagger")?;
        let path = str_arg(path, "path")?;
        t.inner.save(path)?;
        Ok(())
    })
}

/// Tokenizes and tags `text`; writes `[["form","TAG"],...]` JSON to `out`.
#[no_mangle]
pub unsafe extern "C" fn nct_tagger_tag(
    tagger: *const NctTagger,
    text: *const c_char,
    out: *mut *mut c_char,
) -> NctStatus {
    guard(|| {
        let t = ref_arg(tagger, "tagger")?;
        let text = str_arg(text, "text")?;
        let out = out_arg(out, "out")?;
        let tagged: Vec<(String, &str)> = t
            .inner
            .tag_text(text)
            .tokens
            .into_iter()
            .map(|(tok, tag)| (tok.form, tag.as_str()))
            .collect();
        *out = into_c_string(json(&tagged)?);
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn nct_tagger_free(tagger: *mut NctTagger) {
    if !tagger.is_null() {
        drop(Box::from_raw(tagger));
    }
}

/// Applies a transform described as JSON, e.g.
/// `{"kind":"drop","tags":["NOUN"],"seed":13,"apply_to":"both"}`.
/// `tagger` may be null for transforms that need no tags. `report_json` may
/// be null; otherwise it receives the removal report.
#[no_mangle]
pub unsafe extern "C" fn nct_corrupt(
    dataset: *const NctDataset,
    spec_json: *const c_char,
    tagger: *const NctTagger,
    out: *mut *mut NctDataset,
    report_json: *mut *mut c_char,
) -> NctStatus {
    guard(|| {
        let d = ref_arg(dataset, "dataset")?;
        let spec_text = str_arg(spec_json, "spec_json")?;
        let out = out_arg(out, "out")?;
        let spec: TransformSpec =
            serde_json::from_str(spec_text).map_err(|e| Error::Config(format!("transform spec: {e}")))?;
        let source = tagger.as_ref().map(|t| TagSource::Model(&t.inner));
        let (inner, report) = corrupt_dataset(&d.inner, &spec, source.as_ref())?;
        if !report_json.is_null() {
            *report_json = into_c_string(json(&report)?);
        }
        *out = Box::into_raw(Box::new(NctDataset { inner }));
        Ok(())
    })
}

/// Share of hypothesis word types found in the premise, in `[0, 1]`.
#[no_mangle]
pub unsafe extern "C" fn nct_lexical_overlap(
    premise: *const c_char,
    hypothesis: *const c_char,
    out: *mut f64,
) -> NctStatus {
    guard(|| {
        let p = str_arg(premise, "premise")?;
        let h = str_arg(hypothesis, "hypothesis")?;
        let out = out_arg(out, "out")?;
        *out = lexical_overlap(&NliPair::new("", p, h, NliLabel::Neutral));
        Ok(())
    })
}

/// `featurizer` is `hyp_bow`, `pair_overlap` or `hyp_bow+pair_overlap`.
#[no_mangle]
pub unsafe extern "C" fn nct_probe_train(
    dataset: *const NctDataset,
    featurizer: *const c_char,
    epochs: u32,
    seed: u64,
    out: *mut *mut NctProbe,
) -> NctStatus {
    guard(|| {
        let d = ref_arg(dataset, "dataset")?;
        let featurizer: Featurizer = str_arg(featurizer, "featurizer")?.parse()?;
        let out = out_arg(out, "out")?;
        let inner = train_probe(&d.inner, featurizer, epochs, seed)?;
        *out = Box::into_raw(Box::new(NctProbe { inner }));
        Ok(())
    })
}

/// Writes `{"result":{...},"confusion":[[...]]}` JSON to `out`.
#[no_mangle]
pub unsafe extern "C" fn nct_probe_eval(
    probe: *const NctProbe,
    dataset: *const NctDataset,
    out: *mut *mut c_char,
) -> NctStatus {
    guard(|| {
        let p = ref_arg(probe, "probe")?;
        let d = ref_arg(dataset, "dataset")?;
        let out = out_arg(out, "out")?;
        *out = into_c_string(json(&eval_probe(&p.inner, &d.inner)?)?);
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn nct_probe_save(probe: *const NctProbe, path: *const c_char) -> NctStatus {
    guard(|| {
        let p = ref_arg(probe, "probe")?;
        p.inner.save(str_arg(path, "path")?)?;
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn nct_probe_load(path: *const c_char, out: *mut *mut NctProbe) -> NctStatus {
    guard(|| {
        let path = str_arg(path, "path")?;
        let out = out_arg(out, "out")?;
        let inner = ProbeModel::load(path)?;
        *out = Box::into_raw(Box::new(NctProbe { inner }));
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn nct_probe_free(probe: *mut NctProbe) {
    if !probe.is_null() {
        drop(Box::from_raw(probe));
    }
}

/// Runs the diagnostic suite from a JSON config and renders the report in
/// `format` (`json`, `markdown`, `csv` or `overlap-csv`). `tagger` may be
/// null, in which case word-class transforms use the bundled model.
/// `verdict` may be null.
#[no_mangle]
pub unsafe extern "C" fn nct_run_suite(
    dataset: *const NctDataset,
    config_json: *const c_char,
    tagger: *const NctTagger,
    format: *const c_char,
    out: *mut *mut c_char,
    verdict: *mut NctVerdict,
) -> NctStatus {
    guard(|| {
        let d = ref_arg(dataset, "dataset")?;
        let config = SuiteConfig::from_json(str_arg(config_json, "config_json")?)?;
        let format: ReportFormat = str_arg(format, "format")?.parse()?;
        let out = out_arg(out, "out")?;
        let model = match tagger.as_ref() {
            Some(t) => &t.inner,
            None => bundled::model(),
        };
        let report = run_suite(&d.inner, &config, Some(&TagSource::Model(model)))?;
        if !verdict.is_null() {
            *verdict = match report.verdict.status {
                VerdictStatus::Robust => NctVerdict::Robust,
                VerdictStatus::Inconclusive => NctVerdict::Inconclusive,
                VerdictStatus::ArtefactProne => NctVerdict::ArtefactProne,
            };
        }
        *out = into_c_string(emit_report(&report, format)?);
        Ok(())
    })
}
