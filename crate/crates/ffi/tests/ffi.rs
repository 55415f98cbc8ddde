use std::ffi::{c_char, CStr, CString};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::ptr;

use nli_crashtest_ffi::*;

const JSONL: &str = concat!(
    r#"{"uid":"a","premise":"The cat sat on the mat.","hypothesis":"A cat sat.","label":"entailment"}"#,
    "\n",
    r#"{"uid":"b","premise":"Two dogs ran home quickly.","hypothesis":"No dogs ran.","label":"contradiction"}"#,
    "\n",
    r#"{"uid":"c","premise":"She reads a book.","hypothesis":"She might read.","label":"neutral"}"#,
    "\n",
);

fn c(s: &str) -> CString {
    CString::new(s).unwrap()
}

fn last_error() -> String {
    unsafe { CStr::from_ptr(nct_last_error()) }.to_str().unwrap().to_string()
}

unsafe fn take(s: *mut c_char) -> String {
    let out = CStr::from_ptr(s).to_str().unwrap().to_string();
    nct_string_free(s);
    out
}

fn dataset() -> *mut NctDataset {
    let mut ds = ptr::null_mut();
    let st = unsafe { nct_dataset_from_jsonl(c("toy").as_ptr(), c(JSONL).as_ptr(), &mut ds) };
    assert_eq!(st, NctStatus::Ok, "{}", last_error());
    ds
}

#[test]
fn dataset_round_trip() {
    let ds = dataset();
    unsafe {
        assert_eq!(nct_dataset_len(ds), 3);
        let dir = tempfile::tempdir().unwrap();
        let path = c(dir.path().join("toy.jsonl").to_str().unwrap());
        assert_eq!(nct_dataset_save(ds, path.as_ptr()), NctStatus::Ok);
        let mut back = ptr::null_mut();
        assert_eq!(nct_dataset_load(path.as_ptr(), &mut back), NctStatus::Ok);
        assert_eq!(nct_dataset_len(back), 3);
        let mut a = ptr::null_mut();
        let mut b = ptr::null_mut();
        nct_dataset_to_jsonl(ds, &mut a);
        nct_dataset_to_jsonl(back, &mut b);
        assert_eq!(take(a), take(b));
        nct_dataset_free(back);
        nct_dataset_free(ds);
        assert_eq!(nct_dataset_len(ptr::null()), 0);
    }
}

#[test]
fn null_and_bad_utf8_are_invalid_arguments() {
    unsafe {
        let mut out = ptr::null_mut();
        assert_eq!(nct_dataset_load(ptr::null(), &mut out), NctStatus::InvalidArgument);
        assert!(last_error().contains("path"));
        let bad = [0xffu8, 0xfe, 0];
        assert_eq!(
            nct_dataset_load(bad.as_ptr().cast(), &mut out),
            NctStatus::InvalidArgument
        );
        assert!(out.is_null());
        let mut ov = 0.0;
        assert_eq!(
            nct_lexical_overlap(c("a").as_ptr(), ptr::null(), &mut ov),
            NctStatus::InvalidArgument
        );
    }
}

#[test]
fn status_codes_follow_error_kind() {
    let ds = dataset();
    unsafe {
        let mut out = ptr::null_mut();
        let st = nct_dataset_load(c("/nonexistent/x.jsonl").as_ptr(), &mut out);
        assert_eq!(st, NctStatus::Usage);
        let st = nct_dataset_from_jsonl(c("x").as_ptr(), c("{not json}\n").as_ptr(), &mut out);
        assert_eq!(st, NctStatus::Validation);
        let spec = c(r#"{"kind":"drop","tags":["NOUNS"]}"#);
        let st = nct_corrupt(ds, spec.as_ptr(), ptr::null(), &mut out, ptr::null_mut());
        assert_eq!(st, NctStatus::Usage);
        assert!(last_error().contains("NOUNS"), "{}", last_error());
        nct_dataset_free(ds);
    }
}

#[test]
fn success_clears_last_error() {
    unsafe {
        let mut out = ptr::null_mut();
        nct_dataset_load(ptr::null(), &mut out);
        assert!(!last_error().is_empty());
        let mut ov = 0.0;
        nct_lexical_overlap(c("x").as_ptr(), c("x").as_ptr(), &mut ov);
        assert!(last_error().is_empty());
    }
}

#[test]
fn tag_and_corrupt_with_bundled_model() {
    let ds = dataset();
    unsafe {
        let mut tagger = ptr::null_mut();
        assert_eq!(nct_tagger_bundled(&mut tagger), NctStatus::Ok);
        let mut json = ptr::null_mut();
        assert_eq!(nct_tagger_tag(tagger, c("The cat sat.").as_ptr(), &mut json), NctStatus::Ok);
        let tags: Vec<(String, String)> = serde_json::from_str(&take(json)).unwrap();
        assert_eq!(tags[0], ("The".to_string(), "DET".to_string()));
        assert_eq!(tags.last().unwrap().1, "PUNCT");

        let mut out = ptr::null_mut();
        let mut report = ptr::null_mut();
        let spec = c(r#"{"kind":"keep","tags":["NOUN","VERB"],"apply_to":"both"}"#);
        assert_eq!(nct_corrupt(ds, spec.as_ptr(), tagger, &mut out, &mut report), NctStatus::Ok);
        let report: serde_json::Value = serde_json::from_str(&take(report)).unwrap();
        assert_eq!(report["pairs_processed"], 3);
        assert!(report["total_tokens_removed"].as_u64().unwrap() > 0);
        assert_eq!(nct_dataset_len(out), 3);

        let dir = tempfile::tempdir().unwrap();
        let path = c(dir.path().join("t.model").to_str().unwrap());
        assert_eq!(nct_tagger_save(tagger, path.as_ptr()), NctStatus::Ok);
        let mut loaded = ptr::null_mut();
        assert_eq!(nct_tagger_load(path.as_ptr(), &mut loaded), NctStatus::Ok);
        nct_tagger_free(loaded);
        nct_tagger_free(tagger);
        nct_dataset_free(out);
        nct_dataset_free(ds);
    }
}

#[test]
fn overlap_matches_core() {
    let mut v = -1.0;
    let st = unsafe { nct_lexical_overlap(c("The cat sat.").as_ptr(), c("A cat ran.").as_ptr(), &mut v) };
    assert_eq!(st, NctStatus::Ok);
    assert!((v - 1.0 / 3.0).abs() < 1e-12, "{v}");
}

fn synth_jsonl(n: usize, seed: u64) -> String {
    let ds = nli_crashtest::synth::nli_pairs("bias", n, seed, Default::default());
    nli_crashtest::corpus::dataset_to_jsonl(&ds).unwrap()
}

#[test]
fn probe_and_suite() {
    let mut ds = ptr::null_mut();
    unsafe {
        let text = c(&synth_jsonl(600, 3));
        assert_eq!(nct_dataset_from_jsonl(c("bias").as_ptr(), text.as_ptr(), &mut ds), NctStatus::Ok);
        let mut probe = ptr::null_mut();
        assert_eq!(nct_probe_train(ds, c("hyp_bow").as_ptr(), 3, 1, &mut probe), NctStatus::Ok);
        let mut json = ptr::null_mut();
        assert_eq!(nct_probe_eval(probe, ds, &mut json), NctStatus::Ok);
        let eval: serde_json::Value = serde_json::from_str(&take(json)).unwrap();
        assert!(eval["result"]["accuracy_pct"].as_f64().unwrap() > 80.0);
        let mut bad = ptr::null_mut();
        assert_eq!(nct_probe_train(ds, c("bow").as_ptr(), 3, 1, &mut bad), NctStatus::Usage);
        nct_probe_free(probe);

        let config = c(r#"{"seed":7,"mode":"probe"}"#);
        let mut report = ptr::null_mut();
        let mut verdict = NctVerdict::Robust;
        let st = nct_run_suite(ds, config.as_ptr(), ptr::null(), c("json").as_ptr(), &mut report, &mut verdict);
        assert_eq!(st, NctStatus::Ok, "{}", last_error());
        let parsed: serde_json::Value = serde_json::from_str(&take(report)).unwrap();
        assert_eq!(parsed["verdict"]["status"], "artefact-prone");
        assert_eq!(verdict, NctVerdict::ArtefactProne);

        let st = nct_run_suite(ds, c("{}").as_ptr(), ptr::null(), c("json").as_ptr(), &mut report, ptr::null_mut());
        assert_eq!(st, NctStatus::Usage);
        nct_dataset_free(ds);
    }
}

fn target_dir() -> PathBuf {
    let exe = std::env::current_exe().unwrap();
    exe.parent().unwrap().parent().unwrap().to_path_buf()
}

#[test]
fn header_is_generated_and_current() {
    let header = Path::new(env!("CARGO_MANIFEST_DIR")).join("include/nli_crashtest.h");
    let text = std::fs::read_to_string(header).unwrap();
    for name in [
        "nct_last_error",
        "nct_dataset_load",
        "nct_corrupt",
        "nct_run_suite",
        "nct_string_free",
        "typedef struct NctDataset NctDataset;",
        "NCT_STATUS_INVALID_ARGUMENT = 5",
    ] {
        assert!(text.contains(name), "header lacks {name}");
    }
}

#[test]
fn c_program_links_and_runs() {
    let cc = std::env::var("CC").unwrap_or_else(|_| "cc".into());
    if Command::new(&cc).arg("--version").output().is_err() {
        eprintln!("no C compiler; skipping");
        return;
    }
    let manifest = Path::new(env!("CARGO_MANIFEST_DIR"));
    let lib_dir = target_dir();
    let lib = lib_dir.join("libnli_crashtest_ffi.so");
    if !lib.exists() {
        eprintln!("{} not built; skipping", lib.display());
        return;
    }
    let dir = tempfile::tempdir().unwrap();
    let exe = dir.path().join("smoke");
    let status = Command::new(&cc)
        .arg(manifest.join("tests/c/smoke.c"))
        .arg("-I")
        .arg(manifest.join("include"))
        .arg("-L")
        .arg(&lib_dir)
        .arg("-lnli_crashtest_ffi")
        .arg(format!("-Wl,-rpath,{}", lib_dir.display()))
        .arg("-o")
        .arg(&exe)
        .status()
        .unwrap();
    assert!(status.success());
    let out = Command::new(&exe).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("\"DET\""));
    assert!(stdout.contains("pairs_processed"));
}
