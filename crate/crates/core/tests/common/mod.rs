#![allow(dead_code)]

use std::path::Path;
use std::process::{Command, Output};

use nli_crashtest::corpus::{Dataset, NliLabel, NliPair, PredictionSet, Split};

pub fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_nli-crashtest"));
    cmd.env_remove("NLI_CRASHTEST_MODEL");
    cmd
}

pub fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("spawn nli-crashtest")
}

pub fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

pub fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

pub fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

pub fn path_str(p: &Path) -> &str {
    p.to_str().expect("utf-8 temp path")
}

/// `n` gold pairs with labels cycling through the three classes.
pub fn gold(name: &str, n: usize) -> Dataset {
    let pairs = (0..n)
        .map(|i| {
            let label = NliLabel::from_index(i % 3).unwrap();
            NliPair::new(format!("{name}-{i}"), format!("premise {i} here ."), format!("hypothesis {i} ."), label)
        })
        .collect();
    Dataset::new(name, Split::Dev, pairs).unwrap()
}

/// Predictions scoring exactly `accuracy_pct` on `gold`: the first `k`
/// pairs are predicted correctly and the rest get the next label.
pub fn predictions_at(gold: &Dataset, accuracy_pct: f64, model: &str) -> PredictionSet {
    let k = (accuracy_pct / 100.0 * gold.len() as f64).round() as usize;
    assert!(
        (k as f64 * 100.0 / gold.len() as f64 - accuracy_pct).abs() < 1e-9,
        "{accuracy_pct}% is not representable on {} pairs",
        gold.len()
    );
    let mut set = PredictionSet::new(model);
    for (i, p) in gold.pairs.iter().enumerate() {
        let label = if i < k {
            p.label
        } else {
            NliLabel::from_index((p.label.index() + 1) % 3).unwrap()
        };
        set.insert(p.uid.clone(), label);
    }
    set
}
