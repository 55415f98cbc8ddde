//! Crash-test diagnostics for natural language inference (NLI) datasets.
//!
//! The crate corrupts NLI corpora in controlled ways (dropping or keeping
//! whole word classes, shuffling n-grams, swapping premise and hypothesis,
//! removing the premise), measures what the corruption did, and scores how
//! much a dataset still allows correct predictions once sentence meaning has
//! been destroyed. A dataset on which models keep performing well after such
//! damage is leaking annotation artefacts.
//!
//! Module map:
//!
//! * [`corpus`]: datasets, labels and prediction files (JSONL / TSV).
//! * [`tokenizer`]: treebank-style tokenization and detokenization.
//! * [`tagger`]: averaged-perceptron universal POS tagger.
//! * [`transforms`]: the corruption transforms and dataset-level runner.
//! * [`metrics`]: removal statistics, lexical overlap, accuracy, deltas.
//! * [`probes`]: shallow linear probes standing in for fine-tuned models.
//! * [`diagnostics`]: suite orchestration, verdict and report rendering.
//! * [`synth`]: seeded generators for tagged sentences and NLI fixtures.

pub mod corpus;
pub mod diagnostics;
mod error;
pub mod metrics;
pub mod model_file;
pub mod perceptron;
pub mod probes;
pub mod synth;
pub mod tagger;
pub mod tokenizer;
pub mod transforms;

pub use error::{Error, ErrorKind, Result};
