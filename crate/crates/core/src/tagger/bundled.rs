//! The tagged corpus shipped with the crate and the default model trained
//! from it.

use std::sync::OnceLock;

use super::{parse_pretagged, train_tagger, PretaggedOptions, TaggedSentence, TaggerModel};

const TRAIN: &str = include_str!("../../fixtures/ud-sample/train.vert");
const HELDOUT: &str = include_str!("../../fixtures/ud-sample/heldout.vert");

pub const CORPUS_ID: &str = "ud-sample";
pub const EPOCHS: u32 = 5;
pub const SEED: u64 = 1;

fn parse(text: &str) -> Vec<TaggedSentence> {
    parse_pretagged(text, PretaggedOptions::default())
        .expect("bundled corpus is well-formed")
        .into_iter()
        .map(|s| s.sentence)
        .collect()
}

pub fn train_corpus() -> Vec<TaggedSentence> {
    parse(TRAIN)
}

pub fn heldout_corpus() -> Vec<TaggedSentence> {
    parse(HELDOUT)
}

/// Model trained on the bundled corpus with the default seed and epochs,
/// built on first use.
pub fn model() -> &'static TaggerModel {
    static MODEL: OnceLock<TaggerModel> = OnceLock::new();
    MODEL.get_or_init(|| {
        train_tagger(&train_corpus(), EPOCHS, SEED, CORPUS_ID).expect("bundled corpus is non-empty")
    })
}
