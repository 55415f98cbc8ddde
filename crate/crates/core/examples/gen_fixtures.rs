//! Regenerates the bundled tagged corpus under `fixtures/ud-sample`.
//!
//! cargo run -p nli-crashtest --example gen_fixtures

use std::fs::File;
use std::io::BufWriter;
use std::path::Path;

use nli_crashtest::synth::tagged_sentences;
use nli_crashtest::tagger::{write_pretagged, PretaggedSentence};

const TRAIN: usize = 4500;
const HELDOUT: usize = 500;
const SEED: u64 = 20_240_601;

fn write(path: &Path, sentences: Vec<nli_crashtest::tagger::TaggedSentence>) -> std::io::Result<()> {
    let named: Vec<PretaggedSentence> = sentences
        .into_iter()
        .map(|sentence| PretaggedSentence { id: None, sentence })
        .collect();
    let mut w = BufWriter::new(File::create(path)?);
    write_pretagged(&mut w, &named)
}

fn main() -> std::io::Result<()> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/ud-sample");
    std::fs::create_dir_all(&dir)?;
    let mut all = tagged_sentences(TRAIN + HELDOUT, SEED);
    let heldout = all.split_off(TRAIN);
    write(&dir.join("train.vert"), all)?;
    write(&dir.join("heldout.vert"), heldout)?;
    println!("wrote {}", dir.display());
    Ok(())
}
