//! Shallow linear probes for dataset artefacts.
//!
//! A probe is an averaged perceptron over cheap surface features. If it beats
//! chance on data whose meaning has been destroyed, the labels leak through
//! something other than meaning.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::{Dataset, NliLabel, NliPair, PredictionSet};
use crate::metrics::{overlap_counts, EvalResult};
use crate::model_file::{ModelFile, FORMAT_VERSION};
use crate::perceptron::{AveragedPerceptron, Feature, Weights};
use crate::tokenizer::tokenize;
use crate::{Error, Result};

const MODEL_KIND: &str = "probe";
const BIAS: &str = "bias";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub enum Featurizer {
    #[default]
    #[serde(rename = "hyp_bow")]
    HypBow,
    #[serde(rename = "pair_overlap")]
    PairOverlap,
    #[serde(rename = "hyp_bow+pair_overlap")]
    Combined,
}

impl Featurizer {
    pub const ALL: [Featurizer; 3] = [Featurizer::HypBow, Featurizer::PairOverlap, Featurizer::Combined];

    pub fn as_str(self) -> &'static str {
        match self {
            Featurizer::HypBow => "hyp_bow",
            Featurizer::PairOverlap => "pair_overlap",
            Featurizer::Combined => "hyp_bow+pair_overlap",
        }
    }
}

impl fmt::Display for Featurizer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Featurizer {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Featurizer::ALL
            .into_iter()
            .find(|f| f.as_str() == s)
            .ok_or_else(|| Error::Config(format!("unknown featurizer '{s}' (hyp_bow, pair_overlap, hyp_bow+pair_overlap)")))
    }
}

/// Sparse feature map; zero values are never stored.
pub type FeatureVector = BTreeMap<String, f64>;

fn bump(v: &mut FeatureVector, key: String) {
    *v.entry(key).or_insert(0.0) += 1.0;
}

fn hyp_bow(pair: &NliPair, out: &mut FeatureVector) {
    let words: Vec<String> = tokenize(&pair.hypothesis)
        .into_iter()
        .map(|t| t.form.to_lowercase())
        .collect();
    for w in &words {
        bump(out, format!("uni:{w}"));
    }
    for w in words.windows(2) {
        bump(out, format!("bi:{}_{}", w[0], w[1]));
    }
}

/// Signed logarithmic bucket: 0, ±1, ±2 (2-3), ±3 (4-7), ...
fn log_bucket(x: i64) -> i64 {
    let b = 64 - x.unsigned_abs().leading_zeros() as i64;
    b * x.signum()
}

fn pair_overlap(pair: &NliPair, out: &mut FeatureVector) {
    let (shared, total) = overlap_counts(pair);
    let bucket = if total == 0 { 0 } else { shared * 10 / total };
    out.insert(format!("ovl:{bucket}"), 1.0);
    let diff = tokenize(&pair.hypothesis).len() as i64 - tokenize(&pair.premise).len() as i64;
    out.insert(format!("len:{}", log_bucket(diff)), 1.0);
    out.insert(format!("shr:{}", log_bucket(shared as i64)), 1.0);
}

pub fn featurize(pair: &NliPair, featurizer: Featurizer) -> FeatureVector {
    let mut v = FeatureVector::new();
    match featurizer {
        Featurizer::HypBow => hyp_bow(pair, &mut v),
        Featurizer::PairOverlap => pair_overlap(pair, &mut v),
        Featurizer::Combined => {
            hyp_bow(pair, &mut v);
            pair_overlap(pair, &mut v);
        }
    }
    v
}

fn perceptron_features(pair: &NliPair, featurizer: Featurizer) -> Vec<Feature> {
    let mut f: Vec<Feature> = featurize(pair, featurizer).into_iter().collect();
    f.push((BIAS.to_string(), 1.0));
    f
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProbeMetadata {
    pub training_set: String,
    pub epochs: u32,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProbeModel {
    weights: Weights,
    pub featurizer: Featurizer,
    pub metadata: ProbeMetadata,
}

pub fn train_probe(dataset: &Dataset, featurizer: Featurizer, epochs: u32, seed: u64) -> Result<ProbeModel> {
    if dataset.is_empty() {
        return Err(Error::Degenerate("cannot train a probe on an empty dataset".into()));
    }
    if dataset.label_set().len() < 2 {
        return Err(Error::Degenerate(format!(
            "dataset '{}' has a single label; a probe needs at least two",
            dataset.name
        )));
    }
    if epochs == 0 {
        return Err(Error::Config("epochs must be at least 1".into()));
    }
    let examples: Vec<(Vec<Feature>, usize)> = dataset
        .pairs
        .par_iter()
        .map(|p| (perceptron_features(p, featurizer), p.label.index()))
        .collect();
    let mut model = AveragedPerceptron::new(NliLabel::ALL.len());
    let mut order: Vec<usize> = (0..examples.len()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..epochs {
        order.shuffle(&mut rng);
        for &i in &order {
            let (feats, gold) = &examples[i];
            let guess = model.predict(feats);
            model.update(*gold, guess, feats);
        }
    }
    Ok(ProbeModel {
        weights: model.finish(),
        featurizer,
        metadata: ProbeMetadata {
            training_set: dataset.name.clone(),
            epochs,
            seed,
        },
    })
}

/// Evaluation output with a confusion matrix indexed `[gold][predicted]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeEval {
    pub result: EvalResult,
    pub confusion: [[u64; 3]; 3],
}

impl ProbeModel {
    pub fn weights(&self) -> &Weights {
        &self.weights
    }

    pub fn predict(&self, pair: &NliPair) -> NliLabel {
        let i = self.weights.predict(&perceptron_features(pair, self.featurizer));
        NliLabel::from_index(i).expect("three classes")
    }

    pub fn predict_dataset(&self, dataset: &Dataset) -> PredictionSet {
        let labels: Vec<(String, NliLabel)> = dataset
            .pairs
            .par_iter()
            .map(|p| (p.uid.clone(), self.predict(p)))
            .collect();
        let mut set = PredictionSet::new(format!("probe-{}", self.featurizer));
        for (uid, label) in labels {
            set.insert(uid, label);
        }
        set
    }

    pub fn to_model_file(&self) -> ModelFile {
        let metadata = [
            ("featurizer", self.featurizer.to_string()),
            ("training_set", self.metadata.training_set.clone()),
            ("epochs", self.metadata.epochs.to_string()),
            ("seed", self.metadata.seed.to_string()),
            ("format_version", FORMAT_VERSION.to_string()),
        ]
        .into_iter()
        .map(|(k, v)| (k.to_string(), v))
        .collect();
        ModelFile {
            kind: MODEL_KIND.into(),
            classes: NliLabel::ALL.iter().map(|l| l.as_str().to_string()).collect(),
            metadata,
            weights: self.weights.clone(),
        }
    }

    pub fn from_model_file(file: ModelFile) -> Result<Self> {
        if file.kind != MODEL_KIND {
            return Err(Error::Validation(format!("expected a probe model, found kind '{}'", file.kind)));
        }
        let expected: Vec<&str> = NliLabel::ALL.iter().map(|l| l.as_str()).collect();
        if file.classes != expected {
            return Err(Error::Validation(format!(
                "probe classes {:?} do not match {:?}",
                file.classes, expected
            )));
        }
        let meta = |k: &str| file.metadata.get(k).cloned().unwrap_or_default();
        let featurizer: Featurizer = meta("featurizer").parse()?;
        let number = |k: &str| -> Result<u64> {
            meta(k)
                .parse()
                .map_err(|_| Error::Validation(format!("probe metadata '{k}' is not a number")))
        };
        Ok(ProbeModel {
            featurizer,
            metadata: ProbeMetadata {
                training_set: meta("training_set"),
                epochs: number("epochs")? as u32,
                seed: number("seed")?,
            },
            weights: file.weights,
        })
    }

    pub fn to_text(&self) -> String {
        self.to_model_file().to_text()
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        self.to_model_file().save(path)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_model_file(ModelFile::load(path)?)
    }
}

pub fn eval_probe(model: &ProbeModel, dataset: &Dataset) -> Result<ProbeEval> {
    if dataset.is_empty() {
        return Err(Error::Degenerate("cannot evaluate on an empty dataset".into()));
    }
    let predicted: Vec<NliLabel> = dataset.pairs.par_iter().map(|p| model.predict(p)).collect();
    let mut confusion = [[0u64; 3]; 3];
    let mut correct = 0;
    for (pair, guess) in dataset.pairs.iter().zip(&predicted) {
        confusion[pair.label.index()][guess.index()] += 1;
        correct += (pair.label == *guess) as u64;
    }
    Ok(ProbeEval {
        result: EvalResult::from_counts(correct, dataset.len() as u64, 0, None),
        confusion,
    })
}

/// Seeded split into `(train, held_out)`; each part keeps the original order.
pub fn split_dataset(dataset: &Dataset, train_fraction: f64, seed: u64) -> Result<(Dataset, Dataset)> {
    if !(train_fraction > 0.0 && train_fraction < 1.0) {
        return Err(Error::Config(format!("train fraction {train_fraction} is not in (0, 1)")));
    }
    let n = dataset.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let cut = ((n as f64) * train_fraction).round() as usize;
    let mut train_idx = order[..cut].to_vec();
    let mut held_idx = order[cut..].to_vec();
    train_idx.sort_unstable();
    held_idx.sort_unstable();
    let part = |idx: &[usize], suffix: &str| Dataset {
        name: format!("{}-{suffix}", dataset.name),
        split: dataset.split,
        pairs: idx.iter().map(|&i| dataset.pairs[i].clone()).collect(),
    };
    Ok((part(&train_idx, "train"), part(&held_idx, "heldout")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::Split;
    use crate::metrics::lexical_overlap;

    fn pair(uid: &str, p: &str, h: &str, l: NliLabel) -> NliPair {
        NliPair::new(uid, p, h, l)
    }

    #[test]
    fn hyp_bow_features() {
        let v = featurize(&pair("u", "whatever", "not here", NliLabel::Neutral), Featurizer::HypBow);
        let expected: FeatureVector = [("uni:not", 1.0), ("uni:here", 1.0), ("bi:not_here", 1.0)]
            .into_iter()
            .map(|(k, v)| (k.to_string(), v))
            .collect();
        assert_eq!(v, expected);
        let v = featurize(&pair("u", "", "No no", NliLabel::Neutral), Featurizer::HypBow);
        assert_eq!(v["uni:no"], 2.0);
        assert!(featurize(&pair("u", "x", "", NliLabel::Neutral), Featurizer::HypBow).is_empty());
    }

    #[test]
    fn overlap_buckets() {
        let same = pair("u", "A dog runs.", "A dog runs.", NliLabel::Entailment);
        let v = featurize(&same, Featurizer::PairOverlap);
        assert!(v.contains_key("ovl:10") && v.contains_key("len:0"));

        let half = pair("u", "the cat sleeps", "the dog sleeps now", NliLabel::Neutral);
        assert_eq!(lexical_overlap(&half), 0.5);
        assert!(featurize(&half, Featurizer::PairOverlap).contains_key("ovl:5"));

        let both = featurize(&half, Featurizer::Combined);
        assert!(both.contains_key("ovl:5") && both.contains_key("uni:dog"));
        assert!(both.values().all(|v| *v != 0.0));
        assert_eq!([log_bucket(0), log_bucket(1), log_bucket(-3), log_bucket(4)], [0, 1, -2, 3]);
    }

    fn memorize_set() -> Dataset {
        Dataset::new(
            "three",
            Split::Train,
            vec![
                pair("1", "p", "cats are not here", NliLabel::Contradiction),
                pair("2", "p", "someone is outside", NliLabel::Entailment),
                pair("3", "p", "it might rain", NliLabel::Neutral),
            ],
        )
        .unwrap()
    }

    #[test]
    fn memorizes_tiny_set_and_confusion_rows_sum() {
        let d = memorize_set();
        let m = train_probe(&d, Featurizer::HypBow, 5, 1).unwrap();
        let e = eval_probe(&m, &d).unwrap();
        assert_eq!(e.result.accuracy_pct, 100.0);
        for label in NliLabel::ALL {
            let row: u64 = e.confusion[label.index()].iter().sum();
            assert_eq!(row, d.pairs.iter().filter(|p| p.label == label).count() as u64);
        }
    }

    #[test]
    fn constant_probe_scores_chance() {
        let m = ProbeModel {
            weights: Weights::empty(3),
            featurizer: Featurizer::HypBow,
            metadata: ProbeMetadata {
                training_set: "none".into(),
                epochs: 1,
                seed: 0,
            },
        };
        let e = eval_probe(&m, &memorize_set()).unwrap();
        assert!((e.result.accuracy_pct - 33.333).abs() < 0.01);
        assert_eq!(e.confusion[1][0], 1);
    }

    #[test]
    fn degenerate_inputs() {
        let one = Dataset::new("one", Split::Train, vec![pair("1", "p", "h", NliLabel::Neutral)]).unwrap();
        assert!(matches!(train_probe(&one, Featurizer::HypBow, 1, 1), Err(Error::Degenerate(_))));
        let empty = Dataset::new("e", Split::Train, vec![]).unwrap();
        assert!(train_probe(&empty, Featurizer::HypBow, 1, 1).is_err());
        let m = train_probe(&memorize_set(), Featurizer::HypBow, 1, 1).unwrap();
        assert!(eval_probe(&m, &empty).is_err());
        assert!(train_probe(&memorize_set(), Featurizer::HypBow, 0, 1).is_err());
    }

    #[test]
    fn deterministic_and_round_trips() {
        let d = memorize_set();
        let a = train_probe(&d, Featurizer::Combined, 3, 9).unwrap();
        let b = train_probe(&d, Featurizer::Combined, 3, 9).unwrap();
        assert_eq!(a, b);
        let back = ProbeModel::from_model_file(ModelFile::parse(&a.to_text()).unwrap()).unwrap();
        assert_eq!(back, a);
        assert!("bow".parse::<Featurizer>().is_err());
    }

    #[test]
    fn split_is_seeded_and_partitions() {
        let pairs = (0..10).map(|i| pair(&format!("{i}"), "p", "h", NliLabel::Neutral)).collect();
        let d = Dataset::new("d", Split::Train, pairs).unwrap();
        let (tr, ho) = split_dataset(&d, 0.8, 3).unwrap();
        assert_eq!((tr.len(), ho.len()), (8, 2));
        assert_eq!(split_dataset(&d, 0.8, 3).unwrap(), (tr.clone(), ho.clone()));
        let mut all: Vec<_> = tr.pairs.iter().chain(&ho.pairs).map(|p| p.uid.clone()).collect();
        all.sort();
        let mut orig: Vec<_> = d.pairs.iter().map(|p| p.uid.clone()).collect();
        orig.sort();
        assert_eq!(all, orig);
        assert!(split_dataset(&d, 1.0, 3).is_err());
    }
}
