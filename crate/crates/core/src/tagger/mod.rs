//! Averaged-perceptron part-of-speech tagger over the universal tagset.
//!
//! Greedy left-to-right decoding with the classic feature template: bias,
//! normalised word, suffixes of length 1-3, first character, previous tag,
//! previous two tags, neighbouring words and their suffixes, and word shape.
//! Punctuation-only and numeric-only tokens bypass the model.

pub mod bundled;
mod pos;
mod pretagged;

use std::collections::BTreeMap;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::model_file::{ModelFile, FORMAT_VERSION};
use crate::perceptron::{AveragedPerceptron, Feature, Weights};
use crate::tokenizer::Token;
use crate::{Error, Result};

pub use pos::UniversalPos;
pub use pretagged::{
    load_pretagged, load_pretagged_with, parse_pretagged, write_pretagged, PretaggedOptions,
    PretaggedSentence,
};

const MODEL_KIND: &str = "tagger";

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TaggedSentence {
    pub tokens: Vec<(Token, UniversalPos)>,
}

impl TaggedSentence {
    pub fn new(tokens: Vec<(Token, UniversalPos)>) -> Self {
        TaggedSentence { tokens }
    }

    /// Convenience constructor from `(form, tag)` pairs.
    pub fn from_pairs<S: AsRef<str>>(pairs: &[(S, UniversalPos)]) -> Self {
        TaggedSentence {
            tokens: pairs
                .iter()
                .map(|(f, t)| (Token::new(f.as_ref()), *t))
                .collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn forms(&self) -> Vec<&str> {
        self.tokens.iter().map(|(t, _)| t.form.as_str()).collect()
    }

    pub fn tags(&self) -> Vec<UniversalPos> {
        self.tokens.iter().map(|(_, t)| *t).collect()
    }

    pub fn plain_tokens(&self) -> Vec<Token> {
        self.tokens.iter().map(|(t, _)| t.clone()).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TaggerMetadata {
    pub corpus: String,
    pub epochs: u32,
    pub seed: u64,
    pub format_version: u32,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TaggerModel {
    weights: Weights,
    pub metadata: TaggerMetadata,
}

/// Tag forced on a token without consulting the model, if any.
pub fn lexical_override(form: &str) -> Option<UniversalPos> {
    if !form.is_empty() && form.chars().all(crate::tokenizer::is_punct_char) {
        return Some(UniversalPos::Punct);
    }
    let numeric = form.chars().any(|c| c.is_ascii_digit())
        && form.chars().all(|c| c.is_ascii_digit() || c == '.' || c == ',');
    numeric.then_some(UniversalPos::Num)
}

fn normalize(word: &str) -> String {
    match word.chars().next() {
        Some(c) if c.is_ascii_digit() => "!D".to_string(),
        _ => word.to_lowercase(),
    }
}

fn suffix(word: &str, n: usize) -> &str {
    let count = word.chars().count();
    if count <= n {
        return word;
    }
    let start = word.char_indices().nth(count - n).map_or(0, |(i, _)| i);
    &word[start..]
}

fn shape(word: &str) -> String {
    let mut out = String::new();
    let mut last = None;
    for c in word.chars() {
        let s = if c.is_uppercase() {
            'X'
        } else if c.is_lowercase() {
            'x'
        } else if c.is_numeric() {
            'd'
        } else {
            c
        };
        if last != Some(s) {
            out.push(s);
            last = Some(s);
        }
    }
    out
}

/// Normalised forms padded with two boundary symbols on each side.
fn context(forms: &[&str]) -> Vec<String> {
    let mut ctx = Vec::with_capacity(forms.len() + 4);
    ctx.push("-START-".to_string());
    ctx.push("-START2-".to_string());
    ctx.extend(forms.iter().map(|f| normalize(f)));
    ctx.push("-END-".to_string());
    ctx.push("-END2-".to_string());
    ctx
}

fn features(i: usize, raw: &str, ctx: &[String], prev: &str, prev2: &str) -> Vec<Feature> {
    let c = i + 2;
    let word = &ctx[c];
    let first: String = raw.chars().take(1).collect();
    [
        "bias".to_string(),
        format!("w {word}"),
        format!("s1 {}", suffix(word, 1)),
        format!("s2 {}", suffix(word, 2)),
        format!("s3 {}", suffix(word, 3)),
        format!("p1 {first}"),
        format!("t-1 {prev}"),
        format!("t-2 {prev2} {prev}"),
        format!("w-1 {}", ctx[c - 1]),
        format!("w+1 {}", ctx[c + 1]),
        format!("s-1 {}", suffix(&ctx[c - 1], 3)),
        format!("s+1 {}", suffix(&ctx[c + 1], 3)),
        format!("shape {}", shape(raw)),
    ]
    .into_iter()
    .map(|f| (f, 1.0))
    .collect()
}

/// Trains a tagger. Deterministic in `(corpus, epochs, seed)`.
pub fn train_tagger(
    corpus: &[TaggedSentence],
    epochs: u32,
    seed: u64,
    corpus_id: &str,
) -> Result<TaggerModel> {
    if corpus.is_empty() {
        return Err(Error::Degenerate("cannot train a tagger on an empty corpus".into()));
    }
    if epochs == 0 {
        return Err(Error::Config("epochs must be positive".into()));
    }
    let mut perceptron = AveragedPerceptron::new(UniversalPos::ALL.len());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<usize> = (0..corpus.len()).collect();
    for _ in 0..epochs {
        order.shuffle(&mut rng);
        for &si in &order {
            let sentence = &corpus[si];
            let forms = sentence.forms();
            let ctx = context(&forms);
            let mut prev = "-START-";
            let mut prev2 = "-START2-";
            for (i, (token, gold)) in sentence.tokens.iter().enumerate() {
                let guess = match lexical_override(&token.form) {
                    Some(t) => t,
                    None => {
                        let feats = features(i, &token.form, &ctx, prev, prev2);
                        let guess = UniversalPos::ALL[perceptron.predict(&feats)];
                        perceptron.update(gold.index(), guess.index(), &feats);
                        guess
                    }
                };
                prev2 = prev;
                prev = guess.as_str();
            }
        }
    }
    Ok(TaggerModel {
        weights: perceptron.finish(),
        metadata: TaggerMetadata {
            corpus: corpus_id.to_string(),
            epochs,
            seed,
            format_version: FORMAT_VERSION,
        },
    })
}

impl TaggerModel {
    /// A model from explicit weights; used for baselines and tests.
    pub fn from_weights(weights: Weights, corpus: &str) -> Result<Self> {
        if weights.n_classes() != UniversalPos::ALL.len() {
            return Err(Error::Validation("tagger weights must cover the 12 universal tags".into()));
        }
        Ok(TaggerModel {
            weights,
            metadata: TaggerMetadata {
                corpus: corpus.to_string(),
                epochs: 0,
                seed: 0,
                format_version: FORMAT_VERSION,
            },
        })
    }

    pub fn weights(&self) -> &Weights {
        &self.weights
    }

    pub fn tag(&self, tokens: &[Token]) -> TaggedSentence {
        let forms: Vec<&str> = tokens.iter().map(|t| t.form.as_str()).collect();
        let ctx = context(&forms);
        let mut prev = "-START-";
        let mut prev2 = "-START2-";
        let mut out = Vec::with_capacity(tokens.len());
        for (i, token) in tokens.iter().enumerate() {
            let tag = lexical_override(&token.form).unwrap_or_else(|| {
                let feats = features(i, &token.form, &ctx, prev, prev2);
                UniversalPos::ALL[self.weights.predict(&feats)]
            });
            prev2 = prev;
            prev = tag.as_str();
            out.push((token.clone(), tag));
        }
        TaggedSentence { tokens: out }
    }

    /// Tokenizes and tags raw text.
    pub fn tag_text(&self, text: &str) -> TaggedSentence {
        self.tag(&crate::tokenizer::tokenize(text))
    }

    pub fn to_model_file(&self) -> ModelFile {
        let mut metadata = BTreeMap::new();
        metadata.insert("corpus".to_string(), self.metadata.corpus.clone());
        metadata.insert("epochs".to_string(), self.metadata.epochs.to_string());
        metadata.insert("seed".to_string(), self.metadata.seed.to_string());
        ModelFile {
            kind: MODEL_KIND.to_string(),
            classes: UniversalPos::names().into_iter().map(String::from).collect(),
            metadata,
            weights: self.weights.clone(),
        }
    }

    pub fn from_model_file(file: ModelFile) -> Result<Self> {
        if file.kind != MODEL_KIND {
            return Err(Error::Validation(format!(
                "expected a tagger model, found kind '{}'",
                file.kind
            )));
        }
        if file.classes != UniversalPos::names() {
            return Err(Error::Validation("tagger model class list does not match the universal tagset".into()));
        }
        let meta = |k: &str| file.metadata.get(k).cloned().unwrap_or_default();
        let metadata = TaggerMetadata {
            corpus: meta("corpus"),
            epochs: meta("epochs").parse().unwrap_or(0),
            seed: meta("seed").parse().unwrap_or(0),
            format_version: FORMAT_VERSION,
        };
        Ok(TaggerModel {
            weights: file.weights,
            metadata,
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

/// Fraction of tokens whose predicted tag equals the gold tag.
pub fn evaluate_tagger(model: &TaggerModel, corpus: &[TaggedSentence]) -> Result<f64> {
    let mut total = 0usize;
    let mut correct = 0usize;
    for sentence in corpus {
        let predicted = model.tag(&sentence.plain_tokens());
        total += sentence.len();
        correct += predicted
            .tokens
            .iter()
            .zip(&sentence.tokens)
            .filter(|((_, p), (_, g))| p == g)
            .count();
    }
    if total == 0 {
        return Err(Error::Degenerate("cannot evaluate on a corpus without tokens".into()));
    }
    Ok(correct as f64 / total as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use UniversalPos::*;

    fn sentence() -> TaggedSentence {
        TaggedSentence::from_pairs(&[
            ("The", Det),
            ("man", Noun),
            ("was", Verb),
            ("6", Num),
            ("foot", Noun),
            ("tall", Adj),
            (".", Punct),
        ])
    }

    #[test]
    fn memorizes_a_repeated_sentence() {
        let corpus = vec![sentence(); 5];
        let model = train_tagger(&corpus, 3, 1, "toy").unwrap();
        assert_eq!(model.tag(&sentence().plain_tokens()), sentence());
        assert_eq!(evaluate_tagger(&model, &corpus).unwrap(), 1.0);
    }

    #[test]
    fn training_is_deterministic() {
        let corpus = vec![
            sentence(),
            TaggedSentence::from_pairs(&[("Dogs", Noun), ("run", Verb), ("fast", Adv), ("!", Punct)]),
            TaggedSentence::from_pairs(&[("They", Pron), ("run", Noun), ("?", Punct)]),
        ];
        let a = train_tagger(&corpus, 4, 9, "toy").unwrap();
        let b = train_tagger(&corpus, 4, 9, "toy").unwrap();
        assert_eq!(a.to_text(), b.to_text());
    }

    #[test]
    fn empty_and_override_cases() {
        let model = train_tagger(&[sentence()], 1, 1, "toy").unwrap();
        assert!(model.tag(&[]).is_empty());
        let six = model.tag(&[Token::new("6")]);
        assert_eq!(six.tags(), [Num]);
        let p = model.tag(&[Token::new("..."), Token::new("1,000.5")]);
        assert_eq!(p.tags(), [Punct, Num]);
    }

    #[test]
    fn constant_noun_model_scores_noun_share() {
        let mut w = Weights::empty(12);
        w.set("bias", Noun.index(), 1.0);
        let model = TaggerModel::from_weights(w, "constant").unwrap();
        // 2 nouns out of 5 tokens, no punctuation or numbers
        let corpus = vec![TaggedSentence::from_pairs(&[
            ("dogs", Noun),
            ("chase", Verb),
            ("cats", Noun),
            ("very", Adv),
            ("quickly", Adv),
        ])];
        assert!((evaluate_tagger(&model, &corpus).unwrap() - 0.40).abs() < 1e-12);
    }

    #[test]
    fn rejects_degenerate_training() {
        assert!(train_tagger(&[], 1, 1, "x").is_err());
        assert!(train_tagger(&[sentence()], 0, 1, "x").is_err());
        assert!(evaluate_tagger(&train_tagger(&[sentence()], 1, 1, "x").unwrap(), &[]).is_err());
    }

    #[test]
    fn model_file_round_trip() {
        let model = train_tagger(&[sentence(), sentence()], 2, 3, "toy corpus").unwrap();
        let back = TaggerModel::from_model_file(ModelFile::parse(&model.to_text()).unwrap()).unwrap();
        assert_eq!(back, model);
        assert_eq!(back.metadata.corpus, "toy corpus");
    }

    #[test]
    fn feature_helpers() {
        assert_eq!(suffix("walking", 3), "ing");
        assert_eq!(suffix("a", 3), "a");
        assert_eq!(suffix("café", 2), "fé");
        assert_eq!(normalize("1990"), "!D");
        assert_eq!(normalize("Hello"), "hello");
        assert_eq!(shape("McDonald's"), "XxXx'x");
        assert_eq!(shape("U.S."), "X.X.");
    }
}
