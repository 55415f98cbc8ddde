//! Corruption transforms over NLI pairs and datasets.
//!
//! Word-class transforms need tags, which come either from a [`TaggerModel`]
//! or from a [`PretaggedIndex`] built from an external vertical file. Labels
//! are never touched; sentences that end up empty are kept as empty strings.

use std::borrow::Cow;
use std::collections::{HashMap, HashSet};
use std::fmt;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use sha2::{Digest, Sha256};

use crate::corpus::{Dataset, NliLabel, NliPair};
use crate::tagger::{PretaggedSentence, TaggedSentence, TaggerModel, UniversalPos};
use crate::tokenizer::{detokenize, token_count, tokenize, Token};
use crate::{Error, Result};

/// A set of universal tags, stored as a bitmask.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct TagSet(u16);

impl TagSet {
    pub const EMPTY: TagSet = TagSet(0);

    pub fn all() -> TagSet {
        UniversalPos::ALL.iter().copied().collect()
    }

    pub fn contains(self, tag: UniversalPos) -> bool {
        self.0 & (1 << tag.index()) != 0
    }

    pub fn insert(&mut self, tag: UniversalPos) {
        self.0 |= 1 << tag.index();
    }

    pub fn union(self, other: TagSet) -> TagSet {
        TagSet(self.0 | other.0)
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn iter(self) -> impl Iterator<Item = UniversalPos> {
        UniversalPos::ALL.into_iter().filter(move |t| self.contains(*t))
    }

    /// Parses a comma-separated list such as `NOUN,VERB`.
    pub fn parse_list(list: &str) -> Result<TagSet> {
        list.split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(str::parse::<UniversalPos>)
            .collect()
    }
}

impl FromIterator<UniversalPos> for TagSet {
    fn from_iter<I: IntoIterator<Item = UniversalPos>>(iter: I) -> Self {
        let mut s = TagSet::EMPTY;
        for t in iter {
            s.insert(t);
        }
        s
    }
}

impl fmt::Display for TagSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<&str> = self.iter().map(|t| t.as_str()).collect();
        f.write_str(&names.join(","))
    }
}

impl Serialize for TagSet {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(self.iter())
    }
}

impl<'de> Deserialize<'de> for TagSet {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        Ok(Vec::<UniversalPos>::deserialize(d)?.into_iter().collect())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TransformKind {
    DropPos(TagSet),
    KeepPos(TagSet),
    ShuffleNgrams { n: usize },
    SwapPair,
    HypothesisOnly,
    Identity,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ApplyTo {
    #[default]
    Both,
    PremiseOnly,
    HypothesisOnly,
}

impl ApplyTo {
    fn covers(self, field: Field) -> bool {
        matches!(
            (self, field),
            (ApplyTo::Both, _)
                | (ApplyTo::PremiseOnly, Field::Premise)
                | (ApplyTo::HypothesisOnly, Field::Hypothesis)
        )
    }
}

impl std::str::FromStr for ApplyTo {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.replace('-', "_").as_str() {
            "both" => Ok(ApplyTo::Both),
            "premise_only" | "premise" => Ok(ApplyTo::PremiseOnly),
            "hypothesis_only" | "hypothesis" => Ok(ApplyTo::HypothesisOnly),
            other => Err(Error::Config(format!(
                "unknown apply-to '{other}' (both, premise_only, hypothesis_only)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Field {
    Premise,
    Hypothesis,
}

impl Field {
    pub fn as_str(self) -> &'static str {
        match self {
            Field::Premise => "premise",
            Field::Hypothesis => "hypothesis",
        }
    }
}

/// One corruption: what to do, the shuffle seed, and which side(s) it touches.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TransformSpec {
    pub kind: TransformKind,
    pub seed: u64,
    pub apply_to: ApplyTo,
}

impl TransformSpec {
    pub fn new(kind: TransformKind) -> Result<Self> {
        let spec = TransformSpec {
            kind,
            seed: 0,
            apply_to: ApplyTo::Both,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn identity() -> Self {
        TransformSpec {
            kind: TransformKind::Identity,
            seed: 0,
            apply_to: ApplyTo::Both,
        }
    }

    pub fn drop(tags: TagSet) -> Result<Self> {
        Self::new(TransformKind::DropPos(tags))
    }

    pub fn keep(tags: TagSet) -> Result<Self> {
        Self::new(TransformKind::KeepPos(tags))
    }

    pub fn shuffle(n: usize, seed: u64) -> Result<Self> {
        Ok(Self::new(TransformKind::ShuffleNgrams { n })?.with_seed(seed))
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_apply_to(mut self, apply_to: ApplyTo) -> Self {
        self.apply_to = apply_to;
        self
    }

    pub fn validate(&self) -> Result<()> {
        match self.kind {
            TransformKind::DropPos(t) | TransformKind::KeepPos(t) if t.is_empty() => {
                Err(Error::Config("word-class transforms need a non-empty tag set".into()))
            }
            TransformKind::ShuffleNgrams { n: 0 } => Err(Error::Config("shuffle n must be >= 1".into())),
            _ => Ok(()),
        }
    }

    pub fn needs_tags(&self) -> bool {
        matches!(self.kind, TransformKind::DropPos(_) | TransformKind::KeepPos(_))
    }

    /// Transforms that destroy content words: any drop touching NOUN or VERB,
    /// and every keep-only transform.
    pub fn is_content_word(&self) -> bool {
        match self.kind {
            TransformKind::DropPos(t) => t.contains(UniversalPos::Noun) || t.contains(UniversalPos::Verb),
            TransformKind::KeepPos(_) => true,
            _ => false,
        }
    }

    /// Name used when a configuration does not provide one.
    pub fn default_name(&self) -> String {
        let lower = |t: TagSet, sep: &str| {
            t.iter()
                .map(|p| p.as_str().to_ascii_lowercase())
                .collect::<Vec<_>>()
                .join(sep)
        };
        match self.kind {
            TransformKind::DropPos(t) => lower(t, "-"),
            TransformKind::KeepPos(t) => format!("keep-{}", lower(t, "+")),
            TransformKind::ShuffleNgrams { n } => format!("shuffle-n{n}"),
            TransformKind::SwapPair => "swap".into(),
            TransformKind::HypothesisOnly => "hypothesis-only".into(),
            TransformKind::Identity => "original".into(),
        }
    }
}

#[derive(Serialize, Deserialize)]
struct SpecRepr {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    preset: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    kind: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    tags: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    n: Option<usize>,
    #[serde(default)]
    seed: u64,
    #[serde(default)]
    apply_to: ApplyTo,
}

impl SpecRepr {
    fn from_spec(spec: &TransformSpec, name: Option<String>) -> Self {
        let (kind, tags, n) = match spec.kind {
            TransformKind::DropPos(t) => ("drop", Some(t), None),
            TransformKind::KeepPos(t) => ("keep", Some(t), None),
            TransformKind::ShuffleNgrams { n } => ("shuffle", None, Some(n)),
            TransformKind::SwapPair => ("swap", None, None),
            TransformKind::HypothesisOnly => ("hypothesis_only", None, None),
            TransformKind::Identity => ("identity", None, None),
        };
        SpecRepr {
            name,
            preset: None,
            kind: Some(kind.to_string()),
            tags: tags.map(|t| t.iter().map(|p| p.as_str().to_string()).collect()),
            n,
            seed: spec.seed,
            apply_to: spec.apply_to,
        }
    }

    fn into_named(self) -> Result<NamedTransform> {
        if let Some(preset_name) = &self.preset {
            let p = preset(preset_name)?;
            let spec = p.spec.with_seed(self.seed).with_apply_to(self.apply_to);
            return Ok(NamedTransform {
                name: self.name.unwrap_or(p.name),
                spec,
            });
        }
        let kind = self
            .kind
            .as_deref()
            .ok_or_else(|| Error::Config("transform needs 'kind' or 'preset'".into()))?;
        let tags = || -> Result<TagSet> {
            let list = self.tags.as_ref().ok_or_else(|| Error::Config(format!("'{kind}' needs 'tags'")))?;
            list.iter().map(|t| t.parse::<UniversalPos>()).collect()
        };
        let kind = match kind.replace('-', "_").as_str() {
            "drop" | "drop_pos" => TransformKind::DropPos(tags()?),
            "keep" | "keep_pos" => TransformKind::KeepPos(tags()?),
            "shuffle" | "shuffle_ngrams" => TransformKind::ShuffleNgrams {
                n: self.n.ok_or_else(|| Error::Config("'shuffle' needs 'n'".into()))?,
            },
            "swap" | "swap_pair" => TransformKind::SwapPair,
            "hypothesis_only" => TransformKind::HypothesisOnly,
            "identity" => TransformKind::Identity,
            other => return Err(Error::Config(format!("unknown transform kind '{other}'"))),
        };
        let spec = TransformSpec {
            kind,
            seed: self.seed,
            apply_to: self.apply_to,
        };
        spec.validate()?;
        Ok(NamedTransform {
            name: self.name.unwrap_or_else(|| spec.default_name()),
            spec,
        })
    }
}

impl Serialize for TransformSpec {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        SpecRepr::from_spec(self, None).serialize(s)
    }
}

impl<'de> Deserialize<'de> for TransformSpec {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = SpecRepr::deserialize(d)?;
        repr.into_named().map(|n| n.spec).map_err(serde::de::Error::custom)
    }
}

/// A transform with the row name it reports under.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NamedTransform {
    pub name: String,
    pub spec: TransformSpec,
}

impl Serialize for NamedTransform {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        SpecRepr::from_spec(&self.spec, Some(self.name.clone())).serialize(s)
    }
}

impl<'de> Deserialize<'de> for NamedTransform {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        SpecRepr::deserialize(d)?
            .into_named()
            .map_err(serde::de::Error::custom)
    }
}

const DROP_PRESETS: [(&str, UniversalPos); 8] = [
    ("num", UniversalPos::Num),
    ("conj", UniversalPos::Conj),
    ("adv", UniversalPos::Adv),
    ("pron", UniversalPos::Pron),
    ("adj", UniversalPos::Adj),
    ("det", UniversalPos::Det),
    ("verb", UniversalPos::Verb),
    ("noun", UniversalPos::Noun),
];

const KEEP_PRESETS: [(&str, &[UniversalPos]); 5] = [
    ("noun+pron+verb", &[UniversalPos::Noun, UniversalPos::Pron, UniversalPos::Verb]),
    ("noun+adv+verb", &[UniversalPos::Noun, UniversalPos::Adv, UniversalPos::Verb]),
    ("noun+verb", &[UniversalPos::Noun, UniversalPos::Verb]),
    ("noun+verb+adj", &[UniversalPos::Noun, UniversalPos::Verb, UniversalPos::Adj]),
    (
        "noun+verb+adv+adj",
        &[UniversalPos::Noun, UniversalPos::Verb, UniversalPos::Adv, UniversalPos::Adj],
    ),
];

/// The eight single-class drops followed by the five keep-only combinations.
pub fn presets() -> Vec<NamedTransform> {
    let drops = DROP_PRESETS.iter().map(|(name, tag)| NamedTransform {
        name: name.to_string(),
        spec: TransformSpec::identity().with_kind(TransformKind::DropPos([*tag].into_iter().collect())),
    });
    let keeps = KEEP_PRESETS.iter().map(|(name, tags)| NamedTransform {
        name: name.to_string(),
        spec: TransformSpec::identity().with_kind(TransformKind::KeepPos(tags.iter().copied().collect())),
    });
    drops.chain(keeps).collect()
}

impl TransformSpec {
    fn with_kind(mut self, kind: TransformKind) -> Self {
        self.kind = kind;
        self
    }
}

pub fn preset(name: &str) -> Result<NamedTransform> {
    let key = name.trim().to_ascii_lowercase();
    presets().into_iter().find(|p| p.name == key).ok_or_else(|| {
        let names: Vec<String> = presets().into_iter().map(|p| p.name).collect();
        Error::Config(format!("unknown preset '{name}' (valid: {})", names.join(", ")))
    })
}

/// Presets, n-gram shuffles for n = 1..3, swap and hypothesis-only.
pub fn default_suite_transforms(seed: u64) -> Vec<NamedTransform> {
    let mut out = presets();
    for n in 1..=3 {
        out.push(NamedTransform {
            name: format!("shuffle-n{n}"),
            spec: TransformSpec::identity()
                .with_kind(TransformKind::ShuffleNgrams { n })
                .with_seed(seed),
        });
    }
    out.push(NamedTransform {
        name: "swap".into(),
        spec: TransformSpec::identity().with_kind(TransformKind::SwapPair),
    });
    out.push(NamedTransform {
        name: "hypothesis-only".into(),
        spec: TransformSpec::identity().with_kind(TransformKind::HypothesisOnly),
    });
    out
}

/// Token-removal accounting for one transform run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct TransformReport {
    pub pairs_processed: u64,
    pub premise_tokens_removed: u64,
    pub hypothesis_tokens_removed: u64,
    pub total_tokens_removed: u64,
    pub pairs_left_empty: u64,
}

impl TransformReport {
    pub fn add(&mut self, other: &TransformReport) {
        self.pairs_processed += other.pairs_processed;
        self.premise_tokens_removed += other.premise_tokens_removed;
        self.hypothesis_tokens_removed += other.hypothesis_tokens_removed;
        self.total_tokens_removed += other.total_tokens_removed;
        self.pairs_left_empty += other.pairs_left_empty;
    }

    pub(crate) fn for_pair(premise_removed: u64, hypothesis_removed: u64, left_empty: bool) -> Self {
        TransformReport {
            pairs_processed: 1,
            premise_tokens_removed: premise_removed,
            hypothesis_tokens_removed: hypothesis_removed,
            total_tokens_removed: premise_removed + hypothesis_removed,
            pairs_left_empty: left_empty as u64,
        }
    }
}

pub fn drop_pos(sentence: &TaggedSentence, tags: TagSet) -> Vec<Token> {
    filter_by_tag(sentence, |t| !tags.contains(t))
}

pub fn keep_pos(sentence: &TaggedSentence, tags: TagSet) -> Vec<Token> {
    filter_by_tag(sentence, |t| tags.contains(t))
}

fn filter_by_tag(sentence: &TaggedSentence, keep: impl Fn(UniversalPos) -> bool) -> Vec<Token> {
    sentence
        .tokens
        .iter()
        .filter(|(_, t)| keep(*t))
        .map(|(tok, _)| tok.clone())
        .collect()
}

/// Cuts `tokens` into consecutive chunks of `n` (the last may be shorter) and
/// permutes the chunks uniformly at random.
pub fn shuffle_ngrams<T: Clone, R: Rng + ?Sized>(tokens: &[T], n: usize, rng: &mut R) -> Vec<T> {
    assert!(n >= 1, "n-gram size must be positive");
    let mut chunks: Vec<&[T]> = tokens.chunks(n).collect();
    if chunks.len() <= 1 {
        return tokens.to_vec();
    }
    chunks.shuffle(rng);
    chunks.concat()
}

/// What a label-consistent model should do after premise and hypothesis swap.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SwapExpectation {
    /// Contradiction and neutral are symmetric.
    SameLabel,
    /// Entailment is directional; the prediction should change.
    DifferentLabel,
}

impl SwapExpectation {
    pub fn for_label(label: NliLabel) -> Self {
        match label {
            NliLabel::Entailment => SwapExpectation::DifferentLabel,
            NliLabel::Contradiction | NliLabel::Neutral => SwapExpectation::SameLabel,
        }
    }

    pub fn is_consistent(self, before: NliLabel, after: NliLabel) -> bool {
        match self {
            SwapExpectation::SameLabel => before == after,
            SwapExpectation::DifferentLabel => before != after,
        }
    }
}

pub fn swap_pair(pair: &NliPair) -> (NliPair, SwapExpectation) {
    let mut swapped = pair.clone();
    std::mem::swap(&mut swapped.premise, &mut swapped.hypothesis);
    (swapped, SwapExpectation::for_label(pair.label))
}

pub fn hypothesis_only(pair: &NliPair) -> NliPair {
    NliPair {
        premise: String::new(),
        ..pair.clone()
    }
}

/// Seed for one field of one pair, derived from the run seed so that results
/// do not depend on processing order.
pub fn field_seed(seed: u64, uid: &str, field: Field) -> u64 {
    let mut h = Sha256::new();
    h.update(seed.to_le_bytes());
    h.update((uid.len() as u64).to_le_bytes());
    h.update(uid.as_bytes());
    h.update(field.as_str().as_bytes());
    let digest = h.finalize();
    u64::from_le_bytes(digest[..8].try_into().expect("32-byte digest"))
}

/// Tagged sentences keyed by `(uid, field)`.
#[derive(Debug, Clone, Default)]
pub struct PretaggedIndex {
    map: HashMap<(String, Field), TaggedSentence>,
}

impl PretaggedIndex {
    /// Builds the index from sentences with `uid/premise`, `uid/hypothesis`
    /// ids; unnamed files must hold exactly premise, hypothesis per pair in
    /// dataset order.
    pub fn from_sentences(dataset: &Dataset, sentences: Vec<PretaggedSentence>) -> Result<Self> {
        let mut map = HashMap::with_capacity(sentences.len());
        if sentences.iter().all(|s| s.id.is_none()) {
            if sentences.len() != 2 * dataset.len() {
                return Err(Error::Validation(format!(
                    "pretagged file without ids has {} sentences, expected {} (premise and hypothesis per pair)",
                    sentences.len(),
                    2 * dataset.len()
                )));
            }
            let mut it = sentences.into_iter();
            for pair in &dataset.pairs {
                for field in [Field::Premise, Field::Hypothesis] {
                    let s = it.next().expect("length checked");
                    map.insert((pair.uid.clone(), field), s.sentence);
                }
            }
            return Ok(PretaggedIndex { map });
        }
        for s in sentences {
            let id = s
                .id
                .ok_or_else(|| Error::Validation("pretagged file mixes named and unnamed sentences".into()))?;
            let (uid, field) = id
                .rsplit_once('/')
                .and_then(|(u, f)| match f {
                    "premise" => Some((u, Field::Premise)),
                    "hypothesis" => Some((u, Field::Hypothesis)),
                    _ => None,
                })
                .ok_or_else(|| Error::Validation(format!("pretagged id '{id}' is not '<uid>/premise|hypothesis'")))?;
            map.insert((uid.to_string(), field), s.sentence);
        }
        Ok(PretaggedIndex { map })
    }

    /// Tags every premise and hypothesis of `dataset` once.
    pub fn tag_dataset(dataset: &Dataset, model: &TaggerModel) -> Self {
        let entries: Vec<_> = dataset
            .pairs
            .par_iter()
            .flat_map_iter(|p| {
                [
                    ((p.uid.clone(), Field::Premise), model.tag_text(&p.premise)),
                    ((p.uid.clone(), Field::Hypothesis), model.tag_text(&p.hypothesis)),
                ]
            })
            .collect();
        PretaggedIndex {
            map: entries.into_iter().collect(),
        }
    }

    pub fn get(&self, uid: &str, field: Field) -> Option<&TaggedSentence> {
        self.map.get(&(uid.to_string(), field))
    }

    /// Sentences in dataset order, named `uid/field`.
    pub fn to_sentences(&self, dataset: &Dataset) -> Vec<PretaggedSentence> {
        dataset
            .pairs
            .iter()
            .flat_map(|p| [Field::Premise, Field::Hypothesis].map(|f| (p, f)))
            .filter_map(|(p, f)| {
                self.get(&p.uid, f).map(|s| PretaggedSentence {
                    id: Some(format!("{}/{}", p.uid, f.as_str())),
                    sentence: s.clone(),
                })
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy)]
pub enum TagSource<'a> {
    Model(&'a TaggerModel),
    Pretagged(&'a PretaggedIndex),
}

impl TagSource<'_> {
    fn tagged<'s>(&'s self, pair: &NliPair, field: Field) -> Result<Cow<'s, TaggedSentence>> {
        match self {
            TagSource::Model(m) => {
                let text = match field {
                    Field::Premise => &pair.premise,
                    Field::Hypothesis => &pair.hypothesis,
                };
                Ok(Cow::Owned(m.tag_text(text)))
            }
            TagSource::Pretagged(index) => index.get(&pair.uid, field).map(Cow::Borrowed).ok_or_else(|| {
                Error::Pair {
                    uid: pair.uid.clone(),
                    message: format!("no pretagged {} sentence", field.as_str()),
                }
            }),
        }
    }
}

struct FieldResult {
    text: String,
    removed: u64,
    emptied: bool,
}

fn unchanged(text: &str) -> FieldResult {
    FieldResult {
        text: text.to_string(),
        removed: 0,
        emptied: false,
    }
}

fn corrupt_field(
    pair: &NliPair,
    field: Field,
    spec: &TransformSpec,
    tags: Option<&TagSource>,
) -> Result<FieldResult> {
    let text = match field {
        Field::Premise => &pair.premise,
        Field::Hypothesis => &pair.hypothesis,
    };
    if !spec.apply_to.covers(field) {
        return Ok(unchanged(text));
    }
    match spec.kind {
        TransformKind::DropPos(set) | TransformKind::KeepPos(set) => {
            let source = tags.ok_or_else(|| Error::Config("word-class transforms need a tagger or pretagged input".into()))?;
            let sentence = source.tagged(pair, field)?;
            let kept = match spec.kind {
                TransformKind::DropPos(_) => drop_pos(&sentence, set),
                _ => keep_pos(&sentence, set),
            };
            Ok(FieldResult {
                text: detokenize(&kept),
                removed: (sentence.len() - kept.len()) as u64,
                emptied: !sentence.is_empty() && kept.is_empty(),
            })
        }
        TransformKind::ShuffleNgrams { n } => {
            let tokens = tokenize(text);
            let mut rng = ChaCha8Rng::seed_from_u64(field_seed(spec.seed, &pair.uid, field));
            Ok(FieldResult {
                text: detokenize(&shuffle_ngrams(&tokens, n, &mut rng)),
                removed: 0,
                emptied: false,
            })
        }
        _ => Ok(unchanged(text)),
    }
}

/// Applies `spec` to one pair and returns the corrupted pair with its accounting.
pub fn corrupt_pair(
    pair: &NliPair,
    spec: &TransformSpec,
    tags: Option<&TagSource>,
) -> Result<(NliPair, TransformReport)> {
    match spec.kind {
        TransformKind::Identity => Ok((pair.clone(), TransformReport::for_pair(0, 0, false))),
        TransformKind::SwapPair => Ok((swap_pair(pair).0, TransformReport::for_pair(0, 0, false))),
        TransformKind::HypothesisOnly => {
            let removed = token_count(&pair.premise) as u64;
            Ok((hypothesis_only(pair), TransformReport::for_pair(removed, 0, removed > 0)))
        }
        _ => {
            let p = corrupt_field(pair, Field::Premise, spec, tags)?;
            let h = corrupt_field(pair, Field::Hypothesis, spec, tags)?;
            let report = TransformReport::for_pair(p.removed, h.removed, p.emptied || h.emptied);
            let out = NliPair {
                premise: p.text,
                hypothesis: h.text,
                ..pair.clone()
            };
            Ok((out, report))
        }
    }
}

/// Corrupts every pair of `dataset`.
///
/// Runs on the current rayon pool; output order and content do not depend on
/// the number of worker threads.
pub fn corrupt_dataset(
    dataset: &Dataset,
    spec: &TransformSpec,
    tags: Option<&TagSource>,
) -> Result<(Dataset, TransformReport)> {
    spec.validate()?;
    if spec.needs_tags() && tags.is_none() {
        return Err(Error::Config(
            "word-class transforms need a tagger model or pretagged input".into(),
        ));
    }
    let results: Vec<(NliPair, TransformReport)> = dataset
        .pairs
        .par_iter()
        .map(|p| corrupt_pair(p, spec, tags))
        .collect::<Result<_>>()?;
    let mut report = TransformReport::default();
    let mut pairs = Vec::with_capacity(results.len());
    for (pair, r) in results {
        report.add(&r);
        pairs.push(pair);
    }
    Ok((
        Dataset {
            name: dataset.name.clone(),
            split: dataset.split,
            pairs,
        },
        report,
    ))
}

/// Separator between a base uid and the AllDrop component name.
pub const ALLDROP_SEPARATOR: char = '#';

/// Concatenates the original and its named variants, suffixing every uid with
/// `#<component>` (the original is `original`).
pub fn build_alldrop(original: &Dataset, variants: &[(String, Dataset)]) -> Result<Dataset> {
    let base: Vec<&str> = original.pairs.iter().map(|p| p.uid.as_str()).collect();
    let components = std::iter::once(("original", original))
        .chain(variants.iter().map(|(n, d)| (n.as_str(), d)));
    let total: usize = original.len() + variants.iter().map(|(_, d)| d.len()).sum::<usize>();
    let mut pairs = Vec::with_capacity(total);
    let mut seen = HashSet::with_capacity(total);
    for (name, data) in components {
        let uids: Vec<&str> = data.pairs.iter().map(|p| p.uid.as_str()).collect();
        if uids != base {
            return Err(Error::Validation(format!(
                "variant '{name}' is not derived from '{}' (uids differ)",
                original.name
            )));
        }
        for pair in &data.pairs {
            let uid = format!("{}{ALLDROP_SEPARATOR}{name}", pair.uid);
            if !seen.insert(uid.clone()) {
                return Err(Error::Validation(format!("uid collision after suffixing: '{uid}'")));
            }
            pairs.push(NliPair {
                uid,
                ..pair.clone()
            });
        }
    }
    Ok(Dataset {
        name: format!("{}-alldrop", original.name),
        split: original.split,
        pairs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::Split;
    use UniversalPos::*;

    fn table1() -> TaggedSentence {
        TaggedSentence::from_pairs(&[
            ("The", Det),
            ("man", Noun),
            ("was", Verb),
            ("6", Num),
            ("foot", Noun),
            ("tall", Noun),
            (".", Punct),
        ])
    }

    fn forms(tokens: &[Token]) -> Vec<&str> {
        tokens.iter().map(|t| t.form.as_str()).collect()
    }

    #[test]
    fn drop_nouns_from_table_one_sentence() {
        let nouns: TagSet = [Noun].into_iter().collect();
        assert_eq!(forms(&drop_pos(&table1(), nouns)), ["The", "was", "6", "."]);
        let verbs_only: TagSet = [Adv].into_iter().collect();
        assert_eq!(drop_pos(&table1(), verbs_only), table1().plain_tokens());

        let s = TaggedSentence::from_pairs(&[("dogs", Noun), ("chase", Verb), ("cats", Noun), ("quickly", Adv)]);
        assert_eq!(forms(&drop_pos(&s, nouns)), ["chase", "quickly"]);
    }

    #[test]
    fn keep_variants() {
        let s = TaggedSentence::from_pairs(&[("hi", X), (".", Punct)]);
        let punct: TagSet = [Punct].into_iter().collect();
        assert_eq!(forms(&keep_pos(&s, punct)), ["."]);
        assert_eq!(keep_pos(&table1(), TagSet::all()), table1().plain_tokens());
        let nv: TagSet = [Noun, Verb].into_iter().collect();
        assert_eq!(forms(&keep_pos(&table1(), nv)), ["man", "was", "foot", "tall"]);
    }

    #[test]
    fn spec_validation() {
        assert!(TransformSpec::keep(TagSet::EMPTY).is_err());
        assert!(TransformSpec::drop(TagSet::EMPTY).is_err());
        assert!(TransformSpec::shuffle(0, 1).is_err());
        assert!(TransformSpec::shuffle(1, 1).is_ok());
    }

    #[test]
    fn shuffle_small_cases() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        assert_eq!(shuffle_ngrams(&["a"], 3, &mut rng), ["a"]);
        assert_eq!(shuffle_ngrams(&["a", "b", "c", "d"], 4, &mut rng), ["a", "b", "c", "d"]);
        let empty: [&str; 0] = [];
        assert!(shuffle_ngrams(&empty, 2, &mut rng).is_empty());
    }

    /// Two chunks admit exactly two orders; seed 42 is pinned to one of them.
    #[test]
    fn shuffle_two_chunks_pinned_seed() {
        let orders: [[&str; 4]; 2] = [["a", "b", "c", "d"], ["c", "d", "a", "b"]];
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let out = shuffle_ngrams(&["a", "b", "c", "d"], 2, &mut rng);
        assert!(orders.iter().any(|o| out == o));
        assert_eq!(out, ["c", "d", "a", "b"]);
    }

    #[test]
    fn swap_rules() {
        let c = NliPair::new("u", "P", "H", NliLabel::Contradiction);
        let (s, e) = swap_pair(&c);
        assert_eq!((s.premise.as_str(), s.hypothesis.as_str()), ("H", "P"));
        assert_eq!(e, SwapExpectation::SameLabel);
        let en = NliPair::new("u", "P", "H", NliLabel::Entailment);
        assert_eq!(swap_pair(&en).1, SwapExpectation::DifferentLabel);
        assert_eq!(swap_pair(&swap_pair(&en).0).0, en);
        assert!(SwapExpectation::DifferentLabel.is_consistent(NliLabel::Entailment, NliLabel::Neutral));
        assert!(!SwapExpectation::DifferentLabel.is_consistent(NliLabel::Entailment, NliLabel::Entailment));
        assert!(!SwapExpectation::DifferentLabel.is_consistent(NliLabel::Neutral, NliLabel::Neutral));
    }

    #[test]
    fn hypothesis_only_is_idempotent() {
        let p = NliPair::new("u", "P", "H", NliLabel::Neutral);
        let once = hypothesis_only(&p);
        assert_eq!(once.premise, "");
        assert_eq!((once.hypothesis.as_str(), once.label), ("H", NliLabel::Neutral));
        assert_eq!(hypothesis_only(&once), once);
    }

    fn hand_tagged() -> (Dataset, PretaggedIndex) {
        let d = Dataset::new(
            "hand",
            Split::Dev,
            vec![
                NliPair::new("p1", "The man was 6 foot tall.", "A man is tall.", NliLabel::Contradiction),
                NliPair::new("p2", "Dogs chase cats quickly.", "Cats run.", NliLabel::Neutral),
                NliPair::new("p3", "It rains.", "Rain.", NliLabel::Entailment),
            ],
        )
        .unwrap();
        let sentences = vec![
            table1(),
            TaggedSentence::from_pairs(&[("A", Det), ("man", Noun), ("is", Verb), ("tall", Adj), (".", Punct)]),
            TaggedSentence::from_pairs(&[("Dogs", Noun), ("chase", Verb), ("cats", Noun), ("quickly", Adv), (".", Punct)]),
            TaggedSentence::from_pairs(&[("Cats", Noun), ("run", Verb), (".", Punct)]),
            TaggedSentence::from_pairs(&[("It", Pron), ("rains", Verb), (".", Punct)]),
            TaggedSentence::from_pairs(&[("Rain", Noun), (".", Punct)]),
        ];
        let sentences = sentences
            .into_iter()
            .map(|s| PretaggedSentence { id: None, sentence: s })
            .collect();
        let index = PretaggedIndex::from_sentences(&d, sentences).unwrap();
        (d, index)
    }

    #[test]
    fn corrupt_hand_fixture_drop_nouns() {
        let (d, index) = hand_tagged();
        let spec = TransformSpec::drop([Noun].into_iter().collect()).unwrap();
        let (out, report) = corrupt_dataset(&d, &spec, Some(&TagSource::Pretagged(&index))).unwrap();
        // premises: man foot tall | Dogs cats | none  -> 3 + 2 + 0
        // hypotheses: man | Cats | Rain              -> 1 + 1 + 1
        assert_eq!(
            report,
            TransformReport {
                pairs_processed: 3,
                premise_tokens_removed: 5,
                hypothesis_tokens_removed: 3,
                total_tokens_removed: 8,
                pairs_left_empty: 0,
            }
        );
        assert_eq!(out.pairs[0].premise, "The was 6.");
        assert_eq!(out.pairs[2].hypothesis, ".");
        assert!(out.pairs.iter().zip(&d.pairs).all(|(a, b)| a.uid == b.uid && a.label == b.label));

        let keep_punct = TransformSpec::keep([Punct].into_iter().collect()).unwrap();
        let (_, r) = corrupt_dataset(&d, &keep_punct, Some(&TagSource::Pretagged(&index))).unwrap();
        assert_eq!(r.pairs_left_empty, 0);
        let keep_x = TransformSpec::keep([X].into_iter().collect()).unwrap();
        let (out, r) = corrupt_dataset(&d, &keep_x, Some(&TagSource::Pretagged(&index))).unwrap();
        assert_eq!(r.pairs_left_empty, 3);
        assert!(out.pairs.iter().all(|p| p.premise.is_empty() && p.hypothesis.is_empty()));
    }

    #[test]
    fn apply_to_restricts_fields() {
        let (d, index) = hand_tagged();
        let spec = TransformSpec::drop([Noun].into_iter().collect())
            .unwrap()
            .with_apply_to(ApplyTo::HypothesisOnly);
        let (out, report) = corrupt_dataset(&d, &spec, Some(&TagSource::Pretagged(&index))).unwrap();
        assert_eq!(report.premise_tokens_removed, 0);
        assert_eq!(report.hypothesis_tokens_removed, 3);
        assert_eq!(out.pairs[0].premise, d.pairs[0].premise);
    }

    #[test]
    fn identity_and_missing_tagger() {
        let (d, _) = hand_tagged();
        let (out, report) = corrupt_dataset(&d, &TransformSpec::identity(), None).unwrap();
        assert_eq!(out, d);
        assert_eq!(report.total_tokens_removed, 0);
        assert_eq!(report.pairs_processed, 3);
        let spec = TransformSpec::drop([Noun].into_iter().collect()).unwrap();
        assert!(matches!(corrupt_dataset(&d, &spec, None), Err(Error::Config(_))));
    }

    #[test]
    fn shuffle_dataset_is_reproducible() {
        let (d, _) = hand_tagged();
        let spec = TransformSpec::shuffle(1, 7).unwrap();
        let a = corrupt_dataset(&d, &spec, None).unwrap();
        let b = corrupt_dataset(&d, &spec, None).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.1.total_tokens_removed, 0);
        assert_ne!(field_seed(7, "p1", Field::Premise), field_seed(7, "p1", Field::Hypothesis));
        assert_ne!(field_seed(7, "p1", Field::Premise), field_seed(8, "p1", Field::Premise));
    }

    #[test]
    fn alldrop_concatenates_and_suffixes() {
        let pairs: Vec<NliPair> = (0..10)
            .map(|i| NliPair::new(format!("u{i}"), "P", "H", NliLabel::Neutral))
            .collect();
        let d = Dataset::new("mnli", Split::Train, pairs).unwrap();
        let variants: Vec<(String, Dataset)> = presets()
            .into_iter()
            .take(8)
            .map(|p| (p.name, d.clone()))
            .collect();
        let all = build_alldrop(&d, &variants).unwrap();
        assert_eq!(all.len(), 90);
        assert_eq!(all.pairs[0].uid, "u0#original");
        assert_eq!(all.pairs[10].uid, "u0#num");
        assert_eq!(all.pairs[89].uid, "u9#noun");

        let alone = build_alldrop(&d, &[]).unwrap();
        assert_eq!(alone.len(), 10);
        assert!(alone.pairs.iter().all(|p| p.uid.ends_with("#original")));

        let dup = vec![("noun".to_string(), d.clone()), ("noun".to_string(), d.clone())];
        assert!(build_alldrop(&d, &dup).unwrap_err().to_string().contains("collision"));
    }

    #[test]
    fn presets_table() {
        let p = presets();
        assert_eq!(p.len(), 13);
        assert!(p.iter().all(|t| {
            let tags = match t.spec.kind {
                TransformKind::DropPos(s) | TransformKind::KeepPos(s) => s,
                _ => unreachable!(),
            };
            !tags.contains(Punct) && !tags.contains(X)
        }));
        assert_eq!(preset("noun+verb").unwrap().spec.kind, TransformKind::KeepPos([Noun, Verb].into_iter().collect()));
        assert!(preset("nouns").is_err());
        assert_eq!(default_suite_transforms(1).len(), 18);
    }

    #[test]
    fn spec_json_shapes() {
        let spec: TransformSpec =
            serde_json::from_str(r#"{"kind":"drop","tags":["NOUN"],"seed":13,"apply_to":"both"}"#).unwrap();
        assert_eq!(spec.kind, TransformKind::DropPos([Noun].into_iter().collect()));
        assert_eq!(spec.seed, 13);
        let back: TransformSpec = serde_json::from_str(&serde_json::to_string(&spec).unwrap()).unwrap();
        assert_eq!(back, spec);

        let named: NamedTransform = serde_json::from_str(r#"{"preset":"noun+verb"}"#).unwrap();
        assert_eq!(named.name, "noun+verb");
        let named: NamedTransform = serde_json::from_str(r#"{"kind":"shuffle","n":2,"seed":4}"#).unwrap();
        assert_eq!(named.name, "shuffle-n2");
        assert!(serde_json::from_str::<TransformSpec>(r#"{"kind":"keep","tags":[]}"#).is_err());
        assert!(serde_json::from_str::<TransformSpec>(r#"{"kind":"drop","tags":["NN"]}"#).is_err());
    }
}
