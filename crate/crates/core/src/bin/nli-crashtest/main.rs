use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use log::info;

use nli_crashtest::corpus::{self, Dataset, Format, LoadOptions};
use nli_crashtest::diagnostics::{emit_report, run_suite, ReportFormat, SuiteConfig, SuiteMode, VerdictStatus};
use nli_crashtest::metrics::{accuracy, dataset_overlap, fmt2, removal_stats};
use nli_crashtest::probes::{eval_probe, train_probe, Featurizer, ProbeModel};
use nli_crashtest::synth::{self, PairOptions};
use nli_crashtest::tagger::{
    self, bundled, load_pretagged_with, write_pretagged, PretaggedOptions, TaggerModel,
};
use nli_crashtest::transforms::{
    build_alldrop, corrupt_dataset, presets, ApplyTo, PretaggedIndex, TagSet, TagSource, TransformKind,
    TransformSpec,
};
use nli_crashtest::{Error, ErrorKind};

const MODEL_ENV: &str = "NLI_CRASHTEST_MODEL";

/// Crash-test NLI datasets for annotation artefacts.
#[derive(Parser)]
#[command(name = "nli-crashtest", version, about)]
struct Cli {
    /// Worker threads for per-pair processing (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,

    /// Log progress to stderr.
    #[arg(short, long, global = true)]
    verbose: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train, apply or evaluate the part-of-speech tagger.
    #[command(subcommand)]
    Tag(TagCommand),
    /// Apply a corruption transform to a dataset.
    Corrupt(CorruptArgs),
    /// Count tokens removed between an original and a corrupted dataset.
    Stats(StatsArgs),
    /// Mean premise/hypothesis lexical overlap per dataset, as CSV.
    Overlap(OverlapArgs),
    /// Score a prediction file against gold labels.
    Eval(EvalArgs),
    /// Train or evaluate a shallow artefact probe.
    #[command(subcommand)]
    Probe(ProbeCommand),
    /// Run the full diagnostic suite and print a verdict.
    Suite(SuiteArgs),
    /// Generate synthetic tagged sentences or NLI pairs.
    #[command(subcommand)]
    Synth(SynthCommand),
}

#[derive(Subcommand)]
enum TagCommand {
    /// Train a model on a vertical `form TAG` corpus.
    Train {
        /// Corpus file, or a directory containing `train.vert`.
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long, default_value_t = 5)]
        epochs: u32,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        /// Convert Penn Treebank / UD tags to universal tags.
        #[arg(long)]
        map_foreign: bool,
    },
    /// Tag every premise and hypothesis of a dataset into a vertical file.
    Apply {
        #[command(flatten)]
        model: ModelArg,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Print token accuracy on a held-out vertical corpus.
    Eval {
        #[arg(long, env = MODEL_ENV)]
        model: PathBuf,
        /// Corpus file, or a directory containing `heldout.vert`.
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long)]
        map_foreign: bool,
    },
}

#[derive(Args)]
struct ModelArg {
    /// Tagger model file; falls back to $NLI_CRASHTEST_MODEL, then to a model
    /// trained on the bundled corpus.
    #[arg(long, env = MODEL_ENV)]
    model: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum TransformArg {
    Drop,
    Keep,
    Shuffle,
    Swap,
    HypothesisOnly,
    Identity,
}

#[derive(Args)]
struct CorruptArgs {
    #[arg(long = "in", required_unless_present = "list_presets")]
    input: Option<PathBuf>,
    #[arg(long, required_unless_present = "list_presets")]
    out: Option<PathBuf>,
    #[arg(long, value_enum, conflicts_with_all = ["preset", "alldrop"])]
    transform: Option<TransformArg>,
    /// A named preset such as `noun` or `noun+verb` (see --list-presets).
    #[arg(long, conflicts_with = "alldrop")]
    preset: Option<String>,
    /// Comma-separated universal tags for drop/keep, e.g. NOUN,VERB.
    #[arg(long)]
    tags: Option<String>,
    /// Chunk size for shuffle.
    #[arg(long)]
    n: Option<usize>,
    /// Required for shuffle.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value = "both")]
    apply_to: String,
    /// Vertical file with tags for every premise and hypothesis.
    /// Takes precedence over --model.
    #[arg(long)]
    pretagged: Option<PathBuf>,
    #[arg(long)]
    map_foreign: bool,
    #[arg(long, env = MODEL_ENV)]
    model: Option<PathBuf>,
    /// Write the removal report as JSON here.
    #[arg(long)]
    report: Option<PathBuf>,
    /// Concatenate the original with all eight single-class drops.
    #[arg(long)]
    alldrop: bool,
    /// Print the preset table and exit.
    #[arg(long)]
    list_presets: bool,
}

#[derive(Args)]
struct StatsArgs {
    #[arg(long)]
    original: PathBuf,
    #[arg(long)]
    corrupted: PathBuf,
}

#[derive(Args)]
struct OverlapArgs {
    /// One or more datasets.
    #[arg(long = "in", required = true, num_args = 1..)]
    inputs: Vec<PathBuf>,
}

#[derive(Args)]
struct EvalArgs {
    #[arg(long)]
    pred: PathBuf,
    #[arg(long)]
    gold: PathBuf,
    /// Baseline accuracy in percent; enables the delta.
    #[arg(long)]
    baseline: Option<f64>,
    #[arg(long)]
    json: bool,
}

#[derive(Subcommand)]
enum ProbeCommand {
    Train {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, default_value = "hyp_bow")]
        featurizer: String,
        #[arg(long, default_value_t = 5)]
        epochs: u32,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    Eval {
        #[arg(long)]
        model: PathBuf,
        #[arg(long = "in")]
        input: PathBuf,
        /// Also write predictions (JSONL) here.
        #[arg(long)]
        predictions: Option<PathBuf>,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Args)]
struct SuiteArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long = "in")]
    input: PathBuf,
    /// Overrides the mode in the config (prediction_files or probe).
    #[arg(long)]
    mode: Option<String>,
    /// Takes precedence over --model.
    #[arg(long)]
    pretagged: Option<PathBuf>,
    #[arg(long, env = MODEL_ENV)]
    model: Option<PathBuf>,
    /// json, markdown, csv or overlap-csv.
    #[arg(long, default_value = "json")]
    format: String,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Exit with status 3 when the verdict is artefact-prone.
    #[arg(long)]
    gate: bool,
}

#[derive(Subcommand)]
enum SynthCommand {
    /// Universal-tagged sentences as a vertical file.
    Tagged {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// NLI pairs with a planted hypothesis cue.
    Pairs {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        /// Share of hypotheses whose cue matches their label.
        #[arg(long, default_value_t = 0.95)]
        consistency: f64,
        /// Permute labels with this seed, giving a no-signal control set.
        #[arg(long)]
        shuffle_labels: Option<u64>,
        #[arg(long)]
        name: Option<String>,
    },
}

enum Failure {
    Error(Error),
    Gate,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Error(e)
    }
}

type CmdResult = std::result::Result<(), Failure>;

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> Error + '_ {
    move |e| Error::io(path, e)
}

fn write_output(path: &Path, text: &str) -> nli_crashtest::Result<()> {
    std::fs::write(path, text).map_err(io_err(path))
}

fn corpus_file(path: &Path, default_name: &str) -> PathBuf {
    if path.is_dir() {
        path.join(default_name)
    } else {
        path.to_path_buf()
    }
}

fn load_dataset(path: &Path) -> nli_crashtest::Result<Dataset> {
    let (dataset, report) = corpus::load_dataset_with(path, Format::from_path(path), &LoadOptions::default())?;
    for w in &report.warnings {
        log::warn!("{}: {w}", path.display());
    }
    Ok(dataset)
}

fn resolve_tagger(model: Option<&Path>) -> nli_crashtest::Result<std::borrow::Cow<'static, TaggerModel>> {
    match model {
        Some(p) => {
            info!("loading tagger {}", p.display());
            Ok(std::borrow::Cow::Owned(TaggerModel::load(p)?))
        }
        None => {
            info!("no tagger model given; training on the bundled corpus");
            Ok(std::borrow::Cow::Borrowed(bundled::model()))
        }
    }
}

fn cmd_tag(cmd: TagCommand) -> CmdResult {
    match cmd {
        TagCommand::Train {
            corpus,
            epochs,
            seed,
            out,
            map_foreign,
        } => {
            let file = corpus_file(&corpus, "train.vert");
            let sentences: Vec<_> = load_pretagged_with(&file, PretaggedOptions { map_foreign })?
                .into_iter()
                .map(|s| s.sentence)
                .collect();
            let id = corpus.file_name().and_then(|s| s.to_str()).unwrap_or("corpus");
            let model = tagger::train_tagger(&sentences, epochs, seed, id)?;
            model.save(&out)?;
            println!("trained on {} sentences; wrote {}", sentences.len(), out.display());
        }
        TagCommand::Apply { model, input, out } => {
            let tagger = resolve_tagger(model.model.as_deref())?;
            let dataset = load_dataset(&input)?;
            let index = PretaggedIndex::tag_dataset(&dataset, &tagger);
            let mut w = std::io::BufWriter::new(std::fs::File::create(&out).map_err(io_err(&out))?);
            write_pretagged(&mut w, &index.to_sentences(&dataset)).map_err(io_err(&out))?;
            w.flush().map_err(io_err(&out))?;
        }
        TagCommand::Eval {
            model,
            corpus,
            map_foreign,
        } => {
            let model = TaggerModel::load(&model)?;
            let file = corpus_file(&corpus, "heldout.vert");
            let sentences: Vec<_> = load_pretagged_with(&file, PretaggedOptions { map_foreign })?
                .into_iter()
                .map(|s| s.sentence)
                .collect();
            let acc = tagger::evaluate_tagger(&model, &sentences)?;
            println!("accuracy {}", fmt2(acc * 100.0));
        }
    }
    Ok(())
}

fn tagset(args: &CorruptArgs) -> nli_crashtest::Result<TagSet> {
    let list = args
        .tags
        .as_deref()
        .ok_or_else(|| Error::Config("--tags is required for drop and keep".into()))?;
    TagSet::parse_list(list)
}

fn corrupt_spec(args: &CorruptArgs) -> nli_crashtest::Result<TransformSpec> {
    let apply_to: ApplyTo = args.apply_to.parse()?;
    let spec = match (args.preset.as_deref(), args.transform) {
        (Some(name), _) => nli_crashtest::transforms::preset(name)?.spec,
        (None, None) => return Err(Error::Config("one of --transform, --preset or --alldrop is required".into())),
        (None, Some(t)) => {
            let kind = match t {
                TransformArg::Drop => TransformKind::DropPos(tagset(args)?),
                TransformArg::Keep => TransformKind::KeepPos(tagset(args)?),
                TransformArg::Shuffle => TransformKind::ShuffleNgrams {
                    n: args.n.ok_or_else(|| Error::Config("--n is required for shuffle".into()))?,
                },
                TransformArg::Swap => TransformKind::SwapPair,
                TransformArg::HypothesisOnly => TransformKind::HypothesisOnly,
                TransformArg::Identity => TransformKind::Identity,
            };
            TransformSpec::new(kind)?
        }
    };
    if matches!(spec.kind, TransformKind::ShuffleNgrams { .. }) && args.seed.is_none() {
        return Err(Error::Config("--seed is required for shuffle".into()));
    }
    Ok(spec.with_seed(args.seed.unwrap_or(0)).with_apply_to(apply_to))
}

fn print_presets() {
    println!("{:<20} {:<6} tags", "name", "kind");
    for p in presets() {
        let (kind, tags) = match p.spec.kind {
            TransformKind::DropPos(t) => ("drop", t),
            TransformKind::KeepPos(t) => ("keep", t),
            _ => continue,
        };
        println!("{:<20} {:<6} {tags}", p.name, kind);
    }
}

fn cmd_corrupt(args: CorruptArgs) -> CmdResult {
    if args.list_presets {
        print_presets();
        return Ok(());
    }
    let (Some(input), Some(out)) = (args.input.as_deref(), args.out.as_deref()) else {
        return Err(Error::Config("--in and --out are required".into()).into());
    };
    let dataset = load_dataset(input)?;
    let spec = if args.alldrop { None } else { Some(corrupt_spec(&args)?) };
    let needs_tags = spec.map_or(true, |s| s.needs_tags());

    let index;
    let model;
    let tags = if !needs_tags {
        None
    } else if let Some(p) = &args.pretagged {
        let sentences = load_pretagged_with(p, PretaggedOptions { map_foreign: args.map_foreign })?;
        index = PretaggedIndex::from_sentences(&dataset, sentences)?;
        Some(TagSource::Pretagged(&index))
    } else {
        model = resolve_tagger(args.model.as_deref())?;
        Some(TagSource::Model(&model))
    };

    let (result, report) = match spec {
        Some(spec) => corrupt_dataset(&dataset, &spec, tags.as_ref())?,
        None => {
            let index_owned;
            let tags = match tags {
                Some(TagSource::Model(m)) => {
                    index_owned = PretaggedIndex::tag_dataset(&dataset, m);
                    TagSource::Pretagged(&index_owned)
                }
                Some(t) => t,
                None => unreachable!("alldrop always needs tags"),
            };
            let mut variants = Vec::new();
            let mut total = nli_crashtest::transforms::TransformReport::default();
            for p in presets().into_iter().filter(|p| matches!(p.spec.kind, TransformKind::DropPos(_))) {
                let (d, r) = corrupt_dataset(&dataset, &p.spec, Some(&tags))?;
                total.add(&r);
                variants.push((p.name, d));
            }
            (build_alldrop(&dataset, &variants)?, total)
        }
    };
    corpus::save_dataset(&result, out, Format::from_path(out))?;
    if let Some(path) = &args.report {
        write_output(path, &(serde_json::to_string_pretty(&report).map_err(Error::from)? + "\n"))?;
    }
    eprintln!(
        "{} pairs; removed {} premise + {} hypothesis = {} tokens; {} pairs left with an empty side",
        report.pairs_processed,
        report.premise_tokens_removed,
        report.hypothesis_tokens_removed,
        report.total_tokens_removed,
        report.pairs_left_empty
    );
    Ok(())
}

fn cmd_stats(args: StatsArgs) -> CmdResult {
    let original = load_dataset(&args.original)?;
    let corrupted = load_dataset(&args.corrupted)?;
    let report = removal_stats(&original, &corrupted)?;
    println!("{}", serde_json::to_string_pretty(&report).map_err(Error::from)?);
    Ok(())
}

fn cmd_overlap(args: OverlapArgs) -> CmdResult {
    println!("dataset,n_pairs,overlap_pct");
    for path in &args.inputs {
        let d = load_dataset(path)?;
        let stat = dataset_overlap(&d)?;
        println!("{},{},{}", d.name, d.len(), fmt2(stat.dataset_mean_pct));
    }
    Ok(())
}

fn cmd_eval(args: EvalArgs) -> CmdResult {
    let gold = load_dataset(&args.gold)?;
    let preds = corpus::load_predictions(&args.pred, Format::from_path(&args.pred))?;
    let r = accuracy(&preds, &gold, args.baseline)?;
    if args.json {
        println!("{}", serde_json::to_string_pretty(&r).map_err(Error::from)?);
        return Ok(());
    }
    println!("accuracy {}", fmt2(r.accuracy_pct));
    if let Some(d) = r.delta_points {
        println!("delta {}", fmt2(d));
    }
    if r.incomplete {
        println!(
            "warning: {} of {} gold pairs have no prediction",
            r.n_missing_predictions,
            r.n_missing_predictions + r.n_evaluated
        );
    }
    Ok(())
}

fn cmd_probe(cmd: ProbeCommand) -> CmdResult {
    match cmd {
        ProbeCommand::Train {
            input,
            featurizer,
            epochs,
            seed,
            out,
        } => {
            let dataset = load_dataset(&input)?;
            let featurizer: Featurizer = featurizer.parse()?;
            let model = train_probe(&dataset, featurizer, epochs, seed)?;
            model.save(&out)?;
            println!("trained {featurizer} probe on {} pairs; wrote {}", dataset.len(), out.display());
        }
        ProbeCommand::Eval {
            model,
            input,
            predictions,
            json,
        } => {
            let model = ProbeModel::load(&model)?;
            let dataset = load_dataset(&input)?;
            let e = eval_probe(&model, &dataset)?;
            if let Some(p) = predictions {
                corpus::save_predictions(&model.predict_dataset(&dataset), &p)?;
            }
            if json {
                println!("{}", serde_json::to_string_pretty(&e).map_err(Error::from)?);
                return Ok(());
            }
            println!("accuracy {}", fmt2(e.result.accuracy_pct));
            println!("confusion (rows gold, columns predicted: contradiction entailment neutral)");
            for (label, row) in corpus::NliLabel::ALL.iter().zip(e.confusion) {
                println!("{:<14} {:>7} {:>7} {:>7}", label.as_str(), row[0], row[1], row[2]);
            }
        }
    }
    Ok(())
}

fn cmd_suite(args: SuiteArgs) -> CmdResult {
    let mut config = SuiteConfig::load(&args.config)?;
    if let Some(mode) = &args.mode {
        config.mode = mode.parse::<SuiteMode>()?;
    }
    let format: ReportFormat = args.format.parse()?;
    let dataset = load_dataset(&args.input)?;
    let needs_tags = config.resolved_transforms().iter().any(|t| t.spec.needs_tags());

    let index;
    let model;
    let tags = if !needs_tags {
        None
    } else if let Some(p) = &args.pretagged {
        index = PretaggedIndex::from_sentences(&dataset, load_pretagged_with(p, PretaggedOptions::default())?)?;
        Some(TagSource::Pretagged(&index))
    } else {
        model = resolve_tagger(args.model.as_deref())?;
        Some(TagSource::Model(&model))
    };
    let report = run_suite(&dataset, &config, tags.as_ref())?;
    let text = emit_report(&report, format)?;
    match &args.out {
        Some(p) => write_output(p, &text)?,
        None => print!("{text}"),
    }
    eprintln!("verdict: {}", report.verdict.status.as_str());
    if args.gate && report.verdict.status == VerdictStatus::ArtefactProne {
        return Err(Failure::Gate);
    }
    Ok(())
}

fn cmd_synth(cmd: SynthCommand) -> CmdResult {
    match cmd {
        SynthCommand::Tagged { n, seed, out } => {
            let sentences: Vec<_> = synth::tagged_sentences(n, seed)
                .into_iter()
                .map(|sentence| tagger::PretaggedSentence { id: None, sentence })
                .collect();
            let mut w = std::io::BufWriter::new(std::fs::File::create(&out).map_err(io_err(&out))?);
            write_pretagged(&mut w, &sentences).map_err(io_err(&out))?;
            w.flush().map_err(io_err(&out))?;
        }
        SynthCommand::Pairs {
            n,
            seed,
            out,
            consistency,
            shuffle_labels,
            name,
        } => {
            if !(0.0..=1.0).contains(&consistency) {
                return Err(Error::Config("--consistency must be in [0, 1]".into()).into());
            }
            let name = name.unwrap_or_else(|| {
                out.file_stem().and_then(|s| s.to_str()).unwrap_or("synth").to_string()
            });
            let options = PairOptions {
                cue_consistency: consistency,
                ..Default::default()
            };
            let mut d = synth::nli_pairs(&name, n, seed, options);
            if let Some(s) = shuffle_labels {
                d = synth::shuffle_labels(&d, s);
            }
            corpus::save_dataset(&d, &out, Format::from_path(&out))?;
        }
    }
    Ok(())
}

fn run(cli: Cli) -> CmdResult {
    match cli.command {
        Command::Tag(c) => cmd_tag(c),
        Command::Corrupt(a) => cmd_corrupt(a),
        Command::Stats(a) => cmd_stats(a),
        Command::Overlap(a) => cmd_overlap(a),
        Command::Eval(a) => cmd_eval(a),
        Command::Probe(c) => cmd_probe(c),
        Command::Suite(a) => cmd_suite(a),
        Command::Synth(c) => cmd_synth(c),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    env_logger::Builder::new()
        .filter_level(if cli.verbose { log::LevelFilter::Info } else { log::LevelFilter::Warn })
        .format_timestamp(None)
        .init();

    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(jobs) = cli.jobs {
        if jobs == 0 {
            eprintln!("error: --jobs must be at least 1");
            return ExitCode::from(1);
        }
        pool = pool.num_threads(jobs);
    }
    let pool = match pool.build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(4);
        }
    };
    let outcome = std::panic::catch_unwind(std::panic::AssertUnwindSafe(|| pool.install(|| run(cli))));
    match outcome {
        Ok(Ok(())) => ExitCode::SUCCESS,
        Ok(Err(Failure::Gate)) => ExitCode::from(3),
        Ok(Err(Failure::Error(e))) => {
            eprintln!("error: {e}");
            ExitCode::from(match e.kind() {
                ErrorKind::Usage => 1,
                ErrorKind::Validation => 2,
                ErrorKind::Internal => 4,
            })
        }
        Err(_) => ExitCode::from(4),
    }
}
