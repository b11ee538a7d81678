//! The `absprobe` command line.
//!
//! Exit codes: 0 success, 1 validation or runtime failure, 2 usage error.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::dataset::{
    dataset_stats, fuzzy_split, read_dataset, read_jsonl, validate_dataset, write_dataset,
    DatasetRules, FuzzyOptions, ParallelCorpus, Split, SubProbe,
};
use crate::flt::{
    build_default_grammar_pair, convert_cogs_logical_form, generate_probe_suite, read_cogs_tsv,
    CogsOptions, GrammarPair, ProbeSuiteConfig, WordList,
};
use crate::logic::{build_logic_suite, LogicSuiteConfig};
use crate::metrics::{
    analyze_learning_curves, bleu, dpc_report, exact_match, expectation_verdict, golds_from, moa,
    select_checkpoint, select_top_heads, DpcReport, HeadMode, LearningCurve, LogProbRecord,
    MoaInputs, Prediction, VerdictThresholds,
};
use crate::mutations::{build_multigrammar_corpus, sample_corpus, MutationName};

#[derive(Debug, Parser)]
#[command(
    name = "absprobe",
    version,
    about = "Build abstraction probes and score model outputs"
)]
struct Cli {
    /// Worker threads for generation (output does not depend on it).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate a probe suite.
    #[command(subcommand)]
    Gen(GenCommand),
    /// Apply a grammar mutation and optionally sample a corpus from it.
    Mutate(MutateArgs),
    /// Build a prefixed train_A corpus mixing several mutated grammars.
    Multigrammar(MultigrammarArgs),
    /// Convert COGS logical forms to chain targets.
    ConvertCogs(ConvertCogsArgs),
    /// Split a parallel corpus by source length.
    FuzzySplit(FuzzySplitArgs),
    /// Per-split counts and average lengths.
    Stats(DatasetArgs),
    /// Validate a dataset; exit 1 on findings.
    Check(CheckArgs),
    /// Score predictions.
    #[command(subcommand)]
    Eval(EvalCommand),
    /// Rank heads by the difference in PPL change between test_B and transfer_B.
    Dpc(DpcArgs),
    /// Select the top-k heads of a DPC report.
    Heads(HeadsArgs),
    /// Measure of abstraction.
    Moa(MoaArgs),
    /// Learning-curve phase analysis or checkpoint selection.
    Curve(CurveArgs),
    /// Check both expectations.
    Verdict(VerdictArgs),
}

#[derive(Debug, Subcommand)]
enum GenCommand {
    /// Formal-language translation probe.
    Grammar(GenGrammarArgs),
    /// Boolean operation probe.
    Logic(GenLogicArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Debug, Args)]
struct Common {
    /// JSON config; flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct GenGrammarArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long)]
    sub_probe: Option<SubProbe>,
    #[arg(long)]
    train: Option<usize>,
    #[arg(long)]
    dev: Option<usize>,
    #[arg(long)]
    transfer: Option<usize>,
    #[arg(long)]
    test: Option<usize>,
    #[arg(long)]
    conjunctions: Option<usize>,
    #[arg(long)]
    chain_weight: Option<f64>,
    #[arg(long)]
    passive: bool,
    #[arg(long)]
    no_contrast: bool,
    /// Replacement word list, one word per line.
    #[arg(long)]
    word_list: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct GenLogicArgs {
    #[command(flatten)]
    common: Common,
    /// conj, alt, disc or joi.
    #[arg(long)]
    sub_probe: Option<SubProbe>,
    #[arg(long)]
    train: Option<usize>,
    #[arg(long)]
    dev: Option<usize>,
    #[arg(long)]
    transfer: Option<usize>,
    #[arg(long)]
    supplement: Option<usize>,
    #[arg(long)]
    test: Option<usize>,
    #[arg(long)]
    n_ops: Option<usize>,
    #[arg(long)]
    no_contrast: bool,
}

#[derive(Debug, Args)]
struct MutateArgs {
    #[arg(long)]
    mutation: MutationName,
    /// Grammar pair JSON; defaults to the built-in pair.
    #[arg(long)]
    pair: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Also sample this many train_A examples from the mutated pair.
    #[arg(long, default_value_t = 0)]
    count: usize,
    #[arg(long)]
    word_list: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct MultigrammarArgs {
    /// Comma-separated `name=count` entries, e.g. `original=1000,reverse=1000`.
    #[arg(long)]
    plan: String,
    #[arg(long)]
    pair: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct ConvertCogsArgs {
    /// COGS TSV: source, logical form, generalization type.
    #[arg(long)]
    input: PathBuf,
    /// Output TSV: source, chain target, generalization type.
    #[arg(long)]
    out: PathBuf,
    /// Token respelling `FROM=TO`, repeatable.
    #[arg(long)]
    spelling: Vec<String>,
}

#[derive(Debug, Args)]
struct FuzzySplitArgs {
    #[arg(long)]
    src: PathBuf,
    #[arg(long)]
    tgt: PathBuf,
    #[arg(long, requires = "train_tgt")]
    train_src: Option<PathBuf>,
    #[arg(long, requires = "train_src")]
    train_tgt: Option<PathBuf>,
    #[arg(long)]
    transfer_max_len: Option<usize>,
    #[arg(long)]
    test_min_len: Option<usize>,
    #[arg(long)]
    no_contrast: bool,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct DatasetArgs {
    #[arg(long)]
    dataset: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Debug, Args)]
struct CheckArgs {
    #[arg(long)]
    dataset: PathBuf,
    /// Extra tokens exempt from the disjointness check, repeatable.
    #[arg(long)]
    exempt: Vec<String>,
}

#[derive(Debug, Subcommand)]
enum EvalCommand {
    /// Exact-match accuracy.
    Em(EvalArgs),
    /// Corpus BLEU.
    Bleu(EvalArgs),
}

#[derive(Debug, Args)]
struct EvalArgs {
    #[arg(long)]
    dataset: PathBuf,
    #[arg(long, default_value = "test_B")]
    split: Split,
    /// JSONL with `id` and `prediction`.
    #[arg(long)]
    predictions: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Debug, Args)]
struct DpcArgs {
    /// Log-prob JSONL.
    #[arg(long)]
    logprobs: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Write here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct HeadsArgs {
    /// DPC report, CSV or JSON.
    #[arg(long)]
    report: PathBuf,
    #[arg(long, default_value_t = 36)]
    k: usize,
    #[arg(long, value_enum, default_value_t = ModeArg::Freeze)]
    mode: ModeArg,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ModeArg {
    Freeze,
    Prune,
}

#[derive(Debug, Args)]
struct MoaArgs {
    #[arg(long, allow_negative_numbers = true)]
    main: f64,
    #[arg(long, allow_negative_numbers = true)]
    control: f64,
    #[arg(long, allow_negative_numbers = true)]
    contrast: f64,
    #[arg(long, allow_negative_numbers = true)]
    full: f64,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Debug, Args)]
struct CurveArgs {
    /// `step,score` CSV of the in-task curve.
    #[arg(long, requires = "cross_task")]
    in_task: Option<PathBuf>,
    #[arg(long, requires = "in_task")]
    cross_task: Option<PathBuf>,
    #[arg(long, default_value_t = 0.9)]
    threshold: f64,
    /// `step,score` CSV of dev scores; prints the selected checkpoint.
    #[arg(long, conflicts_with = "in_task")]
    dev: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Debug, Args)]
struct VerdictArgs {
    #[arg(long, allow_negative_numbers = true)]
    main: f64,
    #[arg(long, allow_negative_numbers = true)]
    control: f64,
    #[arg(long, allow_negative_numbers = true)]
    contrast: f64,
    #[arg(long)]
    min_gain: Option<f64>,
    #[arg(long)]
    max_contrast_ratio: Option<f64>,
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("validation failed")]
    Validation,
    #[error(transparent)]
    Other(#[from] anyhow::Error),
}

impl From<crate::dataset::DatasetIoError> for CliError {
    fn from(e: crate::dataset::DatasetIoError) -> Self {
        CliError::Other(e.into())
    }
}

type CliResult = Result<(), CliError>;

/// Runs the CLI on `argv` (program name first) and returns the exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let result = match cli.jobs {
        Some(0) => Err(CliError::Usage("--jobs must be at least 1".into())),
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(|| dispatch(cli.command)),
            Err(e) => Err(CliError::Other(e.into())),
        },
        None => dispatch(cli.command),
    };
    match result {
        Ok(()) => 0,
        Err(CliError::Usage(m)) => {
            eprintln!("error: {m}");
            2
        }
        Err(CliError::Validation) => 1,
        Err(CliError::Other(e)) => {
            eprintln!("error: {e:#}");
            1
        }
    }
}

fn dispatch(cmd: Command) -> CliResult {
    match cmd {
        Command::Gen(GenCommand::Grammar(a)) => gen_grammar(a),
        Command::Gen(GenCommand::Logic(a)) => gen_logic(a),
        Command::Mutate(a) => mutate(a),
        Command::Multigrammar(a) => multigrammar(a),
        Command::ConvertCogs(a) => convert_cogs(a),
        Command::FuzzySplit(a) => fuzzy(a),
        Command::Stats(a) => stats(a),
        Command::Check(a) => check(a),
        Command::Eval(EvalCommand::Em(a)) => eval(a, false),
        Command::Eval(EvalCommand::Bleu(a)) => eval(a, true),
        Command::Dpc(a) => dpc(a),
        Command::Heads(a) => heads(a),
        Command::Moa(a) => moa_cmd(a),
        Command::Curve(a) => curve(a),
        Command::Verdict(a) => verdict(a),
    }
}

fn load_config<T: serde::de::DeserializeOwned + Default>(
    path: Option<&Path>,
) -> Result<(T, bool), CliError> {
    match path {
        None => Ok((T::default(), false)),
        Some(p) => {
            let text = fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            let v = serde_json::from_str(&text)
                .map_err(|e| CliError::Usage(format!("{}: {e}", p.display())))?;
            let has_seed = serde_json::from_str::<serde_json::Value>(&text)
                .ok()
                .and_then(|v| v.get("seed").cloned())
                .is_some();
            Ok((v, has_seed))
        }
    }
}

fn require_seed(flag: Option<u64>, config: Option<u64>) -> Result<u64, CliError> {
    flag.or(config).ok_or_else(|| {
        CliError::Usage("a seed is required: pass --seed or set it in --config".into())
    })
}

fn write_text(path: &Path, text: &str) -> anyhow::Result<()> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn emit(out: Option<&Path>, text: &str) -> anyhow::Result<()> {
    match out {
        Some(p) => write_text(p, text),
        None => {
            std::io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializes");
    s.push('\n');
    s
}

fn word_list(path: Option<&Path>) -> anyhow::Result<WordList> {
    match path {
        Some(p) => WordList::read(p).with_context(|| format!("reading {}", p.display())),
        None => Ok(WordList::bundled()),
    }
}

fn load_pair(path: Option<&Path>) -> anyhow::Result<GrammarPair> {
    match path {
        Some(p) => Ok(GrammarPair::read(p)?),
        None => Ok(build_default_grammar_pair(&Default::default())),
    }
}

fn gen_grammar(a: GenGrammarArgs) -> CliResult {
    let (mut cfg, has_seed): (ProbeSuiteConfig, bool) = load_config(a.common.config.as_deref())?;
    cfg.seed = require_seed(a.common.seed, has_seed.then_some(cfg.seed))?;
    if let Some(s) = a.sub_probe {
        cfg.sub_probe = s;
    }
    let c = &mut cfg.counts;
    c.train = a.train.unwrap_or(c.train);
    c.dev = a.dev.unwrap_or(c.dev);
    c.transfer = a.transfer.unwrap_or(c.transfer);
    c.test = a.test.unwrap_or(c.test);
    cfg.n_conjunctions = a.conjunctions.unwrap_or(cfg.n_conjunctions);
    cfg.grammar.chain_weight = a.chain_weight.unwrap_or(cfg.grammar.chain_weight);
    cfg.grammar.passive |= a.passive;
    cfg.contrast &= !a.no_contrast;
    cfg.validate().map_err(|e| CliError::Usage(e.to_string()))?;
    let words = word_list(a.word_list.as_deref())?;
    let suite = generate_probe_suite(&cfg, &words).context("generating grammar probe")?;
    let out = &a.common.out;
    write_dataset(&suite.dataset, out)?;
    write_text(
        &out.join("terminal_map.json"),
        &suite.terminal_map.to_json(),
    )?;
    write_text(&out.join("config.json"), &json(&cfg))?;
    write_text(&out.join("original_pair.json"), &suite.original.to_json())?;
    write_text(&out.join("resampled_pair.json"), &suite.resampled.to_json())?;
    Ok(())
}

fn gen_logic(a: GenLogicArgs) -> CliResult {
    let (mut cfg, has_seed): (LogicSuiteConfig, bool) = load_config(a.common.config.as_deref())?;
    cfg.seed = require_seed(a.common.seed, has_seed.then_some(cfg.seed))?;
    if let Some(s) = a.sub_probe {
        cfg.sub_probe = s;
    }
    let c = &mut cfg.counts;
    c.train = a.train.unwrap_or(c.train);
    c.dev = a.dev.unwrap_or(c.dev);
    c.transfer = a.transfer.unwrap_or(c.transfer);
    c.supplement = a.supplement.unwrap_or(c.supplement);
    c.test = a.test.unwrap_or(c.test);
    cfg.n_ops = a.n_ops.unwrap_or(cfg.n_ops);
    cfg.contrast &= !a.no_contrast;
    cfg.probed_symbol()
        .map_err(|e| CliError::Usage(e.to_string()))?;
    let ds = build_logic_suite(&cfg).context("generating logic probe")?;
    write_dataset(&ds, &a.common.out)?;
    write_text(&a.common.out.join("config.json"), &json(&cfg))?;
    Ok(())
}

#[derive(Serialize)]
struct MutateManifest<'a> {
    mutation: &'a str,
    seed: u64,
    count: usize,
}

fn mutate(a: MutateArgs) -> CliResult {
    let seed = require_seed(a.seed, None)?;
    let base = load_pair(a.pair.as_deref())?;
    let words = word_list(a.word_list.as_deref())?;
    let pair = a
        .mutation
        .apply(&base, &words, seed)
        .context("applying mutation")?;
    fs::create_dir_all(&a.out).with_context(|| format!("creating {}", a.out.display()))?;
    write_text(&a.out.join("pair.json"), &pair.to_json())?;
    if a.count > 0 {
        let examples = sample_corpus(&pair, a.mutation.grammar_tag(), a.count, seed, None, 0)
            .context("sampling corpus")?;
        let mut ds = crate::dataset::ProbeDataset::new(
            crate::dataset::Probe::Grammar,
            SubProbe::None,
            a.mutation.grammar_tag(),
            seed,
        );
        ds.splits.insert(Split::TrainA, examples);
        write_dataset(&ds, &a.out)?;
    } else {
        let m = MutateManifest {
            mutation: a.mutation.as_str(),
            seed,
            count: 0,
        };
        write_text(&a.out.join("manifest.json"), &json(&m))?;
    }
    Ok(())
}

fn parse_plan(s: &str) -> Result<Vec<(MutationName, usize)>, CliError> {
    s.split(',')
        .map(|item| {
            let (name, count) = item
                .split_once('=')
                .ok_or_else(|| CliError::Usage(format!("plan entry {item:?} is not name=count")))?;
            let name: MutationName = name
                .trim()
                .parse()
                .map_err(|e| CliError::Usage(format!("{e}")))?;
            let count: usize = count
                .trim()
                .parse()
                .map_err(|_| CliError::Usage(format!("bad count in {item:?}")))?;
            Ok((name, count))
        })
        .collect()
}

fn multigrammar(a: MultigrammarArgs) -> CliResult {
    let seed = require_seed(a.seed, None)?;
    let plan = parse_plan(&a.plan)?;
    let base = load_pair(a.pair.as_deref())?;
    let ds =
        build_multigrammar_corpus(&base, &plan, seed).context("building multigrammar corpus")?;
    write_dataset(&ds, &a.out)?;
    Ok(())
}

fn convert_cogs(a: ConvertCogsArgs) -> CliResult {
    let mut opts = CogsOptions::default();
    for s in &a.spelling {
        let (from, to) = s
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("--spelling {s:?} is not FROM=TO")))?;
        opts.spelling.insert(from.to_string(), to.to_string());
    }
    let file =
        fs::File::open(&a.input).with_context(|| format!("opening {}", a.input.display()))?;
    let rows = read_cogs_tsv(file).map_err(anyhow::Error::from)?;
    let mut out = String::new();
    for (i, r) in rows.iter().enumerate() {
        let chain = convert_cogs_logical_form(&r.logical_form, &opts)
            .with_context(|| format!("{}: line {}", a.input.display(), i + 1))?;
        out.push_str(&format!(
            "{}\t{}\t{}\n",
            r.source, chain, r.generalization_type
        ));
    }
    write_text(&a.out, &out)?;
    Ok(())
}

fn fuzzy(a: FuzzySplitArgs) -> CliResult {
    let corpus = ParallelCorpus::read(&a.src, &a.tgt).map_err(anyhow::Error::from)?;
    let mut opts = FuzzyOptions::default();
    opts.transfer_max_len = a.transfer_max_len.unwrap_or(opts.transfer_max_len);
    opts.test_min_len = a.test_min_len.unwrap_or(opts.test_min_len);
    opts.contrast &= !a.no_contrast;
    if let (Some(s), Some(t)) = (&a.train_src, &a.train_tgt) {
        opts.train = Some(ParallelCorpus::read(s, t).map_err(anyhow::Error::from)?);
    }
    let split = fuzzy_split(&corpus, &opts).map_err(|e| CliError::Usage(e.to_string()))?;
    write_dataset(&split.dataset, &a.out)?;
    eprintln!("{} probe pairs left unassigned", split.unassigned.len());
    Ok(())
}

fn stats(a: DatasetArgs) -> CliResult {
    let ds = read_dataset(&a.dataset)?;
    let st = dataset_stats(&ds);
    match a.format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(std::io::stdout());
            w.write_record(["split", "count", "avg_source_len", "avg_target_len"])
                .map_err(anyhow::Error::from)?;
            for (split, s) in &st {
                w.write_record([
                    split.to_string(),
                    s.count.to_string(),
                    format!("{:.1}", s.avg_source_len),
                    format!("{:.1}", s.avg_target_len),
                ])
                .map_err(anyhow::Error::from)?;
            }
            w.flush().map_err(anyhow::Error::from)?;
        }
        Format::Json | Format::Text => emit(None, &json(&st))?,
    }
    Ok(())
}

fn check(a: CheckArgs) -> CliResult {
    let ds = match read_dataset(&a.dataset) {
        Ok(ds) => ds,
        Err(e) => {
            println!("{e}");
            return Err(CliError::Validation);
        }
    };
    let mut rules = DatasetRules::for_dataset(&ds);
    rules.exemptions.extend(a.exempt);
    let findings = validate_dataset(&ds, &rules);
    for f in &findings {
        println!("{f}");
    }
    if findings.is_empty() {
        println!("ok: {} examples", ds.len());
        Ok(())
    } else {
        Err(CliError::Validation)
    }
}

fn eval(a: EvalArgs, use_bleu: bool) -> CliResult {
    let ds = read_dataset(&a.dataset)?;
    let golds = golds_from(ds.split(a.split));
    let preds: Vec<Prediction> = read_jsonl(&a.predictions)?;
    if use_bleu {
        let by_id: std::collections::HashMap<&str, &str> = preds
            .iter()
            .map(|p| (p.id.as_str(), p.prediction.as_str()))
            .collect();
        let hyps: Vec<&str> = golds
            .iter()
            .map(|(id, _)| by_id.get(id.as_str()).copied().unwrap_or(""))
            .collect();
        let refs: Vec<&str> = golds.iter().map(|(_, g)| g.as_str()).collect();
        let score = bleu(&hyps, &refs).map_err(anyhow::Error::from)?;
        match a.format {
            Format::Json => emit(None, &json(&serde_json::json!({ "bleu": score })))?,
            Format::Csv => emit(None, &format!("bleu\n{score}\n"))?,
            Format::Text => println!("{score:.2}"),
        }
    } else {
        let em = exact_match(&preds, &golds).map_err(anyhow::Error::from)?;
        if !em.missing.is_empty() {
            eprintln!("{} gold ids have no prediction", em.missing.len());
        }
        match a.format {
            Format::Json => emit(None, &json(&em))?,
            Format::Csv => emit(
                None,
                &format!(
                    "accuracy,n_correct,n_gold\n{},{},{}\n",
                    em.accuracy, em.n_correct, em.n_gold
                ),
            )?,
            Format::Text => println!("{:.1}", em.accuracy),
        }
    }
    Ok(())
}

fn dpc(a: DpcArgs) -> CliResult {
    let records: Vec<LogProbRecord> = read_jsonl(&a.logprobs)?;
    let report = dpc_report(&records).map_err(anyhow::Error::from)?;
    match a.format {
        Format::Json => emit(a.out.as_deref(), &json(&report))?,
        Format::Text => emit(a.out.as_deref(), &report.summary(report.rows.len()))?,
        Format::Csv => {
            let mut buf = Vec::new();
            report.write_csv(&mut buf).map_err(anyhow::Error::from)?;
            emit(
                a.out.as_deref(),
                &String::from_utf8(buf).expect("csv is utf-8"),
            )?;
        }
    }
    Ok(())
}

fn heads(a: HeadsArgs) -> CliResult {
    let text =
        fs::read_to_string(&a.report).with_context(|| format!("reading {}", a.report.display()))?;
    let report: DpcReport = match serde_json::from_str(&text) {
        Ok(r) => r,
        Err(_) => DpcReport::read_csv(text.as_bytes()).map_err(anyhow::Error::from)?,
    };
    let mode = match a.mode {
        ModeArg::Freeze => HeadMode::Freeze,
        ModeArg::Prune => HeadMode::Prune,
    };
    let sel = select_top_heads(&report, a.k, mode).map_err(|e| CliError::Usage(e.to_string()))?;
    emit(a.out.as_deref(), &json(&sel))?;
    Ok(())
}

fn moa_cmd(a: MoaArgs) -> CliResult {
    let inputs = MoaInputs {
        score_main: a.main,
        score_control: a.control,
        score_contrast: a.contrast,
        score_full: a.full,
    };
    let v = moa(&inputs).map_err(|e| CliError::Usage(e.to_string()))?;
    match a.format {
        Format::Text => println!("{v:.2}"),
        Format::Csv => emit(None, &format!("moa\n{v}\n"))?,
        Format::Json => emit(
            None,
            &json(&serde_json::json!({ "inputs": inputs, "moa": v })),
        )?,
    }
    Ok(())
}

fn read_curve(p: &Path) -> anyhow::Result<LearningCurve> {
    let f = fs::File::open(p).with_context(|| format!("opening {}", p.display()))?;
    LearningCurve::from_csv(f).with_context(|| p.display().to_string())
}

fn curve(a: CurveArgs) -> CliResult {
    if let Some(dev) = &a.dev {
        let step = select_checkpoint(&read_curve(dev)?);
        match a.format {
            Format::Json => emit(None, &json(&serde_json::json!({ "step": step })))?,
            _ => println!("{step}"),
        }
        return Ok(());
    }
    let (Some(i), Some(c)) = (&a.in_task, &a.cross_task) else {
        return Err(CliError::Usage(
            "pass --in-task and --cross-task, or --dev".into(),
        ));
    };
    if !(a.threshold > 0.0 && a.threshold <= 1.0) {
        return Err(CliError::Usage("--threshold must be in (0, 1]".into()));
    }
    let r = analyze_learning_curves(&read_curve(i)?, &read_curve(c)?, a.threshold)
        .map_err(anyhow::Error::from)?;
    match a.format {
        Format::Json => emit(None, &json(&r))?,
        Format::Csv => emit(
            None,
            &format!(
                "step_in_task,step_cross_task,phase_difference\n{},{},{}\n",
                r.step_in_task, r.step_cross_task, r.phase_difference
            ),
        )?,
        Format::Text => println!(
            "in-task {} cross-task {} phase difference {}",
            r.step_in_task, r.step_cross_task, r.phase_difference
        ),
    }
    Ok(())
}

fn verdict(a: VerdictArgs) -> CliResult {
    let mut t = VerdictThresholds::default();
    t.min_gain = a.min_gain.unwrap_or(t.min_gain);
    t.max_contrast_ratio = a.max_contrast_ratio.unwrap_or(t.max_contrast_ratio);
    let v = expectation_verdict(a.main, a.control, a.contrast, &t);
    emit(None, &json(&v))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn usage_errors_exit_2() {
        assert_eq!(run(["absprobe", "frobnicate"]), 2);
        assert_eq!(run(["absprobe", "moa", "--main", "1"]), 2);
        assert_eq!(
            run([
                "absprobe",
                "moa",
                "--main",
                "1",
                "--control",
                "0",
                "--contrast",
                "0",
                "--full",
                "0"
            ]),
            2
        );
    }

    #[test]
    fn plan_parsing() {
        let p = parse_plan("original=3, reverse=2").unwrap();
        assert_eq!(
            p,
            vec![(MutationName::Original, 3), (MutationName::Reverse, 2)]
        );
        assert!(parse_plan("original").is_err());
        assert!(parse_plan("sideways=1").is_err());
    }

    #[test]
    fn random_commands_need_a_seed() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("x");
        assert_eq!(
            run(["absprobe", "gen", "logic", "--out", out.to_str().unwrap()]),
            2
        );
    }
}
