//! The `centering-kit` command line.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use centering_core::coref_eval::{ChainSet, CorefCounts};
use centering_core::permute::{coherence_scores, discourse_seed, summarize};
use centering_core::recency::{mean_recency_kp, run_recency_centering, FitGrid, Variant};
use centering_core::stats::{analyze, fisher_z_compare, AnalysisReport};
use centering_core::synthetic::{coherent_corpus, corrupt_mentions, lag_corpus};
use centering_core::{
    compute_scorecard, fit_forget, run_centering, utterances_of, Aggregator, CfCandidate, Document,
    Error as CoreError, Forget, Gate, InstantiationConfig, Metric, PermutationPlan, RecencyConfig, Weighting,
};

use crate::conll::{write_documents, Layout};
use crate::corpus::{load_corpus, LoadError};
use crate::manifest::{ConfigFile, InputFile, RunManifest, TOOL_VERSION};

#[derive(Debug, Parser)]
#[command(name = "centering-kit", version, about = "Centering-theory analysis of coreference-annotated corpora")]
pub struct Cli {
    /// JSON instantiation config (optionally with `recency` and
    /// `permutation` sections).
    #[arg(long, global = true, value_name = "JSON")]
    pub config: Option<PathBuf>,
    /// Worker threads; 0 picks one per core.
    #[arg(long, global = true, default_value_t = 0)]
    pub jobs: usize,
    /// Seed for sampling and synthesis; overrides the config.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output directory, or a file path ending in .csv/.json/.conll for
    /// the primary output.
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, PartialEq, Subcommand, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "kebab-case")]
pub enum Command {
    /// Centering frames and metric scorecards per document.
    Score(ScoreArgs),
    /// Permutation-based coherence scores per document and metric.
    Permute(PermuteArgs),
    /// Correlation, t-test and mutual information of score/F1 pairs.
    Correlate(CorrelateArgs),
    /// MUC, B-cubed, CEAF-phi4 and CoNLL F1 of a prediction.
    CorefEval(CorefEvalArgs),
    /// Grid-fit of the recency forget function against CoNLL F1.
    FitRecency(FitArgs),
    /// Writes a seeded synthetic corpus.
    Synth(SynthArgs),
    /// Re-runs the command recorded in a manifest.
    Replay(ReplayArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WeightingArg {
    Grammatical,
    Semantic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AggregatorArg {
    Max,
    Sum,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CandidateArg {
    ClusterOnly,
    IncludeSingleton,
}

/// Overrides of the instantiation config.
#[derive(Debug, Clone, Default, PartialEq, Args, Serialize, Deserialize)]
pub struct InstantiationArgs {
    #[arg(long)]
    pub weighting: Option<WeightingArg>,
    #[arg(long)]
    pub aggregator: Option<AggregatorArg>,
    #[arg(long)]
    pub cf_candidate: Option<CandidateArg>,
    /// Link every utterance to its immediate predecessor, null or not.
    #[arg(long)]
    pub keep_null_utterances: bool,
}

impl InstantiationArgs {
    fn apply(&self, c: &mut InstantiationConfig) {
        if let Some(w) = self.weighting {
            c.weighting = match w {
                WeightingArg::Grammatical => Weighting::GrammaticalRole,
                WeightingArg::Semantic => Weighting::SemanticRole,
            };
        }
        if let Some(a) = self.aggregator {
            c.aggregator = match a {
                AggregatorArg::Max => Aggregator::Max,
                AggregatorArg::Sum => Aggregator::Sum,
            };
        }
        if let Some(k) = self.cf_candidate {
            c.cf_candidate = match k {
                CandidateArg::ClusterOnly => CfCandidate::ClusterOnly,
                CandidateArg::IncludeSingleton => CfCandidate::IncludeSingleton,
            };
        }
        if self.keep_null_utterances {
            c.skip_null_utterances = false;
        }
    }
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct ScoreArgs {
    /// CoNLL files.
    #[arg(required = true)]
    pub corpus: Vec<PathBuf>,
    #[command(flatten)]
    #[serde(flatten)]
    pub instantiation: InstantiationArgs,
    /// Use the recency backward center (config section `recency`).
    #[arg(long)]
    pub recency: bool,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct PermuteArgs {
    /// CoNLL files.
    #[arg(required = true)]
    pub corpus: Vec<PathBuf>,
    /// nocb, cheap, coherence, salience, kp, tran or all.
    #[arg(long, default_value = "all")]
    pub metric: String,
    /// Orderings sampled per long discourse; 100 unless configured.
    #[arg(long)]
    pub sample_size: Option<usize>,
    /// Longest discourse scored exhaustively; 5 unless configured.
    #[arg(long)]
    pub threshold: Option<usize>,
    #[command(flatten)]
    #[serde(flatten)]
    pub instantiation: InstantiationArgs,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct CorrelateArgs {
    /// CSV with columns id, centering_score, conll_f1.
    pub input: PathBuf,
    /// A second CSV; adds a Fisher z test of the two correlations.
    #[arg(long)]
    pub compare: Option<PathBuf>,
    /// Equal-frequency bins for mutual information; the cube root of n, rounded up, by default.
    #[arg(long)]
    pub nbins: Option<usize>,
    /// Report mutual information in bits instead of nats.
    #[arg(long)]
    pub bits: bool,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct CorefEvalArgs {
    /// Gold CoNLL file.
    #[arg(long)]
    pub gold: PathBuf,
    /// Predicted CoNLL file; documents are matched by id and part.
    #[arg(long)]
    pub pred: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GridArg {
    /// Exponential decay only.
    Decay,
    /// Exponential decay and the affine family.
    Full,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GateArg {
    One,
    Membership,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct FitArgs {
    /// Gold CoNLL file.
    #[arg(long)]
    pub gold: PathBuf,
    /// One predicted clustering of the gold corpus per file; at least 3.
    #[arg(long, required = true, num_args = 1..)]
    pub pred: Vec<PathBuf>,
    #[arg(long, value_enum, default_value_t = GridArg::Full)]
    pub grid: GridArg,
    /// Gate of the fitted update; defaults to the config's, else `one`.
    #[arg(long)]
    pub gate: Option<GateArg>,
    #[command(flatten)]
    #[serde(flatten)]
    pub instantiation: InstantiationArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SynthKind {
    /// Entity-coherent documents with smooth focus shifts.
    Coherent,
    /// Documents whose entities recur two sentences apart.
    Lag,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct SynthArgs {
    #[arg(value_enum)]
    pub kind: SynthKind,
    /// Number of documents.
    #[arg(long, default_value_t = 50)]
    pub docs: usize,
    /// Fraction of mentions moved to a wrong chain.
    #[arg(long, default_value_t = 0.0)]
    pub noise: f64,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct ReplayArgs {
    /// A manifest.json written by an earlier run.
    pub manifest: PathBuf,
}

/// An error with the process exit code it maps to.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    fn new(code: i32, message: impl Into<String>) -> Self {
        CliError { code, message: message.into() }
    }
}

pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_EMPTY: i32 = 3;
pub const EXIT_CONSTANT: i32 = 4;

impl From<LoadError> for CliError {
    fn from(e: LoadError) -> Self {
        CliError::new(EXIT_INPUT, e.to_string())
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        let code = match e {
            CoreError::NothingToScore { .. } => EXIT_EMPTY,
            CoreError::ConstantSeries(_) => EXIT_CONSTANT,
            _ => EXIT_FAILURE,
        };
        let message = match &e {
            CoreError::ConstantSeries(name) => format!("column `{name}` is constant"),
            _ => e.to_string(),
        };
        CliError::new(code, message)
    }
}

fn io_error(path: &Path, e: std::io::Error) -> CliError {
    CliError::new(EXIT_FAILURE, format!("{}: {e}", path.display()))
}

/// Parses `args` (program name first), runs the command and returns the
/// exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match dispatch(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {}", e.message);
            e.code
        }
    }
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cli.jobs)
        .build()
        .map_err(|e| CliError::new(EXIT_FAILURE, e.to_string()))?;
    if let Command::Replay(args) = &cli.command {
        return pool.install(|| replay(&args.manifest, cli.out.as_deref()));
    }
    let mut file = match &cli.config {
        Some(p) => {
            let text = fs::read_to_string(p).map_err(|e| CliError::new(EXIT_INPUT, format!("{}: {e}", p.display())))?;
            serde_json::from_str::<ConfigFile>(&text)
                .map_err(|e| CliError::new(EXIT_INPUT, format!("{}: {e}", p.display())))?
        }
        None => ConfigFile::default(),
    };
    if let Some(seed) = cli.seed {
        file.centering.rng_seed = seed;
        file.permutation.get_or_insert_with(PermutationPlan::default).seed = seed;
    }
    let mut plan = file.permutation.take().unwrap_or(PermutationPlan { seed: file.centering.rng_seed, ..PermutationPlan::default() });
    apply_overrides(&cli.command, &mut file, &mut plan);
    let manifest = RunManifest {
        tool_version: TOOL_VERSION.to_owned(),
        inputs: inputs_of(&cli.command)?,
        command: cli.command,
        config: file,
        plan,
        outputs: Vec::new(),
    };
    let out = cli.out.unwrap_or_else(|| PathBuf::from("centering-out"));
    pool.install(|| execute(manifest, &out))
}

fn apply_overrides(cmd: &Command, file: &mut ConfigFile, plan: &mut PermutationPlan) {
    match cmd {
        Command::Score(a) => a.instantiation.apply(&mut file.centering),
        Command::Permute(a) => {
            a.instantiation.apply(&mut file.centering);
            if let Some(n) = a.sample_size {
                plan.sample_size = n;
            }
            if let Some(t) = a.threshold {
                plan.threshold = t;
            }
        }
        Command::FitRecency(a) => a.instantiation.apply(&mut file.centering),
        _ => {}
    }
}

fn inputs_of(cmd: &Command) -> Result<Vec<InputFile>, CliError> {
    let paths: Vec<&PathBuf> = match cmd {
        Command::Score(a) => a.corpus.iter().collect(),
        Command::Permute(a) => a.corpus.iter().collect(),
        Command::Correlate(a) => std::iter::once(&a.input).chain(a.compare.iter()).collect(),
        Command::CorefEval(a) => vec![&a.gold, &a.pred],
        Command::FitRecency(a) => std::iter::once(&a.gold).chain(a.pred.iter()).collect(),
        Command::Synth(_) | Command::Replay(_) => Vec::new(),
    };
    paths
        .into_iter()
        .map(|p| InputFile::read(p).map_err(|e| CliError::new(EXIT_INPUT, format!("{}: {e}", p.display()))))
        .collect()
}

fn replay(path: &Path, out: Option<&Path>) -> Result<(), CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::new(EXIT_INPUT, format!("{}: {e}", path.display())))?;
    let manifest: RunManifest =
        serde_json::from_str(&text).map_err(|e| CliError::new(EXIT_INPUT, format!("{}: {e}", path.display())))?;
    if manifest.tool_version != TOOL_VERSION {
        log::warn!("manifest written by version {}, running {}", manifest.tool_version, TOOL_VERSION);
    }
    for input in &manifest.inputs {
        let now = InputFile::read(&input.path).map_err(|e| CliError::new(EXIT_INPUT, format!("{}: {e}", input.path.display())))?;
        if now.sha256 != input.sha256 {
            return Err(CliError::new(EXIT_FAILURE, format!("{}: contents changed since the manifest was written", input.path.display())));
        }
    }
    let out = match out {
        Some(o) => o.to_owned(),
        None => path.parent().map_or_else(|| PathBuf::from("."), Path::to_owned),
    };
    execute(manifest, &out)
}

/// Where the files of one run go.
struct Outputs {
    dir: PathBuf,
    /// Set when `--out` names the primary file itself.
    primary: Option<PathBuf>,
    written: Vec<(String, Vec<u8>)>,
}

impl Outputs {
    fn new(out: &Path) -> Self {
        let is_file = matches!(out.extension().and_then(|e| e.to_str()), Some("csv" | "json" | "jsonl" | "conll"));
        if is_file {
            let dir = out.parent().map_or_else(PathBuf::new, Path::to_owned);
            Outputs { dir, primary: Some(out.to_owned()), written: Vec::new() }
        } else {
            Outputs { dir: out.to_owned(), primary: None, written: Vec::new() }
        }
    }

    /// File name for an output; the first output of a command is the
    /// primary one.
    fn name(&self, default: &str) -> String {
        match &self.primary {
            None => default.to_owned(),
            Some(p) => {
                let file = p.file_name().map(|f| f.to_string_lossy().into_owned()).unwrap_or_default();
                if self.written.is_empty() {
                    file
                } else {
                    let stem = p.file_stem().map(|f| f.to_string_lossy().into_owned()).unwrap_or_default();
                    format!("{stem}.{default}")
                }
            }
        }
    }

    fn add(&mut self, default: &str, bytes: Vec<u8>) {
        let name = self.name(default);
        self.written.push((name, bytes));
    }

    fn flush(mut self, mut manifest: RunManifest) -> Result<(), CliError> {
        let manifest_name = self.name("manifest.json");
        manifest.outputs = self.written.iter().map(|(n, _)| n.clone()).collect();
        let mut json = serde_json::to_vec_pretty(&manifest).expect("manifest serializes");
        json.push(b'\n');
        self.written.push((manifest_name, json));
        if !self.dir.as_os_str().is_empty() {
            fs::create_dir_all(&self.dir).map_err(|e| io_error(&self.dir, e))?;
        }
        for (name, bytes) in &self.written {
            let path = self.dir.join(name);
            fs::write(&path, bytes).map_err(|e| io_error(&path, e))?;
            log::info!("wrote {}", path.display());
        }
        Ok(())
    }
}

fn execute(manifest: RunManifest, out: &Path) -> Result<(), CliError> {
    let mut outputs = Outputs::new(out);
    let hash = manifest.hash();
    let config = manifest.config.centering;
    match &manifest.command {
        Command::Score(a) => score(a, &config, manifest.config.recency, &mut outputs)?,
        Command::Permute(a) => permute(a, &config, &manifest.plan, &mut outputs)?,
        Command::Correlate(a) => correlate(a, &hash, &mut outputs)?,
        Command::CorefEval(a) => coref_eval(a, &hash, &mut outputs)?,
        Command::FitRecency(a) => fit_recency(a, &config, manifest.config.recency, &hash, &mut outputs)?,
        Command::Synth(a) => synth(a, manifest.plan.seed, &mut outputs)?,
        Command::Replay(_) => return Err(CliError::new(EXIT_FAILURE, "a manifest cannot record a replay")),
    }
    outputs.flush(manifest)
}

fn corpus(paths: &[PathBuf]) -> Result<Vec<Document>, CliError> {
    let docs = load_corpus(paths)?;
    if docs.is_empty() {
        return Err(CliError::new(EXIT_EMPTY, "the corpus has no documents"));
    }
    Ok(docs)
}

fn float(x: f64) -> String {
    format!("{x:?}")
}

fn csv_bytes(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<Vec<u8>, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let fail = |e: csv::Error| CliError::new(EXIT_FAILURE, e.to_string());
    w.write_record(header).map_err(fail)?;
    for row in rows {
        w.write_record(&row).map_err(fail)?;
    }
    w.into_inner().map_err(|e| CliError::new(EXIT_FAILURE, e.to_string()))
}

fn json_bytes<T: Serialize>(value: &T) -> Vec<u8> {
    let mut v = serde_json::to_vec_pretty(value).expect("outputs serialize");
    v.push(b'\n');
    v
}

fn has_semantic_annotation(doc: &Document) -> bool {
    doc.has_srl() || doc.sentences.iter().flat_map(|s| &s.tokens).any(|t| t.semantic_hint.is_some())
}

#[derive(Serialize)]
struct FrameLine<'a> {
    doc_id: &'a str,
    ordinal: usize,
    sentence: usize,
    cf: Vec<CfEntry>,
    cp: Option<u64>,
    cb: Option<u64>,
    transition: centering_core::Transition,
    linked: bool,
}

#[derive(Serialize)]
struct CfEntry {
    entity: u64,
    weight: f64,
}

const SCORECARD_HEADER: [&str; 11] =
    ["doc_id", "t", "not_nocb", "cheap", "coherence", "salience", "kp", "cont", "ret", "sshift", "rshift"];

fn score(a: &ScoreArgs, config: &InstantiationConfig, recency: Option<RecencyConfig>, out: &mut Outputs) -> Result<(), CliError> {
    let docs = corpus(&a.corpus)?;
    if config.weighting == Weighting::SemanticRole {
        for d in docs.iter().filter(|d| !has_semantic_annotation(d)) {
            log::warn!("{}: no semantic-role annotation; every mention ranks as Other", d.key());
        }
    }
    let rc = a.recency.then(|| recency.unwrap_or_default());
    let results = docs
        .par_iter()
        .map(|d| {
            let utts = utterances_of(d, &d.mentions)?;
            let frames = match &rc {
                Some(rc) => run_recency_centering(&utts, config, rc)?,
                None => run_centering(&utts, config),
            };
            let card = match compute_scorecard(&frames) {
                Ok(c) => Some(c),
                Err(CoreError::NoTransitions) => None,
                Err(e) => return Err(e),
            };
            Ok((frames, card))
        })
        .collect::<Result<Vec<_>, CoreError>>()?;

    let mut rows = Vec::with_capacity(docs.len());
    let mut frames_out = String::new();
    for (d, (frames, card)) in docs.iter().zip(&results) {
        let key = d.key();
        rows.push(match card {
            Some(c) => vec![
                key.clone(),
                c.t.to_string(),
                float(c.not_nocb),
                float(c.cheap),
                float(c.coherence),
                float(c.salience),
                float(c.kp),
                c.tran.cont.to_string(),
                c.tran.ret.to_string(),
                c.tran.sshift.to_string(),
                c.tran.rshift.to_string(),
            ],
            None => {
                log::warn!("{key}: no transitions; scorecard left empty");
                let mut r = vec![key.clone(), "0".to_owned()];
                r.resize(SCORECARD_HEADER.len(), String::new());
                r
            }
        });
        for f in frames {
            let line = FrameLine {
                doc_id: &key,
                ordinal: f.utterance_ordinal,
                sentence: f.sentence,
                cf: f.cf.iter().map(|(e, c)| CfEntry { entity: e.0, weight: c.weight }).collect(),
                cp: f.cp.map(|e| e.0),
                cb: f.cb.map(|e| e.0),
                transition: f.transition,
                linked: f.linked,
            };
            frames_out.push_str(&serde_json::to_string(&line).expect("frames serialize"));
            frames_out.push('\n');
        }
    }
    out.add("scorecards.csv", csv_bytes(&SCORECARD_HEADER, rows)?);
    out.add("frames.jsonl", frames_out.into_bytes());
    Ok(())
}

pub fn parse_metrics(list: &str) -> Result<Vec<Metric>, CliError> {
    if list.eq_ignore_ascii_case("all") {
        return Ok(Metric::ALL.to_vec());
    }
    let mut metrics = list
        .split(',')
        .map(|s| s.trim().parse::<Metric>().map_err(|e| CliError::new(EXIT_INPUT, e.to_string())))
        .collect::<Result<Vec<_>, _>>()?;
    metrics.sort();
    metrics.dedup();
    Ok(metrics)
}

fn permute(a: &PermuteArgs, config: &InstantiationConfig, plan: &PermutationPlan, out: &mut Outputs) -> Result<(), CliError> {
    let metrics = parse_metrics(&a.metric)?;
    let docs = corpus(&a.corpus)?;
    let results = docs
        .par_iter()
        .enumerate()
        .map(|(i, d)| {
            let utts = utterances_of(d, &d.mentions)?;
            let plan = PermutationPlan { seed: discourse_seed(plan.seed, i), ..*plan };
            Ok(match coherence_scores(&utts, config, &metrics, &plan) {
                Ok(r) => Some(r),
                Err(e @ (CoreError::TooFewUtterances(_) | CoreError::NoTransitions)) => {
                    log::warn!("{}: skipped: {e}", d.key());
                    None
                }
                Err(e) => return Err(e),
            })
        })
        .collect::<Result<Vec<_>, CoreError>>()?;

    let mut rows = Vec::new();
    for (d, r) in docs.iter().zip(&results) {
        for c in r.iter().flatten() {
            rows.push(vec![
                d.key(),
                c.metric.to_string(),
                c.n_utt.to_string(),
                c.worse.to_string(),
                c.equal.to_string(),
                c.better.to_string(),
                float(c.ch),
            ]);
        }
    }
    let mut summary = Vec::new();
    for (k, &m) in metrics.iter().enumerate() {
        let per_doc = results.iter().map(|r| r.as_ref().map(|v| v[k])).collect();
        let s = summarize(m, per_doc)?;
        summary.push(vec![m.to_string(), float(s.mean_ch), s.scored.to_string(), s.skipped.to_string()]);
    }
    out.add("permute.csv", csv_bytes(&["doc_id", "metric", "n_utt", "worse", "equal", "better", "ch"], rows)?);
    out.add("permute_summary.csv", csv_bytes(&["metric", "mean_ch", "scored", "skipped"], summary)?);
    Ok(())
}

#[derive(Debug, Deserialize)]
struct ScoreRow {
    #[allow(dead_code)]
    id: String,
    centering_score: f64,
    conll_f1: f64,
}

fn read_pairs(path: &Path) -> Result<(Vec<f64>, Vec<f64>), CliError> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| CliError::new(EXIT_INPUT, format!("{}: {e}", path.display())))?;
    let (mut xs, mut ys) = (Vec::new(), Vec::new());
    for row in reader.deserialize::<ScoreRow>() {
        let row = row.map_err(|e| CliError::new(EXIT_INPUT, format!("{}: {e}", path.display())))?;
        xs.push(row.centering_score);
        ys.push(row.conll_f1);
    }
    if xs.is_empty() {
        return Err(CliError::new(EXIT_EMPTY, format!("{}: no rows", path.display())));
    }
    Ok((xs, ys))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReportOut {
    pub input: PathBuf,
    #[serde(flatten)]
    pub report: AnalysisReport,
    pub mi_unit: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Comparison {
    pub other: ReportOut,
    pub fisher_z_p: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CorrelateOut {
    pub manifest_hash: String,
    pub report: ReportOut,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub compare: Option<Comparison>,
}

fn report_for(path: &Path, nbins: Option<usize>, bits: bool) -> Result<ReportOut, CliError> {
    let (xs, ys) = read_pairs(path)?;
    let mut report = analyze(&xs, &ys, nbins, ("centering_score", "conll_f1"))?;
    if bits {
        report.mi /= std::f64::consts::LN_2;
    }
    Ok(ReportOut { input: path.to_owned(), report, mi_unit: if bits { "bits" } else { "nats" }.to_owned() })
}

fn correlate(a: &CorrelateArgs, hash: &str, out: &mut Outputs) -> Result<(), CliError> {
    let report = report_for(&a.input, a.nbins, a.bits)?;
    let compare = match &a.compare {
        Some(p) => {
            let other = report_for(p, a.nbins, a.bits)?;
            let p = fisher_z_compare(report.report.pearson_r, report.report.n, other.report.pearson_r, other.report.n)?;
            Some(Comparison { other, fisher_z_p: p })
        }
        None => None,
    };
    out.add("report.json", json_bytes(&CorrelateOut { manifest_hash: hash.to_owned(), report, compare }));
    Ok(())
}

/// Mentions of `pred` aligned to the documents of `gold` by key; documents
/// missing from the prediction get no mentions.
fn aligned_mentions(gold: &[Document], pred: &[Document], pred_path: &Path) -> Result<Vec<Vec<centering_core::MentionSpan>>, CliError> {
    let by_key: std::collections::HashMap<String, &Document> = pred.iter().map(|d| (d.key(), d)).collect();
    for key in by_key.keys() {
        if !gold.iter().any(|g| &g.key() == key) {
            log::warn!("{}: document {key} is not in the gold corpus", pred_path.display());
        }
    }
    gold.iter()
        .map(|g| {
            let Some(p) = by_key.get(&g.key()) else {
                log::warn!("{}: document {} missing; scored as empty", pred_path.display(), g.key());
                return Ok(Vec::new());
            };
            for m in &p.mentions {
                g.check_mention(m).map_err(|e| CliError::new(EXIT_INPUT, format!("{}: {}: {e}", pred_path.display(), g.key())))?;
            }
            Ok(p.mentions.clone())
        })
        .collect()
}

fn coref_counts(gold: &[Document], pred: &[Vec<centering_core::MentionSpan>]) -> Result<CorefCounts, CliError> {
    let mut total = CorefCounts::default();
    for (g, p) in gold.iter().zip(pred) {
        total += CorefCounts::of(&ChainSet::from_mentions(&g.mentions)?, &ChainSet::from_mentions(p)?);
    }
    Ok(total)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CorefOut {
    pub manifest_hash: String,
    pub documents: usize,
    pub muc: centering_core::coref_eval::Prf,
    pub b3: centering_core::coref_eval::Prf,
    pub ceaf4: centering_core::coref_eval::Prf,
    pub conll_f1: f64,
}

fn coref_eval(a: &CorefEvalArgs, hash: &str, out: &mut Outputs) -> Result<(), CliError> {
    let gold = corpus(std::slice::from_ref(&a.gold))?;
    let pred = load_corpus(std::slice::from_ref(&a.pred))?;
    let aligned = aligned_mentions(&gold, &pred, &a.pred)?;
    let c = coref_counts(&gold, &aligned)?;
    let report = CorefOut {
        manifest_hash: hash.to_owned(),
        documents: gold.len(),
        muc: c.muc.prf(),
        b3: c.b3.prf(),
        ceaf4: c.ceaf4.prf(),
        conll_f1: c.conll_f1(),
    };
    out.add("coref.json", json_bytes(&report));
    Ok(())
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VariantOut {
    pub input: PathBuf,
    pub conll_f1: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FitOut {
    pub manifest_hash: String,
    pub variants: Vec<VariantOut>,
    /// Correlation of classic centering KP with F1.
    pub vanilla_r: Option<f64>,
    #[serde(flatten)]
    pub report: centering_core::FitReport,
}

fn fit_recency(
    a: &FitArgs,
    config: &InstantiationConfig,
    recency: Option<RecencyConfig>,
    hash: &str,
    out: &mut Outputs,
) -> Result<(), CliError> {
    let gold = corpus(std::slice::from_ref(&a.gold))?;
    let mut variants = Vec::with_capacity(a.pred.len());
    for p in &a.pred {
        let pred = load_corpus(std::slice::from_ref(p))?;
        let mentions = aligned_mentions(&gold, &pred, p)?;
        let conll_f1 = coref_counts(&gold, &mentions)?.conll_f1();
        variants.push(Variant { mentions, conll_f1 });
    }
    let mut base = recency.unwrap_or(RecencyConfig { gate: Gate::One, ..RecencyConfig::default() });
    if let Some(g) = a.gate {
        base.gate = match g {
            GateArg::One => Gate::One,
            GateArg::Membership => Gate::MembershipIndicator,
        };
    }
    let grid = match a.grid {
        GridArg::Decay => FitGrid::decay_only(FitGrid::default().gammas),
        GridArg::Full => FitGrid::default(),
    };
    let report = fit_forget(&gold, &variants, config, &base, &grid)?;

    // classic centering over the same variants, for comparison
    let vanilla = variants
        .par_iter()
        .map(|v| {
            let discourses = gold.iter().zip(&v.mentions).map(|(d, m)| utterances_of(d, m)).collect::<Result<Vec<_>, _>>()?;
            mean_recency_kp(&discourses, config, &RecencyConfig::default())
        })
        .collect::<Result<Vec<_>, CoreError>>()?;
    let f1: Vec<f64> = variants.iter().map(|v| v.conll_f1).collect();
    let vanilla: Option<Vec<f64>> = vanilla.into_iter().collect();
    let vanilla_r = vanilla.as_ref().and_then(|v| centering_core::stats::pearson(v, &f1).ok());

    let baseline = report.grid.iter().find(|p| p.forget == Forget::ExponentialDecay { gamma: 0.0 });
    let best = report.grid.iter().find(|p| p.forget == report.best.forget);
    let series = |scores: Option<&Vec<f64>>| -> Result<Vec<u8>, CliError> {
        let rows = a.pred.iter().zip(&f1).enumerate().map(|(i, (p, f))| {
            vec![p.display().to_string(), scores.map_or_else(String::new, |s| float(s[i])), float(*f)]
        });
        csv_bytes(&["id", "centering_score", "conll_f1"], rows)
    };
    let summary = FitOut {
        manifest_hash: hash.to_owned(),
        variants: a.pred.iter().zip(&f1).map(|(p, &f)| VariantOut { input: p.clone(), conll_f1: f }).collect(),
        vanilla_r,
        report: report.clone(),
    };
    out.add("fit.json", json_bytes(&summary));
    out.add("scores_fitted.csv", series(best.map(|p| &p.scores))?);
    out.add("scores_gamma0.csv", series(baseline.map(|p| &p.scores))?);
    out.add("scores_vanilla.csv", series(vanilla.as_ref())?);
    Ok(())
}

fn synth(a: &SynthArgs, seed: u64, out: &mut Outputs) -> Result<(), CliError> {
    if !(0.0..=1.0).contains(&a.noise) {
        return Err(CliError::new(EXIT_INPUT, format!("noise {} is outside [0, 1]", a.noise)));
    }
    let clean = match a.kind {
        SynthKind::Coherent => coherent_corpus(a.docs, seed),
        SynthKind::Lag => lag_corpus(a.docs, seed),
    };
    let docs = clean
        .into_iter()
        .enumerate()
        .map(|(i, d)| {
            if a.noise > 0.0 {
                d.with_mentions(corrupt_mentions(&d.mentions, a.noise, discourse_seed(seed, i)))
            } else {
                Ok(d)
            }
        })
        .collect::<Result<Vec<_>, _>>()?;
    let mut text = String::new();
    let _ = writeln!(text, "# {} corpus, seed {seed}, noise {}", match a.kind {
        SynthKind::Coherent => "coherent",
        SynthKind::Lag => "lag",
    }, a.noise);
    text.push_str(&write_documents(&docs, Layout::Minimal));
    out.add("synth.conll", text.into_bytes());
    Ok(())
}
