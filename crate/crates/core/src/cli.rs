//! The `gar` command line.
//!
//! Every flag can also be set through a `GAR_`-prefixed environment
//! variable (`--k1` is `GAR_K1`, `--fb-docs` is `GAR_FB_DOCS`). Exit codes:
//! 0 on success, 1 for usage or configuration errors, 2 for data errors.

use std::collections::HashMap;
use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::augment::{
    self, augment_questions, load_contexts, prepare_targets, rm3_search, save_targets, ContextType,
    Rm3Params,
};
use crate::config::{load_config, parse_cutoffs, Overrides};
use crate::corpus::{load_corpus, load_questions, save_questions, Corpus, Question};
use crate::error::{Error, Result};
use crate::eval::{exact_match, hit_depth, rouge_f1, Labeler, RougeScores};
use crate::fusion::{fuse_all, FusionStrategy};
use crate::index::{Bm25Params, InvertedIndex};
use crate::jsonl;
use crate::pipeline::{retrieve, run_pipeline};
use crate::report::RunReport;
use crate::run::{read_trec, write_trec, RunSet};
use crate::voting::{
    baseline_select, load_predictions, load_reader_outputs, vote, Prediction, VotingConfig,
};

#[derive(Debug, Parser)]
#[command(
    name = "gar",
    version,
    about = "Generation-augmented BM25 retrieval and QA evaluation"
)]
pub struct Cli {
    /// Worker threads for per-question parallelism (0 = all cores).
    #[arg(long, global = true, env = "GAR_JOBS", default_value_t = 0)]
    pub jobs: usize,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
#[allow(clippy::large_enum_variant)]
pub enum Command {
    /// Build a BM25 index from a passage file.
    Index(IndexArgs),
    /// Extract seq2seq training targets of one context type.
    PrepTargets(PrepTargetsArgs),
    /// Append generated contexts to questions.
    Augment(AugmentArgs),
    /// Retrieve passages for every question and write a TREC run.
    Retrieve(RetrieveArgs),
    /// Retrieve with RM3-expanded queries.
    Rm3(Rm3Args),
    /// Fuse several TREC runs into one.
    Fuse(FuseArgs),
    /// Top-k retrieval accuracy of a run, overall and per question group.
    EvalRetrieval(EvalRetrievalArgs),
    /// Exact Match of predicted answers.
    EvalEm(EvalEmArgs),
    /// ROUGE-1/2/L F1 of generated contexts, or of queries against positive passages.
    EvalRouge(EvalRougeArgs),
    /// Pick answers from reader output by passage-level span voting.
    Vote(VoteArgs),
    /// Run index, augment, retrieve, fuse and evaluate from a config file.
    Pipeline(PipelineArgs),
}

#[derive(Debug, Clone, Copy, Default, ValueEnum)]
pub enum Format {
    #[default]
    Json,
    Tsv,
}

#[derive(Debug, Args)]
pub struct IndexArgs {
    #[arg(long, env = "GAR_CORPUS")]
    pub corpus: PathBuf,
    #[arg(long, env = "GAR_INDEX_OUT")]
    pub out: PathBuf,
    #[arg(long, env = "GAR_K1", default_value_t = Bm25Params::default().k1)]
    pub k1: f64,
    #[arg(long, env = "GAR_B", default_value_t = Bm25Params::default().b)]
    pub b: f64,
}

#[derive(Debug, Args)]
pub struct PrepTargetsArgs {
    #[arg(long, env = "GAR_CORPUS")]
    pub corpus: PathBuf,
    #[arg(long, env = "GAR_QUESTIONS")]
    pub questions: PathBuf,
    #[arg(long, env = "GAR_INDEX")]
    pub index: PathBuf,
    #[arg(long = "type", value_parser = parse_context_type)]
    pub context_type: ContextType,
    /// Retrieval depth searched for positive passages.
    #[arg(long, env = "GAR_POSITIVE_DEPTH", default_value_t = augment::DEFAULT_POSITIVE_DEPTH)]
    pub k: usize,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct AugmentArgs {
    #[arg(long, env = "GAR_QUESTIONS")]
    pub questions: PathBuf,
    #[arg(long)]
    pub contexts: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct RetrieveArgs {
    #[arg(long, env = "GAR_INDEX")]
    pub index: PathBuf,
    #[arg(long, env = "GAR_QUESTIONS")]
    pub questions: PathBuf,
    /// Context file; when given, queries are augmented before retrieval.
    #[arg(long)]
    pub contexts: Option<PathBuf>,
    #[arg(long, env = "GAR_DEPTH", default_value_t = 100)]
    pub k: usize,
    /// Run name written to the tag column.
    #[arg(long)]
    pub name: Option<String>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct Rm3Args {
    #[arg(long, env = "GAR_INDEX")]
    pub index: PathBuf,
    #[arg(long, env = "GAR_QUESTIONS")]
    pub questions: PathBuf,
    #[arg(long, env = "GAR_FB_DOCS", default_value_t = Rm3Params::default().fb_docs)]
    pub fb_docs: usize,
    #[arg(long, env = "GAR_FB_TERMS", default_value_t = Rm3Params::default().fb_terms)]
    pub fb_terms: usize,
    #[arg(long, env = "GAR_ALPHA", default_value_t = Rm3Params::default().alpha)]
    pub alpha: f64,
    #[arg(long, env = "GAR_DEPTH", default_value_t = 100)]
    pub k: usize,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct FuseArgs {
    #[arg(long, num_args = 1.., required = true)]
    pub runs: Vec<PathBuf>,
    #[arg(long, env = "GAR_FUSION_STRATEGY", default_value = "round_robin", value_parser = parse_strategy)]
    pub strategy: FusionStrategy,
    #[arg(long, env = "GAR_FUSION_K", default_value_t = 100)]
    pub k: usize,
    /// RRF constant.
    #[arg(long, env = "GAR_RRF_C", default_value_t = crate::fusion::DEFAULT_RRF_C)]
    pub rrf_c: f64,
    #[arg(long)]
    pub name: Option<String>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct EvalRetrievalArgs {
    #[arg(long)]
    pub run: PathBuf,
    #[arg(long, env = "GAR_QUESTIONS")]
    pub questions: PathBuf,
    #[arg(long, env = "GAR_CORPUS")]
    pub corpus: PathBuf,
    #[arg(long, env = "GAR_KS", default_value = "1,5,20,100")]
    pub ks: String,
    /// `{question_id, label}` lines; defaults to question-type groups.
    #[arg(long)]
    pub labels: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t)]
    pub format: Format,
    /// Write here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EvalEmArgs {
    #[arg(long)]
    pub predictions: PathBuf,
    #[arg(long, env = "GAR_QUESTIONS")]
    pub questions: PathBuf,
    #[arg(long, value_enum, default_value_t)]
    pub format: Format,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EvalRougeArgs {
    /// Records with `question_id` and `text` (context files).
    #[arg(long, required_unless_present = "overlap")]
    pub candidates: Option<PathBuf>,
    /// Records with `question_id` and `reference` (target files) or `text`.
    #[arg(long, required_unless_present = "overlap")]
    pub references: Option<PathBuf>,
    /// Score each query against its first answer-bearing passage in `--run`.
    #[arg(long, requires_all = ["questions", "corpus", "run"], conflicts_with_all = ["candidates", "references"])]
    pub overlap: bool,
    #[arg(long)]
    pub questions: Option<PathBuf>,
    #[arg(long)]
    pub corpus: Option<PathBuf>,
    #[arg(long)]
    pub run: Option<PathBuf>,
    /// With `--overlap`: augment the queries with these contexts first.
    #[arg(long, requires = "overlap")]
    pub contexts: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t)]
    pub format: Format,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VoteArgs {
    #[arg(long)]
    pub reader_output: PathBuf,
    /// Spans kept per passage.
    #[arg(long, env = "GAR_VOTING_N", default_value_t = 5)]
    pub n: usize,
    /// Group raw span strings instead of normalized ones.
    #[arg(long)]
    pub raw: bool,
    /// Best span of the best passage, no voting.
    #[arg(long)]
    pub baseline: bool,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct PipelineArgs {
    #[arg(long, env = "GAR_CONFIG")]
    pub config: Option<PathBuf>,
    #[arg(long, env = "GAR_CORPUS")]
    pub corpus: Option<PathBuf>,
    #[arg(long, env = "GAR_QUESTIONS")]
    pub questions: Option<PathBuf>,
    #[arg(long, env = "GAR_INDEX")]
    pub index_dir: Option<PathBuf>,
    #[arg(long, env = "GAR_OUTPUT_DIR")]
    pub output_dir: Option<PathBuf>,
    #[arg(long)]
    pub labels: Option<PathBuf>,
    #[arg(long)]
    pub answer_contexts: Option<PathBuf>,
    #[arg(long)]
    pub sentence_contexts: Option<PathBuf>,
    #[arg(long)]
    pub title_contexts: Option<PathBuf>,
    #[arg(long, num_args = 1..)]
    pub external_runs: Option<Vec<PathBuf>>,
    #[arg(long, env = "GAR_K1")]
    pub k1: Option<f64>,
    #[arg(long, env = "GAR_B")]
    pub b: Option<f64>,
    #[arg(long, env = "GAR_DEPTH")]
    pub depth: Option<usize>,
    #[arg(long, env = "GAR_FUSION_STRATEGY")]
    pub strategy: Option<String>,
    #[arg(long, env = "GAR_FUSION_K")]
    pub fusion_k: Option<usize>,
    #[arg(long, env = "GAR_RRF_C")]
    pub rrf_c: Option<f64>,
    #[arg(long, env = "GAR_VOTING_N")]
    pub voting_n: Option<usize>,
    #[arg(long, env = "GAR_KS")]
    pub ks: Option<String>,
    /// Print the resolved configuration and exit.
    #[arg(long)]
    pub check: bool,
}

fn parse_context_type(s: &str) -> std::result::Result<ContextType, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_strategy(s: &str) -> std::result::Result<FusionStrategy, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

/// Parses `args` and runs the command; returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
        }
    };
    match run(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_usage() {
                1
            } else {
                2
            }
        }
    }
}

pub fn run(cli: Cli) -> Result<()> {
    if let Command::Pipeline(args) = cli.command {
        return cmd_pipeline(args, cli.jobs);
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cli.jobs)
        .build()
        .map_err(|e| Error::InvalidArgument(format!("cannot start worker pool: {e}")))?;
    pool.install(|| match cli.command {
        Command::Index(a) => cmd_index(a),
        Command::PrepTargets(a) => cmd_prep_targets(a),
        Command::Augment(a) => cmd_augment(a),
        Command::Retrieve(a) => cmd_retrieve(a),
        Command::Rm3(a) => cmd_rm3(a),
        Command::Fuse(a) => cmd_fuse(a),
        Command::EvalRetrieval(a) => cmd_eval_retrieval(a),
        Command::EvalEm(a) => cmd_eval_em(a),
        Command::EvalRouge(a) => cmd_eval_rouge(a),
        Command::Vote(a) => cmd_vote(a),
        Command::Pipeline(_) => unreachable!(),
    })
}

fn require_positive(name: &str, value: usize) -> Result<()> {
    if value == 0 {
        Err(Error::InvalidArgument(format!("--{name} must be ≥ 1")))
    } else {
        Ok(())
    }
}

fn cmd_index(a: IndexArgs) -> Result<()> {
    if !a.k1.is_finite() || a.k1 < 0.0 || !(0.0..=1.0).contains(&a.b) {
        return Err(Error::InvalidArgument("need k1 ≥ 0 and b in [0, 1]".into()));
    }
    let corpus = load_corpus(&a.corpus)?;
    let index = InvertedIndex::build(&corpus, Bm25Params { k1: a.k1, b: a.b });
    index.save(&a.out)?;
    eprintln!(
        "indexed {} passages, {} terms, avgdl {:.2} -> {}",
        index.num_passages(),
        index.num_terms(),
        index.avgdl(),
        a.out.display()
    );
    Ok(())
}

fn cmd_prep_targets(a: PrepTargetsArgs) -> Result<()> {
    require_positive("k", a.k)?;
    let corpus = load_corpus(&a.corpus)?;
    let questions = load_questions(&a.questions)?;
    let index = InvertedIndex::load(&a.index)?;
    let targets = prepare_targets(&corpus, &index, &questions, a.context_type, a.k)?;
    save_targets(&a.out, &targets)?;
    eprintln!(
        "{} {} targets for {} questions -> {}",
        targets.len(),
        a.context_type,
        questions.len(),
        a.out.display()
    );
    Ok(())
}

fn cmd_augment(a: AugmentArgs) -> Result<()> {
    let questions = load_questions(&a.questions)?;
    let contexts = load_contexts(&a.contexts)?;
    save_questions(&a.out, &augment_questions(&questions, &contexts)?)
}

fn cmd_retrieve(a: RetrieveArgs) -> Result<()> {
    require_positive("k", a.k)?;
    let index = InvertedIndex::load(&a.index)?;
    let mut questions = load_questions(&a.questions)?;
    let mut name = "bm25".to_string();
    if let Some(path) = &a.contexts {
        let contexts = load_contexts(path)?;
        if let Some(first) = contexts.first() {
            name = crate::pipeline::context_run_name(first.context_type);
        }
        questions = augment_questions(&questions, &contexts)?;
    }
    let name = a.name.unwrap_or(name);
    write_trec(&a.out, &retrieve(&index, &name, &questions, a.k))
}

fn cmd_rm3(a: Rm3Args) -> Result<()> {
    require_positive("k", a.k)?;
    let params = Rm3Params {
        fb_docs: a.fb_docs,
        fb_terms: a.fb_terms,
        alpha: a.alpha,
    };
    params.validate()?;
    let index = InvertedIndex::load(&a.index)?;
    let questions = load_questions(&a.questions)?;
    use rayon::prelude::*;
    let lists = questions
        .par_iter()
        .map(|q| rm3_search(&index, &q.id, &q.text, params, a.k))
        .collect::<Result<Vec<_>>>()?;
    let name = format!("rm3_fb{}_t{}_a{}", a.fb_docs, a.fb_terms, a.alpha);
    write_trec(&a.out, &RunSet::from_lists(name, lists)?)
}

fn cmd_fuse(a: FuseArgs) -> Result<()> {
    require_positive("k", a.k)?;
    if !a.rrf_c.is_finite() || a.rrf_c <= 0.0 {
        return Err(Error::InvalidArgument("--rrf-c must be > 0".into()));
    }
    let strategy = match a.strategy {
        FusionStrategy::Rrf { .. } => FusionStrategy::Rrf { c: a.rrf_c },
        s => s,
    };
    let runs = a
        .runs
        .iter()
        .map(|p| read_trec(p))
        .collect::<Result<Vec<_>>>()?;
    let mut fused = fuse_all(&runs, strategy, a.k);
    if let Some(name) = a.name {
        fused.name = name;
    }
    write_trec(&a.out, &fused)
}

fn emit(out: Option<&Path>, body: &str) -> Result<()> {
    match out {
        Some(path) => jsonl::write_with(path, |w| w.write_all(body.as_bytes())),
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            lock.write_all(body.as_bytes())
                .map_err(|e| Error::io("<stdout>", e))
        }
    }
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report types serialize");
    s.push('\n');
    s
}

fn cmd_eval_retrieval(a: EvalRetrievalArgs) -> Result<()> {
    let ks = parse_cutoffs(&a.ks).map_err(|e| Error::InvalidArgument(e.to_string()))?;
    if ks.is_empty() || ks[0] == 0 || ks.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidArgument(format!(
            "--ks must be positive and strictly increasing, got {ks:?}"
        )));
    }
    let corpus = load_corpus(&a.corpus)?;
    let questions = load_questions(&a.questions)?;
    let run = read_trec(&a.run)?;
    let labeler = match &a.labels {
        Some(p) => Labeler::from_file(p)?,
        None => Labeler::QuestionType,
    };
    let report = RunReport::build(&run, &questions, &corpus, &ks, &labeler)?;
    let body = match a.format {
        Format::Json => to_json(&report),
        Format::Tsv => report.to_tsv(),
    };
    emit(a.out.as_deref(), &body)
}

#[derive(Debug, Serialize)]
struct EmDetail<'a> {
    question_id: &'a str,
    prediction: Option<&'a str>,
    correct: bool,
}

#[derive(Debug, Serialize)]
struct EmReport<'a> {
    count: usize,
    missing: usize,
    exact_match: f64,
    questions: Vec<EmDetail<'a>>,
}

fn em_report<'a>(questions: &'a [Question], predictions: &'a [Prediction]) -> EmReport<'a> {
    let by_id: HashMap<&str, &str> = predictions
        .iter()
        .map(|p| (p.question_id.as_str(), p.prediction.as_str()))
        .collect();
    let details: Vec<EmDetail> = questions
        .iter()
        .map(|q| {
            let prediction = by_id.get(q.id.as_str()).copied();
            EmDetail {
                question_id: &q.id,
                prediction,
                correct: prediction.is_some_and(|p| exact_match(p, &q.answers)),
            }
        })
        .collect();
    let correct = details.iter().filter(|d| d.correct).count();
    EmReport {
        count: details.len(),
        missing: details.iter().filter(|d| d.prediction.is_none()).count(),
        exact_match: if details.is_empty() {
            0.0
        } else {
            correct as f64 / details.len() as f64
        },
        questions: details,
    }
}

fn cmd_eval_em(a: EvalEmArgs) -> Result<()> {
    let questions = load_questions(&a.questions)?;
    let predictions = load_predictions(&a.predictions)?;
    let report = em_report(&questions, &predictions);
    let body = match a.format {
        Format::Json => to_json(&report),
        Format::Tsv => format!(
            "count\tmissing\texact_match\n{}\t{}\t{:.4}\n",
            report.count, report.missing, report.exact_match
        ),
    };
    emit(a.out.as_deref(), &body)
}

/// A candidate or reference line for ROUGE scoring.
#[derive(Debug, Deserialize)]
struct TextRecord {
    question_id: String,
    #[serde(default)]
    context_type: Option<ContextType>,
    #[serde(alias = "reference", alias = "prediction")]
    text: String,
}

#[derive(Debug, Serialize)]
struct RougeDetail {
    question_id: String,
    #[serde(flatten)]
    scores: RougeScores,
}

#[derive(Debug, Serialize)]
struct RougeReport {
    count: usize,
    unmatched: usize,
    mean: RougeScores,
    questions: Vec<RougeDetail>,
}

fn mean_rouge(details: &[RougeDetail]) -> RougeScores {
    let n = details.len().max(1) as f64;
    let mut m = RougeScores::default();
    for d in details {
        m.rouge1_f1 += d.scores.rouge1_f1 / n;
        m.rouge2_f1 += d.scores.rouge2_f1 / n;
        m.rouge_l_f1 += d.scores.rouge_l_f1 / n;
    }
    m
}

/// Scores candidates against references of the same question (and context
/// type, when both records carry one). Several matching references are
/// scored as a multi-reference set.
fn rouge_report(candidates: &[TextRecord], references: &[TextRecord]) -> RougeReport {
    let mut refs: HashMap<&str, Vec<&TextRecord>> = HashMap::new();
    for r in references {
        refs.entry(r.question_id.as_str()).or_default().push(r);
    }
    let mut details = Vec::new();
    let mut unmatched = 0;
    for c in candidates {
        let matching: Vec<&str> = refs
            .get(c.question_id.as_str())
            .into_iter()
            .flatten()
            .filter(|r| match (c.context_type, r.context_type) {
                (Some(a), Some(b)) => a == b,
                _ => true,
            })
            .map(|r| r.text.as_str())
            .collect();
        if matching.is_empty() {
            unmatched += 1;
            continue;
        }
        let joined = matching.join(augment::SEP);
        details.push(RougeDetail {
            question_id: c.question_id.clone(),
            scores: rouge_f1(&c.text, &joined),
        });
    }
    RougeReport {
        count: details.len(),
        unmatched,
        mean: mean_rouge(&details),
        questions: details,
    }
}

fn overlap_report(corpus: &Corpus, questions: &[Question], run: &RunSet) -> Result<RougeReport> {
    let mut details = Vec::new();
    let mut unmatched = 0;
    for q in questions {
        match hit_depth(run, q, corpus)? {
            Some(depth) => {
                let id = run.get(&q.id).expect("hit implies list").entries()[depth - 1]
                    .passage_id
                    .as_str();
                let passage = corpus.lookup(id)?;
                details.push(RougeDetail {
                    question_id: q.id.clone(),
                    scores: crate::eval::rouge_f1_multi(&q.text, [passage.full_text().as_str()]),
                });
            }
            None => unmatched += 1,
        }
    }
    Ok(RougeReport {
        count: details.len(),
        unmatched,
        mean: mean_rouge(&details),
        questions: details,
    })
}

fn cmd_eval_rouge(a: EvalRougeArgs) -> Result<()> {
    let report = if a.overlap {
        let corpus = load_corpus(a.corpus.as_deref().expect("clap requires corpus"))?;
        let mut questions =
            load_questions(a.questions.as_deref().expect("clap requires questions"))?;
        if let Some(ctx) = &a.contexts {
            questions = augment_questions(&questions, &load_contexts(ctx)?)?;
        }
        let run = read_trec(a.run.as_deref().expect("clap requires run"))?;
        overlap_report(&corpus, &questions, &run)?
    } else {
        let read = |p: &Path| -> Result<Vec<TextRecord>> {
            Ok(jsonl::read::<TextRecord>(p)?
                .into_iter()
                .map(|(_, r)| r)
                .collect())
        };
        let candidates = read(a.candidates.as_deref().expect("clap requires candidates"))?;
        let references = read(a.references.as_deref().expect("clap requires references"))?;
        rouge_report(&candidates, &references)
    };
    let body = match a.format {
        Format::Json => to_json(&report),
        Format::Tsv => format!(
            "count\tunmatched\trouge1_f1\trouge2_f1\trougeL_f1\n{}\t{}\t{:.4}\t{:.4}\t{:.4}\n",
            report.count,
            report.unmatched,
            report.mean.rouge1_f1,
            report.mean.rouge2_f1,
            report.mean.rouge_l_f1
        ),
    };
    emit(a.out.as_deref(), &body)
}

fn cmd_vote(a: VoteArgs) -> Result<()> {
    require_positive("n", a.n)?;
    let outputs = load_reader_outputs(&a.reader_output)?;
    let config = VotingConfig {
        spans_per_passage: a.n,
        normalize: !a.raw,
    };
    let predictions = outputs
        .iter()
        .map(|o| {
            if a.baseline {
                Ok(Prediction {
                    question_id: o.question_id.clone(),
                    prediction: baseline_select(o)?,
                    score: None,
                })
            } else {
                let best = vote(o, &config)?
                    .into_iter()
                    .next()
                    .expect("at least one span");
                Ok(Prediction {
                    question_id: o.question_id.clone(),
                    prediction: best.text,
                    score: Some(best.score),
                })
            }
        })
        .collect::<Result<Vec<_>>>()?;
    jsonl::write(&a.out, &predictions)
}

fn cmd_pipeline(a: PipelineArgs, jobs: usize) -> Result<()> {
    let mut contexts = Vec::new();
    for (ty, p) in [
        (ContextType::Answer, &a.answer_contexts),
        (ContextType::Sentence, &a.sentence_contexts),
        (ContextType::Title, &a.title_contexts),
    ] {
        if let Some(p) = p {
            contexts.push((ty, p.clone()));
        }
    }
    let overrides = Overrides {
        corpus: a.corpus,
        questions: a.questions,
        index_dir: a.index_dir,
        output_dir: a.output_dir,
        labels: a.labels,
        contexts,
        external_runs: a.external_runs,
        k1: a.k1,
        b: a.b,
        depth: a.depth,
        strategy: a.strategy,
        fusion_k: a.fusion_k,
        rrf_c: a.rrf_c,
        voting_n: a.voting_n,
        ks: a.ks,
        jobs: (jobs != 0).then_some(jobs),
    };
    let config = load_config(a.config.as_deref(), &overrides).map_err(|e| match e {
        Error::Io { .. } | Error::Malformed { .. } => Error::Config(e.to_string()),
        e => e,
    })?;
    if a.check {
        print!("{}", config.describe());
        return Ok(());
    }
    eprint!("{}", config.describe());
    let outcome = run_pipeline(&config)?;
    for stage in &outcome.stages {
        eprintln!(
            "{:<28} {}",
            stage.name,
            if stage.ran { "done" } else { "up to date" }
        );
    }
    print!("{}", crate::report::summary_tsv(&outcome.reports));
    eprintln!("report: {}", outcome.report_path.display());
    Ok(())
}
