//! Pipeline configuration.
//!
//! A TOML document with one section per stage. Every value may also come
//! from a command-line flag, which wins over the file. Relative paths are
//! resolved against the config file's directory.
//!
//! ```toml
//! [paths]
//! corpus = "corpus.jsonl"
//! questions = "questions.jsonl"
//! output_dir = "out"
//! external_runs = ["dense.trec"]
//!
//! [paths.contexts]
//! answer = "contexts.answer.jsonl"
//!
//! [bm25]
//! k1 = 0.9
//! b = 0.4
//!
//! [fusion]
//! strategy = "round_robin"
//! k = 100
//!
//! [eval]
//! ks = [1, 5, 20, 100]
//! ```

use std::fmt;
use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::augment::ContextType;
use crate::error::{Error, Result};
use crate::fusion::{FusionStrategy, DEFAULT_RRF_C};
use crate::index::Bm25Params;

pub const DEFAULT_KS: [usize; 4] = [1, 5, 20, 100];
pub const DEFAULT_DEPTH: usize = 100;
pub const DEFAULT_OUTPUT_DIR: &str = "gar-out";

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    #[serde(default)]
    paths: RawPaths,
    #[serde(default)]
    bm25: RawBm25,
    #[serde(default)]
    retrieval: RawRetrieval,
    #[serde(default)]
    fusion: RawFusion,
    #[serde(default)]
    voting: RawVoting,
    #[serde(default)]
    eval: RawEval,
    #[serde(default)]
    run: RawRun,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPaths {
    corpus: Option<PathBuf>,
    questions: Option<PathBuf>,
    index_dir: Option<PathBuf>,
    output_dir: Option<PathBuf>,
    labels: Option<PathBuf>,
    #[serde(default)]
    contexts: RawContexts,
    external_runs: Option<Vec<PathBuf>>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawContexts {
    answer: Option<PathBuf>,
    sentence: Option<PathBuf>,
    title: Option<PathBuf>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawBm25 {
    k1: Option<f64>,
    b: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRetrieval {
    depth: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFusion {
    strategy: Option<String>,
    k: Option<usize>,
    rrf_c: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawVoting {
    n: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawEval {
    ks: Option<Cutoffs>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRun {
    jobs: Option<usize>,
}

/// Cutoffs written either as a list or as a comma-separated string.
#[derive(Clone, Deserialize)]
#[serde(untagged)]
pub enum Cutoffs {
    List(Vec<usize>),
    Text(String),
}

impl fmt::Debug for Cutoffs {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cutoffs::List(v) => v.fmt(f),
            Cutoffs::Text(s) => s.fmt(f),
        }
    }
}

impl Cutoffs {
    pub fn parse(&self) -> Result<Vec<usize>> {
        match self {
            Cutoffs::List(v) => Ok(v.clone()),
            Cutoffs::Text(s) => parse_cutoffs(s),
        }
    }
}

pub fn parse_cutoffs(s: &str) -> Result<Vec<usize>> {
    s.split(',')
        .map(|part| {
            part.trim()
                .parse::<usize>()
                .map_err(|_| Error::Config(format!("bad cutoff {part:?} in {s:?}")))
        })
        .collect()
}

/// Values that override the file, typically from command-line flags.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub corpus: Option<PathBuf>,
    pub questions: Option<PathBuf>,
    pub index_dir: Option<PathBuf>,
    pub output_dir: Option<PathBuf>,
    pub labels: Option<PathBuf>,
    pub contexts: Vec<(ContextType, PathBuf)>,
    pub external_runs: Option<Vec<PathBuf>>,
    pub k1: Option<f64>,
    pub b: Option<f64>,
    pub depth: Option<usize>,
    pub strategy: Option<String>,
    pub fusion_k: Option<usize>,
    pub rrf_c: Option<f64>,
    pub voting_n: Option<usize>,
    pub ks: Option<String>,
    pub jobs: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Source {
    Default,
    File,
    Flag,
}

impl fmt::Display for Source {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Source::Default => "default",
            Source::File => "config file",
            Source::Flag => "flag",
        })
    }
}

/// A resolved setting and where it came from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Setting {
    pub key: &'static str,
    pub value: String,
    pub source: Source,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    pub corpus: PathBuf,
    pub questions: PathBuf,
    pub index_dir: PathBuf,
    pub output_dir: PathBuf,
    pub labels: Option<PathBuf>,
    pub contexts: Vec<(ContextType, PathBuf)>,
    pub external_runs: Vec<PathBuf>,
    pub bm25: Bm25Params,
    pub depth: usize,
    pub fusion: FusionStrategy,
    pub fusion_k: usize,
    pub voting_n: usize,
    pub ks: Vec<usize>,
    /// Worker threads; 0 uses every core.
    pub jobs: usize,
    pub settings: Vec<Setting>,
}

impl PipelineConfig {
    /// Every resolved value with its provenance, one per line.
    pub fn describe(&self) -> String {
        let width = self.settings.iter().map(|s| s.key.len()).max().unwrap_or(0);
        self.settings
            .iter()
            .map(|s| format!("{:width$}  {}  ({})\n", s.key, s.value, s.source))
            .collect()
    }
}

struct Resolver {
    settings: Vec<Setting>,
}

impl Resolver {
    fn pick<T: fmt::Debug + Clone>(
        &mut self,
        key: &'static str,
        flag: Option<T>,
        file: Option<T>,
        default: Option<T>,
    ) -> Option<T> {
        let (value, source) = match (flag, file, default) {
            (Some(v), _, _) => (v, Source::Flag),
            (None, Some(v), _) => (v, Source::File),
            (None, None, Some(v)) => (v, Source::Default),
            (None, None, None) => return None,
        };
        self.settings.push(Setting {
            key,
            value: format!("{value:?}"),
            source,
        });
        Some(value)
    }
}

/// Reads, defaults and validates a pipeline config file.
pub fn validate_config(path: &Path) -> Result<PipelineConfig> {
    load_config(Some(path), &Overrides::default())
}

/// Like [`validate_config`], with overrides applied on top. `path` may be
/// absent when every required value comes from `overrides`.
pub fn load_config(path: Option<&Path>, overrides: &Overrides) -> Result<PipelineConfig> {
    let (raw, base) = match path {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
            let raw = parse_raw(&text)?;
            let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
            (raw, base)
        }
        None => (RawConfig::default(), PathBuf::new()),
    };
    resolve(raw, overrides, &base)
}

/// Parses config text without touching the filesystem.
pub fn parse_config_str(
    text: &str,
    base_dir: &Path,
    overrides: &Overrides,
) -> Result<PipelineConfig> {
    resolve(parse_raw(text)?, overrides, base_dir)
}

fn parse_raw(text: &str) -> Result<RawConfig> {
    toml::from_str(text).map_err(|e| Error::Config(e.message().to_string()))
}

fn resolve(raw: RawConfig, o: &Overrides, base: &Path) -> Result<PipelineConfig> {
    let rel = |p: PathBuf| if p.is_relative() { base.join(p) } else { p };
    let mut r = Resolver {
        settings: Vec::new(),
    };
    let mut problems: Vec<String> = Vec::new();

    let corpus = r.pick(
        "paths.corpus",
        o.corpus.clone(),
        raw.paths.corpus.map(rel),
        None,
    );
    let questions = r.pick(
        "paths.questions",
        o.questions.clone(),
        raw.paths.questions.map(rel),
        None,
    );
    let output_dir = r
        .pick(
            "paths.output_dir",
            o.output_dir.clone(),
            raw.paths.output_dir.map(rel),
            Some(PathBuf::from(DEFAULT_OUTPUT_DIR)),
        )
        .unwrap_or_default();
    let index_dir = r
        .pick(
            "paths.index_dir",
            o.index_dir.clone(),
            raw.paths.index_dir.map(rel),
            Some(output_dir.join("index")),
        )
        .unwrap_or_default();
    let labels = r.pick(
        "paths.labels",
        o.labels.clone(),
        raw.paths.labels.map(rel),
        None,
    );

    let mut contexts: Vec<(ContextType, PathBuf)> = Vec::new();
    let file_contexts = [
        (
            ContextType::Answer,
            "paths.contexts.answer",
            raw.paths.contexts.answer,
        ),
        (
            ContextType::Sentence,
            "paths.contexts.sentence",
            raw.paths.contexts.sentence,
        ),
        (
            ContextType::Title,
            "paths.contexts.title",
            raw.paths.contexts.title,
        ),
    ];
    for (ty, key, file) in file_contexts {
        let flag = o
            .contexts
            .iter()
            .find(|(t, _)| *t == ty)
            .map(|(_, p)| p.clone());
        if let Some(p) = r.pick(key, flag, file.map(rel), None) {
            contexts.push((ty, p));
        }
    }
    let external_runs = r
        .pick(
            "paths.external_runs",
            o.external_runs.clone(),
            raw.paths
                .external_runs
                .map(|v| v.into_iter().map(rel).collect()),
            Some(Vec::new()),
        )
        .unwrap_or_default();

    let defaults = Bm25Params::default();
    let k1 = r
        .pick("bm25.k1", o.k1, raw.bm25.k1, Some(defaults.k1))
        .unwrap();
    let b = r.pick("bm25.b", o.b, raw.bm25.b, Some(defaults.b)).unwrap();
    let depth = r
        .pick(
            "retrieval.depth",
            o.depth,
            raw.retrieval.depth,
            Some(DEFAULT_DEPTH),
        )
        .unwrap();
    let strategy_name = r
        .pick(
            "fusion.strategy",
            o.strategy.clone(),
            raw.fusion.strategy,
            Some("round_robin".to_string()),
        )
        .unwrap();
    let fusion_k = r
        .pick("fusion.k", o.fusion_k, raw.fusion.k, Some(DEFAULT_DEPTH))
        .unwrap();
    let rrf_c = r
        .pick(
            "fusion.rrf_c",
            o.rrf_c,
            raw.fusion.rrf_c,
            Some(DEFAULT_RRF_C),
        )
        .unwrap();
    let voting_n = r
        .pick("voting.n", o.voting_n, raw.voting.n, Some(5))
        .unwrap();
    let ks_flag = o.ks.clone().map(Cutoffs::Text);
    let ks_spec = r
        .pick(
            "eval.ks",
            ks_flag,
            raw.eval.ks,
            Some(Cutoffs::List(DEFAULT_KS.to_vec())),
        )
        .unwrap();
    let jobs = r.pick("run.jobs", o.jobs, raw.run.jobs, Some(0)).unwrap();

    match (&corpus, &questions) {
        (None, None) => {
            problems.push("missing required paths: paths.corpus, paths.questions".into())
        }
        (None, _) => problems.push("missing required path: paths.corpus".into()),
        (_, None) => problems.push("missing required path: paths.questions".into()),
        _ => {}
    }
    let mut inputs: Vec<(&str, &Path)> = Vec::new();
    if let Some(p) = &corpus {
        inputs.push(("paths.corpus", p));
    }
    if let Some(p) = &questions {
        inputs.push(("paths.questions", p));
    }
    if let Some(p) = &labels {
        inputs.push(("paths.labels", p));
    }
    for (ty, p) in &contexts {
        inputs.push((ty.as_str(), p));
    }
    for p in &external_runs {
        inputs.push(("external run", p));
    }
    for (what, p) in inputs {
        if !p.exists() {
            problems.push(format!("{what}: {} does not exist", p.display()));
        }
    }

    if !(k1.is_finite() && k1 >= 0.0) {
        problems.push(format!("bm25.k1 must be ≥ 0, got {k1}"));
    }
    if !(0.0..=1.0).contains(&b) {
        problems.push(format!("bm25.b must be in [0, 1], got {b}"));
    }
    if depth == 0 {
        problems.push("retrieval.depth must be ≥ 1".into());
    }
    if fusion_k == 0 {
        problems.push("fusion.k must be ≥ 1".into());
    }
    if !(rrf_c.is_finite() && rrf_c > 0.0) {
        problems.push(format!("fusion.rrf_c must be > 0, got {rrf_c}"));
    }
    if voting_n == 0 {
        problems.push("voting.n must be ≥ 1".into());
    }
    let fusion = match strategy_name.as_str() {
        "round_robin" => Some(FusionStrategy::RoundRobin),
        "rrf" => Some(FusionStrategy::Rrf { c: rrf_c }),
        other => {
            problems.push(format!(
                "fusion.strategy {other:?} is not round_robin or rrf"
            ));
            None
        }
    };
    let ks = match ks_spec.parse() {
        Ok(ks) => {
            if ks.is_empty() || ks[0] == 0 || ks.windows(2).any(|w| w[0] >= w[1]) {
                problems.push(format!(
                    "eval.ks must be positive and strictly increasing, got {ks:?}"
                ));
            }
            ks
        }
        Err(e) => {
            problems.push(e.to_string());
            Vec::new()
        }
    };

    if !problems.is_empty() {
        return Err(Error::Config(problems.join("; ")));
    }
    Ok(PipelineConfig {
        corpus: corpus.unwrap(),
        questions: questions.unwrap(),
        index_dir,
        output_dir,
        labels,
        contexts,
        external_runs,
        bm25: Bm25Params { k1, b },
        depth,
        fusion: fusion.unwrap(),
        fusion_k,
        voting_n,
        ks,
        jobs,
        settings: r.settings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dir_with_inputs() -> tempfile::TempDir {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(dir.path().join("c.jsonl"), "").unwrap();
        std::fs::write(dir.path().join("q.jsonl"), "").unwrap();
        dir
    }

    fn parse(dir: &Path, text: &str) -> Result<PipelineConfig> {
        parse_config_str(text, dir, &Overrides::default())
    }

    #[test]
    fn minimal_config_gets_defaults() {
        let dir = dir_with_inputs();
        let cfg = parse(
            dir.path(),
            "[paths]\ncorpus = \"c.jsonl\"\nquestions = \"q.jsonl\"\n",
        )
        .unwrap();
        assert_eq!(cfg.bm25, Bm25Params { k1: 0.9, b: 0.4 });
        assert_eq!(cfg.voting_n, 5);
        assert_eq!(cfg.ks, [1, 5, 20, 100]);
        assert_eq!(cfg.fusion, FusionStrategy::RoundRobin);
        assert_eq!(cfg.corpus, dir.path().join("c.jsonl"));
        let k1 = cfg.settings.iter().find(|s| s.key == "bm25.k1").unwrap();
        assert_eq!(k1.source, Source::Default);
        let corpus = cfg
            .settings
            .iter()
            .find(|s| s.key == "paths.corpus")
            .unwrap();
        assert_eq!(corpus.source, Source::File);
        assert!(cfg.describe().contains("bm25.k1"));
    }

    #[test]
    fn unknown_key_is_named() {
        let dir = dir_with_inputs();
        let err = parse(dir.path(), "[bm25]\nk2 = 1.0\n").unwrap_err();
        assert!(matches!(err, Error::Config(_)));
        assert!(err.to_string().contains("k2"), "{err}");
        let err = parse(dir.path(), "[retreival]\ndepth = 1\n").unwrap_err();
        assert!(err.to_string().contains("retreival"), "{err}");
    }

    #[test]
    fn non_increasing_cutoffs_rejected() {
        let dir = dir_with_inputs();
        let base = "[paths]\ncorpus = \"c.jsonl\"\nquestions = \"q.jsonl\"\n";
        let err = parse(dir.path(), &format!("{base}[eval]\nks = \"5,5\"\n")).unwrap_err();
        assert!(err.to_string().contains("strictly increasing"));
        let ok = parse(dir.path(), &format!("{base}[eval]\nks = \"1,10\"\n")).unwrap();
        assert_eq!(ok.ks, [1, 10]);
        assert!(parse(dir.path(), &format!("{base}[eval]\nks = [10, 1]\n")).is_err());
    }

    #[test]
    fn missing_paths_listed_together() {
        let dir = tempfile::tempdir().unwrap();
        let err = parse(
            dir.path(),
            "[paths]\ncorpus = \"nope.jsonl\"\nquestions = \"gone.jsonl\"\nexternal_runs = [\"x.trec\"]\n",
        )
        .unwrap_err()
        .to_string();
        assert!(
            err.contains("nope.jsonl") && err.contains("gone.jsonl") && err.contains("x.trec"),
            "{err}"
        );

        let err = parse(dir.path(), "").unwrap_err().to_string();
        assert!(err.contains("paths.corpus") && err.contains("paths.questions"));
    }

    #[test]
    fn flags_override_file() {
        let dir = dir_with_inputs();
        let overrides = Overrides {
            k1: Some(1.2),
            strategy: Some("rrf".into()),
            ks: Some("1,5".into()),
            ..Default::default()
        };
        let cfg = parse_config_str(
            "[paths]\ncorpus = \"c.jsonl\"\nquestions = \"q.jsonl\"\n[bm25]\nk1 = 2.0\nb = 0.5\n",
            dir.path(),
            &overrides,
        )
        .unwrap();
        assert_eq!(cfg.bm25, Bm25Params { k1: 1.2, b: 0.5 });
        assert_eq!(cfg.fusion, FusionStrategy::Rrf { c: 60.0 });
        assert_eq!(cfg.ks, [1, 5]);
        let k1 = cfg.settings.iter().find(|s| s.key == "bm25.k1").unwrap();
        assert_eq!(k1.source, Source::Flag);
    }

    #[test]
    fn bad_values_collected() {
        let dir = dir_with_inputs();
        let err = parse(
            dir.path(),
            "[paths]\ncorpus = \"c.jsonl\"\nquestions = \"q.jsonl\"\n[bm25]\nb = 2.0\n[voting]\nn = 0\n[fusion]\nstrategy = \"borda\"\n",
        )
        .unwrap_err()
        .to_string();
        assert!(
            err.contains("bm25.b") && err.contains("voting.n") && err.contains("borda"),
            "{err}"
        );
    }
}
