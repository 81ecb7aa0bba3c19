//! End-to-end runs: index, augment, retrieve, fuse, evaluate.
//!
//! Every stage writes plain files under the output directory plus a stage
//! manifest (`stages/<name>.json`) recording a fingerprint of its inputs.
//! A stage whose fingerprint is unchanged and whose outputs still exist is
//! skipped, so re-running on unchanged inputs does no work.
//!
//! ```text
//! <output_dir>/
//!   queries/<type>.jsonl     augmented questions
//!   runs/bm25.trec           plain question run
//!   runs/gar-<type>.trec     one run per context type
//!   runs/gar-fused.trec      fusion of the context runs
//!   runs/gar-plus.trec       context runs fused with external runs
//!   report.json, report.tsv
//!   stages/*.json
//! ```

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::augment::{augment_questions, load_contexts, ContextType};
use crate::config::PipelineConfig;
use crate::corpus::{load_corpus, load_questions, save_questions, Corpus, Question};
use crate::error::{Error, Result};
use crate::eval::Labeler;
use crate::fusion::fuse_all;
use crate::index::InvertedIndex;
use crate::jsonl;
use crate::report::{summary_tsv, RunReport};
use crate::run::{read_trec, write_trec, RunSet};

pub const PLAIN_RUN: &str = "bm25";
pub const FUSED_RUN: &str = "gar-fused";
pub const PLUS_RUN: &str = "gar-plus";

pub fn context_run_name(ty: ContextType) -> String {
    format!("gar-{ty}")
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StageStatus {
    pub name: String,
    /// False when the stage was skipped as up to date.
    pub ran: bool,
}

#[derive(Debug, Clone)]
pub struct PipelineOutcome {
    pub stages: Vec<StageStatus>,
    pub reports: Vec<RunReport>,
    pub report_path: PathBuf,
}

impl PipelineOutcome {
    pub fn report(&self, run: &str) -> Option<&RunReport> {
        self.reports.iter().find(|r| r.run == run)
    }
}

#[derive(Debug, Serialize)]
struct PipelineReport<'a> {
    ks: &'a [usize],
    runs: &'a [RunReport],
}

#[derive(Debug, Serialize, Deserialize)]
struct StageManifest {
    stage: String,
    fingerprint: String,
    outputs: Vec<PathBuf>,
}

#[derive(Default)]
struct Fingerprint(Sha256);

impl Fingerprint {
    fn part(mut self, bytes: impl AsRef<[u8]>) -> Self {
        let bytes = bytes.as_ref();
        self.0.update((bytes.len() as u64).to_le_bytes());
        self.0.update(bytes);
        self
    }

    fn file(self, path: &Path) -> Result<Self> {
        let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
        Ok(self.part(bytes))
    }

    fn finish(self) -> String {
        hex::encode(self.0.finalize())
    }
}

struct Stages {
    dir: PathBuf,
    statuses: Vec<StageStatus>,
}

impl Stages {
    fn manifest_path(&self, stage: &str) -> PathBuf {
        self.dir.join(format!("{stage}.json"))
    }

    fn up_to_date(&self, stage: &str, fingerprint: &str) -> bool {
        let Ok(bytes) = std::fs::read(self.manifest_path(stage)) else {
            return false;
        };
        let Ok(manifest) = serde_json::from_slice::<StageManifest>(&bytes) else {
            return false;
        };
        manifest.fingerprint == fingerprint && manifest.outputs.iter().all(|p| p.exists())
    }

    /// Runs `body` unless the stage is up to date, then records the manifest.
    fn run(
        &mut self,
        stage: &str,
        fingerprint: String,
        outputs: Vec<PathBuf>,
        body: impl FnOnce() -> Result<()>,
    ) -> Result<()> {
        let wrap = |e: Error| Error::Stage {
            stage: stage.to_string(),
            source: Box::new(e),
        };
        if self.up_to_date(stage, &fingerprint) {
            self.statuses.push(StageStatus {
                name: stage.to_string(),
                ran: false,
            });
            return Ok(());
        }
        body().map_err(wrap)?;
        let manifest = StageManifest {
            stage: stage.to_string(),
            fingerprint,
            outputs,
        };
        let path = self.manifest_path(stage);
        jsonl::write_with(&path, |out| {
            serde_json::to_writer_pretty(&mut *out, &manifest).map_err(std::io::Error::other)
        })
        .map_err(wrap)?;
        self.statuses.push(StageStatus {
            name: stage.to_string(),
            ran: true,
        });
        Ok(())
    }

    fn wrap<T>(&self, stage: &str, r: Result<T>) -> Result<T> {
        r.map_err(|e| Error::Stage {
            stage: stage.to_string(),
            source: Box::new(e),
        })
    }
}

/// Runs every stage of `config` on a thread pool sized by `config.jobs`.
pub fn run_pipeline(config: &PipelineConfig) -> Result<PipelineOutcome> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.jobs)
        .build()
        .map_err(|e| Error::Config(format!("cannot start worker pool: {e}")))?;
    pool.install(|| run_stages(config))
}

fn run_stages(config: &PipelineConfig) -> Result<PipelineOutcome> {
    let out = &config.output_dir;
    let mut stages = Stages {
        dir: out.join("stages"),
        statuses: Vec::new(),
    };

    let corpus = stages.wrap("load", load_corpus(&config.corpus))?;
    let questions = stages.wrap("load", load_questions(&config.questions))?;

    // index
    let index_fp = Fingerprint::default()
        .part("index")
        .file(&config.corpus)?
        .part(config.bm25.k1.to_le_bytes())
        .part(config.bm25.b.to_le_bytes())
        .finish();
    let mut index: Option<InvertedIndex> = None;
    stages.run(
        "index",
        index_fp.clone(),
        vec![config.index_dir.join("manifest.json")],
        || {
            let built = InvertedIndex::build(&corpus, config.bm25);
            built.save(&config.index_dir)?;
            index = Some(built);
            Ok(())
        },
    )?;

    // augment
    let mut query_files: Vec<(String, PathBuf)> =
        vec![(PLAIN_RUN.to_string(), config.questions.clone())];
    for (ty, ctx_path) in &config.contexts {
        let target = out.join("queries").join(format!("{ty}.jsonl"));
        let fp = Fingerprint::default()
            .part("augment")
            .file(&config.questions)?
            .file(ctx_path)?
            .finish();
        stages.run(&format!("augment-{ty}"), fp, vec![target.clone()], || {
            let contexts = load_contexts(ctx_path)?;
            if let Some(bad) = contexts.iter().find(|c| c.context_type != *ty) {
                return Err(Error::InvalidArgument(format!(
                    "{} holds {} contexts, expected {ty}",
                    ctx_path.display(),
                    bad.context_type
                )));
            }
            save_questions(&target, &augment_questions(&questions, &contexts)?)
        })?;
        query_files.push((context_run_name(*ty), target));
    }

    // retrieve
    let mut context_runs: Vec<PathBuf> = Vec::new();
    let mut report_runs: Vec<PathBuf> = Vec::new();
    for (name, queries_path) in &query_files {
        let target = out.join("runs").join(format!("{name}.trec"));
        let fp = Fingerprint::default()
            .part("retrieve")
            .part(&index_fp)
            .part(name)
            .file(queries_path)?
            .part(config.depth.to_le_bytes())
            .finish();
        stages.run(
            &format!("retrieve-{name}"),
            fp,
            vec![target.clone()],
            || {
                let queries = load_questions(queries_path)?;
                if index.is_none() {
                    index = Some(InvertedIndex::load(&config.index_dir)?);
                }
                let run = retrieve(index.as_ref().unwrap(), name, &queries, config.depth);
                write_trec(&target, &run)
            },
        )?;
        if name != PLAIN_RUN {
            context_runs.push(target.clone());
        }
        report_runs.push(target);
    }
    report_runs.extend(config.external_runs.iter().cloned());

    // fuse
    let mut fusions: Vec<(&str, Vec<PathBuf>)> = Vec::new();
    if !context_runs.is_empty() {
        fusions.push((FUSED_RUN, context_runs.clone()));
        if !config.external_runs.is_empty() {
            let mut sources = context_runs.clone();
            sources.extend(config.external_runs.iter().cloned());
            fusions.push((PLUS_RUN, sources));
        }
    }
    for (name, sources) in fusions {
        let target = out.join("runs").join(format!("{name}.trec"));
        let mut fp = Fingerprint::default()
            .part("fuse")
            .part(format!("{:?} {}", config.fusion, config.fusion_k));
        for s in &sources {
            fp = fp.file(s)?;
        }
        stages.run(
            &format!("fuse-{name}"),
            fp.finish(),
            vec![target.clone()],
            || {
                let runs = sources
                    .iter()
                    .map(|p| read_trec(p))
                    .collect::<Result<Vec<_>>>()?;
                let mut fused = fuse_all(&runs, config.fusion, config.fusion_k);
                fused.name = name.to_string();
                write_trec(&target, &fused)
            },
        )?;
        report_runs.push(target);
    }

    // evaluate
    let report_json = out.join("report.json");
    let report_tsv = out.join("report.tsv");
    let mut fp = Fingerprint::default()
        .part("eval")
        .file(&config.corpus)?
        .file(&config.questions)?
        .part(format!("{:?}", config.ks));
    if let Some(labels) = &config.labels {
        fp = fp.file(labels)?;
    }
    for r in &report_runs {
        fp = fp.file(r)?;
    }
    let mut reports: Vec<RunReport> = Vec::new();
    stages.run(
        "eval",
        fp.finish(),
        vec![report_json.clone(), report_tsv.clone()],
        || {
            reports = evaluate_runs(config, &corpus, &questions, &report_runs)?;
            write_reports(&report_json, &report_tsv, &config.ks, &reports)
        },
    )?;
    if reports.is_empty() {
        reports = stages.wrap(
            "eval",
            evaluate_runs(config, &corpus, &questions, &report_runs),
        )?;
    }

    Ok(PipelineOutcome {
        stages: stages.statuses,
        reports,
        report_path: report_json,
    })
}

/// BM25 retrieval for a question set, run in parallel.
pub fn retrieve(index: &InvertedIndex, name: &str, questions: &[Question], depth: usize) -> RunSet {
    use rayon::prelude::*;
    let queries: Vec<(&str, &str)> = questions
        .iter()
        .map(|q| (q.id.as_str(), q.text.as_str()))
        .collect();
    index.search_batch(name, queries.into_par_iter(), depth)
}

fn evaluate_runs(
    config: &PipelineConfig,
    corpus: &Corpus,
    questions: &[Question],
    runs: &[PathBuf],
) -> Result<Vec<RunReport>> {
    let labeler = match &config.labels {
        Some(p) => Labeler::from_file(p)?,
        None => Labeler::QuestionType,
    };
    runs.iter()
        .map(|p| RunReport::build(&read_trec(p)?, questions, corpus, &config.ks, &labeler))
        .collect()
}

fn write_reports(json: &Path, tsv: &Path, ks: &[usize], reports: &[RunReport]) -> Result<()> {
    let report = PipelineReport { ks, runs: reports };
    jsonl::write_with(json, |out| {
        serde_json::to_writer_pretty(&mut *out, &report).map_err(std::io::Error::other)?;
        std::io::Write::write_all(out, b"\n")
    })?;
    let table = summary_tsv(reports);
    jsonl::write_with(tsv, |out| std::io::Write::write_all(out, table.as_bytes()))
}
