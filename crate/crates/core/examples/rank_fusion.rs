//! Fuse the three context runs, then add a dense retriever's run on top.
//! Compares round robin with reciprocal rank fusion.
//!
//!     cargo run -p gar --example rank_fusion

use std::path::Path;

use gar::augment::{augment_questions, load_contexts, ContextType};
use gar::corpus::{load_corpus, load_questions};
use gar::eval::topk_accuracy;
use gar::fusion::fuse_all;
use gar::pipeline::retrieve;
use gar::run::read_trec;
use gar::{Bm25Params, FusionStrategy, InvertedIndex, RunSet};

const KS: [usize; 4] = [1, 5, 10, 20];

fn main() -> gar::Result<()> {
    let data = Path::new(env!("CARGO_MANIFEST_DIR")).join("data/toy");
    let corpus = load_corpus(&data.join("corpus.jsonl"))?;
    let questions = load_questions(&data.join("questions.jsonl"))?;
    let index = InvertedIndex::build(&corpus, Bm25Params::default());

    let mut rows: Vec<RunSet> = vec![retrieve(&index, "bm25", &questions, 100)];
    let mut context_runs = Vec::new();
    for ty in ContextType::ALL {
        let contexts = load_contexts(&data.join(format!("contexts.{ty}.jsonl")))?;
        let run = retrieve(
            &index,
            &format!("gar-{ty}"),
            &augment_questions(&questions, &contexts)?,
            100,
        );
        context_runs.push(run.clone());
        rows.push(run);
    }
    let dense = read_trec(&data.join("dense.trec"))?;
    rows.push(dense.clone());

    let mut with_dense = context_runs.clone();
    with_dense.push(dense);
    for strategy in [FusionStrategy::RoundRobin, FusionStrategy::rrf()] {
        rows.push(fuse_all(&context_runs, strategy, 100));
        rows.push(fuse_all(&with_dense, strategy, 100));
    }

    print!("{:<58}", "run");
    KS.iter().for_each(|k| print!(" top{k:<3}"));
    println!();
    for run in &rows {
        let report = topk_accuracy(run, &questions, &corpus, &KS)?;
        print!("{:<58}", run.name);
        KS.iter()
            .for_each(|k| print!(" {:.3} ", report.at(*k).unwrap()));
        println!();
    }
    Ok(())
}
