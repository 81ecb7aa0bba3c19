//! Top-k retrieval accuracy with a breakdown by question type, for plain
//! BM25 and the answer-augmented run.
//!
//!     cargo run -p gar --example evaluate_retrieval

use std::path::Path;

use gar::augment::{augment_questions, load_contexts};
use gar::corpus::{load_corpus, load_questions};
use gar::eval::Labeler;
use gar::pipeline::retrieve;
use gar::report::{summary_tsv, RunReport};
use gar::{Bm25Params, InvertedIndex};

fn main() -> gar::Result<()> {
    let data = Path::new(env!("CARGO_MANIFEST_DIR")).join("data/toy");
    let corpus = load_corpus(&data.join("corpus.jsonl"))?;
    let questions = load_questions(&data.join("questions.jsonl"))?;
    let index = InvertedIndex::build(&corpus, Bm25Params::default());
    let ks = [1, 5, 20, 100];

    let plain = retrieve(&index, "bm25", &questions, 100);
    let contexts = load_contexts(&data.join("contexts.answer.jsonl"))?;
    let answer = retrieve(
        &index,
        "gar-answer",
        &augment_questions(&questions, &contexts)?,
        100,
    );

    let labeler = Labeler::QuestionType;
    let reports = [plain, answer]
        .iter()
        .map(|run| RunReport::build(run, &questions, &corpus, &ks, &labeler))
        .collect::<gar::Result<Vec<_>>>()?;

    print!("{}", summary_tsv(&reports));
    for r in &reports {
        println!("\n== {} ==", r.run);
        print!("{}", r.to_tsv());
    }

    let misses: Vec<&str> = reports[1]
        .questions
        .iter()
        .filter(|d| d.hit_depth.is_none_or(|h| h > 5))
        .map(|d| d.question_id.as_str())
        .collect();
    println!("\ngar-answer misses at top 5: {misses:?}");
    Ok(())
}
