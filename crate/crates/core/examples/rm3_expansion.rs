//! RM3 pseudo-relevance feedback as a classic query-expansion baseline.
//! Shows one expanded query, then a small grid over feedback depth and
//! interpolation weight.
//!
//!     cargo run -p gar --example rm3_expansion

use std::path::Path;

use gar::augment::{rm3_expand, rm3_search, Rm3Params};
use gar::corpus::{load_corpus, load_questions};
use gar::eval::topk_accuracy;
use gar::{Bm25Params, InvertedIndex, RunSet};

fn main() -> gar::Result<()> {
    let data = Path::new(env!("CARGO_MANIFEST_DIR")).join("data/toy");
    let corpus = load_corpus(&data.join("corpus.jsonl"))?;
    let questions = load_questions(&data.join("questions.jsonl"))?;
    let index = InvertedIndex::build(&corpus, Bm25Params::default());

    let q = &questions[0];
    let expanded = rm3_expand(&index, &q.text, Rm3Params::default())?;
    println!("{}", q.text);
    for (term, w) in expanded.terms() {
        println!("  {term:<14} {w:.4}");
    }

    println!("\nfb_docs fb_terms alpha  top5   top20");
    for fb_docs in [3, 10] {
        for alpha in [1.0, 0.7, 0.5, 0.3] {
            let params = Rm3Params {
                fb_docs,
                fb_terms: 10,
                alpha,
            };
            let lists = questions
                .iter()
                .map(|q| rm3_search(&index, &q.id, &q.text, params, 100))
                .collect::<gar::Result<Vec<_>>>()?;
            let run = RunSet::from_lists("rm3", lists)?;
            let report = topk_accuracy(&run, &questions, &corpus, &[5, 20])?;
            println!(
                "{fb_docs:>7} {:>8} {alpha:>5.1}  {:.3}  {:.3}",
                params.fb_terms,
                report.at(5).unwrap(),
                report.at(20).unwrap()
            );
        }
    }
    Ok(())
}
