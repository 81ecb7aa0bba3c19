//! The three generation targets for the Bat Out of Hell question: the
//! answer, the answer-bearing sentence, and the title of the page it
//! comes from.
//!
//!     cargo run -p gar --example target_extraction

use std::path::Path;

use gar::augment::{find_positive_passages, prepare_targets, ContextType, DEFAULT_POSITIVE_DEPTH};
use gar::corpus::{load_corpus, load_questions};
use gar::{Bm25Params, InvertedIndex};

fn main() -> gar::Result<()> {
    let data = Path::new(env!("CARGO_MANIFEST_DIR")).join("data/bat_out_of_hell");
    let corpus = load_corpus(&data.join("corpus.jsonl"))?;
    let questions = load_questions(&data.join("questions.jsonl"))?;
    let index = InvertedIndex::build(&corpus, Bm25Params::default());

    for q in &questions {
        println!("{}  {:?}  answers {:?}", q.id, q.text, q.answers);
        let positives = find_positive_passages(&corpus, &index, q, DEFAULT_POSITIVE_DEPTH)?;
        let ids: Vec<&str> = positives.passage_ids().collect();
        println!("  answer-bearing passages in the top {DEFAULT_POSITIVE_DEPTH}: {ids:?}");
    }
    println!();

    for ty in ContextType::ALL {
        for t in prepare_targets(&corpus, &index, &questions, ty, DEFAULT_POSITIVE_DEPTH)? {
            println!("{:<8} {}  {}", ty.as_str(), t.question_id, t.reference);
        }
    }
    Ok(())
}
