//! Plain BM25 against BM25 with each kind of generated context appended to
//! the question. Prints the rank of the first answer-bearing passage.
//!
//!     cargo run -p gar --example augmented_retrieval -- q05

use std::path::Path;

use gar::augment::{augment_query, load_contexts, ContextType};
use gar::corpus::{load_corpus, load_questions};
use gar::eval::passage_contains_answer;
use gar::{Bm25Params, InvertedIndex};

fn main() -> gar::Result<()> {
    let data = Path::new(env!("CARGO_MANIFEST_DIR")).join("data/toy");
    let qid = std::env::args().nth(1).unwrap_or_else(|| "q05".into());

    let corpus = load_corpus(&data.join("corpus.jsonl"))?;
    let questions = load_questions(&data.join("questions.jsonl"))?;
    let index = InvertedIndex::build(&corpus, Bm25Params::default());
    let q = questions
        .iter()
        .find(|q| q.id == qid)
        .ok_or_else(|| gar::Error::InvalidArgument(format!("no question {qid}")))?;
    println!("{}: {}  (answers {:?})\n", q.id, q.text, q.answers);

    let mut queries = vec![("plain".to_string(), q.text.clone())];
    for ty in ContextType::ALL {
        let contexts = load_contexts(&data.join(format!("contexts.{ty}.jsonl")))?;
        let mine: Vec<_> = contexts
            .into_iter()
            .filter(|c| c.question_id == q.id)
            .collect();
        queries.push((ty.to_string(), augment_query(q, &mine)?));
    }

    for (label, query) in &queries {
        let hits = index.search(&q.id, query, 20);
        let first = hits
            .entries()
            .iter()
            .position(|h| passage_contains_answer(corpus.get(&h.passage_id).unwrap(), &q.answers));
        let shown = first.map_or("-".to_string(), |r| (r + 1).to_string());
        println!("{label:<9} hit at {shown:>2}   {query}");
        for h in hits.entries().iter().take(3) {
            println!(
                "            {:<6} {:>6.2}  {}",
                h.passage_id,
                h.score,
                corpus.get(&h.passage_id).unwrap().title
            );
        }
    }
    Ok(())
}
