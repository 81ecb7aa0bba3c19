//! Score the fixture's generated contexts against targets extracted from
//! the corpus, and measure how much an augmented query overlaps the
//! passage that answers it.
//!
//!     cargo run -p gar --example rouge_contexts

use std::collections::HashMap;
use std::path::Path;

use gar::augment::{
    augment_query, load_contexts, prepare_targets, ContextType, DEFAULT_POSITIVE_DEPTH,
};
use gar::corpus::{load_corpus, load_questions};
use gar::eval::{passage_contains_answer, rouge_f1};
use gar::{Bm25Params, InvertedIndex};

fn main() -> gar::Result<()> {
    let data = Path::new(env!("CARGO_MANIFEST_DIR")).join("data/toy");
    let corpus = load_corpus(&data.join("corpus.jsonl"))?;
    let questions = load_questions(&data.join("questions.jsonl"))?;
    let index = InvertedIndex::build(&corpus, Bm25Params::default());

    println!("context   n   rouge1  rouge2  rougeL");
    for ty in ContextType::ALL {
        let targets = prepare_targets(&corpus, &index, &questions, ty, DEFAULT_POSITIVE_DEPTH)?;
        let refs: HashMap<&str, &str> = targets
            .iter()
            .map(|t| (t.question_id.as_str(), t.reference.as_str()))
            .collect();
        let contexts = load_contexts(&data.join(format!("contexts.{ty}.jsonl")))?;
        let scores: Vec<_> = contexts
            .iter()
            .filter_map(|c| {
                refs.get(c.question_id.as_str())
                    .map(|r| rouge_f1(&c.text, r))
            })
            .collect();
        let n = scores.len() as f64;
        println!(
            "{:<8} {:>2}   {:.3}   {:.3}   {:.3}",
            ty.as_str(),
            scores.len(),
            scores.iter().map(|s| s.rouge1_f1).sum::<f64>() / n,
            scores.iter().map(|s| s.rouge2_f1).sum::<f64>() / n,
            scores.iter().map(|s| s.rouge_l_f1).sum::<f64>() / n,
        );
    }

    // lexical overlap between a query and the gold passage
    let gold = |qid: &str| {
        let q = questions.iter().find(|q| q.id == qid).unwrap();
        corpus
            .iter()
            .find(|p| passage_contains_answer(p, &q.answers))
            .unwrap()
    };
    let sentences = load_contexts(&data.join("contexts.sentence.jsonl"))?;
    println!("\nquery vs gold passage, rouge1");
    for q in questions.iter().take(6) {
        let passage = gold(&q.id).full_text();
        let ctx: Vec<_> = sentences
            .iter()
            .filter(|c| c.question_id == q.id)
            .cloned()
            .collect();
        let augmented = augment_query(q, &ctx)?;
        println!(
            "{}  plain {:.3}  with sentence {:.3}",
            q.id,
            rouge_f1(&q.text, &passage).rouge1_f1,
            rouge_f1(&augmented, &passage).rouge1_f1
        );
    }
    Ok(())
}
