//! Pool an extractive reader's span probabilities across passages and
//! compare with picking the best span of the top passage.
//!
//!     cargo run -p gar --example span_voting

use std::path::Path;

use gar::corpus::load_questions;
use gar::eval::exact_match;
use gar::voting::{baseline_select, load_reader_outputs, vote, VotingConfig};

fn main() -> gar::Result<()> {
    let data = Path::new(env!("CARGO_MANIFEST_DIR")).join("data/toy");
    let outputs = load_reader_outputs(&data.join("reader_output.jsonl"))?;
    let questions = load_questions(&data.join("questions.jsonl"))?;

    let (mut voted_em, mut base_em) = (0, 0);
    for out in &outputs {
        let q = questions.iter().find(|q| q.id == out.question_id).unwrap();
        let votes = vote(out, &VotingConfig::default())?;
        let base = baseline_select(out)?;
        println!("{}  {}  gold {:?}", q.id, q.text, q.answers);
        for v in &votes {
            println!("    {:<22} {:.4}", v.key, v.score);
        }
        let winner = &votes[0].text;
        println!(
            "  voted    {winner:?}  EM {}",
            exact_match(winner, &q.answers)
        );
        println!(
            "  baseline {base:?}  EM {}\n",
            exact_match(&base, &q.answers)
        );
        voted_em += exact_match(winner, &q.answers) as usize;
        base_em += exact_match(&base, &q.answers) as usize;
    }
    println!(
        "exact match: voting {voted_em}/{n}, baseline {base_em}/{n}",
        n = outputs.len()
    );

    // raw grouping keeps "june 1884" and "June 1884" apart
    let raw = VotingConfig {
        normalize: false,
        ..VotingConfig::default()
    };
    let q02 = outputs.iter().find(|o| o.question_id == "q02").unwrap();
    println!("\nq02 with raw surface strings:");
    for v in vote(q02, &raw)? {
        println!("    {:<22} {:.4}", v.key, v.score);
    }
    Ok(())
}
