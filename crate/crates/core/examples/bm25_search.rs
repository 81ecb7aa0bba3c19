//! Build a BM25 index over the toy corpus, query it, and round-trip it
//! through disk.
//!
//!     cargo run -p gar --example bm25_search -- "who designed the varnholt bridge"

use std::path::Path;

use gar::corpus::load_corpus;
use gar::index::{read_manifest, tokenize};
use gar::{Bm25Params, InvertedIndex};

fn main() -> gar::Result<()> {
    let data = Path::new(env!("CARGO_MANIFEST_DIR")).join("data/toy");
    let query = std::env::args()
        .nth(1)
        .unwrap_or_else(|| "who designed the varnholt bridge".into());

    let corpus = load_corpus(&data.join("corpus.jsonl"))?;
    let index = InvertedIndex::build(&corpus, Bm25Params::default());
    println!(
        "{} passages, {} terms, avgdl {:.2}",
        index.num_passages(),
        index.num_terms(),
        index.avgdl()
    );

    println!("\nquery tokens: {:?}", tokenize(&query));
    for t in tokenize(&query) {
        println!("  {t:<12} df {:>3}  idf {:.3}", index.df(&t), index.idf(&t));
    }

    println!("\ntop 5 (k1 = 0.9, b = 0.4)");
    for (rank, hit) in index.search("q", &query, 5).entries().iter().enumerate() {
        let p = corpus.lookup(&hit.passage_id)?;
        println!(
            "{:>2}. {:<6} {:>7.3}  {}",
            rank + 1,
            hit.passage_id,
            hit.score,
            p.title
        );
    }

    let classic = index.clone().with_params(Bm25Params { k1: 1.2, b: 0.75 });
    println!("\ntop 5 (k1 = 1.2, b = 0.75)");
    for (rank, hit) in classic.search("q", &query, 5).entries().iter().enumerate() {
        println!("{:>2}. {:<6} {:>7.3}", rank + 1, hit.passage_id, hit.score);
    }

    let dir = std::env::temp_dir().join("gar-example-index");
    index.save(&dir)?;
    let manifest = read_manifest(&dir)?;
    let loaded = InvertedIndex::load(&dir)?;
    assert_eq!(loaded.search("q", &query, 5), index.search("q", &query, 5));
    println!(
        "\nsaved to {} ({} v{})",
        dir.display(),
        manifest.format,
        manifest.version
    );
    Ok(())
}
