//! Tokenization, the BM25 inverted index and its on-disk form.

mod bm25;
mod store;
mod tokenize;

pub use bm25::{Bm25Params, InvertedIndex, Posting, WeightedQuery};
pub use store::{read_manifest, Manifest};
pub use tokenize::tokenize;
