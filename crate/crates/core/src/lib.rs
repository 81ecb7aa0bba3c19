//! Generation-augmented sparse retrieval.
//!
//! A question is expanded with generated context (a predicted answer, an
//! answer-bearing sentence, or the title of a relevant page) and the
//! augmented query is run against a BM25 index. Results from several
//! contexts, and from external dense retrievers, are fused into one ranked
//! list per question, and an extractive reader's span scores can be pooled
//! across passages by surface string.
//!
//! | Module | What it does |
//! |--------|--------------|
//! | [`corpus`] | passage and question files, id lookup |
//! | [`index`] | tokenizer, BM25 inverted index, persistence |
//! | [`augment`] | generation targets, augmented queries, RM3 |
//! | [`fusion`] | round-robin and reciprocal rank fusion |
//! | [`eval`] | top-k accuracy, Exact Match, ROUGE, breakdowns |
//! | [`voting`] | passage-level span voting |
//! | [`run`] | ranked lists and TREC run files |
//! | [`config`], [`pipeline`], [`report`] | declarative end-to-end runs and their reports |
//!
//! The `examples/` directory has one runnable program per capability.

pub mod augment;
pub mod cli;
pub mod config;
pub mod corpus;
pub mod error;
pub mod eval;
pub mod fusion;
pub mod index;
pub mod jsonl;
pub mod pipeline;
pub mod report;
pub mod run;
pub mod voting;

pub use augment::{ContextRecord, ContextType, TargetRecord};
pub use corpus::{Corpus, Passage, Question};
pub use error::{Error, Result};
pub use fusion::FusionStrategy;
pub use index::{Bm25Params, InvertedIndex};
pub use run::{RankedList, RunSet, ScoredPassage};
