//! Generation targets, generation-augmented queries and RM3 expansion.
//!
//! Two record files cross the boundary to an external generator:
//!
//! * target files (`{question_id, context_type, source, reference}`), which
//!   a seq2seq model is trained on, and
//! * context files (`{question_id, context_type, text}`), which the model
//!   produces and [`augment_query`] consumes.

mod query;
mod rm3;
mod targets;

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::jsonl;

pub use query::{augment_query, augment_questions};
pub use rm3::{rm3_expand, rm3_search, Rm3Params};
pub use targets::{
    extract_answer_target, extract_sentence_target, extract_title_target, find_positive_passages,
    prepare_targets, split_sentences, DEFAULT_POSITIVE_DEPTH,
};

/// Joins multiple references into one target string.
pub const SEP: &str = "[SEP]";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ContextType {
    Answer,
    Sentence,
    Title,
}

impl ContextType {
    pub const ALL: [ContextType; 3] = [
        ContextType::Answer,
        ContextType::Sentence,
        ContextType::Title,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ContextType::Answer => "answer",
            ContextType::Sentence => "sentence",
            ContextType::Title => "title",
        }
    }
}

impl fmt::Display for ContextType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ContextType {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "answer" => Ok(ContextType::Answer),
            "sentence" => Ok(ContextType::Sentence),
            "title" => Ok(ContextType::Title),
            other => Err(Error::InvalidArgument(format!(
                "unknown context type {other:?} (expected answer, sentence or title)"
            ))),
        }
    }
}

/// A generated (or extracted) context for one question.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContextRecord {
    pub question_id: String,
    pub context_type: ContextType,
    pub text: String,
}

impl ContextRecord {
    pub fn new(
        question_id: impl Into<String>,
        context_type: ContextType,
        text: impl Into<String>,
    ) -> Self {
        ContextRecord {
            question_id: question_id.into(),
            context_type,
            text: text.into(),
        }
    }
}

/// A seq2seq training pair: question text in, reference context out.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TargetRecord {
    pub question_id: String,
    pub context_type: ContextType,
    pub source: String,
    pub reference: String,
}

pub fn load_contexts(path: &Path) -> Result<Vec<ContextRecord>> {
    jsonl::read::<ContextRecord>(path)?
        .into_iter()
        .map(|(line, record)| {
            if record.text.trim().is_empty() {
                Err(Error::malformed(path, line, "empty context text"))
            } else {
                Ok(record)
            }
        })
        .collect()
}

pub fn save_contexts(path: &Path, records: &[ContextRecord]) -> Result<()> {
    jsonl::write(path, records)
}

pub fn load_targets(path: &Path) -> Result<Vec<TargetRecord>> {
    jsonl::read::<TargetRecord>(path)?
        .into_iter()
        .map(|(line, record)| {
            if record.reference.trim().is_empty() {
                Err(Error::malformed(path, line, "empty reference"))
            } else {
                Ok(record)
            }
        })
        .collect()
}

pub fn save_targets(path: &Path, records: &[TargetRecord]) -> Result<()> {
    jsonl::write(path, records)
}

/// Joins non-blank parts with [`SEP`], so the separator never sits at either end.
pub(crate) fn join_references<S: AsRef<str>>(parts: impl IntoIterator<Item = S>) -> Option<String> {
    let parts: Vec<String> = parts
        .into_iter()
        .map(|p| p.as_ref().trim().to_string())
        .filter(|p| !p.is_empty())
        .collect();
    if parts.is_empty() {
        None
    } else {
        Some(parts.join(SEP))
    }
}
