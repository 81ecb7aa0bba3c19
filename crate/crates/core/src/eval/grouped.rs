use std::collections::{BTreeMap, HashMap};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::corpus::Question;
use crate::error::{Error, Result};
use crate::index::tokenize;
use crate::jsonl;

/// The wh-word categories, checked against the question's first token.
pub const QUESTION_TYPES: [&str; 7] = ["Who", "When", "What", "Where", "How", "Which", "Why"];
pub const OTHER: &str = "Other";

/// Assigns each question to a group.
#[derive(Debug, Clone)]
pub enum Labeler {
    /// Who/When/What/Where/How/Which/Why from the first token, else Other.
    QuestionType,
    /// Labels read from a file, keyed by question id.
    External(HashMap<String, String>),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct LabelRecord {
    question_id: String,
    label: String,
}

impl Labeler {
    /// Reads `{question_id, label}` lines.
    pub fn from_file(path: &Path) -> Result<Self> {
        let labels = jsonl::read::<LabelRecord>(path)?
            .into_iter()
            .map(|(_, r)| (r.question_id, r.label))
            .collect();
        Ok(Labeler::External(labels))
    }

    pub fn label(&self, question: &Question) -> Result<String> {
        match self {
            Labeler::QuestionType => Ok(question_type(&question.text).to_string()),
            Labeler::External(map) => map
                .get(&question.id)
                .cloned()
                .ok_or_else(|| Error::MissingLabel(question.id.clone())),
        }
    }
}

pub fn question_type(text: &str) -> &'static str {
    let first = tokenize(text).into_iter().next().unwrap_or_default();
    QUESTION_TYPES
        .iter()
        .find(|t| t.eq_ignore_ascii_case(&first))
        .copied()
        .unwrap_or(OTHER)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GroupStat {
    pub count: usize,
    pub mean: f64,
}

/// Mean of `values` within each label. `values[i]` belongs to `questions[i]`.
pub fn grouped_metric(
    questions: &[Question],
    values: &[f64],
    labeler: &Labeler,
) -> Result<BTreeMap<String, GroupStat>> {
    if questions.len() != values.len() {
        return Err(Error::InvalidArgument(format!(
            "{} questions but {} values",
            questions.len(),
            values.len()
        )));
    }
    let mut sums: BTreeMap<String, (usize, f64)> = BTreeMap::new();
    for (q, &v) in questions.iter().zip(values) {
        let slot = sums.entry(labeler.label(q)?).or_insert((0, 0.0));
        slot.0 += 1;
        slot.1 += v;
    }
    Ok(sums
        .into_iter()
        .map(|(label, (count, sum))| {
            (
                label,
                GroupStat {
                    count,
                    mean: sum / count as f64,
                },
            )
        })
        .collect())
}
