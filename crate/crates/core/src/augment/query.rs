use std::collections::HashMap;

use super::{ContextRecord, SEP};
use crate::corpus::Question;
use crate::error::{Error, Result};

/// Appends contexts to the question text.
///
/// Context texts are concatenated in order, `[SEP]` markers become spaces
/// and whitespace in the appended part is collapsed. The question text is
/// kept verbatim as the prefix.
pub fn augment_query(question: &Question, contexts: &[ContextRecord]) -> Result<String> {
    if let Some(first) = contexts.first() {
        for c in contexts {
            if c.question_id != question.id {
                return Err(Error::QuestionMismatch {
                    expected: question.id.clone(),
                    found: c.question_id.clone(),
                });
            }
            if c.context_type != first.context_type {
                return Err(Error::InvalidArgument(format!(
                    "mixed context types {} and {} for question {:?}",
                    first.context_type, c.context_type, question.id
                )));
            }
        }
    }
    let suffix = contexts
        .iter()
        .flat_map(|c| c.text.split(SEP))
        .flat_map(str::split_whitespace)
        .collect::<Vec<_>>()
        .join(" ");
    if suffix.is_empty() {
        Ok(question.text.clone())
    } else {
        Ok(format!("{} {}", question.text, suffix))
    }
}

/// Rewrites every question's text into its augmented query. Questions
/// without contexts keep their original text. All contexts must share one
/// type and refer to known questions.
pub fn augment_questions(
    questions: &[Question],
    contexts: &[ContextRecord],
) -> Result<Vec<Question>> {
    if let Some(first) = contexts.first() {
        if let Some(other) = contexts
            .iter()
            .find(|c| c.context_type != first.context_type)
        {
            return Err(Error::InvalidArgument(format!(
                "context file mixes types {} and {}",
                first.context_type, other.context_type
            )));
        }
    }
    let mut by_question: HashMap<&str, Vec<ContextRecord>> = HashMap::new();
    for c in contexts {
        by_question
            .entry(c.question_id.as_str())
            .or_default()
            .push(c.clone());
    }
    let known: std::collections::HashSet<&str> = questions.iter().map(|q| q.id.as_str()).collect();
    if let Some(stray) = contexts
        .iter()
        .find(|c| !known.contains(c.question_id.as_str()))
    {
        return Err(Error::InvalidRecord {
            id: stray.question_id.clone(),
            reason: "context refers to a question that is not in the question file".into(),
        });
    }
    questions
        .iter()
        .map(|q| {
            let ctx = by_question
                .get(q.id.as_str())
                .map_or(&[][..], Vec::as_slice);
            Ok(Question {
                id: q.id.clone(),
                text: augment_query(q, ctx)?,
                answers: q.answers.clone(),
            })
        })
        .collect()
}
