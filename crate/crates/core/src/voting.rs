//! Passage-level span voting over extractive reader output.
//!
//! Each candidate span `j` of passage `i` gets
//! `p = softmax(D)[i] * softmax(S_i)[j]`, where `D` holds the passage
//! relevance logits and `S_i` the logits of the spans kept for passage `i`.
//! Spans with the same surface string pool their probability and the
//! largest pool wins.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::eval::normalize_answer;
use crate::jsonl;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Span {
    pub text: String,
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReaderPassage {
    pub passage_id: String,
    /// Passage relevance logit.
    pub score: f64,
    pub spans: Vec<Span>,
}

/// Reader scores for one question.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReaderOutput {
    pub question_id: String,
    pub passages: Vec<ReaderPassage>,
}

impl ReaderOutput {
    pub fn validate(&self) -> Result<()> {
        let invalid = |reason: String| Error::InvalidRecord {
            id: self.question_id.clone(),
            reason,
        };
        if self.passages.is_empty() {
            return Err(invalid("reader output has no passages".into()));
        }
        for p in &self.passages {
            if p.spans.is_empty() {
                return Err(invalid(format!("passage {:?} has no spans", p.passage_id)));
            }
            if !p.score.is_finite() || p.spans.iter().any(|s| !s.score.is_finite()) {
                return Err(invalid(format!(
                    "passage {:?} has a non-finite score",
                    p.passage_id
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VotingConfig {
    /// Spans kept per passage before normalization.
    pub spans_per_passage: usize,
    /// Group spans by [`normalize_answer`] rather than raw text.
    pub normalize: bool,
}

impl Default for VotingConfig {
    fn default() -> Self {
        VotingConfig {
            spans_per_passage: 5,
            normalize: true,
        }
    }
}

/// One surface-string group after voting.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VotedAnswer {
    /// Grouping key: the normalized or raw surface string.
    pub key: String,
    /// Raw text of the group's highest-probability span.
    pub text: String,
    pub score: f64,
}

fn softmax(logits: impl Iterator<Item = f64> + Clone) -> Vec<f64> {
    let max = logits.clone().fold(f64::NEG_INFINITY, f64::max);
    let exp: Vec<f64> = logits.map(|x| (x - max).exp()).collect();
    let total: f64 = exp.iter().sum();
    exp.into_iter().map(|e| e / total).collect()
}

/// Indices of the top `n` spans by score; equal scores keep input order.
fn retained_spans(spans: &[Span], n: usize) -> Vec<usize> {
    let mut order: Vec<usize> = (0..spans.len()).collect();
    order.sort_by(|&a, &b| spans[b].score.total_cmp(&spans[a].score));
    order.truncate(n);
    order
}

/// Aggregates span probabilities by surface string, best first. Equal
/// aggregates are ordered by key.
pub fn vote(output: &ReaderOutput, config: &VotingConfig) -> Result<Vec<VotedAnswer>> {
    output.validate()?;
    if config.spans_per_passage == 0 {
        return Err(Error::InvalidArgument(
            "spans per passage must be ≥ 1".into(),
        ));
    }
    let passage_probs = softmax(output.passages.iter().map(|p| p.score));
    // key -> (total, best span probability, its text)
    let mut groups: BTreeMap<String, (f64, f64, &str)> = BTreeMap::new();
    for (passage, passage_prob) in output.passages.iter().zip(passage_probs) {
        let kept = retained_spans(&passage.spans, config.spans_per_passage);
        let span_probs = softmax(kept.iter().map(|&j| passage.spans[j].score));
        for (&j, span_prob) in kept.iter().zip(span_probs) {
            let span = &passage.spans[j];
            let p = passage_prob * span_prob;
            let key = if config.normalize {
                normalize_answer(&span.text)
            } else {
                span.text.clone()
            };
            let slot = groups
                .entry(key)
                .or_insert((0.0, f64::NEG_INFINITY, span.text.as_str()));
            slot.0 += p;
            if p > slot.1 {
                slot.1 = p;
                slot.2 = span.text.as_str();
            }
        }
    }
    let mut answers: Vec<VotedAnswer> = groups
        .into_iter()
        .map(|(key, (score, _, text))| VotedAnswer {
            key,
            text: text.to_string(),
            score,
        })
        .collect();
    answers.sort_by(|a, b| b.score.total_cmp(&a.score).then_with(|| a.key.cmp(&b.key)));
    Ok(answers)
}

/// The best span of the most relevant passage, without voting. Ties go to
/// the earlier passage and the earlier span.
pub fn baseline_select(output: &ReaderOutput) -> Result<String> {
    output.validate()?;
    let passage = output
        .passages
        .iter()
        .reduce(|best, p| if p.score > best.score { p } else { best })
        .expect("validated non-empty");
    let span = passage
        .spans
        .iter()
        .reduce(|best, s| if s.score > best.score { s } else { best })
        .expect("validated non-empty");
    Ok(span.text.clone())
}

/// A predicted answer, as written by the `vote` command.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Prediction {
    pub question_id: String,
    pub prediction: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub score: Option<f64>,
}

pub fn load_reader_outputs(path: &Path) -> Result<Vec<ReaderOutput>> {
    jsonl::read::<ReaderOutput>(path)?
        .into_iter()
        .map(|(line, out)| {
            out.validate()
                .map_err(|e| Error::malformed(path, line, e))?;
            Ok(out)
        })
        .collect()
}

pub fn load_predictions(path: &Path) -> Result<Vec<Prediction>> {
    Ok(jsonl::read::<Prediction>(path)?
        .into_iter()
        .map(|(_, p)| p)
        .collect())
}
