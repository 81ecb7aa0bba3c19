//! ROUGE-1, ROUGE-2 and ROUGE-L as F1 scores.
//!
//! Both sides are tokenized with [`tokenize`]. A reference containing the
//! `[SEP]` separator is treated as several references and each metric takes
//! its best score over them.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::augment::SEP;
use crate::index::tokenize;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct RougeScores {
    pub rouge1_f1: f64,
    pub rouge2_f1: f64,
    #[serde(rename = "rougeL_f1")]
    pub rouge_l_f1: f64,
}

impl RougeScores {
    fn max(self, other: RougeScores) -> RougeScores {
        RougeScores {
            rouge1_f1: self.rouge1_f1.max(other.rouge1_f1),
            rouge2_f1: self.rouge2_f1.max(other.rouge2_f1),
            rouge_l_f1: self.rouge_l_f1.max(other.rouge_l_f1),
        }
    }
}

/// Scores `candidate` against `reference`, splitting the reference on `[SEP]`.
pub fn rouge_f1(candidate: &str, reference: &str) -> RougeScores {
    rouge_f1_multi(candidate, reference.split(SEP))
}

/// Best score per metric over several references. Blank references are ignored.
/// Separators inside the candidate count as whitespace.
pub fn rouge_f1_multi<'a>(
    candidate: &str,
    references: impl IntoIterator<Item = &'a str>,
) -> RougeScores {
    let cand = tokenize(&candidate.replace(SEP, " "));
    references
        .into_iter()
        .map(tokenize)
        .filter(|r| !r.is_empty())
        .map(|r| rouge_tokens(&cand, &r))
        .fold(RougeScores::default(), RougeScores::max)
}

/// Scores two token sequences directly.
pub fn rouge_tokens<S: AsRef<str> + Eq + std::hash::Hash>(
    candidate: &[S],
    reference: &[S],
) -> RougeScores {
    if candidate.is_empty() || reference.is_empty() {
        return RougeScores::default();
    }
    RougeScores {
        rouge1_f1: ngram_f1(candidate, reference, 1),
        rouge2_f1: ngram_f1(candidate, reference, 2),
        rouge_l_f1: f1(
            lcs_len(candidate, reference),
            candidate.len(),
            reference.len(),
        ),
    }
}

fn ngram_counts<S: Eq + std::hash::Hash>(tokens: &[S], n: usize) -> HashMap<&[S], usize> {
    let mut counts = HashMap::new();
    if tokens.len() >= n {
        for gram in tokens.windows(n) {
            *counts.entry(gram).or_insert(0) += 1;
        }
    }
    counts
}

fn ngram_f1<S: Eq + std::hash::Hash>(candidate: &[S], reference: &[S], n: usize) -> f64 {
    let cand = ngram_counts(candidate, n);
    let refs = ngram_counts(reference, n);
    let overlap: usize = cand
        .iter()
        .map(|(gram, &c)| c.min(refs.get(gram).copied().unwrap_or(0)))
        .sum();
    let cand_total = candidate.len().saturating_sub(n - 1);
    let ref_total = reference.len().saturating_sub(n - 1);
    f1(overlap, cand_total, ref_total)
}

fn f1(overlap: usize, cand_total: usize, ref_total: usize) -> f64 {
    if overlap == 0 || cand_total == 0 || ref_total == 0 {
        return 0.0;
    }
    let precision = overlap as f64 / cand_total as f64;
    let recall = overlap as f64 / ref_total as f64;
    2.0 * precision * recall / (precision + recall)
}

fn lcs_len<S: PartialEq>(a: &[S], b: &[S]) -> usize {
    let mut row = vec![0usize; b.len() + 1];
    for x in a {
        let mut diag = 0;
        for (j, y) in b.iter().enumerate() {
            let up = row[j + 1];
            row[j + 1] = if x == y { diag + 1 } else { up.max(row[j]) };
            diag = up;
        }
    }
    row[b.len()]
}
