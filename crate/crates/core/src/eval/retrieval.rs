use std::collections::{BTreeMap, HashMap};

use rayon::prelude::*;
use serde::Serialize;

use super::normalize::{contains_run, normalized_tokens};
use crate::corpus::{Corpus, Question};
use crate::error::{Error, Result};
use crate::run::RunSet;

/// Top-k accuracy per cutoff plus the depth of the first answer-bearing
/// passage for every question.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RetrievalReport {
    pub accuracy: BTreeMap<usize, f64>,
    pub hit_depths: Vec<HitDepth>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HitDepth {
    pub question_id: String,
    /// 1-based rank of the first passage containing an answer.
    pub depth: Option<usize>,
}

impl RetrievalReport {
    pub fn at(&self, k: usize) -> Option<f64> {
        self.accuracy.get(&k).copied()
    }

    /// Per-question 0/1 hits at cutoff `k`, in question order.
    pub fn hits_at(&self, k: usize) -> Vec<f64> {
        self.hit_depths
            .iter()
            .map(|h| match h.depth {
                Some(d) if d <= k => 1.0,
                _ => 0.0,
            })
            .collect()
    }
}

/// Rank of the first passage in the question's list that contains one of
/// its answers. Every listed passage must exist in the corpus.
pub fn hit_depth(run: &RunSet, question: &Question, corpus: &Corpus) -> Result<Option<usize>> {
    hit_depth_cached(run, question, corpus, &mut HashMap::new())
}

fn hit_depth_cached<'c>(
    run: &RunSet,
    question: &Question,
    corpus: &'c Corpus,
    cache: &mut HashMap<&'c str, Vec<String>>,
) -> Result<Option<usize>> {
    let Some(list) = run.get(&question.id) else {
        return Ok(None);
    };
    let answers: Vec<Vec<String>> = question
        .answers
        .iter()
        .map(|a| normalized_tokens(a))
        .collect();
    let mut depth = None;
    for (rank, id) in list.passage_ids().enumerate() {
        let passage = corpus.lookup(id)?;
        if depth.is_some() {
            continue;
        }
        let tokens = cache
            .entry(passage.id.as_str())
            .or_insert_with(|| normalized_tokens(&passage.full_text()));
        if answers.iter().any(|a| contains_run(tokens, a)) {
            depth = Some(rank + 1);
        }
    }
    Ok(depth)
}

/// Fraction of questions whose top-k passages include an answer, for each
/// `k` in `ks`. Questions missing from the run count as misses.
pub fn topk_accuracy(
    run: &RunSet,
    questions: &[Question],
    corpus: &Corpus,
    ks: &[usize],
) -> Result<RetrievalReport> {
    if ks.is_empty() || ks.contains(&0) {
        return Err(Error::InvalidArgument(
            "cutoffs must be non-empty and each ≥ 1".into(),
        ));
    }
    let depths: Vec<Option<usize>> = questions
        .par_iter()
        .map_init(HashMap::new, |cache, q| {
            hit_depth_cached(run, q, corpus, cache)
        })
        .collect::<Result<_>>()?;
    let total = questions.len();
    let accuracy = ks
        .iter()
        .map(|&k| {
            let hits = depths
                .iter()
                .filter(|d| matches!(d, Some(d) if *d <= k))
                .count();
            let frac = if total == 0 {
                0.0
            } else {
                hits as f64 / total as f64
            };
            (k, frac)
        })
        .collect();
    let hit_depths = questions
        .iter()
        .zip(depths)
        .map(|(q, depth)| HitDepth {
            question_id: q.id.clone(),
            depth,
        })
        .collect();
    Ok(RetrievalReport {
        accuracy,
        hit_depths,
    })
}
