//! RM3 pseudo-relevance feedback.
//!
//! The feedback model weights a term by
//! `sum over feedback passages d of (tf(t, d) / |d|) * softmax(bm25)[d]`,
//! keeps the `fb_terms` heaviest terms and renormalizes them to sum to 1.
//! It is then interpolated with the original query, whose weights are the
//! term counts divided by the query length:
//! `alpha * original + (1 - alpha) * feedback`.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::index::{tokenize, InvertedIndex, WeightedQuery};
use crate::run::RankedList;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rm3Params {
    pub fb_docs: usize,
    pub fb_terms: usize,
    /// Weight of the original query, in `[0, 1]`.
    pub alpha: f64,
}

impl Default for Rm3Params {
    fn default() -> Self {
        Rm3Params {
            fb_docs: 10,
            fb_terms: 10,
            alpha: 0.5,
        }
    }
}

impl Rm3Params {
    pub fn validate(&self) -> Result<()> {
        if self.fb_docs == 0 || self.fb_terms == 0 {
            return Err(Error::InvalidArgument(
                "fb_docs and fb_terms must be ≥ 1".into(),
            ));
        }
        if !(0.0..=1.0).contains(&self.alpha) {
            return Err(Error::InvalidArgument(format!(
                "alpha {} is outside [0, 1]",
                self.alpha
            )));
        }
        Ok(())
    }
}

fn original_weights(tokens: &[String]) -> BTreeMap<String, f64> {
    let len = tokens.len() as f64;
    let mut weights = BTreeMap::new();
    for t in tokens {
        *weights.entry(t.clone()).or_insert(0.0) += 1.0 / len;
    }
    weights
}

fn softmax(scores: &[f64]) -> Vec<f64> {
    let max = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let exp: Vec<f64> = scores.iter().map(|s| (s - max).exp()).collect();
    let total: f64 = exp.iter().sum();
    exp.into_iter().map(|e| e / total).collect()
}

/// Expands `query` with terms mined from its top `fb_docs` BM25 results.
/// An empty initial retrieval leaves the original weights unchanged.
pub fn rm3_expand(index: &InvertedIndex, query: &str, params: Rm3Params) -> Result<WeightedQuery> {
    params.validate()?;
    let tokens = tokenize(query);
    if tokens.is_empty() {
        return Ok(WeightedQuery::default());
    }
    let original = original_weights(&tokens);
    let feedback = index.search_weighted("", &WeightedQuery::from_tokens(&tokens), params.fb_docs);
    if feedback.is_empty() {
        return Ok(WeightedQuery::new(original));
    }

    let doc_weights = softmax(
        &feedback
            .entries()
            .iter()
            .map(|e| e.score)
            .collect::<Vec<_>>(),
    );
    let mut relevance: BTreeMap<&str, f64> = BTreeMap::new();
    for (entry, doc_weight) in feedback.entries().iter().zip(doc_weights) {
        let doc = index
            .doc_of(&entry.passage_id)
            .expect("search only returns indexed passages");
        let len = index.doc_len_of(doc) as f64;
        for (term, tf) in index.doc_terms(doc) {
            *relevance.entry(term).or_insert(0.0) += tf as f64 / len * doc_weight;
        }
    }
    let mut ranked: Vec<(&str, f64)> = relevance.into_iter().collect();
    ranked.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(b.0)));
    ranked.truncate(params.fb_terms);
    let kept_total: f64 = ranked.iter().map(|(_, w)| w).sum();

    let mut combined: BTreeMap<String, f64> = original
        .into_iter()
        .map(|(t, w)| (t, params.alpha * w))
        .collect();
    for (term, w) in ranked {
        *combined.entry(term.to_string()).or_insert(0.0) += (1.0 - params.alpha) * w / kept_total;
    }
    combined.retain(|_, w| *w > 0.0);
    Ok(WeightedQuery::new(combined))
}

/// Retrieves with the RM3-expanded query.
pub fn rm3_search(
    index: &InvertedIndex,
    question_id: &str,
    query: &str,
    params: Rm3Params,
    k: usize,
) -> Result<RankedList> {
    let expanded = rm3_expand(index, query, params)?;
    let mut list = index.search_weighted(question_id, &expanded, k);
    list.tag = "rm3".into();
    Ok(list)
}
