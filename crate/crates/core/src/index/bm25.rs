use std::collections::{BTreeMap, HashMap};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::tokenize::tokenize;
use crate::corpus::Corpus;
use crate::run::{canonical_order, RankedList, RunSet, ScoredPassage};

/// BM25 free parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bm25Params {
    pub k1: f64,
    pub b: f64,
}

impl Default for Bm25Params {
    fn default() -> Self {
        Bm25Params { k1: 0.9, b: 0.4 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Posting {
    pub doc: u32,
    pub tf: u32,
}

/// A query as distinct terms with non-negative weights.
///
/// A plain query weights each term by its number of occurrences, so
/// repeated terms contribute once per occurrence.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct WeightedQuery {
    terms: Vec<(String, f64)>,
}

impl WeightedQuery {
    /// Merges repeated terms by summing their weights. Terms end up sorted,
    /// which fixes the floating-point accumulation order of every score.
    pub fn new(terms: impl IntoIterator<Item = (String, f64)>) -> Self {
        let mut merged: BTreeMap<String, f64> = BTreeMap::new();
        for (term, weight) in terms {
            *merged.entry(term).or_insert(0.0) += weight;
        }
        WeightedQuery {
            terms: merged.into_iter().collect(),
        }
    }

    pub fn from_tokens<S: AsRef<str>>(tokens: &[S]) -> Self {
        Self::new(tokens.iter().map(|t| (t.as_ref().to_string(), 1.0)))
    }

    pub fn from_text(text: &str) -> Self {
        Self::from_tokens(&tokenize(text))
    }

    /// Terms in ascending order.
    pub fn terms(&self) -> &[(String, f64)] {
        &self.terms
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }
}

/// Passage id, length, and sorted term counts.
type CountedDoc = (String, u32, Vec<(String, u32)>);

/// Term-to-passage postings with the statistics BM25 needs.
#[derive(Debug, Clone)]
pub struct InvertedIndex {
    pub(super) params: Bm25Params,
    pub(super) doc_ids: Vec<String>,
    pub(super) doc_lens: Vec<u32>,
    pub(super) doc_by_id: HashMap<String, u32>,
    pub(super) terms: Vec<String>,
    pub(super) vocab: HashMap<String, u32>,
    pub(super) postings: Vec<Vec<Posting>>,
    /// Per passage: (term id, tf), sorted by term id.
    pub(super) forward: Vec<Vec<(u32, u32)>>,
    pub(super) avgdl: f64,
}

impl InvertedIndex {
    /// Indexes `title + " " + text` of every passage.
    pub fn build(corpus: &Corpus, params: Bm25Params) -> Self {
        let docs: Vec<(String, String)> = corpus
            .iter()
            .map(|p| (p.id.clone(), p.full_text()))
            .collect();
        Self::build_from_texts(docs, params)
    }

    /// Indexes raw `(id, text)` pairs. Ids are assumed unique.
    pub fn build_from_texts(docs: Vec<(String, String)>, params: Bm25Params) -> Self {
        // Tokenizing is the expensive part and runs in parallel; the merge
        // below is sequential in passage order so term ids are deterministic.
        let counted: Vec<CountedDoc> = docs
            .into_par_iter()
            .map(|(id, text)| {
                let tokens = tokenize(&text);
                let len = tokens.len() as u32;
                let mut counts: BTreeMap<String, u32> = BTreeMap::new();
                for t in tokens {
                    *counts.entry(t).or_insert(0) += 1;
                }
                (id, len, counts.into_iter().collect())
            })
            .collect();

        let mut index = InvertedIndex {
            params,
            doc_ids: Vec::with_capacity(counted.len()),
            doc_lens: Vec::with_capacity(counted.len()),
            doc_by_id: HashMap::with_capacity(counted.len()),
            terms: Vec::new(),
            vocab: HashMap::new(),
            postings: Vec::new(),
            forward: Vec::with_capacity(counted.len()),
            avgdl: 0.0,
        };
        for (id, len, counts) in counted {
            let doc = index.doc_ids.len() as u32;
            let mut fwd = Vec::with_capacity(counts.len());
            for (term, tf) in counts {
                let term_id = match index.vocab.get(&term) {
                    Some(&t) => t,
                    None => {
                        let t = index.terms.len() as u32;
                        index.vocab.insert(term.clone(), t);
                        index.terms.push(term);
                        index.postings.push(Vec::new());
                        t
                    }
                };
                index.postings[term_id as usize].push(Posting { doc, tf });
                fwd.push((term_id, tf));
            }
            fwd.sort_unstable();
            index.forward.push(fwd);
            index.doc_by_id.insert(id.clone(), doc);
            index.doc_ids.push(id);
            index.doc_lens.push(len);
        }
        index.avgdl = mean_length(&index.doc_lens);
        index
    }

    pub fn params(&self) -> Bm25Params {
        self.params
    }

    /// Replaces the scoring parameters; postings are unaffected.
    pub fn with_params(mut self, params: Bm25Params) -> Self {
        self.params = params;
        self
    }

    pub fn num_passages(&self) -> usize {
        self.doc_ids.len()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn avgdl(&self) -> f64 {
        self.avgdl
    }

    pub fn doc_len(&self, passage_id: &str) -> Option<u32> {
        self.doc_by_id
            .get(passage_id)
            .map(|&d| self.doc_lens[d as usize])
    }

    pub fn contains_passage(&self, passage_id: &str) -> bool {
        self.doc_by_id.contains_key(passage_id)
    }

    pub fn passage_id(&self, doc: u32) -> &str {
        &self.doc_ids[doc as usize]
    }

    pub(crate) fn doc_of(&self, passage_id: &str) -> Option<u32> {
        self.doc_by_id.get(passage_id).copied()
    }

    pub fn df(&self, term: &str) -> usize {
        self.vocab
            .get(term)
            .map_or(0, |&t| self.postings[t as usize].len())
    }

    pub fn tf(&self, term: &str, passage_id: &str) -> u32 {
        let (Some(&t), Some(&d)) = (self.vocab.get(term), self.doc_by_id.get(passage_id)) else {
            return 0;
        };
        let fwd = &self.forward[d as usize];
        fwd.binary_search_by_key(&t, |&(term, _)| term)
            .map_or(0, |i| fwd[i].1)
    }

    pub fn postings(&self, term: &str) -> &[Posting] {
        self.vocab
            .get(term)
            .map_or(&[][..], |&t| &self.postings[t as usize])
    }

    /// `(term, tf)` pairs of one passage.
    pub(crate) fn doc_terms(&self, doc: u32) -> impl Iterator<Item = (&str, u32)> {
        self.forward[doc as usize]
            .iter()
            .map(|&(t, tf)| (self.terms[t as usize].as_str(), tf))
    }

    pub(crate) fn doc_len_of(&self, doc: u32) -> u32 {
        self.doc_lens[doc as usize]
    }

    /// `ln(1 + (N - df + 0.5) / (df + 0.5))`
    pub fn idf(&self, term: &str) -> f64 {
        idf(self.num_passages() as f64, self.df(term) as f64)
    }

    fn term_weight(&self, idf: f64, tf: u32, doc_len: u32) -> f64 {
        let Bm25Params { k1, b } = self.params;
        let tf = tf as f64;
        let norm = 1.0 - b + b * doc_len as f64 / self.avgdl;
        idf * tf * (k1 + 1.0) / (tf + k1 * norm)
    }

    /// BM25 score of one passage. Terms missing from the index contribute 0,
    /// as does an unknown passage id.
    pub fn bm25_score<S: AsRef<str>>(&self, query_terms: &[S], passage_id: &str) -> f64 {
        self.weighted_score(&WeightedQuery::from_tokens(query_terms), passage_id)
    }

    /// Score where each term's BM25 contribution is multiplied by its weight.
    pub fn weighted_score(&self, query: &WeightedQuery, passage_id: &str) -> f64 {
        let Some(&doc) = self.doc_by_id.get(passage_id) else {
            return 0.0;
        };
        let doc_len = self.doc_lens[doc as usize];
        let mut score = 0.0;
        for (term, weight) in query.terms() {
            let tf = self.tf(term, passage_id);
            if tf > 0 {
                score += weight * self.term_weight(self.idf(term), tf, doc_len);
            }
        }
        score
    }

    /// Top-`k` passages for a free-text query. Passages scoring 0 are left
    /// out, so the list may be shorter than `k`.
    pub fn search(&self, question_id: &str, query_text: &str, k: usize) -> RankedList {
        self.search_weighted(question_id, &WeightedQuery::from_text(query_text), k)
    }

    pub fn search_weighted(
        &self,
        question_id: &str,
        query: &WeightedQuery,
        k: usize,
    ) -> RankedList {
        let tag = "bm25";
        if k == 0 || self.num_passages() == 0 {
            return RankedList::empty(question_id, tag);
        }
        let n = self.num_passages() as f64;
        let mut acc = vec![0.0f64; self.num_passages()];
        let mut touched = Vec::new();
        for (term, weight) in query.terms() {
            let Some(&t) = self.vocab.get(term) else {
                continue;
            };
            let postings = &self.postings[t as usize];
            let idf = idf(n, postings.len() as f64);
            for p in postings {
                let slot = &mut acc[p.doc as usize];
                if *slot == 0.0 {
                    touched.push(p.doc);
                }
                *slot += weight * self.term_weight(idf, p.tf, self.doc_lens[p.doc as usize]);
            }
        }
        touched.sort_unstable();
        touched.dedup();
        let mut scored: Vec<ScoredPassage> = touched
            .into_iter()
            .filter(|&d| acc[d as usize] > 0.0)
            .map(|d| ScoredPassage::new(self.doc_ids[d as usize].clone(), acc[d as usize]))
            .collect();
        if scored.len() > k {
            scored.select_nth_unstable_by(k - 1, canonical_order);
            scored.truncate(k);
        }
        RankedList::new(question_id, tag, scored)
    }

    /// Runs many queries in parallel. The result does not depend on the
    /// number of threads.
    pub fn search_batch<'q, I>(&self, run_name: &str, queries: I, k: usize) -> RunSet
    where
        I: IntoParallelIterator<Item = (&'q str, &'q str)>,
    {
        let lists: Vec<RankedList> = queries
            .into_par_iter()
            .map(|(qid, text)| {
                let mut list = self.search(qid, text, k);
                list.tag = run_name.to_string();
                list
            })
            .collect();
        let mut run = RunSet::new(run_name);
        for list in lists {
            // Repeated question ids keep the first list.
            let _ = run.insert(list);
        }
        run
    }
}

fn idf(n: f64, df: f64) -> f64 {
    (1.0 + (n - df + 0.5) / (df + 0.5)).ln()
}

fn mean_length(lens: &[u32]) -> f64 {
    if lens.is_empty() {
        return 0.0;
    }
    let total: u64 = lens.iter().map(|&l| l as u64).sum();
    total as f64 / lens.len() as f64
}
