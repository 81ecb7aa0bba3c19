//! Brute-force reference implementations and seeded random inputs shared by
//! the integration and acceptance tests. Nothing here calls into the
//! library's scoring code.

#![allow(dead_code)]

use std::collections::{BTreeMap, HashMap};
use std::path::PathBuf;

use gar::run::{RankedList, RunSet, ScoredPassage};
use gar::voting::{ReaderOutput, ReaderPassage, Span};
use gar::{Corpus, Passage};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    rand::SeedableRng::seed_from_u64(seed)
}

pub fn data_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data")
}

pub fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

// ---- tokenization ----

pub fn naive_tokens(s: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut cur = String::new();
    for c in s.chars() {
        if c.is_alphanumeric() {
            cur.extend(c.to_lowercase());
        } else if !cur.is_empty() {
            out.push(std::mem::take(&mut cur));
        }
    }
    if !cur.is_empty() {
        out.push(cur);
    }
    out
}

// ---- BM25 ----

/// Scores every document from scratch, one query token at a time.
pub fn bm25_oracle(docs: &[(String, String)], query: &str, k1: f64, b: f64) -> Vec<(String, f64)> {
    let toks: Vec<Vec<String>> = docs.iter().map(|(_, t)| naive_tokens(t)).collect();
    let n = docs.len() as f64;
    let avgdl = toks.iter().map(|t| t.len()).sum::<usize>() as f64 / n;
    let mut out = Vec::new();
    for (i, (id, _)) in docs.iter().enumerate() {
        let dl = toks[i].len() as f64;
        let mut score = 0.0;
        for q in naive_tokens(query) {
            let df = toks.iter().filter(|d| d.contains(&q)).count() as f64;
            let tf = toks[i].iter().filter(|t| **t == q).count() as f64;
            if tf == 0.0 {
                continue;
            }
            let idf = (1.0 + (n - df + 0.5) / (df + 0.5)).ln();
            score += idf * tf * (k1 + 1.0) / (tf + k1 * (1.0 - b + b * dl / avgdl));
        }
        if score > 0.0 {
            out.push((id.clone(), score));
        }
    }
    out.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then_with(|| a.0.cmp(&b.0)));
    out
}

pub fn random_word(rng: &mut ChaCha8Rng, vocab: usize) -> String {
    format!("w{}", rng.gen_range(0..vocab))
}

pub fn random_text(rng: &mut ChaCha8Rng, vocab: usize, max_len: usize) -> String {
    let n = rng.gen_range(1..=max_len);
    (0..n)
        .map(|_| random_word(rng, vocab))
        .collect::<Vec<_>>()
        .join(" ")
}

/// Up to `max_docs` passages with short titles and bodies over a small vocabulary.
pub fn random_corpus(rng: &mut ChaCha8Rng, max_docs: usize) -> Corpus {
    let n = rng.gen_range(1..=max_docs);
    let vocab = rng.gen_range(5..60);
    let passages = (0..n).map(|i| {
        let title = if rng.gen_bool(0.5) {
            random_text(rng, vocab, 3)
        } else {
            String::new()
        };
        Passage::new(format!("p{i:03}"), title, random_text(rng, vocab, 30))
    });
    Corpus::from_passages(passages.collect::<Vec<_>>()).unwrap()
}

pub fn corpus_texts(corpus: &Corpus) -> Vec<(String, String)> {
    corpus
        .iter()
        .map(|p| (p.id.clone(), p.full_text()))
        .collect()
}

// ---- fusion ----

/// Random runs over a shared passage pool. Scores are arbitrary, so the
/// list order is whatever the scores say.
pub fn random_runs(
    rng: &mut ChaCha8Rng,
    qid: &str,
    max_runs: usize,
    max_len: usize,
) -> Vec<RunSet> {
    let pool: Vec<String> = (0..2 * max_len).map(|i| format!("d{i:02}")).collect();
    let n_runs = rng.gen_range(1..=max_runs);
    (0..n_runs)
        .map(|r| {
            let len = rng.gen_range(0..=max_len);
            let mut ids = pool.clone();
            ids.shuffle(rng);
            let entries = ids
                .into_iter()
                .take(len)
                .map(|id| ScoredPassage::new(id, rng.gen_range(-5.0..5.0)))
                .collect();
            let list = RankedList::new(qid, format!("r{r}"), entries);
            RunSet::from_lists(format!("r{r}"), [list]).unwrap()
        })
        .collect()
}

pub fn ranked_ids(run: &RunSet, qid: &str) -> Vec<String> {
    run.get(qid)
        .map(|l| l.passage_ids().map(String::from).collect())
        .unwrap_or_default()
}

/// Round robin by literally walking rank positions.
pub fn round_robin_oracle(lists: &[Vec<String>], k: usize) -> Vec<String> {
    let mut out: Vec<String> = Vec::new();
    let mut rank = 0;
    while out.len() < k && lists.iter().any(|l| rank < l.len()) {
        for l in lists {
            if out.len() == k {
                break;
            }
            if let Some(id) = l.get(rank) {
                if !out.contains(id) {
                    out.push(id.clone());
                }
            }
        }
        rank += 1;
    }
    out
}

pub fn rrf_oracle(lists: &[Vec<String>], c: f64) -> BTreeMap<String, f64> {
    let mut scores = BTreeMap::new();
    for l in lists {
        for (i, id) in l.iter().enumerate() {
            *scores.entry(id.clone()).or_insert(0.0) += 1.0 / (c + (i + 1) as f64);
        }
    }
    scores
}

// ---- ROUGE ----

fn ngrams(t: &[String], n: usize) -> Vec<Vec<String>> {
    if t.len() < n {
        return Vec::new();
    }
    (0..=t.len() - n).map(|i| t[i..i + n].to_vec()).collect()
}

fn f1(overlap: usize, c: usize, r: usize) -> f64 {
    if overlap == 0 {
        return 0.0;
    }
    let p = overlap as f64 / c as f64;
    let rec = overlap as f64 / r as f64;
    2.0 * p * rec / (p + rec)
}

/// Clipped n-gram overlap by removing matched grams from a pool.
pub fn rouge_n_oracle(c: &[String], r: &[String], n: usize) -> f64 {
    let cg = ngrams(c, n);
    let mut pool = ngrams(r, n);
    let mut overlap = 0;
    for g in &cg {
        if let Some(pos) = pool.iter().position(|x| x == g) {
            pool.swap_remove(pos);
            overlap += 1;
        }
    }
    f1(overlap, cg.len(), ngrams(r, n).len())
}

fn lcs(a: &[String], b: &[String], memo: &mut HashMap<(usize, usize), usize>) -> usize {
    if a.is_empty() || b.is_empty() {
        return 0;
    }
    let key = (a.len(), b.len());
    if let Some(&v) = memo.get(&key) {
        return v;
    }
    let v = if a[0] == b[0] {
        1 + lcs(&a[1..], &b[1..], memo)
    } else {
        lcs(&a[1..], b, memo).max(lcs(a, &b[1..], memo))
    };
    memo.insert(key, v);
    v
}

pub fn rouge_l_oracle(c: &[String], r: &[String]) -> f64 {
    f1(lcs(c, r, &mut HashMap::new()), c.len(), r.len())
}

// ---- voting ----

pub fn random_reader_output(rng: &mut ChaCha8Rng, qid: &str) -> ReaderOutput {
    let surfaces = [
        "Paris",
        "paris",
        "the Paris",
        "Lyon",
        "Nice",
        "Marseille",
        "lyon.",
    ];
    let passages = (0..rng.gen_range(1..=6))
        .map(|i| ReaderPassage {
            passage_id: format!("p{i}"),
            score: rng.gen_range(-4.0..4.0),
            spans: (0..rng.gen_range(1..=8))
                .map(|_| Span {
                    text: surfaces.choose(rng).unwrap().to_string(),
                    score: rng.gen_range(-6.0..6.0),
                })
                .collect(),
        })
        .collect();
    ReaderOutput {
        question_id: qid.into(),
        passages,
    }
}

/// Span probabilities summed by key, computed with plain loops.
pub fn voting_oracle(
    out: &ReaderOutput,
    n: usize,
    key: impl Fn(&str) -> String,
) -> BTreeMap<String, f64> {
    let dz: f64 = out.passages.iter().map(|p| p.score.exp()).sum();
    let mut totals = BTreeMap::new();
    for p in &out.passages {
        let mut spans = p.spans.clone();
        spans.sort_by(|a, b| b.score.partial_cmp(&a.score).unwrap());
        spans.truncate(n);
        let sz: f64 = spans.iter().map(|s| s.score.exp()).sum();
        for s in &spans {
            *totals.entry(key(&s.text)).or_insert(0.0) += p.score.exp() / dz * s.score.exp() / sz;
        }
    }
    totals
}

// ---- RM3 ----

/// RM3 term weights from brute-force BM25 over raw texts.
pub fn rm3_oracle(
    docs: &[(String, String)],
    query: &str,
    fb_docs: usize,
    fb_terms: usize,
    alpha: f64,
) -> BTreeMap<String, f64> {
    let q = naive_tokens(query);
    let mut orig: BTreeMap<String, f64> = BTreeMap::new();
    for t in &q {
        *orig.entry(t.clone()).or_insert(0.0) += 1.0 / q.len() as f64;
    }
    let ranked = bm25_oracle(docs, query, 0.9, 0.4);
    let top: Vec<_> = ranked.into_iter().take(fb_docs).collect();
    if top.is_empty() {
        return orig;
    }
    let z: f64 = top.iter().map(|(_, s)| s.exp()).sum();
    let mut rel: BTreeMap<String, f64> = BTreeMap::new();
    for (id, s) in &top {
        let text = &docs.iter().find(|(d, _)| d == id).unwrap().1;
        let toks = naive_tokens(text);
        for t in &toks {
            *rel.entry(t.clone()).or_insert(0.0) += s.exp() / z / toks.len() as f64;
        }
    }
    let mut terms: Vec<(String, f64)> = rel.into_iter().collect();
    terms.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then_with(|| a.0.cmp(&b.0)));
    terms.truncate(fb_terms);
    let kept: f64 = terms.iter().map(|t| t.1).sum();
    let mut out: BTreeMap<String, f64> = orig.into_iter().map(|(t, w)| (t, alpha * w)).collect();
    for (t, w) in terms {
        *out.entry(t).or_insert(0.0) += (1.0 - alpha) * w / kept;
    }
    out.retain(|_, w| *w > 0.0);
    out
}
