use rayon::prelude::*;

use super::{join_references, ContextType, TargetRecord};
use crate::corpus::{Corpus, Passage, Question};
use crate::error::Result;
use crate::eval::{contains_run, normalized_tokens, passage_contains_answer};
use crate::index::InvertedIndex;
use crate::run::RankedList;

/// How many BM25 results are scanned for answer-bearing passages.
pub const DEFAULT_POSITIVE_DEPTH: usize = 100;

/// The answers themselves, in dataset order.
pub fn extract_answer_target(question: &Question) -> TargetRecord {
    TargetRecord {
        question_id: question.id.clone(),
        context_type: ContextType::Answer,
        source: question.text.clone(),
        reference: join_references(&question.answers).unwrap_or_default(),
    }
}

/// The question's BM25 top-`k`, narrowed to passages containing an answer.
pub fn find_positive_passages(
    corpus: &Corpus,
    index: &InvertedIndex,
    question: &Question,
    k: usize,
) -> Result<RankedList> {
    let retrieved = index.search(&question.id, &question.text, k);
    let mut positives = Vec::new();
    for entry in retrieved.entries() {
        if passage_contains_answer(corpus.lookup(&entry.passage_id)?, &question.answers) {
            positives.push(entry.passage_id.clone());
        }
    }
    Ok(retrieved.filtered(|e| positives.contains(&e.passage_id)))
}

/// Distinct titles of the positive passages, in rank order.
pub fn extract_title_target(
    corpus: &Corpus,
    index: &InvertedIndex,
    question: &Question,
    k: usize,
) -> Result<Option<TargetRecord>> {
    let positives = find_positive_passages(corpus, index, question, k)?;
    let mut titles: Vec<&str> = Vec::new();
    for id in positives.passage_ids() {
        let title = corpus.lookup(id)?.title.as_str();
        if !title.trim().is_empty() && !titles.contains(&title) {
            titles.push(title);
        }
    }
    Ok(join_references(titles).map(|reference| TargetRecord {
        question_id: question.id.clone(),
        context_type: ContextType::Title,
        source: question.text.clone(),
        reference,
    }))
}

/// For each distinct answer, the first sentence (positives in rank order,
/// sentences in text order) whose normalized tokens contain the answer's.
pub fn extract_sentence_target(
    question: &Question,
    positives: &[&Passage],
) -> Option<TargetRecord> {
    let sentences: Vec<(&str, Vec<String>)> = positives
        .iter()
        .flat_map(|p| split_sentences(&p.text))
        .map(|s| (s, normalized_tokens(s)))
        .collect();

    let mut answers: Vec<Vec<String>> = Vec::new();
    for answer in &question.answers {
        let tokens = normalized_tokens(answer);
        if !tokens.is_empty() && !answers.contains(&tokens) {
            answers.push(tokens);
        }
    }

    let mut chosen: Vec<&str> = Vec::new();
    for answer in &answers {
        if let Some((sentence, _)) = sentences
            .iter()
            .find(|(_, toks)| contains_run(toks, answer))
        {
            if !chosen.contains(sentence) {
                chosen.push(sentence);
            }
        }
    }
    join_references(chosen).map(|reference| TargetRecord {
        question_id: question.id.clone(),
        context_type: ContextType::Sentence,
        source: question.text.clone(),
        reference,
    })
}

/// Splits after '.', '!' or '?' when followed by whitespace or the end of
/// the text. Abbreviations are not special-cased.
pub fn split_sentences(text: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let mut start = 0;
    let mut chars = text.char_indices().peekable();
    while let Some((i, c)) = chars.next() {
        if matches!(c, '.' | '!' | '?') {
            let boundary = chars.peek().is_none_or(|&(_, next)| next.is_whitespace());
            if boundary {
                let end = i + c.len_utf8();
                out.push(text[start..end].trim());
                start = end;
            }
        }
    }
    out.push(text[start..].trim());
    out.retain(|s| !s.is_empty());
    out
}

/// Builds targets of one type for many questions. Questions without a
/// title or sentence target are skipped; output follows input order.
pub fn prepare_targets(
    corpus: &Corpus,
    index: &InvertedIndex,
    questions: &[Question],
    context_type: ContextType,
    k: usize,
) -> Result<Vec<TargetRecord>> {
    let records: Vec<Option<TargetRecord>> = questions
        .par_iter()
        .map(|q| -> Result<Option<TargetRecord>> {
            match context_type {
                ContextType::Answer => Ok(Some(extract_answer_target(q))),
                ContextType::Title => extract_title_target(corpus, index, q, k),
                ContextType::Sentence => {
                    let positives = find_positive_passages(corpus, index, q, k)?;
                    let passages = positives
                        .passage_ids()
                        .map(|id| corpus.lookup(id))
                        .collect::<Result<Vec<_>>>()?;
                    Ok(extract_sentence_target(q, &passages))
                }
            }
        })
        .collect::<Result<_>>()?;
    Ok(records.into_iter().flatten().collect())
}
