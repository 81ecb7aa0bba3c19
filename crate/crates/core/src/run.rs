//! Ranked lists, run sets and the TREC run format.
//!
//! A run file has one line per retrieved passage:
//!
//! ```text
//! qid Q0 docid rank score tag
//! ```
//!
//! Ranks are 1-based. On read, lists are put back into canonical order
//! (score descending, passage id ascending), so the rank column only needs
//! to be a positive integer.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashSet};
use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::jsonl;

#[derive(Debug, Clone, PartialEq)]
pub struct ScoredPassage {
    pub passage_id: String,
    pub score: f64,
}

impl ScoredPassage {
    pub fn new(passage_id: impl Into<String>, score: f64) -> Self {
        ScoredPassage {
            passage_id: passage_id.into(),
            score,
        }
    }
}

/// Canonical ordering: score descending, then passage id ascending.
pub fn canonical_order(a: &ScoredPassage, b: &ScoredPassage) -> Ordering {
    b.score
        .total_cmp(&a.score)
        .then_with(|| a.passage_id.cmp(&b.passage_id))
}

/// Retrieved passages for one question, best first.
#[derive(Debug, Clone, PartialEq)]
pub struct RankedList {
    pub question_id: String,
    pub tag: String,
    entries: Vec<ScoredPassage>,
}

impl RankedList {
    /// Sorts `entries` into canonical order. When a passage id repeats, its
    /// best-scoring occurrence is kept.
    pub fn new(
        question_id: impl Into<String>,
        tag: impl Into<String>,
        mut entries: Vec<ScoredPassage>,
    ) -> Self {
        entries.sort_by(canonical_order);
        let mut seen = HashSet::with_capacity(entries.len());
        entries.retain(|e| seen.insert(e.passage_id.clone()));
        RankedList {
            question_id: question_id.into(),
            tag: tag.into(),
            entries,
        }
    }

    pub fn empty(question_id: impl Into<String>, tag: impl Into<String>) -> Self {
        RankedList {
            question_id: question_id.into(),
            tag: tag.into(),
            entries: Vec::new(),
        }
    }

    pub fn entries(&self) -> &[ScoredPassage] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn passage_ids(&self) -> impl Iterator<Item = &str> {
        self.entries.iter().map(|e| e.passage_id.as_str())
    }

    pub fn truncate(&mut self, k: usize) {
        self.entries.truncate(k);
    }

    pub fn truncated(mut self, k: usize) -> Self {
        self.truncate(k);
        self
    }

    /// Keeps entries matching `keep`, preserving order.
    pub fn filtered(&self, mut keep: impl FnMut(&ScoredPassage) -> bool) -> Self {
        RankedList {
            question_id: self.question_id.clone(),
            tag: self.tag.clone(),
            entries: self.entries.iter().filter(|e| keep(e)).cloned().collect(),
        }
    }
}

/// A named collection of per-question ranked lists.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct RunSet {
    pub name: String,
    lists: BTreeMap<String, RankedList>,
}

impl RunSet {
    pub fn new(name: impl Into<String>) -> Self {
        RunSet {
            name: name.into(),
            lists: BTreeMap::new(),
        }
    }

    pub fn from_lists(
        name: impl Into<String>,
        lists: impl IntoIterator<Item = RankedList>,
    ) -> Result<Self> {
        let mut run = RunSet::new(name);
        for list in lists {
            run.insert(list)?;
        }
        Ok(run)
    }

    /// Adds a list; a second list for the same question is an error.
    pub fn insert(&mut self, list: RankedList) -> Result<()> {
        if self.lists.contains_key(&list.question_id) {
            return Err(Error::InvalidRecord {
                id: list.question_id,
                reason: format!("run {:?} already has a list for this question", self.name),
            });
        }
        self.lists.insert(list.question_id.clone(), list);
        Ok(())
    }

    pub fn get(&self, question_id: &str) -> Option<&RankedList> {
        self.lists.get(question_id)
    }

    pub fn question_ids(&self) -> impl Iterator<Item = &str> {
        self.lists.keys().map(String::as_str)
    }

    /// Lists ordered by question id.
    pub fn lists(&self) -> impl Iterator<Item = &RankedList> {
        self.lists.values()
    }

    pub fn len(&self) -> usize {
        self.lists.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lists.is_empty()
    }
}

fn sanitize_tag(tag: &str) -> String {
    let cleaned: String = tag
        .chars()
        .map(|c| if c.is_whitespace() { '_' } else { c })
        .collect();
    if cleaned.is_empty() {
        "run".to_string()
    } else {
        cleaned
    }
}

/// Writes a run in TREC format, questions in id order.
pub fn write_trec(path: &Path, run: &RunSet) -> Result<()> {
    let tag = sanitize_tag(&run.name);
    jsonl::write_with(path, |out| {
        for list in run.lists() {
            for (rank, entry) in list.entries().iter().enumerate() {
                writeln!(
                    out,
                    "{} Q0 {} {} {} {}",
                    list.question_id,
                    entry.passage_id,
                    rank + 1,
                    entry.score,
                    tag
                )?;
            }
        }
        Ok(())
    })
}

/// Reads a TREC run file. The run is named after the tag column, or the
/// file stem when the file is empty.
pub fn read_trec(path: &Path) -> Result<RunSet> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let fallback = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "run".into());
    parse_trec(path, BufReader::new(file), &fallback)
}

pub(crate) fn parse_trec(path: &Path, reader: impl BufRead, fallback_name: &str) -> Result<RunSet> {
    let mut name: Option<String> = None;
    let mut grouped: BTreeMap<String, Vec<ScoredPassage>> = BTreeMap::new();
    let mut seen: HashSet<(String, String)> = HashSet::new();
    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 6 {
            return Err(Error::malformed(
                path,
                line_no,
                format!("expected 6 fields, found {}", fields.len()),
            ));
        }
        let (qid, docid) = (fields[0], fields[2]);
        match fields[3].parse::<u64>() {
            Ok(r) if r >= 1 => {}
            _ => {
                return Err(Error::malformed(
                    path,
                    line_no,
                    format!("bad rank {:?}", fields[3]),
                ))
            }
        }
        let score: f64 = fields[4]
            .parse()
            .ok()
            .filter(|s: &f64| s.is_finite())
            .ok_or_else(|| Error::malformed(path, line_no, format!("bad score {:?}", fields[4])))?;
        if !seen.insert((qid.to_string(), docid.to_string())) {
            return Err(Error::malformed(
                path,
                line_no,
                format!("passage {docid:?} listed twice for question {qid:?}"),
            ));
        }
        name.get_or_insert_with(|| fields[5].to_string());
        grouped
            .entry(qid.to_string())
            .or_default()
            .push(ScoredPassage::new(docid, score));
    }
    let name = name.unwrap_or_else(|| fallback_name.to_string());
    let mut run = RunSet::new(name.clone());
    for (qid, entries) in grouped {
        run.insert(RankedList::new(qid, name.clone(), entries))?;
    }
    Ok(run)
}
