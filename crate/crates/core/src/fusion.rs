//! Combining ranked lists from several retrieval sources.
//!
//! Round-robin interleaving takes the same number of passages from the top
//! of each source. Reciprocal rank fusion scores a passage by
//! `sum over sources of 1 / (c + rank)`. Both read only ranks, never the
//! source scores, which are not comparable across retrievers.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::run::{RankedList, RunSet, ScoredPassage};

pub const DEFAULT_RRF_C: f64 = 60.0;

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FusionStrategy {
    #[default]
    RoundRobin,
    Rrf {
        c: f64,
    },
}

impl FusionStrategy {
    pub fn rrf() -> Self {
        FusionStrategy::Rrf { c: DEFAULT_RRF_C }
    }

    pub fn name(&self) -> &'static str {
        match self {
            FusionStrategy::RoundRobin => "round_robin",
            FusionStrategy::Rrf { .. } => "rrf",
        }
    }
}

impl fmt::Display for FusionStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FusionStrategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s {
            "round_robin" => Ok(FusionStrategy::RoundRobin),
            "rrf" => Ok(FusionStrategy::rrf()),
            other => Err(Error::InvalidArgument(format!(
                "unknown fusion strategy {other:?} (expected round_robin or rrf)"
            ))),
        }
    }
}

fn lists_for<'a>(runs: &'a [RunSet], question_id: &str) -> Vec<&'a RankedList> {
    runs.iter().filter_map(|r| r.get(question_id)).collect()
}

/// Interleaves the runs' lists for one question: round `r` takes every
/// run's rank-`r` passage in run order, skipping passages already taken.
/// Output scores are `k - position`.
pub fn round_robin_fuse(runs: &[RunSet], question_id: &str, k: usize) -> RankedList {
    let lists = lists_for(runs, question_id);
    let longest = lists.iter().map(|l| l.len()).max().unwrap_or(0);
    let mut taken: HashSet<&str> = HashSet::new();
    let mut order: Vec<&str> = Vec::new();
    'rounds: for round in 0..longest {
        for list in &lists {
            if order.len() == k {
                break 'rounds;
            }
            if let Some(entry) = list.entries().get(round) {
                if taken.insert(&entry.passage_id) {
                    order.push(&entry.passage_id);
                }
            }
        }
    }
    let entries = order
        .into_iter()
        .enumerate()
        .map(|(pos, id)| ScoredPassage::new(id, (k - pos) as f64))
        .collect();
    RankedList::new(question_id, "round_robin", entries)
}

/// Reciprocal rank fusion with constant `c` (ranks start at 1). Ties go to
/// the smaller passage id.
pub fn rrf_fuse(runs: &[RunSet], question_id: &str, k: usize, c: f64) -> RankedList {
    let mut scores: HashMap<&str, f64> = HashMap::new();
    for list in lists_for(runs, question_id) {
        for (rank, id) in list.passage_ids().enumerate() {
            *scores.entry(id).or_insert(0.0) += 1.0 / (c + (rank + 1) as f64);
        }
    }
    let entries = scores
        .into_iter()
        .map(|(id, s)| ScoredPassage::new(id, s))
        .collect();
    RankedList::new(question_id, "rrf", entries).truncated(k)
}

/// Fuses every question that appears in at least one run.
pub fn fuse_all(runs: &[RunSet], strategy: FusionStrategy, k: usize) -> RunSet {
    let question_ids: BTreeSet<&str> = runs.iter().flat_map(|r| r.question_ids()).collect();
    let sources: Vec<&str> = runs.iter().map(|r| r.name.as_str()).collect();
    let name = format!("{}({})", strategy.name(), sources.join("+"));
    let lists: Vec<RankedList> = question_ids
        .into_par_iter()
        .map(|qid| {
            let mut list = match strategy {
                FusionStrategy::RoundRobin => round_robin_fuse(runs, qid, k),
                FusionStrategy::Rrf { c } => rrf_fuse(runs, qid, k, c),
            };
            list.tag = name.clone();
            list
        })
        .collect();
    RunSet::from_lists(name, lists).expect("question ids are unique")
}
