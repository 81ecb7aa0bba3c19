//! Retrieval evaluation reports in JSON and TSV.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::Serialize;

use crate::corpus::{Corpus, Question};
use crate::error::Result;
use crate::eval::{grouped_metric, topk_accuracy, Labeler};
use crate::run::RunSet;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GroupReport {
    pub count: usize,
    pub accuracy: BTreeMap<usize, f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QuestionDetail {
    pub question_id: String,
    pub label: String,
    pub hit_depth: Option<usize>,
}

/// Accuracy of one run overall, per group and per question.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub run: String,
    pub num_questions: usize,
    pub accuracy: BTreeMap<usize, f64>,
    pub groups: BTreeMap<String, GroupReport>,
    pub questions: Vec<QuestionDetail>,
}

impl RunReport {
    pub fn build(
        run: &RunSet,
        questions: &[Question],
        corpus: &Corpus,
        ks: &[usize],
        labeler: &Labeler,
    ) -> Result<Self> {
        let report = topk_accuracy(run, questions, corpus, ks)?;
        let mut groups: BTreeMap<String, GroupReport> = BTreeMap::new();
        for &k in ks {
            for (label, stat) in grouped_metric(questions, &report.hits_at(k), labeler)? {
                groups
                    .entry(label)
                    .or_insert_with(|| GroupReport {
                        count: stat.count,
                        accuracy: BTreeMap::new(),
                    })
                    .accuracy
                    .insert(k, stat.mean);
            }
        }
        let questions = questions
            .iter()
            .zip(&report.hit_depths)
            .map(|(q, h)| {
                Ok(QuestionDetail {
                    question_id: q.id.clone(),
                    label: labeler.label(q)?,
                    hit_depth: h.depth,
                })
            })
            .collect::<Result<_>>()?;
        Ok(RunReport {
            run: run.name.clone(),
            num_questions: report.hit_depths.len(),
            accuracy: report.accuracy,
            groups,
            questions,
        })
    }

    /// Two tables: overall accuracy, then accuracy per group.
    pub fn to_tsv(&self) -> String {
        let ks: Vec<usize> = self.accuracy.keys().copied().collect();
        let header: String = ks.iter().map(|k| format!("\ttop{k}")).collect();
        let mut out = String::new();
        let _ = writeln!(out, "run\tquestions{header}");
        let _ = write!(out, "{}\t{}", self.run, self.num_questions);
        for k in &ks {
            let _ = write!(out, "\t{:.4}", self.accuracy[k]);
        }
        out.push('\n');
        out.push('\n');
        let _ = writeln!(out, "group\tcount{header}");
        for (label, g) in &self.groups {
            let _ = write!(out, "{label}\t{}", g.count);
            for k in &ks {
                let _ = write!(out, "\t{:.4}", g.accuracy.get(k).copied().unwrap_or(0.0));
            }
            out.push('\n');
        }
        out
    }
}

/// Overall accuracy of several runs as one TSV table.
pub fn summary_tsv(reports: &[RunReport]) -> String {
    let Some(first) = reports.first() else {
        return String::new();
    };
    let ks: Vec<usize> = first.accuracy.keys().copied().collect();
    let mut out = String::from("run");
    for k in &ks {
        let _ = write!(out, "\ttop{k}");
    }
    out.push('\n');
    for r in reports {
        out.push_str(&r.run);
        for k in &ks {
            let _ = write!(out, "\t{:.4}", r.accuracy.get(k).copied().unwrap_or(0.0));
        }
        out.push('\n');
    }
    out
}
