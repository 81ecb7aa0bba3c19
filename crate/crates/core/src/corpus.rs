//! Passage collections and QA datasets.

use std::collections::HashMap;
use std::collections::HashSet;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::jsonl;

/// One retrieval unit.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Passage {
    pub id: String,
    /// Page title; empty means no title is available.
    pub title: String,
    pub text: String,
}

impl Passage {
    pub fn new(id: impl Into<String>, title: impl Into<String>, text: impl Into<String>) -> Self {
        Passage {
            id: id.into(),
            title: title.into(),
            text: text.into(),
        }
    }

    /// Title followed by body, the text that gets indexed and searched for answers.
    pub fn full_text(&self) -> String {
        if self.title.is_empty() {
            self.text.clone()
        } else {
            format!("{} {}", self.title, self.text)
        }
    }

    fn validate(&self) -> Result<()> {
        if self.id.is_empty() {
            return Err(Error::InvalidRecord {
                id: self.id.clone(),
                reason: "empty id".into(),
            });
        }
        if self.text.trim().is_empty() {
            return Err(Error::InvalidRecord {
                id: self.id.clone(),
                reason: "empty passage text".into(),
            });
        }
        Ok(())
    }
}

/// A query with its reference answers.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Question {
    pub id: String,
    pub text: String,
    pub answers: Vec<String>,
}

impl Question {
    pub fn new<S: Into<String>>(
        id: impl Into<String>,
        text: impl Into<String>,
        answers: impl IntoIterator<Item = S>,
    ) -> Self {
        Question {
            id: id.into(),
            text: text.into(),
            answers: answers.into_iter().map(Into::into).collect(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.answers.is_empty() {
            return Err(Error::EmptyAnswers(self.id.clone()));
        }
        if self.answers.iter().any(|a| a.trim().is_empty()) {
            return Err(Error::InvalidRecord {
                id: self.id.clone(),
                reason: "blank answer string".into(),
            });
        }
        Ok(())
    }
}

/// Immutable passage store with id lookup.
#[derive(Debug, Clone, Default)]
pub struct Corpus {
    passages: Vec<Passage>,
    by_id: HashMap<String, usize>,
}

impl Corpus {
    pub fn from_passages(passages: impl IntoIterator<Item = Passage>) -> Result<Self> {
        let mut corpus = Corpus::default();
        for passage in passages {
            passage.validate()?;
            corpus.insert(passage)?;
        }
        Ok(corpus)
    }

    fn insert(&mut self, passage: Passage) -> Result<()> {
        if self.by_id.contains_key(&passage.id) {
            return Err(Error::DuplicatePassage(passage.id));
        }
        self.by_id.insert(passage.id.clone(), self.passages.len());
        self.passages.push(passage);
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.passages.len()
    }

    pub fn is_empty(&self) -> bool {
        self.passages.is_empty()
    }

    pub fn get(&self, id: &str) -> Option<&Passage> {
        self.by_id.get(id).map(|&i| &self.passages[i])
    }

    /// Like [`Corpus::get`] but an unknown id is an error.
    pub fn lookup(&self, id: &str) -> Result<&Passage> {
        self.get(id)
            .ok_or_else(|| Error::UnknownPassage(id.to_string()))
    }

    /// Passages in ingestion order.
    pub fn passages(&self) -> &[Passage] {
        &self.passages
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Passage> {
        self.passages.iter()
    }
}

/// Loads a passage file (one `{id, title, text}` object per line).
pub fn load_corpus(path: &Path) -> Result<Corpus> {
    let mut corpus = Corpus::default();
    for (line, passage) in jsonl::read::<Passage>(path)? {
        passage
            .validate()
            .map_err(|e| Error::malformed(path, line, e))?;
        corpus.insert(passage)?;
    }
    Ok(corpus)
}

pub fn save_corpus(path: &Path, corpus: &Corpus) -> Result<()> {
    jsonl::write(path, corpus.passages())
}

/// Loads a question file (one `{id, text, answers}` object per line), keeping file order.
pub fn load_questions(path: &Path) -> Result<Vec<Question>> {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for (line, question) in jsonl::read::<Question>(path)? {
        match question.validate() {
            Ok(()) => {}
            Err(e @ Error::EmptyAnswers(_)) => return Err(e),
            Err(e) => return Err(Error::malformed(path, line, e)),
        }
        if !seen.insert(question.id.clone()) {
            return Err(Error::DuplicateQuestion(question.id));
        }
        out.push(question);
    }
    Ok(out)
}

pub fn save_questions(path: &Path, questions: &[Question]) -> Result<()> {
    jsonl::write(path, questions)
}
