//! On-disk index layout: a directory holding `manifest.json` and `postings.json`.

use std::collections::HashMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::bm25::{Bm25Params, InvertedIndex, Posting};
use crate::error::{Error, Result};
use crate::jsonl;

const FORMAT: &str = "gar-bm25-index";
const MAJOR_VERSION: u32 = 1;
const MINOR_VERSION: u32 = 0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub format: String,
    pub version: String,
    pub num_passages: usize,
    pub num_terms: usize,
    pub avgdl: f64,
    pub params: Bm25Params,
}

#[derive(Serialize, Deserialize)]
struct Postings {
    doc_ids: Vec<String>,
    doc_lens: Vec<u32>,
    terms: Vec<String>,
    /// Per term, flattened `[doc, tf, doc, tf, ...]`.
    postings: Vec<Vec<u32>>,
}

impl InvertedIndex {
    pub fn save(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let data = Postings {
            doc_ids: self.doc_ids.clone(),
            doc_lens: self.doc_lens.clone(),
            terms: self.terms.clone(),
            postings: self
                .postings
                .iter()
                .map(|list| list.iter().flat_map(|p| [p.doc, p.tf]).collect())
                .collect(),
        };
        let manifest = Manifest {
            format: FORMAT.to_string(),
            version: format!("{MAJOR_VERSION}.{MINOR_VERSION}"),
            num_passages: self.num_passages(),
            num_terms: self.num_terms(),
            avgdl: self.avgdl,
            params: self.params,
        };
        write_json(&dir.join("postings.json"), &data)?;
        // Manifest last: its presence marks a complete index.
        write_json(&dir.join("manifest.json"), &manifest)
    }

    pub fn load(dir: &Path) -> Result<Self> {
        let manifest = read_manifest(dir)?;
        let data: Postings = read_json(&dir.join("postings.json"))?;
        let n = data.doc_ids.len();
        if data.doc_lens.len() != n || data.terms.len() != data.postings.len() {
            return Err(Error::IndexFormat("inconsistent array lengths".into()));
        }
        if manifest.num_passages != n || manifest.num_terms != data.terms.len() {
            return Err(Error::IndexFormat(
                "manifest does not match postings".into(),
            ));
        }

        let mut forward: Vec<Vec<(u32, u32)>> = vec![Vec::new(); n];
        let mut postings = Vec::with_capacity(data.postings.len());
        for (term_id, flat) in data.postings.iter().enumerate() {
            if flat.len() % 2 != 0 {
                return Err(Error::IndexFormat(format!(
                    "odd postings length for term {term_id}"
                )));
            }
            let list: Vec<Posting> = flat
                .chunks_exact(2)
                .map(|c| Posting {
                    doc: c[0],
                    tf: c[1],
                })
                .collect();
            for p in &list {
                let slot = forward.get_mut(p.doc as usize).ok_or_else(|| {
                    Error::IndexFormat(format!("posting to unknown passage {}", p.doc))
                })?;
                slot.push((term_id as u32, p.tf));
            }
            postings.push(list);
        }
        for (doc, fwd) in forward.iter().enumerate() {
            let total: u64 = fwd.iter().map(|&(_, tf)| tf as u64).sum();
            if total != data.doc_lens[doc] as u64 {
                return Err(Error::IndexFormat(format!(
                    "term frequencies of passage {:?} do not sum to its length",
                    data.doc_ids[doc]
                )));
            }
        }

        let vocab: HashMap<String, u32> = data
            .terms
            .iter()
            .enumerate()
            .map(|(i, t)| (t.clone(), i as u32))
            .collect();
        let doc_by_id: HashMap<String, u32> = data
            .doc_ids
            .iter()
            .enumerate()
            .map(|(i, id)| (id.clone(), i as u32))
            .collect();
        Ok(InvertedIndex {
            params: manifest.params,
            doc_ids: data.doc_ids,
            doc_lens: data.doc_lens,
            doc_by_id,
            terms: data.terms,
            vocab,
            postings,
            forward,
            avgdl: manifest.avgdl,
        })
    }
}

/// Reads and version-checks an index manifest.
pub fn read_manifest(dir: &Path) -> Result<Manifest> {
    let manifest: Manifest = read_json(&dir.join("manifest.json"))?;
    if manifest.format != FORMAT {
        return Err(Error::IndexFormat(format!(
            "unknown format {:?}",
            manifest.format
        )));
    }
    let major = manifest
        .version
        .split('.')
        .next()
        .and_then(|m| m.parse::<u32>().ok());
    if major != Some(MAJOR_VERSION) {
        return Err(Error::IndexFormat(format!(
            "unsupported index version {} (expected {MAJOR_VERSION}.x)",
            manifest.version
        )));
    }
    Ok(manifest)
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    jsonl::write_with(path, |out| {
        serde_json::to_writer(&mut *out, value).map_err(std::io::Error::other)
    })
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_slice(&bytes)
        .map_err(|e| Error::IndexFormat(format!("{}: {e}", path.display())))
}
