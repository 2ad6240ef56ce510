//! Document ingestion: a directory of `<id>.txt` bodies joined with a
//! line-delimited JSON metadata file.

use std::collections::{BTreeMap, HashSet};
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Bibliographic record for one document.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct DocumentMeta {
    pub id: String,
    #[serde(default)]
    pub title: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub author: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub advisor: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub department: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub year: Option<i32>,
    #[serde(default, rename = "abstract", skip_serializing_if = "Option::is_none")]
    pub abstract_text: Option<String>,
    #[serde(default)]
    pub keywords: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subject: Option<String>,
}

impl DocumentMeta {
    pub fn new(id: impl Into<String>) -> Self {
        Self {
            id: id.into(),
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Document {
    pub meta: DocumentMeta,
    pub text: String,
}

impl Document {
    pub fn id(&self) -> &str {
        &self.meta.id
    }

    /// Metadata fields joined by single spaces in the order title, abstract,
    /// keywords, subject, author, advisor, department. Absent or empty fields
    /// are skipped.
    pub fn bibliographic_text(&self) -> String {
        bibliographic_text(&self.meta)
    }
}

pub fn bibliographic_text(meta: &DocumentMeta) -> String {
    let mut parts: Vec<&str> = Vec::new();
    parts.push(&meta.title);
    if let Some(a) = &meta.abstract_text {
        parts.push(a);
    }
    parts.extend(meta.keywords.iter().map(String::as_str));
    parts.extend(
        [&meta.subject, &meta.author, &meta.advisor, &meta.department]
            .into_iter()
            .flatten()
            .map(String::as_str),
    );
    parts
        .into_iter()
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .collect::<Vec<_>>()
        .join(" ")
}

/// Immutable, id-sorted document collection.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Corpus {
    documents: Vec<Document>,
}

impl Corpus {
    /// Builds a corpus from arbitrary documents. Ids must be non-empty and
    /// unique; the result is sorted by id.
    pub fn from_documents(mut documents: Vec<Document>) -> Result<Self> {
        let mut seen = HashSet::new();
        for doc in &documents {
            if doc.meta.id.is_empty() {
                return Err(Error::Data("document with empty id".into()));
            }
            if !seen.insert(doc.meta.id.as_str()) {
                return Err(Error::DuplicateId(doc.meta.id.clone()));
            }
        }
        documents.sort_by(|a, b| a.meta.id.cmp(&b.meta.id));
        Ok(Self { documents })
    }

    pub fn documents(&self) -> &[Document] {
        &self.documents
    }

    pub fn len(&self) -> usize {
        self.documents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.documents.is_empty()
    }

    pub fn ids(&self) -> impl Iterator<Item = &str> {
        self.documents.iter().map(Document::id)
    }

    pub fn position(&self, id: &str) -> Option<usize> {
        self.documents
            .binary_search_by(|d| d.meta.id.as_str().cmp(id))
            .ok()
    }
}

/// Result of [`load_corpus`]: the joined corpus plus the ids that only one
/// of the two sources knew about.
#[derive(Debug, Clone)]
pub struct LoadedCorpus {
    pub corpus: Corpus,
    pub text_only: Vec<String>,
    pub meta_only: Vec<String>,
}

/// Reads `<id>.txt` files from `text_dir` and one JSON record per line from
/// `metadata_file`, keeping the documents present in both.
pub fn load_corpus(text_dir: &Path, metadata_file: &Path) -> Result<LoadedCorpus> {
    let texts = read_text_dir(text_dir)?;
    let metas = read_metadata(metadata_file)?;

    let mut documents = Vec::new();
    let mut meta_only = Vec::new();
    for (id, meta) in metas {
        match texts.get(&id) {
            Some(text) => documents.push(Document {
                meta,
                text: text.clone(),
            }),
            None => meta_only.push(id),
        }
    }
    let text_only: Vec<String> = texts
        .keys()
        .filter(|id| documents.binary_search_by(|d| d.meta.id.cmp(id)).is_err())
        .cloned()
        .collect();

    if !text_only.is_empty() {
        log::warn!(
            "{} text file(s) without metadata: {}",
            text_only.len(),
            text_only.join(", ")
        );
    }
    if !meta_only.is_empty() {
        log::warn!(
            "{} metadata record(s) without text: {}",
            meta_only.len(),
            meta_only.join(", ")
        );
    }

    // BTreeMap iteration already yields ascending ids.
    Ok(LoadedCorpus {
        corpus: Corpus { documents },
        text_only,
        meta_only,
    })
}

fn read_text_dir(dir: &Path) -> Result<BTreeMap<String, String>> {
    let entries = fs::read_dir(dir).map_err(|e| Error::io(dir, e))?;
    let mut texts = BTreeMap::new();
    for entry in entries {
        let entry = entry.map_err(|e| Error::io(dir, e))?;
        let path = entry.path();
        if path.extension().and_then(|e| e.to_str()) != Some("txt") || !path.is_file() {
            continue;
        }
        let Some(id) = path.file_stem().and_then(|s| s.to_str()) else {
            continue;
        };
        let text = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
        texts.insert(id.to_string(), text);
    }
    Ok(texts)
}

fn read_metadata(path: &Path) -> Result<BTreeMap<String, DocumentMeta>> {
    let raw = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut metas = BTreeMap::new();
    for (i, line) in raw.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let meta: DocumentMeta =
            serde_json::from_str(line).map_err(|e| Error::MalformedMetadata {
                path: path.to_path_buf(),
                line: i + 1,
                message: e.to_string(),
            })?;
        if meta.id.is_empty() {
            return Err(Error::MalformedMetadata {
                path: path.to_path_buf(),
                line: i + 1,
                message: "empty id".into(),
            });
        }
        if metas.contains_key(&meta.id) {
            return Err(Error::DuplicateId(meta.id));
        }
        metas.insert(meta.id.clone(), meta);
    }
    Ok(metas)
}

/// Writes metadata records in the format [`load_corpus`] reads.
pub fn write_metadata<'a>(
    path: &Path,
    records: impl IntoIterator<Item = &'a DocumentMeta>,
) -> Result<()> {
    let mut out = String::new();
    for meta in records {
        out.push_str(&serde_json::to_string(meta)?);
        out.push('\n');
    }
    fs::write(path, out).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use tempfile::TempDir;

    fn fixture(texts: &[(&str, &str)], meta_lines: &[&str]) -> TempDir {
        let dir = TempDir::new().unwrap();
        let text_dir = dir.path().join("texts");
        fs::create_dir(&text_dir).unwrap();
        for (id, body) in texts {
            fs::write(text_dir.join(format!("{id}.txt")), body).unwrap();
        }
        fs::write(dir.path().join("meta.jsonl"), meta_lines.join("\n")).unwrap();
        dir
    }

    fn load(dir: &TempDir) -> Result<LoadedCorpus> {
        load_corpus(&dir.path().join("texts"), &dir.path().join("meta.jsonl"))
    }

    #[test]
    fn joins_and_sorts_by_id() {
        let dir = fixture(
            &[("b", "second"), ("a", "first")],
            &[r#"{"id":"b","title":"B"}"#, r#"{"id":"a","title":"A"}"#],
        );
        let loaded = load(&dir).unwrap();
        let ids: Vec<_> = loaded.corpus.ids().collect();
        assert_eq!(ids, ["a", "b"]);
        assert_eq!(loaded.corpus.documents()[0].text, "first");
        assert!(loaded.text_only.is_empty() && loaded.meta_only.is_empty());
    }

    #[test]
    fn missing_advisor_is_accepted() {
        let dir = fixture(&[("a", "x")], &[r#"{"id":"a","title":"T","author":"Z"}"#]);
        let loaded = load(&dir).unwrap();
        assert_eq!(loaded.corpus.len(), 1);
        assert_eq!(loaded.corpus.documents()[0].meta.advisor, None);
    }

    #[test]
    fn reports_one_sided_ids() {
        let dir = fixture(
            &[("a", "x"), ("c", "y")],
            &[r#"{"id":"a"}"#, r#"{"id":"b"}"#],
        );
        let loaded = load(&dir).unwrap();
        assert_eq!(loaded.corpus.ids().collect::<Vec<_>>(), ["a"]);
        assert_eq!(loaded.text_only, ["c"]);
        assert_eq!(loaded.meta_only, ["b"]);
    }

    #[test]
    fn duplicate_id_is_fatal() {
        let dir = fixture(&[("a", "x")], &[r#"{"id":"a"}"#, r#"{"id":"a"}"#]);
        match load(&dir) {
            Err(Error::DuplicateId(id)) => assert_eq!(id, "a"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn malformed_line_names_line_number() {
        let dir = fixture(&[("a", "x")], &[r#"{"id":"a"}"#, "", "{not json"]);
        match load(&dir) {
            Err(Error::MalformedMetadata { line, .. }) => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn unreadable_directory_is_fatal() {
        let dir = TempDir::new().unwrap();
        let err = load_corpus(&dir.path().join("nope"), &dir.path().join("m")).unwrap_err();
        assert!(matches!(err, Error::Io { .. }));
    }

    #[test]
    fn text_is_preserved_exactly() {
        let body = "Line one\r\n  spaced\ttext é\n";
        let dir = fixture(&[("a", body)], &[r#"{"id":"a"}"#]);
        assert_eq!(load(&dir).unwrap().corpus.documents()[0].text, body);
    }

    #[test]
    fn bibliographic_field_order() {
        let mut m = DocumentMeta::new("x");
        m.title = "X".into();
        assert_eq!(bibliographic_text(&m), "X");

        let mut m = DocumentMeta::new("x");
        m.title = "A".into();
        m.abstract_text = Some("B".into());
        m.keywords = vec!["k1".into(), "k2".into()];
        assert_eq!(bibliographic_text(&m), "A B k1 k2");

        m.subject = Some("S".into());
        m.author = Some("Au".into());
        m.advisor = Some("Ad".into());
        m.department = Some("D".into());
        assert_eq!(bibliographic_text(&m), "A B k1 k2 S Au Ad D");

        assert_eq!(bibliographic_text(&DocumentMeta::new("only-id")), "");
    }

    #[test]
    fn metadata_roundtrips_through_writer() {
        let dir = TempDir::new().unwrap();
        let mut m = DocumentMeta::new("a");
        m.abstract_text = Some("with, commas\nand newline".into());
        m.year = Some(2017);
        write_metadata(&dir.path().join("m.jsonl"), [&m]).unwrap();
        let back = read_metadata(&dir.path().join("m.jsonl")).unwrap();
        assert_eq!(back["a"], m);
    }
}
