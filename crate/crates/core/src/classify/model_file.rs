//! Plain-text persistence for trained models and their feature space.
//!
//! Model file layout (fields separated by tabs, one record per line):
//!
//! ```text
//! etdkit-svm 1
//! classes a b c
//! vocab_hash <hex sha-256>
//! dim <n>
//! c <C>
//! machine a <bias>
//! weights <index>:<value> ...
//! ```
//!
//! One `machine`/`weights` pair per class, in class order; a degenerate
//! model has none. Only non-zero weights are stored.

use std::io::{BufRead, Write};
use std::str::FromStr;

use super::svm::{BinarySvm, EpochRecord, SvmModel};
use crate::error::{Error, Result};
use crate::num::Real;
use crate::preprocess::Vocabulary;

pub const MODEL_MAGIC: &str = "etdkit-svm 1";
pub const FEATURES_MAGIC: &str = "etdkit-features 1";

/// A model together with the fingerprint of the vocabulary it was trained on.
#[derive(Debug, Clone, PartialEq)]
pub struct StoredModel<T> {
    pub model: SvmModel<T>,
    pub vocab_hash: String,
}

impl<T: Real> StoredModel<T> {
    pub fn new(model: SvmModel<T>, vocab: &Vocabulary) -> Self {
        Self {
            model,
            vocab_hash: vocab.fingerprint(),
        }
    }

    pub fn check_vocabulary(&self, vocab: &Vocabulary) -> Result<()> {
        let found = vocab.fingerprint();
        if found != self.vocab_hash {
            return Err(Error::VocabularyMismatch {
                expected: self.vocab_hash.clone(),
                found,
            });
        }
        Ok(())
    }

    pub fn write<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        let m = &self.model;
        writeln!(out, "{MODEL_MAGIC}")?;
        write!(out, "classes")?;
        for c in &m.classes {
            write!(out, "\t{c}")?;
        }
        writeln!(out)?;
        writeln!(out, "vocab_hash\t{}", self.vocab_hash)?;
        writeln!(out, "dim\t{}", m.dim)?;
        writeln!(out, "c\t{}", m.c)?;
        for (class, machine) in m.classes.iter().zip(&m.machines) {
            writeln!(out, "machine\t{class}\t{}", machine.bias)?;
            write!(out, "weights")?;
            for (i, w) in machine.weights.iter().enumerate() {
                if !w.is_zero() {
                    write!(out, "\t{i}:{w}")?;
                }
            }
            writeln!(out)?;
        }
        Ok(())
    }

    pub fn to_text(&self) -> String {
        let mut buf = Vec::new();
        self.write(&mut buf).expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("model text is UTF-8")
    }

    pub fn read<R: BufRead>(input: R) -> Result<Self> {
        let mut text = String::new();
        for line in input.lines() {
            let line = line.map_err(|e| Error::ModelFormat(e.to_string()))?;
            text.push_str(&line);
            text.push('\n');
        }
        text.parse()
    }
}

fn bad(msg: impl Into<String>) -> Error {
    Error::ModelFormat(msg.into())
}

fn parse_num<N: FromStr>(s: &str, what: &str) -> Result<N> {
    s.parse().map_err(|_| bad(format!("bad {what} `{s}`")))
}

fn field<'a>(line: Option<&'a str>, key: &str) -> Result<Vec<&'a str>> {
    let line = line.ok_or_else(|| bad(format!("missing `{key}` line")))?;
    let mut parts = line.split('\t');
    if parts.next() != Some(key) {
        return Err(bad(format!("expected `{key}` line, got `{line}`")));
    }
    Ok(parts.collect())
}

fn single<'a>(line: Option<&'a str>, key: &str) -> Result<&'a str> {
    match field(line, key)?.as_slice() {
        [v] => Ok(v),
        _ => Err(bad(format!("`{key}` takes exactly one value"))),
    }
}

impl<T: Real> FromStr for StoredModel<T> {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut lines = s.lines().filter(|l| !l.is_empty());
        match lines.next() {
            Some(MODEL_MAGIC) => {}
            Some(other) => return Err(bad(format!("unsupported header `{other}`"))),
            None => return Err(bad("empty file")),
        }
        let classes: Vec<String> = field(lines.next(), "classes")?
            .into_iter()
            .map(str::to_string)
            .collect();
        if classes.is_empty() {
            return Err(bad("no classes"));
        }
        let vocab_hash = single(lines.next(), "vocab_hash")?.to_string();
        let dim: usize = parse_num(single(lines.next(), "dim")?, "dim")?;
        let c: T = parse_num(single(lines.next(), "c")?, "C")?;

        let mut machines = Vec::new();
        while let Some(line) = lines.next() {
            let head = field(Some(line), "machine")?;
            let [class, bias] = head.as_slice() else {
                return Err(bad(format!("malformed machine line `{line}`")));
            };
            if classes.get(machines.len()).map(String::as_str) != Some(*class) {
                return Err(bad(format!("machine `{class}` out of class order")));
            }
            let bias: T = parse_num(bias, "bias")?;
            let mut weights = vec![T::zero(); dim];
            for entry in field(lines.next(), "weights")? {
                let (i, v) = entry
                    .split_once(':')
                    .ok_or_else(|| bad(format!("bad weight entry `{entry}`")))?;
                let i: usize = parse_num(i, "weight index")?;
                if i >= dim {
                    return Err(bad(format!("weight index {i} >= dim {dim}")));
                }
                weights[i] = parse_num(v, "weight")?;
            }
            machines.push(BinarySvm {
                weights,
                bias,
                trace: Vec::<EpochRecord<T>>::new(),
                converged: true,
            });
        }
        if !machines.is_empty() && machines.len() != classes.len() {
            return Err(bad(format!(
                "{} classes but {} machines",
                classes.len(),
                machines.len()
            )));
        }
        if machines.is_empty() && classes.len() != 1 {
            return Err(bad("multi-class model without machines"));
        }
        Ok(Self {
            model: SvmModel {
                classes,
                dim,
                c,
                machines,
            },
            vocab_hash,
        })
    }
}

/// Vocabulary plus idf weights, enough to vectorize unseen documents.
/// Stored as `term<TAB>idf` lines after a header.
pub fn write_feature_space<T: Real, W: Write>(
    vocab: &Vocabulary,
    idf: &[T],
    mut out: W,
) -> std::io::Result<()> {
    writeln!(out, "{FEATURES_MAGIC}")?;
    for (term, w) in vocab.terms().iter().zip(idf) {
        writeln!(out, "{term}\t{w}")?;
    }
    Ok(())
}

pub fn read_feature_space<T: Real, R: BufRead>(input: R) -> Result<(Vocabulary, Vec<T>)> {
    let mut lines = input.lines();
    let header = lines.next().transpose().map_err(|e| bad(e.to_string()))?;
    if header.as_deref() != Some(FEATURES_MAGIC) {
        return Err(bad("not a feature-space file"));
    }
    let mut vocab = Vocabulary::new();
    let mut idf = Vec::new();
    for line in lines {
        let line = line.map_err(|e| bad(e.to_string()))?;
        if line.is_empty() {
            continue;
        }
        let (term, w) = line
            .split_once('\t')
            .ok_or_else(|| bad(format!("bad feature line `{line}`")))?;
        let id = vocab.intern(term);
        if id as usize != idf.len() {
            return Err(bad(format!("duplicate term `{term}`")));
        }
        idf.push(parse_num(w, "idf")?);
    }
    Ok((vocab, idf))
}
