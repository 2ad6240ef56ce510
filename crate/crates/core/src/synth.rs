//! Synthetic corpora with planted topics, for rehearsals and tests.
//!
//! Each topic owns a disjoint block of pseudo-words with Zipf-like weights;
//! a shared background block adds noise. A document picks a planted topic,
//! puts `dominant_share` of its mass on it and spreads the rest over the
//! other topics at random, then draws every token from that mixture.

use std::collections::HashSet;
use std::fs;
use std::path::Path;

use rand::distr::weighted::WeightedIndex;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1};

use crate::corpus::{write_metadata, Corpus, Document, DocumentMeta};
use crate::error::{Error, Result};

const CONSONANTS: &[u8] = b"bdfgklmnprstvz";
const VOWELS: &[u8] = b"aiou";

#[derive(Debug, Clone, PartialEq)]
pub struct SynthConfig {
    /// Number of documents planted in each topic.
    pub docs_per_topic: Vec<usize>,
    pub words_per_topic: usize,
    pub background_words: usize,
    /// Fraction of tokens drawn from the background block.
    pub background_share: f64,
    /// Share of the topical mass on the planted topic.
    pub dominant_share: f64,
    /// Inclusive token count range per document.
    pub doc_len: (usize, usize),
    /// Documents (by position after shuffling) missing an advisor.
    pub missing_advisor: usize,
    pub missing_department: usize,
    pub seed: u64,
}

impl Default for SynthConfig {
    /// 263 documents over five topics, sized like the reference collection.
    fn default() -> Self {
        Self {
            docs_per_topic: vec![41, 91, 57, 20, 54],
            words_per_topic: 40,
            background_words: 60,
            background_share: 0.1,
            dominant_share: 0.8,
            doc_len: (150, 250),
            missing_advisor: 10,
            missing_department: 7,
            seed: 42,
        }
    }
}

impl SynthConfig {
    /// Topics with fully disjoint vocabularies: no background, no mixing.
    pub fn disjoint(docs_per_topic: Vec<usize>, seed: u64) -> Self {
        Self {
            docs_per_topic,
            background_words: 0,
            background_share: 0.0,
            dominant_share: 1.0,
            missing_advisor: 0,
            missing_department: 0,
            seed,
            ..Self::default()
        }
    }

    pub fn num_docs(&self) -> usize {
        self.docs_per_topic.iter().sum()
    }

    fn validate(&self) -> Result<()> {
        let k = self.docs_per_topic.len();
        let bad = |m: &str| Err(Error::Config(format!("synthetic corpus: {m}")));
        if k == 0 || self.num_docs() == 0 {
            return bad("no documents");
        }
        if self.words_per_topic == 0 {
            return bad("words_per_topic must be positive");
        }
        if !(0.0..1.0).contains(&self.background_share) {
            return bad("background_share must be in [0, 1)");
        }
        if self.background_share > 0.0 && self.background_words == 0 {
            return bad("background_share > 0 needs background words");
        }
        if !(self.dominant_share > 0.0 && self.dominant_share <= 1.0) {
            return bad("dominant_share must be in (0, 1]");
        }
        if k == 1 && self.dominant_share < 1.0 {
            return bad("a single topic needs dominant_share = 1");
        }
        if self.doc_len.0 == 0 || self.doc_len.0 > self.doc_len.1 {
            return bad("doc_len must be a non-empty range of positive lengths");
        }
        if self.missing_advisor > self.num_docs() || self.missing_department > self.num_docs() {
            return bad("more missing fields than documents");
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct SyntheticCorpus {
    pub corpus: Corpus,
    /// Planted topic of each document, in corpus order.
    pub planted: Vec<usize>,
    /// Each topic's words, most probable first.
    pub topic_words: Vec<Vec<String>>,
    pub background: Vec<String>,
}

impl SyntheticCorpus {
    /// Writes `<dir>/texts/<id>.txt` and `<dir>/metadata.jsonl`.
    pub fn write_to(&self, dir: &Path) -> Result<()> {
        let texts = dir.join("texts");
        fs::create_dir_all(&texts).map_err(|e| Error::io(&texts, e))?;
        for doc in self.corpus.documents() {
            let path = texts.join(format!("{}.txt", doc.id()));
            fs::write(&path, &doc.text).map_err(|e| Error::io(&path, e))?;
        }
        write_metadata(
            &dir.join("metadata.jsonl"),
            self.corpus.documents().iter().map(|d| &d.meta),
        )
    }

    /// Planted topic per document as `a`, `b`, ... labels.
    pub fn planted_labels(&self) -> Vec<String> {
        self.planted
            .iter()
            .map(|&k| char::from(b'a' + k as u8).to_string())
            .collect()
    }
}

fn pseudo_words(n: usize, taken: &mut HashSet<String>, rng: &mut impl Rng) -> Vec<String> {
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let mut w = String::with_capacity(6);
        for _ in 0..3 {
            w.push(char::from(
                CONSONANTS[rng.random_range(0..CONSONANTS.len())],
            ));
            w.push(char::from(VOWELS[rng.random_range(0..VOWELS.len())]));
        }
        if taken.insert(w.clone()) {
            out.push(w);
        }
    }
    out
}

fn zipf(n: usize) -> WeightedIndex<f64> {
    WeightedIndex::new((1..=n).map(|r| 1.0 / r as f64)).expect("n > 0")
}

pub fn generate(config: &SynthConfig) -> Result<SyntheticCorpus> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let k = config.docs_per_topic.len();

    let mut taken = HashSet::new();
    let topic_words: Vec<Vec<String>> = (0..k)
        .map(|_| pseudo_words(config.words_per_topic, &mut taken, &mut rng))
        .collect();
    let background = pseudo_words(config.background_words, &mut taken, &mut rng);
    let topic_dist = zipf(config.words_per_topic);
    let background_dist = (!background.is_empty()).then(|| zipf(background.len()));

    let mut planted: Vec<usize> = config
        .docs_per_topic
        .iter()
        .enumerate()
        .flat_map(|(t, &n)| std::iter::repeat_n(t, n))
        .collect();
    planted.shuffle(&mut rng);

    let n = planted.len();
    let mut no_advisor = vec![false; n];
    let mut no_department = vec![false; n];
    for (flags, count) in [
        (&mut no_advisor, config.missing_advisor),
        (&mut no_department, config.missing_department),
    ] {
        let mut idx: Vec<usize> = (0..n).collect();
        idx.shuffle(&mut rng);
        for &i in &idx[..count] {
            flags[i] = true;
        }
    }

    let width = n.to_string().len().max(4);
    let mut documents = Vec::with_capacity(n);
    for (i, &topic) in planted.iter().enumerate() {
        let mut mix = vec![0.0; k];
        mix[topic] = config.dominant_share;
        if k > 1 && config.dominant_share < 1.0 {
            let draws: Vec<f64> = (0..k - 1).map(|_| Exp1.sample(&mut rng)).collect();
            let sum: f64 = draws.iter().sum();
            let rest = 1.0 - config.dominant_share;
            for (t, d) in (0..k).filter(|&t| t != topic).zip(draws) {
                mix[t] = rest * d / sum;
            }
        }
        let mix_dist = WeightedIndex::new(&mix).expect("mixture has positive mass");

        let len = rng.random_range(config.doc_len.0..=config.doc_len.1);
        let mut tokens = Vec::with_capacity(len);
        for _ in 0..len {
            let word = match &background_dist {
                Some(bg) if rng.random_bool(config.background_share) => {
                    &background[bg.sample(&mut rng)]
                }
                _ => &topic_words[mix_dist.sample(&mut rng)][topic_dist.sample(&mut rng)],
            };
            tokens.push(word.as_str());
        }

        let id = format!("etd-{:0width$}", i + 1);
        let own = &topic_words[topic];
        let mut meta = DocumentMeta::new(id);
        meta.title = own[..3].join(" ");
        meta.abstract_text = Some(tokens[..tokens.len().min(30)].join(" "));
        meta.keywords = own[..4].to_vec();
        meta.subject = Some(format!("Subject {}", char::from(b'A' + topic as u8)));
        meta.author = Some(format!("Author {}", i + 1));
        meta.advisor = (!no_advisor[i]).then(|| format!("Advisor {}", i % 17 + 1));
        meta.department = (!no_department[i]).then(|| format!("Department {}", topic + 1));
        meta.year = Some(2016 + (i % 3) as i32);

        let mut text = String::new();
        for line in tokens.chunks(12) {
            text.push_str(&line.join(" "));
            text.push('\n');
        }
        documents.push(Document { meta, text });
    }

    Ok(SyntheticCorpus {
        corpus: Corpus::from_documents(documents)?,
        planted,
        topic_words,
        background,
    })
}
