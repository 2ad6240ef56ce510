//! Latent Dirichlet allocation fitted by collapsed Gibbs sampling, plus the
//! ranking queries used to label topics (top words, representative
//! documents, dominant-topic tags).

pub mod export;
mod sampler;

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::num::Real;
use crate::preprocess::TokenizedCorpus;

pub use sampler::{gibbs_conditional, GibbsSampler};

/// How the configured `alpha` is split across topics.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum AlphaMode {
    /// `alpha` is the total concentration; each topic gets `alpha / K`.
    #[default]
    Total,
    /// `alpha` is already the per-topic value.
    PerTopic,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LdaConfig<T> {
    pub topics: usize,
    pub alpha: T,
    #[serde(default)]
    pub alpha_mode: AlphaMode,
    pub beta: T,
    pub iterations: usize,
    pub seed: u64,
}

impl<T: Real> Default for LdaConfig<T> {
    fn default() -> Self {
        Self {
            topics: 5,
            alpha: T::from_f64_lossy(10.0),
            alpha_mode: AlphaMode::Total,
            beta: T::from_f64_lossy(0.01),
            iterations: 1000,
            seed: 0,
        }
    }
}

impl<T: Real> LdaConfig<T> {
    pub fn alpha_per_topic(&self) -> T {
        match self.alpha_mode {
            AlphaMode::Total => self.alpha / T::from_count(self.topics as u64),
            AlphaMode::PerTopic => self.alpha,
        }
    }

    pub fn alpha_total(&self) -> T {
        match self.alpha_mode {
            AlphaMode::Total => self.alpha,
            AlphaMode::PerTopic => self.alpha * T::from_count(self.topics as u64),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.topics < 2 || self.topics > Tag::MAX_TOPICS {
            return Err(Error::Config(format!(
                "number of topics must be in 2..={}, got {}",
                Tag::MAX_TOPICS,
                self.topics
            )));
        }
        if !self.alpha.is_finite() || self.alpha <= T::zero() {
            return Err(Error::Config(format!(
                "alpha must be > 0, got {}",
                self.alpha
            )));
        }
        if !self.beta.is_finite() || self.beta <= T::zero() {
            return Err(Error::Config(format!(
                "beta must be > 0, got {}",
                self.beta
            )));
        }
        if self.iterations == 0 {
            return Err(Error::Config("iterations must be >= 1".into()));
        }
        Ok(())
    }
}

/// Letter label of a topic by rank: `a` is the topic with the highest
/// corpus-wide probability.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Tag(u8);

impl Tag {
    pub const MAX_TOPICS: usize = 26;

    pub fn from_rank(rank: usize) -> Self {
        assert!(rank < Self::MAX_TOPICS, "tag rank {rank} out of range");
        Tag(rank as u8)
    }

    pub fn rank(self) -> usize {
        self.0 as usize
    }

    pub fn letter(self) -> char {
        (b'a' + self.0) as char
    }

    pub fn parse(s: &str) -> Option<Self> {
        let mut chars = s.chars();
        match (chars.next(), chars.next()) {
            (Some(c @ 'a'..='z'), None) => Some(Tag(c as u8 - b'a')),
            _ => None,
        }
    }
}

impl fmt::Display for Tag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.letter())
    }
}

/// A fitted model: final-sample count tables plus the point estimates
/// derived from them.
#[derive(Debug, Clone)]
pub struct TopicModel<T> {
    pub config: LdaConfig<T>,
    pub doc_ids: Vec<String>,
    pub terms: Vec<String>,
    /// Topic of every token, per document.
    pub assignments: Vec<Vec<u16>>,
    /// `D x K`, row-major.
    pub doc_topic_counts: Vec<u32>,
    /// `V x K`, row-major (term-major).
    pub term_topic_counts: Vec<u32>,
    pub topic_totals: Vec<u32>,
    theta: Vec<T>,
    phi: Vec<T>,
    topic_order: Vec<usize>,
    /// Collapsed log-likelihood after each sweep.
    pub log_likelihood: Vec<f64>,
}

impl<T: Real> TopicModel<T> {
    #[allow(clippy::too_many_arguments)]
    pub(crate) fn from_counts(
        config: LdaConfig<T>,
        doc_ids: Vec<String>,
        terms: Vec<String>,
        assignments: Vec<Vec<u16>>,
        doc_topic_counts: Vec<u32>,
        term_topic_counts: Vec<u32>,
        topic_totals: Vec<u32>,
        log_likelihood: Vec<f64>,
    ) -> Self {
        let k = config.topics;
        let d = doc_ids.len();
        let v = terms.len();
        let alpha_k = config.alpha_per_topic();
        let alpha_total = config.alpha_total();
        let beta = config.beta;
        let v_beta = beta * T::from_count(v as u64);

        let mut theta = Vec::with_capacity(d * k);
        for doc in 0..d {
            let row = &doc_topic_counts[doc * k..(doc + 1) * k];
            let n_d = T::from_count(row.iter().map(|&c| c as u64).sum());
            let denom = n_d + alpha_total;
            theta.extend(
                row.iter()
                    .map(|&c| (T::from_count(c as u64) + alpha_k) / denom),
            );
        }

        let mut phi = vec![T::zero(); k * v];
        for topic in 0..k {
            let denom = T::from_count(topic_totals[topic] as u64) + v_beta;
            for w in 0..v {
                phi[topic * v + w] =
                    (T::from_count(term_topic_counts[w * k + topic] as u64) + beta) / denom;
            }
        }

        let mut model = Self {
            config,
            doc_ids,
            terms,
            assignments,
            doc_topic_counts,
            term_topic_counts,
            topic_totals,
            theta,
            phi,
            topic_order: Vec::new(),
            log_likelihood,
        };
        model.topic_order = model.rank_topics();
        model
    }

    fn rank_topics(&self) -> Vec<usize> {
        let weights = self.topic_weights();
        let mut order: Vec<usize> = (0..self.num_topics()).collect();
        order.sort_by(|&a, &b| desc(weights[a], weights[b]).then(a.cmp(&b)));
        order
    }

    pub fn num_topics(&self) -> usize {
        self.config.topics
    }

    pub fn num_docs(&self) -> usize {
        self.doc_ids.len()
    }

    pub fn vocab_size(&self) -> usize {
        self.terms.len()
    }

    /// Topic mixture of document `d` (indexed by raw topic id).
    pub fn theta(&self, d: usize) -> &[T] {
        let k = self.num_topics();
        &self.theta[d * k..(d + 1) * k]
    }

    /// Term distribution of topic `k`.
    pub fn phi(&self, k: usize) -> &[T] {
        let v = self.vocab_size();
        &self.phi[k * v..(k + 1) * v]
    }

    /// Mean of the theta columns: corpus-wide probability of each topic.
    pub fn topic_weights(&self) -> Vec<T> {
        let k = self.num_topics();
        let mut sums = vec![T::zero(); k];
        for d in 0..self.num_docs() {
            for (s, &t) in sums.iter_mut().zip(self.theta(d)) {
                *s += t;
            }
        }
        let n = T::from_count(self.num_docs().max(1) as u64);
        sums.into_iter().map(|s| s / n).collect()
    }

    /// Raw topic ids sorted by descending corpus-wide probability; position
    /// `i` receives tag `i`.
    pub fn topic_order(&self) -> &[usize] {
        &self.topic_order
    }

    pub fn tag_of(&self, topic: usize) -> Tag {
        let rank = self
            .topic_order
            .iter()
            .position(|&t| t == topic)
            .expect("topic id in range");
        Tag::from_rank(rank)
    }

    pub fn topic_of(&self, tag: Tag) -> usize {
        self.topic_order[tag.rank()]
    }

    /// The `n` most probable terms of `topic` as `(term id, phi)`, ties by
    /// ascending term id. Returns the whole vocabulary when `n > V`.
    pub fn top_words(&self, topic: usize, n: usize) -> Vec<(u32, T)> {
        let row = self.phi(topic);
        let mut ids: Vec<u32> = (0..row.len() as u32).collect();
        ids.sort_by(|&a, &b| desc(row[a as usize], row[b as usize]).then(a.cmp(&b)));
        ids.truncate(n);
        ids.into_iter().map(|w| (w, row[w as usize])).collect()
    }

    /// The `n` documents with the largest share of `topic` as
    /// `(doc index, theta)`, ties by ascending document id.
    pub fn representative_docs(&self, topic: usize, n: usize) -> Vec<(usize, T)> {
        let mut docs: Vec<usize> = (0..self.num_docs()).collect();
        docs.sort_by(|&a, &b| {
            desc(self.theta(a)[topic], self.theta(b)[topic])
                .then_with(|| self.doc_ids[a].cmp(&self.doc_ids[b]))
        });
        docs.truncate(n);
        docs.into_iter()
            .map(|d| (d, self.theta(d)[topic]))
            .collect()
    }

    /// Dominant raw topic per document; ties go to the better-ranked topic.
    pub fn dominant_topics(&self) -> Vec<usize> {
        (0..self.num_docs())
            .map(|d| dominant_topic(self.theta(d), &self.topic_order))
            .collect()
    }

    pub fn dominant_tags(&self) -> Vec<Tag> {
        (0..self.num_docs())
            .map(|d| {
                let theta = self.theta(d);
                let topic = dominant_topic(theta, &self.topic_order);
                self.tag_of(topic)
            })
            .collect()
    }
}

/// Argmax of `theta`, scanning topics in `topic_order` so that the first
/// ranked topic wins ties.
pub fn dominant_topic<T: PartialOrd + Copy>(theta: &[T], topic_order: &[usize]) -> usize {
    let mut best = topic_order[0];
    for &t in &topic_order[1..] {
        if theta[t] > theta[best] {
            best = t;
        }
    }
    best
}

fn desc<T: PartialOrd>(a: T, b: T) -> Ordering {
    b.partial_cmp(&a).unwrap_or(Ordering::Equal)
}

/// Runs `config.iterations` Gibbs sweeps over `tc`.
pub fn fit<T: Real>(tc: &TokenizedCorpus, config: &LdaConfig<T>) -> Result<TopicModel<T>> {
    fit_with_observer(tc, config, |_, _| {})
}

/// Like [`fit`], calling `observer(sweep, sampler)` after every sweep
/// (`sweep` starts at 1).
pub fn fit_with_observer<T, F>(
    tc: &TokenizedCorpus,
    config: &LdaConfig<T>,
    mut observer: F,
) -> Result<TopicModel<T>>
where
    T: Real,
    F: FnMut(usize, &GibbsSampler<T>),
{
    let mut sampler = GibbsSampler::new(tc, config)?;
    let mut trace = Vec::with_capacity(config.iterations);
    for sweep in 1..=config.iterations {
        sampler.sweep();
        trace.push(sampler.log_likelihood());
        observer(sweep, &sampler);
    }
    Ok(sampler.into_model(tc, trace))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::preprocess::PreprocessProfile;

    fn toy_model(theta_rows: &[&[f64]]) -> TopicModel<f64> {
        // theta is overwritten directly; counts are irrelevant here.
        let k = theta_rows[0].len();
        let config = LdaConfig {
            topics: k,
            ..LdaConfig::default()
        };
        let d = theta_rows.len();
        let mut m = TopicModel::from_counts(
            config,
            (0..d).map(|i| format!("doc{i}")).collect(),
            vec!["w".into()],
            vec![vec![]; d],
            vec![0; d * k],
            vec![0; k],
            vec![0; k],
            vec![],
        );
        m.theta = theta_rows.iter().flat_map(|r| r.iter().copied()).collect();
        m.topic_order = m.rank_topics();
        m
    }

    #[test]
    fn config_validation() {
        let ok = LdaConfig::<f64>::default();
        assert!(ok.validate().is_ok());
        assert_eq!(ok.alpha_per_topic(), 2.0);
        assert!(LdaConfig::<f64> {
            topics: 1,
            ..ok.clone()
        }
        .validate()
        .is_err());
        assert!(LdaConfig::<f64> {
            alpha: 0.0,
            ..ok.clone()
        }
        .validate()
        .is_err());
        assert!(LdaConfig::<f64> {
            beta: -1.0,
            ..ok.clone()
        }
        .validate()
        .is_err());
        assert!(LdaConfig::<f64> {
            iterations: 0,
            ..ok.clone()
        }
        .validate()
        .is_err());
        let per = LdaConfig::<f64> {
            alpha_mode: AlphaMode::PerTopic,
            ..ok
        };
        assert_eq!(per.alpha_per_topic(), 10.0);
        assert_eq!(per.alpha_total(), 50.0);
    }

    #[test]
    fn tags_are_letters() {
        assert_eq!(Tag::from_rank(0).to_string(), "a");
        assert_eq!(Tag::from_rank(4).to_string(), "e");
        assert_eq!(Tag::parse("c"), Some(Tag::from_rank(2)));
        assert_eq!(Tag::parse("ab"), None);
    }

    #[test]
    fn dominant_tag_follows_ranking() {
        assert_eq!(dominant_topic(&[0.7, 0.2, 0.1], &[0, 1, 2]), 0);
        assert_eq!(dominant_topic(&[0.2, 0.7, 0.1], &[1, 0, 2]), 1);
        assert_eq!(dominant_topic(&[0.25; 4], &[2, 0, 1, 3]), 2);

        let m = toy_model(&[&[0.2, 0.7, 0.1], &[0.3, 0.6, 0.1], &[0.6, 0.3, 0.1]]);
        assert_eq!(m.topic_order(), [1, 0, 2]);
        let tags: Vec<String> = m.dominant_tags().iter().map(Tag::to_string).collect();
        assert_eq!(tags, ["a", "a", "b"]);
    }

    #[test]
    fn representative_docs_rank_by_theta() {
        let m = toy_model(&[&[0.9, 0.1], &[0.1, 0.9], &[0.5, 0.5]]);
        let top: Vec<usize> = m.representative_docs(0, 2).iter().map(|p| p.0).collect();
        assert_eq!(top, [0, 2]);
        assert_eq!(m.representative_docs(0, 10).len(), 3);
        let single = toy_model(&[&[0.4, 0.6]]);
        assert_eq!(single.representative_docs(1, 1)[0].0, 0);
    }

    #[test]
    fn representative_ties_by_doc_id() {
        let m = toy_model(&[&[0.5, 0.5], &[0.5, 0.5]]);
        let top: Vec<usize> = m.representative_docs(1, 2).iter().map(|p| p.0).collect();
        assert_eq!(top, [0, 1]);
    }

    #[test]
    fn top_words_argsort_with_id_ties() {
        let tc = TokenizedCorpus::from_terms(
            PreprocessProfile::topic(),
            vec!["d".into()],
            vec![vec!["x".into(), "y".into(), "z".into()]],
        );
        let mut m = fit(
            &tc,
            &LdaConfig::<f64> {
                topics: 2,
                iterations: 1,
                ..LdaConfig::default()
            },
        )
        .unwrap();
        m.phi = vec![0.5, 0.3, 0.2, 0.2, 0.4, 0.4];
        let top: Vec<u32> = m.top_words(0, 2).iter().map(|p| p.0).collect();
        assert_eq!(top, [0, 1]);
        let top: Vec<u32> = m.top_words(1, 3).iter().map(|p| p.0).collect();
        assert_eq!(top, [1, 2, 0]);
        assert_eq!(m.top_words(0, 99).len(), 3);
    }

    #[test]
    fn empty_corpus_is_config_error() {
        let tc =
            TokenizedCorpus::from_terms(PreprocessProfile::topic(), vec!["d".into()], vec![vec![]]);
        let err = fit(&tc, &LdaConfig::<f64>::default()).unwrap_err();
        assert!(err.is_config());
    }

    #[test]
    fn empty_document_gets_uniform_theta() {
        let tc = TokenizedCorpus::from_terms(
            PreprocessProfile::topic(),
            vec!["a".into(), "b".into()],
            vec![vec!["x".into(), "y".into()], vec![]],
        );
        let m = fit(
            &tc,
            &LdaConfig::<f64> {
                topics: 4,
                iterations: 5,
                ..LdaConfig::default()
            },
        )
        .unwrap();
        assert!(m.theta(1).iter().all(|&t| (t - 0.25).abs() < 1e-15));
    }
}
