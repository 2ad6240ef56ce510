use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use statrs::function::gamma::ln_gamma;

use super::{LdaConfig, TopicModel};
use crate::error::{Error, Result};
use crate::num::Real;
use crate::preprocess::TokenizedCorpus;

/// Unnormalized collapsed conditional of one token's topic:
///
/// `out[k] = (n_dk + alpha_k) * (n_kw + beta) / (n_k + V * beta)`
///
/// All counts must already exclude the token being resampled.
/// `doc_topic` holds the document's K counts, `term_topic` the term's K
/// counts and `topic_totals` the K topic sizes.
pub fn gibbs_conditional<T: Real>(
    doc_topic: &[u32],
    term_topic: &[u32],
    topic_totals: &[u32],
    alpha_k: T,
    beta: T,
    vocab_size: usize,
    out: &mut [T],
) {
    let v_beta = beta * T::from_count(vocab_size as u64);
    for (k, o) in out.iter_mut().enumerate() {
        let n_dk = T::from_count(doc_topic[k] as u64);
        let n_kw = T::from_count(term_topic[k] as u64);
        let n_k = T::from_count(topic_totals[k] as u64);
        *o = (n_dk + alpha_k) * (n_kw + beta) / (n_k + v_beta);
    }
}

/// Sequential-scan collapsed Gibbs sampler state.
pub struct GibbsSampler<'a, T> {
    docs: &'a [Vec<u32>],
    topics: usize,
    vocab_size: usize,
    alpha_k: T,
    alpha_total: T,
    beta: T,
    config: LdaConfig<T>,
    z: Vec<Vec<u16>>,
    n_dk: Vec<u32>,
    n_wk: Vec<u32>,
    n_k: Vec<u32>,
    rng: ChaCha8Rng,
    weights: Vec<T>,
}

impl<'a, T: Real> GibbsSampler<'a, T> {
    /// Validates the configuration and draws the initial assignment
    /// uniformly at random from the seeded generator.
    pub fn new(tc: &'a TokenizedCorpus, config: &LdaConfig<T>) -> Result<Self> {
        config.validate()?;
        if tc.num_docs() == 0 || tc.num_tokens() == 0 || tc.vocab.is_empty() {
            return Err(Error::Config(
                "cannot fit a topic model on a corpus without tokens".into(),
            ));
        }
        let k = config.topics;
        let v = tc.vocab.len();
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        let mut n_dk = vec![0u32; tc.num_docs() * k];
        let mut n_wk = vec![0u32; v * k];
        let mut n_k = vec![0u32; k];
        let z = tc
            .docs
            .iter()
            .enumerate()
            .map(|(d, doc)| {
                doc.iter()
                    .map(|&w| {
                        let t = rng.random_range(0..k);
                        n_dk[d * k + t] += 1;
                        n_wk[w as usize * k + t] += 1;
                        n_k[t] += 1;
                        t as u16
                    })
                    .collect()
            })
            .collect();
        Ok(Self {
            docs: &tc.docs,
            topics: k,
            vocab_size: v,
            alpha_k: config.alpha_per_topic(),
            alpha_total: config.alpha_total(),
            beta: config.beta,
            config: config.clone(),
            z,
            n_dk,
            n_wk,
            n_k,
            rng,
            weights: vec![T::zero(); k],
        })
    }

    /// Resamples every token once, documents and positions in order.
    pub fn sweep(&mut self) {
        let k = self.topics;
        let docs = self.docs;
        for (d, doc) in docs.iter().enumerate() {
            for (i, &w) in doc.iter().enumerate() {
                let w = w as usize;
                let old = self.z[d][i] as usize;
                self.n_dk[d * k + old] -= 1;
                self.n_wk[w * k + old] -= 1;
                self.n_k[old] -= 1;

                gibbs_conditional(
                    &self.n_dk[d * k..(d + 1) * k],
                    &self.n_wk[w * k..(w + 1) * k],
                    &self.n_k,
                    self.alpha_k,
                    self.beta,
                    self.vocab_size,
                    &mut self.weights,
                );
                let new = sample_index(&self.weights, &mut self.rng);

                self.z[d][i] = new as u16;
                self.n_dk[d * k + new] += 1;
                self.n_wk[w * k + new] += 1;
                self.n_k[new] += 1;
            }
        }
    }

    pub fn assignments(&self) -> &[Vec<u16>] {
        &self.z
    }

    pub fn doc_topic_counts(&self) -> &[u32] {
        &self.n_dk
    }

    pub fn term_topic_counts(&self) -> &[u32] {
        &self.n_wk
    }

    pub fn topic_totals(&self) -> &[u32] {
        &self.n_k
    }

    /// Recounts the tables from the assignments and checks the marginal
    /// identities. Returns a description of the first violation.
    pub fn check_counts(&self) -> std::result::Result<(), String> {
        let k = self.topics;
        let mut n_dk = vec![0u32; self.n_dk.len()];
        let mut n_wk = vec![0u32; self.n_wk.len()];
        let mut n_k = vec![0u32; k];
        for (d, (doc, zs)) in self.docs.iter().zip(&self.z).enumerate() {
            if doc.len() != zs.len() {
                return Err(format!(
                    "doc {d}: {} tokens, {} assignments",
                    doc.len(),
                    zs.len()
                ));
            }
            for (&w, &t) in doc.iter().zip(zs) {
                n_dk[d * k + t as usize] += 1;
                n_wk[w as usize * k + t as usize] += 1;
                n_k[t as usize] += 1;
            }
        }
        if n_dk != self.n_dk || n_wk != self.n_wk || n_k != self.n_k {
            return Err("count tables disagree with assignments".into());
        }
        for (d, doc) in self.docs.iter().enumerate() {
            let row: u64 = self.n_dk[d * k..(d + 1) * k]
                .iter()
                .map(|&c| c as u64)
                .sum();
            if row != doc.len() as u64 {
                return Err(format!(
                    "doc {d}: sum_k n_dk = {row}, tokens = {}",
                    doc.len()
                ));
            }
        }
        for t in 0..k {
            let col: u64 = (0..self.vocab_size)
                .map(|w| self.n_wk[w * k + t] as u64)
                .sum();
            if col != self.n_k[t] as u64 {
                return Err(format!(
                    "topic {t}: sum_w n_kw = {col}, n_k = {}",
                    self.n_k[t]
                ));
            }
        }
        let total: u64 = self.n_k.iter().map(|&c| c as u64).sum();
        let tokens: u64 = self.docs.iter().map(|d| d.len() as u64).sum();
        if total != tokens {
            return Err(format!("sum_k n_k = {total}, tokens = {tokens}"));
        }
        Ok(())
    }

    /// Collapsed joint log-likelihood `log p(w, z)` under the current
    /// assignment.
    pub fn log_likelihood(&self) -> f64 {
        let k = self.topics;
        let v = self.vocab_size as f64;
        let beta = self.beta.to_f64_lossy();
        let alpha_k = self.alpha_k.to_f64_lossy();
        let alpha_total = self.alpha_total.to_f64_lossy();

        // Zero cells contribute lnG(0 + x) - lnG(x) = 0 and are skipped.
        let mut ll = 0.0;
        for t in 0..k {
            ll += ln_gamma(v * beta) - ln_gamma(self.n_k[t] as f64 + v * beta);
            for w in 0..self.vocab_size {
                let c = self.n_wk[w * k + t];
                if c > 0 {
                    ll += ln_gamma(c as f64 + beta) - ln_gamma(beta);
                }
            }
        }
        for (d, doc) in self.docs.iter().enumerate() {
            ll += ln_gamma(alpha_total) - ln_gamma(doc.len() as f64 + alpha_total);
            for t in 0..k {
                let c = self.n_dk[d * k + t];
                if c > 0 {
                    ll += ln_gamma(c as f64 + alpha_k) - ln_gamma(alpha_k);
                }
            }
        }
        ll
    }

    pub(crate) fn into_model(self, tc: &TokenizedCorpus, trace: Vec<f64>) -> TopicModel<T> {
        TopicModel::from_counts(
            self.config,
            tc.doc_ids.clone(),
            tc.vocab.terms().to_vec(),
            self.z,
            self.n_dk,
            self.n_wk,
            self.n_k,
            trace,
        )
    }
}

fn sample_index<T: Real, R: Rng>(weights: &[T], rng: &mut R) -> usize {
    let total: T = weights.iter().copied().sum();
    let u = T::from_f64_lossy(rng.random::<f64>()) * total;
    let mut acc = T::zero();
    for (k, &w) in weights.iter().enumerate() {
        acc += w;
        if u < acc {
            return k;
        }
    }
    weights.len() - 1
}
