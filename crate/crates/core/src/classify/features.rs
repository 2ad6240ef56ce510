use std::collections::BTreeMap;

use crate::num::Real;
use crate::preprocess::{TokenizedCorpus, Vocabulary};

/// Sparse vector with strictly increasing indices and no stored zeros.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SparseVector<T> {
    pub indices: Vec<u32>,
    pub values: Vec<T>,
}

impl<T: Real> SparseVector<T> {
    pub fn from_pairs(pairs: impl IntoIterator<Item = (u32, T)>) -> Self {
        let sorted: BTreeMap<u32, T> = pairs.into_iter().filter(|(_, v)| !v.is_zero()).collect();
        Self {
            indices: sorted.keys().copied().collect(),
            values: sorted.values().copied().collect(),
        }
    }

    pub fn from_dense(dense: &[T]) -> Self {
        Self::from_pairs(dense.iter().enumerate().map(|(i, &v)| (i as u32, v)))
    }

    pub fn nnz(&self) -> usize {
        self.indices.len()
    }

    pub fn is_zero(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (u32, T)> + '_ {
        self.indices
            .iter()
            .copied()
            .zip(self.values.iter().copied())
    }

    pub fn dot_dense(&self, dense: &[T]) -> T {
        self.iter()
            .filter_map(|(i, v)| dense.get(i as usize).map(|&d| v * d))
            .sum()
    }

    pub fn dot(&self, other: &Self) -> T {
        let (mut a, mut b) = (0, 0);
        let mut acc = T::zero();
        while a < self.indices.len() && b < other.indices.len() {
            match self.indices[a].cmp(&other.indices[b]) {
                std::cmp::Ordering::Less => a += 1,
                std::cmp::Ordering::Greater => b += 1,
                std::cmp::Ordering::Equal => {
                    acc += self.values[a] * other.values[b];
                    a += 1;
                    b += 1;
                }
            }
        }
        acc
    }

    pub fn norm(&self) -> T {
        self.values.iter().map(|&v| v * v).sum::<T>().sqrt()
    }

    /// Adds `scale * self` into `dense`.
    pub fn axpy_into(&self, scale: T, dense: &mut [T]) {
        for (i, v) in self.iter() {
            dense[i as usize] += scale * v;
        }
    }
}

/// L2-normalized TF-IDF rows over a fixed vocabulary.
#[derive(Debug, Clone)]
pub struct FeatureMatrix<T> {
    pub doc_ids: Vec<String>,
    pub vocab: Vocabulary,
    pub idf: Vec<T>,
    pub rows: Vec<SparseVector<T>>,
}

impl<T: Real> FeatureMatrix<T> {
    pub fn dim(&self) -> usize {
        self.vocab.len()
    }

    /// Vectorizes a new document's terms against this vocabulary; unseen
    /// terms are dropped.
    pub fn transform_terms<S: AsRef<str>>(&self, terms: &[S]) -> SparseVector<T> {
        transform_terms(&self.vocab, &self.idf, terms)
    }
}

pub fn transform_terms<T: Real, S: AsRef<str>>(
    vocab: &Vocabulary,
    idf: &[T],
    terms: &[S],
) -> SparseVector<T> {
    tfidf_row(terms.iter().filter_map(|t| vocab.id(t.as_ref())), idf)
}

/// `idf(w) = ln(D / df(w))`; terms in every document get 0.
pub fn inverse_document_frequency<T: Real>(tc: &TokenizedCorpus) -> Vec<T> {
    let mut df = vec![0u64; tc.vocab.len()];
    for doc in &tc.docs {
        let mut seen: Vec<u32> = doc.clone();
        seen.sort_unstable();
        seen.dedup();
        for w in seen {
            df[w as usize] += 1;
        }
    }
    let d = T::from_count(tc.num_docs() as u64);
    df.into_iter()
        .map(|n| {
            if n == 0 {
                T::zero()
            } else {
                (d / T::from_count(n)).ln()
            }
        })
        .collect()
}

/// Raw term counts times idf, scaled to unit length. A document whose
/// weights are all zero (empty, or only terms present everywhere) maps to
/// the zero vector.
pub fn tfidf_row<T: Real>(tokens: impl IntoIterator<Item = u32>, idf: &[T]) -> SparseVector<T> {
    let mut tf: BTreeMap<u32, u64> = BTreeMap::new();
    for w in tokens {
        *tf.entry(w).or_insert(0) += 1;
    }
    let mut row = SparseVector::from_pairs(
        tf.into_iter()
            .map(|(w, n)| (w, T::from_count(n) * idf[w as usize])),
    );
    let norm = row.norm();
    if norm > T::zero() {
        for v in row.values.iter_mut() {
            *v /= norm;
        }
    }
    row
}

pub fn vectorize<T: Real>(tc: &TokenizedCorpus) -> FeatureMatrix<T> {
    let idf = inverse_document_frequency(tc);
    let rows: Vec<SparseVector<T>> = tc
        .docs
        .iter()
        .map(|doc| tfidf_row(doc.iter().copied(), &idf))
        .collect();
    let zero = rows.iter().filter(|r| r.is_zero()).count();
    if zero > 0 {
        log::warn!("{zero} document(s) have an all-zero feature vector");
    }
    FeatureMatrix {
        doc_ids: tc.doc_ids.clone(),
        vocab: tc.vocab.clone(),
        idf,
        rows,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::preprocess::PreprocessProfile;

    fn tc(docs: &[&[&str]]) -> TokenizedCorpus {
        TokenizedCorpus::from_terms(
            PreprocessProfile::classify(),
            (0..docs.len()).map(|i| format!("d{i}")).collect(),
            docs.iter()
                .map(|d| d.iter().map(|s| s.to_string()).collect())
                .collect(),
        )
    }

    #[test]
    fn idf_values() {
        let c = tc(&[&["x", "x", "shared"], &["shared", "y"]]);
        let idf: Vec<f64> = inverse_document_frequency(&c);
        // x: D=2, df=1
        assert!((idf[0] - 2f64.ln()).abs() < 1e-15);
        assert_eq!(idf[1], 0.0);
        // pre-normalization weight of x in doc 0 is tf * idf = 2 ln 2
        let raw = 2.0 * idf[0];
        assert!((raw - 1.386_294_361_119_890_6).abs() < 1e-12);
    }

    #[test]
    fn rows_are_unit_or_zero() {
        let c = tc(&[
            &["x", "x", "shared"],
            &["shared", "y", "z"],
            &[],
            &["shared"],
        ]);
        let fm: FeatureMatrix<f64> = vectorize(&c);
        assert!((fm.rows[0].norm() - 1.0).abs() < 1e-9);
        assert!((fm.rows[1].norm() - 1.0).abs() < 1e-9);
        assert!(fm.rows[2].is_zero());
        // "shared" is not in every doc here (doc 2 is empty), so doc 3 is non-zero
        assert!((fm.rows[3].norm() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn term_in_all_docs_has_zero_weight() {
        let c = tc(&[&["a", "b"], &["a", "c"]]);
        let fm: FeatureMatrix<f64> = vectorize(&c);
        assert!(fm.rows.iter().all(|r| !r.indices.contains(&0)));
    }

    #[test]
    fn unseen_terms_are_dropped() {
        let c = tc(&[&["a", "b"], &["c"]]);
        let fm: FeatureMatrix<f64> = vectorize(&c);
        let v = fm.transform_terms(&["a", "zzz", "a"]);
        assert_eq!(v.indices, [0]);
        assert!((v.values[0] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn sparse_dot_matches_dense() {
        let a = SparseVector::from_dense(&[1.0, 0.0, 2.0, 3.0]);
        let b = SparseVector::from_dense(&[0.5, 4.0, 0.0, -1.0]);
        assert_eq!(a.dot(&b), 0.5 - 3.0);
        assert_eq!(a.dot_dense(&[0.5, 4.0, 0.0, -1.0]), 0.5 - 3.0);
    }
}
