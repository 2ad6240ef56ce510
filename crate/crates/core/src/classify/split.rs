use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A single seeded train/test partition of document indices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitPlan {
    pub seed: u64,
    pub train_ratio: f64,
    /// Ascending document indices.
    pub train: Vec<usize>,
    /// Ascending document indices.
    pub test: Vec<usize>,
}

impl SplitPlan {
    pub fn num_docs(&self) -> usize {
        self.train.len() + self.test.len()
    }
}

pub fn train_size(n_docs: usize, train_ratio: f64) -> usize {
    (train_ratio * n_docs as f64).floor() as usize
}

fn check(n_docs: usize, train_ratio: f64) -> Result<()> {
    if !(train_ratio > 0.0 && train_ratio < 1.0) {
        return Err(Error::Config(format!(
            "train ratio must be in (0, 1), got {train_ratio}"
        )));
    }
    if n_docs < 2 {
        return Err(Error::Config(format!(
            "need at least 2 documents to split, got {n_docs}"
        )));
    }
    Ok(())
}

/// Seeded uniform shuffle; the first `floor(ratio * n)` go to training.
pub fn split(n_docs: usize, train_ratio: f64, seed: u64) -> Result<SplitPlan> {
    check(n_docs, train_ratio)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<usize> = (0..n_docs).collect();
    order.shuffle(&mut rng);
    let n_train = train_size(n_docs, train_ratio);
    Ok(finish(
        seed,
        train_ratio,
        order[..n_train].to_vec(),
        order[n_train..].to_vec(),
    ))
}

/// Like [`split`], but each label keeps roughly its share of the training
/// set. Per-label quotas are `floor(ratio * n_label)`; the remaining
/// training slots are filled from a shuffled pool of everything left over.
/// Labels seen only once go straight to that pool, with a warning.
pub fn stratified_split<L: Ord>(labels: &[L], train_ratio: f64, seed: u64) -> Result<SplitPlan> {
    check(labels.len(), train_ratio)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut groups: BTreeMap<&L, Vec<usize>> = BTreeMap::new();
    for (i, l) in labels.iter().enumerate() {
        groups.entry(l).or_default().push(i);
    }

    let mut train = Vec::new();
    let mut pool = Vec::new();
    let mut singletons = 0;
    for (_, mut members) in groups {
        members.shuffle(&mut rng);
        if members.len() < 2 {
            singletons += 1;
            pool.extend(members);
            continue;
        }
        let quota = train_size(members.len(), train_ratio);
        train.extend_from_slice(&members[..quota]);
        pool.extend_from_slice(&members[quota..]);
    }
    if singletons > 0 {
        log::warn!("{singletons} label(s) occur once; they are split without stratification");
    }

    pool.shuffle(&mut rng);
    let n_train = train_size(labels.len(), train_ratio);
    let missing = n_train.saturating_sub(train.len());
    train.extend(pool.drain(..missing));
    Ok(finish(seed, train_ratio, train, pool))
}

fn finish(seed: u64, train_ratio: f64, mut train: Vec<usize>, mut test: Vec<usize>) -> SplitPlan {
    train.sort_unstable();
    test.sort_unstable();
    SplitPlan {
        seed,
        train_ratio,
        train,
        test,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn seventy_percent_of_263() {
        let p = split(263, 0.7, 1).unwrap();
        assert_eq!((p.train.len(), p.test.len()), (184, 79));
        let p = split(10, 0.7, 1).unwrap();
        assert_eq!((p.train.len(), p.test.len()), (7, 3));
    }

    #[test]
    fn deterministic_per_seed() {
        assert_eq!(split(50, 0.7, 9).unwrap(), split(50, 0.7, 9).unwrap());
        assert_ne!(split(50, 0.7, 9).unwrap(), split(50, 0.7, 10).unwrap());
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(split(1, 0.7, 0).is_err());
        assert!(split(10, 0.0, 0).is_err());
        assert!(split(10, 1.0, 0).is_err());
        assert!(split(10, f64::NAN, 0).is_err());
    }

    #[test]
    fn stratified_keeps_proportions() {
        let labels: Vec<char> = std::iter::repeat_n('a', 60)
            .chain(std::iter::repeat_n('b', 40))
            .collect();
        let p = stratified_split(&labels, 0.7, 3).unwrap();
        assert_eq!(p.train.len(), 70);
        let a_train = p.train.iter().filter(|&&i| labels[i] == 'a').count();
        assert_eq!(a_train, 42);
    }

    #[test]
    fn stratified_with_singleton_label() {
        let labels = ['a', 'a', 'a', 'b', 'b', 'c'];
        let p = stratified_split(&labels, 0.5, 0).unwrap();
        assert_eq!(p.train.len(), 3);
        assert_eq!(p.num_docs(), 6);
    }

    proptest! {
        #[test]
        fn partition_invariants(n in 2usize..400, ratio in 0.01f64..0.99, seed: u64, stratify: bool) {
            let plan = if stratify {
                let labels: Vec<usize> = (0..n).map(|i| (i * 7 + seed as usize) % 5).collect();
                stratified_split(&labels, ratio, seed).unwrap()
            } else {
                split(n, ratio, seed).unwrap()
            };
            prop_assert_eq!(plan.train.len(), train_size(n, ratio));
            let mut all: Vec<usize> = plan.train.iter().chain(&plan.test).copied().collect();
            all.sort_unstable();
            prop_assert_eq!(all, (0..n).collect::<Vec<_>>());
        }
    }
}
