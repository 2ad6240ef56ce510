mod common;

use common::best_match_agreement;
use etdkit::lda::{self, LdaConfig};
use etdkit::preprocess::{build_tokenized_corpus, PreprocessProfile, TextSource, TokenizedCorpus};
use etdkit::synth::{generate, SynthConfig};

fn tokenized(config: &SynthConfig) -> (TokenizedCorpus, Vec<usize>) {
    let s = generate(config).unwrap();
    let tc = build_tokenized_corpus(&s.corpus, &PreprocessProfile::topic(), TextSource::Body);
    (tc, s.planted)
}

fn config(topics: usize, iterations: usize, seed: u64) -> LdaConfig<f64> {
    LdaConfig {
        topics,
        iterations,
        seed,
        ..LdaConfig::default()
    }
}

#[test]
fn recovers_two_disjoint_vocabularies() {
    let (tc, planted) = tokenized(&SynthConfig::disjoint(vec![30, 30], 5));
    let model = lda::fit(&tc, &config(2, 200, 11)).unwrap();
    let agree = best_match_agreement(&model.dominant_topics(), &planted, 2);
    assert!(
        agree as f64 >= 0.95 * planted.len() as f64,
        "{agree}/{}",
        planted.len()
    );
}

#[test]
fn recovers_planted_topics_on_reference_sized_corpus() {
    let (tc, planted) = tokenized(&SynthConfig::default());
    let model = lda::fit(&tc, &config(5, 300, 3)).unwrap();
    let agree = best_match_agreement(&model.dominant_topics(), &planted, 5);
    assert!(
        agree as f64 >= 0.9 * planted.len() as f64,
        "{agree}/{}",
        planted.len()
    );
}

#[test]
fn log_likelihood_improves_for_most_seeds() {
    let (tc, _) = tokenized(&SynthConfig {
        docs_per_topic: vec![20; 5],
        ..SynthConfig::default()
    });
    let improved = [1u64, 2, 3]
        .into_iter()
        .filter(|&seed| {
            let model = lda::fit(&tc, &config(5, 100, seed)).unwrap();
            let ll = &model.log_likelihood;
            assert!(ll.iter().all(|v| v.is_finite()));
            let tail = &ll[ll.len() - ll.len() / 10..];
            tail.iter().sum::<f64>() / tail.len() as f64 >= ll[0]
        })
        .count();
    assert!(improved >= 2, "only {improved}/3 seeds improved");
}

#[test]
fn two_seeds_agree_after_matching() {
    let (tc, _) = tokenized(&SynthConfig::default());
    let a = lda::fit(&tc, &config(5, 300, 100)).unwrap();
    let b = lda::fit(&tc, &config(5, 300, 200)).unwrap();
    let agree = best_match_agreement(&a.dominant_topics(), &b.dominant_topics(), 5);
    assert!(
        agree as f64 >= 0.9 * tc.num_docs() as f64,
        "{agree}/{}",
        tc.num_docs()
    );
}

#[test]
fn tags_follow_mean_theta() {
    let (tc, _) = tokenized(&SynthConfig::default());
    let model = lda::fit(&tc, &config(5, 50, 9)).unwrap();
    let k = model.num_topics();
    let mean: Vec<f64> = (0..k)
        .map(|t| {
            (0..model.num_docs())
                .map(|d| model.theta(d)[t])
                .sum::<f64>()
                / model.num_docs() as f64
        })
        .collect();
    let order = model.topic_order();
    for pair in order.windows(2) {
        assert!(mean[pair[0]] >= mean[pair[1]]);
    }
    for (rank, &topic) in order.iter().enumerate() {
        assert_eq!(model.tag_of(topic).rank(), rank);
    }
    // The largest planted topic (91 of 263 documents) should carry tag a.
    let tags = model.dominant_tags();
    let share_a = tags.iter().filter(|t| t.letter() == 'a').count();
    assert!(share_a > 70, "{share_a}");
}
