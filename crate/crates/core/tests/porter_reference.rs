//! Stemmer output against Martin Porter's published vocabulary and its
//! reference stemmed output (23,531 word pairs).

use etdkit::preprocess::stem;

const VOCABULARY: &str = include_str!("data/porter_voc.txt");
const EXPECTED: &str = include_str!("data/porter_output.txt");

#[test]
fn matches_reference_vocabulary() {
    let words: Vec<&str> = VOCABULARY.lines().collect();
    let expected: Vec<&str> = EXPECTED.lines().collect();
    assert_eq!(words.len(), expected.len());
    assert_eq!(words.len(), 23_531);

    let mismatches: Vec<(&str, String, &str)> = words
        .iter()
        .zip(&expected)
        .filter_map(|(w, e)| {
            let got = stem(w);
            (got != *e).then_some((*w, got, *e))
        })
        .collect();
    for (w, got, e) in mismatches.iter().take(20) {
        eprintln!("{w}: got {got}, expected {e}");
    }
    assert!(mismatches.is_empty(), "{} mismatches", mismatches.len());
}
