use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn etdkit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_etdkit"))
        .args(args)
        .output()
        .expect("run etdkit")
}

fn ok(args: &[&str]) -> String {
    let out = etdkit(args);
    assert!(
        out.status.success(),
        "etdkit {args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn code(args: &[&str]) -> i32 {
    etdkit(args).status.code().unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

/// A small three-topic corpus in `<tmp>/corpus`.
fn small_corpus(seed: &str) -> (TempDir, PathBuf) {
    let tmp = tempfile::tempdir().unwrap();
    let corpus = tmp.path().join("corpus");
    ok(&[
        "generate",
        "--docs-per-topic",
        "12,18,10",
        "--seed",
        seed,
        "--out-dir",
        s(&corpus),
    ]);
    (tmp, corpus)
}

fn tags_of(csv: &Path) -> Vec<String> {
    fs::read_to_string(csv)
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(1).unwrap().to_string())
        .collect()
}

#[test]
fn help_and_version_exit_zero() {
    assert_eq!(code(&["--help"]), 0);
    assert_eq!(code(&["--version"]), 0);
    assert_eq!(code(&["topics", "--help"]), 0);
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(code(&[]), 1);
    assert_eq!(code(&["frobnicate"]), 1);
    assert_eq!(code(&["topics", "--no-such-flag"]), 1);
    let (tmp, corpus) = small_corpus("1");
    let out = tmp.path().join("o");
    assert_eq!(
        code(&[
            "topics",
            "--corpus",
            s(&corpus),
            "--k",
            "1",
            "--out-dir",
            s(&out)
        ]),
        1
    );
    assert_eq!(
        code(&[
            "topics",
            "--corpus",
            s(&corpus),
            "--beta",
            "-1",
            "--out-dir",
            s(&out)
        ]),
        1
    );
    assert_eq!(
        code(&[
            "train",
            "--corpus",
            s(&corpus),
            "--ratio",
            "1.5",
            "--out-dir",
            s(&out)
        ]),
        1
    );
    assert_eq!(
        code(&["topics", "--out-dir", s(&out)]),
        1,
        "no corpus given"
    );
    assert_eq!(
        code(&["--config", s(&tmp.path().join("missing.json")), "ingest"]),
        1
    );
}

#[test]
fn data_errors_exit_two() {
    let tmp = tempfile::tempdir().unwrap();
    let missing = tmp.path().join("nowhere");
    let out = tmp.path().join("o");
    assert_eq!(
        code(&["ingest", "--corpus", s(&missing), "--out-dir", s(&out)]),
        2
    );

    let empty = tmp.path().join("empty");
    fs::create_dir_all(empty.join("texts")).unwrap();
    fs::write(empty.join("metadata.jsonl"), "").unwrap();
    assert_eq!(
        code(&["ingest", "--corpus", s(&empty), "--out-dir", s(&out)]),
        2
    );
}

#[test]
fn ingest_reports_missing_metadata() {
    let (tmp, corpus) = small_corpus("2");
    let out = tmp.path().join("ingest");
    let stdout = ok(&["ingest", "--corpus", s(&corpus), "--out-dir", s(&out)]);
    let first = stdout.lines().next().unwrap();
    assert!(first.starts_with("40 documents; "), "{first}");
    assert!(first.contains("missing advisor") && first.contains("missing department"));
    assert!(out.join("ingest.csv").is_file());
    assert!(out.join("runconfig.json").is_file());
}

#[test]
fn topic_count_sets_tag_alphabet() {
    let (tmp, corpus) = small_corpus("3");
    let out = tmp.path().join("topics");
    ok(&[
        "topics",
        "--corpus",
        s(&corpus),
        "--k",
        "3",
        "--iterations",
        "100",
        "--seed",
        "4",
        "--out-dir",
        s(&out),
    ]);
    let mut tags = tags_of(&out.join("doc_topics.csv"));
    assert_eq!(tags.len(), 40);
    tags.sort();
    tags.dedup();
    assert!(
        tags.iter().all(|t| ["a", "b", "c"].contains(&t.as_str())),
        "{tags:?}"
    );
    let html = fs::read_to_string(out.join("report.html")).unwrap();
    assert!(html.contains("Topic a") && !html.contains("Topic d"));
}

#[test]
fn runconfig_records_resolved_seed() {
    let (tmp, corpus) = small_corpus("5");
    let out = tmp.path().join("topics");
    ok(&[
        "topics",
        "--corpus",
        s(&corpus),
        "--k",
        "3",
        "--iterations",
        "20",
        "--out-dir",
        s(&out),
    ]);
    let cfg: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("runconfig.json")).unwrap()).unwrap();
    assert!(cfg["lda"]["seed"].is_u64(), "{cfg}");
    assert!(Path::new(
        cfg["paths"]["corpus"]
            .as_str()
            .or(cfg["paths"]["texts"].as_str())
            .unwrap()
    )
    .is_absolute());
}

#[test]
fn predict_recovers_training_tag() {
    let (tmp, corpus) = small_corpus("6");
    let train = tmp.path().join("train");
    ok(&[
        "train",
        "--corpus",
        s(&corpus),
        "--k",
        "3",
        "--iterations",
        "150",
        "--seed",
        "6",
        "--out-dir",
        s(&train),
    ]);
    let doc_tags = fs::read_to_string(train.join("doc_topics.csv")).unwrap();
    let first = doc_tags.lines().nth(1).unwrap();
    let mut fields = first.split(',');
    let (id, tag) = (fields.next().unwrap(), fields.next().unwrap());

    let inputs = tmp.path().join("inputs");
    fs::create_dir(&inputs).unwrap();
    fs::copy(
        corpus.join("texts").join(format!("{id}.txt")),
        inputs.join("copy.txt"),
    )
    .unwrap();
    let pred = tmp.path().join("pred");
    let stdout = ok(&[
        "predict",
        "--model-dir",
        s(&train),
        s(&inputs),
        "--out-dir",
        s(&pred),
    ]);
    assert_eq!(stdout.trim(), format!("copy\t{tag}"));
    let csv = fs::read_to_string(pred.join("predictions.csv")).unwrap();
    assert!(
        csv.starts_with("document,tag,score_a,score_b,score_c\n"),
        "{csv}"
    );
}

#[test]
fn eval_rejects_model_with_foreign_vocabulary() {
    let (tmp, corpus) = small_corpus("7");
    let train = tmp.path().join("train");
    ok(&[
        "train",
        "--corpus",
        s(&corpus),
        "--k",
        "3",
        "--iterations",
        "50",
        "--seed",
        "7",
        "--out-dir",
        s(&train),
    ]);
    // a different corpus has a different vocabulary
    let other = tmp.path().join("other");
    ok(&[
        "generate",
        "--docs-per-topic",
        "9,9,9",
        "--seed",
        "8",
        "--out-dir",
        s(&other),
    ]);
    let out = etdkit(&[
        "eval",
        "--corpus",
        s(&other),
        "--tags",
        s(&other.join("planted.csv")),
        "--model-dir",
        s(&train),
        "--out-dir",
        s(&tmp.path().join("eval")),
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("vocabulary"));

    // tampering with the stored feature space is caught as well
    let features = train.join("features.tsv");
    let text = fs::read_to_string(&features).unwrap();
    fs::write(&features, text.replacen('\t', "x\t", 1)).unwrap();
    let input = corpus.join("texts").join("etd-0001.txt");
    assert_eq!(
        code(&[
            "predict",
            "--model-dir",
            s(&train),
            s(&input),
            "--out-dir",
            s(&tmp.path().join("p"))
        ]),
        2
    );
}

#[test]
fn staged_and_combined_training_agree() {
    let (tmp, corpus) = small_corpus("9");
    let topics = tmp.path().join("topics");
    let staged = tmp.path().join("staged");
    let combined = tmp.path().join("combined");
    ok(&[
        "topics",
        "--corpus",
        s(&corpus),
        "--k",
        "3",
        "--iterations",
        "120",
        "--seed",
        "10",
        "--out-dir",
        s(&topics),
    ]);
    ok(&[
        "train",
        "--corpus",
        s(&corpus),
        "--topics-dir",
        s(&topics),
        "--seed",
        "10",
        "--out-dir",
        s(&staged),
    ]);
    ok(&[
        "train",
        "--corpus",
        s(&corpus),
        "--k",
        "3",
        "--iterations",
        "120",
        "--seed",
        "10",
        "--out-dir",
        s(&combined),
    ]);
    assert_eq!(
        fs::read(topics.join("doc_topics.csv")).unwrap(),
        fs::read(combined.join("doc_topics.csv")).unwrap()
    );
    for file in [
        "model.svm",
        "features.tsv",
        "split.csv",
        "predictions.csv",
        "eval.txt",
    ] {
        assert_eq!(
            fs::read(staged.join(file)).unwrap(),
            fs::read(combined.join(file)).unwrap(),
            "{file}"
        );
    }
}

#[test]
fn eval_on_all_documents_uses_every_row() {
    let (tmp, corpus) = small_corpus("11");
    let train = tmp.path().join("train");
    ok(&[
        "train",
        "--corpus",
        s(&corpus),
        "--k",
        "3",
        "--iterations",
        "100",
        "--seed",
        "11",
        "--out-dir",
        s(&train),
    ]);
    let eval = tmp.path().join("eval");
    ok(&[
        "eval",
        "--corpus",
        s(&corpus),
        "--tags",
        s(&train.join("doc_topics.csv")),
        "--model-dir",
        s(&train),
        "--eval-on",
        "all",
        "--out-dir",
        s(&eval),
    ]);
    let csv = fs::read_to_string(eval.join("eval.csv")).unwrap();
    assert!(!csv.is_empty());
    let text = fs::read_to_string(eval.join("eval.txt")).unwrap();
    let total: usize = text
        .lines()
        .filter(|l| l.starts_with("pred."))
        .flat_map(|l| {
            l.split('\t')
                .skip(1)
                .filter(|c| !c.ends_with('%'))
                .map(|c| c.parse::<usize>().unwrap())
        })
        .sum();
    assert_eq!(total, 40);
}

#[test]
fn analyze_defaults_to_topic_words() {
    let (tmp, corpus) = small_corpus("12");
    let topics = tmp.path().join("topics");
    ok(&[
        "topics",
        "--corpus",
        s(&corpus),
        "--k",
        "3",
        "--iterations",
        "50",
        "--seed",
        "12",
        "--out-dir",
        s(&topics),
    ]);
    let out = tmp.path().join("analyze");
    ok(&[
        "analyze",
        "--corpus",
        s(&corpus),
        "--topics-dir",
        s(&topics),
        "--out-dir",
        s(&out),
    ]);
    for f in [
        "trend.csv",
        "collocates.dot",
        "collocates.json",
        "keywords.csv",
    ] {
        assert!(out.join(f).is_file(), "{f}");
    }
    let dot = fs::read_to_string(out.join("collocates.dot")).unwrap();
    assert!(
        dot.starts_with("graph") || dot.starts_with("digraph"),
        "{dot}"
    );

    // without keywords or topic output there is nothing to analyze
    let bare = tmp.path().join("bare");
    assert_eq!(
        code(&["analyze", "--corpus", s(&corpus), "--out-dir", s(&bare)]),
        1
    );
}
