use std::collections::{BTreeSet, HashMap};
use std::fs;
use std::path::{Path, PathBuf};

use etdkit::analytics::{self, TermQuery};
use etdkit::classify::{self, model_file, EvalPopulation, SplitPlan};
use etdkit::corpus::{load_corpus, Corpus};
use etdkit::lda::{self, export, AlphaMode};
use etdkit::preprocess::{build_tokenized_corpus, PreprocessProfile, TextSource, TokenizedCorpus};
use etdkit::{EvalReport, FeatureMatrix, StoredModel};

use crate::config::RunConfig;
use crate::{
    AnalyzeArgs, Cli, CliError, Command, CorpusArgs, EvalArgs, GenerateArgs, LdaArgs, PredictArgs,
    TagArgs, TopicsArgs, TrainArgs,
};

pub const MODEL_FILE: &str = "model.svm";
pub const FEATURES_FILE: &str = "features.tsv";
pub const PROFILE_FILE: &str = "profile.json";
pub const SPLIT_FILE: &str = "split.csv";

type Result<T, E = CliError> = std::result::Result<T, E>;

/// Prints a line to stdout, ignoring failures such as a closed pipe.
macro_rules! say {
    ($($arg:tt)*) => {{
        use std::io::Write as _;
        let _ = writeln!(std::io::stdout().lock(), $($arg)*);
    }};
}

fn say_raw(text: &str) {
    use std::io::Write as _;
    let _ = std::io::stdout().lock().write_all(text.as_bytes());
}

pub fn dispatch(cli: Cli) -> Result<()> {
    let mut cfg = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    let name = cli.command.name();
    if !cfg.command.is_empty() && cfg.command != name {
        log::info!(
            "configuration was written by `{}`; running `{name}`",
            cfg.command
        );
    }
    cfg.command = name.to_string();
    if let Some(dir) = cli.out_dir {
        cfg.paths.out_dir = Some(dir);
    }
    match cli.command {
        Command::Ingest(a) => apply_corpus(&mut cfg, &a),
        Command::Topics(a) => apply_topics(&mut cfg, &a),
        Command::Analyze(a) => apply_analyze(&mut cfg, &a),
        Command::Train(a) => apply_train(&mut cfg, &a),
        Command::Predict(a) => apply_predict(&mut cfg, &a),
        Command::Eval(a) => apply_eval(&mut cfg, &a),
        Command::Generate(a) => apply_generate(&mut cfg, &a),
    }
    cfg.resolve_seeds(cli.seed);
    cfg.absolutize();
    execute(&cfg)
}

/// Runs the command recorded in `cfg.command` with fully resolved settings.
pub fn execute(cfg: &RunConfig) -> Result<()> {
    let out = cfg.out_dir();
    fs::create_dir_all(&out).map_err(|e| CliError::io(&out, e))?;
    match cfg.command.as_str() {
        "ingest" => ingest(cfg, &out)?,
        "topics" => topics(cfg, &out)?,
        "analyze" => analyze(cfg, &out)?,
        "train" => train(cfg, &out)?,
        "predict" => predict(cfg, &out)?,
        "eval" => eval(cfg, &out)?,
        "generate" => generate(cfg, &out)?,
        other => return Err(CliError::Usage(format!("unknown command `{other}`"))),
    }
    cfg.write(&out)
}

// ---------------------------------------------------------------------------
// argument merging

fn apply_corpus(cfg: &mut RunConfig, a: &CorpusArgs) {
    if let Some(root) = &a.corpus {
        cfg.paths.texts = Some(root.join("texts"));
        cfg.paths.metadata = Some(root.join("metadata.jsonl"));
    }
    if let Some(t) = &a.texts {
        cfg.paths.texts = Some(t.clone());
    }
    if let Some(m) = &a.metadata {
        cfg.paths.metadata = Some(m.clone());
    }
}

fn apply_lda(cfg: &mut RunConfig, a: &LdaArgs) {
    let l = &mut cfg.lda;
    if let Some(k) = a.topics {
        l.topics = k;
    }
    if let Some(v) = a.alpha {
        l.alpha = v;
    }
    if a.alpha_per_topic {
        l.alpha_mode = AlphaMode::PerTopic;
    }
    if let Some(v) = a.beta {
        l.beta = v;
    }
    if let Some(v) = a.iterations {
        l.iterations = v;
    }
    if let Some(s) = a.topic_source {
        l.source = s.into();
    }
}

fn apply_tags(cfg: &mut RunConfig, a: &TagArgs) {
    if let Some(t) = &a.tags {
        cfg.paths.tags = Some(t.clone());
    }
    if let Some(d) = &a.topics_dir {
        cfg.paths.topics_dir = Some(d.clone());
    }
}

fn apply_topics(cfg: &mut RunConfig, a: &TopicsArgs) {
    apply_corpus(cfg, &a.corpus);
    apply_lda(cfg, &a.lda);
    if let Some(n) = a.top_words {
        cfg.lda.top_words = n;
    }
    if let Some(n) = a.top_docs {
        cfg.lda.top_docs = n;
    }
    if a.no_timestamp {
        cfg.report.timestamp = false;
    }
}

fn apply_analyze(cfg: &mut RunConfig, a: &AnalyzeArgs) {
    apply_corpus(cfg, &a.corpus);
    let s = &mut cfg.analytics;
    if !a.keywords.is_empty() {
        s.keywords = a.keywords.clone();
    }
    if let Some(v) = a.window {
        s.window = v;
    }
    if let Some(v) = a.segments {
        s.segments = v;
    }
    if let Some(v) = a.top_n {
        s.top_n = v;
    }
    if a.raw_stream {
        s.raw_stream = true;
    }
    if let Some(src) = a.source {
        s.source = src.into();
    }
    if let Some(f) = &a.keywords_file {
        cfg.paths.keywords = Some(f.clone());
    }
    if let Some(d) = &a.topics_dir {
        cfg.paths.topics_dir = Some(d.clone());
    }
}

fn apply_train(cfg: &mut RunConfig, a: &TrainArgs) {
    apply_corpus(cfg, &a.corpus);
    apply_tags(cfg, &a.tags);
    apply_lda(cfg, &a.lda);
    let c = &mut cfg.classify;
    if let Some(v) = a.ratio {
        c.train_ratio = v;
    }
    if let Some(v) = a.c {
        c.c = v;
    }
    if let Some(v) = a.max_epochs {
        c.max_epochs = v;
    }
    if a.stratified {
        c.stratified = true;
    }
    if let Some(p) = a.eval_on {
        c.eval_on = p.into();
    }
}

fn apply_predict(cfg: &mut RunConfig, a: &PredictArgs) {
    if let Some(d) = &a.model_dir {
        cfg.paths.model_dir = Some(d.clone());
    }
    if !a.inputs.is_empty() {
        cfg.paths.inputs = a.inputs.clone();
    }
}

fn apply_eval(cfg: &mut RunConfig, a: &EvalArgs) {
    apply_corpus(cfg, &a.corpus);
    apply_tags(cfg, &a.tags);
    if let Some(d) = &a.model_dir {
        cfg.paths.model_dir = Some(d.clone());
    }
    if let Some(p) = a.eval_on {
        cfg.classify.eval_on = p.into();
    }
}

fn apply_generate(cfg: &mut RunConfig, a: &GenerateArgs) {
    let g = &mut cfg.generate;
    if !a.docs_per_topic.is_empty() {
        g.docs_per_topic = a.docs_per_topic.clone();
    }
    if let Some(v) = a.min_len {
        g.min_len = v;
    }
    if let Some(v) = a.max_len {
        g.max_len = v;
    }
}

// ---------------------------------------------------------------------------
// helpers

fn write_file(path: &Path, bytes: impl AsRef<[u8]>) -> Result<()> {
    fs::write(path, bytes).map_err(|e| CliError::io(path, e))
}

fn read_file(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

fn with_buffer<F>(f: F) -> Result<Vec<u8>>
where
    F: FnOnce(&mut Vec<u8>) -> etdkit::Result<()>,
{
    let mut buf = Vec::new();
    f(&mut buf)?;
    Ok(buf)
}

fn required<'a>(path: &'a Option<PathBuf>, what: &str) -> Result<&'a Path> {
    path.as_deref()
        .ok_or_else(|| CliError::Usage(format!("missing {what}")))
}

fn load(cfg: &RunConfig) -> Result<Corpus> {
    let texts = required(&cfg.paths.texts, "text directory (--corpus or --texts)")?;
    let metadata = required(
        &cfg.paths.metadata,
        "metadata file (--corpus or --metadata)",
    )?;
    let loaded = load_corpus(texts, metadata)?;
    if loaded.corpus.is_empty() {
        return Err(etdkit::Error::Data(format!(
            "no documents found in {} with metadata in {}",
            texts.display(),
            metadata.display()
        ))
        .into());
    }
    Ok(loaded.corpus)
}

fn tokenize(corpus: &Corpus, profile: &PreprocessProfile, source: TextSource) -> TokenizedCorpus {
    build_tokenized_corpus(corpus, profile, source)
}

/// Reads `doc_id` and `tag` columns from a CSV with a header row.
fn read_tags(path: &Path) -> Result<HashMap<String, String>> {
    let mut reader = csv::Reader::from_path(path).map_err(etdkit::Error::from)?;
    let headers = reader.headers().map_err(etdkit::Error::from)?.clone();
    let col = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| etdkit::Error::Data(format!("{}: no `{name}` column", path.display())))
    };
    let (id_col, tag_col) = (col("doc_id")?, col("tag")?);
    let mut tags = HashMap::new();
    for record in reader.records() {
        let record = record.map_err(etdkit::Error::from)?;
        tags.insert(record[id_col].to_string(), record[tag_col].to_string());
    }
    Ok(tags)
}

/// One tag per corpus document, from a tags file, an earlier topics run, or
/// (failing both) a topic model fitted here and saved as doc_topics.csv.
fn resolve_tags(cfg: &RunConfig, corpus: &Corpus, out: &Path) -> Result<Vec<String>> {
    let file = match (&cfg.paths.tags, &cfg.paths.topics_dir) {
        (Some(tags), _) => Some(tags.clone()),
        (None, Some(dir)) => Some(dir.join("doc_topics.csv")),
        (None, None) => None,
    };
    let Some(file) = file else {
        log::info!("no tags given; fitting a topic model");
        let model = fit_topics(cfg, corpus)?;
        let csv = with_buffer(|b| export::write_doc_topics(&model, b))?;
        write_file(&out.join("doc_topics.csv"), csv)?;
        return Ok(model
            .dominant_tags()
            .iter()
            .map(|t| t.to_string())
            .collect());
    };
    let map = read_tags(&file)?;
    let mut missing = Vec::new();
    let tags: Vec<String> = corpus
        .ids()
        .map(|id| match map.get(id) {
            Some(t) => t.clone(),
            None => {
                missing.push(id.to_string());
                String::new()
            }
        })
        .collect();
    if !missing.is_empty() {
        return Err(etdkit::Error::Data(format!(
            "{}: no tag for {} document(s): {}",
            file.display(),
            missing.len(),
            missing.join(", ")
        ))
        .into());
    }
    if map.len() > tags.len() {
        log::warn!(
            "{}: {} tag(s) for unknown documents ignored",
            file.display(),
            map.len() - tags.len()
        );
    }
    Ok(tags)
}

fn fit_topics(cfg: &RunConfig, corpus: &Corpus) -> Result<etdkit::TopicModel> {
    let tc = tokenize(corpus, &cfg.profiles.topic, cfg.lda.source);
    Ok(lda::fit(&tc, &cfg.lda.to_config())?)
}

/// "Topic " when every class is a single letter tag, otherwise nothing.
fn label_prefix(classes: &[String]) -> &'static str {
    let letters = classes
        .iter()
        .all(|c| c.len() == 1 && c.as_bytes()[0].is_ascii_lowercase());
    if letters {
        "Topic "
    } else {
        ""
    }
}

fn write_report(report: &EvalReport, out: &Path) -> Result<String> {
    let prefix = label_prefix(report.confusion.classes());
    let text = report.render_text(prefix);
    write_file(&out.join("eval.txt"), &text)?;
    let csv = with_buffer(|b| report.write_csv(prefix, b))?;
    write_file(&out.join("eval.csv"), csv)?;
    Ok(text)
}

// ---------------------------------------------------------------------------
// commands

fn ingest(cfg: &RunConfig, out: &Path) -> Result<()> {
    let corpus = load(cfg)?;
    let docs = corpus.documents();
    let no_advisor = docs.iter().filter(|d| is_blank(&d.meta.advisor)).count();
    let no_department = docs.iter().filter(|d| is_blank(&d.meta.department)).count();
    say!(
        "{} documents; {no_advisor} missing advisor; {no_department} missing department",
        docs.len()
    );

    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "profile",
        "source",
        "documents",
        "tokens",
        "terms",
        "empty_documents",
    ])
    .map_err(etdkit::Error::from)?;
    for (profile, source) in [
        (&cfg.profiles.topic, cfg.lda.source),
        (&cfg.profiles.classify, cfg.classify.source),
    ] {
        let tc = tokenize(&corpus, profile, source);
        let source = match source {
            TextSource::Body => "body",
            TextSource::Bibliographic => "bibliographic",
        };
        say!(
            "{} profile ({source}): {} tokens, {} distinct terms",
            profile.name,
            tc.num_tokens(),
            tc.vocab.len()
        );
        w.write_record([
            profile.name.as_str(),
            source,
            &tc.num_docs().to_string(),
            &tc.num_tokens().to_string(),
            &tc.vocab.len().to_string(),
            &tc.empty_docs().len().to_string(),
        ])
        .map_err(etdkit::Error::from)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Usage(e.to_string()))?;
    write_file(&out.join("ingest.csv"), bytes)
}

fn is_blank(field: &Option<String>) -> bool {
    field.as_deref().is_none_or(|s| s.trim().is_empty())
}

fn topics(cfg: &RunConfig, out: &Path) -> Result<()> {
    let corpus = load(cfg)?;
    let model = fit_topics(cfg, &corpus)?;
    let n_words = cfg.lda.top_words;

    let doc_topics = with_buffer(|b| export::write_doc_topics(&model, b))?;
    write_file(&out.join("doc_topics.csv"), doc_topics)?;
    let words = with_buffer(|b| export::write_topic_words(&model, n_words, b))?;
    write_file(&out.join("topic_words.csv"), words)?;

    let mut ll = String::from("sweep,log_likelihood\n");
    for (i, v) in model.log_likelihood.iter().enumerate() {
        ll.push_str(&format!("{},{v}\n", i + 1));
    }
    write_file(&out.join("loglik.csv"), ll)?;

    let titles: Vec<String> = corpus
        .documents()
        .iter()
        .map(|d| d.meta.title.clone())
        .collect();
    let stamp = cfg
        .report
        .timestamp
        .then(|| chrono::Utc::now().to_rfc3339());
    let html = export::render_html(
        &model,
        &titles,
        cfg.lda.top_docs.max(n_words),
        stamp.as_deref(),
    );
    write_file(&out.join("report.html"), html)?;

    let weights = model.topic_weights();
    for (rank, &topic) in model.topic_order().iter().enumerate() {
        let words: Vec<&str> = model
            .top_words(topic, n_words)
            .into_iter()
            .map(|(w, _)| model.terms[w as usize].as_str())
            .collect();
        say!(
            "{} ({:.3}): {}",
            lda::Tag::from_rank(rank),
            weights[topic],
            words.join(" ")
        );
    }
    Ok(())
}

fn keywords(cfg: &RunConfig, out: &Path) -> Result<Vec<String>> {
    if !cfg.analytics.keywords.is_empty() {
        return Ok(cfg.analytics.keywords.clone());
    }
    if let Some(file) = &cfg.paths.keywords {
        return Ok(read_file(file)?
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .map(str::to_string)
            .collect());
    }
    let dir = cfg
        .paths
        .topics_dir
        .clone()
        .unwrap_or_else(|| out.to_path_buf());
    let file = dir.join("topic_words.csv");
    if !file.exists() {
        return Err(CliError::Usage(
            "no keywords: pass --keyword, --keywords-file or --topics-dir".into(),
        ));
    }
    let mut reader = csv::Reader::from_path(&file).map_err(etdkit::Error::from)?;
    let mut seen = BTreeSet::new();
    let mut words = Vec::new();
    for row in reader.records() {
        let row = row.map_err(etdkit::Error::from)?;
        let rank: usize = row[1].parse().unwrap_or(usize::MAX);
        if rank <= 5 && seen.insert(row[2].to_string()) {
            words.push(row[2].to_string());
        }
    }
    Ok(words)
}

fn analyze(cfg: &RunConfig, out: &Path) -> Result<()> {
    let a = &cfg.analytics;
    let words = keywords(cfg, out)?;
    let mut profile = cfg.profiles.topic.clone();
    if a.raw_stream {
        profile = profile.with_stopwords(BTreeSet::new());
    }
    let queries = words
        .iter()
        .map(|w| {
            let q = TermQuery::parse(w)?;
            Ok(if profile.lowercase {
                q.to_lowercase()
            } else {
                q
            })
        })
        .collect::<etdkit::Result<Vec<_>>>()?;
    if queries.is_empty() {
        return Err(CliError::Usage("keyword list is empty".into()));
    }

    let corpus = load(cfg)?;
    let tc = tokenize(&corpus, &profile, a.source);

    let reports = queries
        .iter()
        .map(|q| analytics::trend::<f64>(&tc, q, a.segments))
        .collect::<etdkit::Result<Vec<_>>>()?;
    let trend = with_buffer(|b| analytics::write_trend_csv(&reports, b))?;
    write_file(&out.join("trend.csv"), trend)?;

    let graph = analytics::collocates(&tc, &queries, a.window, a.top_n)?;
    write_file(&out.join("collocates.dot"), graph.to_dot())?;
    write_file(&out.join("collocates.json"), graph.to_json()?)?;

    let counts = analytics::keyword_counts(&tc, &queries);
    let table = with_buffer(|b| analytics::write_keyword_table(&counts, &graph, a.associated, b))?;
    write_file(&out.join("keywords.csv"), table)?;

    for (k, n) in &counts {
        let near: Vec<&str> = graph
            .edges_for(k)
            .take(a.associated)
            .map(|e| e.term.as_str())
            .collect();
        say!("{k} ({n}): {}", near.join(", "));
    }
    Ok(())
}

fn split_plan(cfg: &RunConfig, tags: &[String]) -> Result<SplitPlan> {
    let c = &cfg.classify;
    let seed = c.seed.expect("seeds are resolved before use");
    Ok(if c.stratified {
        classify::stratified_split(tags, c.train_ratio, seed)?
    } else {
        classify::split(tags.len(), c.train_ratio, seed)?
    })
}

fn write_split(plan: &SplitPlan, ids: &[String], out: &Path) -> Result<()> {
    let mut set = vec![""; ids.len()];
    for &i in &plan.train {
        set[i] = "train";
    }
    for &i in &plan.test {
        set[i] = "test";
    }
    let mut s = String::from("doc_id,set\n");
    for (id, set) in ids.iter().zip(set) {
        s.push_str(&format!("{id},{set}\n"));
    }
    write_file(&out.join(SPLIT_FILE), s)
}

fn read_split(path: &Path, ids: &[String]) -> Result<SplitPlan> {
    let position: HashMap<&str, usize> = ids
        .iter()
        .enumerate()
        .map(|(i, id)| (id.as_str(), i))
        .collect();
    let mut plan = SplitPlan {
        seed: 0,
        train_ratio: 0.0,
        train: Vec::new(),
        test: Vec::new(),
    };
    let mut reader = csv::Reader::from_path(path).map_err(etdkit::Error::from)?;
    for row in reader.records() {
        let row = row.map_err(etdkit::Error::from)?;
        let Some(&i) = position.get(&row[0]) else {
            return Err(etdkit::Error::Data(format!(
                "{}: document `{}` is not in the corpus",
                path.display(),
                &row[0]
            ))
            .into());
        };
        match &row[1] {
            "train" => plan.train.push(i),
            "test" => plan.test.push(i),
            other => {
                return Err(etdkit::Error::Data(format!(
                    "{}: unknown set `{other}`",
                    path.display()
                ))
                .into())
            }
        }
    }
    plan.train.sort_unstable();
    plan.test.sort_unstable();
    plan.train_ratio = plan.train.len() as f64 / ids.len() as f64;
    Ok(plan)
}

fn train(cfg: &RunConfig, out: &Path) -> Result<()> {
    let corpus = load(cfg)?;
    let tags = resolve_tags(cfg, &corpus, out)?;
    let profile = &cfg.profiles.classify;
    let tc = tokenize(&corpus, profile, cfg.classify.source);
    let features: FeatureMatrix = classify::vectorize(&tc);
    let plan = split_plan(cfg, &tags)?;
    say!(
        "split: {} train, {} test",
        plan.train.len(),
        plan.test.len()
    );

    let model = classify::train(&features, &tags, &plan, &cfg.classify.svm_params())?;
    for (class, m) in model.classes.iter().zip(&model.machines) {
        if !m.converged {
            log::warn!("class `{class}`: optimizer stopped at the epoch cap");
        }
    }

    let stored = StoredModel::new(model, &features.vocab);
    write_file(&out.join(MODEL_FILE), stored.to_text())?;
    let mut fs_buf = Vec::new();
    model_file::write_feature_space(&features.vocab, &features.idf, &mut fs_buf)
        .map_err(|e| CliError::io(&out.join(FEATURES_FILE), e))?;
    write_file(&out.join(FEATURES_FILE), fs_buf)?;
    let profile_json = serde_json::to_string_pretty(profile).map_err(etdkit::Error::from)? + "\n";
    write_file(&out.join(PROFILE_FILE), profile_json)?;
    write_split(&plan, &features.doc_ids, out)?;

    let model = &stored.model;
    let mut s = String::from("doc_id,set,tag,predicted\n");
    let in_train: BTreeSet<usize> = plan.train.iter().copied().collect();
    for (i, id) in features.doc_ids.iter().enumerate() {
        let set = if in_train.contains(&i) {
            "train"
        } else {
            "test"
        };
        let predicted = model.predict(&features.rows[i]);
        s.push_str(&format!("{id},{set},{},{predicted}\n", tags[i]));
    }
    write_file(&out.join("predictions.csv"), s)?;

    let report = classify::evaluate(model, &features, &tags, &plan, cfg.classify.eval_on)?;
    say_raw(&write_report(&report, out)?);
    Ok(())
}

struct LoadedModel {
    stored: StoredModel,
    profile: PreprocessProfile,
    vocab: etdkit::preprocess::Vocabulary,
    idf: Vec<f64>,
}

fn load_model(dir: &Path) -> Result<LoadedModel> {
    let stored: StoredModel = read_file(&dir.join(MODEL_FILE))?.parse()?;
    let profile: PreprocessProfile =
        serde_json::from_str(&read_file(&dir.join(PROFILE_FILE))?).map_err(etdkit::Error::from)?;
    let features = read_file(&dir.join(FEATURES_FILE))?;
    let (vocab, idf) = model_file::read_feature_space(features.as_bytes())?;
    stored.check_vocabulary(&vocab)?;
    Ok(LoadedModel {
        stored,
        profile,
        vocab,
        idf,
    })
}

fn predict_inputs(inputs: &[PathBuf]) -> Result<Vec<PathBuf>> {
    let mut files = Vec::new();
    for path in inputs {
        if path.is_dir() {
            let mut found: Vec<PathBuf> = fs::read_dir(path)
                .map_err(|e| CliError::io(path, e))?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|p| p.is_file() && p.extension().is_some_and(|e| e == "txt"))
                .collect();
            found.sort();
            files.extend(found);
        } else {
            files.push(path.clone());
        }
    }
    Ok(files)
}

fn predict(cfg: &RunConfig, out: &Path) -> Result<()> {
    let dir = required(&cfg.paths.model_dir, "model directory (--model-dir)")?;
    let loaded = load_model(dir)?;
    let files = predict_inputs(&cfg.paths.inputs)?;
    if files.is_empty() {
        return Err(CliError::Usage("no input files to tag".into()));
    }
    let model = &loaded.stored.model;
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["document".to_string(), "tag".to_string()];
    header.extend(model.classes.iter().map(|c| format!("score_{c}")));
    w.write_record(&header).map_err(etdkit::Error::from)?;
    for file in &files {
        let text = read_file(file)?;
        let terms = loaded.profile.terms(&text);
        let x = classify::transform_terms(&loaded.vocab, &loaded.idf, &terms);
        let tag = model.predict(&x);
        let name = file
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| file.display().to_string());
        say!("{name}\t{tag}");
        let mut row = vec![name, tag.to_string()];
        row.extend(model.decision_values(&x).iter().map(f64::to_string));
        w.write_record(&row).map_err(etdkit::Error::from)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Usage(e.to_string()))?;
    write_file(&out.join("predictions.csv"), bytes)
}

fn eval(cfg: &RunConfig, out: &Path) -> Result<()> {
    let dir = required(&cfg.paths.model_dir, "model directory (--model-dir)")?;
    let loaded = load_model(dir)?;
    let corpus = load(cfg)?;
    let tags = resolve_tags(cfg, &corpus, out)?;
    let tc = tokenize(&corpus, &loaded.profile, cfg.classify.source);
    let features: FeatureMatrix = classify::vectorize(&tc);
    loaded.stored.check_vocabulary(&features.vocab)?;

    let plan = match cfg.classify.eval_on {
        EvalPopulation::Test => read_split(&dir.join(SPLIT_FILE), &features.doc_ids)?,
        EvalPopulation::All => SplitPlan {
            seed: 0,
            train_ratio: 0.0,
            train: Vec::new(),
            test: (0..features.rows.len()).collect(),
        },
    };
    let report = classify::evaluate(
        &loaded.stored.model,
        &features,
        &tags,
        &plan,
        cfg.classify.eval_on,
    )?;
    say_raw(&write_report(&report, out)?);
    Ok(())
}

fn generate(cfg: &RunConfig, out: &Path) -> Result<()> {
    let seed = cfg.seed.expect("seeds are resolved before use");
    let synth = etdkit::synth::generate(&cfg.generate.to_config(seed))?;
    synth.write_to(out)?;
    let mut s = String::from("doc_id,tag\n");
    for (id, tag) in synth.corpus.ids().zip(synth.planted_labels()) {
        s.push_str(&format!("{id},{tag}\n"));
    }
    write_file(&out.join("planted.csv"), s)?;
    say!(
        "{} documents written to {}",
        synth.corpus.len(),
        out.display()
    );
    Ok(())
}
