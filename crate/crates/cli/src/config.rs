//! The persisted run configuration.
//!
//! Values are resolved as command-line flag, then `--config` file, then
//! built-in default. Every run writes the fully resolved configuration
//! (seeds included) to `runconfig.json` in its output directory, and
//! passing that file back with `--config` repeats the run.

use std::fs;
use std::path::{Path, PathBuf};

use etdkit::classify::EvalPopulation;
use etdkit::lda::AlphaMode;
use etdkit::preprocess::{PreprocessProfile, TextSource};
use serde::{Deserialize, Serialize};

use crate::CliError;

pub const RUNCONFIG_FILE: &str = "runconfig.json";

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct RunConfig {
    /// Subcommand that produced this file.
    pub command: String,
    /// Master seed; stage seeds default to it.
    pub seed: Option<u64>,
    pub paths: Paths,
    pub lda: LdaSection,
    pub classify: ClassifySection,
    pub analytics: AnalyticsSection,
    pub profiles: Profiles,
    pub report: ReportSection,
    pub generate: GenerateSection,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct Paths {
    /// Directory of `<id>.txt` files.
    pub texts: Option<PathBuf>,
    /// JSON-lines metadata file.
    pub metadata: Option<PathBuf>,
    pub out_dir: Option<PathBuf>,
    /// Output directory of an earlier `topics` run.
    pub topics_dir: Option<PathBuf>,
    /// CSV with `doc_id` and `tag` columns.
    pub tags: Option<PathBuf>,
    /// One keyword per line.
    pub keywords: Option<PathBuf>,
    /// Output directory of an earlier `train` run.
    pub model_dir: Option<PathBuf>,
    /// Files to tag with `predict`.
    pub inputs: Vec<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LdaSection {
    pub topics: usize,
    pub alpha: f64,
    pub alpha_mode: AlphaMode,
    pub beta: f64,
    pub iterations: usize,
    pub seed: Option<u64>,
    pub top_words: usize,
    pub top_docs: usize,
    pub source: TextSource,
}

impl Default for LdaSection {
    fn default() -> Self {
        let d = etdkit::LdaConfig::default();
        Self {
            topics: d.topics,
            alpha: d.alpha,
            alpha_mode: d.alpha_mode,
            beta: d.beta,
            iterations: d.iterations,
            seed: None,
            top_words: 5,
            top_docs: 5,
            source: TextSource::Body,
        }
    }
}

impl LdaSection {
    pub fn to_config(&self) -> etdkit::LdaConfig {
        etdkit::LdaConfig {
            topics: self.topics,
            alpha: self.alpha,
            alpha_mode: self.alpha_mode,
            beta: self.beta,
            iterations: self.iterations,
            seed: self.seed.expect("seeds are resolved before use"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ClassifySection {
    pub train_ratio: f64,
    pub c: f64,
    pub max_epochs: usize,
    pub seed: Option<u64>,
    pub stratified: bool,
    pub eval_on: EvalPopulation,
    pub source: TextSource,
}

impl Default for ClassifySection {
    fn default() -> Self {
        let p = etdkit::SvmParams::default();
        Self {
            train_ratio: 0.7,
            c: p.c,
            max_epochs: p.max_epochs,
            seed: None,
            stratified: false,
            eval_on: EvalPopulation::Test,
            source: TextSource::Body,
        }
    }
}

impl ClassifySection {
    pub fn svm_params(&self) -> etdkit::SvmParams {
        etdkit::SvmParams {
            c: self.c,
            max_epochs: self.max_epochs,
            ..etdkit::SvmParams::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AnalyticsSection {
    /// Explicit keyword list; takes precedence over `paths.keywords`.
    pub keywords: Vec<String>,
    pub window: usize,
    pub segments: usize,
    pub top_n: usize,
    /// Collocates listed per keyword in `keywords.csv`.
    pub associated: usize,
    /// Keep stop words in the analyzed stream.
    pub raw_stream: bool,
    pub source: TextSource,
}

impl Default for AnalyticsSection {
    fn default() -> Self {
        Self {
            keywords: Vec::new(),
            window: 5,
            segments: 10,
            top_n: 25,
            associated: 5,
            raw_stream: false,
            source: TextSource::Bibliographic,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Profiles {
    pub topic: PreprocessProfile,
    pub classify: PreprocessProfile,
}

impl Default for Profiles {
    fn default() -> Self {
        Self {
            topic: PreprocessProfile::topic(),
            classify: PreprocessProfile::classify(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ReportSection {
    /// Stamp the HTML report with the generation time.
    pub timestamp: bool,
}

impl Default for ReportSection {
    fn default() -> Self {
        Self { timestamp: true }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GenerateSection {
    pub docs_per_topic: Vec<usize>,
    pub words_per_topic: usize,
    pub background_words: usize,
    pub background_share: f64,
    pub dominant_share: f64,
    pub min_len: usize,
    pub max_len: usize,
    pub missing_advisor: usize,
    pub missing_department: usize,
}

impl Default for GenerateSection {
    fn default() -> Self {
        let d = etdkit::synth::SynthConfig::default();
        Self {
            docs_per_topic: d.docs_per_topic,
            words_per_topic: d.words_per_topic,
            background_words: d.background_words,
            background_share: d.background_share,
            dominant_share: d.dominant_share,
            min_len: d.doc_len.0,
            max_len: d.doc_len.1,
            missing_advisor: d.missing_advisor,
            missing_department: d.missing_department,
        }
    }
}

impl GenerateSection {
    pub fn to_config(&self, seed: u64) -> etdkit::synth::SynthConfig {
        etdkit::synth::SynthConfig {
            docs_per_topic: self.docs_per_topic.clone(),
            words_per_topic: self.words_per_topic,
            background_words: self.background_words,
            background_share: self.background_share,
            dominant_share: self.dominant_share,
            doc_len: (self.min_len, self.max_len),
            missing_advisor: self.missing_advisor,
            missing_department: self.missing_department,
            seed,
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path).map_err(|e| {
            CliError::Usage(format!(
                "{}: cannot read configuration: {e}",
                path.display()
            ))
        })?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::Usage(format!("{}: invalid configuration: {e}", path.display())))
    }

    /// Fills in missing seeds. A master seed given on the command line
    /// replaces the stage seeds; otherwise stage seeds from the file win.
    pub fn resolve_seeds(&mut self, cli_seed: Option<u64>) {
        if let Some(seed) = cli_seed {
            self.seed = Some(seed);
            self.lda.seed = Some(seed);
            self.classify.seed = Some(seed);
        }
        let master = *self.seed.get_or_insert_with(|| {
            // 53 bits, so the value survives JSON readers that use doubles.
            let seed = rand::random::<u64>() >> 11;
            log::info!("no seed given; using {seed}");
            seed
        });
        self.lda.seed.get_or_insert(master);
        self.classify.seed.get_or_insert(master);
    }

    /// Makes every path absolute so the file can be replayed from anywhere.
    pub fn absolutize(&mut self) {
        let p = &mut self.paths;
        for path in [
            &mut p.texts,
            &mut p.metadata,
            &mut p.out_dir,
            &mut p.topics_dir,
            &mut p.tags,
            &mut p.keywords,
            &mut p.model_dir,
        ]
        .into_iter()
        .flatten()
        {
            *path = absolute(path);
        }
        for path in &mut p.inputs {
            *path = absolute(path);
        }
    }

    pub fn out_dir(&self) -> PathBuf {
        self.paths
            .out_dir
            .clone()
            .unwrap_or_else(|| PathBuf::from("etdkit-out"))
    }

    pub fn write(&self, dir: &Path) -> Result<(), CliError> {
        let path = dir.join(RUNCONFIG_FILE);
        let text = serde_json::to_string_pretty(self).map_err(etdkit::Error::from)? + "\n";
        fs::write(&path, text).map_err(|e| CliError::io(&path, e))
    }
}

fn absolute(path: &Path) -> PathBuf {
    std::path::absolute(path).unwrap_or_else(|_| path.to_path_buf())
}
