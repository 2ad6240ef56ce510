//! Tag prediction: TF-IDF features, train/test splits, a one-vs-rest linear
//! SVM and a confusion-matrix report.

pub mod eval;
pub mod features;
pub mod model_file;
pub mod split;
pub mod svm;

pub use eval::{ConfusionMatrix, EvalPopulation, EvalReport};
pub use features::{
    inverse_document_frequency, tfidf_row, transform_terms, vectorize, FeatureMatrix, SparseVector,
};
pub use model_file::{read_feature_space, write_feature_space, StoredModel};
pub use split::{split, stratified_split, train_size, SplitPlan};
pub use svm::{
    argmax_first, primal_objective, train_binary, train_rows, BinarySvm, SvmModel, SvmParams,
};

use crate::error::{Error, Result};
use crate::num::Real;

fn check_labels<T>(features: &FeatureMatrix<T>, labels: &[String], plan: &SplitPlan) -> Result<()> {
    if labels.len() != features.rows.len() {
        return Err(Error::Data(format!(
            "{} documents but {} tags",
            features.rows.len(),
            labels.len()
        )));
    }
    if plan.num_docs() != labels.len() {
        return Err(Error::Data(format!(
            "split covers {} documents, corpus has {}",
            plan.num_docs(),
            labels.len()
        )));
    }
    Ok(())
}

/// Trains on the rows listed in `plan.train`.
pub fn train<T: Real>(
    features: &FeatureMatrix<T>,
    labels: &[String],
    plan: &SplitPlan,
    params: &SvmParams<T>,
) -> Result<SvmModel<T>> {
    check_labels(features, labels, plan)?;
    let rows: Vec<&SparseVector<T>> = plan.train.iter().map(|&i| &features.rows[i]).collect();
    let y: Vec<&str> = plan.train.iter().map(|&i| labels[i].as_str()).collect();
    train_rows(&rows, &y, features.dim(), params)
}

/// Document indices and predicted tags for the chosen population.
pub fn predictions<T: Real>(
    model: &SvmModel<T>,
    features: &FeatureMatrix<T>,
    plan: &SplitPlan,
    population: EvalPopulation,
) -> Vec<(usize, String)> {
    let docs: Vec<usize> = match population {
        EvalPopulation::Test => plan.test.clone(),
        EvalPopulation::All => (0..features.rows.len()).collect(),
    };
    docs.into_iter()
        .map(|i| (i, model.predict(&features.rows[i]).to_string()))
        .collect()
}

/// Scores the model on the test documents (or on all of them).
pub fn evaluate<T: Real>(
    model: &SvmModel<T>,
    features: &FeatureMatrix<T>,
    labels: &[String],
    plan: &SplitPlan,
    population: EvalPopulation,
) -> Result<EvalReport<T>> {
    check_labels(features, labels, plan)?;
    let preds = predictions(model, features, plan, population);
    let predicted: Vec<&str> = preds.iter().map(|(_, p)| p.as_str()).collect();
    let truth: Vec<&str> = preds.iter().map(|(i, _)| labels[*i].as_str()).collect();
    let mut classes: Vec<String> = model.classes.clone();
    classes.extend(truth.iter().map(|s| s.to_string()));
    classes.sort();
    classes.dedup();
    EvalReport::from_confusion(ConfusionMatrix::with_classes(classes, &predicted, &truth))
}
