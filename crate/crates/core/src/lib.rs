//! Topic modeling, word analytics and tag prediction for collections of
//! theses and dissertations.
//!
//! The numeric modules are generic over their scalar type (see [`num`]);
//! the aliases below fix it to `f64`, which is what the CLI uses.

pub mod analytics;
pub mod classify;
pub mod corpus;
pub mod error;
pub mod lda;
pub mod num;
pub mod preprocess;
pub mod synth;

pub use error::{Error, Result};

pub type LdaConfig = lda::LdaConfig<f64>;
pub type TopicModel = lda::TopicModel<f64>;
pub type TrendReport = analytics::TrendReport<f64>;
pub type DocTrend = analytics::DocTrend<f64>;
pub type SparseVector = classify::SparseVector<f64>;
pub type FeatureMatrix = classify::FeatureMatrix<f64>;
pub type SvmParams = classify::SvmParams<f64>;
pub type BinarySvm = classify::BinarySvm<f64>;
pub type SvmModel = classify::SvmModel<f64>;
pub type StoredModel = classify::StoredModel<f64>;
pub type EvalReport = classify::EvalReport<f64>;
