use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use super::classify::{accuracy, train_classifier, ClassifierConfig};
use crate::corpus::{Corpus, TfIdf};
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::nea::{doc_embeddings, sg_doc_features, train_nea_lda, train_skipgram, TrainConfig};
use crate::topic_models::{infer_lda, train_lda, SamplerConfig};

/// One block of document features.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum FeatureKind {
    TfIdf,
    /// LDA document-topic proportions.
    Lda,
    /// NEA document vectors.
    Nea,
    /// Mean skip-gram word vectors.
    Sg,
}

impl FeatureKind {
    pub fn name(self) -> &'static str {
        match self {
            FeatureKind::TfIdf => "tfidf",
            FeatureKind::Lda => "lda",
            FeatureKind::Nea => "nea",
            FeatureKind::Sg => "sg",
        }
    }
}

impl FromStr for FeatureKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "tfidf" | "tf-idf" => Ok(FeatureKind::TfIdf),
            "lda" => Ok(FeatureKind::Lda),
            "nea" => Ok(FeatureKind::Nea),
            "sg" => Ok(FeatureKind::Sg),
            other => Err(Error::config(format!("unknown feature set `{other}`"))),
        }
    }
}

/// Feature blocks concatenated left to right, written `a+b`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FeatureSpec(pub Vec<FeatureKind>);

impl FromStr for FeatureSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let kinds = s.split('+').map(str::parse).collect::<Result<Vec<_>>>()?;
        Ok(FeatureSpec(kinds))
    }
}

impl fmt::Display for FeatureSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<&str> = self.0.iter().map(|k| k.name()).collect();
        f.write_str(&names.join("+"))
    }
}

/// Settings for the upstream models the feature blocks come from.
#[derive(Debug, Clone)]
pub struct HarnessSettings {
    pub sampler: SamplerConfig,
    pub nea: TrainConfig,
    pub classifier: ClassifierConfig,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassificationRow {
    pub features: String,
    pub dim: usize,
    pub train_accuracy: f64,
    pub test_accuracy: f64,
}

/// Train and test matrices for each requested block. Upstream models are
/// fitted on `train` only; test documents are folded in.
pub fn feature_blocks(
    train: &Corpus,
    test: &Corpus,
    kinds: &[FeatureKind],
    settings: &HarnessSettings,
) -> Result<HashMap<FeatureKind, (Matrix, Matrix)>> {
    if train.num_words() != test.num_words() {
        return Err(Error::data("train and test corpora must share a vocabulary"));
    }
    let mut blocks = HashMap::new();
    let seed = settings.seed;
    if kinds.contains(&FeatureKind::TfIdf) {
        let fit = TfIdf::fit(train);
        blocks.insert(
            FeatureKind::TfIdf,
            (fit.transform(train).to_dense(), fit.transform(test).to_dense()),
        );
    }
    if kinds.iter().any(|k| matches!(k, FeatureKind::Lda | FeatureKind::Nea)) {
        let lda = train_lda(train, &settings.sampler, seed)?;
        let folded = infer_lda(&lda, test, settings.sampler.iterations, seed)?;
        if kinds.contains(&FeatureKind::Nea) {
            let nea = train_nea_lda(&lda, &settings.nea, seed)?;
            let topics = &nea.embeddings.input;
            blocks.insert(
                FeatureKind::Nea,
                (nea.doc_embeddings.vectors, doc_embeddings(&folded, topics)?.vectors),
            );
        }
        if kinds.contains(&FeatureKind::Lda) {
            blocks.insert(FeatureKind::Lda, (lda.theta, folded.theta));
        }
    }
    if kinds.contains(&FeatureKind::Sg) {
        let sg = train_skipgram(train, settings.sampler.window, &settings.nea, seed)?;
        let words = &sg.embeddings.input;
        blocks.insert(
            FeatureKind::Sg,
            (sg_doc_features(train, words)?.vectors, sg_doc_features(test, words)?.vectors),
        );
    }
    Ok(blocks)
}

/// Trains one classifier per feature spec on `train` and scores it on both
/// halves. Both corpora must be fully labeled.
pub fn classification_report(
    train: &Corpus,
    test: &Corpus,
    specs: &[FeatureSpec],
    settings: &HarnessSettings,
) -> Result<Vec<ClassificationRow>> {
    let y_train = train.labels()?;
    let y_test = test.labels()?;
    let kinds: Vec<FeatureKind> = specs.iter().flat_map(|s| s.0.iter().copied()).collect();
    let blocks = feature_blocks(train, test, &kinds, settings)?;

    specs
        .iter()
        .map(|spec| {
            let (first, rest) = spec
                .0
                .split_first()
                .ok_or_else(|| Error::config("empty feature spec"))?;
            let (mut x_train, mut x_test) = blocks[first].clone();
            for kind in rest {
                let (a, b) = &blocks[kind];
                x_train = x_train.hconcat(a)?;
                x_test = x_test.hconcat(b)?;
            }
            let clf = train_classifier(&x_train, &y_train, &settings.classifier)?;
            Ok(ClassificationRow {
                features: spec.to_string(),
                dim: x_train.cols(),
                train_accuracy: accuracy(&clf, &x_train, &y_train),
                test_accuracy: accuracy(&clf, &x_test, &y_test),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn specs_parse_and_print() {
        let s: FeatureSpec = "sg+NEA".parse().unwrap();
        assert_eq!(s.0, vec![FeatureKind::Sg, FeatureKind::Nea]);
        assert_eq!(s.to_string(), "sg+nea");
        assert!("tfidf+bow".parse::<FeatureSpec>().is_err());
    }
}
