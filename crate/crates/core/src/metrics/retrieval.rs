//! Retrieval baselines: nearest-neighbor sentence retrieval over
//! L1-normalized visual features with the intersection similarity, and the
//! metric upper bound from oracle-selecting the closest training sentence.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metrics::{sentence_meteor_lite, sentence_rouge_l};

/// A clip's visual feature vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector {
    pub id: String,
    pub values: Vec<f64>,
}

impl FeatureVector {
    /// L1-normalize so values sum to 1. Zero, negative, or non-finite
    /// vectors are rejected.
    pub fn l1_normalized(&self) -> Result<FeatureVector> {
        if self
            .values
            .iter()
            .any(|v| !v.is_finite() || *v < 0.0)
        {
            return Err(Error::BadFeature(self.id.clone()));
        }
        let sum: f64 = self.values.iter().sum();
        if sum == 0.0 {
            return Err(Error::ZeroVector(self.id.clone()));
        }
        Ok(FeatureVector {
            id: self.id.clone(),
            values: self.values.iter().map(|v| v / sum).collect(),
        })
    }
}

/// Read feature vectors from JSON Lines `{"id", "values"}` text.
pub fn features_from_jsonl(text: &str) -> Result<Vec<FeatureVector>> {
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| serde_json::from_str(l).map_err(|e| Error::MalformedJson(e.to_string())))
        .collect()
}

/// Histogram intersection similarity of two L1-normalized vectors.
pub fn intersection_similarity(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x.min(*y)).sum()
}

/// For each test vector, the sentence of the most-similar training clip.
/// Ties break toward the lexicographically smallest training clip id.
pub fn nn_retrieve(
    test_features: &[FeatureVector],
    train_features: &[FeatureVector],
    train_sentences: &[String],
) -> Result<Vec<String>> {
    if train_features.len() != train_sentences.len() {
        return Err(Error::LengthMismatch {
            a: train_features.len(),
            b: train_sentences.len(),
        });
    }
    if test_features.is_empty() || train_features.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    let dim = train_features[0].values.len();
    for f in test_features.iter().chain(train_features) {
        if f.values.len() != dim {
            return Err(Error::DimMismatch {
                a: dim,
                b: f.values.len(),
            });
        }
    }
    let train_norm: Vec<FeatureVector> = train_features
        .iter()
        .map(|f| f.l1_normalized())
        .collect::<Result<_>>()?;

    let mut out = Vec::with_capacity(test_features.len());
    for test in test_features {
        let t = test.l1_normalized()?;
        let mut best_idx = 0usize;
        let mut best_sim = f64::NEG_INFINITY;
        for (i, train) in train_norm.iter().enumerate() {
            let sim = intersection_similarity(&t.values, &train.values);
            if sim > best_sim || (sim == best_sim && train.id < train_norm[best_idx].id) {
                best_sim = sim;
                best_idx = i;
            }
        }
        out.push(train_sentences[best_idx].clone());
    }
    Ok(out)
}

/// Pairwise sentence metric for the retrieval upper bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairwiseMetric {
    MeteorLite,
    RougeL,
}

impl PairwiseMetric {
    pub fn score(&self, hypothesis: &str, reference: &str) -> f64 {
        match self {
            PairwiseMetric::MeteorLite => sentence_meteor_lite(hypothesis, reference),
            PairwiseMetric::RougeL => sentence_rouge_l(hypothesis, reference, 1.2),
        }
    }
}

/// Best achievable corpus score when the closest training sentence (by the
/// given metric) is retrieved for every test reference: the mean of the
/// per-reference maxima.
pub fn retrieval_upper_bound(
    test_references: &[String],
    train_sentences: &[String],
    metric: PairwiseMetric,
) -> Result<f64> {
    if test_references.is_empty() || train_sentences.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    let sum: f64 = test_references
        .iter()
        .map(|rf| {
            train_sentences
                .iter()
                .map(|tr| metric.score(tr, rf))
                .fold(f64::NEG_INFINITY, f64::max)
        })
        .sum();
    Ok(sum / test_references.len() as f64)
}
