//! Caption evaluation in the single-reference regime, plus submission
//! handling in the COCO-style JSON format.

mod bleu;
mod cider;
mod meteor;
mod retrieval;
mod rouge;

pub use bleu::{bleu, sentence_bleu};
pub use cider::cider;
pub use meteor::{meteor_lite, sentence_meteor_lite};
pub use retrieval::{
    features_from_jsonl, intersection_similarity, nn_retrieve, retrieval_upper_bound,
    FeatureVector, PairwiseMetric,
};
pub use rouge::{rouge_l, sentence_rouge_l};

use std::collections::{BTreeSet, HashMap};

use serde::ser::{SerializeMap, SerializeSeq};
use serde::{Deserialize, Serialize, Serializer};

use crate::corpus::CorpusEntry;
use crate::error::{Error, Result};

pub const ROUGE_BETA: f64 = 1.2;
pub const MAX_NGRAM: usize = 4;

/// Per-clip scores, kept when per-sentence reporting is requested.
#[derive(Debug, Clone, PartialEq)]
pub struct SentenceScores {
    pub video_id: String,
    pub bleu: [f64; 4],
    pub meteor_lite: f64,
    pub rouge_l: f64,
}

impl Serialize for SentenceScores {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(7))?;
        map.serialize_entry("video_id", &self.video_id)?;
        for (i, b) in self.bleu.iter().enumerate() {
            map.serialize_entry(&format!("bleu_{}", i + 1), b)?;
        }
        map.serialize_entry("meteor_lite", &self.meteor_lite)?;
        map.serialize_entry("rouge_l", &self.rouge_l)?;
        map.end()
    }
}

/// Corpus-level metric report. Serializes with the fixed key order
/// `bleu_1..bleu_4, meteor_lite, rouge_l, cider`.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricReport {
    pub bleu: [f64; 4],
    pub meteor_lite: f64,
    pub rouge_l: f64,
    pub cider: f64,
    pub per_sentence: Option<Vec<SentenceScores>>,
}

impl Serialize for MetricReport {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let n = if self.per_sentence.is_some() { 8 } else { 7 };
        let mut map = serializer.serialize_map(Some(n))?;
        for (i, b) in self.bleu.iter().enumerate() {
            map.serialize_entry(&format!("bleu_{}", i + 1), b)?;
        }
        map.serialize_entry("meteor_lite", &self.meteor_lite)?;
        map.serialize_entry("rouge_l", &self.rouge_l)?;
        map.serialize_entry("cider", &self.cider)?;
        if let Some(per) = &self.per_sentence {
            map.serialize_entry("per_sentence", per)?;
        }
        map.end()
    }
}

impl MetricReport {
    pub fn to_json(&self) -> String {
        let mut out = serde_json::to_string_pretty(self).expect("report serializes");
        out.push('\n');
        out
    }
}

/// One item of a COCO-style submission.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubmissionItem {
    pub video_id: String,
    pub caption: String,
}

/// Parse a submission: a JSON array of `{"video_id", "caption"}`.
pub fn parse_submission(text: &str) -> Result<Vec<SubmissionItem>> {
    serde_json::from_str(text).map_err(|e| Error::MalformedJson(e.to_string()))
}

/// Serialize predictions in submission format (deterministic order).
pub fn submission_to_json(items: &[SubmissionItem]) -> String {
    struct Seq<'a>(&'a [SubmissionItem]);
    impl Serialize for Seq<'_> {
        fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
            let mut seq = s.serialize_seq(Some(self.0.len()))?;
            for item in self.0 {
                seq.serialize_element(item)?;
            }
            seq.end()
        }
    }
    let mut out = serde_json::to_string_pretty(&Seq(items)).expect("submission serializes");
    out.push('\n');
    out
}

/// Evaluate a submission against a single-reference corpus split.
///
/// The submission must cover the reference clip ids exactly — no missing,
/// extra, or duplicate ids. Captions are evaluated as-is (no anonymization),
/// with the corpus tokenization.
pub fn evaluate_submission(
    submission: &[SubmissionItem],
    references: &[CorpusEntry],
    per_sentence: bool,
) -> Result<MetricReport> {
    if references.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    let mut ref_ids = BTreeSet::new();
    for r in references {
        if !ref_ids.insert(r.clip_id.as_str()) {
            return Err(Error::DuplicateIds(vec![r.clip_id.clone()]));
        }
    }
    let mut by_id: HashMap<&str, &str> = HashMap::new();
    let mut dupes = BTreeSet::new();
    for item in submission {
        if by_id.insert(&item.video_id, &item.caption).is_some() {
            dupes.insert(item.video_id.clone());
        }
    }
    if !dupes.is_empty() {
        return Err(Error::DuplicateIds(dupes.into_iter().collect()));
    }
    let missing: Vec<String> = ref_ids
        .iter()
        .filter(|id| !by_id.contains_key(**id))
        .map(|s| s.to_string())
        .collect();
    if !missing.is_empty() {
        return Err(Error::MissingIds(missing));
    }
    let extra: Vec<String> = {
        let mut extra: Vec<String> = by_id
            .keys()
            .filter(|id| !ref_ids.contains(**id))
            .map(|s| s.to_string())
            .collect();
        extra.sort();
        extra
    };
    if !extra.is_empty() {
        return Err(Error::ExtraIds(extra));
    }

    // reference order defines pairing order
    let hyps: Vec<String> = references
        .iter()
        .map(|r| by_id[r.clip_id.as_str()].to_string())
        .collect();
    let refs: Vec<String> = references.iter().map(|r| r.sentence.clone()).collect();

    let bleu_scores = bleu(&hyps, &refs, MAX_NGRAM)?;
    let report = MetricReport {
        bleu: [
            bleu_scores[0],
            bleu_scores[1],
            bleu_scores[2],
            bleu_scores[3],
        ],
        meteor_lite: meteor_lite(&hyps, &refs)?,
        rouge_l: rouge_l(&hyps, &refs, ROUGE_BETA)?,
        cider: cider(&hyps, &refs, MAX_NGRAM)?,
        per_sentence: per_sentence.then(|| {
            references
                .iter()
                .zip(hyps.iter().zip(&refs))
                .map(|(entry, (h, r))| {
                    let b = sentence_bleu(h, r, MAX_NGRAM);
                    SentenceScores {
                        video_id: entry.clip_id.clone(),
                        bleu: [b[0], b[1], b[2], b[3]],
                        meteor_lite: sentence_meteor_lite(h, r),
                        rouge_l: sentence_rouge_l(h, r, ROUGE_BETA),
                    }
                })
                .collect()
        }),
    };
    Ok(report)
}
