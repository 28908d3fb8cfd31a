//! ROUGE-L: longest-common-subsequence F-measure, averaged over pairs.

use crate::error::{Error, Result};
use crate::tokenize::vocab_tokens;

fn lcs_len(a: &[String], b: &[String]) -> usize {
    if a.is_empty() || b.is_empty() {
        return 0;
    }
    let mut prev = vec![0usize; b.len() + 1];
    let mut curr = vec![0usize; b.len() + 1];
    for x in a {
        for (j, y) in b.iter().enumerate() {
            curr[j + 1] = if x == y {
                prev[j] + 1
            } else {
                prev[j + 1].max(curr[j])
            };
        }
        std::mem::swap(&mut prev, &mut curr);
    }
    prev[b.len()]
}

/// LCS-based F-score for one pair; `beta` weights recall.
pub fn sentence_rouge_l(hypothesis: &str, reference: &str, beta: f64) -> f64 {
    let h = vocab_tokens(hypothesis);
    let r = vocab_tokens(reference);
    let lcs = lcs_len(&h, &r);
    if lcs == 0 {
        return 0.0;
    }
    let p = lcs as f64 / h.len() as f64;
    let rec = lcs as f64 / r.len() as f64;
    (1.0 + beta * beta) * p * rec / (rec + beta * beta * p)
}

/// Mean per-pair ROUGE-L over the corpus.
pub fn rouge_l(hypotheses: &[String], references: &[String], beta: f64) -> Result<f64> {
    if hypotheses.len() != references.len() {
        return Err(Error::LengthMismatch {
            a: hypotheses.len(),
            b: references.len(),
        });
    }
    if hypotheses.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    let sum: f64 = hypotheses
        .iter()
        .zip(references)
        .map(|(h, r)| sentence_rouge_l(h, r, beta))
        .sum();
    Ok(sum / hypotheses.len() as f64)
}
