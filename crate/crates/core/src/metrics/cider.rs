//! Plain CIDEr: per-order tf-idf cosine similarity between hypothesis and
//! reference n-gram vectors, averaged over n = 1..4 and scaled by 10.
//!
//! Document frequencies come from the reference sentences, one document per
//! clip, so at least two clips are required for the idf to be defined.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::tokenize::vocab_tokens;

type Ngram = Vec<String>;

fn ngram_counts(tokens: &[String], n: usize) -> HashMap<Ngram, f64> {
    let mut counts = HashMap::new();
    if tokens.len() >= n {
        for window in tokens.windows(n) {
            *counts.entry(window.to_vec()).or_insert(0.0) += 1.0;
        }
    }
    counts
}

fn cosine(a: &HashMap<Ngram, f64>, b: &HashMap<Ngram, f64>) -> f64 {
    let dot: f64 = a
        .iter()
        .filter_map(|(k, va)| b.get(k).map(|vb| va * vb))
        .sum();
    let norm = |v: &HashMap<Ngram, f64>| v.values().map(|x| x * x).sum::<f64>().sqrt();
    let (na, nb) = (norm(a), norm(b));
    if na == 0.0 || nb == 0.0 {
        0.0
    } else {
        dot / (na * nb)
    }
}

/// Corpus CIDEr over single-reference pairs.
pub fn cider(hypotheses: &[String], references: &[String], max_n: usize) -> Result<f64> {
    if hypotheses.len() != references.len() {
        return Err(Error::LengthMismatch {
            a: hypotheses.len(),
            b: references.len(),
        });
    }
    if hypotheses.len() < 2 {
        return Err(Error::TooFewClips);
    }
    let n_clips = references.len() as f64;
    let hyp_tokens: Vec<Vec<String>> = hypotheses.iter().map(|s| vocab_tokens(s)).collect();
    let ref_tokens: Vec<Vec<String>> = references.iter().map(|s| vocab_tokens(s)).collect();

    let mut per_pair = vec![0.0f64; hypotheses.len()];
    for n in 1..=max_n {
        // document frequency over reference sentences
        let mut df: HashMap<Ngram, f64> = HashMap::new();
        let ref_counts: Vec<HashMap<Ngram, f64>> =
            ref_tokens.iter().map(|t| ngram_counts(t, n)).collect();
        for counts in &ref_counts {
            for gram in counts.keys() {
                *df.entry(gram.clone()).or_insert(0.0) += 1.0;
            }
        }
        let idf = |gram: &Ngram| -> f64 {
            let d = df.get(gram).copied().unwrap_or(0.0);
            if d == 0.0 {
                // unseen in any reference: contributes nothing to the dot
                // product but must not blow up the norm
                (n_clips / 1.0).ln()
            } else {
                (n_clips / d).ln()
            }
        };
        let weight = |counts: &HashMap<Ngram, f64>| -> HashMap<Ngram, f64> {
            counts
                .iter()
                .map(|(k, v)| (k.clone(), v * idf(k)))
                .collect()
        };
        for (i, h) in hyp_tokens.iter().enumerate() {
            let hv = weight(&ngram_counts(h, n));
            let rv = weight(&ref_counts[i]);
            per_pair[i] += cosine(&hv, &rv) / max_n as f64;
        }
    }
    Ok(10.0 * per_pair.iter().sum::<f64>() / per_pair.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_clip_identity_with_disjoint_vocab_scores_ten() {
        // every n-gram has df = 1 so idf = ln 2 > 0; identical nonzero
        // vectors have cosine 1 for each n
        let refs = vec![
            "a man walks down the street".to_string(),
            "two dogs chase one red ball".to_string(),
        ];
        let score = cider(&refs.clone(), &refs, 4).unwrap();
        assert!((score - 10.0).abs() < 1e-9, "{score}");
    }

    #[test]
    fn no_shared_ngrams_scores_zero() {
        let hyps = vec!["x y z w q".to_string(), "p r s t u".to_string()];
        let refs = vec![
            "a man walks down town".to_string(),
            "two dogs chase the ball".to_string(),
        ];
        let score = cider(&hyps, &refs, 4).unwrap();
        assert_eq!(score, 0.0);
    }

    #[test]
    fn single_clip_is_too_few() {
        assert!(matches!(
            cider(&["a".to_string()], &["a".to_string()], 4),
            Err(Error::TooFewClips)
        ));
    }

    #[test]
    fn ubiquitous_ngrams_carry_no_weight() {
        // "the" appears in every reference, so idf = 0 and matching only
        // "the" earns nothing
        let hyps = vec!["the".to_string(), "the".to_string(), "the".to_string()];
        let refs = vec![
            "the man walks far away".to_string(),
            "the dog runs very fast".to_string(),
            "the car stops right here".to_string(),
        ];
        let score = cider(&hyps, &refs, 4).unwrap();
        assert!(score.abs() < 1e-12);
    }

    #[test]
    fn score_is_within_declared_range() {
        let hyps = vec![
            "a man runs".to_string(),
            "a dog barks loudly".to_string(),
            "the car stops".to_string(),
        ];
        let refs = vec![
            "a man walks".to_string(),
            "the dog barks".to_string(),
            "a car stops here".to_string(),
        ];
        let score = cider(&hyps, &refs, 4).unwrap();
        assert!((0.0..=10.0).contains(&score), "{score}");
    }

    #[test]
    fn reorder_invariance() {
        let hyps = vec![
            "a man runs".to_string(),
            "a dog barks".to_string(),
            "the car stops".to_string(),
        ];
        let refs = vec![
            "a man walks".to_string(),
            "the dog barks".to_string(),
            "a car stops".to_string(),
        ];
        let fwd = cider(&hyps, &refs, 4).unwrap();
        let hyps_r: Vec<String> = hyps.iter().rev().cloned().collect();
        let refs_r: Vec<String> = refs.iter().rev().cloned().collect();
        let rev = cider(&hyps_r, &refs_r, 4).unwrap();
        assert!((fwd - rev).abs() < 1e-12);
    }
}
