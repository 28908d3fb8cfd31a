//! METEOR-lite: unigram alignment with exact and Porter-stem matching only.
//!
//! This is a declared simplification of METEOR — no WordNet synonymy and no
//! paraphrase tables — and is reported as `meteor_lite` everywhere to keep
//! the distinction visible. Alignment maximizes matches stage by stage
//! (exact first, then stems), resolving duplicate words by preferring the
//! continuation of the previous match so chunk counts stay minimal in
//! practice.

use crate::corpus::stem;
use crate::error::{Error, Result};
use crate::tokenize::vocab_tokens;

/// Greedy one-stage matcher: pairs equal keys left-to-right, preferring the
/// reference position right after the previous pick.
fn match_stage(
    hyp_keys: &[String],
    ref_keys: &[String],
    hyp_used: &mut [bool],
    ref_used: &mut [bool],
    pairs: &mut Vec<(usize, usize)>,
) {
    let mut last_ref: Option<usize> = None;
    for (i, key) in hyp_keys.iter().enumerate() {
        if hyp_used[i] {
            continue;
        }
        let preferred = last_ref.map(|r| r + 1);
        let mut chosen = None;
        if let Some(p) = preferred {
            if p < ref_keys.len() && !ref_used[p] && &ref_keys[p] == key {
                chosen = Some(p);
            }
        }
        if chosen.is_none() {
            chosen = ref_keys
                .iter()
                .enumerate()
                .find(|(j, k)| !ref_used[*j] && *k == key)
                .map(|(j, _)| j);
        }
        if let Some(j) = chosen {
            hyp_used[i] = true;
            ref_used[j] = true;
            pairs.push((i, j));
            last_ref = Some(j);
        }
    }
}

/// Number of chunks: maximal runs of matches adjacent in both sentences.
fn count_chunks(pairs: &mut [(usize, usize)]) -> usize {
    if pairs.is_empty() {
        return 0;
    }
    pairs.sort_unstable();
    let mut chunks = 1;
    for w in pairs.windows(2) {
        if w[1].0 != w[0].0 + 1 || w[1].1 != w[0].1 + 1 {
            chunks += 1;
        }
    }
    chunks
}

/// METEOR-lite for one pair.
pub fn sentence_meteor_lite(hypothesis: &str, reference: &str) -> f64 {
    let h = vocab_tokens(hypothesis);
    let r = vocab_tokens(reference);
    if h.is_empty() || r.is_empty() {
        return 0.0;
    }
    let mut hyp_used = vec![false; h.len()];
    let mut ref_used = vec![false; r.len()];
    let mut pairs = Vec::new();

    // stage 1: exact matches
    match_stage(&h, &r, &mut hyp_used, &mut ref_used, &mut pairs);
    // stage 2: stem matches over what remains
    let h_stems: Vec<String> = h.iter().map(|w| stem(w)).collect();
    let r_stems: Vec<String> = r.iter().map(|w| stem(w)).collect();
    match_stage(&h_stems, &r_stems, &mut hyp_used, &mut ref_used, &mut pairs);

    let m = pairs.len() as f64;
    if m == 0.0 {
        return 0.0;
    }
    let chunks = count_chunks(&mut pairs) as f64;
    let precision = m / h.len() as f64;
    let recall = m / r.len() as f64;
    let f_mean = 10.0 * precision * recall / (recall + 9.0 * precision);
    let penalty = 0.5 * (chunks / m).powi(3);
    f_mean * (1.0 - penalty)
}

/// Mean per-pair METEOR-lite over the corpus.
pub fn meteor_lite(hypotheses: &[String], references: &[String]) -> Result<f64> {
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
        .map(|(h, r)| sentence_meteor_lite(h, r))
        .sum();
    Ok(sum / hypotheses.len() as f64)
}
