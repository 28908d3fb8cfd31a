//! Corpus-level BLEU with modified n-gram precision and brevity penalty,
//! in the original unsmoothed definition: any zero n-gram precision zeroes
//! the corresponding BLEU-n.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::tokenize::vocab_tokens;

fn ngram_counts(tokens: &[String], n: usize) -> HashMap<&[String], usize> {
    let mut counts = HashMap::new();
    if tokens.len() >= n {
        for window in tokens.windows(n) {
            *counts.entry(window).or_insert(0) += 1;
        }
    }
    counts
}

/// Corpus BLEU-1..max_n over single-reference pairs.
pub fn bleu(hypotheses: &[String], references: &[String], max_n: usize) -> Result<Vec<f64>> {
    if hypotheses.len() != references.len() {
        return Err(Error::LengthMismatch {
            a: hypotheses.len(),
            b: references.len(),
        });
    }
    if hypotheses.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    if max_n == 0 {
        return Err(Error::BadParam("max_n must be at least 1".into()));
    }

    let mut clipped = vec![0usize; max_n];
    let mut totals = vec![0usize; max_n];
    let mut hyp_len = 0usize;
    let mut ref_len = 0usize;
    for (hyp, rf) in hypotheses.iter().zip(references) {
        let h = vocab_tokens(hyp);
        let r = vocab_tokens(rf);
        hyp_len += h.len();
        ref_len += r.len();
        for n in 1..=max_n {
            let h_counts = ngram_counts(&h, n);
            let r_counts = ngram_counts(&r, n);
            for (gram, &count) in &h_counts {
                let allowed = r_counts.get(gram).copied().unwrap_or(0);
                clipped[n - 1] += count.min(allowed);
            }
            totals[n - 1] += h.len().saturating_sub(n - 1);
        }
    }

    let brevity = if hyp_len == 0 {
        0.0
    } else {
        (1.0 - ref_len as f64 / hyp_len as f64).exp().min(1.0)
    };

    let precisions: Vec<f64> = (0..max_n)
        .map(|i| {
            if totals[i] == 0 {
                0.0
            } else {
                clipped[i] as f64 / totals[i] as f64
            }
        })
        .collect();

    Ok((1..=max_n)
        .map(|n| {
            if precisions[..n].iter().any(|&p| p == 0.0) {
                0.0
            } else {
                let mean_log = precisions[..n].iter().map(|p| p.ln()).sum::<f64>() / n as f64;
                brevity * mean_log.exp()
            }
        })
        .collect())
}

/// Sentence-level BLEU-1..max_n with the same unsmoothed rules.
pub fn sentence_bleu(hypothesis: &str, reference: &str, max_n: usize) -> Vec<f64> {
    bleu(
        std::slice::from_ref(&hypothesis.to_string()),
        std::slice::from_ref(&reference.to_string()),
        max_n,
    )
    .expect("single pair is a valid corpus")
}
