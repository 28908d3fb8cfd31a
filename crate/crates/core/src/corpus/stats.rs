//! Corpus, vocabulary, and description-output statistics, plus the
//! difficulty-vs-score analysis curve.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::Serialize;

use crate::corpus::{stem, CorpusEntry};
use crate::error::{Error, Result};
use crate::tokenize::{count_tokens, normalize_sentence, vocab_tokens};

/// A duration reported for both the expanded and the original (precise)
/// clip intervals.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DurationPair {
    pub expanded: f64,
    pub original: f64,
}

/// Corpus-level counts and durations.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorpusStats {
    pub movies: usize,
    pub words: usize,
    pub sentences: usize,
    pub clips: usize,
    pub avg_clip_sec: DurationPair,
    pub total_hours: DurationPair,
}

/// Counts and durations over a corpus. Each unique clip is counted once;
/// word counts are whitespace tokens over all sentences. The "expanded"
/// duration treats every clip as at least `min_len_sec` long (the release
/// rule), the "original" one uses the stored intervals.
pub fn corpus_stats(entries: &[CorpusEntry], min_len_sec: f64) -> CorpusStats {
    let mut movies = BTreeSet::new();
    let mut clip_durations: BTreeMap<&str, f64> = BTreeMap::new();
    let mut words = 0usize;
    for e in entries {
        movies.insert(e.movie_id.as_str());
        words += count_tokens(&e.sentence).len();
        clip_durations.entry(&e.clip_id).or_insert(e.duration_sec());
    }
    let clips = clip_durations.len();
    let original: f64 = clip_durations.values().sum();
    let expanded: f64 = clip_durations.values().map(|d| d.max(min_len_sec)).sum();
    let avg = |total: f64| if clips > 0 { total / clips as f64 } else { 0.0 };
    CorpusStats {
        movies: movies.len(),
        words,
        sentences: entries.len(),
        clips,
        avg_clip_sec: DurationPair {
            expanded: avg(expanded),
            original: avg(original),
        },
        total_hours: DurationPair {
            expanded: expanded / 3600.0,
            original: original / 3600.0,
        },
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct VocabStats {
    pub vocab_size_raw: usize,
    pub vocab_size_stemmed: usize,
}

/// Vocabulary sizes before and after stemming; every word and its
/// inflections count once after stemming.
pub fn vocab_stats(entries: &[CorpusEntry]) -> VocabStats {
    let mut raw = BTreeSet::new();
    let mut stemmed = BTreeSet::new();
    for e in entries {
        for token in vocab_tokens(&e.sentence) {
            stemmed.insert(stem(&token));
            raw.insert(token);
        }
    }
    VocabStats {
        vocab_size_raw: raw.len(),
        vocab_size_stemmed: stemmed.len(),
    }
}

/// Output statistics for a set of generated descriptions.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DescriptionStats {
    pub avg_sentence_length: f64,
    pub vocab_size: usize,
    pub unique_sentences: usize,
    /// Percentage of hypotheses whose normalized form never occurs in the
    /// training sentences.
    pub pct_novel: f64,
}

pub fn description_stats(hypotheses: &[String], training: &[String]) -> DescriptionStats {
    let train_set: BTreeSet<String> = training.iter().map(|s| normalize_sentence(s)).collect();
    let mut vocab = BTreeSet::new();
    let mut uniq = BTreeSet::new();
    let mut total_len = 0usize;
    let mut novel = 0usize;
    for h in hypotheses {
        total_len += count_tokens(h).len();
        for t in vocab_tokens(h) {
            vocab.insert(t);
        }
        let norm = normalize_sentence(h);
        if !train_set.contains(&norm) {
            novel += 1;
        }
        uniq.insert(norm);
    }
    let n = hypotheses.len();
    DescriptionStats {
        avg_sentence_length: if n > 0 { total_len as f64 / n as f64 } else { 0.0 },
        vocab_size: vocab.len(),
        unique_sentences: uniq.len(),
        pct_novel: if n > 0 {
            100.0 * novel as f64 / n as f64
        } else {
            0.0
        },
    }
}

/// Reference ordering for the difficulty analysis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SortKey {
    /// Shortest reference sentences first.
    LengthAsc,
    /// Most frequent vocabulary first (frequencies measured over the
    /// references themselves).
    WordFreqDesc,
}

/// Sort per-sentence scores by the difficulty of their reference sentences
/// and smooth with a centered mean filter (window truncated at the edges).
pub fn difficulty_curve(
    scores: &[f64],
    references: &[String],
    key: SortKey,
    window: usize,
) -> Result<Vec<f64>> {
    if scores.len() != references.len() {
        return Err(Error::LengthMismatch {
            a: scores.len(),
            b: references.len(),
        });
    }
    if window == 0 {
        return Err(Error::BadParam("window must be at least 1".into()));
    }
    let mut order: Vec<usize> = (0..references.len()).collect();
    match key {
        SortKey::LengthAsc => {
            let lens: Vec<usize> = references.iter().map(|r| count_tokens(r).len()).collect();
            order.sort_by_key(|&i| lens[i]);
        }
        SortKey::WordFreqDesc => {
            let mut freq: HashMap<String, usize> = HashMap::new();
            let tokenized: Vec<Vec<String>> =
                references.iter().map(|r| vocab_tokens(r)).collect();
            for tokens in &tokenized {
                for t in tokens {
                    *freq.entry(t.clone()).or_insert(0) += 1;
                }
            }
            let avg_freq: Vec<f64> = tokenized
                .iter()
                .map(|tokens| {
                    if tokens.is_empty() {
                        0.0
                    } else {
                        tokens.iter().map(|t| freq[t] as f64).sum::<f64>()
                            / tokens.len() as f64
                    }
                })
                .collect();
            order.sort_by(|&a, &b| avg_freq[b].partial_cmp(&avg_freq[a]).unwrap());
        }
    }
    let sorted: Vec<f64> = order.iter().map(|&i| scores[i]).collect();

    let n = sorted.len();
    let left = (window - 1) / 2;
    let right = window / 2;
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let lo = i.saturating_sub(left);
        let hi = (i + right).min(n - 1);
        let slice = &sorted[lo..=hi];
        out.push(slice.iter().sum::<f64>() / slice.len() as f64);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::Source;

    fn entry(clip: &str, movie: &str, len: f64, sentence: &str) -> CorpusEntry {
        CorpusEntry {
            clip_id: clip.into(),
            movie_id: movie.into(),
            start_sec: 10.0,
            end_sec: 10.0 + len,
            sentence: sentence.into(),
            source: Source::Ad,
            score: None,
        }
    }

    #[test]
    fn empty_corpus_stats_are_zero() {
        let s = corpus_stats(&[], 2.0);
        assert_eq!(s.movies, 0);
        assert_eq!(s.words, 0);
        assert_eq!(s.clips, 0);
        assert_eq!(s.avg_clip_sec.expanded, 0.0);
    }

    #[test]
    fn hand_counted_stats() {
        let entries = vec![
            entry("c1", "m1", 2.0, "one two three"),
            entry("c2", "m1", 2.0, "a b c d e"),
        ];
        let s = corpus_stats(&entries, 2.0);
        assert_eq!(s.words, 8);
        assert_eq!(s.sentences, 2);
        assert_eq!(s.clips, 2);
        assert_eq!(s.movies, 1);
        assert!((s.avg_clip_sec.expanded - 2.0).abs() < 1e-12);
        assert!((s.avg_clip_sec.original - 2.0).abs() < 1e-12);
    }

    #[test]
    fn total_hours_consistent_with_durations() {
        let entries = vec![
            entry("c1", "m1", 1.0, "x"),
            entry("c2", "m2", 3.0, "y"),
        ];
        let s = corpus_stats(&entries, 2.0);
        assert!((s.total_hours.original * 3600.0 - 4.0).abs() < 1e-6);
        assert!((s.total_hours.expanded * 3600.0 - 5.0).abs() < 1e-6);
    }

    #[test]
    fn stats_are_additive_over_splits() {
        let a = vec![entry("c1", "m1", 1.0, "one two")];
        let b = vec![entry("c2", "m2", 3.0, "three")];
        let both: Vec<CorpusEntry> = a.iter().chain(&b).cloned().collect();
        let (sa, sb, s) = (
            corpus_stats(&a, 2.0),
            corpus_stats(&b, 2.0),
            corpus_stats(&both, 2.0),
        );
        assert_eq!(s.words, sa.words + sb.words);
        assert_eq!(s.clips, sa.clips + sb.clips);
        assert!(
            (s.total_hours.original - sa.total_hours.original - sb.total_hours.original).abs()
                < 1e-12
        );
    }

    #[test]
    fn stemming_merges_inflections() {
        let entries = vec![entry("c1", "m1", 2.0, "runs running ran")];
        let v = vocab_stats(&entries);
        assert_eq!(v.vocab_size_raw, 3);
        assert!(v.vocab_size_stemmed <= v.vocab_size_raw);
        let entries = vec![entry("c1", "m1", 2.0, "run runs")];
        let v = vocab_stats(&entries);
        assert_eq!(v.vocab_size_raw, 2);
        assert_eq!(v.vocab_size_stemmed, 1);
    }

    #[test]
    fn empty_vocab_is_zero() {
        let v = vocab_stats(&[]);
        assert_eq!(v.vocab_size_raw, 0);
        assert_eq!(v.vocab_size_stemmed, 0);
    }

    #[test]
    fn description_stats_novelty() {
        let training = vec!["a b".to_string()];
        let all_copied = vec!["a b".to_string(), "a b".to_string()];
        let s = description_stats(&all_copied, &training);
        assert_eq!(s.pct_novel, 0.0);
        assert_eq!(s.unique_sentences, 1);

        let all_new = vec!["x y".to_string()];
        let s = description_stats(&all_new, &training);
        assert_eq!(s.pct_novel, 100.0);

        let mixed = vec!["a b".to_string(), "a b".to_string(), "c d".to_string()];
        let s = description_stats(&mixed, &training);
        assert_eq!(s.unique_sentences, 2);
        assert!((s.pct_novel - 100.0 / 3.0).abs() < 1e-9);
        assert!((s.avg_sentence_length - 2.0).abs() < 1e-12);
    }

    #[test]
    fn difficulty_constant_scores_stay_constant() {
        let scores = vec![0.5; 20];
        let refs: Vec<String> = (0..20).map(|i| format!("word{i} and more")).collect();
        let curve = difficulty_curve(&scores, &refs, SortKey::LengthAsc, 5).unwrap();
        assert!(curve.iter().all(|&v| (v - 0.5).abs() < 1e-12));
    }

    #[test]
    fn difficulty_window_one_is_reordering_only() {
        let scores = vec![0.1, 0.2, 0.3];
        let refs = vec![
            "one two three".to_string(),
            "one".to_string(),
            "one two".to_string(),
        ];
        let curve = difficulty_curve(&scores, &refs, SortKey::LengthAsc, 1).unwrap();
        assert_eq!(curve, vec![0.2, 0.3, 0.1]);
    }

    #[test]
    fn hand_computed_moving_average() {
        let scores = vec![1.0, 2.0, 3.0, 4.0];
        let refs = vec![
            "a".to_string(),
            "a b".to_string(),
            "a b c".to_string(),
            "a b c d".to_string(),
        ];
        let curve = difficulty_curve(&scores, &refs, SortKey::LengthAsc, 3).unwrap();
        assert_eq!(curve, vec![1.5, 2.0, 3.0, 3.5]);
    }

    #[test]
    fn word_freq_sort_puts_frequent_vocabulary_first() {
        // "the the" uses the most frequent token; "rare" the least
        let refs = vec![
            "rare".to_string(),
            "the the".to_string(),
            "the word".to_string(),
        ];
        let scores = vec![1.0, 2.0, 3.0];
        let curve = difficulty_curve(&scores, &refs, SortKey::WordFreqDesc, 1).unwrap();
        assert_eq!(curve, vec![2.0, 3.0, 1.0]);
    }

    #[test]
    fn difficulty_rejects_length_mismatch() {
        assert!(matches!(
            difficulty_curve(&[1.0], &[], SortKey::LengthAsc, 3),
            Err(Error::LengthMismatch { .. })
        ));
    }
}
