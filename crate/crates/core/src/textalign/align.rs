//! Monotonic script-to-subtitle alignment and timestamp inference.
//!
//! Script dialogue lines are aligned to subtitle lines with a global
//! dynamic program over match/skip operations. A matched pair scores the
//! multiset word overlap divided by the dialogue length; every unmatched
//! element on either side costs a flat gap penalty. The optimum is exact for
//! this objective (verified against exhaustive search in the tests).
//!
//! Description sentences then inherit timestamps by linear interpolation
//! between their anchoring dialogues' subtitles, apportioned by word count,
//! and a reliability score equal to the mean word-match ratio of those
//! anchors.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::corpus::Source;
use crate::error::{Error, Result};
use crate::textalign::script::{ElementKind, ScriptElement};
use crate::textalign::srt::Subtitle;
use crate::tokenize::{count_tokens, match_tokens};

/// Parameters of the alignment objective.
#[derive(Debug, Clone, PartialEq)]
pub struct AlignParams {
    /// Cost per skipped dialogue or subtitle.
    pub gap_penalty: f64,
}

impl Default for AlignParams {
    fn default() -> Self {
        AlignParams { gap_penalty: 0.1 }
    }
}

/// One matched (dialogue, subtitle) pair.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AlignmentPair {
    /// `ordinal` of the dialogue element in the full script.
    pub dialogue_ordinal: usize,
    /// Position of the subtitle in the parsed subtitle list.
    pub subtitle_idx: usize,
    /// Matched-word ratio: |multiset overlap| / |dialogue words|.
    pub score: f64,
}

/// A sentence with inferred timestamps and reliability score.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlignedSentence {
    pub sentence: String,
    pub start_sec: f64,
    pub end_sec: f64,
    pub score: f64,
    pub source: Source,
    pub movie_id: String,
}

/// Matched-word ratio of one dialogue against one subtitle.
fn pair_score(dialogue_words: &[String], subtitle_words: &HashMap<String, usize>) -> f64 {
    if dialogue_words.is_empty() {
        return 0.0;
    }
    let mut remaining = subtitle_words.clone();
    let mut matched = 0usize;
    for w in dialogue_words {
        if let Some(count) = remaining.get_mut(w) {
            if *count > 0 {
                *count -= 1;
                matched += 1;
            }
        }
    }
    matched as f64 / dialogue_words.len() as f64
}

fn word_counts(words: &[String]) -> HashMap<String, usize> {
    let mut m = HashMap::new();
    for w in words {
        *m.entry(w.clone()).or_insert(0) += 1;
    }
    m
}

/// Globally optimal monotone alignment of dialogues to subtitles.
///
/// Maximizes `sum of pair scores - gap_penalty * (unmatched elements)`.
/// The returned pairs are strictly increasing in both coordinates and carry
/// their word-match ratios; zero-score pairs are kept (the reliability
/// filter downstream discounts them).
pub fn align_dialogue(
    dialogues: &[ScriptElement],
    subs: &[Subtitle],
    params: &AlignParams,
) -> Result<Vec<AlignmentPair>> {
    if dialogues.is_empty() || subs.is_empty() {
        return Err(Error::EmptyInput);
    }
    let gap = params.gap_penalty;
    let d_words: Vec<Vec<String>> = dialogues.iter().map(|d| match_tokens(&d.text)).collect();
    let s_words: Vec<HashMap<String, usize>> = subs
        .iter()
        .map(|s| word_counts(&match_tokens(&s.text)))
        .collect();

    let (m, n) = (dialogues.len(), subs.len());
    // dp[i][j]: best score aligning the first i dialogues to the first j subs
    let mut dp = vec![vec![0.0f64; n + 1]; m + 1];
    // 0 = match, 1 = skip dialogue, 2 = skip subtitle
    let mut back = vec![vec![0u8; n + 1]; m + 1];
    for i in 1..=m {
        dp[i][0] = -(i as f64) * gap;
        back[i][0] = 1;
    }
    for j in 1..=n {
        dp[0][j] = -(j as f64) * gap;
        back[0][j] = 2;
    }
    let mut scores = vec![vec![0.0f64; n]; m];
    for i in 1..=m {
        for j in 1..=n {
            let s = pair_score(&d_words[i - 1], &s_words[j - 1]);
            scores[i - 1][j - 1] = s;
            let matched = dp[i - 1][j - 1] + s;
            let skip_d = dp[i - 1][j] - gap;
            let skip_s = dp[i][j - 1] - gap;
            let (best, op) = if matched >= skip_d && matched >= skip_s {
                (matched, 0)
            } else if skip_d >= skip_s {
                (skip_d, 1)
            } else {
                (skip_s, 2)
            };
            dp[i][j] = best;
            back[i][j] = op;
        }
    }

    let mut pairs = Vec::new();
    let (mut i, mut j) = (m, n);
    while i > 0 || j > 0 {
        match back[i][j] {
            0 => {
                pairs.push(AlignmentPair {
                    dialogue_ordinal: dialogues[i - 1].ordinal,
                    subtitle_idx: j - 1,
                    score: scores[i - 1][j - 1],
                });
                i -= 1;
                j -= 1;
            }
            1 => i -= 1,
            _ => j -= 1,
        }
    }
    pairs.reverse();
    Ok(pairs)
}

/// Total objective value of an alignment, for oracle comparisons.
pub fn alignment_objective(
    pairs: &[AlignmentPair],
    n_dialogues: usize,
    n_subs: usize,
    params: &AlignParams,
) -> f64 {
    let matched: f64 = pairs.iter().map(|p| p.score).sum();
    let skips = (n_dialogues - pairs.len()) + (n_subs - pairs.len());
    matched - params.gap_penalty * skips as f64
}

/// Infer timestamps for the description sentences of a parsed script.
///
/// Each run of descriptions between two anchored dialogues receives the span
/// from the end of the earlier anchor's subtitle to the start of the later
/// one's, apportioned by word count. Descriptions before the first (after
/// the last) anchor are attached to that anchor subtitle's own interval.
/// The reliability score is the mean ratio of the anchors on each side.
pub fn infer_timestamps(
    alignment: &[AlignmentPair],
    script: &[ScriptElement],
    subs: &[Subtitle],
    movie_id: &str,
) -> Result<Vec<AlignedSentence>> {
    if alignment.is_empty() {
        return Err(Error::NoAnchors);
    }
    // anchor lookup by dialogue ordinal
    let by_ordinal: HashMap<usize, &AlignmentPair> =
        alignment.iter().map(|p| (p.dialogue_ordinal, p)).collect();

    // collect anchored dialogues in script order
    let anchors: Vec<&AlignmentPair> = script
        .iter()
        .filter(|e| e.kind == ElementKind::Dialogue)
        .filter_map(|e| by_ordinal.get(&e.ordinal).copied())
        .collect();
    if anchors.is_empty() {
        return Err(Error::NoAnchors);
    }

    let mut out = Vec::new();
    let mut emit_attached = |descs: &[&ScriptElement], pair: &AlignmentPair, out: &mut Vec<AlignedSentence>| {
        let sub = &subs[pair.subtitle_idx];
        for d in descs {
            out.push(AlignedSentence {
                sentence: d.text.clone(),
                start_sec: sub.start_sec,
                end_sec: sub.end_sec,
                score: pair.score,
                source: Source::Script,
                movie_id: movie_id.to_string(),
            });
        }
    };

    // walk the script, grouping description runs by their surrounding anchors
    let mut pending: Vec<&ScriptElement> = Vec::new();
    let mut prev_anchor: Option<&AlignmentPair> = None;
    for element in script {
        match element.kind {
            ElementKind::Description => pending.push(element),
            ElementKind::SceneHeading => {}
            ElementKind::Dialogue => {
                let next_anchor = by_ordinal.get(&element.ordinal).copied();
                if let Some(next) = next_anchor {
                    if !pending.is_empty() {
                        match prev_anchor {
                            Some(prev) => {
                                apportion(&pending, prev, next, subs, movie_id, &mut out, &mut emit_attached)
                            }
                            None => emit_attached(&pending, next, &mut out),
                        }
                        pending.clear();
                    }
                    prev_anchor = Some(next);
                }
            }
        }
    }
    if !pending.is_empty() {
        // trailing descriptions attach to the last anchor
        emit_attached(&pending, prev_anchor.unwrap(), &mut out);
    }
    Ok(out)
}

fn apportion(
    descs: &[&ScriptElement],
    prev: &AlignmentPair,
    next: &AlignmentPair,
    subs: &[Subtitle],
    movie_id: &str,
    out: &mut Vec<AlignedSentence>,
    emit_attached: &mut impl FnMut(&[&ScriptElement], &AlignmentPair, &mut Vec<AlignedSentence>),
) {
    let span_start = subs[prev.subtitle_idx].end_sec;
    let span_end = subs[next.subtitle_idx].start_sec;
    if span_end <= span_start {
        // overlapping anchor subtitles leave no room to interpolate
        emit_attached(descs, prev, out);
        return;
    }
    let words: Vec<f64> = descs
        .iter()
        .map(|d| count_tokens(&d.text).len() as f64)
        .collect();
    let total: f64 = words.iter().sum();
    let score = (prev.score + next.score) / 2.0;
    let span = span_end - span_start;
    let mut cursor = span_start;
    for (i, d) in descs.iter().enumerate() {
        let fraction = if total > 0.0 {
            words[i] / total
        } else {
            1.0 / descs.len() as f64
        };
        let end = if i + 1 == descs.len() {
            span_end
        } else {
            cursor + fraction * span
        };
        out.push(AlignedSentence {
            sentence: d.text.clone(),
            start_sec: cursor,
            end_sec: end,
            score,
            source: Source::Script,
            movie_id: movie_id.to_string(),
        });
        cursor = end;
    }
}

/// Split sentences into (kept, dropped) by reliability score.
pub fn reliability_filter(
    sentences: Vec<AlignedSentence>,
    min_score: f64,
) -> (Vec<AlignedSentence>, Vec<AlignedSentence>) {
    sentences.into_iter().partition(|s| s.score >= min_score)
}
