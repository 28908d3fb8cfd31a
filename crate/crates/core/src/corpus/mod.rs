//! Corpus data model and corpus-level transforms: clip expansion, name
//! anonymization, non-visual filtering, movie-disjoint splits.

mod stats;
mod stem;

pub use stats::{
    corpus_stats, description_stats, difficulty_curve, vocab_stats, CorpusStats,
    DescriptionStats, DurationPair, SortKey, VocabStats,
};
pub use stem::stem;

use std::collections::{BTreeMap, BTreeSet, HashSet};

use regex::Regex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Where a sentence came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Source {
    Ad,
    Script,
}

/// One aligned (clip interval, sentence) record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusEntry {
    pub clip_id: String,
    pub movie_id: String,
    pub start_sec: f64,
    pub end_sec: f64,
    pub sentence: String,
    pub source: Source,
    /// Alignment reliability for script-sourced entries.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub score: Option<f64>,
}

impl CorpusEntry {
    pub fn duration_sec(&self) -> f64 {
        self.end_sec - self.start_sec
    }
}

/// Read corpus entries from JSON Lines text, enforcing interval validity and
/// clip-id uniqueness.
pub fn corpus_from_jsonl(text: &str) -> Result<Vec<CorpusEntry>> {
    let mut entries = Vec::new();
    let mut seen = HashSet::new();
    let mut dupes = BTreeSet::new();
    for (lineno, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let entry: CorpusEntry = serde_json::from_str(line)
            .map_err(|e| Error::MalformedJson(format!("line {}: {e}", lineno + 1)))?;
        if !(entry.start_sec < entry.end_sec) {
            return Err(Error::MalformedJson(format!(
                "line {}: clip {} has start_sec >= end_sec",
                lineno + 1,
                entry.clip_id
            )));
        }
        if !seen.insert(entry.clip_id.clone()) {
            dupes.insert(entry.clip_id.clone());
        }
        entries.push(entry);
    }
    if !dupes.is_empty() {
        return Err(Error::DuplicateIds(dupes.into_iter().collect()));
    }
    Ok(entries)
}

/// Write corpus entries as JSON Lines. With `blind` set the sentence field
/// is omitted (videos-only release).
pub fn corpus_to_jsonl(entries: &[CorpusEntry], blind: bool) -> String {
    #[derive(Serialize)]
    struct BlindEntry<'a> {
        clip_id: &'a str,
        movie_id: &'a str,
        start_sec: f64,
        end_sec: f64,
        source: Source,
        #[serde(skip_serializing_if = "Option::is_none")]
        score: Option<f64>,
    }
    let mut out = String::new();
    for e in entries {
        let line = if blind {
            serde_json::to_string(&BlindEntry {
                clip_id: &e.clip_id,
                movie_id: &e.movie_id,
                start_sec: e.start_sec,
                end_sec: e.end_sec,
                source: e.source,
                score: e.score,
            })
        } else {
            serde_json::to_string(e)
        };
        out.push_str(&line.expect("entry serializes"));
        out.push('\n');
    }
    out
}

/// Symmetrically expand a clip to at least `min_len_sec`, clamped to
/// `[0, movie_duration]` with any clamped deficit shifted to the other side.
/// Clips already long enough are returned unchanged.
pub fn expand_clip(
    entry: &CorpusEntry,
    min_len_sec: f64,
    movie_duration: f64,
) -> Result<CorpusEntry> {
    if min_len_sec > movie_duration || entry.end_sec > movie_duration || entry.start_sec < 0.0 {
        return Err(Error::ClipLongerThanMovie {
            clip_id: entry.clip_id.clone(),
            movie_duration,
        });
    }
    let len = entry.duration_sec();
    if len >= min_len_sec {
        return Ok(entry.clone());
    }
    let grow = (min_len_sec - len) / 2.0;
    let mut start = entry.start_sec - grow;
    let mut end = entry.end_sec + grow;
    if start < 0.0 {
        end -= start;
        start = 0.0;
    }
    if end > movie_duration {
        start -= end - movie_duration;
        end = movie_duration;
    }
    Ok(CorpusEntry {
        start_sec: start,
        end_sec: end,
        ..entry.clone()
    })
}

/// Character-name lexicon for anonymization. Names may span several words;
/// matching is case-insensitive and longest-first.
#[derive(Debug, Clone, Default)]
pub struct NameLexicon {
    /// lowercased name token sequences
    names: HashSet<Vec<String>>,
    max_words: usize,
}

impl NameLexicon {
    /// One name per line; blank lines and `#` comments ignored. Entries that
    /// would collide with the replacement words are dropped so anonymization
    /// stays idempotent.
    pub fn parse(text: &str) -> NameLexicon {
        let mut lex = NameLexicon::default();
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let tokens: Vec<String> = line.split_whitespace().map(str::to_lowercase).collect();
            if tokens.is_empty()
                || tokens == ["someone"]
                || tokens == ["people"]
            {
                continue;
            }
            lex.max_words = lex.max_words.max(tokens.len());
            lex.names.insert(tokens);
        }
        lex
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }
}

/// A whitespace token split into its name-bearing core and the punctuation
/// around it.
struct NameToken {
    lead: String,
    core: String,
    trail: String,
    /// the core carried a possessive suffix ('s)
    possessive: bool,
}

fn split_token(raw: &str) -> NameToken {
    let start = raw
        .char_indices()
        .find(|(_, c)| c.is_alphanumeric())
        .map(|(i, _)| i)
        .unwrap_or(raw.len());
    let end = raw
        .char_indices()
        .rev()
        .find(|(_, c)| c.is_alphanumeric())
        .map(|(i, c)| i + c.len_utf8())
        .unwrap_or(start);
    let lead = raw[..start].to_string();
    let mut core = raw[start..end].to_string();
    let trail = raw[end..].to_string();
    let mut possessive = false;
    for suffix in ["'s", "\u{2019}s"] {
        if let Some(stripped) = core.strip_suffix(suffix) {
            core = stripped.to_string();
            possessive = true;
            break;
        }
    }
    NameToken {
        lead,
        core,
        trail,
        possessive,
    }
}

/// Replace character names with "Someone"/"someone" and coordinated name
/// groups ("X and Y", "X, Y and Z") with "People"/"people". Idempotent.
pub fn anonymize(sentence: &str, lexicon: &NameLexicon) -> String {
    if lexicon.is_empty() {
        return sentence.to_string();
    }
    let tokens: Vec<NameToken> = sentence.split_whitespace().map(split_token).collect();
    if tokens.is_empty() {
        return sentence.to_string();
    }

    // longest lexicon match starting at token i; returns token count
    let name_at = |i: usize| -> Option<usize> {
        for len in (1..=lexicon.max_words.min(tokens.len() - i)).rev() {
            // multi-word names must not straddle punctuation
            if tokens[i..i + len - 1]
                .iter()
                .any(|t| !t.trail.is_empty() || t.possessive)
                || tokens[i + 1..i + len].iter().any(|t| !t.lead.is_empty())
            {
                continue;
            }
            let words: Vec<String> = tokens[i..i + len]
                .iter()
                .map(|t| t.core.to_lowercase())
                .collect();
            if lexicon.names.contains(&words) {
                return Some(len);
            }
        }
        None
    };

    let mut pieces: Vec<String> = Vec::new();
    let mut i = 0;
    while i < tokens.len() {
        let Some(first_len) = name_at(i) else {
            let t = &tokens[i];
            let possessive = if t.possessive { "'s" } else { "" };
            pieces.push(format!("{}{}{possessive}{}", t.lead, t.core, t.trail));
            i += 1;
            continue;
        };

        // try to extend into a coordinated group: NAME (, NAME)* (,)? and NAME
        let mut group_end = i + first_len; // exclusive token index
        let mut group_names = 1usize;
        loop {
            let connector = group_end;
            // ", NAME": comma sits in the previous token's trail
            if tokens[connector - 1].trail.contains(',') {
                if let Some(len) = name_at(connector) {
                    // only extend when the list keeps going toward an "and"
                    let after = connector + len;
                    let continues = tokens[connector + len - 1].trail.contains(',')
                        || (after < tokens.len()
                            && matches!(
                                tokens[after].core.to_lowercase().as_str(),
                                "and" | "&"
                            ));
                    if continues {
                        group_end = connector + len;
                        group_names += 1;
                        continue;
                    }
                }
            }
            // "and NAME"
            if connector < tokens.len()
                && matches!(tokens[connector].core.to_lowercase().as_str(), "and" | "&")
                && tokens[connector].trail.is_empty()
            {
                if let Some(len) = name_at(connector + 1) {
                    group_end = connector + 1 + len;
                    group_names += 1;
                    continue;
                }
            }
            break;
        }

        let sentence_initial = i == 0;
        let replacement = if group_names >= 2 {
            if sentence_initial {
                "People"
            } else {
                "people"
            }
        } else if sentence_initial {
            "Someone"
        } else {
            "someone"
        };
        let last = group_end - 1;
        let possessive = if tokens[last].possessive { "'s" } else { "" };
        pieces.push(format!(
            "{}{replacement}{possessive}{}",
            tokens[i].lead, tokens[last].trail
        ));
        i = group_end;
    }
    pieces.join(" ")
}

/// Why [`filter_nonvisual`] dropped an entry.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case", tag = "reason")]
pub enum DropReason {
    /// Interval lies fully inside the movie's intro or outro stretch.
    IntroOutro,
    /// Sentence matched a user-supplied drop pattern.
    Pattern { pattern: String },
}

/// Compile drop patterns, one regular expression per line.
pub fn parse_drop_patterns(text: &str) -> Result<Vec<Regex>> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(|l| {
            Regex::new(l).map_err(|e| Error::BadPattern {
                pattern: l.to_string(),
                reason: e.to_string(),
            })
        })
        .collect()
}

/// Drop entries inside the intro/outro stretches or matching a drop pattern.
pub fn filter_nonvisual(
    entries: Vec<CorpusEntry>,
    movie_duration: f64,
    intro_outro_sec: f64,
    patterns: &[Regex],
) -> (Vec<CorpusEntry>, Vec<(CorpusEntry, DropReason)>) {
    let mut kept = Vec::new();
    let mut dropped = Vec::new();
    'entry: for entry in entries {
        if entry.end_sec <= intro_outro_sec
            || entry.start_sec >= movie_duration - intro_outro_sec
        {
            dropped.push((entry, DropReason::IntroOutro));
            continue;
        }
        for pattern in patterns {
            if pattern.is_match(&entry.sentence) {
                let reason = DropReason::Pattern {
                    pattern: pattern.as_str().to_string(),
                };
                dropped.push((entry, reason));
                continue 'entry;
            }
        }
        kept.push(entry);
    }
    (kept, dropped)
}

/// Evaluation split names.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Split {
    Train,
    Val,
    PublicTest,
    BlindTest,
}

impl Split {
    pub fn as_str(&self) -> &'static str {
        match self {
            Split::Train => "train",
            Split::Val => "val",
            Split::PublicTest => "public_test",
            Split::BlindTest => "blind_test",
        }
    }

    fn parse(s: &str) -> Option<Split> {
        match s {
            "train" => Some(Split::Train),
            "val" => Some(Split::Val),
            "public_test" => Some(Split::PublicTest),
            "blind_test" => Some(Split::BlindTest),
            _ => None,
        }
    }
}

/// Parse a `movie_id,split` CSV; a `movie_id,split` header line is allowed.
pub fn parse_split_assignment(text: &str) -> Result<BTreeMap<String, Split>> {
    let mut map = BTreeMap::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || (lineno == 0 && line == "movie_id,split") {
            continue;
        }
        let Some((movie, split)) = line.split_once(',') else {
            return Err(Error::MalformedJson(format!(
                "split assignment line {}: expected movie_id,split",
                lineno + 1
            )));
        };
        let movie = movie.trim().to_string();
        let Some(split) = Split::parse(split.trim()) else {
            return Err(Error::MalformedJson(format!(
                "split assignment line {}: unknown split {:?}",
                lineno + 1,
                split.trim()
            )));
        };
        if map.insert(movie.clone(), split).is_some() {
            return Err(Error::ConflictingAssignment(movie));
        }
    }
    Ok(map)
}

/// Corpus partitioned by movie.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Splits {
    pub train: Vec<CorpusEntry>,
    pub val: Vec<CorpusEntry>,
    pub public_test: Vec<CorpusEntry>,
    pub blind_test: Vec<CorpusEntry>,
}

impl Splits {
    pub fn get(&self, split: Split) -> &[CorpusEntry] {
        match split {
            Split::Train => &self.train,
            Split::Val => &self.val,
            Split::PublicTest => &self.public_test,
            Split::BlindTest => &self.blind_test,
        }
    }
}

/// Partition a corpus by the movie-to-split assignment. Every movie present
/// in the corpus must be assigned; the same movie never lands in two splits.
pub fn split_by_movie(
    entries: &[CorpusEntry],
    assignment: &BTreeMap<String, Split>,
) -> Result<Splits> {
    let mut splits = Splits::default();
    for entry in entries {
        let split = assignment
            .get(&entry.movie_id)
            .ok_or_else(|| Error::UnassignedMovie(entry.movie_id.clone()))?;
        let bucket = match split {
            Split::Train => &mut splits.train,
            Split::Val => &mut splits.val,
            Split::PublicTest => &mut splits.public_test,
            Split::BlindTest => &mut splits.blind_test,
        };
        bucket.push(entry.clone());
    }
    Ok(splits)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn entry(clip: &str, movie: &str, start: f64, end: f64, sentence: &str) -> CorpusEntry {
        CorpusEntry {
            clip_id: clip.into(),
            movie_id: movie.into(),
            start_sec: start,
            end_sec: end,
            sentence: sentence.into(),
            source: Source::Ad,
            score: None,
        }
    }

    #[test]
    fn expand_short_clip_symmetrically() {
        let e = entry("c1", "m", 10.0, 11.2, "x");
        let out = expand_clip(&e, 2.0, 7200.0).unwrap();
        assert!((out.start_sec - 9.6).abs() < 1e-9);
        assert!((out.end_sec - 11.6).abs() < 1e-9);
        assert!((out.duration_sec() - 2.0).abs() < 1e-9);
    }

    #[test]
    fn expand_clamps_at_movie_start() {
        let e = entry("c1", "m", 0.1, 0.5, "x");
        let out = expand_clip(&e, 2.0, 7200.0).unwrap();
        assert_eq!(out.start_sec, 0.0);
        assert!((out.end_sec - 2.0).abs() < 1e-9);
    }

    #[test]
    fn expand_clamps_at_movie_end() {
        let e = entry("c1", "m", 99.5, 99.9, "x");
        let out = expand_clip(&e, 2.0, 100.0).unwrap();
        assert!((out.start_sec - 98.0).abs() < 1e-9);
        assert_eq!(out.end_sec, 100.0);
    }

    #[test]
    fn expand_leaves_long_clips_alone() {
        let e = entry("c1", "m", 5.0, 8.0, "x");
        assert_eq!(expand_clip(&e, 2.0, 100.0).unwrap(), e);
    }

    #[test]
    fn expand_rejects_impossible_fit() {
        let e = entry("c1", "m", 0.0, 1.0, "x");
        assert!(matches!(
            expand_clip(&e, 2.0, 1.5),
            Err(Error::ClipLongerThanMovie { .. })
        ));
    }

    fn lexicon() -> NameLexicon {
        NameLexicon::parse("Harry\nRon\nHermione\nUncle Vernon\n")
    }

    #[test]
    fn single_name_becomes_someone() {
        assert_eq!(anonymize("Harry smiles.", &lexicon()), "Someone smiles.");
        assert_eq!(
            anonymize("Then Harry smiles.", &lexicon()),
            "Then someone smiles."
        );
    }

    #[test]
    fn coordinated_names_become_people() {
        assert_eq!(anonymize("Harry and Ron run.", &lexicon()), "People run.");
        assert_eq!(
            anonymize("Harry, Ron and Hermione leave.", &lexicon()),
            "People leave."
        );
        assert_eq!(
            anonymize("She waves at Harry and Ron.", &lexicon()),
            "She waves at people."
        );
    }

    #[test]
    fn unmatched_sentences_pass_through() {
        let s = "A dog barks at the moon.";
        assert_eq!(anonymize(s, &lexicon()), s);
    }

    #[test]
    fn multi_word_names_match_longest_first() {
        assert_eq!(
            anonymize("Uncle Vernon grunts.", &lexicon()),
            "Someone grunts."
        );
    }

    #[test]
    fn possessives_are_preserved() {
        assert_eq!(anonymize("Harry's wand snaps.", &lexicon()), "Someone's wand snaps.");
    }

    #[test]
    fn punctuation_around_names_is_kept() {
        assert_eq!(anonymize("\"Harry!\" she cries.", &lexicon()), "\"Someone!\" she cries.");
    }

    #[test]
    fn anonymize_is_idempotent() {
        let cases = [
            "Harry smiles.",
            "Harry and Ron run.",
            "Harry, Ron and Hermione leave.",
            "Uncle Vernon watches Harry.",
            "Nothing to see here.",
        ];
        for s in cases {
            let once = anonymize(s, &lexicon());
            assert_eq!(anonymize(&once, &lexicon()), once, "not idempotent for {s:?}");
        }
    }

    #[test]
    fn comma_pair_without_and_stays_singular() {
        // "Harry, Ron." is not a coordination; each name anonymizes alone
        assert_eq!(
            anonymize("Harry, Ron.", &lexicon()),
            "Someone, someone."
        );
    }

    #[test]
    fn intro_outro_filter() {
        let entries = vec![
            entry("c1", "m", 3.0, 8.0, "Production logo."),
            entry("c2", "m", 500.0, 505.0, "A man runs."),
            entry("c3", "m", 7150.0, 7190.0, "Credits roll."),
        ];
        let (kept, dropped) = filter_nonvisual(entries, 7200.0, 90.0, &[]);
        assert_eq!(kept.len(), 1);
        assert_eq!(kept[0].clip_id, "c2");
        assert_eq!(dropped.len(), 2);
        assert!(dropped.iter().all(|(_, r)| *r == DropReason::IntroOutro));
    }

    #[test]
    fn pattern_filter() {
        let patterns = parse_drop_patterns("(?i)subtitle\n").unwrap();
        let entries = vec![
            entry("c1", "m", 500.0, 505.0, "Subtitles appear."),
            entry("c2", "m", 600.0, 605.0, "A man runs."),
        ];
        let (kept, dropped) = filter_nonvisual(entries, 7200.0, 90.0, &patterns);
        assert_eq!(kept.len(), 1);
        assert_eq!(kept[0].clip_id, "c2");
        assert!(matches!(dropped[0].1, DropReason::Pattern { .. }));
    }

    #[test]
    fn bad_pattern_is_an_error() {
        assert!(matches!(
            parse_drop_patterns("([unclosed\n"),
            Err(Error::BadPattern { .. })
        ));
    }

    #[test]
    fn split_partitions_by_movie() {
        let entries = vec![
            entry("a1", "m1", 0.0, 1.0, "x"),
            entry("a2", "m1", 2.0, 3.0, "y"),
            entry("b1", "m2", 0.0, 1.0, "z"),
        ];
        let assignment =
            parse_split_assignment("m1,train\nm2,public_test\n").unwrap();
        let splits = split_by_movie(&entries, &assignment).unwrap();
        assert_eq!(splits.train.len(), 2);
        assert_eq!(splits.public_test.len(), 1);
        assert!(splits.val.is_empty());
        let total = splits.train.len()
            + splits.val.len()
            + splits.public_test.len()
            + splits.blind_test.len();
        assert_eq!(total, entries.len());
    }

    #[test]
    fn unassigned_movie_is_an_error() {
        let entries = vec![entry("a1", "m9", 0.0, 1.0, "x")];
        let assignment = parse_split_assignment("m1,train\n").unwrap();
        assert!(matches!(
            split_by_movie(&entries, &assignment),
            Err(Error::UnassignedMovie(m)) if m == "m9"
        ));
    }

    #[test]
    fn doubly_assigned_movie_is_a_conflict() {
        assert!(matches!(
            parse_split_assignment("m1,train\nm1,val\n"),
            Err(Error::ConflictingAssignment(m)) if m == "m1"
        ));
    }

    #[test]
    fn blind_serialization_omits_sentences() {
        let entries = vec![entry("a1", "m1", 0.0, 1.0, "secret sentence")];
        let blind = corpus_to_jsonl(&entries, true);
        assert!(!blind.contains("sentence"));
        assert!(!blind.contains("secret"));
        assert!(blind.contains("\"clip_id\":\"a1\""));
        let open = corpus_to_jsonl(&entries, false);
        assert!(open.contains("secret sentence"));
    }

    #[test]
    fn corpus_jsonl_round_trip_and_validation() {
        let entries = vec![
            entry("a1", "m1", 0.0, 1.5, "hello there"),
            entry("a2", "m1", 2.0, 3.0, "more text"),
        ];
        let text = corpus_to_jsonl(&entries, false);
        let back = corpus_from_jsonl(&text).unwrap();
        assert_eq!(back, entries);

        let dup = corpus_to_jsonl(&[entries[0].clone(), entries[0].clone()], false);
        assert!(matches!(
            corpus_from_jsonl(&dup),
            Err(Error::DuplicateIds(ids)) if ids == vec!["a1".to_string()]
        ));
    }
}
