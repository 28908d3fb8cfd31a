//! Movie-script parsing by indentation/uppercase heuristics.
//!
//! The classifier is intentionally simple and documented here in full:
//!
//! - a trimmed line starting with `INT.`, `EXT.`, `INT/`, `EXT/` or `I/E`
//!   is a scene heading;
//! - a full-caps line (at most `speaker_max_len` characters) immediately
//!   followed by a more-indented non-blank block is a speaker name; the
//!   indented block is that speaker's dialogue. A trailing parenthetical on
//!   the speaker line (`JOHN (V.O.)`) is dropped, as are parenthetical-only
//!   stage directions inside the dialogue block;
//! - everything else is description; consecutive description lines are
//!   merged and re-split into sentences on `.`/`!`/`?` followed by
//!   whitespace.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ElementKind {
    SceneHeading,
    Dialogue,
    Description,
}

/// One typed block of a parsed script.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScriptElement {
    pub kind: ElementKind,
    /// Present iff `kind` is [`ElementKind::Dialogue`].
    #[serde(skip_serializing_if = "Option::is_none")]
    pub speaker: Option<String>,
    pub text: String,
    /// Position in the parsed script, 0-based.
    pub ordinal: usize,
}

/// Knobs for scripts that deviate from the default plain-text format.
#[derive(Debug, Clone, PartialEq)]
pub struct ScriptHints {
    /// Minimum indentation (spaces; tabs count as 4) for a line to belong to
    /// a dialogue block.
    pub dialogue_min_indent: usize,
    /// Speaker lines longer than this are treated as description.
    pub speaker_max_len: usize,
}

impl Default for ScriptHints {
    fn default() -> Self {
        ScriptHints {
            dialogue_min_indent: 1,
            speaker_max_len: 40,
        }
    }
}

fn indent_of(line: &str) -> usize {
    let mut n = 0;
    for c in line.chars() {
        match c {
            ' ' => n += 1,
            '\t' => n += 4,
            _ => break,
        }
    }
    n
}

fn is_scene_heading(trimmed: &str) -> bool {
    ["INT.", "EXT.", "INT/", "EXT/", "I/E"]
        .iter()
        .any(|p| trimmed.starts_with(p))
}

fn is_caps_line(trimmed: &str, hints: &ScriptHints) -> bool {
    trimmed.len() <= hints.speaker_max_len
        && trimmed.chars().any(|c| c.is_alphabetic())
        && trimmed == trimmed.to_uppercase()
}

fn strip_parenthetical(name: &str) -> String {
    match name.find('(') {
        Some(pos) => name[..pos].trim().to_string(),
        None => name.trim().to_string(),
    }
}

fn is_parenthetical_only(trimmed: &str) -> bool {
    trimmed.starts_with('(') && trimmed.ends_with(')')
}

/// Split merged description text into sentences on `.` `!` `?` followed by
/// whitespace; the terminator stays with its sentence.
fn split_sentences(text: &str) -> Vec<String> {
    let chars: Vec<char> = text.chars().collect();
    let mut sentences = Vec::new();
    let mut current = String::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        current.push(c);
        if matches!(c, '.' | '!' | '?') {
            let next_ws = chars.get(i + 1).is_none_or(|n| n.is_whitespace());
            if next_ws {
                let s = current.trim().to_string();
                if !s.is_empty() {
                    sentences.push(s);
                }
                current.clear();
            }
        }
        i += 1;
    }
    let s = current.trim().to_string();
    if !s.is_empty() {
        sentences.push(s);
    }
    sentences
}

/// Parse a plain-text movie script into typed elements.
pub fn parse_script(text: &str, hints: &ScriptHints) -> Result<Vec<ScriptElement>> {
    if text.trim().is_empty() {
        return Err(Error::EmptyFile);
    }
    let lines: Vec<&str> = text.lines().collect();
    let mut elements: Vec<ScriptElement> = Vec::new();
    let mut description: Vec<String> = Vec::new();

    fn flush(description: &mut Vec<String>, elements: &mut Vec<ScriptElement>) {
        if description.is_empty() {
            return;
        }
        let merged = description.join(" ");
        description.clear();
        for sentence in split_sentences(&merged) {
            let ordinal = elements.len();
            elements.push(ScriptElement {
                kind: ElementKind::Description,
                speaker: None,
                text: sentence,
                ordinal,
            });
        }
    }

    let mut i = 0;
    while i < lines.len() {
        let line = lines[i];
        let trimmed = line.trim();
        if trimmed.is_empty() {
            flush(&mut description, &mut elements);
            i += 1;
            continue;
        }
        if is_scene_heading(trimmed) {
            flush(&mut description, &mut elements);
            let ordinal = elements.len();
            elements.push(ScriptElement {
                kind: ElementKind::SceneHeading,
                speaker: None,
                text: trimmed.to_string(),
                ordinal,
            });
            i += 1;
            continue;
        }
        if is_caps_line(trimmed, hints) {
            // speaker only if an indented dialogue block follows immediately
            let mut j = i + 1;
            let mut dialogue: Vec<&str> = Vec::new();
            while j < lines.len() {
                let next = lines[j];
                let next_trimmed = next.trim();
                if next_trimmed.is_empty() || indent_of(next) < hints.dialogue_min_indent {
                    break;
                }
                if !is_parenthetical_only(next_trimmed) {
                    dialogue.push(next_trimmed);
                }
                j += 1;
            }
            if !dialogue.is_empty() {
                flush(&mut description, &mut elements);
                let ordinal = elements.len();
                elements.push(ScriptElement {
                    kind: ElementKind::Dialogue,
                    speaker: Some(strip_parenthetical(trimmed)),
                    text: dialogue.join(" "),
                    ordinal,
                });
                i = j;
                continue;
            }
        }
        description.push(trimmed.to_string());
        i += 1;
    }
    flush(&mut description, &mut elements);
    Ok(elements)
}
