//! Subtitle/script parsing and script-to-subtitle alignment.

mod align;
mod script;
mod srt;

pub use align::{
    align_dialogue, alignment_objective, infer_timestamps, reliability_filter, AlignParams,
    AlignedSentence, AlignmentPair,
};
pub use script::{parse_script, ElementKind, ScriptElement, ScriptHints};
pub use srt::{parse_srt, serialize_srt, SrtWarning, Subtitle};

use crate::error::{Error, Result};

/// Read aligned sentences from JSON Lines text.
pub fn sentences_from_jsonl(text: &str) -> Result<Vec<AlignedSentence>> {
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| serde_json::from_str(l).map_err(|e| Error::MalformedJson(e.to_string())))
        .collect()
}

/// Write aligned sentences as JSON Lines.
pub fn sentences_to_jsonl(sentences: &[AlignedSentence]) -> String {
    let mut out = String::new();
    for s in sentences {
        out.push_str(&serde_json::to_string(s).expect("sentence serializes"));
        out.push('\n');
    }
    out
}
