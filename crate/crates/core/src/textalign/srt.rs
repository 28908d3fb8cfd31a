//! SRT subtitle parsing and serialization.
//!
//! Parsing is lenient: blocks with unparseable timecodes or inverted
//! intervals are reported as warnings and skipped rather than failing the
//! whole file. HTML-like formatting tags are stripped from the text.

use std::sync::LazyLock;

use regex::Regex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One timed caption line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Subtitle {
    /// 1-based ordinal from the file.
    pub index: u32,
    pub start_sec: f64,
    pub end_sec: f64,
    pub text: String,
}

/// A skipped or suspicious block.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SrtWarning {
    /// 1-based block position in the file.
    pub block: usize,
    pub reason: String,
}

static TIMECODE: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(r"(\d{1,2}):(\d{1,2}):(\d{1,2})[,.](\d{1,3})\s*-->\s*(\d{1,2}):(\d{1,2}):(\d{1,2})[,.](\d{1,3})")
        .unwrap()
});

static TAG: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"</?[A-Za-z][^>]*>").unwrap());

fn parse_timecodes(line: &str) -> Option<(f64, f64)> {
    let caps = TIMECODE.captures(line)?;
    let field = |i: usize| caps.get(i).unwrap().as_str().parse::<f64>().unwrap();
    let start = field(1) * 3600.0 + field(2) * 60.0 + field(3) + field(4) / 1000.0;
    let end = field(5) * 3600.0 + field(6) * 60.0 + field(7) + field(8) / 1000.0;
    Some((start, end))
}

/// Parse SRT text into subtitles sorted by start time, plus per-block
/// warnings for anything skipped.
pub fn parse_srt(text: &str) -> Result<(Vec<Subtitle>, Vec<SrtWarning>)> {
    let text = text.strip_prefix('\u{feff}').unwrap_or(text);
    if text.trim().is_empty() {
        return Err(Error::EmptyFile);
    }

    let mut subs = Vec::new();
    let mut warnings = Vec::new();
    let normalized = text.replace("\r\n", "\n");
    for (block_no, block) in normalized
        .split("\n\n")
        .map(str::trim)
        .filter(|b| !b.is_empty())
        .enumerate()
    {
        let block_no = block_no + 1;
        let mut warn = |reason: &str| {
            warnings.push(SrtWarning {
                block: block_no,
                reason: reason.to_string(),
            });
        };
        let lines: Vec<&str> = block.lines().collect();
        if lines.len() < 2 {
            warn("block too short");
            continue;
        }
        let Ok(index) = lines[0].trim().parse::<u32>() else {
            warn("missing or non-numeric index line");
            continue;
        };
        let Some((start_sec, end_sec)) = parse_timecodes(lines[1]) else {
            warn("unparseable timecode line");
            continue;
        };
        if end_sec <= start_sec {
            warn("end time not after start time");
            continue;
        }
        let raw = lines[2..].join("\n");
        let text = TAG.replace_all(&raw, "").trim().to_string();
        subs.push(Subtitle {
            index,
            start_sec,
            end_sec,
            text,
        });
    }
    subs.sort_by(|a, b| a.start_sec.partial_cmp(&b.start_sec).unwrap());
    Ok((subs, warnings))
}

fn format_timecode(sec: f64) -> String {
    let millis = (sec * 1000.0).round() as u64;
    format!(
        "{:02}:{:02}:{:02},{:03}",
        millis / 3_600_000,
        millis / 60_000 % 60,
        millis / 1000 % 60,
        millis % 1000
    )
}

/// Write subtitles back out in canonical SRT form.
pub fn serialize_srt(subs: &[Subtitle]) -> String {
    let mut out = String::new();
    for sub in subs {
        out.push_str(&format!(
            "{}\n{} --> {}\n{}\n\n",
            sub.index,
            format_timecode(sub.start_sec),
            format_timecode(sub.end_sec),
            sub.text
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_single_block() {
        let (subs, warns) =
            parse_srt("1\n00:00:01,000 --> 00:00:02,500\nHello\n").unwrap();
        assert!(warns.is_empty());
        assert_eq!(
            subs,
            vec![Subtitle {
                index: 1,
                start_sec: 1.0,
                end_sec: 2.5,
                text: "Hello".into()
            }]
        );
    }

    #[test]
    fn strips_html_tags() {
        let (subs, _) = parse_srt("1\n00:00:01,000 --> 00:00:02,000\n<i>Hi</i>\n").unwrap();
        assert_eq!(subs[0].text, "Hi");
        let (subs, _) = parse_srt(
            "1\n00:00:01,000 --> 00:00:02,000\n<font color=\"#fff\">Hey</font> there\n",
        )
        .unwrap();
        assert_eq!(subs[0].text, "Hey there");
    }

    #[test]
    fn inverted_interval_is_skipped_with_warning() {
        let (subs, warns) =
            parse_srt("1\n00:00:05,000 --> 00:00:02,000\nBad\n\n2\n00:00:06,000 --> 00:00:07,000\nGood\n")
                .unwrap();
        assert_eq!(subs.len(), 1);
        assert_eq!(subs[0].text, "Good");
        assert_eq!(warns.len(), 1);
        assert_eq!(warns[0].block, 1);
    }

    #[test]
    fn bad_timecode_is_skipped_with_warning() {
        let (subs, warns) =
            parse_srt("1\nnot a timecode\nX\n\n2\n00:00:01,000 --> 00:00:02,000\nOk\n").unwrap();
        assert_eq!(subs.len(), 1);
        assert_eq!(warns.len(), 1);
    }

    #[test]
    fn multiline_text_and_crlf() {
        let (subs, _) =
            parse_srt("1\r\n00:00:01,000 --> 00:00:02,000\r\nline one\r\nline two\r\n").unwrap();
        assert_eq!(subs[0].text, "line one\nline two");
    }

    #[test]
    fn empty_file_is_an_error() {
        assert!(matches!(parse_srt(""), Err(Error::EmptyFile)));
        assert!(matches!(parse_srt("  \n \n"), Err(Error::EmptyFile)));
    }

    #[test]
    fn bom_is_tolerated() {
        let (subs, _) =
            parse_srt("\u{feff}1\n00:00:01,000 --> 00:00:02,000\nHi\n").unwrap();
        assert_eq!(subs.len(), 1);
    }

    #[test]
    fn dot_millis_are_accepted() {
        let (subs, _) = parse_srt("1\n00:00:01.500 --> 00:00:02.000\nHi\n").unwrap();
        assert!((subs[0].start_sec - 1.5).abs() < 1e-9);
    }

    #[test]
    fn round_trip_is_field_level_identity() {
        let input = "3\n01:02:03,456 --> 01:02:05,000\nTwo words\n\n7\n02:00:00,000 --> 02:00:01,250\nMore <i>text</i> here\n";
        let (subs, _) = parse_srt(input).unwrap();
        let (again, warns) = parse_srt(&serialize_srt(&subs)).unwrap();
        assert!(warns.is_empty());
        assert_eq!(subs, again);
    }

    #[test]
    fn output_is_sorted_by_start() {
        let (subs, _) = parse_srt(
            "1\n00:00:10,000 --> 00:00:11,000\nlater\n\n2\n00:00:01,000 --> 00:00:02,000\nearlier\n",
        )
        .unwrap();
        assert_eq!(subs[0].text, "earlier");
        assert!(subs[0].start_sec < subs[1].start_sec);
    }
}
