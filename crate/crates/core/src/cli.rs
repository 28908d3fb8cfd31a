//! Command-line interface: thin compositions of the module operations.
//!
//! Exit codes: 0 success, 1 usage error, 2 unreadable/malformed input,
//! 3 processing error (warnings are promoted to processing errors under
//! `--strict`). Results go to `--out` files or standard output as JSON;
//! warnings go to standard error. Outputs carry no timestamps, so identical
//! inputs and configuration produce byte-identical files.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::audio::{load_wav, write_wav, AudioTrack, BitDepth};
use crate::config::{Config, JobSpec, SegmentationMode};
use crate::corpus::{
    self, anonymize, corpus_from_jsonl, corpus_to_jsonl, description_stats, difficulty_curve,
    expand_clip, filter_nonvisual, parse_drop_patterns, parse_split_assignment, split_by_movie,
    vocab_stats, CorpusEntry, NameLexicon, SortKey, Source, Split,
};
use crate::error::{Error, Result};
use crate::isolate::{extract_center, nlms_cancel};
use crate::metrics::{
    evaluate_submission, features_from_jsonl, nn_retrieve, parse_submission,
    retrieval_upper_bound, submission_to_json, PairwiseMetric, SubmissionItem,
};
use crate::segment::{run_pipeline, segments_to_json, NarrationSegment, PipelineWarning};
use crate::sync::{apply_offset, estimate_offset};
use crate::textalign::{
    align_dialogue, infer_timestamps, parse_script, parse_srt, reliability_filter,
    sentences_from_jsonl, sentences_to_jsonl, AlignParams, AlignedSentence, ElementKind,
    ScriptHints,
};

#[derive(Parser)]
#[command(
    name = "adcorpus",
    version,
    about = "Audio-description corpus construction and evaluation toolkit"
)]
struct Cli {
    /// TOML configuration file; defaults apply when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Promote warnings (low-confidence sync, degenerate thresholds) to
    /// processing errors.
    #[arg(long, global = true)]
    strict: bool,
    /// Per-movie parallelism for the pipeline subcommand.
    #[arg(long, global = true, default_value_t = 1)]
    workers: usize,
    #[command(flatten)]
    overrides: Overrides,
    #[command(subcommand)]
    command: Command,
}

/// Per-key config overrides mirroring the file schema.
#[derive(Args, Default, Clone)]
struct Overrides {
    #[arg(long = "dsp.frame_sec", global = true, value_name = "SEC")]
    dsp_frame_sec: Option<f64>,
    #[arg(long = "dsp.hop_sec", global = true, value_name = "SEC")]
    dsp_hop_sec: Option<f64>,
    #[arg(long = "sync.max_lag_sec", global = true, value_name = "SEC")]
    sync_max_lag_sec: Option<f64>,
    #[arg(long = "nlms.taps", global = true, value_name = "N")]
    nlms_taps: Option<usize>,
    #[arg(long = "nlms.mu", global = true, value_name = "MU")]
    nlms_mu: Option<f64>,
    #[arg(long = "nlms.eps", global = true, value_name = "EPS")]
    nlms_eps: Option<f64>,
    #[arg(long = "isolate.center_side_gain", global = true, value_name = "G")]
    isolate_center_side_gain: Option<f64>,
    #[arg(long = "segment.threshold", global = true, value_name = "T")]
    segment_threshold: Option<f64>,
    #[arg(long = "segment.quantile", global = true, value_name = "Q")]
    segment_quantile: Option<f64>,
    #[arg(long = "segment.factor", global = true, value_name = "F")]
    segment_factor: Option<f64>,
    #[arg(long = "segment.threshold_floor", global = true, value_name = "T")]
    segment_threshold_floor: Option<f64>,
    #[arg(long = "segment.min_seg_sec", global = true, value_name = "SEC")]
    segment_min_seg_sec: Option<f64>,
    #[arg(long = "segment.min_gap_sec", global = true, value_name = "SEC")]
    segment_min_gap_sec: Option<f64>,
    #[arg(long = "segment.pad_end_sec", global = true, value_name = "SEC")]
    segment_pad_end_sec: Option<f64>,
    #[arg(long = "align.gap_penalty", global = true, value_name = "P")]
    align_gap_penalty: Option<f64>,
    #[arg(long = "align.min_score", global = true, value_name = "S")]
    align_min_score: Option<f64>,
    #[arg(long = "corpus.intro_outro_sec", global = true, value_name = "SEC")]
    corpus_intro_outro_sec: Option<f64>,
    #[arg(long = "corpus.min_clip_sec", global = true, value_name = "SEC")]
    corpus_min_clip_sec: Option<f64>,
}

impl Overrides {
    fn apply(&self, cfg: &mut Config) {
        macro_rules! set {
            ($field:expr, $target:expr) => {
                if let Some(v) = $field {
                    $target = v;
                }
            };
        }
        set!(self.dsp_frame_sec, cfg.dsp.frame_sec);
        set!(self.dsp_hop_sec, cfg.dsp.hop_sec);
        set!(self.sync_max_lag_sec, cfg.sync.max_lag_sec);
        set!(self.nlms_taps, cfg.nlms.taps);
        set!(self.nlms_mu, cfg.nlms.mu);
        set!(self.nlms_eps, cfg.nlms.eps);
        set!(self.isolate_center_side_gain, cfg.isolate.center_side_gain);
        if self.segment_threshold.is_some() {
            cfg.segment.threshold = self.segment_threshold;
        }
        set!(self.segment_quantile, cfg.segment.quantile);
        set!(self.segment_factor, cfg.segment.factor);
        set!(self.segment_threshold_floor, cfg.segment.threshold_floor);
        set!(self.segment_min_seg_sec, cfg.segment.min_seg_sec);
        set!(self.segment_min_gap_sec, cfg.segment.min_gap_sec);
        set!(self.segment_pad_end_sec, cfg.segment.pad_end_sec);
        set!(self.align_gap_penalty, cfg.align.gap_penalty);
        set!(self.align_min_score, cfg.align.min_score);
        set!(self.corpus_intro_outro_sec, cfg.corpus.intro_outro_sec);
        set!(self.corpus_min_clip_sec, cfg.corpus.min_clip_sec);
    }
}

#[derive(Subcommand)]
enum Command {
    /// Estimate the offset of track B relative to track A.
    Sync {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
        /// Write track B aligned onto A's timeline as 32-bit float WAV.
        #[arg(long, value_name = "WAV")]
        apply_to_b: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Vocal isolation: center extraction or NLMS cancellation.
    Isolate {
        #[arg(long, value_enum)]
        mode: IsolateMode,
        /// Stereo input for center extraction.
        #[arg(long)]
        input: Option<PathBuf>,
        /// AD-mixed (primary) input for cancellation.
        #[arg(long)]
        primary: Option<PathBuf>,
        /// Original-soundtrack (reference) input for cancellation.
        #[arg(long)]
        reference: Option<PathBuf>,
        /// Truncate both cancellation inputs to the shorter length.
        #[arg(long)]
        trim: bool,
        #[arg(long)]
        out: PathBuf,
    },
    /// Detect AD narration segments from a movie/AD-mix pair.
    Segment {
        #[command(subcommand)]
        mode: SegmentCommand,
    },
    /// Parse an SRT subtitle file to JSON.
    ParseSrt {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Parse a plain-text movie script to typed elements JSON.
    ParseScript {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Align script dialogue to subtitles and emit timed description
    /// sentences passing the reliability filter.
    AlignScript {
        #[arg(long)]
        script: PathBuf,
        #[arg(long)]
        srt: PathBuf,
        #[arg(long)]
        movie_id: String,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write the sentences that failed the reliability filter.
        #[arg(long)]
        dropped: Option<PathBuf>,
    },
    /// Assemble corpus entries from aligned sentences and/or
    /// segment+transcript pairs, applying the corpus-level transforms.
    BuildCorpus {
        /// Aligned-sentence JSONL files (from align-script or external).
        #[arg(long, num_args = 1..)]
        sentences: Vec<PathBuf>,
        /// Segment JSON from the segment subcommand (requires --transcript
        /// and --movie-id).
        #[arg(long)]
        segments: Option<PathBuf>,
        /// AD transcript, one sentence per line, paired 1:1 with segments.
        #[arg(long)]
        transcript: Option<PathBuf>,
        #[arg(long)]
        movie_id: Option<String>,
        /// CSV of movie_id,duration_sec used for clip expansion and
        /// intro/outro filtering.
        #[arg(long)]
        durations: PathBuf,
        /// Character-name lexicon enabling anonymization.
        #[arg(long)]
        names: Option<PathBuf>,
        /// Drop patterns, one regular expression per line.
        #[arg(long)]
        drop_patterns: Option<PathBuf>,
        /// movie_id,split CSV; when given, per-split JSONL files are written.
        #[arg(long)]
        split: Option<PathBuf>,
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
    },
    /// Corpus, vocabulary, or description-output statistics.
    Stats {
        #[arg(long, value_enum, default_value_t = StatsKind::Corpus)]
        kind: StatsKind,
        #[arg(long)]
        corpus: Option<PathBuf>,
        /// Submission JSON for description statistics.
        #[arg(long)]
        submission: Option<PathBuf>,
        /// Training corpus JSONL for novelty computation.
        #[arg(long)]
        train_refs: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluate a submission against a reference split.
    Eval {
        #[arg(long)]
        submission: PathBuf,
        #[arg(long)]
        refs: PathBuf,
        /// Include per-clip scores in the report.
        #[arg(long)]
        per_sentence: bool,
        /// Also write a difficulty-sorted smoothed score curve.
        #[arg(long, value_enum)]
        difficulty_sort: Option<DifficultySort>,
        #[arg(long, default_value_t = 500)]
        difficulty_window: usize,
        #[arg(long)]
        difficulty_out: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Nearest-neighbor retrieval baseline over visual features.
    NnBaseline {
        #[arg(long)]
        test_features: PathBuf,
        #[arg(long)]
        train_features: PathBuf,
        /// Training corpus JSONL supplying the retrieved sentences.
        #[arg(long)]
        train_refs: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Metric upper bound for retrieval from the training sentences.
    UpperBound {
        #[arg(long)]
        test_refs: PathBuf,
        #[arg(long)]
        train_refs: PathBuf,
        #[arg(long, value_enum, default_value_t = UpperBoundMetric::MeteorLite)]
        metric: UpperBoundMetric,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the configured per-movie jobs end to end.
    Pipeline {
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
    },
}

#[derive(Subcommand)]
enum SegmentCommand {
    /// NLMS-residual path.
    Auto(SegmentArgs),
    /// Spectrogram-difference path.
    Semi(SegmentArgs),
}

#[derive(Args)]
struct SegmentArgs {
    #[arg(long)]
    movie: PathBuf,
    #[arg(long)]
    ad: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum IsolateMode {
    Center,
    Cancel,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum StatsKind {
    Corpus,
    Vocab,
    Descriptions,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum DifficultySort {
    LengthAsc,
    WordFreqDesc,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum UpperBoundMetric {
    MeteorLite,
    RougeL,
}

/// Parse `argv` and run; returns the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let mut warnings: Vec<String> = Vec::new();
    let result = dispatch(cli, &mut warnings);
    for w in &warnings {
        eprintln!("warning: {w}");
    }
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn read_file(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

fn write_output(path: Option<&Path>, content: &str) -> Result<()> {
    match path {
        Some(p) => {
            if let Some(parent) = p.parent() {
                if !parent.as_os_str().is_empty() {
                    std::fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
                }
            }
            std::fs::write(p, content).map_err(|e| Error::io(p, e))
        }
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

fn json_line(value: &impl serde::Serialize) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("value serializes");
    s.push('\n');
    s
}

fn load_config(path: Option<&Path>, overrides: &Overrides) -> Result<Config> {
    let mut cfg = match path {
        Some(p) => Config::load(p)?,
        None => Config::default(),
    };
    overrides.apply(&mut cfg);
    cfg.validate()?;
    Ok(cfg)
}

fn strict_check(strict: bool, warnings: &[String]) -> Result<()> {
    if strict && !warnings.is_empty() {
        return Err(Error::StrictWarnings(format!(
            "{} warning(s) promoted to errors: {}",
            warnings.len(),
            warnings.join("; ")
        )));
    }
    Ok(())
}

fn pipeline_warning_text(w: &PipelineWarning) -> String {
    match w {
        PipelineWarning::LowConfidence { secondary_ratio } => format!(
            "low-confidence offset estimate (secondary ratio {secondary_ratio:.3})"
        ),
        PipelineWarning::DegenerateThreshold => {
            "automatic threshold quantile collapsed to zero; fell back to mean".to_string()
        }
    }
}

fn dispatch(cli: Cli, warnings: &mut Vec<String>) -> Result<()> {
    let cfg = load_config(cli.config.as_deref(), &cli.overrides)?;
    match cli.command {
        Command::Sync {
            a,
            b,
            apply_to_b,
            out,
        } => {
            let ta = load_wav(&a)?;
            let tb = load_wav(&b)?;
            let ma = crate::audio::to_mono(&ta);
            let mb = crate::audio::to_mono(&tb);
            let est = estimate_offset(&ma, &mb, cfg.sync.max_lag_sec)?;
            if est.is_low_confidence() {
                warnings.push(format!(
                    "low-confidence offset estimate (secondary ratio {:.3})",
                    est.secondary_ratio
                ));
            }
            strict_check(cli.strict, warnings)?;
            if let Some(target) = apply_to_b {
                let aligned = apply_offset(&tb, -est.offset_samples)?;
                write_wav(&aligned, &target, BitDepth::Float32)?;
            }
            let payload = serde_json::json!({
                "offset_samples": est.offset_samples,
                "offset_sec": est.offset_sec(ta.sample_rate()),
                "peak_correlation": est.peak_correlation,
                "secondary_ratio": est.secondary_ratio,
            });
            write_output(out.as_deref(), &json_line(&payload))
        }
        Command::Isolate {
            mode,
            input,
            primary,
            reference,
            trim,
            out,
        } => match mode {
            IsolateMode::Center => {
                let input = input.ok_or_else(|| {
                    Error::Usage("--input is required for --mode center".into())
                })?;
                let track = load_wav(&input)?;
                let center = extract_center(&track, cfg.isolate.center_side_gain)?;
                write_wav(&center, &out, BitDepth::Float32)
            }
            IsolateMode::Cancel => {
                let (primary, reference) = match (primary, reference) {
                    (Some(p), Some(r)) => (p, r),
                    _ => {
                        return Err(Error::Usage(
                            "--primary and --reference are required for --mode cancel".into(),
                        ))
                    }
                };
                let mut p = crate::audio::to_mono(&load_wav(&primary)?);
                let mut r = crate::audio::to_mono(&load_wav(&reference)?);
                if trim {
                    let n = p.len().min(r.len());
                    p = AudioTrack::mono(p.samples()?[..n].to_vec(), p.sample_rate());
                    r = AudioTrack::mono(r.samples()?[..n].to_vec(), r.sample_rate());
                }
                let residual = nlms_cancel(&p, &r, cfg.nlms.taps, cfg.nlms.mu, cfg.nlms.eps)?;
                write_wav(&residual, &out, BitDepth::Float32)
            }
        },
        Command::Segment { mode } => {
            let (mode, args) = match mode {
                SegmentCommand::Auto(args) => (SegmentationMode::Auto, args),
                SegmentCommand::Semi(args) => (SegmentationMode::Semi, args),
            };
            let movie = load_wav(&args.movie)?;
            let ad = load_wav(&args.ad)?;
            let result = run_pipeline(&movie, &ad, mode, &cfg)?;
            warnings.extend(result.warnings.iter().map(pipeline_warning_text));
            strict_check(cli.strict, warnings)?;
            write_output(args.out.as_deref(), &segments_to_json(&result.segments))
        }
        Command::ParseSrt { input, out } => {
            let (subs, parse_warnings) = parse_srt(&read_file(&input)?)?;
            warnings.extend(
                parse_warnings
                    .iter()
                    .map(|w| format!("srt block {}: {}", w.block, w.reason)),
            );
            strict_check(cli.strict, warnings)?;
            write_output(out.as_deref(), &json_line(&subs))
        }
        Command::ParseScript { input, out } => {
            let elements = parse_script(&read_file(&input)?, &ScriptHints::default())?;
            write_output(out.as_deref(), &json_line(&elements))
        }
        Command::AlignScript {
            script,
            srt,
            movie_id,
            out,
            dropped,
        } => {
            let (kept, dropped_sentences) =
                align_script_files(&script, &srt, &movie_id, &cfg, warnings)?;
            strict_check(cli.strict, warnings)?;
            if let Some(path) = dropped {
                write_output(Some(&path), &sentences_to_jsonl(&dropped_sentences))?;
            }
            write_output(out.as_deref(), &sentences_to_jsonl(&kept))
        }
        Command::BuildCorpus {
            sentences,
            segments,
            transcript,
            movie_id,
            durations,
            names,
            drop_patterns,
            split,
            out_dir,
        } => build_corpus(
            &cfg,
            &sentences,
            segments.as_deref(),
            transcript.as_deref(),
            movie_id.as_deref(),
            &durations,
            names.as_deref(),
            drop_patterns.as_deref(),
            split.as_deref(),
            &out_dir,
            warnings,
        ),
        Command::Stats {
            kind,
            corpus,
            submission,
            train_refs,
            out,
        } => {
            let payload = match kind {
                StatsKind::Corpus => {
                    let path = corpus
                        .ok_or_else(|| Error::Usage("--corpus is required".into()))?;
                    let entries = corpus_from_jsonl(&read_file(&path)?)?;
                    json_line(&corpus::corpus_stats(&entries, cfg.corpus.min_clip_sec))
                }
                StatsKind::Vocab => {
                    let path = corpus
                        .ok_or_else(|| Error::Usage("--corpus is required".into()))?;
                    let entries = corpus_from_jsonl(&read_file(&path)?)?;
                    json_line(&vocab_stats(&entries))
                }
                StatsKind::Descriptions => {
                    let (sub_path, train_path) = match (submission, train_refs) {
                        (Some(s), Some(t)) => (s, t),
                        _ => {
                            return Err(Error::Usage(
                                "--submission and --train-refs are required for description stats"
                                    .into(),
                            ))
                        }
                    };
                    let submission = parse_submission(&read_file(&sub_path)?)?;
                    let hyps: Vec<String> =
                        submission.into_iter().map(|s| s.caption).collect();
                    let train = corpus_from_jsonl(&read_file(&train_path)?)?;
                    let train_sentences: Vec<String> =
                        train.into_iter().map(|e| e.sentence).collect();
                    json_line(&description_stats(&hyps, &train_sentences))
                }
            };
            write_output(out.as_deref(), &payload)
        }
        Command::Eval {
            submission,
            refs,
            per_sentence,
            difficulty_sort,
            difficulty_window,
            difficulty_out,
            out,
        } => {
            let submission = parse_submission(&read_file(&submission)?)?;
            let references = corpus_from_jsonl(&read_file(&refs)?)?;
            let need_per_sentence = per_sentence || difficulty_sort.is_some();
            let report = evaluate_submission(&submission, &references, need_per_sentence)?;
            if let Some(sort) = difficulty_sort {
                let per = report.per_sentence.as_ref().expect("requested above");
                let scores: Vec<f64> = per.iter().map(|p| p.meteor_lite).collect();
                let ref_sentences: Vec<String> =
                    references.iter().map(|r| r.sentence.clone()).collect();
                let key = match sort {
                    DifficultySort::LengthAsc => SortKey::LengthAsc,
                    DifficultySort::WordFreqDesc => SortKey::WordFreqDesc,
                };
                let curve = difficulty_curve(&scores, &ref_sentences, key, difficulty_window)?;
                let payload = serde_json::json!({
                    "sort": match key {
                        SortKey::LengthAsc => "length_asc",
                        SortKey::WordFreqDesc => "word_freq_desc",
                    },
                    "window": difficulty_window,
                    "scores": curve,
                });
                write_output(difficulty_out.as_deref(), &json_line(&payload))?;
            }
            let report = if per_sentence {
                report
            } else {
                crate::metrics::MetricReport {
                    per_sentence: None,
                    ..report
                }
            };
            write_output(out.as_deref(), &report.to_json())
        }
        Command::NnBaseline {
            test_features,
            train_features,
            train_refs,
            out,
        } => {
            let test = features_from_jsonl(&read_file(&test_features)?)?;
            let mut train = features_from_jsonl(&read_file(&train_features)?)?;
            let refs = corpus_from_jsonl(&read_file(&train_refs)?)?;
            // join features to sentences by clip id
            let by_id: std::collections::BTreeMap<&str, &str> = refs
                .iter()
                .map(|e| (e.clip_id.as_str(), e.sentence.as_str()))
                .collect();
            let mut sentences = Vec::with_capacity(train.len());
            for f in &train {
                let sentence = by_id.get(f.id.as_str()).ok_or_else(|| {
                    Error::MissingIds(vec![f.id.clone()])
                })?;
                sentences.push(sentence.to_string());
            }
            let predictions = nn_retrieve(&test, &train, &sentences)?;
            train.clear();
            let items: Vec<SubmissionItem> = test
                .iter()
                .zip(predictions)
                .map(|(f, caption)| SubmissionItem {
                    video_id: f.id.clone(),
                    caption,
                })
                .collect();
            write_output(out.as_deref(), &submission_to_json(&items))
        }
        Command::UpperBound {
            test_refs,
            train_refs,
            metric,
            out,
        } => {
            let test = corpus_from_jsonl(&read_file(&test_refs)?)?;
            let train = corpus_from_jsonl(&read_file(&train_refs)?)?;
            let test_sentences: Vec<String> =
                test.into_iter().map(|e| e.sentence).collect();
            let train_sentences: Vec<String> =
                train.into_iter().map(|e| e.sentence).collect();
            let (metric, name) = match metric {
                UpperBoundMetric::MeteorLite => (PairwiseMetric::MeteorLite, "meteor_lite"),
                UpperBoundMetric::RougeL => (PairwiseMetric::RougeL, "rouge_l"),
            };
            let score = retrieval_upper_bound(&test_sentences, &train_sentences, metric)?;
            let payload = serde_json::json!({ "metric": name, "score": score });
            write_output(out.as_deref(), &json_line(&payload))
        }
        Command::Pipeline { out_dir } => {
            run_jobs(&cfg, &out_dir, cli.workers, cli.strict, warnings)
        }
    }
}

/// Parse, align, timestamp, and filter one script/SRT pair.
fn align_script_files(
    script_path: &Path,
    srt_path: &Path,
    movie_id: &str,
    cfg: &Config,
    warnings: &mut Vec<String>,
) -> Result<(Vec<AlignedSentence>, Vec<AlignedSentence>)> {
    let elements = parse_script(&read_file(script_path)?, &ScriptHints::default())?;
    let (subs, srt_warnings) = parse_srt(&read_file(srt_path)?)?;
    warnings.extend(
        srt_warnings
            .iter()
            .map(|w| format!("srt block {}: {}", w.block, w.reason)),
    );
    let dialogues: Vec<_> = elements
        .iter()
        .filter(|e| e.kind == ElementKind::Dialogue)
        .cloned()
        .collect();
    let params = AlignParams {
        gap_penalty: cfg.align.gap_penalty,
    };
    let pairs = align_dialogue(&dialogues, &subs, &params)?;
    let sentences = infer_timestamps(&pairs, &elements, &subs, movie_id)?;
    Ok(reliability_filter(sentences, cfg.align.min_score))
}

/// Turn aligned sentences into corpus entries with sequential clip ids.
fn entries_from_sentences(sentences: &[AlignedSentence]) -> Vec<CorpusEntry> {
    let mut per_movie: std::collections::BTreeMap<&str, usize> = std::collections::BTreeMap::new();
    let mut sorted: Vec<&AlignedSentence> = sentences.iter().collect();
    sorted.sort_by(|a, b| {
        (a.movie_id.as_str(), a.start_sec)
            .partial_cmp(&(b.movie_id.as_str(), b.start_sec))
            .unwrap()
    });
    sorted
        .into_iter()
        .map(|s| {
            let seq = per_movie.entry(s.movie_id.as_str()).or_insert(0);
            *seq += 1;
            CorpusEntry {
                clip_id: format!("{}_{:04}", s.movie_id, seq),
                movie_id: s.movie_id.clone(),
                start_sec: s.start_sec,
                end_sec: s.end_sec,
                sentence: s.sentence.clone(),
                source: s.source,
                score: Some(s.score),
            }
        })
        .collect()
}

fn parse_durations(text: &str) -> Result<std::collections::BTreeMap<String, f64>> {
    let mut map = std::collections::BTreeMap::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || (lineno == 0 && line == "movie_id,duration_sec") {
            continue;
        }
        let Some((movie, dur)) = line.split_once(',') else {
            return Err(Error::MalformedJson(format!(
                "durations line {}: expected movie_id,duration_sec",
                lineno + 1
            )));
        };
        let dur: f64 = dur.trim().parse().map_err(|_| {
            Error::MalformedJson(format!("durations line {}: bad duration", lineno + 1))
        })?;
        map.insert(movie.trim().to_string(), dur);
    }
    Ok(map)
}

#[allow(clippy::too_many_arguments)]
fn build_corpus(
    cfg: &Config,
    sentence_files: &[PathBuf],
    segments: Option<&Path>,
    transcript: Option<&Path>,
    movie_id: Option<&str>,
    durations: &Path,
    names: Option<&Path>,
    drop_patterns: Option<&Path>,
    split: Option<&Path>,
    out_dir: &Path,
    warnings: &mut Vec<String>,
) -> Result<()> {
    let durations = parse_durations(&read_file(durations)?)?;

    let mut sentences: Vec<AlignedSentence> = Vec::new();
    for file in sentence_files {
        sentences.extend(sentences_from_jsonl(&read_file(file)?)?);
    }
    match (segments, transcript) {
        (Some(segments_path), Some(transcript_path)) => {
            let movie_id = movie_id.ok_or_else(|| {
                Error::Usage("--movie-id is required with --segments/--transcript".into())
            })?;
            let segs: Vec<NarrationSegment> =
                crate::segment::segments_from_json(&read_file(segments_path)?)?;
            let lines: Vec<String> = read_file(transcript_path)?
                .lines()
                .map(str::trim)
                .filter(|l| !l.is_empty())
                .map(str::to_string)
                .collect();
            if segs.len() != lines.len() {
                return Err(Error::LengthMismatch {
                    a: segs.len(),
                    b: lines.len(),
                });
            }
            sentences.extend(segs.iter().zip(lines).map(|(seg, sentence)| {
                AlignedSentence {
                    sentence,
                    start_sec: seg.start_sec,
                    end_sec: seg.end_sec,
                    score: 1.0,
                    source: Source::Ad,
                    movie_id: movie_id.to_string(),
                }
            }));
        }
        (None, None) => {}
        _ => {
            return Err(Error::Usage(
                "--segments and --transcript must be given together".into(),
            ))
        }
    }
    if sentences.is_empty() {
        return Err(Error::EmptyInput);
    }

    let (kept, dropped) = reliability_filter(sentences, cfg.align.min_score);
    if !dropped.is_empty() {
        warnings.push(format!(
            "{} sentence(s) below reliability {}",
            dropped.len(),
            cfg.align.min_score
        ));
    }
    let mut entries = entries_from_sentences(&kept);

    let patterns = match drop_patterns {
        Some(path) => parse_drop_patterns(&read_file(path)?)?,
        None => Vec::new(),
    };
    let lexicon = match names {
        Some(path) => Some(NameLexicon::parse(&read_file(path)?)),
        None => None,
    };

    // per-movie duration-dependent passes
    let mut processed: Vec<CorpusEntry> = Vec::new();
    let mut dropped_total = 0usize;
    let movie_ids: std::collections::BTreeSet<String> =
        entries.iter().map(|e| e.movie_id.clone()).collect();
    for movie in &movie_ids {
        let duration = *durations
            .get(movie)
            .ok_or_else(|| Error::UnassignedMovie(movie.clone()))?;
        let movie_entries: Vec<CorpusEntry> = entries
            .iter()
            .filter(|e| &e.movie_id == movie)
            .cloned()
            .collect();
        let (kept, dropped) =
            filter_nonvisual(movie_entries, duration, cfg.corpus.intro_outro_sec, &patterns);
        dropped_total += dropped.len();
        for entry in kept {
            let mut entry = expand_clip(&entry, cfg.corpus.min_clip_sec, duration)?;
            if let Some(lex) = &lexicon {
                entry.sentence = anonymize(&entry.sentence, lex);
            }
            processed.push(entry);
        }
    }
    entries = processed;
    if dropped_total > 0 {
        warnings.push(format!("{dropped_total} entr(ies) dropped as non-visual"));
    }

    std::fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    match split {
        Some(split_path) => {
            let assignment = parse_split_assignment(&read_file(split_path)?)?;
            let splits = split_by_movie(&entries, &assignment)?;
            for split in [Split::Train, Split::Val, Split::PublicTest, Split::BlindTest] {
                let bucket = splits.get(split);
                if bucket.is_empty() {
                    continue;
                }
                let blind = split == Split::BlindTest;
                let path = out_dir.join(format!("{}.jsonl", split.as_str()));
                write_output(Some(&path), &corpus_to_jsonl(bucket, blind))?;
            }
        }
        None => {
            let path = out_dir.join("corpus.jsonl");
            write_output(Some(&path), &corpus_to_jsonl(&entries, false))?;
        }
    }
    Ok(())
}

/// Execute the configured per-movie jobs, optionally in parallel.
fn run_jobs(
    cfg: &Config,
    out_dir: &Path,
    workers: usize,
    strict: bool,
    warnings: &mut Vec<String>,
) -> Result<()> {
    if cfg.jobs.is_empty() {
        return Err(Error::BadConfig(
            "pipeline requires at least one [[jobs]] entry in the config".into(),
        ));
    }
    std::fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;

    let run_one = |job: &JobSpec| -> Result<Vec<String>> {
        let mut job_warnings = Vec::new();
        let movie = load_wav(&job.movie_wav)?;
        let ad = load_wav(&job.ad_wav)?;
        let result = run_pipeline(&movie, &ad, job.mode, cfg)?;
        job_warnings.extend(
            result
                .warnings
                .iter()
                .map(|w| format!("job {}: {}", job.id, pipeline_warning_text(w))),
        );
        write_output(
            Some(&out_dir.join(format!("{}.segments.json", job.id))),
            &segments_to_json(&result.segments),
        )?;

        if let (Some(script), Some(srt)) = (&job.script, &job.srt) {
            let (kept, _dropped) =
                align_script_files(script, srt, &job.id, cfg, &mut job_warnings)?;
            write_output(
                Some(&out_dir.join(format!("{}.script_sentences.jsonl", job.id))),
                &sentences_to_jsonl(&kept),
            )?;
        }
        if let Some(transcript) = &job.transcript {
            let lines: Vec<String> = read_file(transcript)?
                .lines()
                .map(str::trim)
                .filter(|l| !l.is_empty())
                .map(str::to_string)
                .collect();
            if lines.len() != result.segments.len() {
                return Err(Error::LengthMismatch {
                    a: result.segments.len(),
                    b: lines.len(),
                });
            }
            let sentences: Vec<AlignedSentence> = result
                .segments
                .iter()
                .zip(lines)
                .map(|(seg, sentence)| AlignedSentence {
                    sentence,
                    start_sec: seg.start_sec,
                    end_sec: seg.end_sec,
                    score: 1.0,
                    source: Source::Ad,
                    movie_id: job.id.clone(),
                })
                .collect();
            write_output(
                Some(&out_dir.join(format!("{}.ad_sentences.jsonl", job.id))),
                &sentences_to_jsonl(&sentences),
            )?;
        }
        Ok(job_warnings)
    };

    let results: Vec<Result<Vec<String>>> = if workers > 1 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()
            .map_err(|e| Error::BadParam(format!("cannot build worker pool: {e}")))?;
        pool.install(|| {
            use rayon::prelude::*;
            cfg.jobs.par_iter().map(run_one).collect()
        })
    } else {
        cfg.jobs.iter().map(run_one).collect()
    };

    let mut sidecar = String::new();
    sidecar.push_str(&format!(
        "adcorpus {} pipeline run\njobs: {}\n",
        env!("CARGO_PKG_VERSION"),
        cfg.jobs.len()
    ));
    for (job, result) in cfg.jobs.iter().zip(&results) {
        match result {
            Ok(ws) => {
                sidecar.push_str(&format!("job {}: ok\n", job.id));
                for w in ws {
                    sidecar.push_str(&format!("  warning: {w}\n"));
                }
            }
            Err(e) => sidecar.push_str(&format!("job {}: error: {e}\n", job.id)),
        }
    }
    write_output(Some(&out_dir.join("pipeline.log")), &sidecar)?;

    let mut first_error = None;
    for result in results {
        match result {
            Ok(ws) => warnings.extend(ws),
            Err(e) => {
                if first_error.is_none() {
                    first_error = Some(e);
                }
            }
        }
    }
    if let Some(e) = first_error {
        return Err(e);
    }
    strict_check(strict, warnings)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn usage_error_exit_code() {
        assert_eq!(run(["adcorpus", "no-such-subcommand"]), 1);
        assert_eq!(run(["adcorpus"]), 1);
    }

    #[test]
    fn help_exits_zero() {
        assert_eq!(run(["adcorpus", "--help"]), 0);
    }

    #[test]
    fn missing_input_maps_to_input_error() {
        assert_eq!(
            run([
                "adcorpus",
                "parse-srt",
                "--input",
                "/definitely/not/here.srt"
            ]),
            2
        );
    }

    #[test]
    fn entries_from_sentences_assigns_sequential_ids() {
        let s = |movie: &str, start: f64| AlignedSentence {
            sentence: "x".into(),
            start_sec: start,
            end_sec: start + 1.0,
            score: 1.0,
            source: Source::Ad,
            movie_id: movie.into(),
        };
        let entries = entries_from_sentences(&[s("m1", 5.0), s("m1", 1.0), s("m2", 0.0)]);
        assert_eq!(entries[0].clip_id, "m1_0001");
        assert_eq!(entries[0].start_sec, 1.0);
        assert_eq!(entries[1].clip_id, "m1_0002");
        assert_eq!(entries[2].clip_id, "m2_0001");
    }
}
