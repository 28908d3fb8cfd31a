//! Toolkit for building and evaluating audio-description (AD) video corpora.
//!
//! The crate covers the full pipeline from raw soundtrack pairs to an
//! evaluated corpus:
//!
//! - [`audio`]: WAV I/O, mono mixdown, mid/side decomposition, RMS envelopes
//!   and magnitude spectrograms.
//! - [`sync`]: global offset estimation between the original and AD-mixed
//!   soundtracks via FFT cross-correlation.
//! - [`isolate`]: vocal isolation and dialogue suppression (center extraction,
//!   NLMS adaptive cancellation, spectrogram differencing).
//! - [`segment`]: narration segment detection from energy envelopes, plus the
//!   fully-automatic and semi-automatic segmentation pipelines.
//! - [`textalign`]: SRT subtitle and movie-script parsing, monotonic
//!   script-to-subtitle alignment, timestamp inference, reliability filtering.
//! - [`corpus`]: corpus data model and transforms (clip expansion, name
//!   anonymization, non-visual filtering, movie-disjoint splits, statistics).
//! - [`metrics`]: caption evaluation (BLEU-1..4, ROUGE-L, CIDEr, METEOR-lite),
//!   submission evaluation, nearest-neighbor retrieval baseline and the
//!   retrieval upper bound.
//!
//! The `adcorpus` binary exposes all of the above as subcommands; see
//! [`cli::run`].

pub mod audio;
pub mod cli;
pub mod config;
pub mod corpus;
pub mod error;
pub mod isolate;
pub mod metrics;
pub mod segment;
pub mod sync;
pub mod textalign;
pub mod tokenize;

pub use error::{Error, Result};
