//! Batch analytics for multi-stream classroom audio annotations.
//!
//! This crate takes the text outputs of an automated transcriber, an
//! automated speaker diarizer, and a human expert coder for the same
//! recording, aligns them on a shared timeline, and computes the
//! measurements used to compare the automated pipeline against the
//! expert: speaker-classification reliability, word error rate, and a
//! table of teacher/child speech features (utterance length, speech
//! rate, questions, responses, response latency, lexical alignment),
//! plus per-file agreement statistics (Pearson r, Cohen's kappa,
//! intraclass correlations).
//!
//! The `examples/` directory has one runnable program per capability;
//! start there. A thin `classroom-speech` binary exposes the same
//! operations as subcommands for batch use.

pub mod align;
pub mod audio;
pub mod cli;
pub mod config;
pub mod error;
pub mod features;
pub mod ingest;
pub mod model;
pub mod pipeline;
pub mod reliability;
pub mod report;
pub mod stats;
pub mod time;
pub mod wav;
pub mod wer;

pub use error::{Error, Result};
pub use model::{AnnotationStream, RawSpeakerClass, Role, RoleMap, Source, Utterance};
pub use time::Tenths;
