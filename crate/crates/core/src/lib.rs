//! Fame-period measurement over timestamped document corpora.
//!
//! The pipeline runs in stages, each a module with its own file format:
//!
//! 1. [`corpus_io`] reads dated documents (raw text or pre-tagged mentions).
//! 2. [`sampler`] thins every month to the same expected document count.
//! 3. [`name_extract`] turns documents into per-name [`name_extract::Mention`]s.
//! 4. [`timeline`] aggregates mentions into per-name timelines and name sets.
//! 5. [`peaks`] finds each name's period of fame (spike or continuity method).
//! 6. [`stats`] cohorts periods by peak date and computes quantiles,
//!    power-law tail fits and bootstrap intervals.
//! 7. [`report`] and [`pipeline`] render the result tables and drive a full run.
//!
//! [`synth`] generates corpora from the stochastic mention model and hosts
//! brute-force reference detectors used in tests.
//!
//! Data-parallel loops go through [`par`]; build without the default
//! `parallel` feature for a purely sequential library.

pub mod corpus_io;
pub mod error;
pub mod name_extract;
pub mod par;
pub mod peaks;
pub mod pipeline;
pub mod report;
pub mod sampler;
pub mod seeding;
pub mod stats;
pub mod synth;
pub mod time;
pub mod timeline;

pub use error::{Error, Result};
pub use time::{AnalysisWindow, Month, Timestamp};
