//! A desk-scale laboratory for studying how properties of speaker-labeled
//! dialogue corpora relate to what small reference learners can extract
//! from them.
//!
//! The crate is organized as a pipeline:
//!
//! * [`corpus`] — transcript parsing, tokenization, train/val splitting,
//!   and proportional mixture construction.
//! * [`learners`] — reference learners: an interpolated modified
//!   Kneser–Ney n-gram model, PPMI + truncated-SVD word embeddings, and
//!   an adapter for externally computed score files.
//! * [`eval`] — vocabulary-filtered minimal-pair forced choice and
//!   word-similarity benchmarks over any learner.
//! * [`features`] — the linguistic feature catalog computed per dataset.
//! * [`analysis`] — Spearman / cross-validated Lasso / boosted-tree
//!   predictor analyses, scaling regressions, and AIC utilities.
//! * [`aoa`] — age-of-acquisition modeling from CDI production data and
//!   per-word token NLL under a learner.
//! * [`synth`] — seeded synthetic corpus and benchmark generators used
//!   for tests and demos.

pub mod analysis;
pub mod aoa;
pub mod corpus;
pub mod error;
pub mod eval;
pub mod features;
pub mod learners;
pub mod synth;

pub use error::{Error, Result};
