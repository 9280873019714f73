//! Quantifying prediction bias in 2016 U.S. election forecasts, from two
//! directions at once: traditional opinion polls and Twitter sentiment.
//!
//! The library covers the full workflow:
//!
//! - [`polls`] — two-party adjustment, respondent-weighted monthly
//!   aggregation, and signed bias against the actual outcome;
//! - [`sentiment`] — a lexicon and rule-based compound scorer for short
//!   texts (the VADER method), with the published word list bundled;
//! - [`electorate`] — per-user sentiment accumulation from candidate
//!   mentions, extrapolated votes, and scoped tallies;
//! - [`ingest`] — poll/result/corpus/snapshot file formats and free-text
//!   location resolution against a bundled U.S. [`gazetteer`];
//! - [`pipeline`] — deterministic parallel scoring over streamed corpora;
//! - [`report`] — the batch commands behind the `votebias` binary.
//!
//! The sign convention throughout: candidate 1 is the reference candidate
//! (Trump in the 2016 defaults), and a positive bias means a prediction
//! overestimated candidate 1's two-party share.
//!
//! See the `examples/` directory for one runnable program per capability.

pub mod electorate;
pub mod gazetteer;
pub mod ingest;
pub mod pipeline;
pub mod polls;
pub mod report;
pub mod scope;
pub mod sentiment;

pub use electorate::{CandidateIndicators, MentionClass, UserSentiment, Vote, VoteTally};
pub use polls::{adjust_two_party, bias, Bias, ElectionResult, Poll, RawShare, TwoPartyShare};
pub use scope::{Scope, StateCode};
pub use sentiment::{compound_sentiment, CompoundScore, Lexicon};
