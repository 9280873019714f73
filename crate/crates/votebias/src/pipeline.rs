//! Corpus-to-user-sentiment pipeline with deterministic parallel scoring.
//!
//! Records stream in file order and are processed in fixed-size batches:
//! scoring (the expensive part) fans out across a thread pool inside each
//! batch, while accumulation folds sequentially in stream order. Batch
//! boundaries depend only on record counts, so the result is bit-identical
//! for any thread count, including one.
//!
//! A user's home state is the resolution of their most recent resolvable
//! tweet; records later in the stream are treated as more recent. Duplicate
//! tweet ids are dropped. Retweets and repeated texts under fresh ids score
//! like any other tweet.

use std::io;

use rayon::prelude::*;

use crate::electorate::{CandidateIndicators, MentionClass, UserBook, UserSentiment};
use crate::ingest::{resolve_state, TweetRecord};
use crate::scope::StateCode;
use crate::sentiment::{compound_sentiment, CompoundScore, Lexicon};

const BATCH_SIZE: usize = 8192;

/// Knobs for a pipeline run.
#[derive(Debug, Clone)]
pub struct PipelineOptions {
    /// Worker threads for scoring; 0 means all available cores.
    pub threads: usize,
    /// Keep only records whose language tag is English or absent.
    pub english_only: bool,
}

impl Default for PipelineOptions {
    fn default() -> Self {
        PipelineOptions {
            threads: 0,
            english_only: false,
        }
    }
}

/// Counters and the accumulated user book from one pipeline run.
#[derive(Debug)]
pub struct PipelineOutcome {
    pub users: UserBook,
    /// Records that reached accumulation.
    pub tweets_processed: u64,
    /// Records dropped as duplicate tweet ids.
    pub duplicates: u64,
    /// Records dropped by the language pre-filter.
    pub language_filtered: u64,
}

struct ScoredRecord {
    user_id: String,
    score: Option<CompoundScore>,
    mentions: MentionClass,
    state: Option<StateCode>,
}

/// Runs the pipeline over a fallible record stream (`CorpusReader` yields
/// exactly this shape). I/O errors abort; parse-skips were already counted
/// by the reader.
pub fn accumulate_stream(
    stream: impl Iterator<Item = io::Result<TweetRecord>>,
    lexicon: &Lexicon,
    indicators: &CandidateIndicators,
    options: &PipelineOptions,
) -> io::Result<PipelineOutcome> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(options.threads)
        .build()
        .map_err(|e| io::Error::other(e.to_string()))?;

    let mut outcome = PipelineOutcome {
        users: UserBook::new(),
        tweets_processed: 0,
        duplicates: 0,
        language_filtered: 0,
    };
    let mut seen_ids = std::collections::HashSet::<u64>::new();
    let mut batch: Vec<TweetRecord> = Vec::with_capacity(BATCH_SIZE);

    let mut stream = stream;
    loop {
        batch.clear();
        while batch.len() < BATCH_SIZE {
            match stream.next() {
                None => break,
                Some(Err(e)) => return Err(e),
                Some(Ok(record)) => {
                    if options.english_only && !is_english_or_absent(record.lang.as_deref()) {
                        outcome.language_filtered += 1;
                        continue;
                    }
                    if !seen_ids.insert(fnv1a64(record.tweet_id.as_bytes())) {
                        outcome.duplicates += 1;
                        continue;
                    }
                    batch.push(record);
                }
            }
        }
        if batch.is_empty() {
            break;
        }

        let scored: Vec<ScoredRecord> = pool.install(|| {
            batch
                .par_iter()
                .map(|record| score_record(record, lexicon, indicators))
                .collect()
        });

        for rec in scored {
            outcome.tweets_processed += 1;
            let user = outcome
                .users
                .entry(rec.user_id.clone())
                .or_insert_with(|| UserSentiment::new(rec.user_id));
            match rec.score {
                Some(score) => user.accumulate(score, rec.mentions),
                None => user.tweets_seen += 1,
            }
            if rec.state.is_some() {
                user.state = rec.state;
            }
        }
    }
    Ok(outcome)
}

/// Infallible variant over plain records, for synthetic corpora.
pub fn accumulate_records(
    records: impl IntoIterator<Item = TweetRecord>,
    lexicon: &Lexicon,
    indicators: &CandidateIndicators,
    options: &PipelineOptions,
) -> PipelineOutcome {
    accumulate_stream(
        records.into_iter().map(Ok),
        lexicon,
        indicators,
        options,
    )
    .expect("infallible record stream")
}

fn score_record(
    record: &TweetRecord,
    lexicon: &Lexicon,
    indicators: &CandidateIndicators,
) -> ScoredRecord {
    let mentions = indicators.classify(&record.text);
    // No-mention tweets never move a sum, so their score is not computed.
    let score = match mentions {
        MentionClass::Neither => None,
        _ => Some(compound_sentiment(&record.text, lexicon)),
    };
    ScoredRecord {
        user_id: record.user_id.clone(),
        score,
        mentions,
        state: resolve_state(record).state,
    }
}

fn is_english_or_absent(lang: Option<&str>) -> bool {
    match lang {
        None => true,
        Some(tag) => {
            let primary = tag.split('-').next().unwrap_or(tag);
            primary.eq_ignore_ascii_case("en")
        }
    }
}

/// FNV-1a over tweet ids: a fixed hash keeps duplicate detection identical
/// across runs.
fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut hash = 0xcbf2_9ce4_8422_2325u64;
    for &b in bytes {
        hash ^= u64::from(b);
        hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
    }
    hash
}
