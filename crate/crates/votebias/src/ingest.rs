//! File ingestion: poll tables, election results, tweet corpora, and
//! persisted per-user sentiment snapshots.
//!
//! Formats are deliberately plain so a full analysis is reproducible from a
//! handful of flat files:
//!
//! - polls: CSV with header `source,start_date,end_date,respondents,pct_c1,pct_c2`
//!   (ISO-8601 dates, percentages with up to one decimal);
//! - results: CSV with header `scope,pct_c1,pct_c2`, scope `US` or a postal
//!   code, adjusted shares always recomputed from the raw columns;
//! - tweet corpus: UTF-8 newline-delimited JSON objects with fields
//!   `tweet_id,user_id,text,lang,geo_state,user_location`, optional fields
//!   omitted freely, streamed without materializing the file;
//! - user snapshot: CSV with header `user_id,sum_c1,sum_c2,state,tweets_seen`,
//!   sums serialized with full round-trip precision, written atomically.
//!
//! Loaders never panic on input bytes: a line either parses or is skipped
//! and counted (corpus), rejected with a row diagnostic (polls), or turns
//! into a format error (results, snapshots).

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use serde::Deserialize;
use thiserror::Error;

use crate::electorate::{UserBook, UserSentiment};
use crate::gazetteer::Gazetteer;
use crate::polls::{ElectionResult, Poll, RawShare};
use crate::scope::{Scope, StateCode};

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("cannot write {path}: {source}")]
    Write {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Csv {
        path: PathBuf,
        source: csv::Error,
    },
    #[error("{path}: missing required column `{column}`")]
    MissingColumn { path: PathBuf, column: String },
    #[error("{path}: duplicate scope `{scope}`")]
    DuplicateScope { path: PathBuf, scope: String },
    #[error("{path} line {line}: {message}")]
    BadRow {
        path: PathBuf,
        line: u64,
        message: String,
    },
}

fn io_err(path: &Path, source: std::io::Error) -> IngestError {
    IngestError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// A rejected input row: its 1-based line number and the reason.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RowIssue {
    pub line: u64,
    pub reason: String,
}

/// Outcome of a poll-file load: the parsed polls in file order plus a
/// diagnostic for every rejected row.
#[derive(Debug)]
pub struct PollLoad {
    pub polls: Vec<Poll>,
    pub rejected: Vec<RowIssue>,
}

const POLL_COLUMNS: [&str; 6] = [
    "source",
    "start_date",
    "end_date",
    "respondents",
    "pct_c1",
    "pct_c2",
];

fn required_columns(
    path: &Path,
    headers: &csv::StringRecord,
    names: &[&str],
) -> Result<Vec<usize>, IngestError> {
    names
        .iter()
        .map(|name| {
            headers
                .iter()
                .position(|h| h.trim() == *name)
                .ok_or_else(|| IngestError::MissingColumn {
                    path: path.to_path_buf(),
                    column: name.to_string(),
                })
        })
        .collect()
}

/// Loads a poll CSV. Malformed rows (bad dates, respondents below one,
/// share violations) are rejected individually and reported by line number;
/// a missing column fails the whole file.
pub fn load_polls(path: impl AsRef<Path>) -> Result<PollLoad, IngestError> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| io_err(path, e))?;
    let mut reader = csv::Reader::from_reader(file);
    let headers = reader
        .headers()
        .map_err(|e| IngestError::Csv {
            path: path.to_path_buf(),
            source: e,
        })?
        .clone();
    let cols = required_columns(path, &headers, &POLL_COLUMNS)?;

    let mut polls = Vec::new();
    let mut rejected = Vec::new();
    for (idx, record) in reader.records().enumerate() {
        let line = idx as u64 + 2; // header occupies line 1
        let record = match record {
            Ok(r) => r,
            Err(e) => {
                rejected.push(RowIssue {
                    line,
                    reason: e.to_string(),
                });
                continue;
            }
        };
        match parse_poll_row(&record, &cols) {
            Ok(poll) => polls.push(poll),
            Err(reason) => rejected.push(RowIssue { line, reason }),
        }
    }
    Ok(PollLoad { polls, rejected })
}

fn parse_poll_row(record: &csv::StringRecord, cols: &[usize]) -> Result<Poll, String> {
    let field = |i: usize| record.get(cols[i]).unwrap_or("").trim();
    let source = field(0);
    if source.is_empty() {
        return Err("empty source".to_string());
    }
    let start_date = parse_date(field(1))?;
    let end_date = parse_date(field(2))?;
    let respondents: i64 = field(3)
        .parse()
        .map_err(|_| format!("bad respondent count `{}`", field(3)))?;
    if respondents < 1 {
        return Err(format!("respondent count {respondents} below 1"));
    }
    let pct_c1 = parse_pct(field(4))?;
    let pct_c2 = parse_pct(field(5))?;
    let raw = RawShare::new(pct_c1, pct_c2).map_err(|e| e.to_string())?;
    Poll::new(
        source,
        start_date,
        end_date,
        u32::try_from(respondents).map_err(|_| "respondent count too large".to_string())?,
        raw,
    )
    .map_err(|e| e.to_string())
}

fn parse_date(s: &str) -> Result<chrono::NaiveDate, String> {
    chrono::NaiveDate::parse_from_str(s, "%Y-%m-%d").map_err(|_| format!("bad date `{s}`"))
}

fn parse_pct(s: &str) -> Result<f64, String> {
    s.parse::<f64>().map_err(|_| format!("bad percentage `{s}`"))
}

const RESULT_COLUMNS: [&str; 3] = ["scope", "pct_c1", "pct_c2"];

/// Loads an election-results CSV: one row per scope. Adjusted shares are
/// recomputed from the raw percentages, never trusted from the file. A
/// repeated scope is a format error.
pub fn load_results(path: impl AsRef<Path>) -> Result<Vec<ElectionResult>, IngestError> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| io_err(path, e))?;
    let mut reader = csv::Reader::from_reader(file);
    let headers = reader
        .headers()
        .map_err(|e| IngestError::Csv {
            path: path.to_path_buf(),
            source: e,
        })?
        .clone();
    let cols = required_columns(path, &headers, &RESULT_COLUMNS)?;

    let mut results: Vec<ElectionResult> = Vec::new();
    for (idx, record) in reader.records().enumerate() {
        let line = idx as u64 + 2;
        let bad_row = |message: String| IngestError::BadRow {
            path: path.to_path_buf(),
            line,
            message,
        };
        let record = record.map_err(|e| bad_row(e.to_string()))?;
        let field = |i: usize| record.get(cols[i]).unwrap_or("").trim();
        let scope: Scope = field(0).parse().map_err(|e| bad_row(format!("{e}")))?;
        if results.iter().any(|r| r.scope == scope) {
            return Err(IngestError::DuplicateScope {
                path: path.to_path_buf(),
                scope: scope.to_string(),
            });
        }
        let raw = RawShare::new(
            parse_pct(field(1)).map_err(&bad_row)?,
            parse_pct(field(2)).map_err(&bad_row)?,
        )
        .map_err(|e| bad_row(e.to_string()))?;
        results.push(ElectionResult::new(scope, raw));
    }
    Ok(results)
}

/// Finds the result row for a scope.
pub fn result_for<'a>(results: &'a [ElectionResult], scope: Scope) -> Option<&'a ElectionResult> {
    results.iter().find(|r| r.scope == scope)
}

/// One tweet as materialized in a corpus file.
#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct TweetRecord {
    pub tweet_id: String,
    pub user_id: String,
    pub text: String,
    #[serde(default)]
    pub lang: Option<String>,
    #[serde(default)]
    pub geo_state: Option<String>,
    #[serde(default)]
    pub user_location: Option<String>,
}

/// Streaming reader over a newline-delimited tweet corpus. Yields records
/// in file order; malformed lines are skipped and counted, never fatal.
pub struct CorpusReader<R> {
    lines: std::io::Lines<BufReader<R>>,
    skipped: u64,
}

impl CorpusReader<File> {
    pub fn open(path: impl AsRef<Path>) -> Result<Self, IngestError> {
        let path = path.as_ref();
        let file = File::open(path).map_err(|e| io_err(path, e))?;
        Ok(CorpusReader::new(file))
    }
}

impl<R: Read> CorpusReader<R> {
    pub fn new(reader: R) -> Self {
        CorpusReader {
            lines: BufReader::new(reader).lines(),
            skipped: 0,
        }
    }

    /// Lines skipped so far because they failed to parse.
    pub fn skipped(&self) -> u64 {
        self.skipped
    }
}

impl<R: Read> Iterator for CorpusReader<R> {
    type Item = std::io::Result<TweetRecord>;

    fn next(&mut self) -> Option<Self::Item> {
        loop {
            match self.lines.next()? {
                Err(e) => return Some(Err(e)),
                Ok(line) => {
                    if line.trim().is_empty() {
                        continue;
                    }
                    match serde_json::from_str::<TweetRecord>(&line) {
                        Ok(record) => return Some(Ok(record)),
                        Err(_) => {
                            self.skipped += 1;
                            continue;
                        }
                    }
                }
            }
        }
    }
}

/// Opens a corpus file for streaming.
pub fn load_corpus(path: impl AsRef<Path>) -> Result<CorpusReader<File>, IngestError> {
    CorpusReader::open(path)
}

/// How a record was resolved to a state.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ResolutionMethod {
    Geotag,
    ProfileText,
    Unresolved,
}

/// The state attached to one tweet record, if any, and the signal that
/// produced it. A state is present exactly when the method is not
/// `Unresolved`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StateResolution {
    pub state: Option<StateCode>,
    pub method: ResolutionMethod,
}

/// Resolves one record to a state. Geotags take precedence over profile
/// text; profile text goes through the bundled gazetteer. A geotag that is
/// not a valid postal code is ignored rather than trusted.
pub fn resolve_state(record: &TweetRecord) -> StateResolution {
    if let Some(geo) = record.geo_state.as_deref() {
        if let Ok(code) = geo.parse::<StateCode>() {
            return StateResolution {
                state: Some(code),
                method: ResolutionMethod::Geotag,
            };
        }
    }
    if let Some(location) = record.user_location.as_deref() {
        if let Some(code) = Gazetteer::bundled().match_location(location) {
            return StateResolution {
                state: Some(code),
                method: ResolutionMethod::ProfileText,
            };
        }
    }
    StateResolution {
        state: None,
        method: ResolutionMethod::Unresolved,
    }
}

const SNAPSHOT_HEADER: &str = "user_id,sum_c1,sum_c2,state,tweets_seen";

/// Persists a user-sentiment snapshot as CSV, ordered by user id, with sums
/// at full round-trip precision. The file is written to a temporary sibling
/// and renamed into place so readers never observe a partial snapshot.
pub fn persist_user_sentiments(users: &UserBook, path: impl AsRef<Path>) -> Result<(), IngestError> {
    let path = path.as_ref();
    let write_err = |e: std::io::Error| IngestError::Write {
        path: path.to_path_buf(),
        source: e,
    };
    let tmp_path = path.with_extension("tmp");
    {
        let tmp = File::create(&tmp_path).map_err(write_err)?;
        let mut out = BufWriter::new(tmp);
        writeln!(out, "{SNAPSHOT_HEADER}").map_err(write_err)?;
        for user in users.values() {
            writeln!(
                out,
                "{},{},{},{},{}",
                csv_escape(&user.user_id),
                user.sum_c1,
                user.sum_c2,
                user.state.map(|s| s.as_str().to_string()).unwrap_or_default(),
                user.tweets_seen,
            )
            .map_err(write_err)?;
        }
        out.flush().map_err(write_err)?;
    }
    std::fs::rename(&tmp_path, path).map_err(write_err)
}

fn csv_escape(field: &str) -> String {
    if field.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", field.replace('"', "\"\""))
    } else {
        field.to_string()
    }
}

/// Loads a snapshot written by [`persist_user_sentiments`];
/// `load(persist(x))` is the identity, field for field.
pub fn load_user_sentiments(path: impl AsRef<Path>) -> Result<UserBook, IngestError> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| io_err(path, e))?;
    let mut reader = csv::Reader::from_reader(BufReader::new(file));
    let headers = reader
        .headers()
        .map_err(|e| IngestError::Csv {
            path: path.to_path_buf(),
            source: e,
        })?
        .clone();
    let cols = required_columns(
        path,
        &headers,
        &["user_id", "sum_c1", "sum_c2", "state", "tweets_seen"],
    )?;

    let mut book = UserBook::new();
    for (idx, record) in reader.records().enumerate() {
        let line = idx as u64 + 2;
        let bad_row = |message: String| IngestError::BadRow {
            path: path.to_path_buf(),
            line,
            message,
        };
        let record = record.map_err(|e| bad_row(e.to_string()))?;
        let field = |i: usize| record.get(cols[i]).unwrap_or("");
        let user_id = field(0).to_string();
        let sum_c1: f64 = field(1)
            .parse()
            .map_err(|_| bad_row(format!("bad sum `{}`", field(1))))?;
        let sum_c2: f64 = field(2)
            .parse()
            .map_err(|_| bad_row(format!("bad sum `{}`", field(2))))?;
        let state = match field(3).trim() {
            "" => None,
            s => Some(
                s.parse::<StateCode>()
                    .map_err(|e| bad_row(format!("{e}")))?,
            ),
        };
        let tweets_seen: u64 = field(4)
            .parse()
            .map_err(|_| bad_row(format!("bad tweet count `{}`", field(4))))?;
        book.insert(
            user_id.clone(),
            UserSentiment {
                user_id,
                sum_c1,
                sum_c2,
                state,
                tweets_seen,
            },
        );
    }
    Ok(book)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write as _;

    fn write_temp(name: &str, contents: &str) -> PathBuf {
        let dir = std::env::temp_dir().join("votebias-ingest-tests");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join(format!("{}-{name}", std::process::id()));
        let mut f = File::create(&path).unwrap();
        f.write_all(contents.as_bytes()).unwrap();
        path
    }

    #[test]
    fn loads_valid_poll_rows_and_reports_rejects() {
        let path = write_temp(
            "polls.csv",
            "source,start_date,end_date,respondents,pct_c1,pct_c2\n\
             Fox News,2016-11-03,2016-11-06,1295,44.0,48.0\n\
             Fox News,2016-11-01,2016-11-03,0,43.0,45.0\n\
             Fox News,2016-10-22,2016-10-25,1221,41.0,44.0\n",
        );
        let load = load_polls(&path).unwrap();
        assert_eq!(load.polls.len(), 2);
        assert_eq!(load.rejected.len(), 1);
        assert_eq!(load.rejected[0].line, 3);
        assert!(load.rejected[0].reason.contains("below 1"));
    }

    #[test]
    fn header_only_poll_file_is_empty() {
        let path = write_temp(
            "empty.csv",
            "source,start_date,end_date,respondents,pct_c1,pct_c2\n",
        );
        let load = load_polls(&path).unwrap();
        assert!(load.polls.is_empty());
        assert!(load.rejected.is_empty());
    }

    #[test]
    fn missing_column_is_a_format_error() {
        let path = write_temp(
            "nocol.csv",
            "source,start_date,end_date,pct_c1,pct_c2\nA,2016-01-01,2016-01-02,40,50\n",
        );
        match load_polls(&path) {
            Err(IngestError::MissingColumn { column, .. }) => assert_eq!(column, "respondents"),
            other => panic!("expected MissingColumn, got {other:?}"),
        }
    }

    #[test]
    fn results_recompute_adjustment_and_reject_duplicates() {
        let path = write_temp("results.csv", "scope,pct_c1,pct_c2\nUS,46.3,48.2\nOH,52.1,43.5\n");
        let results = load_results(&path).unwrap();
        assert_eq!(results.len(), 2);
        let us = result_for(&results, Scope::National).unwrap();
        assert_eq!(crate::polls::round_pp(us.adjusted.c1_percent(), 2), 48.99);
        let oh = result_for(&results, "OH".parse().unwrap()).unwrap();
        assert_eq!(crate::polls::round_pp(oh.adjusted.c1_percent(), 1), 54.5);

        let dup = write_temp("dup.csv", "scope,pct_c1,pct_c2\nUS,46.3,48.2\nUS,1,2\n");
        assert!(matches!(
            load_results(&dup),
            Err(IngestError::DuplicateScope { .. })
        ));
    }

    #[test]
    fn corpus_streams_and_counts_skips() {
        let path = write_temp(
            "corpus.ndjson",
            r#"{"tweet_id":"1","user_id":"u1","text":"hello"}
{"tweet_id":"2","user_id":"u2","text":"world","lang":"en","geo_state":"MI"}
{"tweet_id":"3","user_id":"u3"}
not json at all
{"tweet_id":"4","user_id":"u4","text":"again","user_location":"Rochester, NY"}
"#,
        );
        let mut reader = load_corpus(&path).unwrap();
        let records: Vec<TweetRecord> = (&mut reader).map(|r| r.unwrap()).collect();
        assert_eq!(records.len(), 3);
        assert_eq!(reader.skipped(), 2); // missing text + non-JSON line
        assert_eq!(records[1].geo_state.as_deref(), Some("MI"));
    }

    #[test]
    fn resolution_prefers_geotag_over_profile() {
        let rec = TweetRecord {
            tweet_id: "1".into(),
            user_id: "u".into(),
            text: String::new(),
            lang: None,
            geo_state: Some("MI".into()),
            user_location: Some("Rochester, NY".into()),
        };
        let res = resolve_state(&rec);
        assert_eq!(res.method, ResolutionMethod::Geotag);
        assert_eq!(res.state.unwrap().as_str(), "MI");
    }

    #[test]
    fn resolution_falls_back_to_profile_then_unresolved() {
        let mut rec = TweetRecord {
            tweet_id: "1".into(),
            user_id: "u".into(),
            text: String::new(),
            lang: None,
            geo_state: None,
            user_location: Some("Rochester, NY".into()),
        };
        let res = resolve_state(&rec);
        assert_eq!(res.method, ResolutionMethod::ProfileText);
        assert_eq!(res.state.unwrap().as_str(), "NY");

        rec.user_location = Some("Paris, France".into());
        let res = resolve_state(&rec);
        assert_eq!(res.method, ResolutionMethod::Unresolved);
        assert_eq!(res.state, None);

        // an invalid geotag is ignored, not trusted
        rec.geo_state = Some("ZZ".into());
        rec.user_location = Some("Toledo".into());
        let res = resolve_state(&rec);
        assert_eq!(res.method, ResolutionMethod::ProfileText);
        assert_eq!(res.state.unwrap().as_str(), "OH");
    }

    #[test]
    fn snapshot_round_trip_is_identity() {
        let mut book = UserBook::new();
        for (id, c1, c2, state, seen) in [
            ("alice", 0.30000000000000004, -1.25, Some("MI"), 7u64),
            ("bob", 0.1 + 0.2, 0.0, None, 3),
            ("carol,quoted", -0.7431, 2.5e-17, Some("OH"), 1),
        ] {
            let mut u = UserSentiment::new(id);
            u.sum_c1 = c1;
            u.sum_c2 = c2;
            u.state = state.map(|s| s.parse().unwrap());
            u.tweets_seen = seen;
            book.insert(id.to_string(), u);
        }
        let dir = std::env::temp_dir().join("votebias-ingest-tests");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join(format!("{}-snapshot.csv", std::process::id()));
        persist_user_sentiments(&book, &path).unwrap();
        let loaded = load_user_sentiments(&path).unwrap();
        assert_eq!(book, loaded);
    }

    #[test]
    fn empty_snapshot_round_trips() {
        let dir = std::env::temp_dir().join("votebias-ingest-tests");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join(format!("{}-empty-snapshot.csv", std::process::id()));
        persist_user_sentiments(&UserBook::new(), &path).unwrap();
        assert!(load_user_sentiments(&path).unwrap().is_empty());
    }
}
