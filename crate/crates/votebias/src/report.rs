//! Batch report commands: the library half of the command-line interface.
//!
//! Each command reads flat input files, computes through the math and
//! pipeline modules, and writes one CSV with a fixed column set, stable row
//! order and fixed number formatting, so reruns on unchanged inputs are
//! byte-identical. Computed percentages and biases are written at two
//! decimals (inputs carry at most one); intermediate math never rounds.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{self, BufWriter};
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::electorate::{predict_bias, tally, CandidateIndicators, VoteTally};
use crate::ingest::{
    load_corpus, load_polls, load_results, load_user_sentiments, persist_user_sentiments,
    result_for, IngestError, RowIssue,
};
use crate::pipeline::{accumulate_stream, PipelineOptions};
use crate::polls::{
    adjust_two_party, aggregate_period, average_bias, group_by_source, monthly_bias_series,
    poll_bias_series, round_pp, Bias, Month, Poll,
};
use crate::scope::Scope;
use crate::sentiment::{Lexicon, LexiconError};

#[derive(Debug, Error)]
pub enum ReportError {
    #[error(transparent)]
    Ingest(#[from] IngestError),
    #[error(transparent)]
    Lexicon(#[from] LexiconError),
    #[error("no result row for scope {0}")]
    MissingScope(Scope),
    #[error("unknown source `{given}`; available sources: {available}")]
    UnknownSource { given: String, available: String },
    #[error("scope mismatch; only in poll input: [{poll_only}]; only in social input: [{social_only}]")]
    ScopeMismatch {
        poll_only: String,
        social_only: String,
    },
    #[error("{path}: {message}")]
    BadInput { path: PathBuf, message: String },
    #[error("cannot write {path}: {source}")]
    Write {
        path: PathBuf,
        source: csv::Error,
    },
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// Two decimals, rounded half away from zero. The empty string stands for
/// no data.
fn fmt2(value: f64) -> String {
    format!("{:.2}", round_pp(value, 2))
}

fn writer(path: &Path) -> Result<csv::Writer<BufWriter<File>>, ReportError> {
    let file = File::create(path).map_err(|e| ReportError::Ingest(IngestError::Write {
        path: path.to_path_buf(),
        source: e,
    }))?;
    Ok(csv::Writer::from_writer(BufWriter::new(file)))
}

fn write_row<W: io::Write>(
    out: &mut csv::Writer<W>,
    path: &Path,
    row: &[String],
) -> Result<(), ReportError> {
    out.write_record(row).map_err(|e| ReportError::Write {
        path: path.to_path_buf(),
        source: e,
    })
}

/// Months from first to last of a poll set, inclusive, so gap months render
/// as explicit blank rows.
fn month_span(polls: &[Poll]) -> Vec<Month> {
    let Some(first) = polls.iter().map(Poll::month).min() else {
        return Vec::new();
    };
    let last = polls.iter().map(Poll::month).max().unwrap();
    let mut months = Vec::new();
    let mut m = first;
    loop {
        months.push(m);
        if m == last {
            break;
        }
        m = m.next();
    }
    months
}

/// `adjust`: one output row per poll with raw and two-party adjusted shares.
pub fn cmd_adjust(input: &Path, output: &Path) -> Result<AdjustSummary, ReportError> {
    let load = load_polls(input)?;
    let mut out = writer(output)?;
    write_row(
        &mut out,
        output,
        &[
            "source", "start_date", "end_date", "respondents", "pct_c1", "pct_c2", "adj_c1",
            "adj_c2",
        ]
        .map(String::from),
    )?;
    for poll in &load.polls {
        let adj = adjust_two_party(&poll.raw);
        write_row(
            &mut out,
            output,
            &[
                poll.source.clone(),
                poll.start_date.to_string(),
                poll.end_date.to_string(),
                poll.respondents.to_string(),
                fmt2(poll.raw.pct_c1()),
                fmt2(poll.raw.pct_c2()),
                fmt2(adj.c1_percent()),
                fmt2(adj.c2_percent()),
            ],
        )?;
    }
    out.flush()?;
    Ok(AdjustSummary {
        rows: load.polls.len(),
        rejected: load.rejected,
    })
}

#[derive(Debug)]
pub struct AdjustSummary {
    pub rows: usize,
    pub rejected: Vec<RowIssue>,
}

/// `aggregate`: respondent-weighted monthly aggregation per source, with
/// blank rows for months a source did not poll.
pub fn cmd_aggregate(input: &Path, output: &Path) -> Result<AdjustSummary, ReportError> {
    let load = load_polls(input)?;
    let mut out = writer(output)?;
    write_row(
        &mut out,
        output,
        &["source", "period", "polls", "pct_c1", "pct_c2", "adj_c1", "adj_c2"].map(String::from),
    )?;
    let mut rows = 0;
    for (source, polls) in group_by_source(&load.polls) {
        for month in month_span(&polls) {
            let row = match aggregate_period(&polls, month) {
                Some(agg) => [
                    source.clone(),
                    month.to_string(),
                    agg.polls_included.to_string(),
                    fmt2(agg.raw.pct_c1()),
                    fmt2(agg.raw.pct_c2()),
                    fmt2(agg.adjusted.c1_percent()),
                    fmt2(agg.adjusted.c2_percent()),
                ],
                None => [
                    source.clone(),
                    month.to_string(),
                    "0".to_string(),
                    String::new(),
                    String::new(),
                    String::new(),
                    String::new(),
                ],
            };
            write_row(&mut out, output, &row)?;
            rows += 1;
        }
    }
    out.flush()?;
    Ok(AdjustSummary {
        rows,
        rejected: load.rejected,
    })
}

/// Granularity of a bias series: one point per poll or per month.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeriesBy {
    Poll,
    Month,
}

impl std::str::FromStr for SeriesBy {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "poll" => Ok(SeriesBy::Poll),
            "month" => Ok(SeriesBy::Month),
            other => Err(format!("bad granularity `{other}`, expected poll|month")),
        }
    }
}

/// Marker rows in bias output: per-source average and the cross-source line.
pub const AVERAGE_PERIOD: &str = "average";
pub const ALL_SOURCES: &str = "(all)";

/// `bias`: per-source bias rows (per poll or per month) against one scope's
/// actual outcome, an average row per source, and a cross-source average.
pub fn cmd_bias(
    input: &Path,
    results_path: &Path,
    by: SeriesBy,
    scope: Scope,
    output: &Path,
) -> Result<BiasSummary, ReportError> {
    let load = load_polls(input)?;
    let results = load_results(results_path)?;
    let actual = result_for(&results, scope)
        .ok_or(ReportError::MissingScope(scope))?
        .clone();

    let mut out = writer(output)?;
    write_row(
        &mut out,
        output,
        &["scope", "source", "period", "bias_pp"].map(String::from),
    )?;

    let mut source_averages: Vec<(String, Bias)> = Vec::new();
    for (source, polls) in group_by_source(&load.polls) {
        let mut biases: Vec<Bias> = Vec::new();
        match by {
            SeriesBy::Poll => {
                for point in poll_bias_series(&polls, &actual) {
                    write_row(
                        &mut out,
                        output,
                        &[
                            scope.to_string(),
                            source.clone(),
                            point.end_date.to_string(),
                            fmt2(point.bias.pp()),
                        ],
                    )?;
                    biases.push(point.bias);
                }
            }
            SeriesBy::Month => {
                let monthly: BTreeMap<Month, Bias> =
                    monthly_bias_series(&polls, &actual).into_iter().collect();
                for month in month_span(&polls) {
                    let cell = monthly.get(&month).map(|b| fmt2(b.pp())).unwrap_or_default();
                    write_row(
                        &mut out,
                        output,
                        &[scope.to_string(), source.clone(), month.to_string(), cell],
                    )?;
                }
                biases.extend(monthly.values().copied());
            }
        }
        if let Some(avg) = average_bias(&biases) {
            write_row(
                &mut out,
                output,
                &[
                    scope.to_string(),
                    source.clone(),
                    AVERAGE_PERIOD.to_string(),
                    fmt2(avg.pp()),
                ],
            )?;
            source_averages.push((source.clone(), avg));
        }
    }

    let overall = average_bias(
        &source_averages.iter().map(|(_, b)| *b).collect::<Vec<_>>(),
    );
    if let Some(overall) = overall {
        write_row(
            &mut out,
            output,
            &[
                scope.to_string(),
                ALL_SOURCES.to_string(),
                AVERAGE_PERIOD.to_string(),
                fmt2(overall.pp()),
            ],
        )?;
    }
    out.flush()?;
    Ok(BiasSummary {
        source_averages,
        overall,
        rejected: load.rejected,
    })
}

#[derive(Debug)]
pub struct BiasSummary {
    pub source_averages: Vec<(String, Bias)>,
    /// Unweighted mean of the per-source averages.
    pub overall: Option<Bias>,
    pub rejected: Vec<RowIssue>,
}

/// `series`: chronologically ordered bias points for plotting, optionally
/// filtered to one source.
pub fn cmd_series(
    input: &Path,
    results_path: &Path,
    source_filter: Option<&str>,
    by: SeriesBy,
    scope: Scope,
    output: &Path,
) -> Result<usize, ReportError> {
    let load = load_polls(input)?;
    let results = load_results(results_path)?;
    let actual = result_for(&results, scope)
        .ok_or(ReportError::MissingScope(scope))?
        .clone();

    let polls: Vec<Poll> = match source_filter {
        None => load.polls,
        Some(name) => {
            let filtered: Vec<Poll> = load
                .polls
                .iter()
                .filter(|p| p.source == name)
                .cloned()
                .collect();
            if filtered.is_empty() {
                let mut available: Vec<String> =
                    load.polls.iter().map(|p| p.source.clone()).collect();
                available.sort();
                available.dedup();
                return Err(ReportError::UnknownSource {
                    given: name.to_string(),
                    available: available.join(", "),
                });
            }
            filtered
        }
    };

    let mut out = writer(output)?;
    write_row(
        &mut out,
        output,
        &["source", "period", "bias_pp"].map(String::from),
    )?;
    let mut rows = 0;
    for (source, polls) in group_by_source(&polls) {
        match by {
            SeriesBy::Poll => {
                for point in poll_bias_series(&polls, &actual) {
                    write_row(
                        &mut out,
                        output,
                        &[source.clone(), point.end_date.to_string(), fmt2(point.bias.pp())],
                    )?;
                    rows += 1;
                }
            }
            SeriesBy::Month => {
                let monthly: BTreeMap<Month, Bias> =
                    monthly_bias_series(&polls, &actual).into_iter().collect();
                for month in month_span(&polls) {
                    let cell = monthly.get(&month).map(|b| fmt2(b.pp())).unwrap_or_default();
                    write_row(&mut out, output, &[source.clone(), month.to_string(), cell])?;
                    rows += 1;
                }
            }
        }
    }
    out.flush()?;
    Ok(rows)
}

/// Configuration for `predict`.
pub struct PredictConfig<'a> {
    pub corpus: &'a Path,
    pub results: &'a Path,
    /// Lexicon file; the bundled word list when absent.
    pub lexicon: Option<&'a Path>,
    pub scopes: Vec<Scope>,
    pub output: &'a Path,
    /// Snapshot path; defaults to the output path with a `users.csv`
    /// extension.
    pub snapshot: Option<&'a Path>,
    pub threads: usize,
    pub english_only: bool,
    pub indicators: CandidateIndicators,
}

#[derive(Debug)]
pub struct PredictRow {
    pub scope: Scope,
    pub tally: VoteTally,
    pub bias: Option<Bias>,
}

#[derive(Debug)]
pub struct PredictSummary {
    pub rows: Vec<PredictRow>,
    pub users: usize,
    pub tweets_processed: u64,
    pub lines_skipped: u64,
    pub duplicates: u64,
    pub language_filtered: u64,
    pub snapshot_path: PathBuf,
}

/// `predict`: scores a tweet corpus, accumulates per-user sentiment, decides
/// votes, and writes per-scope counts, shares and biases. The intermediate
/// user-sentiment snapshot is always persisted.
pub fn cmd_predict(cfg: &PredictConfig<'_>) -> Result<PredictSummary, ReportError> {
    let results = load_results(cfg.results)?;
    let owned_lexicon;
    let lexicon: &Lexicon = match cfg.lexicon {
        None => Lexicon::bundled(),
        Some(path) => {
            owned_lexicon = Lexicon::from_path(path)?;
            &owned_lexicon
        }
    };

    let mut scopes = cfg.scopes.clone();
    if scopes.is_empty() {
        scopes.push(Scope::National);
    }
    scopes.sort();
    scopes.dedup();
    // fail before the expensive pass if a scope has no actual result
    for scope in &scopes {
        result_for(&results, *scope).ok_or(ReportError::MissingScope(*scope))?;
    }

    let mut reader = load_corpus(cfg.corpus)?;
    let options = PipelineOptions {
        threads: cfg.threads,
        english_only: cfg.english_only,
    };
    let outcome = accumulate_stream(&mut reader, lexicon, &cfg.indicators, &options)?;
    let lines_skipped = reader.skipped();

    let snapshot_path = cfg
        .snapshot
        .map(Path::to_path_buf)
        .unwrap_or_else(|| cfg.output.with_extension("users.csv"));
    persist_user_sentiments(&outcome.users, &snapshot_path)?;

    let mut out = writer(cfg.output)?;
    write_row(
        &mut out,
        cfg.output,
        &[
            "scope",
            "votes_c1",
            "votes_c2",
            "abstentions",
            "share_c1",
            "share_c2",
            "bias_pp",
        ]
        .map(String::from),
    )?;
    let mut rows = Vec::new();
    for scope in scopes {
        let actual = result_for(&results, scope).expect("checked above");
        let t = tally(outcome.users.values(), scope);
        let b = predict_bias(&t, actual);
        let (share_c1, share_c2, bias_cell) = match t.shares() {
            Some(shares) => (
                fmt2(shares.c1_percent()),
                fmt2(shares.c2_percent()),
                fmt2(b.expect("bias exists when shares exist").pp()),
            ),
            None => (String::new(), String::new(), String::new()),
        };
        write_row(
            &mut out,
            cfg.output,
            &[
                scope.to_string(),
                t.votes_c1.to_string(),
                t.votes_c2.to_string(),
                t.abstentions.to_string(),
                share_c1,
                share_c2,
                bias_cell,
            ],
        )?;
        rows.push(PredictRow { scope, tally: t, bias: b });
    }
    out.flush()?;
    Ok(PredictSummary {
        rows,
        users: outcome.users.len(),
        tweets_processed: outcome.tweets_processed,
        lines_skipped,
        duplicates: outcome.duplicates,
        language_filtered: outcome.language_filtered,
        snapshot_path,
    })
}

/// Re-tallies a persisted snapshot for one scope; `predict` output re-fed
/// through this reproduces the same shares (no hidden state).
pub fn tally_snapshot(snapshot: &Path, scope: Scope) -> Result<VoteTally, ReportError> {
    let book = load_user_sentiments(snapshot)?;
    Ok(tally(book.values(), scope))
}

#[derive(Debug)]
pub struct CompareSummary {
    pub scopes: usize,
    /// Mean over every (scope, source) poll bias row.
    pub poll_overall: Option<Bias>,
    /// Mean over per-scope social biases.
    pub social_overall: Option<Bias>,
}

pub const SCOPE_MEAN: &str = "(mean)";
pub const OVERALL: &str = "(overall)";

/// `compare`: joins per-source poll biases (a `bias` output) with social
/// biases (a `predict` output) by scope and writes side-by-side rows with
/// absolute-bias columns, per-scope means, and an overall footer.
pub fn cmd_compare(
    poll_bias_path: &Path,
    social_path: &Path,
    output: &Path,
) -> Result<CompareSummary, ReportError> {
    let poll_rows = read_poll_bias(poll_bias_path)?;
    let social_rows = read_social_bias(social_path)?;

    let poll_scopes: Vec<Scope> = poll_rows.keys().copied().collect();
    let social_scopes: Vec<Scope> = social_rows.keys().copied().collect();
    let poll_only: Vec<String> = poll_scopes
        .iter()
        .filter(|s| !social_rows.contains_key(s))
        .map(Scope::to_string)
        .collect();
    let social_only: Vec<String> = social_scopes
        .iter()
        .filter(|s| !poll_rows.contains_key(s))
        .map(Scope::to_string)
        .collect();
    if !poll_only.is_empty() || !social_only.is_empty() {
        return Err(ReportError::ScopeMismatch {
            poll_only: poll_only.join(", "),
            social_only: social_only.join(", "),
        });
    }

    let mut out = writer(output)?;
    write_row(
        &mut out,
        output,
        &[
            "scope",
            "source",
            "poll_bias_pp",
            "social_bias_pp",
            "abs_poll_pp",
            "abs_social_pp",
        ]
        .map(String::from),
    )?;

    let mut all_poll: Vec<Bias> = Vec::new();
    let mut all_social: Vec<Bias> = Vec::new();
    for (scope, sources) in &poll_rows {
        let social = social_rows[scope];
        let mut scope_polls: Vec<Bias> = Vec::new();
        for (source, poll_bias) in sources {
            write_row(
                &mut out,
                output,
                &[
                    scope.to_string(),
                    source.clone(),
                    fmt2(poll_bias.pp()),
                    fmt2(social.pp()),
                    fmt2(poll_bias.abs()),
                    fmt2(social.abs()),
                ],
            )?;
            scope_polls.push(*poll_bias);
            all_poll.push(*poll_bias);
        }
        let scope_mean = average_bias(&scope_polls).expect("scope has at least one source");
        write_row(
            &mut out,
            output,
            &[
                scope.to_string(),
                SCOPE_MEAN.to_string(),
                fmt2(scope_mean.pp()),
                fmt2(social.pp()),
                fmt2(scope_mean.abs()),
                fmt2(social.abs()),
            ],
        )?;
        all_social.push(social);
    }

    let poll_overall = average_bias(&all_poll);
    let social_overall = average_bias(&all_social);
    if let (Some(p), Some(s)) = (poll_overall, social_overall) {
        write_row(
            &mut out,
            output,
            &[
                OVERALL.to_string(),
                SCOPE_MEAN.to_string(),
                fmt2(p.pp()),
                fmt2(s.pp()),
                fmt2(p.abs()),
                fmt2(s.abs()),
            ],
        )?;
    }
    out.flush()?;
    Ok(CompareSummary {
        scopes: poll_rows.len(),
        poll_overall,
        social_overall,
    })
}

/// Reads a `bias` output, keeping the per-source average rows.
fn read_poll_bias(path: &Path) -> Result<BTreeMap<Scope, BTreeMap<String, Bias>>, ReportError> {
    let file = File::open(path).map_err(|e| ReportError::Ingest(IngestError::Io {
        path: path.to_path_buf(),
        source: e,
    }))?;
    let mut reader = csv::Reader::from_reader(file);
    let headers = reader.headers().map_err(|e| bad_input(path, e.to_string()))?.clone();
    let idx = header_indices(path, &headers, &["scope", "source", "period", "bias_pp"])?;

    let mut rows: BTreeMap<Scope, BTreeMap<String, Bias>> = BTreeMap::new();
    for record in reader.records() {
        let record = record.map_err(|e| bad_input(path, e.to_string()))?;
        let field = |i: usize| record.get(idx[i]).unwrap_or("").trim();
        if field(2) != AVERAGE_PERIOD || field(1) == ALL_SOURCES || field(3).is_empty() {
            continue;
        }
        let scope: Scope = field(0)
            .parse()
            .map_err(|e| bad_input(path, format!("{e}")))?;
        let value: f64 = field(3)
            .parse()
            .map_err(|_| bad_input(path, format!("bad bias `{}`", field(3))))?;
        rows.entry(scope)
            .or_default()
            .insert(field(1).to_string(), Bias::from_pp(value));
    }
    if rows.is_empty() {
        return Err(bad_input(
            path,
            "no per-source average bias rows found".to_string(),
        ));
    }
    Ok(rows)
}

/// Reads a `predict` output, keeping scopes that have a bias.
fn read_social_bias(path: &Path) -> Result<BTreeMap<Scope, Bias>, ReportError> {
    let file = File::open(path).map_err(|e| ReportError::Ingest(IngestError::Io {
        path: path.to_path_buf(),
        source: e,
    }))?;
    let mut reader = csv::Reader::from_reader(file);
    let headers = reader.headers().map_err(|e| bad_input(path, e.to_string()))?.clone();
    let idx = header_indices(path, &headers, &["scope", "bias_pp"])?;

    let mut rows = BTreeMap::new();
    for record in reader.records() {
        let record = record.map_err(|e| bad_input(path, e.to_string()))?;
        let field = |i: usize| record.get(idx[i]).unwrap_or("").trim();
        if field(1).is_empty() {
            continue;
        }
        let scope: Scope = field(0)
            .parse()
            .map_err(|e| bad_input(path, format!("{e}")))?;
        let value: f64 = field(1)
            .parse()
            .map_err(|_| bad_input(path, format!("bad bias `{}`", field(1))))?;
        rows.insert(scope, Bias::from_pp(value));
    }
    if rows.is_empty() {
        return Err(bad_input(path, "no bias rows found".to_string()));
    }
    Ok(rows)
}

fn header_indices(
    path: &Path,
    headers: &csv::StringRecord,
    names: &[&str],
) -> Result<Vec<usize>, ReportError> {
    names
        .iter()
        .map(|name| {
            headers
                .iter()
                .position(|h| h.trim() == *name)
                .ok_or_else(|| bad_input(path, format!("missing column `{name}`")))
        })
        .collect()
}

fn bad_input(path: &Path, message: String) -> ReportError {
    ReportError::BadInput {
        path: path.to_path_buf(),
        message,
    }
}
