//! Thin command-line front end over the report commands.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use votebias::electorate::CandidateIndicators;
use votebias::report::{
    cmd_adjust, cmd_aggregate, cmd_bias, cmd_compare, cmd_predict, cmd_series, PredictConfig,
    SeriesBy,
};
use votebias::scope::Scope;

#[derive(Parser)]
#[command(
    name = "votebias",
    version,
    about = "Bias analysis for election predictions: polls vs. tweet sentiment"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CandidateNames {
    /// Display name for candidate 1 (the reference candidate for bias signs)
    #[arg(long, default_value = "Trump")]
    c1_name: String,
    /// Display name for candidate 2
    #[arg(long, default_value = "Clinton")]
    c2_name: String,
}

#[derive(Subcommand)]
enum Command {
    /// Apply the two-party adjustment to each poll in a file
    Adjust {
        /// Poll CSV input
        #[arg(long = "in")]
        input: PathBuf,
        /// Output CSV
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        names: CandidateNames,
    },
    /// Collapse each source's polls into respondent-weighted monthly rows
    Aggregate {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        names: CandidateNames,
    },
    /// Per-source bias against the actual outcome, plus average rows
    Bias {
        #[arg(long = "in")]
        input: PathBuf,
        /// Election results CSV
        #[arg(long)]
        results: PathBuf,
        /// Series granularity
        #[arg(long, default_value = "month")]
        by: SeriesBy,
        /// Scope to compare against (US or a state code)
        #[arg(long, default_value = "US")]
        scope: Scope,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        names: CandidateNames,
    },
    /// Extrapolate votes from a tweet corpus and report shares and bias
    Predict {
        /// Tweet corpus (newline-delimited JSON records)
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        results: PathBuf,
        /// Sentiment word list; bundled list when omitted
        #[arg(long)]
        lexicon: Option<PathBuf>,
        /// Scopes to tally, e.g. --scope US,CA,MI
        #[arg(long, value_delimiter = ',', default_value = "US")]
        scope: Vec<Scope>,
        #[arg(long)]
        out: PathBuf,
        /// Where to persist the per-user sentiment snapshot
        /// (default: output path with a users.csv extension)
        #[arg(long)]
        snapshot: Option<PathBuf>,
        /// Worker threads for scoring; 0 uses all cores
        #[arg(long, default_value_t = 0)]
        threads: usize,
        /// Keep only records whose language tag is English or absent
        #[arg(long)]
        english_only: bool,
        /// Indicator tokens attributing a tweet to candidate 1
        #[arg(long, value_delimiter = ',', default_values_t = ["trump".to_string(), "pence".to_string()])]
        c1_indicators: Vec<String>,
        /// Indicator tokens attributing a tweet to candidate 2
        #[arg(long, value_delimiter = ',', default_values_t = ["clinton".to_string(), "kaine".to_string()])]
        c2_indicators: Vec<String>,
        #[command(flatten)]
        names: CandidateNames,
    },
    /// Join poll biases with social-media biases by scope
    Compare {
        /// A `bias` output CSV (per-source average rows are used)
        #[arg(long)]
        polls: PathBuf,
        /// A `predict` output CSV
        #[arg(long)]
        social: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        names: CandidateNames,
    },
    /// Chronological bias series for plotting
    Series {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        results: PathBuf,
        /// Restrict to one source (default: all sources)
        #[arg(long)]
        source: Option<String>,
        #[arg(long, default_value = "poll")]
        by: SeriesBy,
        #[arg(long, default_value = "US")]
        scope: Scope,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        names: CandidateNames,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> Result<(), Box<dyn std::error::Error>> {
    match cli.command {
        Command::Adjust { input, out, names } => {
            let summary = cmd_adjust(&input, &out)?;
            report_rejects(&summary.rejected);
            eprintln!(
                "adjusted {} polls ({} vs {}) -> {}",
                summary.rows,
                names.c1_name,
                names.c2_name,
                out.display()
            );
        }
        Command::Aggregate { input, out, names } => {
            let summary = cmd_aggregate(&input, &out)?;
            report_rejects(&summary.rejected);
            eprintln!(
                "wrote {} monthly rows ({} vs {}) -> {}",
                summary.rows,
                names.c1_name,
                names.c2_name,
                out.display()
            );
        }
        Command::Bias {
            input,
            results,
            by,
            scope,
            out,
            names,
        } => {
            let summary = cmd_bias(&input, &results, by, scope, &out)?;
            report_rejects(&summary.rejected);
            for (source, avg) in &summary.source_averages {
                eprintln!("{scope} {source}: average bias {avg} toward {}", names.c1_name);
            }
            if let Some(overall) = summary.overall {
                eprintln!(
                    "{scope} all sources: average bias {overall} toward {}",
                    names.c1_name
                );
            }
        }
        Command::Predict {
            input,
            results,
            lexicon,
            scope,
            out,
            snapshot,
            threads,
            english_only,
            c1_indicators,
            c2_indicators,
            names,
        } => {
            let cfg = PredictConfig {
                corpus: &input,
                results: &results,
                lexicon: lexicon.as_deref(),
                scopes: scope,
                output: &out,
                snapshot: snapshot.as_deref(),
                threads,
                english_only,
                indicators: CandidateIndicators::new(&c1_indicators, &c2_indicators),
            };
            let summary = cmd_predict(&cfg)?;
            eprintln!(
                "processed {} tweets from {} users ({} malformed lines skipped, {} duplicates, {} filtered by language)",
                summary.tweets_processed,
                summary.users,
                summary.lines_skipped,
                summary.duplicates,
                summary.language_filtered
            );
            for row in &summary.rows {
                match (row.tally.shares(), row.bias) {
                    (Some(shares), Some(bias)) => eprintln!(
                        "{}: {} {:.1}% vs {} {:.1}%, bias {} toward {}",
                        row.scope,
                        names.c1_name,
                        shares.c1_percent(),
                        names.c2_name,
                        shares.c2_percent(),
                        bias,
                        names.c1_name
                    ),
                    _ => eprintln!("{}: no voting users", row.scope),
                }
            }
            eprintln!("snapshot -> {}", summary.snapshot_path.display());
        }
        Command::Compare {
            polls,
            social,
            out,
            names,
        } => {
            let summary = cmd_compare(&polls, &social, &out)?;
            if let (Some(p), Some(s)) = (summary.poll_overall, summary.social_overall) {
                eprintln!(
                    "{} scopes: polls average {} vs social {} (toward {})",
                    summary.scopes, p, s, names.c1_name
                );
            }
        }
        Command::Series {
            input,
            results,
            source,
            by,
            scope,
            out,
            names: _,
        } => {
            let rows = cmd_series(&input, &results, source.as_deref(), by, scope, &out)?;
            eprintln!("wrote {rows} series rows -> {}", out.display());
        }
    }
    Ok(())
}

fn report_rejects(rejected: &[votebias::ingest::RowIssue]) {
    for issue in rejected {
        eprintln!("warning: input line {} rejected: {}", issue.line, issue.reason);
    }
}
