//! Lexicon and rule-based sentiment scoring for short social-media texts.
//!
//! This is a from-scratch implementation of the VADER method (Hutto &
//! Gilbert 2014): every token's dictionary valence is adjusted by contextual
//! rules — intensity boosters and dampeners up to three tokens back (with
//! distance decay), negation flipping, ALL-CAPS emphasis, special-case
//! idioms, "least" negation, contrastive-conjunction reweighting around
//! "but" — and the summed result is normalized into [-1, 1], with `!`/`?`
//! emphasis applied at the text level.
//!
//! One compound score is produced per text; there is no sentence splitting.
//! The word list ships as a pinned artifact (see `data/vader_lexicon.txt`);
//! scores are deterministic for a fixed text and lexicon, and the scorer is
//! a pure function, so texts can be scored from any number of threads
//! against one shared `Lexicon`.
//!
//! Emoticons present in the word list (":)", ":D", ...) score like any other
//! token. There is no emoji-to-description translation layer: 2016-era
//! tweets lean on ASCII emoticons, which the lexicon already covers.

mod rules;

use std::collections::HashMap;
use std::fmt;
use std::io::{BufRead, BufReader, Read};
use std::path::Path;
use std::sync::OnceLock;

use thiserror::Error;

pub use rules::{B_DECR, B_INCR, C_INCR, N_SCALAR};

use rules::{
    booster_scalar, boosters, negation_check, special_idioms_check, NORMALIZATION_ALPHA,
};

#[derive(Debug, Error)]
pub enum LexiconError {
    #[error("cannot read lexicon: {0}")]
    Io(#[from] std::io::Error),
    #[error("lexicon contains no valid entries")]
    Empty,
}

/// Sentiment word list: token to valence in [-4, +4].
///
/// File format: UTF-8, one `token<TAB>valence` pair per line (extra
/// tab-separated columns are ignored), `#` lines are comments. Duplicate
/// tokens keep the last occurrence and are reported as warnings. Keys are
/// stored verbatim, but lookups lowercase the probe, matching the reference
/// artifact: a handful of published entries with uppercase letters are
/// intentionally unreachable.
#[derive(Debug, Clone)]
pub struct Lexicon {
    entries: HashMap<String, f64>,
    warnings: Vec<String>,
}

impl Lexicon {
    pub fn from_path(path: impl AsRef<Path>) -> Result<Self, LexiconError> {
        Self::from_reader(std::fs::File::open(path)?)
    }

    pub fn from_reader(reader: impl Read) -> Result<Self, LexiconError> {
        let mut entries = HashMap::new();
        let mut warnings = Vec::new();
        for line in BufReader::new(reader).lines() {
            let line = line?;
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut fields = line.split('\t');
            let Some(token) = fields.next() else { continue };
            let Some(valence) = fields.next().and_then(|v| v.parse::<f64>().ok()) else {
                continue;
            };
            if !valence.is_finite() {
                continue;
            }
            if entries.insert(token.to_string(), valence).is_some() {
                warnings.push(format!("duplicate lexicon token `{token}`, last wins"));
            }
        }
        if entries.is_empty() {
            return Err(LexiconError::Empty);
        }
        Ok(Lexicon { entries, warnings })
    }

    /// The word list bundled with the crate (the published ~7.5k-entry
    /// artifact), parsed once per process.
    pub fn bundled() -> &'static Lexicon {
        static BUNDLED: OnceLock<Lexicon> = OnceLock::new();
        BUNDLED.get_or_init(|| {
            Lexicon::from_reader(include_str!("../../data/vader_lexicon.txt").as_bytes())
                .expect("bundled lexicon parses")
        })
    }

    /// Valence of a token, looked up case-insensitively.
    pub fn valence(&self, token: &str) -> Option<f64> {
        self.get_lower(&token.to_lowercase())
    }

    pub(crate) fn get_lower(&self, token_lower: &str) -> Option<f64> {
        self.entries.get(token_lower).copied()
    }

    pub(crate) fn contains_lower(&self, token_lower: &str) -> bool {
        self.entries.contains_key(token_lower)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Parser warnings collected while loading (duplicate tokens).
    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    /// Iterates over `(token, valence)` entries in arbitrary order.
    pub fn entries(&self) -> impl Iterator<Item = (&str, f64)> {
        self.entries.iter().map(|(t, v)| (t.as_str(), *v))
    }
}

/// Compound sentiment of one text, bounded to [-1, +1]. Positive is
/// favorable, negative unfavorable, zero neutral; texts containing no
/// lexicon token score exactly zero.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct CompoundScore(f64);

impl CompoundScore {
    /// Wraps an externally supplied compound value. `None` unless the value
    /// is finite and within [-1, 1].
    pub fn new(value: f64) -> Option<Self> {
        (value.is_finite() && (-1.0..=1.0).contains(&value)).then_some(CompoundScore(value))
    }

    pub fn value(&self) -> f64 {
        self.0
    }
}

impl fmt::Display for CompoundScore {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:.4}", self.0)
    }
}

/// One whitespace-delimited chunk of text: the original form (capitalization
/// and attached punctuation intact) plus the lookup form used for dictionary
/// matching.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Token<'a> {
    pub original: &'a str,
    pub lookup: &'a str,
}

/// ASCII punctuation stripped from token edges.
const PUNCTUATION: &str = "!\"#$%&'()*+,-./:;<=>?@[\\]^_`{|}~";

/// Removes leading and trailing punctuation from a token unless doing so
/// leaves two or fewer characters, which would destroy emoticons (":)") and
/// clipped short words.
fn strip_punc_if_word(token: &str) -> &str {
    let stripped = token.trim_matches(|c| PUNCTUATION.contains(c));
    if stripped.chars().count() <= 2 {
        token
    } else {
        stripped
    }
}

/// Splits text on whitespace into tokens that keep their original form
/// alongside the punctuation-stripped lookup form.
pub fn tokenize(text: &str) -> Vec<Token<'_>> {
    text.split_whitespace()
        .map(|chunk| Token {
            original: chunk,
            lookup: strip_punc_if_word(chunk),
        })
        .collect()
}

/// Mirrors Python's `str.isupper`: at least one cased character and no
/// lowercase ones.
pub(crate) fn python_isupper(token: &str) -> bool {
    let mut has_cased = false;
    for ch in token.chars() {
        if ch.is_lowercase() {
            return false;
        }
        if ch.is_uppercase() {
            has_cased = true;
        }
    }
    has_cased
}

struct ParsedText<'a> {
    /// Lookup form of each token (caps preserved).
    tokens: Vec<&'a str>,
    /// Lowercased lookup forms, computed once.
    lower: Vec<String>,
    /// Whether the text mixes ALL-CAPS tokens with normal ones; emphasis
    /// only applies when it does.
    is_cap_diff: bool,
}

impl<'a> ParsedText<'a> {
    fn parse(text: &'a str) -> Self {
        let tokens: Vec<&str> = text
            .split_whitespace()
            .map(strip_punc_if_word)
            .collect();
        let lower: Vec<String> = tokens.iter().map(|t| t.to_lowercase()).collect();
        let all_caps = tokens.iter().filter(|t| python_isupper(t)).count();
        let diff = tokens.len() - all_caps;
        let is_cap_diff = diff > 0 && diff < tokens.len();
        ParsedText {
            tokens,
            lower,
            is_cap_diff,
        }
    }
}

/// Scores one text against a lexicon: rule-adjusted token valences are
/// summed, punctuation emphasis is added, and the total `s` is normalized to
/// `s / sqrt(s^2 + alpha)`. The result is reported at the reference output
/// precision of four decimals.
pub fn compound_sentiment(text: &str, lexicon: &Lexicon) -> CompoundScore {
    let parsed = ParsedText::parse(text);
    let n = parsed.tokens.len();
    let mut sentiments: Vec<f64> = Vec::with_capacity(n);

    for i in 0..n {
        let lower = parsed.lower[i].as_str();
        // Boosters contribute through their neighbors, never on their own.
        if boosters().contains_key(lower) {
            sentiments.push(0.0);
            continue;
        }
        if lower == "kind" && i + 1 < n && parsed.lower[i + 1] == "of" {
            sentiments.push(0.0);
            continue;
        }
        sentiments.push(token_valence(&parsed, lexicon, i));
    }

    but_check(&parsed.lower, &mut sentiments);

    if sentiments.is_empty() {
        return CompoundScore(0.0);
    }
    let mut total: f64 = sentiments.iter().sum();
    let emphasis = punctuation_emphasis(text);
    if total > 0.0 {
        total += emphasis;
    } else if total < 0.0 {
        total -= emphasis;
    }
    CompoundScore(round4(normalize(total)))
}

/// Rule-adjusted valence of the token at `i`. Non-lexicon tokens score zero.
fn token_valence(parsed: &ParsedText<'_>, lexicon: &Lexicon, i: usize) -> f64 {
    let Some(mut valence) = lexicon.get_lower(&parsed.lower[i]) else {
        return 0.0;
    };

    if python_isupper(parsed.tokens[i]) && parsed.is_cap_diff {
        if valence > 0.0 {
            valence += C_INCR;
        } else {
            valence -= C_INCR;
        }
    }

    // Look up to three tokens back for boosters, negators and idioms, with
    // the booster effect decaying by distance. A preceding token that is
    // itself a lexicon word contributes through its own valence instead.
    for start_i in 0..3 {
        if i > start_i && !lexicon.contains_lower(&parsed.lower[i - start_i - 1]) {
            let mut s = booster_scalar(
                parsed.tokens[i - start_i - 1],
                &parsed.lower[i - start_i - 1],
                valence,
                parsed.is_cap_diff,
            );
            if start_i == 1 && s != 0.0 {
                s *= 0.95;
            }
            if start_i == 2 && s != 0.0 {
                s *= 0.9;
            }
            valence += s;
            valence = negation_check(valence, &parsed.lower, start_i, i);
            if start_i == 2 {
                valence = special_idioms_check(valence, &parsed.lower, i);
            }
        }
    }

    least_check(valence, parsed, lexicon, i)
}

/// "least" before a sentiment word negates it, except in "at least" and
/// "very least".
fn least_check(valence: f64, parsed: &ParsedText<'_>, lexicon: &Lexicon, i: usize) -> f64 {
    if i > 1 && !lexicon.contains_lower(&parsed.lower[i - 1]) && parsed.lower[i - 1] == "least" {
        if parsed.lower[i - 2] != "at" && parsed.lower[i - 2] != "very" {
            return valence * N_SCALAR;
        }
    } else if i > 0
        && !lexicon.contains_lower(&parsed.lower[i - 1])
        && parsed.lower[i - 1] == "least"
    {
        return valence * N_SCALAR;
    }
    valence
}

/// A contrastive "but" halves sentiment before it and amplifies sentiment
/// after it by half; the clause after the conjunction dominates.
fn but_check(lower: &[String], sentiments: &mut [f64]) {
    let Some(but_index) = lower.iter().position(|w| w == "but") else {
        return;
    };
    for (i, s) in sentiments.iter_mut().enumerate() {
        if i < but_index {
            *s *= 0.5;
        } else if i > but_index {
            *s *= 1.5;
        }
    }
}

/// Emphasis from `!` (up to four, 0.292 each) and from repeated `?` (0.18
/// each for two or three, capped at 0.96 beyond). A single `?` is neutral.
fn punctuation_emphasis(text: &str) -> f64 {
    let ep_count = text.bytes().filter(|&b| b == b'!').count().min(4);
    let ep = ep_count as f64 * rules::E_MARK_INCR;
    let qm_count = text.bytes().filter(|&b| b == b'?').count();
    let qm = if qm_count > 1 {
        if qm_count <= 3 {
            qm_count as f64 * rules::Q_MARK_INCR
        } else {
            rules::Q_MARK_CAP
        }
    } else {
        0.0
    };
    ep + qm
}

fn normalize(score: f64) -> f64 {
    let norm = score / (score * score + NORMALIZATION_ALPHA).sqrt();
    norm.clamp(-1.0, 1.0)
}

/// Rounds to the reference output precision: four decimals via correctly
/// rounded decimal conversion.
fn round4(value: f64) -> f64 {
    format!("{value:.4}").parse().expect("formatted float parses")
}
