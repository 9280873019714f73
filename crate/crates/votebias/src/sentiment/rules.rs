//! Rule constants and context checks for the lexicon scorer.
//!
//! The scalars and word lists below are the published constants of the VADER
//! method (Hutto & Gilbert 2014): booster/dampener increments, the negation
//! scalar, ALL-CAPS and punctuation emphasis amounts, and the normalization
//! alpha. They are transcribed verbatim from the reference artifacts and
//! pinned by the oracle-agreement tests; do not tune them.

use std::collections::{HashMap, HashSet};
use std::sync::OnceLock;

/// Increment applied by an intensity booster ("very", "extremely", ...).
pub const B_INCR: f64 = 0.293;
/// Decrement applied by a dampener ("slightly", "kind of", ...).
pub const B_DECR: f64 = -0.293;
/// Emphasis added when a sentiment-laden word is in ALL CAPS amid mixed-case
/// text.
pub const C_INCR: f64 = 0.733;
/// Scalar applied when a sentiment-laden word is negated.
pub const N_SCALAR: f64 = -0.74;
/// Per-`!` emphasis, up to four marks.
pub const E_MARK_INCR: f64 = 0.292;
/// Per-`?` emphasis for two or three marks; more cap at `Q_MARK_CAP`.
pub const Q_MARK_INCR: f64 = 0.18;
pub const Q_MARK_CAP: f64 = 0.96;
/// Expected upper bound of a raw valence sum, used by score normalization.
pub const NORMALIZATION_ALPHA: f64 = 15.0;

const NEGATORS: &[&str] = &[
    "aint", "arent", "cannot", "cant", "couldnt", "darent", "didnt", "doesnt",
    "ain't", "aren't", "can't", "couldn't", "daren't", "didn't", "doesn't",
    "dont", "hadnt", "hasnt", "havent", "isnt", "mightnt", "mustnt", "neither",
    "don't", "hadn't", "hasn't", "haven't", "isn't", "mightn't", "mustn't",
    "neednt", "needn't", "never", "none", "nope", "nor", "not", "nothing", "nowhere",
    "oughtnt", "shant", "shouldnt", "uhuh", "wasnt", "werent",
    "oughtn't", "shan't", "shouldn't", "uh-uh", "wasn't", "weren't",
    "without", "wont", "wouldnt", "won't", "wouldn't", "rarely", "seldom", "despite",
];

const BOOSTERS: &[(&str, f64)] = &[
    ("absolutely", B_INCR), ("amazingly", B_INCR), ("awfully", B_INCR),
    ("completely", B_INCR), ("considerable", B_INCR), ("considerably", B_INCR),
    ("decidedly", B_INCR), ("deeply", B_INCR), ("effing", B_INCR),
    ("enormous", B_INCR), ("enormously", B_INCR),
    ("entirely", B_INCR), ("especially", B_INCR), ("exceptional", B_INCR),
    ("exceptionally", B_INCR), ("extreme", B_INCR), ("extremely", B_INCR),
    ("fabulously", B_INCR), ("flipping", B_INCR), ("flippin", B_INCR),
    ("frackin", B_INCR), ("fracking", B_INCR), ("fricking", B_INCR),
    ("frickin", B_INCR), ("frigging", B_INCR), ("friggin", B_INCR),
    ("fully", B_INCR), ("fuckin", B_INCR), ("fucking", B_INCR),
    ("fuggin", B_INCR), ("fugging", B_INCR), ("greatly", B_INCR),
    ("hella", B_INCR), ("highly", B_INCR), ("hugely", B_INCR),
    ("incredible", B_INCR), ("incredibly", B_INCR), ("intensely", B_INCR),
    ("major", B_INCR), ("majorly", B_INCR), ("more", B_INCR), ("most", B_INCR),
    ("particularly", B_INCR), ("purely", B_INCR), ("quite", B_INCR),
    ("really", B_INCR), ("remarkably", B_INCR), ("so", B_INCR),
    ("substantially", B_INCR), ("thoroughly", B_INCR), ("total", B_INCR),
    ("totally", B_INCR), ("tremendous", B_INCR), ("tremendously", B_INCR),
    ("uber", B_INCR), ("unbelievably", B_INCR), ("unusually", B_INCR),
    ("utter", B_INCR), ("utterly", B_INCR), ("very", B_INCR),
    ("almost", B_DECR), ("barely", B_DECR), ("hardly", B_DECR),
    ("just enough", B_DECR), ("kind of", B_DECR), ("kinda", B_DECR),
    ("kindof", B_DECR), ("kind-of", B_DECR), ("less", B_DECR),
    ("little", B_DECR), ("marginal", B_DECR), ("marginally", B_DECR),
    ("occasional", B_DECR), ("occasionally", B_DECR), ("partly", B_DECR),
    ("scarce", B_DECR), ("scarcely", B_DECR), ("slight", B_DECR),
    ("slightly", B_DECR), ("somewhat", B_DECR), ("sort of", B_DECR),
    ("sorta", B_DECR), ("sortof", B_DECR), ("sort-of", B_DECR),
];

/// Idioms containing lexicon words whose meaning overrides the word valences.
const SPECIAL_CASE_IDIOMS: &[(&str, f64)] = &[
    ("the shit", 3.0),
    ("the bomb", 3.0),
    ("bad ass", 1.5),
    ("badass", 1.5),
    ("yeah right", -2.0),
    ("kiss of death", -1.5),
    ("to die for", 3.0),
];

pub fn negators() -> &'static HashSet<&'static str> {
    static SET: OnceLock<HashSet<&'static str>> = OnceLock::new();
    SET.get_or_init(|| NEGATORS.iter().copied().collect())
}

pub fn boosters() -> &'static HashMap<&'static str, f64> {
    static MAP: OnceLock<HashMap<&'static str, f64>> = OnceLock::new();
    MAP.get_or_init(|| BOOSTERS.iter().copied().collect())
}

fn special_idioms() -> &'static HashMap<&'static str, f64> {
    static MAP: OnceLock<HashMap<&'static str, f64>> = OnceLock::new();
    MAP.get_or_init(|| SPECIAL_CASE_IDIOMS.iter().copied().collect())
}

/// True when a lowercased token negates what follows: either a listed
/// negator or any contraction carrying "n't".
pub fn is_negator(token_lower: &str) -> bool {
    negators().contains(token_lower) || token_lower.contains("n't")
}

/// Booster contribution of the token at some distance before a sentiment
/// word. Zero for non-boosters; sign follows the target valence; ALL-CAPS
/// boosters in mixed-case text carry extra emphasis.
pub fn booster_scalar(
    token_original: &str,
    token_lower: &str,
    valence: f64,
    is_cap_diff: bool,
) -> f64 {
    let Some(&base) = boosters().get(token_lower) else {
        return 0.0;
    };
    let mut scalar = if valence < 0.0 { -base } else { base };
    if super::python_isupper(token_original) && is_cap_diff {
        if valence > 0.0 {
            scalar += C_INCR;
        } else {
            scalar -= C_INCR;
        }
    }
    scalar
}

/// Negation handling for the token window `start_i + 1` positions before the
/// sentiment word at `i`, including the "never so/this" intensifier idiom and
/// the "without doubt" exemption.
pub fn negation_check(valence: f64, lower: &[String], start_i: usize, i: usize) -> f64 {
    let w = |k: usize| lower[k].as_str();
    match start_i {
        0 => {
            if is_negator(w(i - 1)) {
                return valence * N_SCALAR;
            }
        }
        1 => {
            if w(i - 2) == "never" && (w(i - 1) == "so" || w(i - 1) == "this") {
                return valence * 1.25;
            } else if w(i - 2) == "without" && w(i - 1) == "doubt" {
                return valence;
            } else if is_negator(w(i - 2)) {
                return valence * N_SCALAR;
            }
        }
        2 => {
            if (w(i - 3) == "never" && (w(i - 2) == "so" || w(i - 2) == "this"))
                || (w(i - 1) == "so" || w(i - 1) == "this")
            {
                return valence * 1.25;
            } else if w(i - 3) == "without" && (w(i - 2) == "doubt" || w(i - 1) == "doubt") {
                return valence;
            } else if is_negator(w(i - 3)) {
                return valence * N_SCALAR;
            }
        }
        _ => {}
    }
    valence
}

/// Special-case idiom handling around the sentiment word at `i` (only
/// reached once the window extends three tokens back). An idiom match
/// replaces the valence; trailing multiword dampeners ("kind of", "sort of")
/// then adjust it.
pub fn special_idioms_check(valence: f64, lower: &[String], i: usize) -> f64 {
    let mut valence = valence;
    let join = |r: std::ops::RangeInclusive<usize>| -> String {
        lower[r].join(" ")
    };

    let one_zero = join(i - 1..=i);
    let two_one_zero = join(i - 2..=i);
    let two_one = join(i - 2..=i - 1);
    let three_two_one = join(i - 3..=i - 1);
    let three_two = join(i - 3..=i - 2);

    // Window order matters: the first matching sequence wins.
    for seq in [&one_zero, &two_one_zero, &two_one, &three_two_one, &three_two] {
        if let Some(&v) = special_idioms().get(seq.as_str()) {
            valence = v;
            break;
        }
    }
    if lower.len() - 1 > i {
        if let Some(&v) = special_idioms().get(join(i..=i + 1).as_str()) {
            valence = v;
        }
    }
    if lower.len() - 1 > i + 1 {
        if let Some(&v) = special_idioms().get(join(i..=i + 2).as_str()) {
            valence = v;
        }
    }
    // Multiword boosters ("sort of", "kind of", "just enough") sitting in the
    // preceding trigram.
    for n_gram in [&three_two_one, &three_two, &two_one] {
        if let Some(&b) = boosters().get(n_gram.as_str()) {
            valence += b;
        }
    }
    valence
}
