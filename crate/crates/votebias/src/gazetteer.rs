//! Free-text location matching against a bundled U.S. gazetteer.
//!
//! Profile location strings ("Rochester, NY", "born in Ohio", "NYC") are
//! resolved to a state with three passes, strongest signal first:
//!
//! 1. postal abbreviations with a delimiter guard — the code must follow a
//!    comma or whitespace and must not run into more letters, so "INDIANA"
//!    never matches `IN`;
//! 2. full state names (longest match at the earliest position wins, so
//!    "West Virginia" beats "Virginia");
//! 3. the 100 most populous U.S. cities plus a few aliases.
//!
//! The tables live in `data/gazetteer_us.tsv`, a versioned artifact compiled
//! into the binary, so resolution is reproducible offline. Matching is
//! case-insensitive. A handful of entries are shadowed by design: the city
//! "Washington" can never win over Washington state, while explicit
//! "Washington, D.C." variants resolve to DC.

use std::sync::OnceLock;

use crate::scope::{StateCode, STATE_CODES};

const GAZETTEER_TSV: &str = include_str!("../data/gazetteer_us.tsv");

/// Lookup tables for profile-text state resolution.
pub struct Gazetteer {
    /// Full state names (lowercase), longest first.
    state_names: Vec<(String, StateCode)>,
    /// City names and aliases (lowercase), longest first.
    cities: Vec<(String, StateCode)>,
    /// Lowercase postal codes, aligned with `STATE_CODES`.
    abbreviations: Vec<(String, StateCode)>,
}

impl Gazetteer {
    /// The gazetteer bundled with the crate, parsed once per process.
    pub fn bundled() -> &'static Gazetteer {
        static BUNDLED: OnceLock<Gazetteer> = OnceLock::new();
        BUNDLED.get_or_init(|| Gazetteer::parse(GAZETTEER_TSV))
    }

    fn parse(tsv: &str) -> Gazetteer {
        let mut state_names = Vec::new();
        let mut cities = Vec::new();
        for line in tsv.lines() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut fields = line.split('\t');
            let (Some(kind), Some(name), Some(code)) =
                (fields.next(), fields.next(), fields.next())
            else {
                continue;
            };
            let code: StateCode = code.parse().expect("gazetteer codes are valid");
            match kind {
                "state" => state_names.push((name.to_lowercase(), code)),
                "city" => cities.push((name.to_lowercase(), code)),
                other => panic!("unknown gazetteer entry kind `{other}`"),
            }
        }
        // Longest-first so specific names win at equal positions.
        state_names.sort_by(|a, b| b.0.len().cmp(&a.0.len()).then(a.0.cmp(&b.0)));
        cities.sort_by(|a, b| b.0.len().cmp(&a.0.len()).then(a.0.cmp(&b.0)));
        let abbreviations = STATE_CODES
            .iter()
            .map(|c| (c.to_lowercase(), c.parse().unwrap()))
            .collect();
        Gazetteer {
            state_names,
            cities,
            abbreviations,
        }
    }

    /// Resolves a free-text location to a state, or `None` when nothing in
    /// the gazetteer matches.
    pub fn match_location(&self, location: &str) -> Option<StateCode> {
        let lower = location.to_lowercase();
        self.match_abbreviation(&lower)
            .or_else(|| earliest_match(&lower, &self.state_names))
            .or_else(|| earliest_match(&lower, &self.cities))
    }

    /// Guarded postal-code scan. A code counts only when it sits on clean
    /// boundaries, and its leading delimiter decides how strict to be:
    /// after a comma anywhere ("Rochester, NY — for now"), after whitespace
    /// only as the final word ("rochester ny"). Codes that double as common
    /// English words ("in", "or", "me") would otherwise hijack free text
    /// like "living in ohio". The earliest occurrence wins.
    fn match_abbreviation(&self, lower: &str) -> Option<StateCode> {
        let bytes = lower.as_bytes();
        let mut best: Option<(usize, StateCode)> = None;
        for (abbr, code) in &self.abbreviations {
            let mut from = 0;
            while let Some(rel) = lower[from..].find(abbr.as_str()) {
                let pos = from + rel;
                if guarded(bytes, pos, abbr.len()) {
                    if best.is_none_or(|(p, _)| pos < p) {
                        best = Some((pos, *code));
                    }
                    break;
                }
                from = pos + 1;
            }
        }
        best.map(|(_, code)| code)
    }
}

fn guarded(bytes: &[u8], pos: usize, len: usize) -> bool {
    if pos == 0 {
        return false;
    }
    // trailing edge must not run into a word
    if bytes.get(pos + len).is_some_and(|b| b.is_ascii_alphanumeric()) {
        return false;
    }
    // walk back over whitespace to the delimiter
    let mut i = pos;
    let mut saw_space = false;
    while i > 0 && bytes[i - 1].is_ascii_whitespace() {
        saw_space = true;
        i -= 1;
    }
    if i > 0 && bytes[i - 1] == b',' {
        return true;
    }
    // space-delimited: accept only in final-word position
    saw_space && bytes[pos + len..].iter().all(|b| !b.is_ascii_alphanumeric())
}

/// Earliest substring match; entries are pre-sorted longest-first so ties at
/// one position go to the more specific name.
fn earliest_match(lower: &str, entries: &[(String, StateCode)]) -> Option<StateCode> {
    let mut best: Option<(usize, StateCode)> = None;
    for (name, code) in entries {
        if let Some(pos) = lower.find(name.as_str()) {
            if best.is_none_or(|(p, _)| pos < p) {
                best = Some((pos, *code));
            }
        }
    }
    best.map(|(_, code)| code)
}
