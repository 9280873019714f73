//! Geographic scoping: U.S. state codes and report scope (national or one state).

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Postal codes for the 50 states plus DC.
pub const STATE_CODES: [&str; 51] = [
    "AL", "AK", "AZ", "AR", "CA", "CO", "CT", "DE", "DC", "FL", "GA", "HI", "ID", "IL", "IN",
    "IA", "KS", "KY", "LA", "ME", "MD", "MA", "MI", "MN", "MS", "MO", "MT", "NE", "NV", "NH",
    "NJ", "NM", "NY", "NC", "ND", "OH", "OK", "OR", "PA", "RI", "SC", "SD", "TN", "TX", "UT",
    "VT", "VA", "WA", "WV", "WI", "WY",
];

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ScopeError {
    #[error("unknown state code `{0}`")]
    UnknownState(String),
    #[error("empty scope")]
    Empty,
}

/// Two-letter U.S. state postal code (includes DC), stored uppercase.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct StateCode([u8; 2]);

impl StateCode {
    pub fn as_str(&self) -> &str {
        std::str::from_utf8(&self.0).expect("state codes are ASCII")
    }
}

impl FromStr for StateCode {
    type Err = ScopeError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let upper = s.trim().to_ascii_uppercase();
        if STATE_CODES.contains(&upper.as_str()) {
            let b = upper.as_bytes();
            Ok(StateCode([b[0], b[1]]))
        } else {
            Err(ScopeError::UnknownState(s.to_string()))
        }
    }
}

impl TryFrom<String> for StateCode {
    type Error = ScopeError;
    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

impl From<StateCode> for String {
    fn from(c: StateCode) -> String {
        c.as_str().to_string()
    }
}

impl fmt::Display for StateCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Scope of a result or report row: the national race or a single state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scope {
    National,
    State(StateCode),
}

impl Scope {
    pub fn as_str(&self) -> &str {
        match self {
            Scope::National => "US",
            Scope::State(code) => code.as_str(),
        }
    }
}

impl FromStr for Scope {
    type Err = ScopeError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        if t.is_empty() {
            return Err(ScopeError::Empty);
        }
        if t.eq_ignore_ascii_case("US") || t.eq_ignore_ascii_case("national") {
            Ok(Scope::National)
        } else {
            Ok(Scope::State(t.parse()?))
        }
    }
}

impl fmt::Display for Scope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Sort key: US first, then states alphabetically.
impl PartialOrd for Scope {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Scope {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        match (self, other) {
            (Scope::National, Scope::National) => std::cmp::Ordering::Equal,
            (Scope::National, Scope::State(_)) => std::cmp::Ordering::Less,
            (Scope::State(_), Scope::National) => std::cmp::Ordering::Greater,
            (Scope::State(a), Scope::State(b)) => a.cmp(b),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_states_case_insensitively() {
        assert_eq!("ny".parse::<StateCode>().unwrap().as_str(), "NY");
        assert_eq!(" mi ".parse::<StateCode>().unwrap().as_str(), "MI");
        assert!("ZZ".parse::<StateCode>().is_err());
    }

    #[test]
    fn parses_scopes() {
        assert_eq!("US".parse::<Scope>().unwrap(), Scope::National);
        assert_eq!(
            "tx".parse::<Scope>().unwrap(),
            Scope::State("TX".parse().unwrap())
        );
        assert!("Narnia".parse::<Scope>().is_err());
    }

    #[test]
    fn national_sorts_before_states() {
        let mut v = vec![
            "WI".parse::<Scope>().unwrap(),
            Scope::National,
            "CA".parse::<Scope>().unwrap(),
        ];
        v.sort();
        assert_eq!(v[0], Scope::National);
        assert_eq!(v[1].as_str(), "CA");
    }
}
