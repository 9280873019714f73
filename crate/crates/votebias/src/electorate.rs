//! From per-tweet sentiment to votes and vote-share predictions.
//!
//! Each tweet is attributed to candidate tickets by indicator tokens; its
//! compound sentiment accumulates into the author's running sentiment toward
//! the mentioned candidate(s). A user's extrapolated vote is whichever
//! candidate holds the higher accumulated sentiment, with exact ties (most
//! commonly the untouched 0/0 state) counting as abstentions. Vote shares
//! are taken over voting users only.
//!
//! Accumulation is a pair of running sums, so per-user state can be built in
//! parallel shards (shard by user id) and merged associatively; the decision
//! and tally steps are pure over the merged state.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::polls::{bias, Bias, ElectionResult, TwoPartyShare};
use crate::scope::{Scope, StateCode};
use crate::sentiment::CompoundScore;

/// Which candidate tickets a tweet text mentions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MentionClass {
    C1Only,
    C2Only,
    Both,
    Neither,
}

/// Indicator tokens attributing a tweet to each ticket. Matching is
/// case-insensitive substring, so "#TrumpTrain" counts for "trump".
///
/// The default is the 2016 ticket pair: "trump"/"pence" for candidate 1 and
/// "clinton"/"kaine" for candidate 2, keeping the positive-bias-means-Trump
/// sign convention used throughout.
#[derive(Debug, Clone)]
pub struct CandidateIndicators {
    c1: Vec<String>,
    c2: Vec<String>,
}

impl Default for CandidateIndicators {
    fn default() -> Self {
        CandidateIndicators::new(["trump", "pence"], ["clinton", "kaine"])
    }
}

impl CandidateIndicators {
    pub fn new<I1, I2, S1, S2>(c1: I1, c2: I2) -> Self
    where
        I1: IntoIterator<Item = S1>,
        I2: IntoIterator<Item = S2>,
        S1: AsRef<str>,
        S2: AsRef<str>,
    {
        CandidateIndicators {
            c1: c1.into_iter().map(|s| s.as_ref().to_lowercase()).collect(),
            c2: c2.into_iter().map(|s| s.as_ref().to_lowercase()).collect(),
        }
    }

    /// Classifies a text by indicator hits for either ticket.
    pub fn classify(&self, text: &str) -> MentionClass {
        let lower = text.to_lowercase();
        let hits_c1 = self.c1.iter().any(|ind| lower.contains(ind.as_str()));
        let hits_c2 = self.c2.iter().any(|ind| lower.contains(ind.as_str()));
        match (hits_c1, hits_c2) {
            (true, true) => MentionClass::Both,
            (true, false) => MentionClass::C1Only,
            (false, true) => MentionClass::C2Only,
            (false, false) => MentionClass::Neither,
        }
    }
}

/// One user's accumulated sentiment toward each candidate, plus the resolved
/// home state when known.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UserSentiment {
    pub user_id: String,
    pub sum_c1: f64,
    pub sum_c2: f64,
    pub state: Option<StateCode>,
    pub tweets_seen: u64,
}

impl UserSentiment {
    pub fn new(user_id: impl Into<String>) -> Self {
        UserSentiment {
            user_id: user_id.into(),
            sum_c1: 0.0,
            sum_c2: 0.0,
            state: None,
            tweets_seen: 0,
        }
    }

    /// Folds one tweet's compound score into the user's sums: single-mention
    /// tweets update that candidate, both-mention tweets update both, and
    /// no-mention tweets update neither. Every tweet counts as seen.
    pub fn accumulate(&mut self, score: CompoundScore, mentions: MentionClass) {
        let value = score.value();
        match mentions {
            MentionClass::C1Only => self.sum_c1 += value,
            MentionClass::C2Only => self.sum_c2 += value,
            MentionClass::Both => {
                self.sum_c1 += value;
                self.sum_c2 += value;
            }
            MentionClass::Neither => {}
        }
        self.tweets_seen += 1;
    }

    /// The user's extrapolated vote: the candidate with the higher
    /// accumulated sentiment, or an abstention on an exact tie.
    pub fn vote(&self) -> Vote {
        if self.sum_c1 > self.sum_c2 {
            Vote::C1
        } else if self.sum_c2 > self.sum_c1 {
            Vote::C2
        } else {
            Vote::Abstain
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Vote {
    C1,
    C2,
    Abstain,
}

/// Vote counts for one scope. Shares are computed over voting users only;
/// abstainers are counted but never enter the denominator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct VoteTally {
    pub votes_c1: u64,
    pub votes_c2: u64,
    pub abstentions: u64,
}

impl VoteTally {
    pub fn from_counts(votes_c1: u64, votes_c2: u64, abstentions: u64) -> Self {
        VoteTally {
            votes_c1,
            votes_c2,
            abstentions,
        }
    }

    pub fn voting(&self) -> u64 {
        self.votes_c1 + self.votes_c2
    }

    /// Two-party vote shares, or `None` when no user voted (the no-data
    /// signal for an empty scope).
    pub fn shares(&self) -> Option<TwoPartyShare> {
        let voting = self.voting();
        if voting == 0 {
            return None;
        }
        Some(
            TwoPartyShare::from_fraction(self.votes_c1 as f64 / voting as f64)
                .expect("vote fraction is within [0, 1]"),
        )
    }
}

/// Counts votes over users in a scope. National includes every user, even
/// those with no resolved state; a state scope includes only users resolved
/// to that state.
pub fn tally<'a>(users: impl IntoIterator<Item = &'a UserSentiment>, scope: Scope) -> VoteTally {
    let mut t = VoteTally::default();
    for user in users {
        let in_scope = match scope {
            Scope::National => true,
            Scope::State(code) => user.state == Some(code),
        };
        if !in_scope {
            continue;
        }
        match user.vote() {
            Vote::C1 => t.votes_c1 += 1,
            Vote::C2 => t.votes_c2 += 1,
            Vote::Abstain => t.abstentions += 1,
        }
    }
    t
}

/// Bias of a tally against the actual outcome: shares are treated as a
/// two-party prediction and compared in adjusted points. `None` when the
/// tally has no voters.
pub fn predict_bias(tally: &VoteTally, actual: &ElectionResult) -> Option<Bias> {
    tally.shares().map(|shares| bias(&shares, &actual.adjusted))
}

/// Deterministically ordered collection of per-user sentiment state.
pub type UserBook = BTreeMap<String, UserSentiment>;

/// Merges sharded accumulations: same-user entries add their sums and tweet
/// counts; a resolved state wins over none (later shards override, matching
/// most-recent-tweet semantics when shards are merged in stream order).
pub fn merge_user_books(mut into: UserBook, from: UserBook) -> UserBook {
    for (user_id, user) in from {
        match into.get_mut(&user_id) {
            None => {
                into.insert(user_id, user);
            }
            Some(existing) => {
                existing.sum_c1 += user.sum_c1;
                existing.sum_c2 += user.sum_c2;
                existing.tweets_seen += user.tweets_seen;
                if user.state.is_some() {
                    existing.state = user.state;
                }
            }
        }
    }
    into
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn score(v: f64) -> CompoundScore {
        CompoundScore::new(v).unwrap()
    }

    #[test]
    fn classifies_indicator_hits() {
        let ind = CandidateIndicators::default();
        assert_eq!(ind.classify("Vote Trump and Pence!"), MentionClass::C1Only);
        assert_eq!(ind.classify("Clinton vs Trump tonight"), MentionClass::Both);
        assert_eq!(ind.classify("I love pizza"), MentionClass::Neither);
        assert_eq!(ind.classify("#ImWithHer and Kaine"), MentionClass::C2Only);
        // substring matching catches hashtags and mashups
        assert_eq!(ind.classify("#TrumpTrain all the way"), MentionClass::C1Only);
        assert_eq!(ind.classify("TRUMP2016"), MentionClass::C1Only);
    }

    #[test]
    fn accumulates_by_mention_class() {
        let mut u = UserSentiment::new("u1");
        u.accumulate(score(0.6), MentionClass::C1Only);
        assert_eq!((u.sum_c1, u.sum_c2), (0.6, 0.0));

        let mut u = UserSentiment::new("u2");
        u.accumulate(score(0.2), MentionClass::C1Only);
        u.accumulate(score(-0.1), MentionClass::C2Only);
        u.accumulate(score(0.3), MentionClass::Both);
        assert!((u.sum_c1 - 0.5).abs() < 1e-12);
        assert!((u.sum_c2 - 0.2).abs() < 1e-12);
        assert_eq!(u.tweets_seen, 3);
    }

    #[test]
    fn neither_mention_updates_nothing_but_counts() {
        let mut u = UserSentiment::new("u");
        u.accumulate(score(0.2), MentionClass::Both);
        u.accumulate(score(0.9), MentionClass::Neither);
        assert_eq!((u.sum_c1, u.sum_c2), (0.2, 0.2));
        assert_eq!(u.tweets_seen, 2);
    }

    #[test]
    fn vote_is_argmax_with_tie_abstention() {
        let mut u = UserSentiment::new("u");
        u.sum_c1 = 0.5;
        u.sum_c2 = 0.3;
        assert_eq!(u.vote(), Vote::C1);
        u.sum_c1 = 0.2;
        u.sum_c2 = 0.2;
        assert_eq!(u.vote(), Vote::Abstain);
        // less negative wins
        u.sum_c1 = -0.4;
        u.sum_c2 = -0.1;
        assert_eq!(u.vote(), Vote::C2);
        // the untouched user abstains
        assert_eq!(UserSentiment::new("fresh").vote(), Vote::Abstain);
    }

    #[test]
    fn tally_scopes_by_state() {
        let mut users = Vec::new();
        for (id, state, c1, c2) in [
            ("a", Some("MI"), 1.0, 0.0),
            ("b", Some("MI"), 0.0, 1.0),
            ("c", Some("OH"), 1.0, 0.0),
            ("d", None, 1.0, 0.0),
            ("e", Some("MI"), 0.5, 0.5),
        ] {
            let mut u = UserSentiment::new(id);
            u.state = state.map(|s| s.parse().unwrap());
            u.sum_c1 = c1;
            u.sum_c2 = c2;
            users.push(u);
        }
        let national = tally(&users, Scope::National);
        assert_eq!((national.votes_c1, national.votes_c2, national.abstentions), (3, 1, 1));
        let mi = tally(&users, "MI".parse().unwrap());
        assert_eq!((mi.votes_c1, mi.votes_c2, mi.abstentions), (1, 1, 1));
        // unresolved users count nationally but in no state
        let oh = tally(&users, "OH".parse().unwrap());
        assert_eq!((oh.votes_c1, oh.votes_c2, oh.abstentions), (1, 0, 0));
    }

    #[test]
    fn national_tally_shares_match_published_counts() {
        use crate::polls::round_pp;
        let t = VoteTally::from_counts(252_011, 229_346, 0);
        let shares = t.shares().unwrap();
        assert_eq!(round_pp(shares.c1_percent(), 1), 52.4);
        assert_eq!(round_pp(shares.c2_percent(), 1), 47.6);
    }

    #[test]
    fn california_tally_shares() {
        use crate::polls::round_pp;
        let t = VoteTally::from_counts(11_515, 12_095, 0);
        let shares = t.shares().unwrap();
        assert_eq!(round_pp(shares.c1_percent(), 1), 48.8);
        assert_eq!(round_pp(shares.c2_percent(), 1), 51.2);
    }

    #[test]
    fn empty_tally_has_no_shares() {
        let t = VoteTally::from_counts(0, 0, 7);
        assert_eq!(t.shares(), None);
    }

    #[test]
    fn predict_bias_matches_national_figure() {
        use crate::polls::{round_pp, RawShare};
        let actual = ElectionResult::new(
            Scope::National,
            RawShare::new(46.3, 48.2).unwrap(),
        );
        let t = VoteTally::from_counts(252_011, 229_346, 0);
        let b = predict_bias(&t, &actual).unwrap();
        assert_eq!(round_pp(b.pp(), 1), 3.4);
        // share equal to the outcome has zero bias
        let exact = VoteTally::from_counts(4899, 5101, 3);
        let b = predict_bias(&exact, &actual).unwrap();
        assert!(b.pp().abs() < 0.01);
    }

    #[test]
    fn michigan_prediction_bias() {
        use crate::polls::{round_pp, RawShare};
        let actual = ElectionResult::new(
            "MI".parse().unwrap(),
            RawShare::new(47.6, 47.3).unwrap(),
        );
        let t = VoteTally::from_counts(2_757, 2_407, 0);
        let b = predict_bias(&t, &actual).unwrap();
        assert_eq!(round_pp(b.pp(), 1), 3.2);
    }

    proptest! {
        #[test]
        fn accumulation_is_order_insensitive(
            scores in prop::collection::vec((-1.0f64..=1.0, 0u8..4), 0..40),
            seed in 0u64..1000,
        ) {
            let classes = [
                MentionClass::C1Only,
                MentionClass::C2Only,
                MentionClass::Both,
                MentionClass::Neither,
            ];
            let mut forward = UserSentiment::new("u");
            for &(v, c) in &scores {
                forward.accumulate(score(v), classes[c as usize]);
            }
            // a deterministic shuffle driven by the seed
            let mut shuffled = scores.clone();
            let mut state = seed.wrapping_add(0x9e3779b97f4a7c15);
            for i in (1..shuffled.len()).rev() {
                state ^= state << 13;
                state ^= state >> 7;
                state ^= state << 17;
                shuffled.swap(i, (state as usize) % (i + 1));
            }
            let mut reordered = UserSentiment::new("u");
            for &(v, c) in &shuffled {
                reordered.accumulate(score(v), classes[c as usize]);
            }
            prop_assert!((forward.sum_c1 - reordered.sum_c1).abs() < 1e-9);
            prop_assert!((forward.sum_c2 - reordered.sum_c2).abs() < 1e-9);
            prop_assert_eq!(forward.tweets_seen, reordered.tweets_seen);
        }

        #[test]
        fn votes_are_conserved(
            users in prop::collection::vec((-1.0f64..=1.0, -1.0f64..=1.0, 0u8..3), 0..60),
        ) {
            let states = [None, Some("MI"), Some("OH")];
            let book: Vec<UserSentiment> = users
                .iter()
                .enumerate()
                .map(|(i, &(c1, c2, s))| {
                    let mut u = UserSentiment::new(format!("u{i}"));
                    u.sum_c1 = c1;
                    u.sum_c2 = c2;
                    u.state = states[s as usize].map(|c| c.parse().unwrap());
                    u
                })
                .collect();
            let t = tally(&book, Scope::National);
            prop_assert_eq!(
                t.votes_c1 + t.votes_c2 + t.abstentions,
                book.len() as u64
            );
            if let Some(shares) = t.shares() {
                prop_assert!((shares.c1_percent() + shares.c2_percent() - 100.0).abs() < 1e-9);
            }
        }

        #[test]
        fn extra_c1_praise_cannot_flip_a_c1_vote(
            c1 in -5.0f64..5.0,
            c2 in -5.0f64..5.0,
            boost in 0.0f64..=1.0,
        ) {
            let mut u = UserSentiment::new("u");
            u.sum_c1 = c1;
            u.sum_c2 = c2;
            if u.vote() == Vote::C1 {
                u.accumulate(score(boost), MentionClass::C1Only);
                prop_assert_eq!(u.vote(), Vote::C1);
            }
        }
    }
}
