//! Pure math for two-party poll analysis.
//!
//! Three small pieces of arithmetic drive every poll report in this crate:
//!
//! 1. **Two-party adjustment** — discard third-party share and renormalize a
//!    pair of raw percentages so the two major candidates sum to 100%.
//! 2. **Respondent-weighted aggregation** — combine all polls a source ran in
//!    one calendar month into a single poll, weighting each poll's percentage
//!    by its respondent count.
//! 3. **Bias** — the signed percent-point gap between a prediction's adjusted
//!    candidate-1 share and the actual adjusted outcome. Positive means the
//!    prediction overestimated candidate 1.
//!
//! Shares are carried internally as fractions of 1 in double precision;
//! percent values appear only at construction and display boundaries, because
//! re-rounding between stages compounds error.
//!
//! Everything here is a pure function of its inputs and safe to call from any
//! number of threads. Weighted sums are plain additive accumulations, so
//! partial aggregates may be merged in any order.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use chrono::{Datelike, NaiveDate};
use thiserror::Error;

use crate::scope::Scope;

#[derive(Debug, Error, PartialEq)]
pub enum ShareError {
    #[error("percentage is not finite")]
    NonFinite,
    #[error("percentage {0} outside [0, 100]")]
    OutOfRange(f64),
    #[error("percentages sum to {0}, above 100")]
    OverSum(f64),
    #[error("both percentages are zero; no two-party race exists")]
    Degenerate,
}

#[derive(Debug, Error, PartialEq)]
pub enum PollError {
    #[error(transparent)]
    Share(#[from] ShareError),
    #[error("poll start date {start} is after end date {end}")]
    DateOrder { start: NaiveDate, end: NaiveDate },
    #[error("respondent count must be at least 1")]
    NoRespondents,
}

/// Slack for the sum-of-percentages upper bound, so 1-decimal inputs that add
/// up to exactly 100 never trip the check.
const SUM_EPSILON: f64 = 1e-6;

/// Raw (non-adjusted) percentages for the two major candidates. The remainder
/// up to 100 is third-party and undecided share.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RawShare {
    pct_c1: f64,
    pct_c2: f64,
}

impl RawShare {
    pub fn new(pct_c1: f64, pct_c2: f64) -> Result<Self, ShareError> {
        for pct in [pct_c1, pct_c2] {
            if !pct.is_finite() {
                return Err(ShareError::NonFinite);
            }
            if !(0.0..=100.0).contains(&pct) {
                return Err(ShareError::OutOfRange(pct));
            }
        }
        let sum = pct_c1 + pct_c2;
        if sum > 100.0 + SUM_EPSILON {
            return Err(ShareError::OverSum(sum));
        }
        if sum <= 0.0 {
            return Err(ShareError::Degenerate);
        }
        Ok(RawShare { pct_c1, pct_c2 })
    }

    pub fn pct_c1(&self) -> f64 {
        self.pct_c1
    }

    pub fn pct_c2(&self) -> f64 {
        self.pct_c2
    }
}

/// Adjusted two-party percentages: candidate shares after dropping everyone
/// but the two major candidates. `c1_percent() + c2_percent()` is exactly 100
/// up to the precision of the internal fraction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoPartyShare {
    frac_c1: f64,
}

impl TwoPartyShare {
    /// Builds a share from candidate 1's fraction of the two-party vote.
    pub fn from_fraction(frac_c1: f64) -> Result<Self, ShareError> {
        if !frac_c1.is_finite() {
            return Err(ShareError::NonFinite);
        }
        if !(0.0..=1.0).contains(&frac_c1) {
            return Err(ShareError::OutOfRange(frac_c1 * 100.0));
        }
        Ok(TwoPartyShare { frac_c1 })
    }

    pub fn c1_fraction(&self) -> f64 {
        self.frac_c1
    }

    pub fn c1_percent(&self) -> f64 {
        self.frac_c1 * 100.0
    }

    pub fn c2_percent(&self) -> f64 {
        (1.0 - self.frac_c1) * 100.0
    }

    /// The same share seen from candidate 2's side.
    pub fn swapped(&self) -> TwoPartyShare {
        TwoPartyShare {
            frac_c1: 1.0 - self.frac_c1,
        }
    }
}

/// Two-party adjustment: `adj_c1 = 100 * pct_c1 / (pct_c1 + pct_c2)`.
///
/// The degenerate both-zero input is unrepresentable (`RawShare::new`
/// rejects it), so adjustment itself cannot fail.
pub fn adjust_two_party(raw: &RawShare) -> TwoPartyShare {
    TwoPartyShare {
        frac_c1: raw.pct_c1 / (raw.pct_c1 + raw.pct_c2),
    }
}

/// One poll observation: a source, the field dates, the respondent count and
/// the raw percentages it reported.
#[derive(Debug, Clone, PartialEq)]
pub struct Poll {
    pub source: String,
    pub start_date: NaiveDate,
    pub end_date: NaiveDate,
    pub respondents: u32,
    pub raw: RawShare,
}

impl Poll {
    pub fn new(
        source: impl Into<String>,
        start_date: NaiveDate,
        end_date: NaiveDate,
        respondents: u32,
        raw: RawShare,
    ) -> Result<Self, PollError> {
        if start_date > end_date {
            return Err(PollError::DateOrder {
                start: start_date,
                end: end_date,
            });
        }
        if respondents == 0 {
            return Err(PollError::NoRespondents);
        }
        Ok(Poll {
            source: source.into(),
            start_date,
            end_date,
            respondents,
            raw,
        })
    }

    /// The calendar month a poll belongs to for aggregation. A poll is
    /// assigned to the month containing its end date: the end date is the
    /// latest opinion snapshot, and field periods often straddle a month
    /// boundary (e.g. a July 31 – August 2 poll counts as August).
    pub fn month(&self) -> Month {
        Month::of(self.end_date)
    }
}

/// A calendar month (year + month), the aggregation period for poll series.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Month {
    pub year: i32,
    pub month: u32,
}

impl Month {
    pub fn new(year: i32, month: u32) -> Option<Self> {
        (1..=12).contains(&month).then_some(Month { year, month })
    }

    pub fn of(date: NaiveDate) -> Self {
        Month {
            year: date.year(),
            month: date.month(),
        }
    }

    pub fn next(&self) -> Month {
        if self.month == 12 {
            Month {
                year: self.year + 1,
                month: 1,
            }
        } else {
            Month {
                year: self.year,
                month: self.month + 1,
            }
        }
    }
}

impl fmt::Display for Month {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:04}-{:02}", self.year, self.month)
    }
}

impl FromStr for Month {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (y, m) = s
            .split_once('-')
            .ok_or_else(|| format!("bad month `{s}`, expected YYYY-MM"))?;
        let year: i32 = y.parse().map_err(|_| format!("bad year in `{s}`"))?;
        let month: u32 = m.parse().map_err(|_| format!("bad month in `{s}`"))?;
        Month::new(year, month).ok_or_else(|| format!("month out of range in `{s}`"))
    }
}

/// All polls of one source in one month collapsed into a single poll.
#[derive(Debug, Clone, PartialEq)]
pub struct PeriodAggregate {
    pub period: Month,
    pub raw: RawShare,
    pub adjusted: TwoPartyShare,
    pub polls_included: usize,
}

/// Respondent-weighted aggregation of the polls that fall in `period`.
///
/// `raw.pct_c1 = Σ(pct_i * N_i) / Σ N_i` over the period's polls, i.e. the
/// total people supporting the candidate divided by the total people polled.
/// Returns `None` when the period has no polls, which callers render as a
/// blank row.
pub fn aggregate_period(polls: &[Poll], period: Month) -> Option<PeriodAggregate> {
    let in_period: Vec<&Poll> = polls.iter().filter(|p| p.month() == period).collect();
    match in_period.len() {
        0 => None,
        // A single poll passes through untouched; the weighted mean of one
        // element must be bit-exact.
        1 => Some(finish_aggregate(period, in_period[0].raw, 1)),
        n => {
            let mut weighted_c1 = 0.0;
            let mut weighted_c2 = 0.0;
            let mut total_respondents = 0u64;
            for poll in &in_period {
                let w = f64::from(poll.respondents);
                weighted_c1 += poll.raw.pct_c1() * w;
                weighted_c2 += poll.raw.pct_c2() * w;
                total_respondents += u64::from(poll.respondents);
            }
            let denom = total_respondents as f64;
            let raw = RawShare::new(weighted_c1 / denom, weighted_c2 / denom)
                .expect("convex combination of valid shares is valid");
            Some(finish_aggregate(period, raw, n))
        }
    }
}

fn finish_aggregate(period: Month, raw: RawShare, polls_included: usize) -> PeriodAggregate {
    PeriodAggregate {
        period,
        adjusted: adjust_two_party(&raw),
        raw,
        polls_included,
    }
}

/// Aggregates every month that has at least one poll, in ascending order.
pub fn aggregate_by_month(polls: &[Poll]) -> Vec<PeriodAggregate> {
    let mut months: Vec<Month> = polls.iter().map(Poll::month).collect();
    months.sort();
    months.dedup();
    months
        .into_iter()
        .filter_map(|m| aggregate_period(polls, m))
        .collect()
}

/// Actual outcome for one scope, with the two-party adjustment applied.
#[derive(Debug, Clone, PartialEq)]
pub struct ElectionResult {
    pub scope: Scope,
    pub raw: RawShare,
    pub adjusted: TwoPartyShare,
}

impl ElectionResult {
    /// The adjusted outcome is always recomputed from the raw percentages.
    pub fn new(scope: Scope, raw: RawShare) -> Self {
        ElectionResult {
            scope,
            adjusted: adjust_two_party(&raw),
            raw,
        }
    }
}

/// Signed deviation of a prediction from the actual adjusted outcome, in
/// percent-points of candidate 1's share. `+1.0` means the prediction gave
/// candidate 1 one point more than the final result; `-1.0` one point less.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Bias {
    pp: f64,
}

impl Bias {
    pub fn from_pp(pp: f64) -> Self {
        Bias { pp }
    }

    pub fn pp(&self) -> f64 {
        self.pp
    }

    pub fn abs(&self) -> f64 {
        self.pp.abs()
    }
}

impl fmt::Display for Bias {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:+.2}", round_pp(self.pp, 2))
    }
}

/// Bias of a prediction: `prediction.c1 - actual.c1` in adjusted points.
/// By construction the bias toward candidate 2 is the exact negation.
pub fn bias(prediction: &TwoPartyShare, actual: &TwoPartyShare) -> Bias {
    Bias {
        pp: (prediction.frac_c1 - actual.frac_c1) * 100.0,
    }
}

/// Unweighted mean of a bias series. `None` on an empty series; periods with
/// no data are excluded by the caller before this point.
pub fn average_bias(series: &[Bias]) -> Option<Bias> {
    if series.is_empty() {
        return None;
    }
    let sum: f64 = series.iter().map(Bias::pp).sum();
    Some(Bias {
        pp: sum / series.len() as f64,
    })
}

/// One point of a per-poll bias time series.
#[derive(Debug, Clone, PartialEq)]
pub struct PollBiasPoint {
    pub source: String,
    pub start_date: NaiveDate,
    pub end_date: NaiveDate,
    pub bias: Bias,
}

/// Per-poll bias series: adjustment plus bias applied to each poll on its
/// own, ordered chronologically by end date (ties keep input order).
pub fn poll_bias_series(polls: &[Poll], actual: &ElectionResult) -> Vec<PollBiasPoint> {
    let mut points: Vec<PollBiasPoint> = polls
        .iter()
        .map(|p| PollBiasPoint {
            source: p.source.clone(),
            start_date: p.start_date,
            end_date: p.end_date,
            bias: bias(&adjust_two_party(&p.raw), &actual.adjusted),
        })
        .collect();
    points.sort_by_key(|p| (p.end_date, p.start_date));
    points
}

/// Per-month bias series: monthly aggregation first, then bias per month.
/// Months without polls are absent; the report layer renders them as gaps.
pub fn monthly_bias_series(polls: &[Poll], actual: &ElectionResult) -> Vec<(Month, Bias)> {
    aggregate_by_month(polls)
        .into_iter()
        .map(|agg| (agg.period, bias(&agg.adjusted, &actual.adjusted)))
        .collect()
}

/// Groups polls by source, preserving each group's input order. Sources come
/// out in alphabetical order.
pub fn group_by_source(polls: &[Poll]) -> BTreeMap<String, Vec<Poll>> {
    let mut groups: BTreeMap<String, Vec<Poll>> = BTreeMap::new();
    for poll in polls {
        groups
            .entry(poll.source.clone())
            .or_default()
            .push(poll.clone());
    }
    groups
}

/// Display rounding: half away from zero at `decimals` places, the convention
/// used by published poll tables. Internal math never rounds.
pub fn round_pp(value: f64, decimals: u32) -> f64 {
    let scale = 10f64.powi(decimals as i32);
    (value * scale).round() / scale
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn date(y: i32, m: u32, d: u32) -> NaiveDate {
        NaiveDate::from_ymd_opt(y, m, d).unwrap()
    }

    fn poll(source: &str, end: NaiveDate, n: u32, c1: f64, c2: f64) -> Poll {
        Poll::new(source, end, end, n, RawShare::new(c1, c2).unwrap()).unwrap()
    }

    #[test]
    fn adjusts_final_yougov_poll() {
        // 41/45 raw -> 47.7/52.3 at one-decimal display rounding
        let adj = adjust_two_party(&RawShare::new(41.0, 45.0).unwrap());
        assert_eq!(round_pp(adj.c1_percent(), 1), 47.7);
        assert_eq!(round_pp(adj.c2_percent(), 1), 52.3);
    }

    #[test]
    fn adjustment_is_identity_on_even_split() {
        let adj = adjust_two_party(&RawShare::new(50.0, 50.0).unwrap());
        assert_eq!(adj.c1_percent(), 50.0);
        assert_eq!(adj.c2_percent(), 50.0);
    }

    #[test]
    fn adjusts_national_outcome() {
        // 46.3/48.2 raw -> 48.99/51.01 adjusted
        let adj = adjust_two_party(&RawShare::new(46.3, 48.2).unwrap());
        assert_eq!(round_pp(adj.c1_percent(), 2), 48.99);
        assert_eq!(round_pp(adj.c2_percent(), 2), 51.01);
    }

    #[test]
    fn rejects_degenerate_and_invalid_shares() {
        assert_eq!(RawShare::new(0.0, 0.0).unwrap_err(), ShareError::Degenerate);
        assert_eq!(
            RawShare::new(-1.0, 50.0).unwrap_err(),
            ShareError::OutOfRange(-1.0)
        );
        assert_eq!(RawShare::new(f64::NAN, 1.0).unwrap_err(), ShareError::NonFinite);
        assert!(matches!(
            RawShare::new(60.0, 45.0).unwrap_err(),
            ShareError::OverSum(_)
        ));
        // 1-decimal values summing to exactly 100 are fine
        assert!(RawShare::new(36.4, 63.6).is_ok());
    }

    #[test]
    fn aggregates_november_pair() {
        // Two November polls: N=1295 at 44/48 and N=1107 at 43/45
        // -> raw 43.5/46.6, adjusted 48.3/51.7 at display rounding
        let polls = vec![
            poll("Fox News", date(2016, 11, 6), 1295, 44.0, 48.0),
            poll("Fox News", date(2016, 11, 3), 1107, 43.0, 45.0),
        ];
        let agg = aggregate_period(&polls, Month::new(2016, 11).unwrap()).unwrap();
        assert_eq!(agg.polls_included, 2);
        assert_eq!(round_pp(agg.raw.pct_c1(), 1), 43.5);
        assert_eq!(round_pp(agg.raw.pct_c2(), 1), 46.6);
        assert_eq!(round_pp(agg.adjusted.c1_percent(), 1), 48.3);
        assert_eq!(round_pp(agg.adjusted.c2_percent(), 1), 51.7);
    }

    #[test]
    fn single_poll_aggregates_to_itself_exactly() {
        let polls = vec![poll("Fox News", date(2016, 5, 17), 1021, 45.0, 42.0)];
        let agg = aggregate_period(&polls, Month::new(2016, 5).unwrap()).unwrap();
        assert_eq!(agg.raw, polls[0].raw);
        assert_eq!(agg.polls_included, 1);
    }

    #[test]
    fn equal_weights_reduce_to_plain_mean() {
        let polls = vec![
            poll("A", date(2016, 9, 1), 500, 40.0, 50.0),
            poll("A", date(2016, 9, 20), 500, 42.0, 48.0),
        ];
        let agg = aggregate_period(&polls, Month::new(2016, 9).unwrap()).unwrap();
        assert!((agg.raw.pct_c1() - 41.0).abs() < 1e-12);
        assert!((agg.raw.pct_c2() - 49.0).abs() < 1e-12);
    }

    #[test]
    fn empty_period_is_a_gap() {
        let polls = vec![poll("Fox News", date(2016, 6, 28), 1017, 38.0, 44.0)];
        assert_eq!(aggregate_period(&polls, Month::new(2016, 7).unwrap()), None);
    }

    #[test]
    fn month_assignment_follows_end_date() {
        // A July 31 - August 2 field period counts as August.
        let p = Poll::new(
            "Fox News",
            date(2016, 7, 31),
            date(2016, 8, 2),
            1022,
            RawShare::new(39.0, 49.0).unwrap(),
        )
        .unwrap();
        assert_eq!(p.month(), Month::new(2016, 8).unwrap());
    }

    #[test]
    fn bias_of_november_aggregate() {
        // prediction 48.3 vs actual 48.99 -> -0.7 at display rounding
        let pred = TwoPartyShare::from_fraction(0.483).unwrap();
        let actual = adjust_two_party(&RawShare::new(46.3, 48.2).unwrap());
        assert_eq!(round_pp(bias(&pred, &actual).pp(), 1), -0.7);
    }

    #[test]
    fn bias_of_exact_prediction_is_zero() {
        let s = TwoPartyShare::from_fraction(0.4899).unwrap();
        assert_eq!(bias(&s, &s).pp(), 0.0);
    }

    #[test]
    fn bias_of_social_media_national_call() {
        // prediction 52.4 vs actual 48.99 -> +3.4
        let pred = TwoPartyShare::from_fraction(0.524).unwrap();
        let actual = TwoPartyShare::from_fraction(0.4899).unwrap();
        assert_eq!(round_pp(bias(&pred, &actual).pp(), 1), 3.4);
    }

    #[test]
    fn averages_monthly_bias_series() {
        let series: Vec<Bias> = [-1.3, -1.5, -0.4, -2.3, -1.3, -1.4, 0.1, -0.8, -0.4]
            .iter()
            .map(|&b| Bias::from_pp(b))
            .collect();
        let avg = average_bias(&series).unwrap();
        assert_eq!(round_pp(avg.pp(), 1), -1.0);
    }

    #[test]
    fn average_of_single_element_is_itself() {
        let avg = average_bias(&[Bias::from_pp(-2.25)]).unwrap();
        assert_eq!(avg.pp(), -2.25);
    }

    #[test]
    fn average_across_sources() {
        // Per-source averages for the eight national sources; their mean is
        // -1.94, displayed as roughly -2.
        let series: Vec<Bias> = [-1.0, -1.7, -3.3, -2.4, -1.5, -1.5, -1.3, -2.8]
            .iter()
            .map(|&b| Bias::from_pp(b))
            .collect();
        let avg = average_bias(&series).unwrap();
        assert_eq!(round_pp(avg.pp(), 1), -1.9);
        assert!((avg.pp() - (-1.9375)).abs() < 1e-12);
    }

    #[test]
    fn empty_series_has_no_average() {
        assert_eq!(average_bias(&[]), None);
    }

    #[test]
    fn per_poll_series_is_chronological() {
        let actual = ElectionResult::new(Scope::National, RawShare::new(46.3, 48.2).unwrap());
        let polls = vec![
            poll("Fox News", date(2016, 11, 6), 1295, 44.0, 48.0),
            poll("Fox News", date(2016, 5, 17), 1021, 45.0, 42.0),
            poll("Fox News", date(2016, 10, 25), 1221, 41.0, 44.0),
        ];
        let series = poll_bias_series(&polls, &actual);
        assert_eq!(series.len(), 3);
        assert!(series.windows(2).all(|w| w[0].end_date <= w[1].end_date));
        // The 44/48 November poll adjusts to 47.83, a -1.2 bias.
        assert_eq!(round_pp(series[2].bias.pp(), 1), -1.2);
    }

    #[test]
    fn empty_input_yields_empty_series() {
        let actual = ElectionResult::new(Scope::National, RawShare::new(46.3, 48.2).unwrap());
        assert!(poll_bias_series(&[], &actual).is_empty());
        assert!(monthly_bias_series(&[], &actual).is_empty());
    }

    #[test]
    fn display_rounding_is_half_away_from_zero() {
        assert_eq!(round_pp(0.25, 1), 0.3);
        assert_eq!(round_pp(-0.25, 1), -0.3);
        assert_eq!(round_pp(-1.9375, 1), -1.9);
        assert_eq!(round_pp(48.994708, 2), 48.99);
    }

    proptest! {
        #[test]
        fn adjusted_shares_sum_to_100(c1 in 0.01f64..99.0, c2 in 0.01f64..99.0) {
            prop_assume!(c1 + c2 <= 100.0);
            let adj = adjust_two_party(&RawShare::new(c1, c2).unwrap());
            prop_assert!((adj.c1_percent() + adj.c2_percent() - 100.0).abs() < 1e-9);
        }

        #[test]
        fn bias_is_antisymmetric(p in 0.0f64..=1.0, a in 0.0f64..=1.0) {
            let pred = TwoPartyShare::from_fraction(p).unwrap();
            let actual = TwoPartyShare::from_fraction(a).unwrap();
            let toward_c1 = bias(&pred, &actual).pp();
            let toward_c2 = bias(&pred.swapped(), &actual.swapped()).pp();
            prop_assert!((toward_c1 + toward_c2).abs() < 1e-9);
        }

        #[test]
        fn adjustment_is_scale_invariant(
            c1 in 0.1f64..45.0,
            c2 in 0.1f64..45.0,
            k in 0.05f64..1.1,
        ) {
            let base = adjust_two_party(&RawShare::new(c1, c2).unwrap());
            let scaled = adjust_two_party(&RawShare::new(k * c1, k * c2).unwrap());
            prop_assert!((base.c1_percent() - scaled.c1_percent()).abs() < 1e-9);
        }

        #[test]
        fn aggregate_stays_within_input_range(
            rows in prop::collection::vec((1u32..5000, 5.0f64..50.0, 5.0f64..50.0), 1..12),
        ) {
            let polls: Vec<Poll> = rows
                .iter()
                .map(|&(n, c1, c2)| poll("S", date(2016, 3, 15), n, c1, c2))
                .collect();
            let agg = aggregate_period(&polls, Month::new(2016, 3).unwrap()).unwrap();
            let min = polls.iter().map(|p| p.raw.pct_c1()).fold(f64::MAX, f64::min);
            let max = polls.iter().map(|p| p.raw.pct_c1()).fold(f64::MIN, f64::max);
            prop_assert!(agg.raw.pct_c1() >= min - 1e-9);
            prop_assert!(agg.raw.pct_c1() <= max + 1e-9);
        }

        #[test]
        fn equal_respondents_match_unweighted_mean(
            pcts in prop::collection::vec((5.0f64..50.0, 5.0f64..50.0), 2..10),
        ) {
            let polls: Vec<Poll> = pcts
                .iter()
                .map(|&(c1, c2)| poll("S", date(2016, 3, 15), 777, c1, c2))
                .collect();
            let agg = aggregate_period(&polls, Month::new(2016, 3).unwrap()).unwrap();
            let mean = pcts.iter().map(|p| p.0).sum::<f64>() / pcts.len() as f64;
            prop_assert!((agg.raw.pct_c1() - mean).abs() < 1e-9);
        }

        #[test]
        fn raising_one_poll_cannot_lower_the_aggregate(
            rows in prop::collection::vec((1u32..5000, 5.0f64..45.0, 5.0f64..45.0), 1..8),
            idx in 0usize..8,
            bump in 0.1f64..5.0,
        ) {
            let idx = idx % rows.len();
            let polls: Vec<Poll> = rows
                .iter()
                .map(|&(n, c1, c2)| poll("S", date(2016, 3, 15), n, c1, c2))
                .collect();
            let mut bumped = polls.clone();
            bumped[idx].raw = RawShare::new(rows[idx].1 + bump, rows[idx].2).unwrap();
            let before = aggregate_period(&polls, Month::new(2016, 3).unwrap()).unwrap();
            let after = aggregate_period(&bumped, Month::new(2016, 3).unwrap()).unwrap();
            prop_assert!(after.raw.pct_c1() >= before.raw.pct_c1() - 1e-9);
        }
    }
}
