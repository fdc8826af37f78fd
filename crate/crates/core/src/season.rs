//! Calendar months, sexes and the pseudoseason calendar.
//!
//! A pseudosummer runs May through October of its label year. A pseudowinter
//! runs November of its label year through April of the next, so
//! `Winter(1960)` is the 1960-61 winter. Together they tile the month axis.

use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sex {
    Female,
    Male,
}

impl Sex {
    pub const ALL: [Sex; 2] = [Sex::Female, Sex::Male];

    pub fn code(self) -> &'static str {
        match self {
            Sex::Female => "F",
            Sex::Male => "M",
        }
    }

    pub fn from_code(code: &str) -> Option<Self> {
        match code {
            "F" => Some(Sex::Female),
            "M" => Some(Sex::Male),
            _ => None,
        }
    }
}

impl fmt::Display for Sex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

impl Serialize for Sex {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.code())
    }
}

/// Gregorian leap-year rule.
pub fn is_leap_year(year: i32) -> bool {
    (year % 4 == 0 && year % 100 != 0) || year % 400 == 0
}

pub fn days_in_year(year: i32) -> u32 {
    if is_leap_year(year) {
        366
    } else {
        365
    }
}

/// Days in `month` (1-12) of `year`.
pub fn days_in_month(year: i32, month: u8) -> u32 {
    match month {
        1 | 3 | 5 | 7 | 8 | 10 | 12 => 31,
        4 | 6 | 9 | 11 => 30,
        2 if is_leap_year(year) => 29,
        2 => 28,
        _ => panic!("month {month} out of range"),
    }
}

/// A calendar month.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct YearMonth {
    pub year: i32,
    pub month: u8,
}

impl YearMonth {
    /// Returns `None` unless `month` is in `1..=12`.
    pub fn new(year: i32, month: u8) -> Option<Self> {
        (1..=12).contains(&month).then_some(Self { year, month })
    }

    pub fn next(self) -> Self {
        if self.month == 12 {
            Self { year: self.year + 1, month: 1 }
        } else {
            Self { year: self.year, month: self.month + 1 }
        }
    }

    pub fn days(self) -> u32 {
        days_in_month(self.year, self.month)
    }
}

impl fmt::Display for YearMonth {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:04}-{:02}", self.year, self.month)
    }
}

/// Ordered so that `Summer(Y) < Winter(Y) < Summer(Y + 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SeasonKind {
    Summer,
    Winter,
}

impl SeasonKind {
    pub fn name(self) -> &'static str {
        match self {
            SeasonKind::Summer => "summer",
            SeasonKind::Winter => "winter",
        }
    }

    pub fn other(self) -> Self {
        match self {
            SeasonKind::Summer => SeasonKind::Winter,
            SeasonKind::Winter => SeasonKind::Summer,
        }
    }
}

impl fmt::Display for SeasonKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl Serialize for SeasonKind {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.name())
    }
}

/// A six-month pseudoseason. Derived ordering is chronological.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Pseudoseason {
    pub label_year: i32,
    pub kind: SeasonKind,
}

impl Pseudoseason {
    pub fn summer(label_year: i32) -> Self {
        Self { label_year, kind: SeasonKind::Summer }
    }

    pub fn winter(label_year: i32) -> Self {
        Self { label_year, kind: SeasonKind::Winter }
    }

    pub fn first_month(self) -> YearMonth {
        match self.kind {
            SeasonKind::Summer => YearMonth { year: self.label_year, month: 5 },
            SeasonKind::Winter => YearMonth { year: self.label_year, month: 11 },
        }
    }

    pub fn last_month(self) -> YearMonth {
        match self.kind {
            SeasonKind::Summer => YearMonth { year: self.label_year, month: 10 },
            SeasonKind::Winter => YearMonth { year: self.label_year + 1, month: 4 },
        }
    }

    /// The six calendar months, in order.
    pub fn months(self) -> [YearMonth; 6] {
        let mut out = [self.first_month(); 6];
        for i in 1..6 {
            out[i] = out[i - 1].next();
        }
        out
    }

    pub fn next(self) -> Self {
        match self.kind {
            SeasonKind::Summer => Self::winter(self.label_year),
            SeasonKind::Winter => Self::summer(self.label_year + 1),
        }
    }

    pub fn previous(self) -> Self {
        match self.kind {
            SeasonKind::Summer => Self::winter(self.label_year - 1),
            SeasonKind::Winter => Self::summer(self.label_year),
        }
    }

    pub fn is_winter(self) -> bool {
        self.kind == SeasonKind::Winter
    }
}

impl fmt::Display for Pseudoseason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-{}", self.kind, self.label_year)
    }
}

impl Serialize for Pseudoseason {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
#[error("invalid season `{0}` (expected e.g. `summer-2010` or `winter-2009`)")]
pub struct ParseSeasonError(pub String);

impl FromStr for Pseudoseason {
    type Err = ParseSeasonError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || ParseSeasonError(s.to_string());
        let (kind, year) = s.split_once(['-', ':']).ok_or_else(err)?;
        let year: i32 = year.trim().parse().map_err(|_| err())?;
        match kind.trim().to_ascii_lowercase().as_str() {
            "summer" | "s" => Ok(Self::summer(year)),
            "winter" | "w" => Ok(Self::winter(year)),
            _ => Err(err()),
        }
    }
}

/// The unique pseudoseason containing a calendar month.
pub fn pseudoseason_of(ym: YearMonth) -> Pseudoseason {
    match ym.month {
        5..=10 => Pseudoseason::summer(ym.year),
        11 | 12 => Pseudoseason::winter(ym.year),
        _ => Pseudoseason::winter(ym.year - 1),
    }
}

/// Pseudoseasons touched by a month span, split by completeness.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SpanCoverage {
    /// Seasons whose six months all lie inside the span, chronological.
    pub complete: Vec<Pseudoseason>,
    /// Seasons only partly inside the span; their months are discarded.
    pub partial: Vec<Pseudoseason>,
}

impl SpanCoverage {
    pub fn count(&self, kind: SeasonKind) -> usize {
        self.complete.iter().filter(|s| s.kind == kind).count()
    }
}

/// Classify every pseudoseason overlapping `first..=last`.
pub fn complete_span(first: YearMonth, last: YearMonth) -> SpanCoverage {
    let mut coverage = SpanCoverage::default();
    if first > last {
        return coverage;
    }
    let end = pseudoseason_of(last);
    let mut season = pseudoseason_of(first);
    loop {
        if season.first_month() >= first && season.last_month() <= last {
            coverage.complete.push(season);
        } else {
            coverage.partial.push(season);
        }
        if season == end {
            break;
        }
        season = season.next();
    }
    coverage
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ym(year: i32, month: u8) -> YearMonth {
        YearMonth::new(year, month).unwrap()
    }

    #[test]
    fn season_of_examples() {
        assert_eq!(pseudoseason_of(ym(1960, 7)), Pseudoseason::summer(1960));
        assert_eq!(pseudoseason_of(ym(1961, 1)), Pseudoseason::winter(1960));
        assert_eq!(pseudoseason_of(ym(1960, 11)), Pseudoseason::winter(1960));
        assert_eq!(pseudoseason_of(ym(1960, 4)), Pseudoseason::winter(1959));
        assert_eq!(pseudoseason_of(ym(1960, 5)), Pseudoseason::summer(1960));
    }

    #[test]
    fn winter_months_cross_the_year() {
        let months = Pseudoseason::winter(1960).months();
        let expected = [ym(1960, 11), ym(1960, 12), ym(1961, 1), ym(1961, 2), ym(1961, 3), ym(1961, 4)];
        assert_eq!(months, expected);
        assert_eq!(Pseudoseason::summer(1960).months()[5], ym(1960, 10));
    }

    #[test]
    fn leap_rule() {
        assert!(is_leap_year(2000));
        assert!(!is_leap_year(1900));
        assert!(!is_leap_year(2100));
        assert!(is_leap_year(2012));
        assert!(!is_leap_year(1961));
        assert_eq!(days_in_month(2012, 2), 29);
        assert_eq!(days_in_month(1961, 2), 28);
        assert_eq!((1..=12).map(|m| days_in_month(2012, m)).sum::<u32>(), 366);
        assert_eq!((1..=12).map(|m| days_in_month(2013, m)).sum::<u32>(), 365);
    }

    #[test]
    fn month_out_of_range() {
        assert!(YearMonth::new(1960, 13).is_none());
        assert!(YearMonth::new(1960, 0).is_none());
    }

    #[test]
    fn span_single_summer() {
        let cov = complete_span(ym(1959, 5), ym(1959, 10));
        assert_eq!(cov.complete, vec![Pseudoseason::summer(1959)]);
        let cov = complete_span(ym(1959, 6), ym(1959, 10));
        assert!(cov.complete.is_empty());
        assert_eq!(cov.partial, vec![Pseudoseason::summer(1959)]);
    }

    #[test]
    fn span_1959_2014() {
        let cov = complete_span(ym(1959, 1), ym(2014, 12));
        assert_eq!(cov.complete.first(), Some(&Pseudoseason::summer(1959)));
        assert_eq!(cov.complete.last(), Some(&Pseudoseason::summer(2014)));
        assert_eq!(cov.count(SeasonKind::Summer), 56);
        // Nov 1959 - Apr 1960 lies inside the span, so winters run 1959..=2013.
        assert_eq!(cov.count(SeasonKind::Winter), 55);
        assert_eq!(cov.partial, vec![Pseudoseason::winter(1958), Pseudoseason::winter(2014)]);
    }

    #[test]
    fn parse_and_display() {
        let s: Pseudoseason = "winter-2009".parse().unwrap();
        assert_eq!(s, Pseudoseason::winter(2009));
        assert_eq!(s.to_string(), "winter-2009");
        assert_eq!("Summer:2010".parse::<Pseudoseason>().unwrap(), Pseudoseason::summer(2010));
        assert!("autumn-2010".parse::<Pseudoseason>().is_err());
        assert!("summer".parse::<Pseudoseason>().is_err());
    }

    #[test]
    fn chronological_order() {
        assert!(Pseudoseason::summer(1960) < Pseudoseason::winter(1960));
        assert!(Pseudoseason::winter(1960) < Pseudoseason::summer(1961));
        assert_eq!(Pseudoseason::winter(1960).previous(), Pseudoseason::summer(1960));
        assert_eq!(Pseudoseason::summer(1961).previous(), Pseudoseason::winter(1960));
    }

    proptest! {
        #[test]
        fn month_belongs_to_its_season(year in 1800i32..2200, month in 1u8..=12) {
            let m = ym(year, month);
            let s = pseudoseason_of(m);
            prop_assert!(s.months().contains(&m));
            prop_assert_eq!(pseudoseason_of(m), s);
        }

        #[test]
        fn complete_seasons_round_trip(y0 in 1900i32..2000, m0 in 1u8..=12, len in 0i32..240) {
            let first = ym(y0, m0);
            let mut last = first;
            for _ in 0..len {
                last = last.next();
            }
            let cov = complete_span(first, last);
            for s in &cov.complete {
                for m in s.months() {
                    prop_assert!(m >= first && m <= last);
                    prop_assert_eq!(pseudoseason_of(m), *s);
                }
            }
            // consecutive complete seasons tile without gap
            for w in cov.complete.windows(2) {
                prop_assert_eq!(w[0].next(), w[1]);
            }
        }

        #[test]
        fn may_start_counts(y0 in 1900i32..2000, n in 1i32..60) {
            // May of y0 through October of y0 + n - 1: n summers, n - 1 winters
            let cov = complete_span(ym(y0, 5), ym(y0 + n - 1, 10));
            prop_assert_eq!(cov.count(SeasonKind::Summer), n as usize);
            prop_assert_eq!(cov.count(SeasonKind::Winter), (n - 1) as usize);
        }
    }
}
