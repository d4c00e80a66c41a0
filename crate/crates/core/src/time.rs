//! Timestamps, calendar months and analysis windows.

use std::fmt;
use std::str::FromStr;

use chrono::{DateTime, Datelike, NaiveDate, NaiveDateTime, Timelike};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const SECS_PER_DAY: i64 = 86_400;

/// `NaiveDate::num_days_from_ce` of 1970-01-01.
const EPOCH_DAYS_FROM_CE: i64 = 719_163;

/// A UTC instant with one-second resolution.
///
/// Date-only inputs are stored as midnight, so a timestamp at exactly 00:00:00
/// prints as a plain date. Ordering and equality are by instant.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Timestamp(i64);

impl Timestamp {
    pub fn from_seconds(secs: i64) -> Self {
        Timestamp(secs)
    }

    pub fn from_day(day: i64) -> Self {
        Timestamp(day * SECS_PER_DAY)
    }

    pub fn from_date(date: NaiveDate) -> Self {
        Self::from_day(date.num_days_from_ce() as i64 - EPOCH_DAYS_FROM_CE)
    }

    pub fn from_datetime(dt: NaiveDateTime) -> Self {
        Timestamp(dt.and_utc().timestamp())
    }

    /// Seconds since 1970-01-01T00:00:00Z.
    pub fn seconds(self) -> i64 {
        self.0
    }

    /// Whole days since 1970-01-01, rounding toward the past.
    pub fn day(self) -> i64 {
        self.0.div_euclid(SECS_PER_DAY)
    }

    pub fn is_day_aligned(self) -> bool {
        self.0.rem_euclid(SECS_PER_DAY) == 0
    }

    pub fn date(self) -> NaiveDate {
        day_to_date(self.day())
    }

    pub fn month(self) -> Month {
        Month::of(self.date())
    }

    pub fn year(self) -> i32 {
        self.date().year()
    }

    pub fn add_days(self, days: i64) -> Self {
        Timestamp(self.0 + days * SECS_PER_DAY)
    }

    /// `other - self` in (possibly fractional) days.
    pub fn days_until(self, other: Timestamp) -> f64 {
        (other.0 - self.0) as f64 / SECS_PER_DAY as f64
    }

    /// Parses `YYYY-MM-DD`, RFC 3339, or a naive `YYYY-MM-DDTHH:MM:SS[.f]`
    /// (read as UTC). Sub-second digits are truncated.
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        let ts = if let Ok(d) = NaiveDate::parse_from_str(s, "%Y-%m-%d") {
            Self::from_date(d)
        } else if let Ok(dt) = DateTime::parse_from_rfc3339(s) {
            Timestamp(dt.timestamp())
        } else if let Ok(dt) = NaiveDateTime::parse_from_str(s, "%Y-%m-%dT%H:%M:%S%.f") {
            Self::from_datetime(dt)
        } else if let Ok(dt) = NaiveDateTime::parse_from_str(s, "%Y-%m-%d %H:%M:%S%.f") {
            Self::from_datetime(dt)
        } else {
            return Err(Error::Data(format!("unparseable timestamp {s:?}")));
        };
        let year = ts.year();
        if !(1..=9999).contains(&year) {
            return Err(Error::Data(format!(
                "timestamp {s:?} outside years 1..9999"
            )));
        }
        Ok(ts)
    }
}

impl fmt::Display for Timestamp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let date = self.date();
        if self.is_day_aligned() {
            write!(f, "{}", date.format("%Y-%m-%d"))
        } else {
            let secs = self.0.rem_euclid(SECS_PER_DAY) as u32;
            let time = chrono::NaiveTime::from_num_seconds_from_midnight_opt(secs, 0)
                .expect("seconds within a day");
            write!(
                f,
                "{}T{:02}:{:02}:{:02}Z",
                date.format("%Y-%m-%d"),
                time.hour(),
                time.minute(),
                time.second()
            )
        }
    }
}

impl FromStr for Timestamp {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Timestamp::parse(s)
    }
}

pub fn day_to_date(day: i64) -> NaiveDate {
    NaiveDate::from_num_days_from_ce_opt((day + EPOCH_DAYS_FROM_CE) as i32)
        .expect("day number within chrono's range")
}

pub fn date_to_day(date: NaiveDate) -> i64 {
    date.num_days_from_ce() as i64 - EPOCH_DAYS_FROM_CE
}

/// A calendar month.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Month {
    pub year: i32,
    /// 1..=12
    pub month: u32,
}

impl Month {
    pub fn new(year: i32, month: u32) -> Result<Self> {
        if !(1..=12).contains(&month) {
            return Err(Error::Config(format!("month {month} out of range")));
        }
        Ok(Month { year, month })
    }

    pub fn of(date: NaiveDate) -> Self {
        Month {
            year: date.year(),
            month: date.month(),
        }
    }

    /// Months since year 0, January.
    pub fn index(self) -> i64 {
        self.year as i64 * 12 + (self.month as i64 - 1)
    }

    pub fn from_index(index: i64) -> Self {
        Month {
            year: index.div_euclid(12) as i32,
            month: index.rem_euclid(12) as u32 + 1,
        }
    }

    pub fn first_day(self) -> NaiveDate {
        NaiveDate::from_ymd_opt(self.year, self.month, 1).expect("valid month")
    }

    pub fn next(self) -> Self {
        Self::from_index(self.index() + 1)
    }

    pub fn days(self) -> u32 {
        (date_to_day(self.next().first_day()) - date_to_day(self.first_day())) as u32
    }
}

impl fmt::Display for Month {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:04}-{:02}", self.year, self.month)
    }
}

impl FromStr for Month {
    type Err = Error;

    /// Accepts `YYYY-MM` or `YYYY-MM-01`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let full = if s.len() == 7 {
            format!("{s}-01")
        } else {
            s.to_string()
        };
        let date = NaiveDate::parse_from_str(&full, "%Y-%m-%d")
            .map_err(|_| Error::Config(format!("invalid month {s:?}")))?;
        if date.day() != 1 {
            return Err(Error::Config(format!("{s:?} is not a month boundary")));
        }
        Ok(Month::of(date))
    }
}

/// Half-open `[start, end)` range of whole months.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnalysisWindow {
    pub start: Month,
    pub end: Month,
}

impl AnalysisWindow {
    pub fn new(start: Month, end: Month) -> Result<Self> {
        if start >= end {
            return Err(Error::Config(format!(
                "window start {start} must precede end {end}"
            )));
        }
        Ok(AnalysisWindow { start, end })
    }

    /// Parses `START..END` with each side `YYYY-MM`.
    pub fn parse(s: &str) -> Result<Self> {
        let (a, b) = s.split_once("..").ok_or_else(|| {
            Error::Config(format!("window {s:?} must look like 1895-01..2011-01"))
        })?;
        Self::new(a.parse()?, b.parse()?)
    }

    pub fn start_ts(&self) -> Timestamp {
        Timestamp::from_date(self.start.first_day())
    }

    pub fn end_ts(&self) -> Timestamp {
        Timestamp::from_date(self.end.first_day())
    }

    pub fn contains(&self, ts: Timestamp) -> bool {
        self.start_ts() <= ts && ts < self.end_ts()
    }
}

impl FromStr for AnalysisWindow {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::parse(s)
    }
}

impl fmt::Display for AnalysisWindow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}..{}", self.start, self.end)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn date_round_trip() {
        let ts = Timestamp::parse("1912-04-15").unwrap();
        assert!(ts.is_day_aligned());
        assert_eq!(ts.to_string(), "1912-04-15");
        assert_eq!(Timestamp::from_day(0).to_string(), "1970-01-01");
    }

    #[test]
    fn datetime_forms() {
        let a = Timestamp::parse("2009-07-01T12:30:05Z").unwrap();
        let b = Timestamp::parse("2009-07-01T14:30:05+02:00").unwrap();
        let c = Timestamp::parse("2009-07-01 12:30:05.917").unwrap();
        assert_eq!(a, b);
        assert_eq!(a, c);
        assert_eq!(a.to_string(), "2009-07-01T12:30:05Z");
        assert_eq!(a.date(), NaiveDate::from_ymd_opt(2009, 7, 1).unwrap());
    }

    #[test]
    fn rejects_bad_dates() {
        assert!(Timestamp::parse("1912-13-40").is_err());
        assert!(Timestamp::parse("0000-01-01").is_err());
        assert!(Timestamp::parse("yesterday").is_err());
    }

    #[test]
    fn negative_days_floor() {
        let ts = Timestamp::parse("1969-12-31T23:00:00Z").unwrap();
        assert_eq!(ts.day(), -1);
        assert_eq!(ts.date().to_string(), "1969-12-31");
    }

    #[test]
    fn window_bounds() {
        let w = AnalysisWindow::parse("1895-01..2011-01").unwrap();
        assert!(!w.contains(Timestamp::parse("1894-12-31").unwrap()));
        assert!(w.contains(Timestamp::parse("1895-01-01").unwrap()));
        assert!(!w.contains(Timestamp::parse("2011-01-01").unwrap()));
        assert!(AnalysisWindow::parse("2011-01..1895-01").is_err());
        assert!(AnalysisWindow::parse("1895-01-15..2011-01").is_err());
    }

    #[test]
    fn month_arithmetic() {
        let m: Month = "1900-02".parse().unwrap();
        assert_eq!(m.days(), 28);
        assert_eq!(Month::from_index(m.index()), m);
        assert_eq!(
            "1999-12".parse::<Month>().unwrap().next().to_string(),
            "2000-01"
        );
    }
}
