//! Period-of-fame detectors.
//!
//! * Spike: bin mentions into weeks on a fixed Monday grid, find the busiest
//!   week (earliest on ties) and grow the period in both directions while
//!   each adjacent week has at least a tenth of that week's count.
//! * Continuity: the longest stretch of mentions in which consecutive
//!   mentions are at most seven days apart, i.e. no mention-free seven-day
//!   window. Ties go to the earliest stretch.

use std::fmt;
use std::str::FromStr;

use chrono::{Datelike, Weekday};

use crate::error::{Error, Result};
use crate::time::{date_to_day, AnalysisWindow, Timestamp, SECS_PER_DAY};
use crate::timeline::Timeline;

/// Largest gap between consecutive mentions inside a continuity period.
pub const MAX_GAP_SECS: i64 = 7 * SECS_PER_DAY;

/// Spike periods extend over weeks with count >= max / SPIKE_FRACTION_DEN.
pub const SPIKE_FRACTION_DEN: u64 = 10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Method {
    Spike,
    Continuity,
}

impl Method {
    pub const ALL: [Method; 2] = [Method::Spike, Method::Continuity];

    pub fn as_str(self) -> &'static str {
        match self {
            Method::Spike => "spike",
            Method::Continuity => "continuity",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "spike" => Ok(Method::Spike),
            "continuity" => Ok(Method::Continuity),
            other => Err(Error::Config(format!("unknown method {other:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FamePeriod {
    pub name: String,
    pub method: Method,
    pub start: Timestamp,
    /// Spike: first instant after the last week. Continuity: last mention.
    pub end: Timestamp,
    pub peak_date: Timestamp,
    pub duration_days: f64,
}

/// Week bins `[origin + 7i, origin + 7(i+1))` in days.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct WeekGrid {
    origin_day: i64,
}

impl WeekGrid {
    /// `origin` is snapped back to the Monday on or before it.
    pub fn new(origin: chrono::NaiveDate) -> Self {
        let back = origin.weekday().num_days_from_monday() as i64;
        WeekGrid {
            origin_day: date_to_day(origin) - back,
        }
    }

    pub fn for_window(w: &AnalysisWindow) -> Self {
        Self::new(w.start.first_day())
    }

    pub fn origin(&self) -> Timestamp {
        Timestamp::from_day(self.origin_day)
    }

    pub fn week_of(&self, ts: Timestamp) -> i64 {
        (ts.day() - self.origin_day).div_euclid(7)
    }

    pub fn week_start(&self, week: i64) -> Timestamp {
        Timestamp::from_day(self.origin_day + 7 * week)
    }
}

impl Default for WeekGrid {
    /// Monday 1970-01-05.
    fn default() -> Self {
        let g = WeekGrid::new(chrono::NaiveDate::from_ymd_opt(1970, 1, 5).unwrap());
        debug_assert_eq!(g.origin().date().weekday(), Weekday::Mon);
        g
    }
}

/// # Panics
/// If the timeline is empty.
pub fn spike_period(t: &Timeline, grid: &WeekGrid) -> FamePeriod {
    assert!(!t.is_empty(), "spike_period on empty timeline {:?}", t.name);
    // events are sorted, so weeks come out sorted
    let mut weeks: Vec<(i64, u64)> = Vec::new();
    for (&ts, &n) in &t.events {
        let w = grid.week_of(ts);
        match weeks.last_mut() {
            Some((last, c)) if *last == w => *c += n,
            _ => weeks.push((w, n)),
        }
    }
    let mut peak = 0;
    for (i, &(_, c)) in weeks.iter().enumerate() {
        if c > weeks[peak].1 {
            peak = i;
        }
    }
    let max = weeks[peak].1;
    let qualifies = |c: u64| c * SPIKE_FRACTION_DEN >= max;
    let mut lo = peak;
    while lo > 0 && weeks[lo - 1].0 == weeks[lo].0 - 1 && qualifies(weeks[lo - 1].1) {
        lo -= 1;
    }
    let mut hi = peak;
    while hi + 1 < weeks.len() && weeks[hi + 1].0 == weeks[hi].0 + 1 && qualifies(weeks[hi + 1].1) {
        hi += 1;
    }
    let n_weeks = weeks[hi].0 - weeks[lo].0 + 1;
    FamePeriod {
        name: t.name.clone(),
        method: Method::Spike,
        start: grid.week_start(weeks[lo].0),
        end: grid.week_start(weeks[hi].0 + 1),
        peak_date: grid.week_start(weeks[peak].0),
        duration_days: (7 * n_weeks) as f64,
    }
}

/// # Panics
/// If the timeline is empty.
pub fn continuity_period(t: &Timeline) -> FamePeriod {
    assert!(
        !t.is_empty(),
        "continuity_period on empty timeline {:?}",
        t.name
    );
    let times: Vec<Timestamp> = t.events.keys().copied().collect();
    let (mut best_start, mut best_end) = (0, 0);
    let mut run_start = 0;
    for i in 1..=times.len() {
        let run_ends =
            i == times.len() || times[i].seconds() - times[i - 1].seconds() > MAX_GAP_SECS;
        if run_ends {
            let len = times[i - 1].seconds() - times[run_start].seconds();
            if len > times[best_end].seconds() - times[best_start].seconds() {
                best_start = run_start;
                best_end = i - 1;
            }
            run_start = i;
        }
    }
    continuity_from_bounds(&t.name, times[best_start], times[best_end])
}

/// Builds a continuity period from its first and last mention.
pub fn continuity_from_bounds(name: &str, start: Timestamp, end: Timestamp) -> FamePeriod {
    let duration_days = start.days_until(end);
    FamePeriod {
        name: name.to_string(),
        method: Method::Continuity,
        start,
        end,
        peak_date: start.add_days((duration_days / 2.0).floor() as i64),
        duration_days,
    }
}

pub fn detect(t: &Timeline, method: Method, grid: &WeekGrid) -> FamePeriod {
    match method {
        Method::Spike => spike_period(t, grid),
        Method::Continuity => continuity_period(t),
    }
}

/// Keeps periods lasting at least `min_duration` days that end before the
/// window does (later ones may be cut off by the end of the corpus).
pub fn period_filter(
    periods: Vec<FamePeriod>,
    w: &AnalysisWindow,
    min_duration: f64,
) -> Vec<FamePeriod> {
    let end = w.end_ts();
    periods
        .into_iter()
        .filter(|p| p.duration_days >= min_duration && p.end < end)
        .collect()
}

/// Whole days print as integers, fractional ones with three decimals.
pub fn format_days(d: f64) -> String {
    if d.fract() == 0.0 {
        format!("{d:.0}")
    } else {
        format!("{d:.3}")
    }
}

pub const PERIODS_CSV_HEADER: &str = "name,method,start,end,peak_date,duration_days";

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub fn periods_csv(periods: &[FamePeriod]) -> String {
    let mut out = String::with_capacity(64 * periods.len() + 64);
    out.push_str(PERIODS_CSV_HEADER);
    out.push('\n');
    for p in periods {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            csv_field(&p.name),
            p.method,
            p.start,
            p.end,
            p.peak_date,
            format_days(p.duration_days)
        ));
    }
    out
}

/// Splits one CSV record honoring double-quoted fields.
fn split_csv(line: &str) -> Vec<String> {
    let mut fields = Vec::new();
    let mut cur = String::new();
    let mut quoted = false;
    let mut chars = line.chars().peekable();
    while let Some(c) = chars.next() {
        match (c, quoted) {
            ('"', true) if chars.peek() == Some(&'"') => {
                cur.push('"');
                chars.next();
            }
            ('"', true) => quoted = false,
            ('"', false) if cur.is_empty() => quoted = true,
            (',', false) => fields.push(std::mem::take(&mut cur)),
            _ => cur.push(c),
        }
    }
    fields.push(cur);
    fields
}

pub fn parse_periods_csv(text: &str) -> Result<Vec<FamePeriod>> {
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h.trim_end() == PERIODS_CSV_HEADER => {}
        other => {
            return Err(Error::Data(format!(
                "periods CSV header mismatch: {other:?}"
            )))
        }
    }
    let mut out = Vec::new();
    for (i, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let bad = |what: &str| Error::Data(format!("periods CSV line {}: {what}", i + 2));
        let f = split_csv(line);
        if f.len() != 6 {
            return Err(bad("expected 6 fields"));
        }
        out.push(FamePeriod {
            name: f[0].clone(),
            method: f[1].parse().map_err(|_| bad("method"))?,
            start: Timestamp::parse(&f[2])?,
            end: Timestamp::parse(&f[3])?,
            peak_date: Timestamp::parse(&f[4])?,
            duration_days: f[5].parse().map_err(|_| bad("duration"))?,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use chrono::NaiveDate;
    use proptest::prelude::*;

    fn grid() -> WeekGrid {
        WeekGrid::new(NaiveDate::from_ymd_opt(1900, 1, 1).unwrap()) // a Monday
    }

    fn weekly(counts: &[u64]) -> Timeline {
        let g = grid();
        Timeline::from_events(
            "w",
            counts
                .iter()
                .enumerate()
                .map(|(i, &c)| (g.week_start(i as i64).add_days(2), c)),
        )
    }

    fn days(ds: &[i64]) -> Timeline {
        let base = grid().origin();
        Timeline::from_events("d", ds.iter().map(|&d| (base.add_days(d), 1)))
    }

    #[test]
    fn grid_snaps_to_monday() {
        let g = WeekGrid::new(NaiveDate::from_ymd_opt(1895, 1, 1).unwrap()); // Tuesday
        assert_eq!(g.origin().to_string(), "1894-12-31");
        assert_eq!(g.week_of(g.origin().add_days(-1)), -1);
    }

    #[test]
    fn spike_tenth_rule() {
        let p = spike_period(&weekly(&[10, 2, 1, 0]), &grid());
        assert_eq!(p.duration_days, 21.0);
        assert_eq!(p.start, grid().week_start(0));
        assert_eq!(p.end, grid().week_start(3));
    }

    #[test]
    fn spike_single_mention() {
        let p = spike_period(&days(&[3]), &grid());
        assert_eq!(p.duration_days, 7.0);
        assert_eq!(p.peak_date, grid().week_start(0));
    }

    #[test]
    fn spike_earliest_max_week() {
        let p = spike_period(&weekly(&[3, 5, 5]), &grid());
        assert_eq!(p.peak_date, grid().week_start(1));
        assert_eq!(p.duration_days, 21.0);
    }

    #[test]
    fn spike_needs_contiguous_weeks() {
        // week 2 is empty, so week 3 is not reachable
        let p = spike_period(&weekly(&[0, 10, 0, 9]), &grid());
        assert_eq!(p.duration_days, 7.0);
        assert_eq!(p.peak_date, grid().week_start(1));
    }

    #[test]
    fn continuity_gap_rule() {
        let p = continuity_period(&days(&[0, 5, 11, 30]));
        assert_eq!(p.duration_days, 11.0);
        assert_eq!(p.peak_date, grid().origin().add_days(5));
        assert_eq!(p.end, grid().origin().add_days(11));
    }

    #[test]
    fn continuity_monday_to_wednesday() {
        let p = continuity_period(&days(&[0, 2]));
        assert_eq!(p.start.date().weekday(), Weekday::Mon);
        assert_eq!(p.end.date().weekday(), Weekday::Wed);
        assert_eq!(p.duration_days, 2.0);
    }

    #[test]
    fn continuity_gap_of_eight_splits() {
        let p = continuity_period(&days(&[0, 8]));
        assert_eq!(p.duration_days, 0.0);
        assert_eq!(p.start, grid().origin());
        let p = continuity_period(&days(&[0, 7]));
        assert_eq!(p.duration_days, 7.0);
    }

    #[test]
    fn continuity_sub_day() {
        let base = grid().origin();
        let t = Timeline::from_events(
            "s",
            [
                (Timestamp::from_seconds(base.seconds() + 6 * 3600), 1),
                (
                    Timestamp::from_seconds(base.seconds() + 2 * SECS_PER_DAY + 18 * 3600),
                    1,
                ),
            ],
        );
        let p = continuity_period(&t);
        assert_eq!(p.duration_days, 2.5);
        assert_eq!(format_days(p.duration_days), "2.500");
        assert_eq!(p.peak_date, p.start.add_days(1));
    }

    #[test]
    fn filter_rules() {
        let w = AnalysisWindow::parse("1900-01..1901-01").unwrap();
        let mk = |start: &str, dur: i64| {
            let s = Timestamp::parse(start).unwrap();
            continuity_from_bounds("x", s, s.add_days(dur))
        };
        let at_end = mk("1900-12-01", 31);
        assert_eq!(at_end.end, w.end_ts());
        let kept = period_filter(
            vec![at_end, mk("1900-03-01", 1), mk("1900-03-01", 2)],
            &w,
            2.0,
        );
        assert_eq!(kept.len(), 1);
        assert_eq!(kept[0].duration_days, 2.0);
    }

    #[test]
    fn csv_round_trip_with_awkward_names() {
        let s = Timestamp::parse("1912-03-23").unwrap();
        let mut a = continuity_from_bounds("Astor, John \"Jack\"", s, s.add_days(161));
        a.name = "Astor, John \"Jack\"".into();
        let b = spike_period(&weekly(&[4, 40, 8]), &grid());
        let text = periods_csv(&[a.clone(), b.clone()]);
        assert_eq!(parse_periods_csv(&text).unwrap(), vec![a, b]);
        assert!(parse_periods_csv("bogus\n").is_err());
    }

    proptest! {
        #[test]
        fn translation_equivariance(ds in prop::collection::btree_set(0i64..400, 1..40), k in -300i64..300) {
            let ds: Vec<i64> = ds.into_iter().collect();
            let shifted: Vec<i64> = ds.iter().map(|d| d + k).collect();
            let a = continuity_period(&days(&ds));
            let b = continuity_period(&days(&shifted));
            prop_assert_eq!(b.start, a.start.add_days(k));
            prop_assert_eq!(b.end, a.end.add_days(k));
            prop_assert_eq!(b.peak_date, a.peak_date.add_days(k));
            prop_assert_eq!(b.duration_days, a.duration_days);

            let k7 = 7 * (k / 7);
            let shifted7: Vec<i64> = ds.iter().map(|d| d + k7).collect();
            let a = spike_period(&days(&ds), &grid());
            let b = spike_period(&days(&shifted7), &grid());
            prop_assert_eq!(b.start, a.start.add_days(k7));
            prop_assert_eq!(b.peak_date, a.peak_date.add_days(k7));
            prop_assert_eq!(b.duration_days, a.duration_days);
        }

        #[test]
        fn adding_inside_run_never_shrinks(ds in prop::collection::btree_set(0i64..200, 2..30), pick in 0usize..1000) {
            let ds: Vec<i64> = ds.into_iter().collect();
            let before = continuity_period(&days(&ds));
            let (s, e) = (before.start.day() - grid().origin().day(), before.end.day() - grid().origin().day());
            let extra = s + (pick as i64 % (e - s + 1));
            let mut more = ds.clone();
            more.push(extra);
            let after = continuity_period(&days(&more));
            prop_assert!(after.duration_days >= before.duration_days);
        }

        #[test]
        fn spike_contains_global_max(cs in prop::collection::vec(0u64..30, 1..30)) {
            prop_assume!(cs.iter().any(|&c| c > 0));
            let p = spike_period(&weekly(&cs), &grid());
            let g = grid();
            let max = *cs.iter().max().unwrap();
            let (lo, hi) = (g.week_of(p.start), g.week_of(p.end) - 1);
            prop_assert!((lo..=hi).any(|w| cs[w as usize] == max));
            prop_assert_eq!(p.duration_days as i64 % 7, 0);
            prop_assert!(p.start <= p.peak_date && p.peak_date <= p.end);
        }
    }
}
