//! Report artifacts: quantile series, cumulative curves, tail fits and the
//! summary table, all computed from a list of fame periods.
//!
//! Every number here is a function of the periods alone, so re-running
//! [`summarize`] on a persisted periods CSV reproduces the tables exactly.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::peaks::{format_days, FamePeriod, Method, WeekGrid};
use crate::seeding;
use crate::stats::{
    self, assign_cohorts, bootstrap_many, BootstrapConfig, BootstrapInterval, Cohort, CohortWidth,
    PowerLawFit, Statistic,
};
use crate::time::Timestamp;
use crate::timeline::{Ratio, Timeline};

/// Which names a result row is restricted to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NameFilter {
    /// Every name passing the basic mention-count filter.
    All,
    /// Union of each year's `k` most-mentioned names.
    TopK(usize),
    /// Union of each year's top `ceil(n_y * frac)` names.
    TopFrac(Ratio),
}

impl NameFilter {
    pub const DEFAULTS: [NameFilter; 3] = [
        NameFilter::All,
        NameFilter::TopK(1000),
        NameFilter::TopFrac(Ratio::PER_MILLE),
    ];

    /// File-system friendly label.
    pub fn slug(&self) -> String {
        self.to_string().replace('%', "pct")
    }
}

impl fmt::Display for NameFilter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NameFilter::All => f.write_str("all"),
            NameFilter::TopK(k) => write!(f, "top-{k}"),
            NameFilter::TopFrac(r) => {
                let pct = 100.0 * r.num as f64 / r.den as f64;
                write!(f, "top-{pct}%")
            }
        }
    }
}

impl FromStr for NameFilter {
    type Err = Error;

    /// `all`, `top-<k>`, or `top-<percent>%`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Config(format!("unknown name filter {s:?}"));
        if s == "all" {
            return Ok(NameFilter::All);
        }
        let rest = s.strip_prefix("top-").ok_or_else(bad)?;
        if let Some(pct) = rest.strip_suffix('%').or_else(|| rest.strip_suffix("pct")) {
            // exact decimal percent → ratio over a power of ten
            let (int, frac) = pct.split_once('.').unwrap_or((pct, ""));
            let digits = format!("{int}{frac}");
            let num: u64 = digits.parse().map_err(|_| bad())?;
            let den = 100 * 10u64.pow(frac.len() as u32);
            if num == 0 || num > den {
                return Err(bad());
            }
            Ratio::new(num, den).map(NameFilter::TopFrac)
        } else {
            let k: usize = rest.parse().map_err(|_| bad())?;
            if k == 0 {
                return Err(bad());
            }
            Ok(NameFilter::TopK(k))
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StatsConfig {
    pub tail_quantile: f64,
    pub bootstrap: BootstrapConfig,
    /// Widths of the plain quantile series.
    pub series_widths: [CohortWidth; 2],
    /// Width of the bootstrapped series, cumulative curves, fits and summary.
    pub summary_width: CohortWidth,
}

impl Default for StatsConfig {
    fn default() -> Self {
        StatsConfig {
            tail_quantile: stats::DEFAULT_TAIL_QUANTILE,
            bootstrap: BootstrapConfig::default(),
            series_widths: [CohortWidth::QUARTER, CohortWidth::FIVE_YEARS],
            summary_width: CohortWidth::FIVE_YEARS,
        }
    }
}

/// A statistic with an optional bootstrap interval.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Estimate {
    pub point: f64,
    pub interval: Option<BootstrapInterval>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CohortStats {
    pub cohort: Cohort,
    pub p50: Estimate,
    pub p90: Estimate,
    pub p99: Estimate,
    pub fit: Option<PowerLawFit>,
    pub alpha: Option<Estimate>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SummaryRow {
    pub method: String,
    pub filtering: String,
    pub period: String,
    pub p50: String,
    pub p90: String,
    pub p99: String,
    pub alpha: String,
}

pub const SUMMARY_COLUMNS: [&str; 7] = [
    "method",
    "filtering",
    "period",
    "p50",
    "p90",
    "p99",
    "alpha",
];

impl SummaryRow {
    fn cells(&self) -> [&str; 7] {
        [
            &self.method,
            &self.filtering,
            &self.period,
            &self.p50,
            &self.p90,
            &self.p99,
            &self.alpha,
        ]
    }
}

/// All report artifacts for one (method, filter) pair.
#[derive(Clone, Debug, PartialEq)]
pub struct FilterReport {
    pub method: Method,
    pub filter: NameFilter,
    pub series: Vec<(CohortWidth, String)>,
    pub bootstrapped_series: String,
    pub cumulative: Vec<(String, String)>,
    pub fits_json: String,
    pub rows: Vec<SummaryRow>,
    pub cohorts: Vec<CohortStats>,
}

fn format_alpha(a: f64) -> String {
    format!("{a:.2}")
}

fn estimate_cell(e: &Estimate, fmt: impl Fn(f64) -> String + Copy) -> String {
    match &e.interval {
        Some(b) => b.display_with(fmt),
        None => format!("{} (n/a)", fmt(e.point)),
    }
}

fn stats_for(cohort: Cohort, cfg: &StatsConfig, seed: u64) -> Result<CohortStats> {
    let fit = stats::fit_power_law(&cohort.durations, cfg.tail_quantile).ok();
    let statistics = [
        Statistic::Quantile(0.5),
        Statistic::Quantile(0.9),
        Statistic::Quantile(0.99),
        Statistic::PowerLawAlpha {
            tail_quantile: cfg.tail_quantile,
        },
    ];
    let boot = BootstrapConfig {
        seed,
        ..cfg.bootstrap
    };
    let mut results = bootstrap_many(&cohort.durations, &statistics, boot)?.into_iter();
    let mut quantile = |q: f64| -> Result<Estimate> {
        let b = results.next().expect("one result per statistic")?;
        debug_assert_eq!(b.point, stats::quantile(&cohort.durations, q).unwrap());
        Ok(Estimate {
            point: b.point,
            interval: Some(b),
        })
    };
    let (p50, p90, p99) = (quantile(0.5)?, quantile(0.9)?, quantile(0.99)?);
    let alpha = match (fit, results.next().expect("alpha result")) {
        (Some(f), Ok(b)) => Some(Estimate {
            point: f.alpha,
            interval: Some(b),
        }),
        (Some(f), Err(_)) => Some(Estimate {
            point: f.alpha,
            interval: None,
        }),
        (None, _) => None,
    };
    Ok(CohortStats {
        cohort,
        p50,
        p90,
        p99,
        fit,
        alpha,
    })
}

fn plain_series(cohorts: &[Cohort]) -> Result<String> {
    let mut s = String::from("bucket_start,width,n,p50,p90,p99\n");
    for c in cohorts {
        let sorted = stats::sorted(&c.durations);
        let q = |p| stats::quantile_sorted(&sorted, p).map(format_days);
        writeln!(
            s,
            "{},{},{},{},{},{}",
            c.bucket_start.first_day(),
            c.width,
            c.durations.len(),
            q(0.5)?,
            q(0.9)?,
            q(0.99)?
        )
        .unwrap();
    }
    Ok(s)
}

fn bootstrapped_series(cs: &[CohortStats]) -> String {
    let mut s = String::from(
        "bucket_start,width,n,p50,p90,p99,p50_lo,p50_hi,p90_lo,p90_hi,p99_lo,p99_hi\n",
    );
    for c in cs {
        let iv = |e: &Estimate| {
            let b = e.interval.expect("quantile intervals always exist");
            format!("{},{}", format_days(b.lo), format_days(b.hi))
        };
        writeln!(
            s,
            "{},{},{},{},{},{},{},{},{}",
            c.cohort.bucket_start.first_day(),
            c.cohort.width,
            c.cohort.durations.len(),
            format_days(c.p50.point),
            format_days(c.p90.point),
            format_days(c.p99.point),
            iv(&c.p50),
            iv(&c.p90),
            iv(&c.p99)
        )
        .unwrap();
    }
    s
}

/// `# reference_slope=...` header, then `x,y` rows.
pub fn cumulative_csv(durations: &[f64], fit: Option<&PowerLawFit>) -> String {
    let mut s = match fit {
        Some(f) => format!("# reference_slope={:.6}\n", f.reference_slope()),
        None => String::from("# reference_slope=n/a\n"),
    };
    s.push_str("x,y\n");
    for (x, y) in stats::cumulative_curve(durations) {
        writeln!(s, "{},{}", format_days(x), y).unwrap();
    }
    s
}

#[derive(Serialize)]
struct FitRecord {
    alpha: f64,
    d_min: f64,
    n_tail: usize,
    lo: Option<f64>,
    hi: Option<f64>,
    reps: usize,
    seed: u64,
}

fn fits_json(cs: &[CohortStats], reps: usize) -> String {
    let map: BTreeMap<String, FitRecord> = cs
        .iter()
        .filter_map(|c| {
            let fit = c.fit?;
            let iv = c.alpha.and_then(|a| a.interval);
            Some((
                c.cohort.label(),
                FitRecord {
                    alpha: fit.alpha,
                    d_min: fit.d_min,
                    n_tail: fit.n_tail,
                    lo: iv.map(|b| b.lo),
                    hi: iv.map(|b| b.hi),
                    reps,
                    seed: iv.map(|b| b.seed).unwrap_or_default(),
                },
            ))
        })
        .collect();
    let mut s = serde_json::to_string_pretty(&map).expect("fits serialize");
    s.push('\n');
    s
}

/// Bootstrap seed for one cohort of one (method, filter) pair.
pub fn cohort_seed(seed: u64, method: Method, filter: NameFilter, label: &str) -> u64 {
    seeding::derive(
        seed,
        &["bootstrap", method.as_str(), &filter.to_string(), label],
    )
}

/// Computes every report artifact for one (method, filter) pair.
pub fn summarize(
    periods: &[FamePeriod],
    method: Method,
    filter: NameFilter,
    cfg: &StatsConfig,
    seed: u64,
) -> Result<FilterReport> {
    if periods.is_empty() {
        return Err(Error::EmptyCohort(format!(
            "no fame periods for method {method}, filter {filter}"
        )));
    }
    let series = cfg
        .series_widths
        .iter()
        .map(|&w| Ok((w, plain_series(&assign_cohorts(periods, w))?)))
        .collect::<Result<Vec<_>>>()?;

    let cohorts = assign_cohorts(periods, cfg.summary_width);
    let stats = cohorts
        .into_iter()
        .map(|c| {
            let s = cohort_seed(seed, method, filter, &c.label());
            stats_for(c, cfg, s).map_err(|e| match e {
                Error::EmptyCohort(m) => Error::EmptyCohort(format!("{method}/{filter}: {m}")),
                other => other,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let cumulative = stats
        .iter()
        .map(|c| {
            (
                c.cohort.label(),
                cumulative_csv(&c.cohort.durations, c.fit.as_ref()),
            )
        })
        .collect();
    let rows = stats
        .iter()
        .map(|c| SummaryRow {
            method: method.to_string(),
            filtering: filter.to_string(),
            period: c.cohort.label(),
            p50: estimate_cell(&c.p50, format_days),
            p90: estimate_cell(&c.p90, format_days),
            p99: estimate_cell(&c.p99, format_days),
            alpha: c
                .alpha
                .map(|a| estimate_cell(&a, format_alpha))
                .unwrap_or_else(|| "n/a".into()),
        })
        .collect();
    Ok(FilterReport {
        method,
        filter,
        series,
        bootstrapped_series: bootstrapped_series(&stats),
        cumulative,
        fits_json: fits_json(&stats, cfg.bootstrap.reps),
        rows,
        cohorts: stats,
    })
}

pub fn summary_csv(rows: &[SummaryRow]) -> String {
    let mut s = SUMMARY_COLUMNS.join(",");
    s.push('\n');
    for r in rows {
        s.push_str(&r.cells().join(","));
        s.push('\n');
    }
    s
}

pub fn parse_summary_csv(text: &str) -> Result<Vec<SummaryRow>> {
    let mut lines = text.lines();
    if lines.next() != Some(SUMMARY_COLUMNS.join(",").as_str()) {
        return Err(Error::Data("summary CSV header mismatch".into()));
    }
    lines
        .filter(|l| !l.is_empty())
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            if f.len() != 7 {
                return Err(Error::Data(format!("summary CSV row {l:?}")));
            }
            Ok(SummaryRow {
                method: f[0].into(),
                filtering: f[1].into(),
                period: f[2].into(),
                p50: f[3].into(),
                p90: f[4].into(),
                p99: f[5].into(),
                alpha: f[6].into(),
            })
        })
        .collect()
}

/// Column-aligned plain-text table.
pub fn summary_text(rows: &[SummaryRow]) -> String {
    let header = [
        "method",
        "filtering",
        "period",
        "50th %ile (days)",
        "90th %ile (days)",
        "99th %ile (days)",
        "power law exponent",
    ];
    let mut widths: Vec<usize> = header.iter().map(|h| h.chars().count()).collect();
    for r in rows {
        for (w, c) in widths.iter_mut().zip(r.cells()) {
            *w = (*w).max(c.chars().count());
        }
    }
    let line = |cells: [&str; 7]| {
        let mut s = String::new();
        for (i, (c, w)) in cells.iter().zip(&widths).enumerate() {
            if i > 0 {
                s.push_str("  ");
            }
            s.push_str(c);
            if i + 1 < cells.len() {
                s.push_str(&" ".repeat(w - c.chars().count()));
            }
        }
        s.push('\n');
        s
    };
    let mut out = line(header);
    out.push_str(&"-".repeat(widths.iter().sum::<usize>() + 2 * (widths.len() - 1)));
    out.push('\n');
    for r in rows {
        out.push_str(&line(r.cells()));
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FixtureKind {
    /// Years of steady coverage, then an intense short burst.
    MonroeLike,
    /// An early intense burst, then a later and longer stretch of steady coverage.
    AstorLike,
}

impl FromStr for FixtureKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "monroe-like" => Ok(FixtureKind::MonroeLike),
            "astor-like" => Ok(FixtureKind::AstorLike),
            other => Err(Error::Config(format!("unknown fixture {other:?}"))),
        }
    }
}

fn date(s: &str) -> Timestamp {
    Timestamp::parse(s).expect("fixture date")
}

/// Spreads weekly totals over the days of consecutive grid weeks.
fn add_weekly(t: &mut Timeline, first_monday: Timestamp, weekly: &[u64]) {
    for (w, &total) in weekly.iter().enumerate() {
        for d in 0..7u64 {
            let n = total / 7 + u64::from(d < total % 7);
            t.add(first_monday.add_days(7 * w as i64 + d as i64), n);
        }
    }
}

fn add_every(t: &mut Timeline, from: Timestamp, to: Timestamp, step_days: i64) {
    let mut ts = from;
    while ts <= to {
        t.add(ts, 1);
        ts = ts.add_days(step_days);
    }
}

/// Bundled timelines on which the two detectors disagree in a known way.
pub fn fixture_timeline(kind: FixtureKind) -> Timeline {
    let grid = WeekGrid::default();
    match kind {
        FixtureKind::MonroeLike => {
            let mut t = Timeline::new("Marilyn Monroe");
            add_every(&mut t, date("1952-02-13"), date("1961-11-15"), 3);
            add_every(&mut t, date("1962-01-01"), date("1962-07-01"), 20);
            let burst = grid.week_start(grid.week_of(date("1962-07-18")));
            add_weekly(&mut t, burst, &[60, 200, 120, 60, 30, 25]);
            add_every(&mut t, date("1962-09-20"), date("1965-12-31"), 30);
            t
        }
        FixtureKind::AstorLike => {
            let mut t = Timeline::new("John Jacob Astor");
            let burst = grid.week_start(grid.week_of(date("1890-01-08")));
            add_weekly(&mut t, burst, &[20, 100, 50, 30, 15]);
            add_every(&mut t, date("1912-03-23"), date("1912-08-31"), 4);
            t.add(date("1912-08-31"), 1);
            add_every(&mut t, date("1912-10-15"), date("1915-12-31"), 30);
            t
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::peaks::{continuity_from_bounds, continuity_period, spike_period};

    #[test]
    fn filter_labels() {
        for f in NameFilter::DEFAULTS {
            assert_eq!(f.to_string().parse::<NameFilter>().unwrap(), f);
        }
        assert_eq!(
            NameFilter::TopFrac(Ratio::PER_MILLE).to_string(),
            "top-0.1%"
        );
        assert_eq!(NameFilter::TopFrac(Ratio::PER_MILLE).slug(), "top-0.1pct");
        assert_eq!(
            "top-0.1pct".parse::<NameFilter>().unwrap(),
            NameFilter::TopFrac(Ratio::new(1, 1000).unwrap())
        );
        assert!("top-0".parse::<NameFilter>().is_err());
        assert!("bottom-3".parse::<NameFilter>().is_err());
    }

    fn periods(durations: &[i64]) -> Vec<FamePeriod> {
        let s = date("1946-03-01");
        durations
            .iter()
            .map(|&d| continuity_from_bounds("x", s, s.add_days(d)))
            .collect()
    }

    #[test]
    fn degenerate_median_renders_like_the_table() {
        let cfg = StatsConfig {
            bootstrap: BootstrapConfig::new(200, 0.99, 0).unwrap(),
            ..StatsConfig::default()
        };
        let r = summarize(
            &periods(&[7; 40]),
            Method::Continuity,
            NameFilter::All,
            &cfg,
            1,
        )
        .unwrap();
        assert_eq!(r.rows.len(), 1);
        assert_eq!(r.rows[0].period, "1945-9");
        assert_eq!(r.rows[0].p50, "7 (7 .. 7)");
        assert_eq!(r.rows[0].alpha, "n/a");
    }

    #[test]
    fn summary_csv_round_trip_and_text() {
        let cfg = StatsConfig {
            bootstrap: BootstrapConfig::new(100, 0.99, 0).unwrap(),
            ..StatsConfig::default()
        };
        let ds: Vec<i64> = (2..200).collect();
        let r = summarize(
            &periods(&ds),
            Method::Continuity,
            NameFilter::TopK(1000),
            &cfg,
            1,
        )
        .unwrap();
        let csv = summary_csv(&r.rows);
        assert_eq!(parse_summary_csv(&csv).unwrap(), r.rows);
        assert!(r.rows[0].alpha.starts_with('-'));
        let text = summary_text(&r.rows);
        assert!(text.starts_with("method      filtering"));
        assert_eq!(r.cumulative.len(), 1);
        assert!(r.cumulative[0].1.starts_with("# reference_slope=-"));
        assert!(r.fits_json.contains("\"1945-9\""));
    }

    #[test]
    fn empty_periods_is_empty_cohort() {
        let e = summarize(
            &[],
            Method::Spike,
            NameFilter::All,
            &StatsConfig::default(),
            0,
        )
        .unwrap_err();
        assert!(matches!(e, Error::EmptyCohort(ref m) if m.contains("spike") && m.contains("all")));
    }

    #[test]
    fn cumulative_file_shape() {
        let fit = PowerLawFit {
            alpha: -2.5,
            d_min: 7.0,
            n_tail: 10,
        };
        assert_eq!(
            cumulative_csv(&[7.0, 7.0, 14.0], Some(&fit)),
            "# reference_slope=-1.500000\nx,y\n7,1\n14,0\n"
        );
    }

    #[test]
    fn fixtures_disagree_as_documented() {
        let grid = WeekGrid::default();
        let m = fixture_timeline(FixtureKind::MonroeLike);
        let (s, c) = (spike_period(&m, &grid), continuity_period(&m));
        assert!(c.duration_days > 5.0 * s.duration_days, "{c:?} vs {s:?}");
        assert!(c.end < s.start);

        let a = fixture_timeline(FixtureKind::AstorLike);
        let (s, c) = (spike_period(&a, &grid), continuity_period(&a));
        assert!(s.end <= c.start || c.end < s.start, "{s:?} / {c:?}");
        assert_eq!(c.start, date("1912-03-23"));
        assert_eq!(c.end, date("1912-08-31"));
        assert_eq!(s.start.year(), 1890);
    }
}
