//! Cohorts, nearest-rank quantiles, power-law tail fits and bootstrap
//! intervals.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::par;
use crate::peaks::FamePeriod;
use crate::time::Month;

pub const DEFAULT_TAIL_QUANTILE: f64 = 0.8;
pub const MIN_TAIL: usize = 10;
pub const DEFAULT_REPS: usize = 25_000;
pub const DEFAULT_LEVEL: f64 = 0.99;
/// Fraction of failed resamples tolerated before a bootstrap is rejected.
pub const MAX_FAILED_RESAMPLE_FRACTION: f64 = 0.01;

/// Cohort bucket width in whole months; buckets are aligned to multiples of
/// the width counted from January of year 0.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct CohortWidth {
    pub months: u32,
}

impl CohortWidth {
    pub const QUARTER: CohortWidth = CohortWidth { months: 3 };
    pub const FIVE_YEARS: CohortWidth = CohortWidth { months: 60 };

    pub fn new(months: u32) -> Result<Self> {
        if months == 0 {
            return Err(Error::Config(
                "cohort width must be at least one month".into(),
            ));
        }
        Ok(CohortWidth { months })
    }

    pub fn bucket_of(self, m: Month) -> Month {
        let w = self.months as i64;
        Month::from_index(m.index().div_euclid(w) * w)
    }

    /// `1905-9` / `1910-14` for five-year buckets, `1905Q2` for quarters,
    /// the start month otherwise.
    pub fn label(self, start: Month) -> String {
        if self.months.is_multiple_of(12) && start.month == 1 {
            let last = start.year + (self.months / 12) as i32 - 1;
            if last == start.year {
                start.year.to_string()
            } else if last / 10 == start.year / 10 && start.year % 10 != 0 {
                format!("{}-{}", start.year, last % 10)
            } else if last / 100 == start.year / 100 {
                format!("{}-{:02}", start.year, last % 100)
            } else {
                format!("{}-{}", start.year, last)
            }
        } else if self.months == 3 {
            format!("{}Q{}", start.year, (start.month - 1) / 3 + 1)
        } else {
            start.to_string()
        }
    }
}

impl fmt::Display for CohortWidth {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.months.is_multiple_of(12) {
            write!(f, "{}y", self.months / 12)
        } else {
            write!(f, "{}m", self.months)
        }
    }
}

impl FromStr for CohortWidth {
    type Err = Error;

    /// `3m`, `5y`, or a bare month count.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Config(format!("invalid cohort width {s:?}"));
        let (num, mult) = match s.strip_suffix('y') {
            Some(n) => (n, 12),
            None => (s.strip_suffix('m').unwrap_or(s), 1),
        };
        let n: u32 = num.parse().map_err(|_| bad())?;
        CohortWidth::new(n * mult)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Cohort {
    pub bucket_start: Month,
    pub width: CohortWidth,
    pub durations: Vec<f64>,
}

impl Cohort {
    pub fn label(&self) -> String {
        self.width.label(self.bucket_start)
    }
}

/// Partitions periods by the bucket containing their peak date; cohorts come
/// out in bucket order and only non-empty buckets appear.
pub fn assign_cohorts(periods: &[FamePeriod], width: CohortWidth) -> Vec<Cohort> {
    let mut buckets: BTreeMap<Month, Vec<f64>> = BTreeMap::new();
    for p in periods {
        buckets
            .entry(width.bucket_of(p.peak_date.month()))
            .or_default()
            .push(p.duration_days);
    }
    buckets
        .into_iter()
        .map(|(bucket_start, durations)| Cohort {
            bucket_start,
            width,
            durations,
        })
        .collect()
}

/// 1-based nearest rank `ceil(q * n)`, clamped to `1..=n`. Products within
/// 1e-9 of an integer count as that integer so that e.g. `0.9 * 30` is 27.
pub fn nearest_rank(n: usize, q: f64) -> usize {
    let x = q * n as f64;
    let r = x.round();
    let k = if (x - r).abs() <= 1e-9 * x.max(1.0) {
        r
    } else {
        x.ceil()
    };
    (k as usize).clamp(1, n)
}

fn check_q(q: f64) -> Result<()> {
    if q > 0.0 && q <= 1.0 {
        Ok(())
    } else {
        Err(Error::Config(format!("quantile level {q} outside (0, 1]")))
    }
}

pub fn sorted(values: &[f64]) -> Vec<f64> {
    let mut v = values.to_vec();
    v.sort_unstable_by(f64::total_cmp);
    v
}

/// Nearest-rank quantile of ascending `sorted`.
pub fn quantile_sorted(sorted: &[f64], q: f64) -> Result<f64> {
    check_q(q)?;
    if sorted.is_empty() {
        return Err(Error::EmptyCohort("quantile of an empty list".into()));
    }
    Ok(sorted[nearest_rank(sorted.len(), q) - 1])
}

pub fn quantile(values: &[f64], q: f64) -> Result<f64> {
    quantile_sorted(&sorted(values), q)
}

/// Continuous power-law tail fit; `alpha` is negative, `p(d) ∝ d^alpha`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PowerLawFit {
    pub alpha: f64,
    pub d_min: f64,
    pub n_tail: usize,
}

impl PowerLawFit {
    /// Maximum-likelihood exponent for `tail` (all strictly above `d_min`):
    /// `|alpha| = 1 + n / Σ ln(d_i / d_min)`.
    pub fn from_tail(d_min: f64, tail: &[f64]) -> Result<Self> {
        if d_min <= 0.0 {
            return Err(Error::Data(format!(
                "power-law d_min must be positive, got {d_min}"
            )));
        }
        if tail.is_empty() {
            return Err(Error::InsufficientTail {
                n_tail: 0,
                required: 1,
            });
        }
        let log_sum: f64 = tail.iter().map(|d| (d / d_min).ln()).sum();
        if log_sum <= 0.0 || !log_sum.is_finite() {
            return Err(Error::DegenerateTail);
        }
        Ok(PowerLawFit {
            alpha: -(1.0 + tail.len() as f64 / log_sum),
            d_min,
            n_tail: tail.len(),
        })
    }

    /// Slope of the complementary cumulative curve on log-log axes.
    pub fn reference_slope(&self) -> f64 {
        self.alpha + 1.0
    }
}

/// Fits the durations above the `tail_quantile` nearest-rank quantile.
pub fn fit_power_law(durations: &[f64], tail_quantile: f64) -> Result<PowerLawFit> {
    fit_power_law_sorted(&sorted(durations), tail_quantile)
}

pub fn fit_power_law_sorted(sorted: &[f64], tail_quantile: f64) -> Result<PowerLawFit> {
    let d_min = quantile_sorted(sorted, tail_quantile)?;
    let first = sorted.partition_point(|&d| d <= d_min);
    let tail = &sorted[first..];
    if tail.len() < MIN_TAIL {
        return Err(Error::InsufficientTail {
            n_tail: tail.len(),
            required: MIN_TAIL,
        });
    }
    PowerLawFit::from_tail(d_min, tail)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Statistic {
    Quantile(f64),
    PowerLawAlpha { tail_quantile: f64 },
}

impl Statistic {
    pub fn eval(&self, values: &[f64]) -> Result<f64> {
        self.eval_sorted(&sorted(values))
    }

    fn eval_sorted(&self, sorted: &[f64]) -> Result<f64> {
        match *self {
            Statistic::Quantile(q) => quantile_sorted(sorted, q),
            Statistic::PowerLawAlpha { tail_quantile } => {
                fit_power_law_sorted(sorted, tail_quantile).map(|f| f.alpha)
            }
        }
    }

    /// Evaluates on the multiset `values[i]` repeated `counts[i]` times
    /// (`values` ascending, `Σ counts == n`), matching `eval_sorted` on the
    /// expanded list.
    fn eval_weighted(&self, values: &[f64], counts: &[u32], n: usize) -> Result<f64> {
        let at_rank = |rank: usize| -> (usize, f64) {
            let mut seen = 0usize;
            for (i, &c) in counts.iter().enumerate() {
                seen += c as usize;
                if seen >= rank {
                    return (i, values[i]);
                }
            }
            unreachable!("rank within total count")
        };
        match *self {
            Statistic::Quantile(q) => {
                check_q(q)?;
                Ok(at_rank(nearest_rank(n, q)).1)
            }
            Statistic::PowerLawAlpha { tail_quantile } => {
                check_q(tail_quantile)?;
                let (mut i, d_min) = at_rank(nearest_rank(n, tail_quantile));
                while i < values.len() && values[i] <= d_min {
                    i += 1;
                }
                let mut n_tail = 0usize;
                let mut log_sum = 0.0;
                for (v, &c) in values[i..].iter().zip(&counts[i..]) {
                    if c > 0 {
                        n_tail += c as usize;
                        log_sum += c as f64 * (v / d_min).ln();
                    }
                }
                if n_tail < MIN_TAIL {
                    return Err(Error::InsufficientTail {
                        n_tail,
                        required: MIN_TAIL,
                    });
                }
                if d_min <= 0.0 {
                    return Err(Error::Data(format!(
                        "power-law d_min must be positive, got {d_min}"
                    )));
                }
                if log_sum <= 0.0 || !log_sum.is_finite() {
                    return Err(Error::DegenerateTail);
                }
                Ok(-(1.0 + n_tail as f64 / log_sum))
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BootstrapInterval {
    pub point: f64,
    pub lo: f64,
    pub hi: f64,
    pub level: f64,
    pub reps: usize,
    pub seed: u64,
}

impl BootstrapInterval {
    /// `point (lo .. hi)`, e.g. `27 (25 .. 29)`.
    pub fn display_with(&self, fmt: impl Fn(f64) -> String) -> String {
        format!("{} ({} .. {})", fmt(self.point), fmt(self.lo), fmt(self.hi))
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BootstrapConfig {
    pub reps: usize,
    pub level: f64,
    pub seed: u64,
}

impl BootstrapConfig {
    pub fn new(reps: usize, level: f64, seed: u64) -> Result<Self> {
        if reps == 0 {
            return Err(Error::Config(
                "bootstrap needs at least one replicate".into(),
            ));
        }
        if !(level > 0.0 && level < 1.0) {
            return Err(Error::Config(format!(
                "bootstrap level {level} outside (0, 1)"
            )));
        }
        Ok(BootstrapConfig { reps, level, seed })
    }
}

impl Default for BootstrapConfig {
    fn default() -> Self {
        BootstrapConfig {
            reps: DEFAULT_REPS,
            level: DEFAULT_LEVEL,
            seed: 0,
        }
    }
}

/// The RNG for replicate `r`: a pure function of `(seed, r)`.
pub fn replicate_rng(seed: u64, r: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(r as u64);
    rng
}

/// Multiplicity of each sorted position in resample `r`.
fn resample_counts(n: usize, seed: u64, r: usize) -> Vec<u32> {
    let mut rng = replicate_rng(seed, r);
    let mut counts = vec![0u32; n];
    for _ in 0..n {
        counts[rng.random_range(0..n)] += 1;
    }
    counts
}

/// Materializes resample `r` of `values` (sorted ascending). Used by tests
/// to check the weighted evaluation path.
pub fn resample(values: &[f64], seed: u64, r: usize) -> Vec<f64> {
    let s = sorted(values);
    let counts = resample_counts(s.len(), seed, r);
    s.iter()
        .zip(&counts)
        .flat_map(|(&v, &c)| std::iter::repeat_n(v, c as usize))
        .collect()
}

/// Percentile bootstrap of several statistics over shared resamples.
///
/// Resample `r` draws `|values|` items with replacement using
/// [`replicate_rng`]`(seed, r)`, so every statistic sees the same resamples
/// and each result equals a separate [`bootstrap`] call.
pub fn bootstrap_many(
    values: &[f64],
    statistics: &[Statistic],
    cfg: BootstrapConfig,
) -> Result<Vec<Result<BootstrapInterval>>> {
    let cfg = BootstrapConfig::new(cfg.reps, cfg.level, cfg.seed)?;
    if values.is_empty() {
        return Err(Error::EmptyCohort("bootstrap of an empty list".into()));
    }
    let s = sorted(values);
    let n = s.len();
    let per_rep: Vec<Vec<Result<f64>>> = par::map_range(cfg.reps, |r| {
        let counts = resample_counts(n, cfg.seed, r);
        statistics
            .iter()
            .map(|st| st.eval_weighted(&s, &counts, n))
            .collect()
    });

    let lo_q = (1.0 - cfg.level) / 2.0;
    let hi_q = 1.0 - lo_q;
    let out = statistics
        .iter()
        .enumerate()
        .map(|(k, st)| {
            let point = st.eval_sorted(&s)?;
            let mut draws: Vec<f64> = Vec::with_capacity(cfg.reps);
            let mut failed = 0usize;
            for rep in &per_rep {
                match &rep[k] {
                    Ok(v) => draws.push(*v),
                    Err(_) => failed += 1,
                }
            }
            if failed as f64 > MAX_FAILED_RESAMPLE_FRACTION * cfg.reps as f64 || draws.is_empty() {
                return Err(Error::UnstableStatistic {
                    failed,
                    reps: cfg.reps,
                });
            }
            draws.sort_unstable_by(f64::total_cmp);
            Ok(BootstrapInterval {
                point,
                lo: quantile_sorted(&draws, lo_q)?,
                hi: quantile_sorted(&draws, hi_q)?,
                level: cfg.level,
                reps: cfg.reps,
                seed: cfg.seed,
            })
        })
        .collect();
    Ok(out)
}

pub fn bootstrap(
    values: &[f64],
    statistic: Statistic,
    cfg: BootstrapConfig,
) -> Result<BootstrapInterval> {
    bootstrap_many(values, &[statistic], cfg)?
        .pop()
        .expect("one statistic in, one result out")
}

/// Points `(x, #{d > x})` over the distinct durations, ascending in `x`.
pub fn cumulative_curve(durations: &[f64]) -> Vec<(f64, usize)> {
    let s = sorted(durations);
    let mut out: Vec<(f64, usize)> = Vec::new();
    for (i, &d) in s.iter().enumerate() {
        let above = s.len() - i - 1;
        match out.last_mut() {
            Some((x, y)) if *x == d => *y = above,
            _ => out.push((d, above)),
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::peaks::continuity_from_bounds;
    use crate::time::Timestamp;
    use proptest::prelude::*;

    fn period_peaking(date: &str) -> FamePeriod {
        let s = Timestamp::parse(date).unwrap();
        continuity_from_bounds("x", s, s)
    }

    #[test]
    fn cohort_buckets() {
        let ps = vec![
            period_peaking("1907-03-02"),
            period_peaking("1910-01-01"),
            period_peaking("1909-12-31"),
        ];
        let cs = assign_cohorts(&ps, CohortWidth::FIVE_YEARS);
        assert_eq!(cs.len(), 2);
        assert_eq!(cs[0].label(), "1905-9");
        assert_eq!(cs[0].durations.len(), 2);
        assert_eq!(cs[1].label(), "1910-14");
        assert!(assign_cohorts(&[], CohortWidth::FIVE_YEARS).is_empty());
        assert_eq!(
            CohortWidth::FIVE_YEARS.label(Month::new(1900, 1).unwrap()),
            "1900-04"
        );
        assert_eq!(
            CohortWidth::FIVE_YEARS.label(Month::new(1995, 1).unwrap()),
            "1995-9"
        );

        let q = assign_cohorts(&ps, CohortWidth::QUARTER);
        assert_eq!(
            q.iter().map(Cohort::label).collect::<Vec<_>>(),
            vec!["1907Q1", "1909Q4", "1910Q1"]
        );
    }

    #[test]
    fn width_parsing() {
        assert_eq!(
            "5y".parse::<CohortWidth>().unwrap(),
            CohortWidth::FIVE_YEARS
        );
        assert_eq!("3m".parse::<CohortWidth>().unwrap(), CohortWidth::QUARTER);
        assert_eq!(CohortWidth::FIVE_YEARS.to_string(), "5y");
        assert!("0m".parse::<CohortWidth>().is_err());
    }

    #[test]
    fn nearest_rank_quantiles() {
        assert_eq!(quantile(&[7.0, 7.0, 14.0, 21.0], 0.5).unwrap(), 7.0);
        assert_eq!(quantile(&[21.0, 14.0, 7.0, 7.0], 0.75).unwrap(), 14.0);
        assert_eq!(quantile(&[3.0], 0.99).unwrap(), 3.0);
        assert_eq!(quantile(&[5.0; 9], 0.1).unwrap(), 5.0);
        assert!(matches!(quantile(&[], 0.5), Err(Error::EmptyCohort(_))));
        assert!(quantile(&[1.0], 0.0).is_err());
        // 0.9 * 30 must land on rank 27, not 28
        let v: Vec<f64> = (1..=30).map(f64::from).collect();
        assert_eq!(quantile(&v, 0.9).unwrap(), 27.0);
        let v: Vec<f64> = (1..=100).map(f64::from).collect();
        assert_eq!(quantile(&v, 0.99).unwrap(), 99.0);
    }

    #[test]
    fn mle_direct_evaluation() {
        let d_min = 7.0;
        let tail = [d_min * std::f64::consts::E; 3];
        let fit = PowerLawFit::from_tail(d_min, &tail).unwrap();
        assert!((fit.alpha + 2.0).abs() < 1e-12);
        assert!((fit.reference_slope() + 1.0).abs() < 1e-12);
    }

    #[test]
    fn tail_errors() {
        let few: Vec<f64> = (1..=20).map(f64::from).collect();
        assert!(matches!(
            fit_power_law(&few, 0.8),
            Err(Error::InsufficientTail { n_tail: 4, .. })
        ));
        assert!(matches!(
            PowerLawFit::from_tail(5.0, &[5.0, 5.0]),
            Err(Error::DegenerateTail)
        ));
        let ties = vec![7.0; 100];
        assert!(matches!(
            fit_power_law(&ties, 0.8),
            Err(Error::InsufficientTail { n_tail: 0, .. })
        ));
    }

    #[test]
    fn tail_is_strictly_above_d_min() {
        // 80th percentile of 1..=100 is 80; the tail is 81..=100
        let v: Vec<f64> = (1..=100).map(f64::from).collect();
        let fit = fit_power_law(&v, 0.8).unwrap();
        assert_eq!(fit.d_min, 80.0);
        assert_eq!(fit.n_tail, 20);
    }

    #[test]
    fn constant_data_gives_zero_width() {
        let cfg = BootstrapConfig::new(500, 0.99, 3).unwrap();
        let b = bootstrap(&[7.0; 50], Statistic::Quantile(0.5), cfg).unwrap();
        assert_eq!((b.point, b.lo, b.hi), (7.0, 7.0, 7.0));
        assert_eq!(b.display_with(|x| format!("{x:.0}")), "7 (7 .. 7)");
    }

    #[test]
    fn interval_format() {
        let b = BootstrapInterval {
            point: 27.0,
            lo: 25.0,
            hi: 29.0,
            level: 0.99,
            reps: 1,
            seed: 0,
        };
        assert_eq!(b.display_with(crate::peaks::format_days), "27 (25 .. 29)");
    }

    #[test]
    fn unstable_statistic() {
        // 12 distinct values leave exactly 10 above the cut; resamples with ties fall short
        let v: Vec<f64> = (1..=12).map(|x| x as f64 * 3.0).collect();
        let cfg = BootstrapConfig::new(200, 0.99, 1).unwrap();
        assert!(fit_power_law(&v, 0.1).is_ok());
        let r = bootstrap(&v, Statistic::PowerLawAlpha { tail_quantile: 0.1 }, cfg);
        assert!(matches!(r, Err(Error::UnstableStatistic { .. })), "{r:?}");
        assert!(matches!(
            bootstrap(&[], Statistic::Quantile(0.5), cfg),
            Err(Error::EmptyCohort(_))
        ));
    }

    #[test]
    fn weighted_path_matches_materialized_resample() {
        let v: Vec<f64> = (0..300).map(|i| 2.0 + ((i * 7919) % 211) as f64).collect();
        let stats = [
            Statistic::Quantile(0.5),
            Statistic::Quantile(0.9),
            Statistic::Quantile(0.99),
            Statistic::PowerLawAlpha { tail_quantile: 0.8 },
        ];
        let s = sorted(&v);
        for r in 0..20 {
            let counts = resample_counts(s.len(), 11, r);
            let expanded = resample(&v, 11, r);
            for st in &stats {
                let a = st.eval_weighted(&s, &counts, s.len()).unwrap();
                let b = st.eval(&expanded).unwrap();
                assert!(
                    (a - b).abs() <= 1e-12 * b.abs().max(1.0),
                    "{st:?}: {a} vs {b}"
                );
            }
        }
    }

    #[test]
    fn many_equals_single() {
        let v: Vec<f64> = (0..200).map(|i| 2.0 + ((i * 31) % 97) as f64).collect();
        let cfg = BootstrapConfig::new(300, 0.95, 5).unwrap();
        let stats = [Statistic::Quantile(0.5), Statistic::Quantile(0.9)];
        let many = bootstrap_many(&v, &stats, cfg).unwrap();
        for (st, m) in stats.iter().zip(many) {
            assert_eq!(m.unwrap(), bootstrap(&v, *st, cfg).unwrap());
        }
    }

    #[test]
    fn cumulative_counts() {
        assert_eq!(
            cumulative_curve(&[7.0, 7.0, 14.0]),
            vec![(7.0, 1), (14.0, 0)]
        );
        assert_eq!(cumulative_curve(&[9.0]), vec![(9.0, 0)]);
        assert!(cumulative_curve(&[]).is_empty());
    }

    proptest! {
        #[test]
        fn quantile_monotone_and_order_free(mut v in prop::collection::vec(0.0f64..1e4, 1..60), q1 in 0.01f64..1.0, q2 in 0.01f64..1.0) {
            let (a, b) = (q1.min(q2), q1.max(q2));
            prop_assert!(quantile(&v, a).unwrap() <= quantile(&v, b).unwrap());
            let before = quantile(&v, a).unwrap();
            v.reverse();
            prop_assert_eq!(quantile(&v, a).unwrap(), before);
        }

        #[test]
        fn alpha_scale_invariant(v in prop::collection::vec(2.0f64..1e4, 60..200), k in 0.01f64..100.0) {
            if let Ok(fit) = fit_power_law(&v, 0.8) {
                let scaled: Vec<f64> = v.iter().map(|d| d * k).collect();
                let g = fit_power_law(&scaled, 0.8).unwrap();
                prop_assert!((fit.alpha - g.alpha).abs() < 1e-9);
                prop_assert!(fit.alpha < -1.0);
            }
        }

        #[test]
        fn cumulative_curve_non_increasing(v in prop::collection::vec(0u32..50, 1..80)) {
            let v: Vec<f64> = v.into_iter().map(f64::from).collect();
            let c = cumulative_curve(&v);
            for w in c.windows(2) {
                prop_assert!(w[0].0 < w[1].0 && w[0].1 >= w[1].1);
            }
            for &(x, y) in &c {
                prop_assert_eq!(y, v.iter().filter(|&&d| d > x).count());
            }
        }

        #[test]
        fn cohorts_partition(days in prop::collection::vec(-30_000i64..30_000, 0..100)) {
            let ps: Vec<_> = days.iter().map(|&d| {
                let s = Timestamp::from_day(d);
                continuity_from_bounds("x", s, s)
            }).collect();
            for w in [CohortWidth::QUARTER, CohortWidth::FIVE_YEARS] {
                let cs = assign_cohorts(&ps, w);
                prop_assert_eq!(cs.iter().map(|c| c.durations.len()).sum::<usize>(), ps.len());
                for p in &ps {
                    let m = p.peak_date.month().index();
                    let hits: Vec<_> = cs.iter().filter(|c| {
                        let b = c.bucket_start.index();
                        b <= m && m < b + w.months as i64
                    }).collect();
                    prop_assert_eq!(hits.len(), 1);
                }
            }
        }
    }
}
