//! Synthetic corpora from the binomial mention model, plus brute-force
//! reference detectors.
//!
//! Every name has a daily mention probability and every day a document
//! count; each document mentions each name independently.
//! Both are piecewise constant in time. Generation is keyed by
//! `(seed, day)`, so output does not depend on the worker count.
//!
//! Configuration is TOML:
//!
//! ```toml
//! seed = 7
//! window = "1900-01..1902-01"
//!
//! [[volume]]            # end is exclusive
//! start = "1900-01-01"
//! end = "1902-01-01"
//! count = 1000
//! per = "month"         # or "day"
//!
//! [[profile]]
//! name = "Ada Lovelace"
//! segments = [{ start = "1900-02-01", end = "1900-04-01", p = 0.01 }]
//! ```
//!
//! With `per = "month"` a month's count is spread evenly over its days
//! (earlier days take the remainder); days outside every volume segment have
//! no documents.

use chrono::NaiveDate;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};
use serde::Deserialize;

use crate::corpus_io::Document;
use crate::error::{Error, Result};
use crate::par;
use crate::time::{date_to_day, day_to_date, AnalysisWindow, Month, Timestamp};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Segment {
    pub start: NaiveDate,
    /// Exclusive.
    pub end: NaiveDate,
    pub p: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct NameProfile {
    pub name: String,
    pub segments: Vec<Segment>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VolumeUnit {
    Day,
    Month,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct VolumeSegment {
    pub start: NaiveDate,
    pub end: NaiveDate,
    pub count: u64,
    pub per: VolumeUnit,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct VolumeSchedule {
    pub segments: Vec<VolumeSegment>,
}

impl VolumeSchedule {
    pub fn constant(start: NaiveDate, end: NaiveDate, count: u64, per: VolumeUnit) -> Self {
        VolumeSchedule {
            segments: vec![VolumeSegment {
                start,
                end,
                count,
                per,
            }],
        }
    }

    pub fn on(&self, date: NaiveDate) -> u64 {
        let Some(seg) = self
            .segments
            .iter()
            .find(|s| s.start <= date && date < s.end)
        else {
            return 0;
        };
        match seg.per {
            VolumeUnit::Day => seg.count,
            VolumeUnit::Month => {
                let month = Month::of(date);
                let days = month.days() as u64;
                let i = (date_to_day(date) - date_to_day(month.first_day())) as u64;
                seg.count / days + u64::from(i < seg.count % days)
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SynthSpec {
    pub profiles: Vec<NameProfile>,
    pub volume: VolumeSchedule,
    pub window: AnalysisWindow,
    pub seed: u64,
}

fn check_disjoint<T>(
    items: &[T],
    range: impl Fn(&T) -> (NaiveDate, NaiveDate),
    what: &str,
) -> Result<()> {
    let mut rs: Vec<_> = items.iter().map(range).collect();
    rs.sort();
    for r in &rs {
        if r.0 >= r.1 {
            return Err(Error::Config(format!(
                "{what}: empty segment {} .. {}",
                r.0, r.1
            )));
        }
    }
    for w in rs.windows(2) {
        if w[1].0 < w[0].1 {
            return Err(Error::Config(format!(
                "{what}: overlapping segments at {}",
                w[1].0
            )));
        }
    }
    Ok(())
}

impl SynthSpec {
    pub fn validate(&self) -> Result<()> {
        let (lo, hi) = (self.window.start.first_day(), self.window.end.first_day());
        for prof in &self.profiles {
            check_disjoint(&prof.segments, |s| (s.start, s.end), &prof.name)?;
            for s in &prof.segments {
                if !(0.0..=1.0).contains(&s.p) {
                    return Err(Error::Config(format!(
                        "{}: probability {} outside [0, 1]",
                        prof.name, s.p
                    )));
                }
                if s.start < lo || s.end > hi {
                    return Err(Error::Config(format!(
                        "{}: segment outside the window",
                        prof.name
                    )));
                }
            }
        }
        check_disjoint(&self.volume.segments, |s| (s.start, s.end), "volume")
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        #[derive(Deserialize)]
        #[serde(deny_unknown_fields)]
        struct Raw {
            seed: u64,
            window: String,
            #[serde(default)]
            volume: Vec<RawVolume>,
            #[serde(default)]
            profile: Vec<RawProfile>,
        }
        #[derive(Deserialize)]
        #[serde(deny_unknown_fields)]
        struct RawVolume {
            start: String,
            end: String,
            count: u64,
            per: VolumeUnit,
        }
        #[derive(Deserialize)]
        #[serde(deny_unknown_fields)]
        struct RawProfile {
            name: String,
            segments: Vec<RawSegment>,
        }
        #[derive(Deserialize)]
        #[serde(deny_unknown_fields)]
        struct RawSegment {
            start: String,
            end: String,
            p: f64,
        }
        fn date(s: &str) -> Result<NaiveDate> {
            NaiveDate::parse_from_str(s, "%Y-%m-%d")
                .map_err(|_| Error::Config(format!("invalid date {s:?}")))
        }

        let raw: Raw =
            toml::from_str(text).map_err(|e| Error::Config(format!("synth config: {e}")))?;
        let spec = SynthSpec {
            seed: raw.seed,
            window: AnalysisWindow::parse(&raw.window)?,
            volume: VolumeSchedule {
                segments: raw
                    .volume
                    .iter()
                    .map(|v| {
                        Ok(VolumeSegment {
                            start: date(&v.start)?,
                            end: date(&v.end)?,
                            count: v.count,
                            per: v.per,
                        })
                    })
                    .collect::<Result<_>>()?,
            },
            profiles: raw
                .profile
                .iter()
                .map(|p| {
                    Ok(NameProfile {
                        name: p.name.clone(),
                        segments: p
                            .segments
                            .iter()
                            .map(|s| {
                                Ok(Segment {
                                    start: date(&s.start)?,
                                    end: date(&s.end)?,
                                    p: s.p,
                                })
                            })
                            .collect::<Result<_>>()?,
                    })
                })
                .collect::<Result<_>>()?,
        };
        spec.validate()?;
        Ok(spec)
    }
}

/// Per-day `(profile index, p)` lists, indexed from the window start.
fn daily_probabilities(spec: &SynthSpec, first_day: i64, n_days: usize) -> Vec<Vec<(usize, f64)>> {
    let mut by_day = vec![Vec::new(); n_days];
    for (k, prof) in spec.profiles.iter().enumerate() {
        for s in &prof.segments {
            if s.p <= 0.0 {
                continue;
            }
            for d in date_to_day(s.start)..date_to_day(s.end) {
                let i = (d - first_day) as usize;
                if i < n_days {
                    by_day[i].push((k, s.p));
                }
            }
        }
    }
    by_day
}

/// Pre-tagged documents for every day of the window, in day order. Each
/// document mentions each name at most once.
pub fn generate_corpus(spec: &SynthSpec) -> Result<Vec<Document>> {
    spec.validate()?;
    let first = date_to_day(spec.window.start.first_day());
    let last = date_to_day(spec.window.end.first_day());
    let n_days = (last - first) as usize;
    let probs = daily_probabilities(spec, first, n_days);
    let days: Vec<usize> = (0..n_days).collect();
    let per_day = par::map(&days, |&i| {
        let day = first + i as i64;
        let date = day_to_date(day);
        let n = spec.volume.on(date);
        let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
        rng.set_stream(day as u64);
        let mut mentions: Vec<Vec<(String, u64)>> = vec![Vec::new(); n as usize];
        for &(k, p) in &probs[i] {
            if n == 0 {
                break;
            }
            let hits = Binomial::new(n, p)
                .expect("p within [0, 1]")
                .sample(&mut rng);
            for doc in rand::seq::index::sample(&mut rng, n as usize, hits as usize) {
                mentions[doc].push((spec.profiles[k].name.clone(), 1));
            }
        }
        let ts = Timestamp::from_day(day);
        let stamp = date.format("%Y-%m-%d").to_string();
        mentions
            .into_iter()
            .enumerate()
            .map(|(j, m)| Document::tagged(format!("{stamp}#{j}"), ts, m))
            .collect::<Vec<_>>()
    });
    Ok(per_day.into_iter().flatten().collect())
}

/// Exhaustive reference implementations of the two detectors. They share no
/// code with [`crate::peaks`] beyond the output type.
pub mod oracle {
    use crate::peaks::{FamePeriod, Method, WeekGrid};
    use crate::time::{Timestamp, SECS_PER_DAY};
    use crate::timeline::Timeline;

    /// Scans every contiguous range of weeks around the earliest busiest week.
    pub fn oracle_spike(t: &Timeline, grid: &WeekGrid) -> FamePeriod {
        let first = t.events.keys().next().expect("non-empty timeline");
        let last = t.events.keys().next_back().unwrap();
        let w0 = grid.week_of(*first);
        let w1 = grid.week_of(*last);
        let counts: Vec<u64> = (w0..=w1)
            .map(|w| {
                let (a, b) = (grid.week_start(w), grid.week_start(w + 1));
                t.events
                    .iter()
                    .filter(|(ts, _)| a.date() <= ts.date() && ts.date() < b.date())
                    .map(|(_, n)| n)
                    .sum()
            })
            .collect();
        let max = *counts.iter().max().unwrap();
        let peak = counts.iter().position(|&c| c == max).unwrap();
        let threshold = max as f64 / 10.0;
        let mut best = (peak, peak);
        for a in 0..=peak {
            for b in peak..counts.len() {
                if counts[a..=b]
                    .iter()
                    .all(|&c| c > 0 && c as f64 >= threshold)
                    && b - a > best.1 - best.0
                {
                    best = (a, b);
                }
            }
        }
        let week = |i: usize| grid.week_start(w0 + i as i64);
        FamePeriod {
            name: t.name.clone(),
            method: Method::Spike,
            start: week(best.0),
            end: week(best.1 + 1),
            peak_date: week(peak),
            duration_days: 7.0 * (best.1 - best.0 + 1) as f64,
        }
    }

    /// `silent[k]`: the seven days after mention `k` contain no mention.
    fn silent_weeks(times: &[Timestamp]) -> Vec<bool> {
        let week = 7 * SECS_PER_DAY;
        times
            .iter()
            .map(|open| {
                let open = open.seconds();
                !times
                    .iter()
                    .any(|t| t.seconds() > open && t.seconds() <= open + week)
            })
            .collect()
    }

    /// Enumerates ranges of mentions containing no silent week and keeps the
    /// longest (earliest on ties).
    pub fn oracle_continuity(t: &Timeline) -> FamePeriod {
        let times: Vec<Timestamp> = t.events.keys().copied().collect();
        let silent = silent_weeks(&times);
        let mut best: Option<(usize, usize)> = None;
        for i in 0..times.len() {
            for j in i..times.len() {
                // a silent week after any mention in [i, j) breaks the range
                if j > i && silent[j - 1] {
                    break;
                }
                let span = times[j].seconds() - times[i].seconds();
                let better = match best {
                    None => true,
                    Some((a, b)) => span > times[b].seconds() - times[a].seconds(),
                };
                if better {
                    best = Some((i, j));
                }
            }
        }
        let (i, j) = best.expect("non-empty timeline");
        let duration_days = (times[j].seconds() - times[i].seconds()) as f64 / SECS_PER_DAY as f64;
        FamePeriod {
            name: t.name.clone(),
            method: Method::Continuity,
            start: times[i],
            end: times[j],
            peak_date: Timestamp::from_seconds(
                times[i].seconds() + (duration_days / 2.0).floor() as i64 * SECS_PER_DAY,
            ),
            duration_days,
        }
    }
}
