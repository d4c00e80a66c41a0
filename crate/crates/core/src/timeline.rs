//! Per-name timelines and the name-set filters.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::name_extract::Mention;
use crate::time::Timestamp;

/// The multiset of instants at which a name was mentioned.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Timeline {
    pub name: String,
    pub events: BTreeMap<Timestamp, u64>,
}

impl Timeline {
    pub fn new(name: impl Into<String>) -> Self {
        Timeline {
            name: name.into(),
            events: BTreeMap::new(),
        }
    }

    pub fn from_events<I>(name: impl Into<String>, events: I) -> Self
    where
        I: IntoIterator<Item = (Timestamp, u64)>,
    {
        let mut t = Timeline::new(name);
        for (ts, n) in events {
            t.add(ts, n);
        }
        t
    }

    pub fn add(&mut self, ts: Timestamp, count: u64) {
        if count > 0 {
            *self.events.entry(ts).or_default() += count;
        }
    }

    pub fn merge(&mut self, other: &Timeline) {
        for (&ts, &n) in &other.events {
            self.add(ts, n);
        }
    }

    pub fn total(&self) -> u64 {
        self.events.values().sum()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }
}

/// Name → timeline, iterated in name order.
pub type Timelines = BTreeMap<String, Timeline>;

/// Accumulator for building timelines in parallel; merging is commutative
/// and associative.
#[derive(Clone, Debug, Default)]
pub struct TimelineBuilder {
    events: HashMap<String, HashMap<Timestamp, u64>>,
}

impl TimelineBuilder {
    pub fn add(&mut self, m: &Mention) {
        if m.count == 0 {
            return;
        }
        let per_name = match self.events.get_mut(m.name.as_str()) {
            Some(e) => e,
            None => self.events.entry(m.name.clone()).or_default(),
        };
        *per_name.entry(m.timestamp).or_default() += m.count;
    }

    pub fn merge(mut self, other: TimelineBuilder) -> Self {
        let (mut big, small) = if self.events.len() >= other.events.len() {
            (std::mem::take(&mut self.events), other.events)
        } else {
            (other.events, std::mem::take(&mut self.events))
        };
        for (name, evs) in small {
            let slot = big.entry(name).or_default();
            for (ts, n) in evs {
                *slot.entry(ts).or_default() += n;
            }
        }
        TimelineBuilder { events: big }
    }

    pub fn finish(self) -> Timelines {
        self.events
            .into_iter()
            .map(|(name, evs)| {
                let t = Timeline {
                    name: name.clone(),
                    events: evs.into_iter().collect(),
                };
                (name, t)
            })
            .collect()
    }
}

pub fn build_timelines<I>(mentions: I) -> Timelines
where
    I: IntoIterator<Item = Mention>,
{
    let mut b = TimelineBuilder::default();
    for m in mentions {
        b.add(&m);
    }
    b.finish()
}

/// Drops names mentioned fewer than `min_total` times.
pub fn basic_name_filter(timelines: Timelines, min_total: u64) -> Timelines {
    timelines
        .into_iter()
        .filter(|(_, t)| t.total() >= min_total)
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct YearlyCount {
    pub year: i32,
    pub name: String,
    pub count: u64,
}

/// Total mentions per (name, calendar year), sorted by (year, name).
pub fn yearly_counts(timelines: &Timelines) -> Vec<YearlyCount> {
    let mut out = Vec::new();
    for t in timelines.values() {
        let mut per_year: BTreeMap<i32, u64> = BTreeMap::new();
        for (ts, n) in &t.events {
            *per_year.entry(ts.year()).or_default() += n;
        }
        out.extend(per_year.into_iter().map(|(year, count)| YearlyCount {
            year,
            name: t.name.clone(),
            count,
        }));
    }
    out.sort();
    out
}

/// Each year's names ranked by count descending, ties by name ascending.
fn ranked_by_year(counts: &[YearlyCount]) -> BTreeMap<i32, Vec<&YearlyCount>> {
    let mut by_year: BTreeMap<i32, Vec<&YearlyCount>> = BTreeMap::new();
    for c in counts {
        by_year.entry(c.year).or_default().push(c);
    }
    for v in by_year.values_mut() {
        v.sort_by(|a, b| b.count.cmp(&a.count).then_with(|| a.name.cmp(&b.name)));
    }
    by_year
}

/// Union over years of each year's `k` most-mentioned names.
pub fn top_k_by_year(counts: &[YearlyCount], k: usize) -> BTreeSet<String> {
    ranked_by_year(counts)
        .values()
        .flat_map(|v| v.iter().take(k).map(|c| c.name.clone()))
        .collect()
}

/// A non-negative fraction `num / den`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Ratio {
    pub num: u64,
    pub den: u64,
}

impl Ratio {
    pub const PER_MILLE: Ratio = Ratio { num: 1, den: 1000 };

    pub fn new(num: u64, den: u64) -> Result<Self> {
        if den == 0 {
            return Err(Error::Config("ratio denominator is zero".into()));
        }
        Ok(Ratio { num, den })
    }

    /// `ceil(n * num / den)`.
    pub fn ceil_of(self, n: u64) -> u64 {
        (n as u128 * self.num as u128).div_ceil(self.den as u128) as u64
    }
}

/// Union over years of the top `ceil(n_y * frac)` names, where `n_y` is the
/// number of distinct names mentioned in year `y`.
pub fn top_frac_by_year(counts: &[YearlyCount], frac: Ratio) -> BTreeSet<String> {
    ranked_by_year(counts)
        .values()
        .flat_map(|v| {
            let take = frac.ceil_of(v.len() as u64) as usize;
            v.iter().take(take).map(|c| c.name.clone())
        })
        .collect()
}

pub fn restrict(timelines: &Timelines, names: &BTreeSet<String>) -> Timelines {
    timelines
        .iter()
        .filter(|(n, _)| names.contains(*n))
        .map(|(n, t)| (n.clone(), t.clone()))
        .collect()
}

/// `name<TAB>timestamp<TAB>multiplicity`, sorted by (name, timestamp).
pub fn timelines_tsv(timelines: &Timelines) -> String {
    let mut s = String::new();
    for t in timelines.values() {
        for (ts, n) in &t.events {
            writeln!(s, "{}\t{}\t{}", t.name, ts, n).unwrap();
        }
    }
    s
}

pub fn parse_timelines_tsv(text: &str) -> Result<Timelines> {
    let mut out = Timelines::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let bad = || Error::Data(format!("timeline line {}: {line:?}", i + 1));
        let mut f = line.split('\t');
        let (name, ts, n) = (
            f.next().ok_or_else(bad)?,
            f.next().ok_or_else(bad)?,
            f.next().ok_or_else(bad)?,
        );
        let ts = Timestamp::parse(ts)?;
        let n: u64 = n.parse().map_err(|_| bad())?;
        out.entry(name.to_string())
            .or_insert_with(|| Timeline::new(name))
            .add(ts, n);
    }
    Ok(out)
}
