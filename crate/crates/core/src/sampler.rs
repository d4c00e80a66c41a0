//! Per-month volume normalization.
//!
//! Each document in month `t` is kept with probability `min(1, n_min / n_t)`,
//! so every sufficiently full month contributes `n_min` documents in
//! expectation. The coin for a document is keyed by `(seed, id)`, which makes
//! the kept set independent of input order and of how the input is split.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::str::FromStr;

use crate::corpus_io::Document;
use crate::error::{Error, Result};
use crate::par;
use crate::seeding;
use crate::time::Month;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MonthVolume {
    pub month: Month,
    pub n_t: u64,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum UnderfullPolicy {
    #[default]
    DropMonth,
    KeepAll,
    Fail,
}

impl FromStr for UnderfullPolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "drop-month" | "drop" => Ok(UnderfullPolicy::DropMonth),
            "keep-all" | "keep" => Ok(UnderfullPolicy::KeepAll),
            "fail" => Ok(UnderfullPolicy::Fail),
            other => Err(Error::Config(format!("unknown underfull policy {other:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SamplerConfig {
    pub n_min: u64,
    pub seed: u64,
    pub underfull_policy: UnderfullPolicy,
}

impl SamplerConfig {
    pub fn new(n_min: u64, seed: u64) -> Result<Self> {
        if n_min == 0 {
            return Err(Error::Config("n_min must be at least 1".into()));
        }
        Ok(SamplerConfig {
            n_min,
            seed,
            underfull_policy: UnderfullPolicy::default(),
        })
    }
}

/// Document counts per month, ascending by month.
pub fn month_volumes<'a, I>(docs: I) -> Vec<MonthVolume>
where
    I: IntoIterator<Item = &'a Document>,
{
    let mut counts: BTreeMap<Month, u64> = BTreeMap::new();
    for d in docs {
        *counts.entry(d.timestamp.month()).or_default() += 1;
    }
    counts
        .into_iter()
        .map(|(month, n_t)| MonthVolume { month, n_t })
        .collect()
}

/// Keep probabilities per month, validated against the underfull policy.
#[derive(Clone, Debug)]
pub struct Sampler {
    cfg: SamplerConfig,
    probability: BTreeMap<Month, f64>,
}

impl Sampler {
    pub fn new(volumes: &[MonthVolume], cfg: SamplerConfig) -> Result<Self> {
        if cfg.n_min == 0 {
            return Err(Error::Config("n_min must be at least 1".into()));
        }
        let mut probability = BTreeMap::new();
        for v in volumes {
            let p = if v.n_t >= cfg.n_min {
                cfg.n_min as f64 / v.n_t as f64
            } else {
                match cfg.underfull_policy {
                    UnderfullPolicy::DropMonth => 0.0,
                    UnderfullPolicy::KeepAll => 1.0,
                    UnderfullPolicy::Fail => {
                        return Err(Error::UnderfullMonth {
                            month: v.month,
                            n_t: v.n_t,
                            n_min: cfg.n_min,
                        })
                    }
                }
            };
            probability.insert(v.month, p);
        }
        Ok(Sampler { cfg, probability })
    }

    pub fn keep_probability(&self, month: Month) -> Option<f64> {
        self.probability.get(&month).copied()
    }

    pub fn keeps(&self, doc: &Document) -> Result<bool> {
        let p = self
            .keep_probability(doc.timestamp.month())
            .ok_or_else(|| {
                Error::Data(format!(
                    "document {} is in month {} which has no volume entry",
                    doc.id,
                    doc.timestamp.month()
                ))
            })?;
        Ok(p >= 1.0 || seeding::unit_interval(self.cfg.seed, &doc.id) < p)
    }
}

pub fn sample_uniform(
    docs: Vec<Document>,
    volumes: &[MonthVolume],
    cfg: SamplerConfig,
) -> Result<Vec<Document>> {
    let sampler = Sampler::new(volumes, cfg)?;
    let keep = par::map(&docs, |d| sampler.keeps(d));
    let mut out = Vec::with_capacity(docs.len());
    for (doc, k) in docs.into_iter().zip(keep) {
        if k? {
            out.push(doc);
        }
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SampleReportRow {
    pub month: Month,
    pub n_t: u64,
    pub kept: u64,
}

pub fn sampling_report(volumes: &[MonthVolume], kept: &[Document]) -> Vec<SampleReportRow> {
    let kept_by_month: BTreeMap<Month, u64> = month_volumes(kept)
        .into_iter()
        .map(|v| (v.month, v.n_t))
        .collect();
    volumes
        .iter()
        .map(|v| SampleReportRow {
            month: v.month,
            n_t: v.n_t,
            kept: kept_by_month.get(&v.month).copied().unwrap_or(0),
        })
        .collect()
}

/// `month,n_t,kept` CSV.
pub fn report_csv(rows: &[SampleReportRow]) -> String {
    let mut s = String::from("month,n_t,kept\n");
    for r in rows {
        writeln!(s, "{},{},{}", r.month, r.n_t, r.kept).unwrap();
    }
    s
}
