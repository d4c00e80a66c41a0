//! End-to-end runs: documents in, report directory out.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::corpus_io::{self, Content, Document, Schema};
use crate::error::{Error, Result};
use crate::name_extract::{mentions_of, RecognizerConfig};
use crate::par;
use crate::peaks::{self, FamePeriod, Method, WeekGrid};
use crate::report::{self, FilterReport, NameFilter, StatsConfig, SummaryRow};
use crate::sampler::{self, SampleReportRow, SamplerConfig, UnderfullPolicy};
use crate::seeding;
use crate::stats::BootstrapConfig;
use crate::time::AnalysisWindow;
use crate::timeline::{self, TimelineBuilder, Timelines};

pub const DEFAULT_MIN_MENTIONS: u64 = 10;
pub const DEFAULT_MIN_DURATION: f64 = 2.0;

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub window: AnalysisWindow,
    /// Per-month sampling target; `None` skips sampling entirely.
    pub n_min: Option<u64>,
    pub underfull_policy: UnderfullPolicy,
    pub seed: u64,
    pub schema: Schema,
    /// Required when any input document carries raw text.
    pub recognizer: Option<RecognizerConfig>,
    pub methods: Vec<Method>,
    pub filters: Vec<NameFilter>,
    pub min_mentions: u64,
    pub min_duration: f64,
    pub stats: StatsConfig,
}

impl RunConfig {
    pub fn new(window: AnalysisWindow, n_min: u64, seed: u64) -> Self {
        RunConfig {
            window,
            n_min: Some(n_min),
            underfull_policy: UnderfullPolicy::DropMonth,
            seed,
            schema: Schema::PreTagged,
            recognizer: None,
            methods: Method::ALL.to_vec(),
            filters: NameFilter::DEFAULTS.to_vec(),
            min_mentions: DEFAULT_MIN_MENTIONS,
            min_duration: DEFAULT_MIN_DURATION,
            stats: StatsConfig::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.methods.is_empty() {
            return Err(Error::Config("select at least one method".into()));
        }
        if self.filters.is_empty() {
            return Err(Error::Config("select at least one name filter".into()));
        }
        if self.n_min == Some(0) {
            return Err(Error::Config("n_min must be at least 1".into()));
        }
        if !(self.stats.tail_quantile > 0.0 && self.stats.tail_quantile < 1.0) {
            return Err(Error::Config("tail quantile must lie in (0, 1)".into()));
        }
        BootstrapConfig::new(self.stats.bootstrap.reps, self.stats.bootstrap.level, 0)?;
        if let Some(r) = &self.recognizer {
            r.validate()?;
        }
        Ok(())
    }

    pub fn grid(&self) -> WeekGrid {
        WeekGrid::for_window(&self.window)
    }
}

/// Everything computed from one corpus.
#[derive(Clone, Debug)]
pub struct Analysis {
    pub sampling: Option<Vec<SampleReportRow>>,
    pub documents: usize,
    pub timelines: Timelines,
    /// Persisted periods CSV per method, before name filtering.
    pub periods_csv: BTreeMap<Method, String>,
    pub reports: Vec<FilterReport>,
}

impl Analysis {
    pub fn summary_rows(&self) -> Vec<SummaryRow> {
        self.reports
            .iter()
            .flat_map(|r| r.rows.iter().cloned())
            .collect()
    }
}

pub fn name_set(timelines: &Timelines, filter: NameFilter) -> BTreeSet<String> {
    match filter {
        NameFilter::All => timelines.keys().cloned().collect(),
        NameFilter::TopK(k) => timeline::top_k_by_year(&timeline::yearly_counts(timelines), k),
        NameFilter::TopFrac(r) => {
            timeline::top_frac_by_year(&timeline::yearly_counts(timelines), r)
        }
    }
}

/// Window filter then per-month sampling; the sampler seed derives from `seed`.
pub fn sample_documents(
    docs: Vec<Document>,
    window: AnalysisWindow,
    n_min: u64,
    policy: UnderfullPolicy,
    seed: u64,
) -> Result<(Vec<Document>, Vec<SampleReportRow>)> {
    let docs: Vec<Document> = corpus_io::window_filter(docs, window).collect();
    let volumes = sampler::month_volumes(&docs);
    let cfg = SamplerConfig {
        n_min,
        seed: seeding::derive(seed, &["sample"]),
        underfull_policy: policy,
    };
    let kept = sampler::sample_uniform(docs, &volumes, cfg)?;
    let rows = sampler::sampling_report(&volumes, &kept);
    Ok((kept, rows))
}

/// Mentions of every document folded into per-name timelines.
pub fn extract_timelines(
    docs: &[Document],
    recognizer: Option<&RecognizerConfig>,
) -> Result<Timelines> {
    let fallback;
    let recognizer = match recognizer {
        Some(r) => r,
        None if docs.iter().any(|d| matches!(d.content, Content::Text(_))) => {
            return Err(Error::Config(
                "raw-text input needs a given-name gazetteer".into(),
            ))
        }
        None => {
            fallback = RecognizerConfig::with_gazetteer(["-"]);
            &fallback
        }
    };
    let builder = par::fold_reduce(
        docs,
        TimelineBuilder::default,
        |mut b, d| {
            for m in mentions_of(d, recognizer) {
                b.add(&m);
            }
            b
        },
        TimelineBuilder::merge,
    );
    Ok(builder.finish())
}

/// One period per timeline, then the window-end and minimum-duration filter.
pub fn detect_periods(
    timelines: &Timelines,
    method: Method,
    window: &AnalysisWindow,
    min_duration: f64,
) -> Vec<FamePeriod> {
    let grid = WeekGrid::for_window(window);
    let all: Vec<&timeline::Timeline> = timelines.values().collect();
    let detected = par::map(&all, |t| peaks::detect(t, method, &grid));
    peaks::period_filter(detected, window, min_duration)
}

/// Windowed documents → sampled → timelines → periods → reports.
pub fn analyze(cfg: &RunConfig, docs: Vec<Document>) -> Result<Analysis> {
    cfg.validate()?;
    let (docs, sampling) = match cfg.n_min {
        Some(n_min) => {
            let (kept, rows) =
                sample_documents(docs, cfg.window, n_min, cfg.underfull_policy, cfg.seed)?;
            (kept, Some(rows))
        }
        None => (corpus_io::window_filter(docs, cfg.window).collect(), None),
    };
    let timelines = timeline::basic_name_filter(
        extract_timelines(&docs, cfg.recognizer.as_ref())?,
        cfg.min_mentions,
    );
    let name_sets: Vec<(NameFilter, BTreeSet<String>)> = cfg
        .filters
        .iter()
        .map(|&f| (f, name_set(&timelines, f)))
        .collect();

    let mut periods_csv = BTreeMap::new();
    let mut reports = Vec::new();
    for &method in &cfg.methods {
        let kept = detect_periods(&timelines, method, &cfg.window, cfg.min_duration);
        for (filter, names) in &name_sets {
            let subset: Vec<FamePeriod> = kept
                .iter()
                .filter(|p| names.contains(&p.name))
                .cloned()
                .collect();
            // statistics come from the persisted form so they can be recomputed from it
            let persisted = peaks::parse_periods_csv(&peaks::periods_csv(&subset))?;
            reports.push(report::summarize(
                &persisted, method, *filter, &cfg.stats, cfg.seed,
            )?);
        }
        periods_csv.insert(method, peaks::periods_csv(&kept));
    }
    Ok(Analysis {
        sampling,
        documents: docs.len(),
        timelines,
        periods_csv,
        reports,
    })
}

/// Summary rows recomputed from a persisted periods CSV.
pub fn recompute_rows(
    periods_csv: &str,
    method: Method,
    filter: NameFilter,
    names: Option<&BTreeSet<String>>,
    stats: &StatsConfig,
    seed: u64,
) -> Result<Vec<SummaryRow>> {
    let periods: Vec<FamePeriod> = peaks::parse_periods_csv(periods_csv)?
        .into_iter()
        .filter(|p| p.method == method && names.is_none_or(|n| n.contains(&p.name)))
        .collect();
    Ok(report::summarize(&periods, method, filter, stats, seed)?.rows)
}

#[derive(Serialize)]
struct ManifestInput {
    path: String,
    bytes: u64,
    sha256: String,
}

#[derive(Serialize)]
struct ManifestConfig {
    window: String,
    n_min: Option<u64>,
    underfull_policy: String,
    seed: u64,
    schema: String,
    methods: Vec<String>,
    filters: Vec<String>,
    min_mentions: u64,
    min_duration: f64,
    tail_quantile: f64,
    bootstrap_reps: usize,
    bootstrap_level: f64,
    series_widths: Vec<String>,
    summary_width: String,
    week_grid_origin: String,
}

#[derive(Serialize)]
struct Manifest {
    config: ManifestConfig,
    inputs: Vec<ManifestInput>,
    documents_after_sampling: usize,
    names_after_basic_filter: usize,
    artifacts: Vec<String>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Output files of a run as (relative path, contents).
pub fn artifacts(
    cfg: &RunConfig,
    analysis: &Analysis,
    inputs: &[(String, Vec<u8>)],
) -> Vec<(PathBuf, Vec<u8>)> {
    let mut out: Vec<(PathBuf, Vec<u8>)> = Vec::new();
    if let Some(rows) = &analysis.sampling {
        out.push((
            "sampling_report.csv".into(),
            sampler::report_csv(rows).into_bytes(),
        ));
    }
    for (method, csv) in &analysis.periods_csv {
        out.push((
            format!("periods_{method}.csv").into(),
            csv.clone().into_bytes(),
        ));
    }
    for r in &analysis.reports {
        let dir = PathBuf::from(format!("{}_{}", r.method, r.filter.slug()));
        let subset_csv = {
            let all =
                peaks::parse_periods_csv(&analysis.periods_csv[&r.method]).unwrap_or_default();
            let names = name_set(&analysis.timelines, r.filter);
            let subset: Vec<_> = all
                .into_iter()
                .filter(|p| names.contains(&p.name))
                .collect();
            peaks::periods_csv(&subset)
        };
        out.push((dir.join("periods.csv"), subset_csv.into_bytes()));
        for (w, csv) in &r.series {
            out.push((
                dir.join(format!("quantiles_{w}.csv")),
                csv.clone().into_bytes(),
            ));
        }
        out.push((
            dir.join(format!(
                "quantiles_{}_bootstrap.csv",
                cfg.stats.summary_width
            )),
            r.bootstrapped_series.clone().into_bytes(),
        ));
        for (label, csv) in &r.cumulative {
            out.push((
                dir.join("cumulative").join(format!("{label}.csv")),
                csv.clone().into_bytes(),
            ));
        }
        out.push((dir.join("fits.json"), r.fits_json.clone().into_bytes()));
    }
    let rows = analysis.summary_rows();
    out.push((
        "summary.csv".into(),
        report::summary_csv(&rows).into_bytes(),
    ));
    out.push((
        "summary.txt".into(),
        report::summary_text(&rows).into_bytes(),
    ));

    let manifest = Manifest {
        config: ManifestConfig {
            window: cfg.window.to_string(),
            n_min: cfg.n_min,
            underfull_policy: format!("{:?}", cfg.underfull_policy),
            seed: cfg.seed,
            schema: format!("{:?}", cfg.schema),
            methods: cfg.methods.iter().map(|m| m.to_string()).collect(),
            filters: cfg.filters.iter().map(|f| f.to_string()).collect(),
            min_mentions: cfg.min_mentions,
            min_duration: cfg.min_duration,
            tail_quantile: cfg.stats.tail_quantile,
            bootstrap_reps: cfg.stats.bootstrap.reps,
            bootstrap_level: cfg.stats.bootstrap.level,
            series_widths: cfg
                .stats
                .series_widths
                .iter()
                .map(|w| w.to_string())
                .collect(),
            summary_width: cfg.stats.summary_width.to_string(),
            week_grid_origin: cfg.grid().origin().to_string(),
        },
        inputs: inputs
            .iter()
            .map(|(path, bytes)| ManifestInput {
                path: path.clone(),
                bytes: bytes.len() as u64,
                sha256: sha256_hex(bytes),
            })
            .collect(),
        documents_after_sampling: analysis.documents,
        names_after_basic_filter: analysis.timelines.len(),
        artifacts: out
            .iter()
            .map(|(p, _)| p.to_string_lossy().replace('\\', "/"))
            .collect(),
    };
    let mut m = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    m.push('\n');
    out.push(("manifest.json".into(), m.into_bytes()));
    out
}

/// Writes all files or none: on failure, files written so far are removed.
pub fn write_artifacts(out_dir: &Path, files: &[(PathBuf, Vec<u8>)]) -> Result<()> {
    let mut written: Vec<PathBuf> = Vec::new();
    let result = (|| {
        for (rel, bytes) in files {
            let path = out_dir.join(rel);
            if let Some(parent) = path.parent() {
                fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
            }
            fs::write(&path, bytes).map_err(|e| Error::io(&path, e))?;
            written.push(path);
        }
        Ok(())
    })();
    if result.is_err() {
        for p in &written {
            let _ = fs::remove_file(p);
        }
    }
    result
}

/// (path, raw bytes) of each input, kept for the manifest digests.
type RawInputs = Vec<(String, Vec<u8>)>;

fn load_inputs(cfg: &RunConfig, inputs: &[PathBuf]) -> Result<(Vec<Document>, RawInputs)> {
    let loaded = par::map(inputs, |path| -> Result<(Vec<Document>, Vec<u8>)> {
        let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
        let mut reader = corpus_io::DocumentReader::new(bytes.as_slice(), cfg.schema, path);
        let docs = reader.by_ref().collect::<Result<Vec<_>>>()?;
        reader.finish()?;
        Ok((docs, bytes))
    });
    let mut docs = Vec::new();
    let mut digests = Vec::new();
    for (path, r) in inputs.iter().zip(loaded) {
        let (d, bytes) = r?;
        docs.extend(d);
        digests.push((path.to_string_lossy().into_owned(), bytes));
    }
    Ok((docs, digests))
}

/// Reads `inputs`, analyzes them and writes the report directory.
pub fn run_pipeline(cfg: &RunConfig, inputs: &[PathBuf], out_dir: &Path) -> Result<Analysis> {
    cfg.validate()?;
    let (docs, raw_inputs) = load_inputs(cfg, inputs)?;
    let analysis = analyze(cfg, docs)?;
    let files = artifacts(cfg, &analysis, &raw_inputs);
    write_artifacts(out_dir, &files)?;
    Ok(analysis)
}
