use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use fame_core::corpus_io::{self, Document, Schema};
use fame_core::name_extract::RecognizerConfig;
use fame_core::peaks::{self, Method};
use fame_core::pipeline::{self, RunConfig};
use fame_core::report::{self, FixtureKind, NameFilter, StatsConfig};
use fame_core::sampler::{self, UnderfullPolicy};
use fame_core::stats::{self, BootstrapConfig, CohortWidth};
use fame_core::synth::{self, SynthSpec};
use fame_core::timeline::{self, Timelines};
use fame_core::{AnalysisWindow, Error, Result};

const FORMATS: &str = "\
File formats:
  documents (JSON lines), one object per line:
    pre-tagged  {\"id\": str, \"date\": str, \"mentions\": [[name, count], ...]}
    raw text    {\"id\": str, \"date\": str, \"text\": str}
    dates are YYYY-MM-DD or YYYY-MM-DDTHH:MM:SSZ; pre-tagged input may also be
    TSV lines `date<TAB>name<TAB>count`. More than 10% malformed lines is an error.
  timelines TSV      name<TAB>timestamp<TAB>count, sorted by name then time
  periods CSV        name,method,start,end,peak_date,duration_days
  sampling report    month,n_t,kept
  quantile series    bucket_start,width,n,p50,p90,p99 (bootstrapped: + lo/hi per column)
  cumulative curve   '# reference_slope=<alpha+1>' then x,count_greater
  fits JSON          {cohort: {alpha, d_min, n_tail, lo, hi, reps, seed}}
  summary CSV        method,filtering,period,p50,p90,p99,alpha; cells 'x (lo .. hi)'

Exit codes: 0 ok, 2 configuration error, 3 data error, 4 statistics error.";

#[derive(Parser)]
#[command(name = "fame", version, about = "Measure how long names stay in the news", after_long_help = FORMATS)]
struct Cli {
    /// Worker threads (default: all available cores).
    #[arg(long, global = true)]
    workers: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic pre-tagged corpus from a TOML spec.
    Synth {
        #[arg(long)]
        spec: PathBuf,
        /// Overrides the spec's seed.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Window-filter and sample documents to an even monthly volume.
    Sample {
        #[command(flatten)]
        input: InputArgs,
        /// Target documents per month; there is no default.
        #[arg(long)]
        n_min: u64,
        #[command(flatten)]
        sampling: SamplingArgs,
        #[arg(long)]
        seed: u64,
        /// Sampled documents (JSON lines).
        #[arg(long)]
        out: PathBuf,
        /// Sampling report CSV.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Extract per-name timelines from documents.
    Extract {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        recognizer: RecognizerArgs,
        #[arg(long)]
        out: PathBuf,
    },
    /// Detect fame periods for one method and name filter.
    Periods {
        /// Timelines TSV.
        #[arg(long)]
        timelines: PathBuf,
        #[arg(long)]
        window: AnalysisWindow,
        #[arg(long)]
        method: Method,
        #[arg(long, default_value = "all")]
        filter: NameFilter,
        #[arg(long, default_value_t = pipeline::DEFAULT_MIN_MENTIONS)]
        min_mentions: u64,
        #[arg(long, default_value_t = pipeline::DEFAULT_MIN_DURATION)]
        min_duration: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Quantile series, cumulative curves, fits and summary rows for one periods CSV.
    Stats {
        #[arg(long)]
        periods: PathBuf,
        #[arg(long)]
        method: Method,
        #[arg(long, default_value = "all")]
        filter: NameFilter,
        #[arg(long)]
        seed: u64,
        #[command(flatten)]
        stats: StatsArgs,
        #[arg(long)]
        out_dir: PathBuf,
    },
    /// Merge summary CSVs into one table (CSV and aligned text).
    Report {
        #[arg(required = true)]
        summaries: Vec<PathBuf>,
        #[arg(long)]
        out_dir: PathBuf,
    },
    /// Full run: sample, extract, detect, summarize.
    Run {
        #[command(flatten)]
        input: InputArgs,
        /// Target documents per month; there is no default.
        #[arg(long, required_unless_present = "no_sample")]
        n_min: Option<u64>,
        #[command(flatten)]
        sampling: SamplingArgs,
        /// Skip sampling (the corpus already has an even volume).
        #[arg(long, conflicts_with = "n_min")]
        no_sample: bool,
        #[command(flatten)]
        recognizer: RecognizerArgs,
        #[arg(long)]
        seed: u64,
        #[arg(long = "method", value_delimiter = ',', default_values = ["spike", "continuity"])]
        methods: Vec<Method>,
        #[arg(long = "filter", value_delimiter = ',', default_values = ["all", "top-1000", "top-0.1%"])]
        filters: Vec<NameFilter>,
        #[arg(long, default_value_t = pipeline::DEFAULT_MIN_MENTIONS)]
        min_mentions: u64,
        #[arg(long, default_value_t = pipeline::DEFAULT_MIN_DURATION)]
        min_duration: f64,
        #[command(flatten)]
        stats: StatsArgs,
        #[arg(long)]
        out_dir: PathBuf,
    },
    /// Write a bundled timeline on which the two methods disagree.
    Fixture {
        kind: FixtureKind,
        /// Timelines TSV; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct InputArgs {
    /// Document files (JSON lines or TSV).
    #[arg(required = true)]
    inputs: Vec<PathBuf>,
    #[arg(long, default_value = "pre-tagged")]
    schema: Schema,
    #[arg(long)]
    window: AnalysisWindow,
}

#[derive(Args)]
struct SamplingArgs {
    /// What to do with months that have fewer than n_min documents.
    #[arg(long, default_value = "drop-month")]
    underfull: UnderfullPolicy,
}

#[derive(Args)]
struct RecognizerArgs {
    /// Given names, one per line; required for raw-text input.
    #[arg(long)]
    gazetteer: Option<PathBuf>,
    #[arg(long, requires = "gazetteer")]
    honorifics: Option<PathBuf>,
    #[arg(long, requires = "gazetteer")]
    stop_words: Option<PathBuf>,
}

#[derive(Args)]
struct StatsArgs {
    #[arg(long, default_value_t = stats::DEFAULT_REPS)]
    reps: usize,
    #[arg(long, default_value_t = stats::DEFAULT_LEVEL)]
    level: f64,
    #[arg(long, default_value_t = stats::DEFAULT_TAIL_QUANTILE)]
    tail_quantile: f64,
    /// Cohort width of the bootstrapped summary, e.g. 5y or 3m.
    #[arg(long, default_value = "5y")]
    cohort: CohortWidth,
}

impl StatsArgs {
    fn config(&self) -> Result<StatsConfig> {
        if !(self.tail_quantile > 0.0 && self.tail_quantile < 1.0) {
            return Err(Error::Config("tail quantile must lie in (0, 1)".into()));
        }
        Ok(StatsConfig {
            tail_quantile: self.tail_quantile,
            bootstrap: BootstrapConfig::new(self.reps, self.level, 0)?,
            summary_width: self.cohort,
            ..StatsConfig::default()
        })
    }
}

impl RecognizerArgs {
    fn load(&self) -> Result<Option<RecognizerConfig>> {
        self.gazetteer
            .as_deref()
            .map(|g| {
                RecognizerConfig::from_files(
                    g,
                    self.honorifics.as_deref(),
                    self.stop_words.as_deref(),
                )
            })
            .transpose()
    }
}

fn read_inputs(input: &InputArgs) -> Result<Vec<Document>> {
    let mut docs = Vec::new();
    for path in &input.inputs {
        docs.extend(corpus_io::read_all(path, input.schema)?.0);
    }
    Ok(docs)
}

fn write(path: &Path, bytes: impl AsRef<[u8]>) -> Result<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(|e| io_error(parent, e))?;
    }
    fs::write(path, bytes).map_err(|e| io_error(path, e))
}

fn io_error(path: &Path, source: io::Error) -> Error {
    Error::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| io_error(path, e))
}

fn documents_bytes(docs: &[Document]) -> Vec<u8> {
    let mut out = Vec::new();
    corpus_io::write_documents(&mut out, docs).expect("writing to memory");
    out
}

fn stats_outputs(r: &report::FilterReport, cfg: &StatsConfig) -> Vec<(PathBuf, String)> {
    let mut files: Vec<(PathBuf, String)> = r
        .series
        .iter()
        .map(|(w, csv)| (format!("quantiles_{w}.csv").into(), csv.clone()))
        .collect();
    files.push((
        format!("quantiles_{}_bootstrap.csv", cfg.summary_width).into(),
        r.bootstrapped_series.clone(),
    ));
    for (label, csv) in &r.cumulative {
        files.push((
            Path::new("cumulative").join(format!("{label}.csv")),
            csv.clone(),
        ));
    }
    files.push(("fits.json".into(), r.fits_json.clone()));
    files.push(("summary.csv".into(), report::summary_csv(&r.rows)));
    files
}

fn run(cli: Cli) -> Result<String> {
    if let Some(n) = cli.workers {
        if n == 0 {
            return Err(Error::Config("--workers must be at least 1".into()));
        }
        fame_core::par::set_workers(n);
    }
    match cli.command {
        Command::Synth { spec, seed, out } => {
            let mut spec = SynthSpec::from_toml(&read_text(&spec)?)?;
            if let Some(s) = seed {
                spec.seed = s;
            }
            let docs = synth::generate_corpus(&spec)?;
            write(&out, documents_bytes(&docs))?;
            Ok(format!(
                "{} documents written to {}",
                docs.len(),
                out.display()
            ))
        }
        Command::Sample {
            input,
            n_min,
            sampling,
            seed,
            out,
            report,
        } => {
            if n_min == 0 {
                return Err(Error::Config("--n-min must be at least 1".into()));
            }
            let docs = read_inputs(&input)?;
            let (kept, rows) =
                pipeline::sample_documents(docs, input.window, n_min, sampling.underfull, seed)?;
            write(&out, documents_bytes(&kept))?;
            if let Some(path) = report {
                write(&path, sampler::report_csv(&rows))?;
            }
            Ok(format!("{} documents kept", kept.len()))
        }
        Command::Extract {
            input,
            recognizer,
            out,
        } => {
            let docs: Vec<Document> =
                corpus_io::window_filter(read_inputs(&input)?, input.window).collect();
            let timelines = pipeline::extract_timelines(&docs, recognizer.load()?.as_ref())?;
            write(&out, timeline::timelines_tsv(&timelines))?;
            Ok(format!(
                "{} names written to {}",
                timelines.len(),
                out.display()
            ))
        }
        Command::Periods {
            timelines,
            window,
            method,
            filter,
            min_mentions,
            min_duration,
            out,
        } => {
            let all: Timelines = timeline::parse_timelines_tsv(&read_text(&timelines)?)?;
            let kept = timeline::basic_name_filter(all, min_mentions);
            let selected = timeline::restrict(&kept, &pipeline::name_set(&kept, filter));
            let periods = pipeline::detect_periods(&selected, method, &window, min_duration);
            write(&out, peaks::periods_csv(&periods))?;
            Ok(format!(
                "{} periods written to {}",
                periods.len(),
                out.display()
            ))
        }
        Command::Stats {
            periods,
            method,
            filter,
            seed,
            stats,
            out_dir,
        } => {
            let cfg = stats.config()?;
            let all = peaks::parse_periods_csv(&read_text(&periods)?)?;
            if let Some(p) = all.iter().find(|p| p.method != method) {
                return Err(Error::Data(format!(
                    "{}: period for {} uses method {}",
                    periods.display(),
                    p.name,
                    p.method
                )));
            }
            let r = report::summarize(&all, method, filter, &cfg, seed)?;
            let files = stats_outputs(&r, &cfg);
            for (rel, text) in &files {
                write(&out_dir.join(rel), text)?;
            }
            Ok(report::summary_text(&r.rows))
        }
        Command::Report { summaries, out_dir } => {
            let mut rows = Vec::new();
            for path in &summaries {
                rows.extend(report::parse_summary_csv(&read_text(path)?)?);
            }
            write(&out_dir.join("summary.csv"), report::summary_csv(&rows))?;
            let text = report::summary_text(&rows);
            write(&out_dir.join("summary.txt"), &text)?;
            Ok(text)
        }
        Command::Run {
            input,
            n_min,
            sampling,
            no_sample,
            recognizer,
            seed,
            methods,
            filters,
            min_mentions,
            min_duration,
            stats,
            out_dir,
        } => {
            let cfg = RunConfig {
                window: input.window,
                n_min: if no_sample { None } else { n_min },
                underfull_policy: sampling.underfull,
                seed,
                schema: input.schema,
                recognizer: recognizer.load()?,
                methods: dedup(methods),
                filters: dedup(filters),
                min_mentions,
                min_duration,
                stats: stats.config()?,
            };
            let analysis = pipeline::run_pipeline(&cfg, &input.inputs, &out_dir)?;
            Ok(report::summary_text(&analysis.summary_rows()))
        }
        Command::Fixture { kind, out } => {
            let t = report::fixture_timeline(kind);
            let tsv = timeline::timelines_tsv(&Timelines::from([(t.name.clone(), t)]));
            match out {
                Some(path) => {
                    write(&path, tsv)?;
                    Ok(format!("fixture written to {}", path.display()))
                }
                None => Ok(tsv.trim_end().to_string()),
            }
        }
    }
}

fn dedup<T: PartialEq>(items: Vec<T>) -> Vec<T> {
    let mut out: Vec<T> = Vec::with_capacity(items.len());
    for i in items {
        if !out.contains(&i) {
            out.push(i);
        }
    }
    out
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(msg) => {
            let _ = writeln!(io::stdout(), "{msg}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("fame: error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
