//! Results must not depend on how many workers run them.

use fame_core::pipeline::{self, RunConfig};
use fame_core::stats::{self, BootstrapConfig, Statistic};
use fame_core::synth::{self, NameProfile, Segment, SynthSpec, VolumeSchedule, VolumeUnit};
use fame_core::AnalysisWindow;

fn pool(n: usize) -> rayon::ThreadPool {
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build()
        .unwrap()
}

fn spec() -> SynthSpec {
    let window = AnalysisWindow::parse("1930-01..1931-01").unwrap();
    let d = |s: &str| chrono::NaiveDate::parse_from_str(s, "%Y-%m-%d").unwrap();
    let profiles = (0..40)
        .map(|i| {
            let start = d("1930-01-06") + chrono::Days::new(7 * i);
            NameProfile {
                name: format!("Person Number{i}"),
                segments: vec![Segment {
                    start,
                    end: start + chrono::Days::new(3 + 2 * i),
                    p: 0.1,
                }],
            }
        })
        .collect();
    SynthSpec {
        profiles,
        volume: VolumeSchedule::constant(d("1930-01-01"), d("1931-01-01"), 40, VolumeUnit::Day),
        window,
        seed: 5,
    }
}

#[test]
fn synth_and_analysis_match_across_pools() {
    let s = spec();
    let mut cfg = RunConfig::new(s.window, 900, 8);
    cfg.stats.bootstrap = BootstrapConfig::new(300, 0.99, 0).unwrap();
    let run = |n: usize| {
        pool(n).install(|| {
            let docs = synth::generate_corpus(&s).unwrap();
            let a = pipeline::analyze(&cfg, docs.clone()).unwrap();
            (docs, a.summary_rows(), a.periods_csv)
        })
    };
    assert_eq!(run(1), run(4));
}

#[test]
fn bootstrap_matches_across_pools() {
    let v: Vec<f64> = (0..400).map(|i| (2 + (i * 37) % 101) as f64).collect();
    let st = [
        Statistic::Quantile(0.5),
        Statistic::Quantile(0.99),
        Statistic::PowerLawAlpha { tail_quantile: 0.8 },
    ];
    let cfg = BootstrapConfig::new(500, 0.99, 3).unwrap();
    let one = pool(1).install(|| stats::bootstrap_many(&v, &st, cfg).unwrap());
    let many = pool(3).install(|| stats::bootstrap_many(&v, &st, cfg).unwrap());
    assert_eq!(format!("{one:?}"), format!("{many:?}"));
}
