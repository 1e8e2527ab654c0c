//! The repetition protocol: every configured algorithm runs `repetitions`
//! times against a fresh objective, each with its own derived seed, and the
//! results are written as a bundle of CSV, JSON and SVG files.
//!
//! Bundle layout (inside `output_dir`):
//!
//! - `runs.csv`: `algo,rep,seed,evals_used,best_kwh,x1..xn,status,error`
//! - `metrics.csv`: `algo,rep,success_rate_pct,effort_evals,effort_censored,best_kwh,ape_pct,mape_pct`;
//!   one row per successful run plus one `rep = all` row per algorithm with
//!   the MAPE
//! - `summary.csv`: `algo,measure,min,q1,median,q3,max,mean,std`
//! - `traces/<algo>_<rep>.csv`: `index,x1..xn,f_kwh,best_so_far_kwh`
//! - `metadata.json`: resolved config, benchmark, seeds, tool version
//! - `boxplot_<measure>.svg` for each of the three measures
//!
//! Repetition indices start at 0. Everything except the timestamp in
//! `metadata.json` depends only on the resolved configuration.

use std::fs;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use serde::Serialize;
use serde_json::json;
use shapebench_core::metrics::{ape, computational_effort, mape, success_rate};
use shapebench_core::optim::{run_ga, run_gs, run_rs, AlgorithmKind};
use shapebench_core::seed::{derive_run_seed, DERIVATION};
use shapebench_core::{
    boxplot_stats, estimate_benchmark, Benchmark, BenchmarkMethod, BenchmarkSource, BoxplotStats,
    Counting, Effort, EnergyKwh, EvalError, Memoized, Objective, RunTrace, SpaceSpec, Synthetic,
};

use crate::config::{
    AlgorithmConfig, AlgorithmSpec, BenchmarkSpec, ExperimentConfig, ObjectiveSpec,
};
use crate::error::{Error, Result};
use crate::external::ExternalObjective;
use crate::output::{boxplot_svg, component_headers, fmt_f64, write_csv, write_text, write_trace};

/// The three summarised measures, in output order.
pub const MEASURES: [&str; 3] = ["success_rate_pct", "ape_pct", "effort_evals"];

pub type DynObjective = Box<dyn Objective + Send>;

/// A fresh objective handle as described by the configuration.
pub fn make_objective(spec: &ObjectiveSpec) -> Result<DynObjective, EvalError> {
    Ok(match spec {
        ObjectiveSpec::Synthetic(p) => Box::new(Synthetic::new(p.clone())),
        ObjectiveSpec::External(cfg) => Box::new(ExternalObjective::spawn(cfg.clone())?),
    })
}

/// Reference minimum plus, for noise-free synthetic objectives estimated some
/// other way, the analytic minimum for comparison.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchmarkEstimate {
    pub benchmark: Benchmark,
    pub analytic_cross_check: Option<CrossCheck>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CrossCheck {
    pub analytic_y_star: f64,
    pub agrees_exactly: bool,
}

pub fn benchmark_method(spec: &BenchmarkSpec) -> Option<BenchmarkMethod> {
    match spec {
        BenchmarkSpec::LongGa { ga, seed } => Some(BenchmarkMethod::LongGa {
            cfg: *ga,
            seed: *seed,
        }),
        BenchmarkSpec::ExhaustiveGrid => Some(BenchmarkMethod::ExhaustiveGrid),
        BenchmarkSpec::Analytic => Some(BenchmarkMethod::Analytic),
        BenchmarkSpec::Fixed { .. } => None,
    }
}

pub fn estimate(cfg: &ExperimentConfig) -> Result<BenchmarkEstimate> {
    let benchmark = match (&cfg.benchmark, benchmark_method(&cfg.benchmark)) {
        (BenchmarkSpec::Fixed { y_star, x_star }, _) => Benchmark {
            y_star: EnergyKwh::new(*y_star).map_err(shapebench_core::Error::from)?,
            x_star: x_star.clone(),
            source: BenchmarkSource::Supplied,
            evals_used: 0,
        },
        (_, Some(method)) => {
            estimate_benchmark(&cfg.space, || make_objective(&cfg.objective), &method)?
        }
        (_, None) => unreachable!("only fixed benchmarks lack a method"),
    };
    let analytic_cross_check = match &cfg.objective {
        ObjectiveSpec::Synthetic(p)
            if p.noise_sigma == 0.0 && benchmark.source != BenchmarkSource::Analytic =>
        {
            let y = p.baseline;
            Some(CrossCheck {
                analytic_y_star: y,
                agrees_exactly: benchmark.y_star.value() == y,
            })
        }
        _ => None,
    };
    if benchmark.y_star.value() <= 0.0 {
        return Err(Error::Core(shapebench_core::Error::Contract(format!(
            "benchmark minimum must be > 0 for relative metrics, got {}",
            benchmark.y_star
        ))));
    }
    Ok(BenchmarkEstimate {
        benchmark,
        analytic_cross_check,
    })
}

/// One algorithm repetition.
#[derive(Debug, Clone)]
pub struct RunRecord {
    pub label: String,
    pub kind: AlgorithmKind,
    pub rep: usize,
    pub seed: u64,
    pub result: std::result::Result<RunTrace, String>,
    /// Evaluations answered from the cache, when memoization is on.
    pub cache_hits: Option<u64>,
}

fn dispatch<O: Objective + ?Sized>(
    algo: &AlgorithmConfig,
    space: &SpaceSpec,
    obj: &mut O,
    seed: u64,
) -> shapebench_core::Result<RunTrace> {
    match algo {
        AlgorithmConfig::Ga(c) => run_ga(c, space, obj, seed),
        AlgorithmConfig::Rs(c) => run_rs(c, space, obj, seed),
        AlgorithmConfig::Gs(c) => run_gs(c, space, obj, seed),
    }
}

/// Runs repetition `rep` of `algo` against a freshly created objective.
pub fn execute_run(cfg: &ExperimentConfig, algo: &AlgorithmSpec, rep: usize) -> RunRecord {
    let seed = derive_run_seed(cfg.master_seed, &algo.label, rep as u64);
    let budget = algo.config.budget() as u64;
    let mut cache_hits = None;
    let result = make_objective(&cfg.objective)
        .map_err(shapebench_core::Error::from)
        .and_then(|base| {
            if cfg.memoize {
                let mut obj = Counting::with_cap(Memoized::new(base), budget);
                let out = dispatch(&algo.config, &cfg.space, &mut obj, seed);
                cache_hits = Some(obj.inner().cache_hits());
                out
            } else {
                let mut obj = Counting::with_cap(base, budget);
                dispatch(&algo.config, &cfg.space, &mut obj, seed)
            }
        })
        .map_err(|e| e.to_string());
    RunRecord {
        label: algo.label.clone(),
        kind: algo.config.kind(),
        rep,
        seed,
        result,
        cache_hits,
    }
}

/// Executes every (algorithm, repetition) pair on `cfg.workers` threads.
/// The returned records are ordered by algorithm (config order), then rep.
pub fn execute_all(cfg: &ExperimentConfig) -> Vec<RunRecord> {
    let tasks: Vec<(usize, usize)> = (0..cfg.algorithms.len())
        .flat_map(|a| (0..cfg.repetitions).map(move |r| (a, r)))
        .collect();
    let slots: Mutex<Vec<Option<RunRecord>>> = Mutex::new(vec![None; tasks.len()]);
    let next = AtomicUsize::new(0);
    let workers = cfg.workers.clamp(1, tasks.len().max(1));
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(&(a, r)) = tasks.get(i) else { break };
                let record = execute_run(cfg, &cfg.algorithms[a], r);
                slots
                    .lock()
                    .expect("no worker panics while holding the lock")[i] = Some(record);
            });
        }
    });
    slots
        .into_inner()
        .expect("workers joined")
        .into_iter()
        .map(|r| r.expect("every task ran"))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunMetrics {
    pub label: String,
    pub rep: usize,
    pub success_rate_pct: f64,
    pub effort_evals: usize,
    pub effort_censored: bool,
    pub best_kwh: f64,
    pub ape_pct: f64,
}

impl RunMetrics {
    pub fn measure(&self, name: &str) -> f64 {
        match name {
            "success_rate_pct" => self.success_rate_pct,
            "ape_pct" => self.ape_pct,
            "effort_evals" => self.effort_evals as f64,
            other => panic!("unknown measure {other}"),
        }
    }
}

pub fn run_metrics(
    label: &str,
    rep: usize,
    trace: &RunTrace,
    y_star: f64,
    tol: f64,
    k: usize,
) -> shapebench_core::Result<RunMetrics> {
    let best = trace
        .best_value()
        .ok_or_else(|| shapebench_core::Error::Contract("empty trace".into()))?
        .value();
    let effort: Effort = computational_effort(trace, y_star, tol, k)?;
    Ok(RunMetrics {
        label: label.to_string(),
        rep,
        success_rate_pct: success_rate(trace, y_star, tol)?,
        effort_evals: effort.evals(),
        effort_censored: effort.is_censored(),
        best_kwh: best,
        ape_pct: ape(best, y_star)?,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AlgorithmSummary {
    pub label: String,
    pub successful_runs: usize,
    pub failed_runs: usize,
    pub mape_pct: Option<f64>,
    /// Keyed like [`MEASURES`].
    pub stats: Vec<(String, BoxplotStats)>,
}

/// Everything an experiment produced.
#[derive(Debug, Clone)]
pub struct ExperimentOutcome {
    pub estimate: BenchmarkEstimate,
    pub runs: Vec<RunRecord>,
    pub metrics: Vec<RunMetrics>,
    pub summaries: Vec<AlgorithmSummary>,
    pub output_dir: PathBuf,
}

pub fn summarise(
    cfg: &ExperimentConfig,
    runs: &[RunRecord],
    y_star: f64,
) -> shapebench_core::Result<(Vec<RunMetrics>, Vec<AlgorithmSummary>)> {
    let mut metrics = Vec::new();
    let mut summaries = Vec::new();
    for algo in &cfg.algorithms {
        let mine: Vec<&RunRecord> = runs.iter().filter(|r| r.label == algo.label).collect();
        let mut rows = Vec::new();
        for r in &mine {
            if let Ok(trace) = &r.result {
                rows.push(run_metrics(
                    &algo.label,
                    r.rep,
                    trace,
                    y_star,
                    cfg.metrics.success_tol,
                    cfg.metrics.k,
                )?);
            }
        }
        let mut stats = Vec::new();
        let mut mape_pct = None;
        if !rows.is_empty() {
            let bests: Vec<f64> = rows.iter().map(|m| m.best_kwh).collect();
            mape_pct = Some(mape(&bests, y_star)?);
            for m in MEASURES {
                let values: Vec<f64> = rows.iter().map(|r| r.measure(m)).collect();
                stats.push((m.to_string(), boxplot_stats(&values)?));
            }
        }
        summaries.push(AlgorithmSummary {
            label: algo.label.clone(),
            successful_runs: rows.len(),
            failed_runs: mine.len() - rows.len(),
            mape_pct,
            stats,
        });
        metrics.extend(rows);
    }
    Ok((metrics, summaries))
}

/// Runs the full protocol and writes the result bundle to `cfg.output_dir`.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentOutcome> {
    let estimate = estimate(cfg)?;
    let y_star = estimate.benchmark.y_star.value();
    let runs = execute_all(cfg);
    let (metrics, summaries) = summarise(cfg, &runs, y_star)?;
    let outcome = ExperimentOutcome {
        estimate,
        runs,
        metrics,
        summaries,
        output_dir: cfg.output_dir.clone(),
    };
    write_bundle(cfg, &outcome)?;
    Ok(outcome)
}

fn write_bundle(cfg: &ExperimentConfig, out: &ExperimentOutcome) -> Result<()> {
    let dir = &cfg.output_dir;
    let traces_dir = dir.join("traces");
    fs::create_dir_all(&traces_dir).map_err(|e| Error::io(&traces_dir, e))?;
    let n = cfg.space.n;

    // runs.csv
    let header: Vec<String> = ["algo", "rep", "seed", "evals_used", "best_kwh"]
        .into_iter()
        .map(String::from)
        .chain(component_headers(n))
        .chain(["status".to_string(), "error".to_string()])
        .collect();
    let mut rows = Vec::new();
    for r in &out.runs {
        let mut row = vec![r.label.clone(), r.rep.to_string(), r.seed.to_string()];
        match &r.result {
            Ok(trace) => {
                let best = trace.best().expect("successful runs are non-empty");
                row.push(trace.len().to_string());
                row.push(fmt_f64(best.f.value()));
                row.extend(best.x.iter().map(|v| fmt_f64(*v)));
                row.extend(["ok".to_string(), String::new()]);
                write_trace(
                    &traces_dir.join(format!("{}_{}.csv", r.label, r.rep)),
                    trace,
                    n,
                )?;
            }
            Err(e) => {
                row.extend(std::iter::repeat_n(String::new(), 2 + n));
                row.extend(["failed".to_string(), e.clone()]);
            }
        }
        rows.push(row);
    }
    write_csv(&dir.join("runs.csv"), &header, &rows)?;

    // metrics.csv
    let header: Vec<String> = [
        "algo",
        "rep",
        "success_rate_pct",
        "effort_evals",
        "effort_censored",
        "best_kwh",
        "ape_pct",
        "mape_pct",
    ]
    .into_iter()
    .map(String::from)
    .collect();
    let mut rows = Vec::new();
    for s in &out.summaries {
        for m in out.metrics.iter().filter(|m| m.label == s.label) {
            rows.push(vec![
                m.label.clone(),
                m.rep.to_string(),
                fmt_f64(m.success_rate_pct),
                m.effort_evals.to_string(),
                m.effort_censored.to_string(),
                fmt_f64(m.best_kwh),
                fmt_f64(m.ape_pct),
                String::new(),
            ]);
        }
        if let Some(mape) = s.mape_pct {
            let mut row = vec![s.label.clone(), "all".to_string()];
            row.extend(std::iter::repeat_n(String::new(), 5));
            row.push(fmt_f64(mape));
            rows.push(row);
        }
    }
    write_csv(&dir.join("metrics.csv"), &header, &rows)?;

    // summary.csv
    let header: Vec<String> = [
        "algo", "measure", "min", "q1", "median", "q3", "max", "mean", "std",
    ]
    .into_iter()
    .map(String::from)
    .collect();
    let mut rows = Vec::new();
    for s in &out.summaries {
        for (measure, b) in &s.stats {
            let mut row = vec![s.label.clone(), measure.clone()];
            row.extend([b.min, b.q1, b.median, b.q3, b.max, b.mean, b.std].map(fmt_f64));
            rows.push(row);
        }
    }
    write_csv(&dir.join("summary.csv"), &header, &rows)?;

    for measure in MEASURES {
        let groups: Vec<(String, BoxplotStats)> = out
            .summaries
            .iter()
            .filter_map(|s| {
                s.stats
                    .iter()
                    .find(|(m, _)| m == measure)
                    .map(|(_, b)| (s.label.clone(), *b))
            })
            .collect();
        let title = match measure {
            "success_rate_pct" => "Success rate (%)",
            "ape_pct" => "Absolute percentage error of best value (%)",
            _ => "Computational effort (evaluations)",
        };
        write_text(
            &dir.join(format!("boxplot_{measure}.svg")),
            &boxplot_svg(title, &groups),
        )?;
    }

    write_text(&dir.join("metadata.json"), &metadata(cfg, out)?)?;
    Ok(())
}

fn metadata(cfg: &ExperimentConfig, out: &ExperimentOutcome) -> Result<String> {
    let created = std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    let runs: Vec<_> = out
        .runs
        .iter()
        .map(|r| {
            json!({
                "algo": r.label,
                "kind": r.kind.as_str(),
                "rep": r.rep,
                "seed": r.seed,
                "status": if r.result.is_ok() { "ok" } else { "failed" },
                "evals_used": r.result.as_ref().map(|t| t.len()).ok(),
                "cache_hits": r.cache_hits,
            })
        })
        .collect();
    let accounting: Vec<_> = cfg
        .algorithms
        .iter()
        .map(|a| {
            let planned = match &a.config {
                AlgorithmConfig::Ga(c) => c.expected_evaluations(),
                AlgorithmConfig::Rs(c) => c.budget,
                AlgorithmConfig::Gs(c) => cfg
                    .space
                    .grid_points()
                    .map(|g| c.expected_evaluations(g.len()))
                    .unwrap_or(0),
            };
            json!({ "algo": a.label, "budget": a.config.budget(), "evaluations_per_run": planned })
        })
        .collect();
    let doc = json!({
        "tool": env!("CARGO_PKG_NAME"),
        "version": env!("CARGO_PKG_VERSION"),
        "created_unix_secs": created,
        "config": cfg,
        "benchmark": out.estimate.benchmark,
        "benchmark_analytic_cross_check": out.estimate.analytic_cross_check,
        "seed_derivation": DERIVATION,
        "zero_sum_constraint": {
            "treatment": "absolute tolerance on |sum(x)|",
            "tolerance_ft": cfg.space.zero_sum_tol,
        },
        "ga_elites_reevaluated": false,
        "memoize": cfg.memoize,
        "evaluation_accounting": accounting,
        "success_criterion": "|f - y_star| / y_star <= success_tol, counted over every trace record",
        "effort_censoring": "runs with fewer than k successes report the trace length with effort_censored = true",
        "quartile_method": "linear interpolation at q * (n - 1) of the ascending sort",
        "runs": runs,
        "summaries": out.summaries,
        "observations": observations(&out.summaries),
    });
    Ok(serde_json::to_string_pretty(&doc)? + "\n")
}

/// Descriptive comparisons between algorithms; recorded, never asserted.
fn observations(summaries: &[AlgorithmSummary]) -> serde_json::Value {
    let stat = |label: &str, measure: &str| {
        summaries
            .iter()
            .find(|s| s.label == label)
            .and_then(|s| s.stats.iter().find(|(m, _)| m == measure).map(|(_, b)| *b))
    };
    let mut notes = Vec::new();
    if let (Some(rs), Some(ga)) = (
        stat("rs", "success_rate_pct"),
        stat("ga", "success_rate_pct"),
    ) {
        notes.push(json!({
            "comparison": "success-rate consistency, rs vs ga (sample std across repetitions)",
            "rs_std": rs.std,
            "ga_std": ga.std,
            "rs_more_consistent": rs.std < ga.std,
        }));
    }
    if let (Some(rs), Some(ga)) = (stat("rs", "ape_pct"), stat("ga", "ape_pct")) {
        notes.push(json!({
            "comparison": "best-value error, rs vs ga (mean and std of per-run APE)",
            "rs_mean": rs.mean,
            "ga_mean": ga.mean,
            "rs_std": rs.std,
            "ga_std": ga.std,
            "ga_more_accurate_on_average": ga.mean < rs.mean,
            "ga_more_variable": ga.std > rs.std,
        }));
    }
    serde_json::Value::Array(notes)
}

/// Location of a run's trace file inside a bundle.
pub fn trace_path(dir: &Path, label: &str, rep: usize) -> PathBuf {
    dir.join("traces").join(format!("{label}_{rep}.csv"))
}
