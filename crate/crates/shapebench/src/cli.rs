//! `shapebench` subcommands.
//!
//! Exit status: 0 on success, 1 for configuration or argument errors, 2 for
//! runtime failures. Diagnostics go to stderr.

use std::ffi::OsString;
use std::io::{self, Write};
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;
use shapebench_core::landscape::{count_local_minima, slice_grid, SliceFill, SliceTable};
use shapebench_core::{GaConfig, ShapeVector, SyntheticParams};

use crate::config::{load_config_file, BenchmarkSpec, ExperimentConfig, ObjectiveSpec};
use crate::error::{Error, Result};
use crate::experiment::{estimate, make_objective, run_experiment};
use crate::external::serve_synthetic;
use crate::output::{fmt_f64, write_text};

#[derive(Debug, Parser)]
#[command(
    name = "shapebench",
    version,
    about = "Benchmark GA, random search and grid search on a zero-sum design space"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Method {
    LongGa,
    Grid,
    Analytic,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run the full experiment and write the result bundle.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Output directory (overrides `output_dir`).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Master seed (overrides `master_seed`).
        #[arg(long)]
        seed: Option<u64>,
        /// Concurrent runs (overrides `workers`).
        #[arg(long)]
        workers: Option<usize>,
    },
    /// Estimate the reference minimum and print it.
    Benchmark {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, value_enum)]
        method: Method,
    },
    /// Evaluate a two-axis slice of the objective and count its local minima.
    Landscape {
        #[arg(long)]
        config: PathBuf,
        /// 1-based axis pair, e.g. `1,2`.
        #[arg(long)]
        axes: String,
        #[arg(long, default_value_t = 50)]
        resolution: usize,
        /// Write the slice CSV here (plus a `.json` sidecar) instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluate the objective at one point.
    Eval {
        #[arg(long)]
        config: PathBuf,
        /// Comma-separated components, e.g. `3.2,-1.6,-4.8,3.2`.
        #[arg(long, allow_hyphen_values = true)]
        x: String,
    },
    /// Serve the synthetic landscape over the line protocol on stdin/stdout.
    ServeSynthetic {
        /// Take the synthetic parameters from this config (defaults otherwise).
        #[arg(long)]
        config: Option<PathBuf>,
    },
}

/// Runs the CLI and returns the process exit status.
pub fn main_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match dispatch(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn dispatch(cmd: Command) -> Result<()> {
    match cmd {
        Command::Run {
            config,
            out,
            seed,
            workers,
        } => {
            let mut cfg = load_config_file(&config)?;
            if let Some(dir) = out {
                cfg.output_dir = dir;
            }
            if let Some(seed) = seed {
                cfg = reseed(cfg, seed);
            }
            if let Some(w) = workers {
                if w == 0 {
                    return Err(Error::Config("--workers must be >= 1".into()));
                }
                cfg.workers = w;
            }
            let outcome = run_experiment(&cfg)?;
            let failed = outcome.runs.iter().filter(|r| r.result.is_err()).count();
            println!(
                "benchmark y_star = {} ({})",
                fmt_f64(outcome.estimate.benchmark.y_star.value()),
                outcome.estimate.benchmark.source.as_str()
            );
            for s in &outcome.summaries {
                let mape = s.mape_pct.map(fmt_f64).unwrap_or_else(|| "n/a".into());
                println!(
                    "{}: {} runs ok, {} failed, MAPE {mape}%",
                    s.label, s.successful_runs, s.failed_runs
                );
            }
            println!("results written to {}", outcome.output_dir.display());
            if failed > 0 {
                eprintln!("warning: {failed} run(s) failed; see runs.csv");
            }
            Ok(())
        }
        Command::Benchmark { config, method } => {
            let mut cfg = load_config_file(&config)?;
            cfg.benchmark = match method {
                Method::Grid => BenchmarkSpec::ExhaustiveGrid,
                Method::Analytic => BenchmarkSpec::Analytic,
                Method::LongGa => match cfg.benchmark {
                    b @ BenchmarkSpec::LongGa { .. } => b,
                    _ => BenchmarkSpec::LongGa {
                        ga: GaConfig::long_run(),
                        seed: shapebench_core::seed::derive_run_seed(
                            cfg.master_seed,
                            "benchmark",
                            0,
                        ),
                    },
                },
            };
            let est = estimate(&cfg)?;
            let b = &est.benchmark;
            println!("y_star: {}", fmt_f64(b.y_star.value()));
            println!("x_star: {}", join(&b.x_star));
            println!("evals: {}", b.evals_used);
            println!("source: {}", b.source.as_str());
            Ok(())
        }
        Command::Landscape {
            config,
            axes,
            resolution,
            out,
        } => {
            let (i, j) = parse_axes(&axes)?;
            if resolution < 2 {
                return Err(Error::Config(format!(
                    "--resolution must be >= 2, got {resolution}"
                )));
            }
            let cfg = load_config_file(&config)?;
            if i >= cfg.space.n || j >= cfg.space.n {
                return Err(Error::Config(format!(
                    "--axes must lie in 1..={} for this space",
                    cfg.space.n
                )));
            }
            if cfg.space.n == 2 {
                return Err(Error::Config(
                    "landscape slicing needs n >= 3 (no components left to fill)".into(),
                ));
            }
            let mut obj = make_objective(&cfg.objective).map_err(shapebench_core::Error::from)?;
            let table = slice_grid(
                &cfg.space,
                &mut obj,
                i,
                j,
                resolution,
                &SliceFill::EqualSplit,
            )?;
            let minima = count_local_minima(&table);
            let csv = slice_csv(&table);
            match out {
                Some(path) => {
                    write_text(&path, &csv)?;
                    let sidecar = path.with_extension("json");
                    let meta = json!({
                        "axes": [i + 1, j + 1],
                        "fill": table.fill.name(),
                        "fill_rule": "each remaining component = -(xi + xj) / (n - 2)",
                        "resolution": resolution,
                        "bound": cfg.space.bound,
                        "local_minima": minima,
                    });
                    write_text(&sidecar, &(serde_json::to_string_pretty(&meta)? + "\n"))?;
                    println!("local_minima: {minima}");
                }
                None => {
                    print!("{csv}");
                    eprintln!("local_minima: {minima}");
                }
            }
            Ok(())
        }
        Command::Eval { config, x } => {
            let cfg = load_config_file(&config)?;
            let values = x
                .split(',')
                .map(|s| {
                    s.trim()
                        .parse::<f64>()
                        .map_err(|e| Error::Config(format!("--x component `{s}`: {e}")))
                })
                .collect::<Result<Vec<_>>>()?;
            let feasible = cfg
                .space
                .is_feasible(&values)
                .map_err(|e| Error::Config(format!("--x: {e}")))?;
            if !feasible {
                return Err(Error::Config(format!("--x {values:?} is not feasible")));
            }
            let mut obj = make_objective(&cfg.objective).map_err(shapebench_core::Error::from)?;
            let f = obj
                .evaluate(&ShapeVector::new(values))
                .map_err(shapebench_core::Error::from)?;
            println!("{}", fmt_f64(f.value()));
            Ok(())
        }
        Command::ServeSynthetic { config } => {
            let params = match config {
                Some(path) => match load_config_file(&path)?.objective {
                    ObjectiveSpec::Synthetic(p) => p,
                    ObjectiveSpec::External(_) => {
                        return Err(Error::Config("config objective is not synthetic".into()))
                    }
                },
                None => SyntheticParams::default(),
            };
            let stdin = io::stdin();
            let stdout = io::stdout();
            serve_synthetic(&params, stdin.lock(), stdout.lock())
                .map_err(|e| Error::io("<stdio>", e))?;
            io::stdout().flush().map_err(|e| Error::io("<stdout>", e))
        }
    }
}

fn reseed(mut cfg: ExperimentConfig, seed: u64) -> ExperimentConfig {
    let old_default = shapebench_core::seed::derive_run_seed(cfg.master_seed, "benchmark", 0);
    if let BenchmarkSpec::LongGa { seed: s, .. } = &mut cfg.benchmark {
        if *s == old_default {
            *s = shapebench_core::seed::derive_run_seed(seed, "benchmark", 0);
        }
    }
    cfg.master_seed = seed;
    cfg
}

/// Parses a 1-based `i,j` pair into 0-based axes.
fn parse_axes(s: &str) -> Result<(usize, usize)> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let [a, b] = parts.as_slice() else {
        return Err(Error::Config(format!("--axes expects `i,j`, got `{s}`")));
    };
    let parse = |t: &str| -> Result<usize> {
        match t.parse::<usize>() {
            Ok(v) if v >= 1 => Ok(v - 1),
            _ => Err(Error::Config(format!(
                "--axes component `{t}` must be an integer >= 1"
            ))),
        }
    };
    let (i, j) = (parse(a)?, parse(b)?);
    if i == j {
        return Err(Error::Config("axes must differ".into()));
    }
    Ok((i, j))
}

fn join(v: &[f64]) -> String {
    v.iter().map(|x| fmt_f64(*x)).collect::<Vec<_>>().join(",")
}

/// `xi,xj,f_kwh` with an empty `f_kwh` for infeasible cells.
pub fn slice_csv(table: &SliceTable) -> String {
    let mut s = String::from("xi,xj,f_kwh\n");
    for c in &table.cells {
        s.push_str(&fmt_f64(c.xi));
        s.push(',');
        s.push_str(&fmt_f64(c.xj));
        s.push(',');
        if let Some(f) = c.f {
            s.push_str(&fmt_f64(f));
        }
        s.push('\n');
    }
    s
}
