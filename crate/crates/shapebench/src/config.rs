//! Experiment configuration: a single JSON document with lower_snake_case
//! keys. Unknown keys are rejected.
//!
//! Only `algorithms` and `master_seed` are required; every other key has a
//! default, and the fully resolved configuration is echoed into the result
//! metadata.
//!
//! ```json
//! {
//!   "space": { "n": 4, "bound": 11.5, "grid": { "step": 1.6, "anchor": 0.0 } },
//!   "objective": "synthetic",
//!   "algorithms": ["ga", "rs", { "gs": { "budget": 350 } }],
//!   "repetitions": 10,
//!   "master_seed": 42
//! }
//! ```

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};
use shapebench_core::optim::{AlgorithmKind, GaConfig, GsConfig, RsConfig};
use shapebench_core::seed::derive_run_seed;
use shapebench_core::{GridSpec, MetricsConfig, ShapeVector, SpaceSpec, SyntheticParams};

use crate::error::{Error, Result};
use crate::external::ExternalObjectiveConfig;

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ObjectiveSpec {
    Synthetic(SyntheticParams),
    External(ExternalObjectiveConfig),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum AlgorithmConfig {
    Ga(GaConfig),
    Rs(RsConfig),
    Gs(GsConfig),
}

impl AlgorithmConfig {
    pub fn kind(&self) -> AlgorithmKind {
        match self {
            AlgorithmConfig::Ga(_) => AlgorithmKind::Ga,
            AlgorithmConfig::Rs(_) => AlgorithmKind::Rs,
            AlgorithmConfig::Gs(_) => AlgorithmKind::Gs,
        }
    }

    pub fn budget(&self) -> usize {
        match self {
            AlgorithmConfig::Ga(c) => c.budget,
            AlgorithmConfig::Rs(c) => c.budget,
            AlgorithmConfig::Gs(c) => c.budget,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AlgorithmSpec {
    /// Unique label; used in file names, CSV rows and seed derivation.
    pub label: String,
    pub config: AlgorithmConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case", tag = "method")]
pub enum BenchmarkSpec {
    LongGa {
        ga: GaConfig,
        seed: u64,
    },
    ExhaustiveGrid,
    Analytic,
    /// A reference minimum supplied by the user.
    Fixed {
        y_star: f64,
        x_star: ShapeVector,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub space: SpaceSpec,
    pub objective: ObjectiveSpec,
    /// Cache evaluations of repeated points. Off by default, since every
    /// evaluation normally stands for one simulation.
    pub memoize: bool,
    pub algorithms: Vec<AlgorithmSpec>,
    pub repetitions: usize,
    pub master_seed: u64,
    pub benchmark: BenchmarkSpec,
    pub metrics: MetricsConfig,
    /// Concurrent runs; 1 runs everything sequentially.
    pub workers: usize,
    pub output_dir: PathBuf,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SpaceDoc {
    n: Option<usize>,
    bound: Option<f64>,
    zero_sum_tol: Option<f64>,
    grid: Option<GridDoc>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct GridDoc {
    step: Option<f64>,
    anchor: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SyntheticDoc {
    baseline: Option<f64>,
    weight: Option<f64>,
    ruggedness: Option<f64>,
    frequency: Option<f64>,
    target: Option<Vec<f64>>,
    noise_sigma: Option<f64>,
    noise_seed: Option<u64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ExternalDoc {
    command: Vec<String>,
    timeout_ms: Option<u64>,
    restart_on_crash: Option<bool>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct GaDoc {
    label: Option<String>,
    init_pop: Option<usize>,
    gen_pop: Option<usize>,
    num_gen: Option<usize>,
    num_elit: Option<usize>,
    mutation_rate: Option<f64>,
    budget: Option<usize>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RsDoc {
    label: Option<String>,
    budget: Option<usize>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct GsDoc {
    label: Option<String>,
    budget: Option<usize>,
    without_replacement: Option<bool>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct BenchmarkDoc {
    method: String,
    seed: Option<u64>,
    ga: Option<GaDoc>,
    y_star: Option<f64>,
    x_star: Option<Vec<f64>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct MetricsDoc {
    success_tol: Option<f64>,
    k: Option<usize>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ExperimentDoc {
    space: Option<SpaceDoc>,
    objective: Option<Value>,
    memoize: Option<bool>,
    algorithms: Option<Vec<Value>>,
    repetitions: Option<usize>,
    master_seed: Option<u64>,
    benchmark: Option<Value>,
    metrics: Option<MetricsDoc>,
    workers: Option<usize>,
    output_dir: Option<PathBuf>,
}

fn config_err(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}

fn from_core(e: shapebench_core::Error) -> Error {
    match e {
        shapebench_core::Error::InvalidConfig(msg) => Error::Config(msg),
        other => Error::Config(other.to_string()),
    }
}

fn parse_body<T: serde::de::DeserializeOwned>(key: &str, body: Value) -> Result<T> {
    let body = if body.is_null() {
        Value::Object(Map::new())
    } else {
        body
    };
    serde_json::from_value(body).map_err(|e| config_err(format!("{key}: {e}")))
}

/// Splits `"name"` or `{"name": {...}}` into the name and its body.
fn tagged(key: &str, value: Value) -> Result<(String, Value)> {
    match value {
        Value::String(name) => Ok((name, Value::Null)),
        Value::Object(map) if map.len() == 1 => {
            let (name, body) = map.into_iter().next().expect("one entry");
            Ok((name, body))
        }
        other => Err(config_err(format!(
            "{key}: expected a name or a single-key object, got {other}"
        ))),
    }
}

fn resolve_space(doc: Option<SpaceDoc>) -> Result<SpaceSpec> {
    let doc = doc.unwrap_or(SpaceDoc {
        n: None,
        bound: None,
        zero_sum_tol: None,
        grid: None,
    });
    let defaults = GridSpec::default();
    let grid = match doc.grid {
        Some(g) => GridSpec {
            step: g.step.unwrap_or(defaults.step),
            anchor: g.anchor.unwrap_or(defaults.anchor),
        },
        None => defaults,
    };
    let mut space = SpaceSpec::new(doc.n.unwrap_or(4), doc.bound.unwrap_or(11.5), grid);
    if let Some(tol) = doc.zero_sum_tol {
        space.zero_sum_tol = tol;
    }
    space.validate().map_err(from_core)?;
    Ok(space)
}

fn resolve_objective(value: Option<Value>, space: &SpaceSpec) -> Result<ObjectiveSpec> {
    let value = value.unwrap_or_else(|| Value::String("synthetic".into()));
    let (name, body) = tagged("objective", value)?;
    match name.as_str() {
        "synthetic" => {
            let d: SyntheticDoc = parse_body("objective.synthetic", body)?;
            let base = SyntheticParams::for_dimension(space.n);
            let params = SyntheticParams {
                baseline: d.baseline.unwrap_or(base.baseline),
                weight: d.weight.unwrap_or(base.weight),
                ruggedness: d.ruggedness.unwrap_or(base.ruggedness),
                frequency: d.frequency.unwrap_or(base.frequency),
                target: d.target.map(ShapeVector::new).unwrap_or(base.target),
                noise_sigma: d.noise_sigma.unwrap_or(base.noise_sigma),
                noise_seed: d.noise_seed.unwrap_or(base.noise_seed),
            };
            params.validate(space).map_err(from_core)?;
            Ok(ObjectiveSpec::Synthetic(params))
        }
        "external" => {
            let d: ExternalDoc = parse_body("objective.external", body)?;
            let defaults = ExternalObjectiveConfig::new(d.command);
            let cfg = ExternalObjectiveConfig {
                timeout_ms: d.timeout_ms.unwrap_or(defaults.timeout_ms),
                restart_on_crash: d.restart_on_crash.unwrap_or(defaults.restart_on_crash),
                ..defaults
            };
            cfg.validate()?;
            Ok(ObjectiveSpec::External(cfg))
        }
        other => Err(config_err(format!("unknown objective `{other}`"))),
    }
}

fn resolve_ga(doc: GaDoc, base: GaConfig) -> Result<(Option<String>, GaConfig)> {
    let cfg = GaConfig {
        init_pop: doc.init_pop.unwrap_or(base.init_pop),
        gen_pop: doc.gen_pop.unwrap_or(base.gen_pop),
        num_gen: doc.num_gen.unwrap_or(base.num_gen),
        num_elit: doc.num_elit.unwrap_or(base.num_elit),
        mutation_rate: doc.mutation_rate.unwrap_or(base.mutation_rate),
        budget: doc.budget.unwrap_or(base.budget),
    };
    cfg.validate().map_err(from_core)?;
    Ok((doc.label, cfg))
}

fn resolve_algorithm(value: Value) -> Result<AlgorithmSpec> {
    let (name, body) = tagged("algorithms", value)?;
    let kind: AlgorithmKind = name.parse().map_err(from_core)?;
    let (label, config) = match kind {
        AlgorithmKind::Ga => {
            let (label, cfg) = resolve_ga(parse_body("algorithms.ga", body)?, GaConfig::default())?;
            (label, AlgorithmConfig::Ga(cfg))
        }
        AlgorithmKind::Rs => {
            let d: RsDoc = parse_body("algorithms.rs", body)?;
            let cfg = RsConfig {
                budget: d.budget.unwrap_or(RsConfig::default().budget),
            };
            cfg.validate().map_err(from_core)?;
            (d.label, AlgorithmConfig::Rs(cfg))
        }
        AlgorithmKind::Gs => {
            let d: GsDoc = parse_body("algorithms.gs", body)?;
            let base = GsConfig::default();
            let cfg = GsConfig {
                budget: d.budget.unwrap_or(base.budget),
                without_replacement: d.without_replacement.unwrap_or(base.without_replacement),
            };
            cfg.validate().map_err(from_core)?;
            (d.label, AlgorithmConfig::Gs(cfg))
        }
    };
    let label = label.unwrap_or_else(|| kind.as_str().to_string());
    let label_ok = !label.is_empty()
        && label
            .chars()
            .all(|c| c.is_ascii_lowercase() || c.is_ascii_digit() || c == '_' || c == '-');
    if !label_ok {
        return Err(config_err(format!(
            "algorithms.label `{label}` must be non-empty and use only [a-z0-9_-]"
        )));
    }
    Ok(AlgorithmSpec { label, config })
}

fn resolve_benchmark(
    value: Option<Value>,
    objective: &ObjectiveSpec,
    space: &SpaceSpec,
    master_seed: u64,
) -> Result<BenchmarkSpec> {
    let default_seed = derive_run_seed(master_seed, "benchmark", 0);
    let doc = match value {
        None => {
            return Ok(match objective {
                ObjectiveSpec::Synthetic(_) => BenchmarkSpec::ExhaustiveGrid,
                ObjectiveSpec::External(_) => BenchmarkSpec::LongGa {
                    ga: GaConfig::long_run(),
                    seed: default_seed,
                },
            })
        }
        Some(Value::String(method)) => BenchmarkDoc {
            method,
            seed: None,
            ga: None,
            y_star: None,
            x_star: None,
        },
        Some(v) => parse_body::<BenchmarkDoc>("benchmark", v)?,
    };
    let unused = |what: &str, present: bool| {
        if present {
            Err(config_err(format!(
                "benchmark.{what} is not used by method `{}`",
                doc.method
            )))
        } else {
            Ok(())
        }
    };
    match doc.method.as_str() {
        "long_ga" => {
            unused("y_star", doc.y_star.is_some())?;
            unused("x_star", doc.x_star.is_some())?;
            let ga = match doc.ga {
                Some(g) => {
                    if g.label.is_some() {
                        return Err(config_err("benchmark.ga: unknown field `label`"));
                    }
                    let base = GaConfig::long_run();
                    // An explicit generation count without a budget keeps the budget non-binding.
                    let budget_given = g.budget.is_some();
                    let (_, mut cfg) = resolve_ga(g, base)?;
                    if !budget_given {
                        cfg.budget = cfg.planned_evaluations();
                    }
                    cfg
                }
                None => GaConfig::long_run(),
            };
            Ok(BenchmarkSpec::LongGa {
                ga,
                seed: doc.seed.unwrap_or(default_seed),
            })
        }
        "exhaustive_grid" | "analytic" => {
            unused("seed", doc.seed.is_some())?;
            unused("ga", doc.ga.is_some())?;
            unused("y_star", doc.y_star.is_some())?;
            unused("x_star", doc.x_star.is_some())?;
            if doc.method == "analytic" {
                match objective {
                    ObjectiveSpec::Synthetic(p) if p.noise_sigma == 0.0 => {}
                    _ => {
                        return Err(config_err(
                            "benchmark.method `analytic` needs a noise-free synthetic objective",
                        ))
                    }
                }
                Ok(BenchmarkSpec::Analytic)
            } else {
                Ok(BenchmarkSpec::ExhaustiveGrid)
            }
        }
        "fixed" => {
            unused("seed", doc.seed.is_some())?;
            unused("ga", doc.ga.is_some())?;
            let y_star = doc
                .y_star
                .ok_or_else(|| config_err("benchmark.y_star is required for method `fixed`"))?;
            let x_star = doc
                .x_star
                .ok_or_else(|| config_err("benchmark.x_star is required for method `fixed`"))?;
            if !(y_star.is_finite() && y_star > 0.0) {
                return Err(config_err(format!(
                    "benchmark.y_star must be > 0, got {y_star}"
                )));
            }
            if !space.is_feasible(&x_star).map_err(from_core)? {
                return Err(config_err("benchmark.x_star is not feasible"));
            }
            Ok(BenchmarkSpec::Fixed {
                y_star,
                x_star: ShapeVector::new(x_star),
            })
        }
        other => Err(config_err(format!("unknown benchmark method `{other}`"))),
    }
}

/// Parses and validates a configuration document, filling in every default.
pub fn load_config(document: &str) -> Result<ExperimentConfig> {
    let doc: ExperimentDoc =
        serde_json::from_str(document).map_err(|e| config_err(e.to_string()))?;
    let space = resolve_space(doc.space)?;
    let objective = resolve_objective(doc.objective, &space)?;

    let master_seed = doc
        .master_seed
        .ok_or_else(|| config_err("missing required key `master_seed`"))?;
    let raw_algos = doc
        .algorithms
        .ok_or_else(|| config_err("missing required key `algorithms`"))?;
    if raw_algos.is_empty() {
        return Err(config_err("algorithms must list at least one algorithm"));
    }
    let algorithms = raw_algos
        .into_iter()
        .map(resolve_algorithm)
        .collect::<Result<Vec<_>>>()?;
    for (i, a) in algorithms.iter().enumerate() {
        if algorithms[..i].iter().any(|b| b.label == a.label) {
            return Err(config_err(format!(
                "algorithms: duplicate label `{}` (set a distinct \"label\")",
                a.label
            )));
        }
    }

    let repetitions = doc.repetitions.unwrap_or(10);
    let metrics_doc = doc.metrics.unwrap_or(MetricsDoc {
        success_tol: None,
        k: None,
    });
    let defaults = MetricsConfig::default();
    let metrics = MetricsConfig {
        success_tol: metrics_doc.success_tol.unwrap_or(defaults.success_tol),
        k: metrics_doc.k.unwrap_or(defaults.k),
        rep_count: repetitions,
    };
    metrics.validate().map_err(from_core)?;

    let benchmark = resolve_benchmark(doc.benchmark, &objective, &space, master_seed)?;
    let workers = doc.workers.unwrap_or(1);
    if workers == 0 {
        return Err(config_err("workers must be >= 1, got 0"));
    }

    Ok(ExperimentConfig {
        space,
        objective,
        memoize: doc.memoize.unwrap_or(false),
        algorithms,
        repetitions,
        master_seed,
        benchmark,
        metrics,
        workers,
        output_dir: doc.output_dir.unwrap_or_else(|| PathBuf::from("results")),
    })
}

/// Reads and parses a configuration file.
pub fn load_config_file(path: &Path) -> Result<ExperimentConfig> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| config_err(format!("cannot read {}: {e}", path.display())))?;
    load_config(&text)
}
