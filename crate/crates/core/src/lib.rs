//! Building blocks for comparing a genetic algorithm against random and grid
//! search on a zero-sum, box-bounded design space under a fixed evaluation
//! budget.
//!
//! The crate is `no_std` and only needs `alloc`. Everything that touches the
//! filesystem or child processes lives in the `shapebench` companion crate.
//!
//! Module map:
//!
//! - [`space`]: the feasible region, uniform sampling, repair and the lattice
//!   used by grid search.
//! - [`objective`]: the evaluation interface, the Joules to kWh conversion, the
//!   built-in rugged synthetic landscape and the counting/memoizing wrappers.
//! - [`optim`]: the three search algorithms and their evaluation traces.
//! - [`metrics`]: success rate, MAPE, computational effort and boxplot
//!   summaries.
//! - [`benchmark`]: estimation of the reference minimum the metrics compare to.
//! - [`landscape`]: two-axis slices through the objective and local-minimum
//!   counting.
//! - [`seed`]: the seed derivation shared by every run.
#![no_std]

extern crate alloc;

pub mod benchmark;
pub mod error;
pub mod landscape;
pub mod metrics;
pub mod objective;
pub mod optim;
pub mod seed;
pub mod space;

pub use benchmark::{estimate_benchmark, Benchmark, BenchmarkMethod, BenchmarkSource};
pub use error::{Error, EvalError, Result};
pub use landscape::{count_local_minima, slice_grid, SliceCell, SliceFill, SliceTable};
pub use metrics::{
    boxplot_stats, computational_effort, mape, success_rate, BoxplotStats, Effort, MetricsConfig,
};
pub use objective::{
    loads_to_kwh, Counting, EnergyKwh, Memoized, Objective, Synthetic, SyntheticParams, ZoneLoads,
};
pub use optim::{
    mutate, one_point_crossover, run_ga, run_ga_detailed, run_gs, run_rs, select_elites,
    AlgorithmKind, EvalRecord, GaConfig, GaOutcome, GsConfig, RsConfig, RunTrace,
};
pub use space::{GridSpec, ShapeVector, SpaceSpec};

/// Generator used for every stochastic component.
///
/// ChaCha8 has a documented, platform-independent output stream, so equal
/// seeds give bit-identical runs everywhere.
pub type Rng = rand_chacha::ChaCha8Rng;

/// Builds the crate's generator from a 64-bit seed.
pub fn rng_from_seed(seed: u64) -> Rng {
    use rand::SeedableRng;
    Rng::seed_from_u64(seed)
}
