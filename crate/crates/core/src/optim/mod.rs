//! Genetic algorithm, random search and grid search, each producing a full
//! evaluation trace under a hard evaluation budget.
//!
//! All three share the same accounting: a run evaluates points one at a time
//! through an [`Objective`](crate::Objective), every evaluation becomes an
//! [`EvalRecord`], and the run never asks for more evaluations than its
//! budget allows.

mod config;
mod ga;
mod gs;
mod ops;
mod rs;
mod trace;

pub use config::{GaConfig, GsConfig, RsConfig};
pub use ga::{run_ga, run_ga_detailed, GaOutcome};
pub use gs::run_gs;
pub use ops::{mutate, one_point_crossover, select_elites};
pub use rs::run_rs;
pub use trace::{AlgorithmKind, EvalRecord, RunTrace};

use crate::error::{Error, Result};
use crate::objective::Objective;

fn require_fresh<O: Objective + ?Sized>(obj: &O) -> Result<()> {
    if obj.eval_count() != 0 {
        return Err(Error::Contract(alloc::format!(
            "objective must be fresh, but has already served {} evaluations",
            obj.eval_count()
        )));
    }
    Ok(())
}
