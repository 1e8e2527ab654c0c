use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::Rng;

use super::config::GsConfig;
use super::require_fresh;
use super::trace::{AlgorithmKind, Recorder, RunTrace};
use crate::error::Result;
use crate::objective::Objective;
use crate::space::SpaceSpec;

/// Random grid search over the feasible lattice.
///
/// Without replacement the lattice is shuffled with the run's generator and
/// the first `min(budget, |lattice|)` points are evaluated; a budget covering
/// the lattice makes the search exhaustive. With replacement, `budget`
/// lattice points are drawn independently.
pub fn run_gs<O: Objective + ?Sized>(
    cfg: &GsConfig,
    space: &SpaceSpec,
    obj: &mut O,
    seed: u64,
) -> Result<RunTrace> {
    cfg.validate()?;
    space.validate()?;
    require_fresh(obj)?;
    let lattice = space.grid_points()?;
    let mut rng = crate::rng_from_seed(seed);

    let order: Vec<usize> = if cfg.without_replacement {
        let mut idx: Vec<usize> = (0..lattice.len()).collect();
        idx.shuffle(&mut rng);
        idx.truncate(cfg.budget);
        idx
    } else {
        (0..cfg.budget)
            .map(|_| rng.random_range(0..lattice.len()))
            .collect()
    };

    let mut rec = Recorder::new(obj, AlgorithmKind::Gs, seed, cfg.budget);
    for i in order {
        rec.evaluate(&lattice[i])?;
    }
    Ok(rec.finish())
}
