use super::config::RsConfig;
use super::require_fresh;
use super::trace::{AlgorithmKind, Recorder, RunTrace};
use crate::error::Result;
use crate::objective::Objective;
use crate::space::SpaceSpec;

/// Uniform random search: `budget` independent samples, best-so-far kept.
pub fn run_rs<O: Objective + ?Sized>(
    cfg: &RsConfig,
    space: &SpaceSpec,
    obj: &mut O,
    seed: u64,
) -> Result<RunTrace> {
    cfg.validate()?;
    space.validate()?;
    require_fresh(obj)?;
    let mut rng = crate::rng_from_seed(seed);
    let mut rec = Recorder::new(obj, AlgorithmKind::Rs, seed, cfg.budget);
    for _ in 0..cfg.budget {
        let x = space.sample_uniform(&mut rng);
        rec.evaluate(&x)?;
    }
    Ok(rec.finish())
}
