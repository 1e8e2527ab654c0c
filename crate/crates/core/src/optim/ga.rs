use alloc::vec::Vec;

use rand::Rng;

use super::config::GaConfig;
use super::ops::{mutate, one_point_crossover, select_elites};
use super::require_fresh;
use super::trace::{AlgorithmKind, Recorder, RunTrace};
use crate::error::Result;
use crate::objective::{EnergyKwh, Objective};
use crate::space::{ShapeVector, SpaceSpec};

/// A GA run together with the working population's best value after
/// initialisation and after every completed (or budget-truncated) generation.
#[derive(Debug, Clone, PartialEq)]
pub struct GaOutcome {
    pub trace: RunTrace,
    pub population_minima: Vec<EnergyKwh>,
}

/// Runs the genetic algorithm and returns its trace.
pub fn run_ga<O: Objective + ?Sized>(
    cfg: &GaConfig,
    space: &SpaceSpec,
    obj: &mut O,
    seed: u64,
) -> Result<RunTrace> {
    run_ga_detailed(cfg, space, obj, seed).map(|o| o.trace)
}

/// Runs the genetic algorithm.
///
/// 1. Evaluate `init_pop` uniform samples and keep the best `gen_pop`.
/// 2. Each generation keeps `num_elit` elites as they are (no re-evaluation)
///    and breeds `gen_pop - num_elit` children: pick two distinct parents
///    uniformly, cross them over at a uniform cut, then mutate and repair each
///    child. Children are evaluated in order until the budget runs out.
/// 3. The next population is the elites followed by the evaluated children.
pub fn run_ga_detailed<O: Objective + ?Sized>(
    cfg: &GaConfig,
    space: &SpaceSpec,
    obj: &mut O,
    seed: u64,
) -> Result<GaOutcome> {
    cfg.validate()?;
    space.validate()?;
    require_fresh(obj)?;

    let mut rng = crate::rng_from_seed(seed);
    let mut rec = Recorder::new(obj, AlgorithmKind::Ga, seed, cfg.budget);

    let mut initial = Vec::with_capacity(cfg.init_pop);
    for _ in 0..cfg.init_pop {
        let x = space.sample_uniform(&mut rng);
        let f = rec.evaluate(&x)?;
        initial.push((x, f));
    }
    let mut pop = select_elites(&initial, cfg.gen_pop);
    let mut minima = Vec::with_capacity(cfg.num_gen + 1);
    minima.push(pop[0].1);

    for _ in 0..cfg.num_gen {
        if rec.exhausted() {
            break;
        }
        let mut next = select_elites(&pop, cfg.num_elit);
        let children = breed(cfg, space, &pop, &mut rng)?;
        for child in children {
            if rec.exhausted() {
                break;
            }
            let f = rec.evaluate(&child)?;
            next.push((child, f));
        }
        pop = next;
        let best = pop
            .iter()
            .map(|(_, f)| *f)
            .min_by(|a, b| a.value().total_cmp(&b.value()))
            .expect("population is never empty");
        minima.push(best);
    }

    Ok(GaOutcome {
        trace: rec.finish(),
        population_minima: minima,
    })
}

fn breed<R: Rng + ?Sized>(
    cfg: &GaConfig,
    space: &SpaceSpec,
    pop: &[(ShapeVector, EnergyKwh)],
    rng: &mut R,
) -> Result<Vec<ShapeVector>> {
    let mut children = Vec::with_capacity(2 * cfg.num_crossovers());
    for _ in 0..cfg.num_crossovers() {
        let i = rng.random_range(0..pop.len());
        let mut j = rng.random_range(0..pop.len() - 1);
        if j >= i {
            j += 1;
        }
        let cut = rng.random_range(1..space.n);
        let (c1, c2) = one_point_crossover(&pop[i].0, &pop[j].0, cut)?;
        for child in [c1, c2] {
            let mutated = mutate(&child, cfg.mutation_rate, space.bound, rng);
            children.push(space.repair(&mutated, rng)?);
        }
    }
    Ok(children)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::objective::{Synthetic, SyntheticParams};

    fn synthetic() -> Synthetic {
        Synthetic::new(SyntheticParams::default())
    }

    #[test]
    fn default_run_uses_340_evaluations() {
        let space = SpaceSpec::default();
        let mut obj = synthetic();
        let out = run_ga_detailed(&GaConfig::default(), &space, &mut obj, 1).unwrap();
        assert_eq!(out.trace.len(), 340);
        assert_eq!(obj.eval_count(), 340);
        assert_eq!(out.population_minima.len(), 6);
    }

    #[test]
    fn zero_generations() {
        let space = SpaceSpec::default();
        let cfg = GaConfig {
            num_gen: 0,
            ..GaConfig::default()
        };
        let mut obj = synthetic();
        let trace = run_ga(&cfg, &space, &mut obj, 5).unwrap();
        assert_eq!(trace.len(), 100);
        let min = trace.values().fold(f64::INFINITY, f64::min);
        assert_eq!(trace.best_value().unwrap().value(), min);
    }

    #[test]
    fn budget_truncates_generation() {
        let space = SpaceSpec::default();
        let cfg = GaConfig {
            budget: 170,
            ..GaConfig::default()
        };
        let mut obj = synthetic();
        let out = run_ga_detailed(&cfg, &space, &mut obj, 2).unwrap();
        assert_eq!(out.trace.len(), 170);
        // init + 48 + 22 of the second generation's children.
        assert_eq!(out.population_minima.len(), 3);
    }

    #[test]
    fn rejects_used_objective() {
        let space = SpaceSpec::default();
        let mut obj = synthetic();
        obj.evaluate(&ShapeVector::zeros(4)).unwrap();
        assert!(run_ga(&GaConfig::default(), &space, &mut obj, 0).is_err());
    }

    #[test]
    fn rejects_budget_below_init_pop() {
        let space = SpaceSpec::default();
        let cfg = GaConfig {
            budget: 50,
            ..GaConfig::default()
        };
        assert!(run_ga(&cfg, &space, &mut synthetic(), 0).is_err());
    }
}
