use alloc::format;

use crate::error::{Error, Result};

/// Genetic algorithm settings.
///
/// Defaults follow the constrained experiment: 100 initial samples, a working
/// population of 50, five generations, two elites, gene mutation rate 0.1 and
/// a 350-evaluation budget. Elites are carried over without re-evaluation, so
/// the default run uses `100 + 5 * 48 = 340` evaluations.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct GaConfig {
    pub init_pop: usize,
    pub gen_pop: usize,
    pub num_gen: usize,
    pub num_elit: usize,
    pub mutation_rate: f64,
    pub budget: usize,
}

impl Default for GaConfig {
    fn default() -> Self {
        GaConfig {
            init_pop: 100,
            gen_pop: 50,
            num_gen: 5,
            num_elit: 2,
            mutation_rate: 0.1,
            budget: 350,
        }
    }
}

impl GaConfig {
    /// Settings of the long benchmark run: 30 generations and a budget large
    /// enough never to bind.
    pub fn long_run() -> Self {
        let mut cfg = GaConfig {
            num_gen: 30,
            ..GaConfig::default()
        };
        cfg.budget = cfg.planned_evaluations();
        cfg
    }

    /// Pairs of children produced per generation.
    pub fn num_crossovers(&self) -> usize {
        (self.gen_pop - self.num_elit) / 2
    }

    /// `init_pop + num_gen * (gen_pop - num_elit)`, before the budget cap.
    pub fn planned_evaluations(&self) -> usize {
        self.init_pop + self.num_gen * (self.gen_pop - self.num_elit)
    }

    /// Evaluations a run with this config performs.
    pub fn expected_evaluations(&self) -> usize {
        self.planned_evaluations().min(self.budget)
    }

    pub fn validate(&self) -> Result<()> {
        let err = |msg: alloc::string::String| Err(Error::InvalidConfig(msg));
        if self.init_pop == 0 {
            return err(format!("ga.init_pop must be >= 1, got {}", self.init_pop));
        }
        if self.gen_pop == 0 {
            return err(format!("ga.gen_pop must be >= 1, got {}", self.gen_pop));
        }
        if self.num_elit >= self.gen_pop {
            return err(format!(
                "ga.num_elit must be < gen_pop ({}), got {}",
                self.gen_pop, self.num_elit
            ));
        }
        if self.num_elit > self.init_pop {
            return err(format!(
                "ga.num_elit must be <= init_pop ({}), got {}",
                self.init_pop, self.num_elit
            ));
        }
        if !(self.gen_pop - self.num_elit).is_multiple_of(2) {
            return err(format!(
                "ga.gen_pop - ga.num_elit must be even, got {} - {}",
                self.gen_pop, self.num_elit
            ));
        }
        if self.num_gen > 0 && self.init_pop.min(self.gen_pop) < 2 {
            return err(format!(
                "ga needs at least two parents: min(init_pop, gen_pop) = {}",
                self.init_pop.min(self.gen_pop)
            ));
        }
        if !(0.0..=1.0).contains(&self.mutation_rate) {
            return err(format!(
                "mutation_rate out of [0,1]: {}",
                self.mutation_rate
            ));
        }
        if self.budget < self.init_pop {
            return err(format!(
                "ga.budget ({}) must be >= ga.init_pop ({})",
                self.budget, self.init_pop
            ));
        }
        Ok(())
    }
}

/// Random search settings.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RsConfig {
    pub budget: usize,
}

impl Default for RsConfig {
    fn default() -> Self {
        RsConfig { budget: 350 }
    }
}

impl RsConfig {
    pub fn validate(&self) -> Result<()> {
        if self.budget == 0 {
            return Err(Error::InvalidConfig("rs.budget must be >= 1, got 0".into()));
        }
        Ok(())
    }
}

/// Grid search settings.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct GsConfig {
    pub budget: usize,
    /// Draw lattice points without replacement (a seeded shuffle).
    pub without_replacement: bool,
}

impl Default for GsConfig {
    fn default() -> Self {
        GsConfig {
            budget: 350,
            without_replacement: true,
        }
    }
}

impl GsConfig {
    pub fn validate(&self) -> Result<()> {
        if self.budget == 0 {
            return Err(Error::InvalidConfig("gs.budget must be >= 1, got 0".into()));
        }
        Ok(())
    }

    /// Evaluations a run performs on a lattice with `lattice_len` points.
    pub fn expected_evaluations(&self, lattice_len: usize) -> usize {
        if self.without_replacement {
            self.budget.min(lattice_len)
        } else {
            self.budget
        }
    }
}
