use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::error::{Error, EvalError, Result};
use crate::objective::{EnergyKwh, Objective};
use crate::space::ShapeVector;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum AlgorithmKind {
    Ga,
    Rs,
    Gs,
}

impl AlgorithmKind {
    pub fn as_str(self) -> &'static str {
        match self {
            AlgorithmKind::Ga => "ga",
            AlgorithmKind::Rs => "rs",
            AlgorithmKind::Gs => "gs",
        }
    }
}

impl fmt::Display for AlgorithmKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for AlgorithmKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ga" => Ok(AlgorithmKind::Ga),
            "rs" => Ok(AlgorithmKind::Rs),
            "gs" => Ok(AlgorithmKind::Gs),
            other => Err(Error::InvalidConfig(alloc::format!(
                "unknown algorithm `{other}`"
            ))),
        }
    }
}

/// One objective evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalRecord {
    /// 1-based position in the trace.
    pub index: usize,
    pub x: ShapeVector,
    pub f: EnergyKwh,
    /// Minimum of `f` over records `1..=index`.
    pub best_so_far: EnergyKwh,
}

/// Every evaluation of one optimizer run, in order.
#[derive(Debug, Clone, PartialEq)]
pub struct RunTrace {
    pub algo: AlgorithmKind,
    pub seed: u64,
    records: Vec<EvalRecord>,
    best_index: usize,
}

impl RunTrace {
    pub(crate) fn new(algo: AlgorithmKind, seed: u64) -> Self {
        RunTrace {
            algo,
            seed,
            records: Vec::new(),
            best_index: 0,
        }
    }

    pub fn records(&self) -> &[EvalRecord] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// The first record attaining the minimum, or `None` for an empty trace.
    pub fn best(&self) -> Option<&EvalRecord> {
        self.records.get(self.best_index)
    }

    pub fn best_value(&self) -> Option<EnergyKwh> {
        self.best().map(|r| r.f)
    }

    /// Fitness values in evaluation order.
    pub fn values(&self) -> impl Iterator<Item = f64> + '_ {
        self.records.iter().map(|r| r.f.value())
    }

    /// Builds a trace from evaluations given in order, e.g. when reloading a
    /// trace file.
    pub fn from_evaluations<I>(algo: AlgorithmKind, seed: u64, evals: I) -> Result<Self>
    where
        I: IntoIterator<Item = (ShapeVector, f64)>,
    {
        let mut trace = RunTrace::new(algo, seed);
        for (x, f) in evals {
            trace.push(x, EnergyKwh::new(f)?);
        }
        Ok(trace)
    }

    pub(crate) fn push(&mut self, x: ShapeVector, f: EnergyKwh) {
        let best_so_far = match self.best() {
            Some(b) if b.f <= f => b.f,
            Some(_) => {
                self.best_index = self.records.len();
                f
            }
            None => f,
        };
        self.records.push(EvalRecord {
            index: self.records.len() + 1,
            x,
            f,
            best_so_far,
        });
    }
}

/// Evaluates points, records them and enforces the run's budget.
pub(crate) struct Recorder<'a, O: ?Sized> {
    obj: &'a mut O,
    trace: RunTrace,
    budget: usize,
}

impl<'a, O: Objective + ?Sized> Recorder<'a, O> {
    pub(crate) fn new(obj: &'a mut O, algo: AlgorithmKind, seed: u64, budget: usize) -> Self {
        Recorder {
            obj,
            trace: RunTrace::new(algo, seed),
            budget,
        }
    }

    pub(crate) fn exhausted(&self) -> bool {
        self.trace.len() >= self.budget
    }

    pub(crate) fn evaluate(&mut self, x: &ShapeVector) -> Result<EnergyKwh> {
        if self.exhausted() {
            return Err(EvalError::BudgetExceeded {
                cap: self.budget as u64,
            }
            .into());
        }
        let f = self.obj.evaluate(x)?;
        self.trace.push(x.clone(), f);
        Ok(f)
    }

    pub(crate) fn finish(self) -> RunTrace {
        self.trace
    }
}
