//! Estimation of the reference minimum `(x_star, y_star)` that every metric
//! is measured against.

use alloc::format;

use crate::error::{Error, EvalError, Result};
use crate::objective::{EnergyKwh, Objective};
use crate::optim::{run_ga, GaConfig};
use crate::space::{ShapeVector, SpaceSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum BenchmarkSource {
    LongGa,
    ExhaustiveGrid,
    Analytic,
    /// Provided by the user rather than estimated.
    Supplied,
}

impl BenchmarkSource {
    pub fn as_str(self) -> &'static str {
        match self {
            BenchmarkSource::LongGa => "long_ga",
            BenchmarkSource::ExhaustiveGrid => "exhaustive_grid",
            BenchmarkSource::Analytic => "analytic",
            BenchmarkSource::Supplied => "supplied",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum BenchmarkMethod {
    /// A GA run with a budget that does not bind (see [`GaConfig::long_run`]).
    LongGa { cfg: GaConfig, seed: u64 },
    /// Every point of the feasible lattice.
    ExhaustiveGrid,
    /// The objective's own known minimum.
    Analytic,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Benchmark {
    pub y_star: EnergyKwh,
    pub x_star: ShapeVector,
    pub source: BenchmarkSource,
    pub evals_used: usize,
}

/// Estimates the reference minimum. `make_objective` is called once for a
/// fresh objective handle.
pub fn estimate_benchmark<O, F>(
    space: &SpaceSpec,
    mut make_objective: F,
    method: &BenchmarkMethod,
) -> Result<Benchmark>
where
    O: Objective,
    F: FnMut() -> Result<O, EvalError>,
{
    space.validate()?;
    let mut obj = make_objective()?;
    match method {
        BenchmarkMethod::LongGa { cfg, seed } => {
            let trace = run_ga(cfg, space, &mut obj, *seed)?;
            let best = trace
                .best()
                .expect("GA trace holds at least init_pop records");
            Ok(Benchmark {
                y_star: best.f,
                x_star: best.x.clone(),
                source: BenchmarkSource::LongGa,
                evals_used: trace.len(),
            })
        }
        BenchmarkMethod::ExhaustiveGrid => {
            let lattice = space.grid_points()?;
            let mut best: Option<(usize, EnergyKwh)> = None;
            for (i, x) in lattice.iter().enumerate() {
                let f = obj.evaluate(x)?;
                if best.is_none_or(|(_, b)| f < b) {
                    best = Some((i, f));
                }
            }
            let (i, f) = best.expect("grid_points never returns an empty lattice");
            Ok(Benchmark {
                y_star: f,
                x_star: lattice[i].clone(),
                source: BenchmarkSource::ExhaustiveGrid,
                evals_used: lattice.len(),
            })
        }
        BenchmarkMethod::Analytic => {
            let (x, y) = obj.known_minimum().ok_or_else(|| {
                Error::Contract("objective has no analytically known minimum".into())
            })?;
            if !space.is_feasible(&x)? {
                return Err(Error::Contract(format!(
                    "known minimiser {:?} is not feasible",
                    x.as_slice()
                )));
            }
            Ok(Benchmark {
                y_star: y,
                x_star: x,
                source: BenchmarkSource::Analytic,
                evals_used: 0,
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::objective::{Synthetic, SyntheticParams};
    use crate::space::GridSpec;

    fn make() -> Result<Synthetic, EvalError> {
        Ok(Synthetic::new(SyntheticParams::default()))
    }

    #[test]
    fn analytic_default() {
        let b =
            estimate_benchmark(&SpaceSpec::default(), make, &BenchmarkMethod::Analytic).unwrap();
        assert_eq!(b.y_star.value(), 760.0);
        assert_eq!(b.evals_used, 0);
    }

    #[test]
    fn analytic_needs_known_minimum() {
        let noisy = || {
            Ok::<_, EvalError>(Synthetic::new(SyntheticParams {
                noise_sigma: 1.0,
                ..SyntheticParams::default()
            }))
        };
        assert!(
            estimate_benchmark(&SpaceSpec::default(), noisy, &BenchmarkMethod::Analytic).is_err()
        );
    }

    #[test]
    fn long_ga_is_deterministic() {
        let method = BenchmarkMethod::LongGa {
            cfg: GaConfig::long_run(),
            seed: 17,
        };
        let a = estimate_benchmark(&SpaceSpec::default(), make, &method).unwrap();
        let b = estimate_benchmark(&SpaceSpec::default(), make, &method).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.evals_used, 1540);
        assert!(a.y_star.value() >= 760.0);
    }

    #[test]
    fn exhaustive_on_empty_lattice() {
        let space = SpaceSpec::new(
            3,
            1.0,
            GridSpec {
                step: 1.0,
                anchor: 0.5,
            },
        )
        .with_zero_sum_tol(0.0);
        let mk = || Ok::<_, EvalError>(Synthetic::new(SyntheticParams::for_dimension(3)));
        assert_eq!(
            estimate_benchmark(&space, mk, &BenchmarkMethod::ExhaustiveGrid),
            Err(Error::EmptyGrid)
        );
    }
}
