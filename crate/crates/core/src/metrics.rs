//! Performance measures computed from evaluation traces.
//!
//! A record is a *success* when its energy lies within a relative band of the
//! reference minimum: `|f - y_star| / y_star <= tol`. The band is two-sided
//! because an estimated reference can be undercut.

use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::optim::RunTrace;

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct MetricsConfig {
    /// Relative success band (0.005 is ±0.5 %).
    pub success_tol: f64,
    /// Successes needed before the effort counter stops.
    pub k: usize,
    /// Repetitions per algorithm.
    pub rep_count: usize,
}

impl Default for MetricsConfig {
    fn default() -> Self {
        MetricsConfig {
            success_tol: 0.005,
            k: 5,
            rep_count: 10,
        }
    }
}

impl MetricsConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.success_tol.is_finite() && self.success_tol > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "metrics.success_tol must be > 0, got {}",
                self.success_tol
            )));
        }
        if self.k == 0 {
            return Err(Error::InvalidConfig("metrics.k must be >= 1, got 0".into()));
        }
        if self.rep_count == 0 {
            return Err(Error::InvalidConfig(
                "repetitions must be >= 1, got 0".into(),
            ));
        }
        Ok(())
    }
}

fn check_reference(y_star: f64) -> Result<()> {
    if !(y_star.is_finite() && y_star > 0.0) {
        return Err(Error::Contract(format!(
            "reference minimum must be > 0, got {y_star}"
        )));
    }
    Ok(())
}

/// Whether `f` lies within the relative band around `y_star`.
pub fn is_success(f: f64, y_star: f64, tol: f64) -> bool {
    (f - y_star).abs() / y_star <= tol
}

/// Percentage of the trace's evaluations that are successes.
pub fn success_rate(trace: &RunTrace, y_star: f64, tol: f64) -> Result<f64> {
    check_reference(y_star)?;
    if trace.is_empty() {
        return Err(Error::Contract("success rate of an empty trace".into()));
    }
    let hits = trace
        .values()
        .filter(|f| is_success(*f, y_star, tol))
        .count();
    Ok(100.0 * hits as f64 / trace.len() as f64)
}

/// Absolute percentage error of one repetition's best value.
pub fn ape(best: f64, y_star: f64) -> Result<f64> {
    check_reference(y_star)?;
    Ok(100.0 * (y_star - best).abs() / y_star)
}

/// Mean absolute percentage error of per-repetition best values against the
/// reference minimum: `(100 / n) * sum_i |y_star - best_i| / y_star`.
pub fn mape(run_bests: &[f64], y_star: f64) -> Result<f64> {
    check_reference(y_star)?;
    if run_bests.is_empty() {
        return Err(Error::Contract("MAPE over zero repetitions".into()));
    }
    let sum: f64 = run_bests.iter().map(|b| (y_star - b).abs() / y_star).sum();
    Ok(100.0 / run_bests.len() as f64 * sum)
}

/// Evaluations needed to collect `k` successes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Effort {
    /// 1-based index of the k-th success.
    Reached(usize),
    /// Fewer than `k` successes; carries the trace length.
    Censored(usize),
}

impl Effort {
    pub fn evals(self) -> usize {
        match self {
            Effort::Reached(n) | Effort::Censored(n) => n,
        }
    }

    pub fn is_censored(self) -> bool {
        matches!(self, Effort::Censored(_))
    }
}

pub fn computational_effort(trace: &RunTrace, y_star: f64, tol: f64, k: usize) -> Result<Effort> {
    check_reference(y_star)?;
    if k == 0 {
        return Err(Error::Contract("effort threshold k must be >= 1".into()));
    }
    let kth = trace
        .records()
        .iter()
        .filter(|r| is_success(r.f.value(), y_star, tol))
        .nth(k - 1);
    Ok(match kth {
        Some(r) => Effort::Reached(r.index),
        None => Effort::Censored(trace.len()),
    })
}

/// Five-number summary plus mean and sample standard deviation.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BoxplotStats {
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub max: f64,
    pub mean: f64,
    pub std: f64,
}

/// Quartiles interpolate linearly between order statistics at position
/// `q * (n - 1)` of the ascending sort.
pub fn boxplot_stats(values: &[f64]) -> Result<BoxplotStats> {
    if values.is_empty() {
        return Err(Error::Contract("boxplot of an empty sample".into()));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::Contract(
            "boxplot sample contains non-finite values".into(),
        ));
    }
    let mut sorted: Vec<f64> = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();
    let quantile = |q: f64| {
        let pos = q * (n - 1) as f64;
        let lo = libm::floor(pos) as usize;
        let frac = pos - lo as f64;
        if lo + 1 < n {
            sorted[lo] + frac * (sorted[lo + 1] - sorted[lo])
        } else {
            sorted[lo]
        }
    };
    let mean = sorted.iter().sum::<f64>() / n as f64;
    let std = if n > 1 {
        let ss: f64 = sorted.iter().map(|v| (v - mean) * (v - mean)).sum();
        libm::sqrt(ss / (n - 1) as f64)
    } else {
        0.0
    };
    Ok(BoxplotStats {
        min: sorted[0],
        q1: quantile(0.25),
        median: quantile(0.5),
        q3: quantile(0.75),
        max: sorted[n - 1],
        mean,
        std,
    })
}
