//! Objective functions: annual energy use in kWh as a function of the design
//! vector, plus wrappers that count or cache evaluations.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, EvalError, Result};
use crate::space::{ShapeVector, SpaceSpec};

/// Joules per kilowatt-hour.
pub const JOULES_PER_KWH: f64 = 3.6e6;

/// Annual energy in kilowatt-hours. Always finite and non-negative.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(transparent))]
pub struct EnergyKwh(f64);

impl EnergyKwh {
    pub fn new(value: f64) -> Result<Self, EvalError> {
        if value.is_finite() && value >= 0.0 {
            Ok(EnergyKwh(value))
        } else {
            Err(EvalError::Protocol(format!(
                "energy must be finite and non-negative, got {value}"
            )))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl fmt::Display for EnergyKwh {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.0, f)
    }
}

/// Annual zone loads in Joules, as a building simulator reports them.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ZoneLoads {
    pub q_heat: f64,
    pub q_cool: f64,
    pub e_light_fans: f64,
}

/// `(heating + cooling + lighting/fans) / 3.6e6`.
pub fn loads_to_kwh(loads: &ZoneLoads) -> Result<EnergyKwh> {
    let parts = [loads.q_heat, loads.q_cool, loads.e_light_fans];
    if parts.iter().any(|p| !p.is_finite() || *p < 0.0) {
        return Err(Error::Contract(format!(
            "zone loads must be finite and non-negative: {loads:?}"
        )));
    }
    let kwh = (loads.q_heat + loads.q_cool + loads.e_light_fans) / JOULES_PER_KWH;
    Ok(EnergyKwh(kwh))
}

/// Something that maps a feasible design vector to annual energy.
pub trait Objective {
    fn evaluate(&mut self, x: &ShapeVector) -> Result<EnergyKwh, EvalError>;

    /// Number of `evaluate` calls made so far.
    fn eval_count(&self) -> u64;

    /// The exact constrained minimiser, when the objective knows it.
    fn known_minimum(&self) -> Option<(ShapeVector, EnergyKwh)> {
        None
    }
}

impl<O: Objective + ?Sized> Objective for &mut O {
    fn evaluate(&mut self, x: &ShapeVector) -> Result<EnergyKwh, EvalError> {
        (**self).evaluate(x)
    }

    fn eval_count(&self) -> u64 {
        (**self).eval_count()
    }

    fn known_minimum(&self) -> Option<(ShapeVector, EnergyKwh)> {
        (**self).known_minimum()
    }
}

impl<O: Objective + ?Sized> Objective for alloc::boxed::Box<O> {
    fn evaluate(&mut self, x: &ShapeVector) -> Result<EnergyKwh, EvalError> {
        (**self).evaluate(x)
    }

    fn eval_count(&self) -> u64 {
        (**self).eval_count()
    }

    fn known_minimum(&self) -> Option<(ShapeVector, EnergyKwh)> {
        (**self).known_minimum()
    }
}

/// Parameters of the rugged synthetic landscape
///
/// `f(x) = baseline + sum_i [ weight (x_i - t_i)^2 + ruggedness (1 - cos(frequency (x_i - t_i))) ] + noise`
///
/// Both terms vanish at the target and are positive elsewhere, so with no
/// noise the constrained minimum is exactly `baseline` at `target`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SyntheticParams {
    /// kWh.
    pub baseline: f64,
    pub weight: f64,
    /// kWh.
    pub ruggedness: f64,
    /// rad/ft.
    pub frequency: f64,
    pub target: ShapeVector,
    /// Standard deviation of the point-keyed noise, kWh. Zero disables noise.
    pub noise_sigma: f64,
    pub noise_seed: u64,
}

impl Default for SyntheticParams {
    fn default() -> Self {
        SyntheticParams {
            baseline: 760.0,
            weight: 0.35,
            ruggedness: 6.0,
            frequency: 2.0,
            target: ShapeVector::new(alloc::vec![3.2, -1.6, -4.8, 3.2]),
            noise_sigma: 0.0,
            noise_seed: 0,
        }
    }
}

impl SyntheticParams {
    /// Defaults for an `n`-dimensional space. The four-dimensional target is
    /// kept for `n = 4`; other dimensions target the origin.
    pub fn for_dimension(n: usize) -> Self {
        let mut p = SyntheticParams::default();
        if n != 4 {
            p.target = ShapeVector::zeros(n);
        }
        p
    }

    pub fn validate(&self, space: &SpaceSpec) -> Result<()> {
        let bad = |field: &str, cond: &str, v: f64| {
            Err(Error::InvalidConfig(format!(
                "synthetic.{field} must be {cond}, got {v}"
            )))
        };
        if !(self.baseline.is_finite() && self.baseline >= 0.0) {
            return bad("baseline", ">= 0", self.baseline);
        }
        if !(self.weight.is_finite() && self.weight > 0.0) {
            return bad("weight", "> 0", self.weight);
        }
        if !(self.ruggedness.is_finite() && self.ruggedness >= 0.0) {
            return bad("ruggedness", ">= 0", self.ruggedness);
        }
        if !(self.frequency.is_finite() && self.frequency > 0.0) {
            return bad("frequency", "> 0", self.frequency);
        }
        if !(self.noise_sigma.is_finite() && self.noise_sigma >= 0.0) {
            return bad("noise_sigma", ">= 0", self.noise_sigma);
        }
        if !space.is_feasible(&self.target)? {
            return Err(Error::InvalidConfig(format!(
                "synthetic.target {:?} is not feasible in the space",
                self.target.as_slice()
            )));
        }
        Ok(())
    }

    /// Evaluates the landscape at `x`.
    pub fn value(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.target.len() {
            return Err(Error::DimensionMismatch {
                expected: self.target.len(),
                got: x.len(),
            });
        }
        let mut f = self.baseline;
        for (xi, ti) in x.iter().zip(self.target.iter()) {
            let d = xi - ti;
            f += self.weight * d * d + self.ruggedness * (1.0 - libm::cos(self.frequency * d));
        }
        if self.noise_sigma > 0.0 {
            f += self.noise_sigma * point_keyed_normal(self.noise_seed, x);
            f = f.max(0.0);
        }
        Ok(f)
    }
}

/// A standard normal draw that depends only on `(seed, x)`.
fn point_keyed_normal(seed: u64, x: &[f64]) -> f64 {
    let mut h = crate::seed::splitmix64(seed ^ 0x6e6f_6973_655f_6b65);
    for v in x {
        // +0.0 and -0.0 must key the same point.
        let bits = if *v == 0.0 { 0 } else { v.to_bits() };
        h = crate::seed::splitmix64(h ^ bits);
    }
    let a = crate::seed::splitmix64(h);
    let b = crate::seed::splitmix64(a);
    // 53-bit uniforms in (0, 1].
    let u1 = ((a >> 11) as f64 + 1.0) / (1u64 << 53) as f64;
    let u2 = (b >> 11) as f64 / (1u64 << 53) as f64;
    libm::sqrt(-2.0 * libm::log(u1)) * libm::cos(core::f64::consts::TAU * u2)
}

/// The synthetic landscape as an [`Objective`].
#[derive(Debug, Clone)]
pub struct Synthetic {
    params: SyntheticParams,
    count: u64,
}

impl Synthetic {
    pub fn new(params: SyntheticParams) -> Self {
        Synthetic { params, count: 0 }
    }

    pub fn params(&self) -> &SyntheticParams {
        &self.params
    }
}

impl Objective for Synthetic {
    fn evaluate(&mut self, x: &ShapeVector) -> Result<EnergyKwh, EvalError> {
        self.count += 1;
        let f = self
            .params
            .value(x)
            .map_err(|e| EvalError::InvalidInput(format!("{e}")))?;
        EnergyKwh::new(f)
    }

    fn eval_count(&self) -> u64 {
        self.count
    }

    fn known_minimum(&self) -> Option<(ShapeVector, EnergyKwh)> {
        if self.params.noise_sigma > 0.0 {
            return None;
        }
        Some((self.params.target.clone(), EnergyKwh(self.params.baseline)))
    }
}

/// Counts forwarded evaluations and optionally refuses calls past a cap.
#[derive(Debug, Clone)]
pub struct Counting<O> {
    inner: O,
    count: u64,
    cap: Option<u64>,
}

impl<O: Objective> Counting<O> {
    pub fn new(inner: O) -> Self {
        Counting {
            inner,
            count: 0,
            cap: None,
        }
    }

    pub fn with_cap(inner: O, cap: u64) -> Self {
        Counting {
            inner,
            count: 0,
            cap: Some(cap),
        }
    }

    pub fn cap(&self) -> Option<u64> {
        self.cap
    }

    pub fn inner(&self) -> &O {
        &self.inner
    }

    pub fn into_inner(self) -> O {
        self.inner
    }
}

impl<O: Objective> Objective for Counting<O> {
    fn evaluate(&mut self, x: &ShapeVector) -> Result<EnergyKwh, EvalError> {
        if let Some(cap) = self.cap {
            if self.count >= cap {
                return Err(EvalError::BudgetExceeded { cap });
            }
        }
        self.count += 1;
        self.inner.evaluate(x)
    }

    fn eval_count(&self) -> u64 {
        self.count
    }

    fn known_minimum(&self) -> Option<(ShapeVector, EnergyKwh)> {
        self.inner.known_minimum()
    }
}

/// Caches results by the exact bit pattern of the input vector.
///
/// `eval_count` reports every call, cached or not; [`Memoized::cache_hits`]
/// reports how many calls never reached the inner objective.
#[derive(Debug, Clone)]
pub struct Memoized<O> {
    inner: O,
    cache: BTreeMap<Vec<u64>, EnergyKwh>,
    calls: u64,
    hits: u64,
}

impl<O: Objective> Memoized<O> {
    pub fn new(inner: O) -> Self {
        Memoized {
            inner,
            cache: BTreeMap::new(),
            calls: 0,
            hits: 0,
        }
    }

    pub fn cache_hits(&self) -> u64 {
        self.hits
    }

    pub fn inner(&self) -> &O {
        &self.inner
    }
}

impl<O: Objective> Objective for Memoized<O> {
    fn evaluate(&mut self, x: &ShapeVector) -> Result<EnergyKwh, EvalError> {
        self.calls += 1;
        let key: Vec<u64> = x
            .iter()
            .map(|v| if *v == 0.0 { 0 } else { v.to_bits() })
            .collect();
        if let Some(f) = self.cache.get(&key) {
            self.hits += 1;
            return Ok(*f);
        }
        let f = self.inner.evaluate(x)?;
        self.cache.insert(key, f);
        Ok(f)
    }

    fn eval_count(&self) -> u64 {
        self.calls
    }

    fn known_minimum(&self) -> Option<(ShapeVector, EnergyKwh)> {
        self.inner.known_minimum()
    }
}
