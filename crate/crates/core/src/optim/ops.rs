use alloc::format;
use alloc::vec::Vec;

use rand::Rng;

use crate::error::{Error, Result};
use crate::objective::EnergyKwh;
use crate::space::ShapeVector;

/// Swaps the tails of `a` and `b` after position `cut` (1-based, so `cut`
/// genes come from the first parent).
///
/// Children are returned raw; they usually break the zero-sum constraint and
/// must be repaired by the caller.
pub fn one_point_crossover(a: &[f64], b: &[f64], cut: usize) -> Result<(ShapeVector, ShapeVector)> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch {
            expected: a.len(),
            got: b.len(),
        });
    }
    let n = a.len();
    if n < 2 || cut == 0 || cut >= n {
        return Err(Error::Contract(format!(
            "crossover cut {cut} outside [1, {}]",
            n.saturating_sub(1)
        )));
    }
    let mut c1 = Vec::with_capacity(n);
    c1.extend_from_slice(&a[..cut]);
    c1.extend_from_slice(&b[cut..]);
    let mut c2 = Vec::with_capacity(n);
    c2.extend_from_slice(&b[..cut]);
    c2.extend_from_slice(&a[cut..]);
    Ok((c1.into(), c2.into()))
}

/// Replaces each gene, independently with probability `rate`, by a uniform
/// draw from `[-bound, bound]`. The result is raw (not repaired).
///
/// # Panics
///
/// If `rate` is outside `[0, 1]`.
pub fn mutate<R: Rng + ?Sized>(v: &[f64], rate: f64, bound: f64, rng: &mut R) -> ShapeVector {
    v.iter()
        .map(|&x| {
            if rng.random_bool(rate) {
                rng.random_range(-bound..=bound)
            } else {
                x
            }
        })
        .collect::<Vec<_>>()
        .into()
}

/// The `num_elit` fittest members (smallest energy first), ties kept in
/// population order. Asking for more than the population returns all of it.
pub fn select_elites(
    pop: &[(ShapeVector, EnergyKwh)],
    num_elit: usize,
) -> Vec<(ShapeVector, EnergyKwh)> {
    let mut order: Vec<usize> = (0..pop.len()).collect();
    // slice::sort_by is stable.
    order.sort_by(|&i, &j| pop[i].1.value().total_cmp(&pop[j].1.value()));
    order
        .into_iter()
        .take(num_elit)
        .map(|i| pop[i].clone())
        .collect()
}
