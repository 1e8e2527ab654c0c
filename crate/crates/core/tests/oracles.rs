//! Independent oracles for the search space, objective and optimizers.

use shapebench_core::objective::{Objective, Synthetic, SyntheticParams};
use shapebench_core::optim::{run_ga_detailed, run_gs, run_rs, GaConfig, GsConfig, RsConfig};
use shapebench_core::space::{GridSpec, ShapeVector, SpaceSpec};
use shapebench_core::{estimate_benchmark, rng_from_seed, BenchmarkMethod, EvalError};

/// Nested loops over every tuple of axis values, filtered by feasibility.
fn brute_force_lattice(space: &SpaceSpec) -> Vec<Vec<f64>> {
    let axis = space.grid.axis_values(space.bound);
    let mut out = Vec::new();
    let mut idx = vec![0usize; space.n];
    loop {
        let v: Vec<f64> = idx.iter().map(|&i| axis[i]).collect();
        if space.is_feasible(&v).unwrap() {
            out.push(v);
        }
        let mut k = space.n;
        loop {
            if k == 0 {
                return out;
            }
            k -= 1;
            idx[k] += 1;
            if idx[k] < axis.len() {
                break;
            }
            idx[k] = 0;
        }
    }
}

fn binom(n: u64, k: u64) -> u64 {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

#[test]
fn default_lattice_has_2255_points() {
    let space = SpaceSpec::default();
    let pts = space.grid_points().unwrap();
    // Zero-sum 4-tuples of j in -7..=7, by inclusion-exclusion.
    assert_eq!(binom(31, 3) - 4 * binom(16, 3), 2255);
    assert_eq!(pts.len(), 2255);
    let brute = brute_force_lattice(&space);
    assert_eq!(brute.len(), 2255);
    for (a, b) in pts.iter().zip(&brute) {
        assert_eq!(a.as_slice(), b.as_slice());
    }
}

#[test]
fn small_lattice_has_85_points() {
    let space = SpaceSpec::new(4, 3.2, GridSpec::default());
    assert_eq!(binom(11, 3) - 4 * binom(6, 3), 85);
    let pts = space.grid_points().unwrap();
    let brute = brute_force_lattice(&space);
    assert_eq!(pts.len(), 85);
    assert_eq!(pts.iter().map(|p| p.to_vec()).collect::<Vec<_>>(), brute);
}

#[test]
fn lattice_matches_brute_force_on_assorted_grids() {
    let grids = [
        (2, 5.0, 1.0, 0.0),
        (3, 4.0, 1.5, 0.0),
        (3, 4.0, 1.0, 0.5),
        (4, 2.0, 0.5, 0.25),
        (4, 11.5, 1.6, 0.8),
        (4, 6.0, 0.9, -0.3),
    ];
    for (n, bound, step, anchor) in grids {
        let space = SpaceSpec::new(n, bound, GridSpec { step, anchor });
        let brute = brute_force_lattice(&space);
        match space.grid_points() {
            Ok(pts) => assert_eq!(pts.iter().map(|p| p.to_vec()).collect::<Vec<_>>(), brute),
            Err(_) => assert!(brute.is_empty(), "{n} {bound} {step} {anchor}"),
        }
    }
}

#[test]
fn uniform_sampling_marginals() {
    let space = SpaceSpec::default();
    let mut rng = rng_from_seed(2024);
    let n = 100_000;
    let mut sums = [0.0f64; 4];
    let mut below = [0usize; 4];
    for _ in 0..n {
        let v = space.sample_uniform(&mut rng);
        assert!(space.is_feasible(&v).unwrap());
        for k in 0..4 {
            sums[k] += v[k];
            if v[k] <= 0.0 {
                below[k] += 1;
            }
        }
    }
    for k in 0..4 {
        let mean = sums[k] / n as f64;
        let cdf0 = below[k] as f64 / n as f64;
        assert!(mean.abs() <= 0.2, "axis {k} mean {mean}");
        assert!((0.49..=0.51).contains(&cdf0), "axis {k} cdf(0) {cdf0}");
    }
}

#[test]
fn uniform_sampling_is_reproducible() {
    let space = SpaceSpec::default();
    let mut a = rng_from_seed(5);
    let mut b = rng_from_seed(5);
    for _ in 0..1000 {
        let (x, y) = (space.sample_uniform(&mut a), space.sample_uniform(&mut b));
        assert_eq!(
            x.iter().map(|v| v.to_bits()).collect::<Vec<_>>(),
            y.iter().map(|v| v.to_bits()).collect::<Vec<_>>()
        );
    }
}

#[test]
fn synthetic_never_below_baseline() {
    let space = SpaceSpec::default();
    let params = SyntheticParams::default();
    let mut rng = rng_from_seed(77);
    for _ in 0..100_000 {
        let v = space.sample_uniform(&mut rng);
        assert!(params.value(&v).unwrap() >= 760.0);
    }
    assert_eq!(params.value(&params.target).unwrap(), 760.0);
}

#[test]
fn synthetic_axis_scan_is_multimodal() {
    let params = SyntheticParams::default();
    // Dense scan of axis 0 through the target, step 0.01 over [-11.5, 11.5].
    let values: Vec<f64> = (0..=2300)
        .map(|k| {
            let mut x = params.target.to_vec();
            x[0] = -11.5 + 0.01 * k as f64;
            params.value(&x).unwrap()
        })
        .collect();
    let minima = values
        .windows(3)
        .filter(|w| w[1] < w[0] && w[1] < w[2])
        .count();
    assert!(minima >= 3, "{minima}");
}

#[test]
fn exhaustive_grid_search_finds_lattice_minimum() {
    let space = SpaceSpec::new(4, 3.2, GridSpec::default());
    let params = SyntheticParams {
        target: ShapeVector::new(vec![3.2, -1.6, -1.6, 0.0]),
        ..SyntheticParams::default()
    };
    params.validate(&space).unwrap();
    let brute_min = space
        .grid_points()
        .unwrap()
        .iter()
        .map(|p| params.value(p).unwrap())
        .fold(f64::INFINITY, f64::min);
    assert_eq!(brute_min, 760.0);
    for seed in 0..20 {
        let mut obj = Synthetic::new(params.clone());
        let cfg = GsConfig {
            budget: 85,
            without_replacement: true,
        };
        let t = run_gs(&cfg, &space, &mut obj, seed).unwrap();
        let best = t.best().unwrap();
        assert_eq!(best.f.value(), 760.0);
        assert_eq!(best.x.as_slice(), params.target.as_slice());
    }
}

#[test]
fn exhaustive_benchmark_agrees_with_analytic() {
    let space = SpaceSpec::default();
    let make = || Ok::<_, EvalError>(Synthetic::new(SyntheticParams::default()));
    let grid = estimate_benchmark(&space, make, &BenchmarkMethod::ExhaustiveGrid).unwrap();
    let analytic = estimate_benchmark(&space, make, &BenchmarkMethod::Analytic).unwrap();
    assert_eq!(grid.y_star, analytic.y_star);
    assert_eq!(grid.y_star.value(), 760.0);
    assert_eq!(grid.evals_used, 2255);
    for (a, b) in grid.x_star.iter().zip(analytic.x_star.iter()) {
        assert!((a - b).abs() < 1e-12);
    }
    // No run_gs can beat the exhaustive lattice minimum.
    for seed in 0..5 {
        let mut obj = Synthetic::new(SyntheticParams::default());
        let t = run_gs(&GsConfig::default(), &space, &mut obj, seed).unwrap();
        assert!(grid.y_star <= t.best_value().unwrap());
    }
}

#[test]
fn traces_replay_bit_for_bit() {
    let space = SpaceSpec::default();
    let params = SyntheticParams::default();
    let mut o1 = Synthetic::new(params.clone());
    let mut o2 = Synthetic::new(params.clone());
    let mut o3 = Synthetic::new(params.clone());
    let traces = [
        run_ga_detailed(&GaConfig::default(), &space, &mut o1, 3)
            .unwrap()
            .trace,
        run_rs(&RsConfig::default(), &space, &mut o2, 3).unwrap(),
        run_gs(&GsConfig::default(), &space, &mut o3, 3).unwrap(),
    ];
    for t in &traces {
        for r in t.records() {
            assert_eq!(params.value(&r.x).unwrap().to_bits(), r.f.value().to_bits());
        }
    }
}

#[test]
fn runs_are_deterministic() {
    let space = SpaceSpec::default();
    let run = |seed| {
        let mut a = Synthetic::new(SyntheticParams::default());
        let mut b = Synthetic::new(SyntheticParams::default());
        let mut c = Synthetic::new(SyntheticParams::default());
        (
            run_ga_detailed(&GaConfig::default(), &space, &mut a, seed).unwrap(),
            run_rs(&RsConfig::default(), &space, &mut b, seed).unwrap(),
            run_gs(&GsConfig::default(), &space, &mut c, seed).unwrap(),
        )
    };
    assert_eq!(run(99), run(99));
    assert_ne!(run(99).1, run(100).1);
    let mut obj = Synthetic::new(SyntheticParams::default());
    let _ = obj.evaluate(&ShapeVector::zeros(4));
    assert_eq!(obj.eval_count(), 1);
}
