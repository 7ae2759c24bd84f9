//! Derivative-free parameter optimization for sampled objectives.
//!
//! The main driver is a trust-region method on linear interpolation
//! models: each round evaluates an axis-aligned stencil around the best
//! point, fits a gradient by forward differences, and steps to the trust
//! region boundary along steepest descent. Failed steps shrink the region;
//! once it collapses, any remaining evaluation budget goes to a
//! Nelder-Mead polish from the incumbent. Iteration counts are function
//! evaluations, which is the honest unit when each evaluation is a
//! full sample-and-score pass.
//!
//! Sampling noise is held fixed across evaluations (common random
//! numbers): one derived seed drives every measurement during the search,
//! so re-evaluating the same parameters returns the same value and the
//! model fit sees a deterministic function.

use serde::{Deserialize, Serialize};

use crate::circuit::ParamCircuit;
use crate::cvar::{adaptive_alpha, cvar_alpha, AlphaMode};
use crate::depth::{depth_report, DepthReport, Topology};
use crate::ising::IsingHamiltonian;
use crate::sample::{derive_seed, sample, SampleSet};
use crate::statevector::Statevector;
use crate::{Error, Result};

pub const PARAM_BOUND: f64 = std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptOptions {
    /// Function-evaluation budget.
    pub max_iters: usize,
    pub initial_radius: f64,
    pub min_radius: f64,
}

impl Default for OptOptions {
    fn default() -> Self {
        OptOptions { max_iters: 300, initial_radius: 0.3, min_radius: 1e-4 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OptRun {
    pub best_params: Vec<f64>,
    pub best_value: f64,
    /// Function evaluations spent.
    pub iterations: usize,
    /// Best value seen after each evaluation; same length as `iterations`.
    pub trace: Vec<f64>,
}

struct Budget<'a, F: FnMut(&[f64]) -> f64> {
    f: &'a mut F,
    used: usize,
    max: usize,
    best: f64,
    best_x: Vec<f64>,
    trace: Vec<f64>,
}

impl<'a, F: FnMut(&[f64]) -> f64> Budget<'a, F> {
    fn new(f: &'a mut F, max: usize, dim: usize) -> Self {
        Budget { f, used: 0, max, best: f64::INFINITY, best_x: vec![0.0; dim], trace: Vec::new() }
    }

    fn exhausted(&self) -> bool {
        self.used >= self.max
    }

    fn eval(&mut self, x: &[f64]) -> Option<f64> {
        if self.exhausted() {
            return None;
        }
        let v = (self.f)(x);
        self.used += 1;
        if v < self.best {
            self.best = v;
            self.best_x = x.to_vec();
        }
        self.trace.push(self.best);
        Some(v)
    }

    fn finish(self) -> OptRun {
        OptRun {
            best_params: self.best_x,
            best_value: self.best,
            iterations: self.used,
            trace: self.trace,
        }
    }
}

fn clip(x: &mut [f64]) {
    for v in x.iter_mut() {
        *v = v.clamp(-PARAM_BOUND, PARAM_BOUND);
    }
}

/// Minimizes `f` from `x0` within `[-pi, pi]` bounds per coordinate.
pub fn minimize<F: FnMut(&[f64]) -> f64>(f: &mut F, x0: &[f64], opts: &OptOptions) -> OptRun {
    let dim = x0.len();
    let mut budget = Budget::new(f, opts.max_iters, dim);
    let mut center = x0.to_vec();
    clip(&mut center);
    let Some(mut f_center) = budget.eval(&center) else {
        return budget.finish();
    };
    if dim == 0 {
        return budget.finish();
    }

    let mut radius = opts.initial_radius;
    'outer: while radius >= opts.min_radius && !budget.exhausted() {
        // Forward-difference stencil along each axis; the step direction
        // flips away from a bound so the probe stays inside the box.
        let mut grad = vec![0.0; dim];
        for i in 0..dim {
            let mut probe = center.clone();
            let step = if probe[i] + radius <= PARAM_BOUND { radius } else { -radius };
            probe[i] += step;
            let Some(v) = budget.eval(&probe) else { break 'outer };
            grad[i] = (v - f_center) / step;
        }
        let norm = grad.iter().map(|g| g * g).sum::<f64>().sqrt();
        if norm < 1e-14 {
            radius /= 2.0;
            continue;
        }
        let mut candidate: Vec<f64> =
            center.iter().zip(&grad).map(|(c, g)| c - radius * g / norm).collect();
        clip(&mut candidate);
        let Some(v) = budget.eval(&candidate) else { break };
        let predicted = radius * norm;
        let actual = f_center - v;
        if actual > 0.0 {
            center = candidate;
            f_center = v;
            if actual > 0.5 * predicted {
                radius = (radius * 1.6).min(1.0);
            }
        } else {
            radius /= 2.0;
        }
    }

    // Spend whatever budget remains polishing from the incumbent.
    if !budget.exhausted() {
        let start = budget.best_x.clone();
        nelder_mead_inner(&mut budget, &start, opts);
    }
    budget.finish()
}

/// Standalone Nelder-Mead with the same bounds and accounting.
pub fn nelder_mead<F: FnMut(&[f64]) -> f64>(f: &mut F, x0: &[f64], opts: &OptOptions) -> OptRun {
    let mut budget = Budget::new(f, opts.max_iters, x0.len());
    nelder_mead_inner(&mut budget, x0, opts);
    budget.finish()
}

fn nelder_mead_inner<F: FnMut(&[f64]) -> f64>(
    budget: &mut Budget<'_, F>,
    x0: &[f64],
    opts: &OptOptions,
) {
    let dim = x0.len();
    if dim == 0 {
        let mut x = x0.to_vec();
        clip(&mut x);
        budget.eval(&x);
        return;
    }
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(dim + 1);
    let mut x = x0.to_vec();
    clip(&mut x);
    let Some(v) = budget.eval(&x) else { return };
    simplex.push((x, v));
    for i in 0..dim {
        let mut p = x0.to_vec();
        let h = opts.initial_radius.max(0.05);
        p[i] += if p[i] + h <= PARAM_BOUND { h } else { -h };
        clip(&mut p);
        let Some(v) = budget.eval(&p) else { return };
        simplex.push((p, v));
    }

    while !budget.exhausted() {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let spread = simplex[dim].1 - simplex[0].1;
        if spread.abs() < 1e-12 {
            break;
        }
        let centroid: Vec<f64> = (0..dim)
            .map(|i| simplex[..dim].iter().map(|(p, _)| p[i]).sum::<f64>() / dim as f64)
            .collect();
        let worst = simplex[dim].clone();
        let mut reflect: Vec<f64> =
            centroid.iter().zip(&worst.0).map(|(c, w)| 2.0 * c - w).collect();
        clip(&mut reflect);
        let Some(fr) = budget.eval(&reflect) else { return };

        if fr < simplex[0].1 {
            let mut expand: Vec<f64> =
                centroid.iter().zip(&worst.0).map(|(c, w)| 3.0 * c - 2.0 * w).collect();
            clip(&mut expand);
            match budget.eval(&expand) {
                Some(fe) if fe < fr => simplex[dim] = (expand, fe),
                Some(_) => simplex[dim] = (reflect, fr),
                None => return,
            }
        } else if fr < simplex[dim - 1].1 {
            simplex[dim] = (reflect, fr);
        } else {
            let mut contract: Vec<f64> =
                centroid.iter().zip(&worst.0).map(|(c, w)| 0.5 * (c + w)).collect();
            clip(&mut contract);
            let Some(fc) = budget.eval(&contract) else { return };
            if fc < worst.1 {
                simplex[dim] = (contract, fc);
            } else {
                let best = simplex[0].0.clone();
                for entry in simplex.iter_mut().skip(1) {
                    let shrunk: Vec<f64> =
                        best.iter().zip(&entry.0).map(|(b, p)| 0.5 * (b + p)).collect();
                    let Some(fs) = budget.eval(&shrunk) else { return };
                    *entry = (shrunk, fs);
                }
            }
        }
    }
}

// --- initial parameters ---------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "kind")]
pub enum InitKind {
    Zeros,
    /// Annealing-like ramp: `gamma_l = delta l / p`, `beta_l = delta (1 - l / p)`.
    Ramp { delta: f64 },
    /// Small uniform perturbation in `[-0.1, 0.1]` per parameter.
    Random { seed: u64 },
}

/// Initial interleaved `[gamma_1, beta_1, ..., gamma_p, beta_p]` values.
pub fn init_params(kind: InitKind, p: usize) -> Vec<f64> {
    match kind {
        InitKind::Zeros => vec![0.0; 2 * p],
        InitKind::Ramp { delta } => {
            let mut out = Vec::with_capacity(2 * p);
            for ell in 1..=p {
                let frac = ell as f64 / p as f64;
                out.push(delta * frac);
                out.push(delta * (1.0 - frac));
            }
            out
        }
        InitKind::Random { seed } => {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            (0..2 * p).map(|_| rng.gen_range(-0.1..0.1)).collect()
        }
    }
}

// --- sampled-CVaR variational run ------------------------------------------

pub struct VariationalSetup<'a> {
    /// Assembled circuit: optional bound prefix plus free tail.
    pub circuit: &'a ParamCircuit,
    pub h_c: &'a IsingHamiltonian,
    pub shots: u64,
    pub alpha: AlphaMode,
    pub layer_fidelity: f64,
    pub topology: Topology,
    pub opts: OptOptions,
    /// Base seed; evaluation and final-sample streams derive from it.
    pub seed: u64,
    pub init: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VariationalRun {
    pub opt: OptRun,
    pub alpha: f64,
    pub depth: DepthReport,
    /// Samples drawn at the best parameters with a fresh seed stream.
    pub samples: SampleSet,
}

/// Optimizes the circuit's free parameters against the sampled CVaR of
/// `h_c` and returns the run with final samples at the best parameters.
pub fn run_variational(setup: &VariationalSetup<'_>) -> Result<VariationalRun> {
    let depth = depth_report(setup.circuit, setup.topology);
    let alpha = match setup.alpha {
        AlphaMode::Fixed(a) => {
            if !(a > 0.0 && a <= 1.0) {
                return Err(Error::Config(format!("alpha must lie in (0, 1], got {a}")));
            }
            a
        }
        AlphaMode::Adaptive(_) => {
            adaptive_alpha(setup.layer_fidelity, setup.h_c.n, depth.two_qubit_depth)?
        }
    };

    let compiled = setup.circuit.compile();
    let start = Statevector::plus_state(setup.h_c.n)?;
    let cached = compiled.prefix_state(&start)?;
    let from = compiled.prefix_ops();
    let eval_seed = derive_seed(setup.seed, "cvar-eval");

    let mut failure: Option<Error> = None;
    let mut objective = |theta: &[f64]| -> f64 {
        let mut sv = cached.clone();
        if let Err(e) = compiled.apply_from(from, &mut sv, theta) {
            failure.get_or_insert(e);
            return f64::INFINITY;
        }
        let samples = sample(&sv, setup.shots, eval_seed);
        match cvar_alpha(&samples, setup.h_c, alpha) {
            Ok(v) => v,
            Err(e) => {
                failure.get_or_insert(e);
                f64::INFINITY
            }
        }
    };
    let opt = minimize(&mut objective, &setup.init, &setup.opts);
    if let Some(e) = failure {
        return Err(e);
    }

    let mut final_sv = cached.clone();
    compiled.apply_from(from, &mut final_sv, &opt.best_params)?;
    let samples = sample(&final_sv, setup.shots, derive_seed(setup.seed, "final-samples"));
    Ok(VariationalRun { opt, alpha, depth, samples })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::build_qaoa_tail;
    use crate::encode::encode_vrp;
    use crate::instances::VrpInstance;
    use crate::ising::qubo_to_ising;
    use crate::qubo::to_qubo;
    use crate::statevector::Observable;
    use approx::assert_abs_diff_eq;
    use std::collections::BTreeMap;

    #[test]
    fn quadratic_bowl_converges() {
        let target = [0.8, -0.4, 0.15];
        let mut f = |x: &[f64]| {
            x.iter().zip(&target).map(|(a, b)| (a - b) * (a - b)).sum::<f64>()
        };
        let run = minimize(&mut f, &[0.0, 0.0, 0.0], &OptOptions::default());
        assert!(run.best_value < 1e-5, "best {}", run.best_value);
        for (a, b) in run.best_params.iter().zip(&target) {
            assert!((a - b).abs() < 0.01);
        }
    }

    #[test]
    fn budget_is_respected_and_trace_is_monotone() {
        let mut count = 0usize;
        let mut f = |x: &[f64]| {
            count += 1;
            x[0].cos() + (x[1] - 0.3).powi(2)
        };
        let opts = OptOptions { max_iters: 57, ..Default::default() };
        let run = minimize(&mut f, &[0.1, -0.2], &opts);
        assert_eq!(run.iterations, count);
        assert!(run.iterations <= 57);
        assert_eq!(run.trace.len(), run.iterations);
        for w in run.trace.windows(2) {
            assert!(w[1] <= w[0]);
        }
    }

    #[test]
    fn bounds_are_enforced() {
        let mut f = |x: &[f64]| -x[0];
        let run = minimize(&mut f, &[0.0], &OptOptions::default());
        assert!(run.best_params[0] <= PARAM_BOUND + 1e-12);
        assert!(run.best_params[0] > PARAM_BOUND - 0.01);
    }

    #[test]
    fn nelder_mead_handles_a_valley() {
        let mut f =
            |x: &[f64]| (x[0] - 0.5).powi(2) + 3.0 * (x[1] + 0.2).powi(2) + x[0] * x[1] * 0.1;
        let run = nelder_mead(&mut f, &[-1.0, 1.0], &OptOptions::default());
        assert!(run.best_value < 1e-4, "best {}", run.best_value);
    }

    #[test]
    fn ramp_init_matches_worked_values() {
        let v = init_params(InitKind::Ramp { delta: 0.5 }, 2);
        assert_eq!(v.len(), 4);
        assert_abs_diff_eq!(v[0], 0.25); // gamma_1
        assert_abs_diff_eq!(v[1], 0.25); // beta_1
        assert_abs_diff_eq!(v[2], 0.5); // gamma_2
        assert_abs_diff_eq!(v[3], 0.0); // beta_2
    }

    #[test]
    fn zero_and_random_inits() {
        assert_eq!(init_params(InitKind::Zeros, 3), vec![0.0; 6]);
        let a = init_params(InitKind::Random { seed: 5 }, 3);
        let b = init_params(InitKind::Random { seed: 5 }, 3);
        assert_eq!(a, b);
        assert!(a.iter().all(|v| v.abs() <= 0.1));
    }

    /// The exact p=1 landscape for a single qubit is sin(2b) sin(2g) with
    /// minimum -1; the optimizer from a ramp start should get close to the
    /// grid-scan optimum.
    #[test]
    fn single_qubit_qaoa_reaches_grid_optimum() {
        let h = crate::ising::IsingHamiltonian {
            n: 1,
            h: [(0, 1.0)].into_iter().collect(),
            j: BTreeMap::new(),
            offset: 0.0,
        };
        let circuit = build_qaoa_tail(&h, 1).unwrap();
        let compiled = circuit.compile();
        let mut f = |theta: &[f64]| {
            let mut sv = Statevector::plus_state(1).unwrap();
            compiled.apply(&mut sv, theta).unwrap();
            sv.expectation(Observable::Cost(&h))
        };

        let mut grid_best = f64::INFINITY;
        for i in 0..=40 {
            for k in 0..=40 {
                let g = -PARAM_BOUND + 2.0 * PARAM_BOUND * i as f64 / 40.0;
                let b = -PARAM_BOUND + 2.0 * PARAM_BOUND * k as f64 / 40.0;
                grid_best = grid_best.min(f(&[g, b]));
            }
        }
        assert!(grid_best < -0.99);

        let init = init_params(InitKind::Ramp { delta: 0.5 }, 1);
        let run = minimize(&mut f, &init, &OptOptions::default());
        assert!(
            run.best_value <= grid_best + 0.05,
            "optimizer {} vs grid {grid_best}",
            run.best_value
        );
    }

    #[test]
    fn variational_run_is_reproducible() {
        let bp = encode_vrp(&VrpInstance::random_grid(3, 1, 9)).unwrap();
        let h = qubo_to_ising(&to_qubo(&bp).unwrap());
        let circuit = build_qaoa_tail(&h, 1).unwrap();
        let setup = VariationalSetup {
            circuit: &circuit,
            h_c: &h,
            shots: 600,
            alpha: AlphaMode::Fixed(0.2),
            layer_fidelity: 1.0,
            topology: Topology::AllToAll,
            opts: OptOptions { max_iters: 60, ..Default::default() },
            seed: 77,
            init: init_params(InitKind::Ramp { delta: 0.5 }, 1),
        };
        let a = run_variational(&setup).unwrap();
        let b = run_variational(&setup).unwrap();
        assert_eq!(a.opt.best_params, b.opt.best_params);
        assert_eq!(a.opt.best_value, b.opt.best_value);
        assert_eq!(a.samples, b.samples);
        assert!(a.opt.iterations <= 60);
        // Optimization should not end worse than the start.
        assert!(a.opt.best_value <= a.opt.trace[0] + 1e-12);
    }

    #[test]
    fn adaptive_alpha_uses_circuit_depth() {
        let bp = encode_vrp(&VrpInstance::random_grid(3, 1, 9)).unwrap();
        let h = qubo_to_ising(&to_qubo(&bp).unwrap());
        let circuit = build_qaoa_tail(&h, 1).unwrap();
        let setup = VariationalSetup {
            circuit: &circuit,
            h_c: &h,
            shots: 200,
            alpha: AlphaMode::default(),
            layer_fidelity: 1.0,
            topology: Topology::AllToAll,
            opts: OptOptions { max_iters: 12, ..Default::default() },
            seed: 3,
            init: init_params(InitKind::Zeros, 1),
        };
        let run = run_variational(&setup).unwrap();
        let expected = 1.0 / (run.depth.two_qubit_depth as f64).sqrt();
        assert_abs_diff_eq!(run.alpha, expected.min(1.0), epsilon = 1e-12);
    }
}
