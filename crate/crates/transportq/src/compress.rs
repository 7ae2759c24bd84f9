//! Variational compression of an annealing prefix.
//!
//! The first `m` coarse steps of a digitized anneal are replaced by a
//! shorter circuit: the target state is those steps re-digitized at twice
//! the resolution (`2m` steps of half the step size, a better proxy for
//! the continuous evolution), and the ansatz is `ceil(m / 3)` Trotter-shaped
//! layers in which every rotation angle is an independent parameter,
//! initialized from the coarse-step angles. Parameters are trained to push
//! the state overlap `|<target|psi(theta)>|^2` above a threshold `eta`.
//!
//! The default trainer is gradient ascent (Adam) with gradients from an
//! adjoint two-state sweep, which is exact and costs about as much as two
//! circuit applications. A central-difference backend exists as a slower
//! cross-check.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::circuit::{Angle, Gate, ParamCircuit};
use crate::ising::IsingHamiltonian;
use crate::schedule::Schedule;
use crate::statevector::Statevector;
use crate::{Error, Result};

pub const DEFAULT_ETA: f64 = 0.99;
pub const DEFAULT_MAX_ITERS: usize = 2000;
/// Fidelity floor below which a best-effort result is considered unusable.
pub const FIDELITY_FLOOR: f64 = 0.95;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CompressionBackend {
    Adjoint,
    CentralDiff,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CompressionSpec {
    pub m: usize,
    pub eta: f64,
    pub max_iters: usize,
    pub backend: CompressionBackend,
}

impl CompressionSpec {
    pub fn new(m: usize) -> Self {
        CompressionSpec {
            m,
            eta: DEFAULT_ETA,
            max_iters: DEFAULT_MAX_ITERS,
            backend: CompressionBackend::Adjoint,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompressionResult {
    pub m: usize,
    pub achieved_fidelity: f64,
    /// Gradient steps performed.
    pub iterations_used: usize,
    pub hit_threshold: bool,
    pub params: Vec<f64>,
    /// Starting fidelity followed by the best seen after each gradient
    /// step.
    pub trace: Vec<f64>,
    /// The compressed prefix, fully bound at the best parameters.
    pub circuit: ParamCircuit,
}

impl CompressionResult {
    pub fn meets_floor(&self) -> bool {
        self.achieved_fidelity >= FIDELITY_FLOOR
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// State after the first `2m` steps of the schedule refined to half the
/// step size, starting from `|+...+>`.
pub fn build_target_prefix(
    h_c: &IsingHamiltonian,
    schedule: &Schedule,
    m: usize,
) -> Result<Statevector> {
    if m > schedule.n_steps {
        return Err(Error::Circuit(format!(
            "prefix of {m} steps exceeds schedule of {}",
            schedule.n_steps
        )));
    }
    let fine = schedule.refined(2);
    let circuit =
        crate::circuit::build_anneal(h_c, &fine, 0, 2 * m, crate::circuit::Segment::Prefix)?;
    let mut sv = Statevector::plus_state(h_c.n)?;
    circuit.apply(&mut sv, &[])?;
    Ok(sv)
}

/// Trotter-shaped ansatz with one free parameter per rotation, initialized
/// at the coarse angles of schedule steps `0..ceil(m / 3)`.
pub fn build_ansatz(h_c: &IsingHamiltonian, schedule: &Schedule, m: usize) -> Result<ParamCircuit> {
    if m == 0 {
        return Err(Error::Circuit("cannot build an ansatz for an empty prefix".into()));
    }
    let layers = m.div_ceil(3);
    if layers > schedule.n_steps {
        return Err(Error::Circuit(format!(
            "ansatz needs {layers} layers but the schedule has {} steps",
            schedule.n_steps
        )));
    }
    let dt = schedule.dt;
    let mut c = ParamCircuit::new(h_c.n);
    let fresh = |c: &mut ParamCircuit, init: f64| {
        let index = c.params.len();
        c.params.push(crate::circuit::ParamDef { name: format!("theta_{index}"), init });
        Angle::Param { index, scale: 1.0 }
    };
    for k in 0..layers {
        let s = schedule.points[k];
        for (&(a, b), &j) in &h_c.j {
            let angle = fresh(&mut c, 2.0 * dt * s * j);
            c.layers.push(crate::circuit::Layer {
                gate: Gate::Rzz { a, b, angle },
                segment: crate::circuit::Segment::Prefix,
            });
        }
        for (&i, &h) in &h_c.h {
            let angle = fresh(&mut c, 2.0 * dt * s * h);
            c.layers.push(crate::circuit::Layer {
                gate: Gate::Rz { qubit: i, angle },
                segment: crate::circuit::Segment::Prefix,
            });
        }
        for q in 0..h_c.n {
            let angle = fresh(&mut c, 2.0 * dt * (1.0 - s));
            c.layers.push(crate::circuit::Layer {
                gate: Gate::Rx { qubits: vec![q], angle },
                segment: crate::circuit::Segment::Prefix,
            });
        }
    }
    Ok(c)
}

// The gradient works on a block view of the ansatz: per layer, a run of
// commuting diagonal rotations followed by one RX per qubit. Each angle is
// `params[p]` directly.
struct Block {
    diag: Vec<(u64, usize)>,
    rx: Vec<(usize, usize)>,
}

fn blocks_of(ansatz: &ParamCircuit) -> Result<Vec<Block>> {
    let mut blocks: Vec<Block> = Vec::new();
    let mut open_diag = true;
    for layer in &ansatz.layers {
        let param_of = |angle: &Angle| -> Result<usize> {
            match *angle {
                Angle::Param { index, scale } if scale == 1.0 => Ok(index),
                _ => Err(Error::Circuit("ansatz angles must be bare parameters".into())),
            }
        };
        match &layer.gate {
            Gate::Rz { qubit, angle } => {
                if !open_diag || blocks.is_empty() {
                    blocks.push(Block { diag: Vec::new(), rx: Vec::new() });
                    open_diag = true;
                }
                blocks.last_mut().unwrap().diag.push((1u64 << qubit, param_of(angle)?));
            }
            Gate::Rzz { a, b, angle } => {
                if !open_diag || blocks.is_empty() {
                    blocks.push(Block { diag: Vec::new(), rx: Vec::new() });
                    open_diag = true;
                }
                blocks
                    .last_mut()
                    .unwrap()
                    .diag
                    .push(((1u64 << a) | (1u64 << b), param_of(angle)?));
            }
            Gate::Rx { qubits, angle } => {
                if qubits.len() != 1 {
                    return Err(Error::Circuit("ansatz RX gates act on one qubit".into()));
                }
                if blocks.is_empty() {
                    blocks.push(Block { diag: Vec::new(), rx: Vec::new() });
                }
                open_diag = false;
                blocks.last_mut().unwrap().rx.push((qubits[0], param_of(angle)?));
            }
            Gate::HAll => return Err(Error::Circuit("unexpected gate in ansatz".into())),
        }
    }
    Ok(blocks)
}

fn apply_blocks(blocks: &[Block], theta: &[f64], sv: &mut Statevector) {
    for block in blocks {
        let terms: Vec<(u64, f64)> =
            block.diag.iter().map(|&(mask, p)| (mask, theta[p] / 2.0)).collect();
        sv.phase_terms(&terms);
        for &(q, p) in &block.rx {
            sv.rx(theta[p], q);
        }
    }
}

fn fidelity_at(blocks: &[Block], theta: &[f64], n: usize, target: &Statevector) -> f64 {
    let mut sv = Statevector::plus_state(n).expect("qubit count already validated");
    apply_blocks(blocks, theta, &mut sv);
    target.inner(&sv).expect("same qubit count").norm_sqr()
}

/// Exact gradient of `|<target|psi(theta)>|^2` by one forward and one
/// backward sweep. Commuting gates inside a block share a single
/// amplitude pass.
fn adjoint_gradient(
    blocks: &[Block],
    theta: &[f64],
    n: usize,
    target: &Statevector,
) -> (f64, Vec<f64>) {
    let mut psi = Statevector::plus_state(n).expect("qubit count already validated");
    apply_blocks(blocks, theta, &mut psi);
    let c = target.inner(&psi).expect("same qubit count");
    let c_conj = c.conj();
    let mut grad = vec![0.0; theta.len()];
    let mut lambda = target.clone();

    for block in blocks.iter().rev() {
        // d/d(theta) of RX(theta) on qubit q contributes
        // <lambda| (-i X_q / 2) |psi>; all RX in the block commute, so each
        // is evaluated at the block's end before undoing the run.
        for &(q, p) in &block.rx {
            let bit = 1usize << q;
            let la = lambda.amps();
            let pa = psi.amps();
            let mut acc = Complex64::new(0.0, 0.0);
            for idx in 0..la.len() {
                acc += la[idx].conj() * pa[idx ^ bit];
            }
            grad[p] += (c_conj * acc).im;
        }
        for &(q, p) in &block.rx {
            psi.rx(-theta[p], q);
            lambda.rx(-theta[p], q);
        }

        if !block.diag.is_empty() {
            let la = lambda.amps();
            let pa = psi.amps();
            let mut acc = vec![Complex64::new(0.0, 0.0); block.diag.len()];
            for idx in 0..la.len() {
                let w = la[idx].conj() * pa[idx];
                for (slot, &(mask, _)) in acc.iter_mut().zip(&block.diag) {
                    let sign = 1.0 - 2.0 * ((idx as u64 & mask).count_ones() & 1) as f64;
                    *slot += w * sign;
                }
            }
            for (slot, &(_, p)) in acc.iter().zip(&block.diag) {
                grad[p] += (c_conj * slot).im;
            }
            let undo: Vec<(u64, f64)> =
                block.diag.iter().map(|&(mask, p)| (mask, -theta[p] / 2.0)).collect();
            psi.phase_terms(&undo);
            lambda.phase_terms(&undo);
        }
    }
    (c.norm_sqr(), grad)
}

fn central_diff_gradient(
    blocks: &[Block],
    theta: &[f64],
    n: usize,
    target: &Statevector,
) -> (f64, Vec<f64>) {
    let f = fidelity_at(blocks, theta, n, target);
    let h = 1e-5;
    let mut grad = vec![0.0; theta.len()];
    let mut probe = theta.to_vec();
    for i in 0..theta.len() {
        probe[i] = theta[i] + h;
        let up = fidelity_at(blocks, &probe, n, target);
        probe[i] = theta[i] - h;
        let down = fidelity_at(blocks, &probe, n, target);
        probe[i] = theta[i];
        grad[i] = (up - down) / (2.0 * h);
    }
    (f, grad)
}

/// Compresses the first `spec.m` schedule steps. Stops early once the
/// overlap reaches `spec.eta`; otherwise reports the best parameters found
/// within the budget.
pub fn compress(
    h_c: &IsingHamiltonian,
    schedule: &Schedule,
    spec: &CompressionSpec,
) -> Result<CompressionResult> {
    if !(spec.eta > 0.0 && spec.eta <= 1.0) {
        return Err(Error::Config(format!("eta must lie in (0, 1], got {}", spec.eta)));
    }
    let target = build_target_prefix(h_c, schedule, spec.m)?;
    let ansatz = build_ansatz(h_c, schedule, spec.m)?;
    let blocks = blocks_of(&ansatz)?;
    let n = h_c.n;

    let mut theta = ansatz.init_values();
    let mut best_theta = theta.clone();
    let mut best_f = fidelity_at(&blocks, &theta, n, &target);
    let mut trace = vec![best_f];

    let lr = 0.05;
    let (b1, b2, eps) = (0.9, 0.999, 1e-8);
    let mut m1 = vec![0.0; theta.len()];
    let mut m2 = vec![0.0; theta.len()];
    let mut iterations = 0;

    while best_f < spec.eta && iterations < spec.max_iters {
        let (f, grad) = match spec.backend {
            CompressionBackend::Adjoint => adjoint_gradient(&blocks, &theta, n, &target),
            CompressionBackend::CentralDiff => {
                central_diff_gradient(&blocks, &theta, n, &target)
            }
        };
        if f > best_f {
            best_f = f;
            best_theta = theta.clone();
        }
        iterations += 1;
        trace.push(best_f);
        if best_f >= spec.eta {
            break;
        }
        let gnorm = grad.iter().map(|g| g * g).sum::<f64>().sqrt();
        if gnorm < 1e-12 {
            break;
        }
        let t = iterations as f64;
        for i in 0..theta.len() {
            m1[i] = b1 * m1[i] + (1.0 - b1) * grad[i];
            m2[i] = b2 * m2[i] + (1.0 - b2) * grad[i] * grad[i];
            let mh = m1[i] / (1.0 - b1.powf(t));
            let vh = m2[i] / (1.0 - b2.powf(t));
            // Ascent: the objective is a fidelity to maximize.
            theta[i] += lr * mh / (vh.sqrt() + eps);
        }
    }
    // The final parameter point is only adopted if it improved.
    let f_last = fidelity_at(&blocks, &theta, n, &target);
    if f_last > best_f {
        best_f = f_last;
        best_theta = theta;
    }

    let circuit = ansatz.bound(&best_theta)?;
    Ok(CompressionResult {
        m: spec.m,
        achieved_fidelity: best_f,
        iterations_used: iterations,
        hit_threshold: best_f >= spec.eta,
        params: best_theta,
        trace,
        circuit,
    })
}
