//! Parameterized circuit representation and builders.
//!
//! Circuits are flat gate lists over RX / RZ / RZZ / H-all. Angles are
//! either bound constants or references to a named free parameter with a
//! fixed scale, so a QAOA cost layer shares one `gamma` across all its
//! rotations while a compression ansatz frees every angle independently.
//!
//! Builders follow the digitized annealing convention: one Trotter step of
//! `H(s) = (1-s) H_B + s H_C` over duration `dt` is the cost sub-layer
//! (`RZZ(2 dt s J_ij)`, `RZ(2 dt s h_i)`) followed by the driver sub-layer
//! (`RX(2 dt (1-s))` on every qubit).

use std::collections::HashMap;
use std::sync::Arc;

use serde::Serialize;

use crate::ising::IsingHamiltonian;
use crate::schedule::Schedule;
use crate::statevector::Statevector;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Angle {
    Bound(f64),
    /// `scale * params[index]`.
    Param { index: usize, scale: f64 },
}

impl Angle {
    pub fn resolve(&self, values: &[f64]) -> f64 {
        match *self {
            Angle::Bound(v) => v,
            Angle::Param { index, scale } => scale * values[index],
        }
    }

    fn is_free(&self) -> bool {
        matches!(self, Angle::Param { .. })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "lowercase", tag = "kind")]
pub enum Gate {
    Rx { qubits: Vec<usize>, angle: Angle },
    Rz { qubit: usize, angle: Angle },
    Rzz { a: usize, b: usize, angle: Angle },
    HAll,
}

/// Which stage of a hybrid circuit a gate belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Segment {
    Prefix,
    Tail,
    /// 1-based QAOA layer index.
    Qaoa(usize),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Layer {
    pub gate: Gate,
    pub segment: Segment,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ParamDef {
    pub name: String,
    pub init: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ParamCircuit {
    pub n: usize,
    pub layers: Vec<Layer>,
    pub params: Vec<ParamDef>,
}

impl ParamCircuit {
    pub fn new(n: usize) -> Self {
        ParamCircuit { n, layers: Vec::new(), params: Vec::new() }
    }

    pub fn num_free_params(&self) -> usize {
        self.params.len()
    }

    pub fn init_values(&self) -> Vec<f64> {
        self.params.iter().map(|p| p.init).collect()
    }

    /// Two-qubit gate pairs in circuit order (for depth accounting).
    pub fn two_qubit_pairs(&self) -> Vec<(usize, usize)> {
        self.layers
            .iter()
            .filter_map(|l| match l.gate {
                Gate::Rzz { a, b, .. } => Some((a, b)),
                _ => None,
            })
            .collect()
    }

    fn check_values(&self, values: &[f64]) -> Result<()> {
        if values.len() != self.params.len() {
            return Err(Error::ParamCount { expected: self.params.len(), got: values.len() });
        }
        Ok(())
    }

    /// Applies the circuit gate by gate. The compiled path
    /// ([`ParamCircuit::compile`]) is equivalent and faster for repeated
    /// evaluation; this one is the readable reference.
    pub fn apply(&self, sv: &mut Statevector, values: &[f64]) -> Result<()> {
        self.check_values(values)?;
        if sv.n() != self.n {
            return Err(Error::Circuit(format!(
                "state has {} qubits, circuit {}",
                sv.n(),
                self.n
            )));
        }
        for layer in &self.layers {
            match &layer.gate {
                Gate::Rx { qubits, angle } => {
                    let t = angle.resolve(values);
                    for &q in qubits {
                        sv.rx(t, q);
                    }
                }
                Gate::Rz { qubit, angle } => sv.rz(angle.resolve(values), *qubit),
                Gate::Rzz { a, b, angle } => sv.rzz(angle.resolve(values), *a, *b),
                Gate::HAll => {
                    for q in 0..self.n {
                        sv.hadamard(q);
                    }
                }
            }
        }
        Ok(())
    }

    /// All-bound copy with the given parameter values substituted.
    pub fn bound(&self, values: &[f64]) -> Result<ParamCircuit> {
        self.check_values(values)?;
        let layers = self
            .layers
            .iter()
            .map(|l| {
                let gate = match &l.gate {
                    Gate::Rx { qubits, angle } => Gate::Rx {
                        qubits: qubits.clone(),
                        angle: Angle::Bound(angle.resolve(values)),
                    },
                    Gate::Rz { qubit, angle } => {
                        Gate::Rz { qubit: *qubit, angle: Angle::Bound(angle.resolve(values)) }
                    }
                    Gate::Rzz { a, b, angle } => {
                        Gate::Rzz { a: *a, b: *b, angle: Angle::Bound(angle.resolve(values)) }
                    }
                    Gate::HAll => Gate::HAll,
                };
                Layer { gate, segment: l.segment }
            })
            .collect();
        Ok(ParamCircuit { n: self.n, layers, params: Vec::new() })
    }

    pub fn to_debug_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Compiles for repeated evaluation: consecutive diagonal gates within a
    /// segment fuse into per-basis-state phase tables, grouped by parameter.
    pub fn compile(&self) -> CompiledCircuit {
        CompiledCircuit::build(self)
    }
}

/// Concatenates a fully bound prefix circuit with a (possibly free) tail.
pub fn assemble_hybrid(
    prefix: Option<&ParamCircuit>,
    tail: &ParamCircuit,
) -> Result<ParamCircuit> {
    let mut out = ParamCircuit::new(tail.n);
    if let Some(p) = prefix {
        if p.n != tail.n {
            return Err(Error::Circuit(format!(
                "prefix has {} qubits, tail {}",
                p.n, tail.n
            )));
        }
        if p.num_free_params() != 0 {
            return Err(Error::Circuit(
                "hybrid prefix must be fully bound before assembly".into(),
            ));
        }
        out.layers.extend(p.layers.iter().cloned());
    }
    out.layers.extend(tail.layers.iter().cloned());
    out.params = tail.params.clone();
    Ok(out)
}

// --- builders -----------------------------------------------------------

/// Digitized annealing steps `start..end` of the schedule, fully bound.
pub fn build_anneal(
    h_c: &IsingHamiltonian,
    schedule: &Schedule,
    start: usize,
    end: usize,
    segment: Segment,
) -> Result<ParamCircuit> {
    if start > end || end > schedule.n_steps {
        return Err(Error::Circuit(format!(
            "step range {start}..{end} outside schedule of {} steps",
            schedule.n_steps
        )));
    }
    let dt = schedule.dt;
    let mut c = ParamCircuit::new(h_c.n);
    for k in start..end {
        let s = schedule.points[k];
        for (&(a, b), &j) in &h_c.j {
            c.layers.push(Layer {
                gate: Gate::Rzz { a, b, angle: Angle::Bound(2.0 * dt * s * j) },
                segment,
            });
        }
        for (&i, &h) in &h_c.h {
            c.layers.push(Layer {
                gate: Gate::Rz { qubit: i, angle: Angle::Bound(2.0 * dt * s * h) },
                segment,
            });
        }
        c.layers.push(Layer {
            gate: Gate::Rx {
                qubits: (0..h_c.n).collect(),
                angle: Angle::Bound(2.0 * dt * (1.0 - s)),
            },
            segment,
        });
    }
    Ok(c)
}

/// Full baseline annealing circuit over all schedule steps.
pub fn build_anneal_full(h_c: &IsingHamiltonian, schedule: &Schedule) -> Result<ParamCircuit> {
    build_anneal(h_c, schedule, 0, schedule.n_steps, Segment::Tail)
}

fn qaoa_layer(
    c: &mut ParamCircuit,
    h_c: &IsingHamiltonian,
    ell: usize,
    couplings: &[(usize, usize, f64)],
) {
    let gamma = c.params.len();
    c.params.push(ParamDef { name: format!("gamma_{ell}"), init: 0.0 });
    let beta = c.params.len();
    c.params.push(ParamDef { name: format!("beta_{ell}"), init: 0.0 });

    let seg = Segment::Qaoa(ell);
    for &(a, b, j) in couplings {
        c.layers.push(Layer {
            gate: Gate::Rzz { a, b, angle: Angle::Param { index: gamma, scale: 2.0 * j } },
            segment: seg,
        });
    }
    for (&i, &h) in &h_c.h {
        c.layers.push(Layer {
            gate: Gate::Rz { qubit: i, angle: Angle::Param { index: gamma, scale: 2.0 * h } },
            segment: seg,
        });
    }
    c.layers.push(Layer {
        gate: Gate::Rx {
            qubits: (0..h_c.n).collect(),
            angle: Angle::Param { index: beta, scale: 2.0 },
        },
        segment: seg,
    });
}

/// Standard QAOA tail: `p` layers of `exp(-i gamma H_C)` then
/// `exp(-i beta H_B)`. Parameters interleave as
/// `[gamma_1, beta_1, ..., gamma_p, beta_p]`.
pub fn build_qaoa_tail(h_c: &IsingHamiltonian, p: usize) -> Result<ParamCircuit> {
    if p == 0 {
        return Err(Error::Circuit("QAOA tail needs at least one layer".into()));
    }
    let couplings: Vec<(usize, usize, f64)> =
        h_c.j.iter().map(|(&(a, b), &j)| (a, b, j)).collect();
    let mut c = ParamCircuit::new(h_c.n);
    for ell in 1..=p {
        qaoa_layer(&mut c, h_c, ell, &couplings);
    }
    Ok(c)
}

/// Linear-chain QAOA tail: the cost layer keeps only nearest-neighbor
/// couplings `J_{i,i+1}` (every linear term stays). Chain gates are emitted
/// even pairs first, so adjacent pairs interleave into two depth slices.
pub fn build_lc_qaoa_tail(h_c: &IsingHamiltonian, p: usize) -> Result<ParamCircuit> {
    if p == 0 {
        return Err(Error::Circuit("QAOA tail needs at least one layer".into()));
    }
    let adjacent = |parity: usize| {
        h_c.j
            .iter()
            .filter(move |(&(a, b), _)| b == a + 1 && a % 2 == parity)
            .map(|(&(a, b), &j)| (a, b, j))
    };
    let couplings: Vec<(usize, usize, f64)> = adjacent(0).chain(adjacent(1)).collect();
    let mut c = ParamCircuit::new(h_c.n);
    for ell in 1..=p {
        qaoa_layer(&mut c, h_c, ell, &couplings);
    }
    Ok(c)
}

// --- compiled executor ---------------------------------------------------

enum CompiledOp {
    /// One fused pass: `amp[idx] *= exp(-i table[idx])`.
    DiagConst(Arc<Vec<f64>>),
    /// `amp[idx] *= exp(-i (const[idx] + sum_g values[g.0] * g.1[idx]))`.
    DiagParam { constant: Option<Arc<Vec<f64>>>, groups: Vec<(usize, Arc<Vec<f64>>)> },
    Rx { qubit: usize, angle: Angle },
    HAll,
}

/// Executable form of a [`ParamCircuit`] with fused diagonal passes.
pub struct CompiledCircuit {
    n: usize,
    num_params: usize,
    ops: Vec<CompiledOp>,
    /// Number of leading ops that do not depend on free parameters; states
    /// after this point can be cached across evaluations.
    prefix_ops: usize,
}

#[derive(Default)]
struct DiagBatch {
    bound: Vec<(u64, f64)>,
    by_param: HashMap<usize, Vec<(u64, f64)>>,
}

impl DiagBatch {
    fn is_empty(&self) -> bool {
        self.bound.is_empty() && self.by_param.is_empty()
    }
}

impl CompiledCircuit {
    fn build(circuit: &ParamCircuit) -> Self {
        let dim = 1usize << circuit.n;
        // Tables are content-addressed so identical cost layers (one per
        // QAOA layer) share storage.
        let mut table_cache: HashMap<Vec<(u64, u64)>, Arc<Vec<f64>>> = HashMap::new();
        let mut make_table = |terms: &[(u64, f64)]| -> Arc<Vec<f64>> {
            let key: Vec<(u64, u64)> =
                terms.iter().map(|&(m, v)| (m, v.to_bits())).collect();
            table_cache
                .entry(key)
                .or_insert_with(|| {
                    let mut t = vec![0.0f64; dim];
                    for &(mask, half) in terms {
                        for (idx, e) in t.iter_mut().enumerate() {
                            let sign =
                                1.0 - 2.0 * ((idx as u64 & mask).count_ones() & 1) as f64;
                            *e += half * sign;
                        }
                    }
                    Arc::new(t)
                })
                .clone()
        };

        let mut ops = Vec::new();
        let mut batch = DiagBatch::default();
        let mut flush = |batch: &mut DiagBatch, ops: &mut Vec<CompiledOp>| {
            if batch.is_empty() {
                return;
            }
            let constant =
                (!batch.bound.is_empty()).then(|| make_table(&batch.bound));
            if batch.by_param.is_empty() {
                ops.push(CompiledOp::DiagConst(constant.unwrap()));
            } else {
                let mut groups: Vec<(usize, Arc<Vec<f64>>)> = batch
                    .by_param
                    .iter()
                    .map(|(&p, terms)| (p, make_table(terms)))
                    .collect();
                groups.sort_by_key(|g| g.0);
                ops.push(CompiledOp::DiagParam { constant, groups });
            }
            *batch = DiagBatch::default();
        };

        let mut seg_of_batch: Option<Segment> = None;
        for layer in &circuit.layers {
            // Diagonal runs never fuse across segment boundaries, so hybrid
            // prefixes stay independently cacheable.
            if seg_of_batch != Some(layer.segment) {
                flush(&mut batch, &mut ops);
                seg_of_batch = Some(layer.segment);
            }
            match &layer.gate {
                Gate::Rz { qubit, angle } => {
                    push_diag(&mut batch, 1u64 << qubit, angle);
                }
                Gate::Rzz { a, b, angle } => {
                    push_diag(&mut batch, (1u64 << a) | (1u64 << b), angle);
                }
                Gate::Rx { qubits, angle } => {
                    flush(&mut batch, &mut ops);
                    for &q in qubits {
                        ops.push(CompiledOp::Rx { qubit: q, angle: *angle });
                    }
                }
                Gate::HAll => {
                    flush(&mut batch, &mut ops);
                    ops.push(CompiledOp::HAll);
                }
            }
        }
        flush(&mut batch, &mut ops);

        let prefix_ops = ops
            .iter()
            .position(|op| match op {
                CompiledOp::DiagConst(_) | CompiledOp::HAll => false,
                CompiledOp::DiagParam { .. } => true,
                CompiledOp::Rx { angle, .. } => angle.is_free(),
            })
            .unwrap_or(ops.len());

        CompiledCircuit { n: circuit.n, num_params: circuit.params.len(), ops, prefix_ops }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Applies ops `from..` to the state. `from = 0` is the whole circuit;
    /// `from = self.prefix_ops()` resumes after a cached prefix state.
    pub fn apply_from(&self, from: usize, sv: &mut Statevector, values: &[f64]) -> Result<()> {
        if values.len() != self.num_params {
            return Err(Error::ParamCount { expected: self.num_params, got: values.len() });
        }
        for op in &self.ops[from..] {
            match op {
                CompiledOp::DiagConst(table) => sv.phase_table(table, 1.0),
                CompiledOp::DiagParam { constant, groups } => {
                    match (constant, groups.as_slice()) {
                        (None, [(p, table)]) => sv.phase_table(table, values[*p]),
                        _ => {
                            let amps = sv.amps_mut();
                            for (idx, amp) in amps.iter_mut().enumerate() {
                                let mut angle =
                                    constant.as_ref().map_or(0.0, |t| t[idx]);
                                for (p, t) in groups {
                                    angle += values[*p] * t[idx];
                                }
                                *amp *= num_complex::Complex64::new(
                                    angle.cos(),
                                    -angle.sin(),
                                );
                            }
                        }
                    }
                }
                CompiledOp::Rx { qubit, angle } => sv.rx(angle.resolve(values), *qubit),
                CompiledOp::HAll => {
                    for q in 0..self.n {
                        sv.hadamard(q);
                    }
                }
            }
        }
        Ok(())
    }

    pub fn apply(&self, sv: &mut Statevector, values: &[f64]) -> Result<()> {
        self.apply_from(0, sv, values)
    }

    pub fn prefix_ops(&self) -> usize {
        self.prefix_ops
    }

    /// State after the parameter-independent head, for caching. Returns the
    /// evolved copy of `initial`.
    pub fn prefix_state(&self, initial: &Statevector) -> Result<Statevector> {
        let mut sv = initial.clone();
        for op in &self.ops[..self.prefix_ops] {
            match op {
                CompiledOp::DiagConst(table) => sv.phase_table(table, 1.0),
                CompiledOp::Rx { qubit, angle } => sv.rx(angle.resolve(&[]), *qubit),
                CompiledOp::HAll => {
                    for q in 0..self.n {
                        sv.hadamard(q);
                    }
                }
                CompiledOp::DiagParam { .. } => unreachable!("prefix is parameter-free"),
            }
        }
        Ok(sv)
    }
}

fn push_diag(batch: &mut DiagBatch, mask: u64, angle: &Angle) {
    match *angle {
        Angle::Bound(v) => batch.bound.push((mask, v / 2.0)),
        Angle::Param { index, scale } => {
            batch.by_param.entry(index).or_default().push((mask, scale / 2.0))
        }
    }
}
