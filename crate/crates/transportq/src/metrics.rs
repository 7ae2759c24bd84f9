//! Sampling diagnostics and transportation evaluation metrics.
//!
//! Diagnostics probe the annealing path: the energy variance of the cost
//! Hamiltonian (exact from amplitudes, and the weighted sample estimate),
//! a perturbative susceptibility of the driver under `H(s_m)`, and the
//! driver expectation after a prefix. Metrics score a sample set against
//! the original constrained program: feasibility counts, the objective
//! over feasible samples, and where the best feasible string lands in the
//! frequency ranking.

use serde::Serialize;

use crate::circuit::{build_anneal, Segment};
use crate::ising::IsingHamiltonian;
use crate::program::BinaryProgram;
use crate::sample::SampleSet;
use crate::schedule::Schedule;
use crate::statevector::{Observable, Statevector};
use crate::{Error, Result};

/// `Var(H_C)` from exact amplitudes.
pub fn energy_variance_state(sv: &Statevector, h_c: &IsingHamiltonian) -> f64 {
    let table = h_c.energy_table();
    let mut mean = 0.0;
    let mut second = 0.0;
    for (idx, a) in sv.amps().iter().enumerate() {
        let p = a.norm_sqr();
        mean += p * table[idx];
        second += p * table[idx] * table[idx];
    }
    (second - mean * mean).max(0.0)
}

/// `Var(H_C)` as count-weighted sample moments.
pub fn energy_variance_samples(samples: &SampleSet, h_c: &IsingHamiltonian) -> Result<f64> {
    if samples.shots == 0 {
        return Err(Error::Config("cannot estimate variance from an empty sample set".into()));
    }
    let mut mean = 0.0;
    let mut second = 0.0;
    for (bits, count) in samples.iter() {
        let w = count as f64 / samples.shots as f64;
        let e = h_c.cost(bits);
        mean += w * e;
        second += w * e * e;
    }
    Ok((second - mean * mean).max(0.0))
}

/// `<H_B>` with `H_B = sum_i X_i`.
pub fn driver_energy(sv: &Statevector) -> f64 {
    sv.expectation(Observable::Driver)
}

/// State after the first `m` coarse Trotter steps.
pub fn prefix_state(h_c: &IsingHamiltonian, schedule: &Schedule, m: usize) -> Result<Statevector> {
    let circuit = build_anneal(h_c, schedule, 0, m, Segment::Prefix)?;
    let mut sv = Statevector::plus_state(h_c.n)?;
    circuit.apply(&mut sv, &[])?;
    Ok(sv)
}

fn probed_driver_energy(
    h_c: &IsingHamiltonian,
    prefix: &Statevector,
    s: f64,
    driver_weight: f64,
    probe_time: f64,
    substep: f64,
) -> f64 {
    let mut sv = prefix.clone();
    let mut remaining = probe_time;
    while remaining > 1e-15 {
        let delta = substep.min(remaining);
        sv.apply_cost_evolution(h_c, delta * s);
        sv.apply_driver_evolution(delta * driver_weight);
        remaining -= delta;
    }
    driver_energy(&sv)
}

/// Finite-difference susceptibility of the driver observable at schedule
/// point `m`: the prefix state is evolved for `probe_time` under
/// `H(s_m) +- probe_strength * H_B` in exact split substeps of half the
/// schedule step, and the driver expectations are centrally differenced.
pub fn susceptibility(
    h_c: &IsingHamiltonian,
    schedule: &Schedule,
    m: usize,
    probe_strength: f64,
    probe_time: f64,
) -> Result<f64> {
    if probe_strength <= 0.0 {
        return Err(Error::Config(format!(
            "probe strength must be positive, got {probe_strength}"
        )));
    }
    if m >= schedule.n_steps {
        return Err(Error::Circuit(format!(
            "probe point m={m} outside schedule of {} steps",
            schedule.n_steps
        )));
    }
    let prefix = prefix_state(h_c, schedule, m)?;
    let s = schedule.points[m];
    let substep = schedule.dt / 2.0;
    let up =
        probed_driver_energy(h_c, &prefix, s, (1.0 - s) + probe_strength, probe_time, substep);
    let down =
        probed_driver_energy(h_c, &prefix, s, (1.0 - s) - probe_strength, probe_time, substep);
    Ok((up - down) / (2.0 * probe_strength))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DiagnosticsRow {
    pub m: usize,
    pub energy_variance: f64,
    pub energy_variance_sampled: f64,
    pub susceptibility: f64,
    pub driver_energy: f64,
    pub probe_strength: f64,
    pub probe_time: f64,
}

/// Diagnostics at one prefix length: variance (exact and sampled at
/// `shots`), susceptibility, and driver expectation.
pub fn diagnostics_row(
    h_c: &IsingHamiltonian,
    schedule: &Schedule,
    m: usize,
    probe_strength: f64,
    probe_time: f64,
    shots: u64,
    seed: u64,
) -> Result<DiagnosticsRow> {
    let sv = prefix_state(h_c, schedule, m)?;
    let samples = sv.sample(shots, seed);
    Ok(DiagnosticsRow {
        m,
        energy_variance: energy_variance_state(&sv, h_c),
        energy_variance_sampled: energy_variance_samples(&samples, h_c)?,
        susceptibility: susceptibility(h_c, schedule, m, probe_strength, probe_time)?,
        driver_energy: driver_energy(&sv),
        probe_strength,
        probe_time,
    })
}

// --- evaluation metrics ----------------------------------------------------

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricsRow {
    pub m: usize,
    /// QAOA layer count; 0 for the non-variational rows.
    pub p: usize,
    pub variant: String,
    pub d2q: usize,
    pub iterations: usize,
    pub feasible_count: u64,
    pub unique_feasible: usize,
    /// Count-weighted mean classical objective over feasible samples.
    pub avg_objective_feasible: Option<f64>,
    /// Count-weighted mean penalized (normalized) cost over all samples.
    pub avg_qubo_cost: f64,
    /// 1-based frequency rank of the minimum-objective feasible string.
    pub best_rank: Option<usize>,
    pub prefix_fidelity: f64,
}

pub struct RowIds<'a> {
    pub m: usize,
    pub p: usize,
    pub variant: &'a str,
    pub d2q: usize,
    pub iterations: usize,
    pub prefix_fidelity: f64,
}

/// Scores a sample set against the constrained program and its Ising
/// form. Ranking orders distinct bitstrings by descending count, breaking
/// ties by ascending penalized cost and then lexicographic bitstring.
pub fn evaluate_samples(
    samples: &SampleSet,
    program: &BinaryProgram,
    h_c: &IsingHamiltonian,
    ids: &RowIds<'_>,
) -> Result<MetricsRow> {
    if samples.n != program.num_vars {
        return Err(Error::BitLength { expected: program.num_vars, got: samples.n });
    }
    let mut feasible_count = 0u64;
    let mut unique_feasible = 0usize;
    let mut objective_sum = 0.0;
    let mut cost_sum = 0.0;

    struct Entry {
        bits: crate::bits::Bits,
        count: u64,
        cost: f64,
        feasible: bool,
        objective: f64,
    }
    let mut entries = Vec::with_capacity(samples.distinct());
    for (bits, count) in samples.iter() {
        let feasible = crate::decode::is_feasible(program, bits);
        let cost = h_c.cost(bits);
        let objective = program.objective(bits);
        cost_sum += cost * count as f64;
        if feasible {
            feasible_count += count;
            unique_feasible += 1;
            objective_sum += objective * count as f64;
        }
        entries.push(Entry { bits, count, cost, feasible, objective });
    }

    entries.sort_by(|a, b| {
        b.count
            .cmp(&a.count)
            .then_with(|| a.cost.total_cmp(&b.cost))
            .then_with(|| a.bits.to_string().cmp(&b.bits.to_string()))
    });
    let best_rank = entries
        .iter()
        .enumerate()
        .filter(|(_, e)| e.feasible)
        .min_by(|(_, a), (_, b)| a.objective.total_cmp(&b.objective))
        .map(|(i, _)| i + 1);

    Ok(MetricsRow {
        m: ids.m,
        p: ids.p,
        variant: ids.variant.to_string(),
        d2q: ids.d2q,
        iterations: ids.iterations,
        feasible_count,
        unique_feasible,
        avg_objective_feasible: (feasible_count > 0)
            .then(|| objective_sum / feasible_count as f64),
        avg_qubo_cost: cost_sum / samples.shots as f64,
        best_rank,
        prefix_fidelity: ids.prefix_fidelity,
    })
}

pub const METRICS_HEADER: &str = "m,p,variant,d2q,iterations,feasible_count,unique_feasible,avg_objective_feasible,avg_qubo_cost,best_rank,prefix_fidelity";

fn opt_field<T: std::fmt::Display>(v: &Option<T>) -> String {
    v.as_ref().map(|x| x.to_string()).unwrap_or_default()
}

pub fn metrics_csv(rows: &[MetricsRow]) -> String {
    let mut out = String::from(METRICS_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{}\n",
            r.m,
            r.p,
            r.variant,
            r.d2q,
            r.iterations,
            r.feasible_count,
            r.unique_feasible,
            opt_field(&r.avg_objective_feasible),
            r.avg_qubo_cost,
            opt_field(&r.best_rank),
            r.prefix_fidelity,
        ));
    }
    out
}

pub const DIAGNOSTICS_HEADER: &str =
    "m,energy_variance,energy_variance_sampled,susceptibility,driver_energy,probe_strength,probe_time";

pub fn diagnostics_csv(rows: &[DiagnosticsRow]) -> String {
    let mut out = String::from(DIAGNOSTICS_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            r.m,
            r.energy_variance,
            r.energy_variance_sampled,
            r.susceptibility,
            r.driver_energy,
            r.probe_strength,
            r.probe_time,
        ));
    }
    out
}
