//! The full experimental sweep: every requested (variant, m, p) cell on
//! one instance, with per-m compression shared across variants.
//!
//! Rows are independent jobs on a worker pool. Each job owns a seed
//! derived from the base seed and its grid coordinates, so results do not
//! depend on scheduling order; a collector sorts finished rows by
//! (variant, m, p) and the CSV serialization is byte-deterministic.

use std::collections::BTreeMap;
use std::sync::Arc;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::circuit::{assemble_hybrid, build_anneal, build_lc_qaoa_tail, build_qaoa_tail,
    ParamCircuit, Segment};
use crate::compress::{compress, CompressionBackend, CompressionSpec};
use crate::cvar::AlphaMode;
use crate::depth::{depth_report, Topology};
use crate::encode::encode;
use crate::instances::{Instance, VrpInstance};
use crate::ising::{qubo_to_ising, IsingHamiltonian};
use crate::metrics::{diagnostics_row, evaluate_samples, metrics_csv, DiagnosticsRow,
    MetricsRow, RowIds};
use crate::optimize::{init_params, InitKind, OptOptions, run_variational, VariationalSetup};
use crate::program::BinaryProgram;
use crate::qubo::to_qubo;
use crate::sample::{derive_seed, sample};
use crate::schedule::{linear_schedule_with_rule, EndpointRule, Schedule};
use crate::statevector::Statevector;
use crate::{Error, Result};

pub const WORKERS_ENV: &str = "TRANSPORTQ_WORKERS";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Variant {
    Anneal,
    AqcTrot,
    AqcQaoa,
    AqcLcqaoa,
}

impl Variant {
    pub fn as_str(&self) -> &'static str {
        match self {
            Variant::Anneal => "anneal",
            Variant::AqcTrot => "aqc-trot",
            Variant::AqcQaoa => "aqc-qaoa",
            Variant::AqcLcqaoa => "aqc-lcqaoa",
        }
    }

    fn is_variational(&self) -> bool {
        matches!(self, Variant::AqcQaoa | Variant::AqcLcqaoa)
    }
}

impl std::fmt::Display for Variant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepConfig {
    /// Path to an instance JSON file; `None` runs the built-in default
    /// VRP (4 nodes, 2 vehicles, 12 variables).
    pub instance: Option<String>,
    pub n_steps: usize,
    pub total_time: f64,
    pub schedule_rule: EndpointRule,
    pub m_set: Vec<usize>,
    pub p_set: Vec<usize>,
    pub variants: Vec<Variant>,
    pub eta: f64,
    pub compress_max_iters: usize,
    pub shots: u64,
    /// Layer fidelity assumed by the adaptive CVaR rule.
    pub lf: f64,
    pub alpha: AlphaMode,
    pub seed: u64,
    pub topology: Topology,
    pub max_opt_iters: usize,
    pub init: InitKind,
    pub probe_strength: f64,
    /// Probe evolution time for the susceptibility; `None` means one
    /// schedule step.
    pub probe_time: Option<f64>,
    /// Worker threads; `None` uses all cores. The environment variable
    /// `TRANSPORTQ_WORKERS` overrides both.
    pub workers: Option<usize>,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            instance: None,
            n_steps: 10,
            total_time: 1.0,
            schedule_rule: EndpointRule::Right,
            m_set: (0..=6).collect(),
            p_set: (1..=6).collect(),
            variants: vec![Variant::Anneal, Variant::AqcTrot, Variant::AqcQaoa, Variant::AqcLcqaoa],
            eta: 0.99,
            compress_max_iters: 2000,
            shots: 10_000,
            lf: 1.0,
            alpha: AlphaMode::default(),
            seed: 7,
            topology: Topology::AllToAll,
            max_opt_iters: 300,
            init: InitKind::Ramp { delta: 0.5 },
            probe_strength: 0.01,
            probe_time: None,
            workers: None,
        }
    }
}

impl SweepConfig {
    pub fn from_json(s: &str) -> Result<Self> {
        let cfg: SweepConfig = serde_json::from_str(s)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_steps == 0 {
            return Err(Error::Config("n_steps must be positive".into()));
        }
        if let Some(&m) = self.m_set.iter().find(|&&m| m > self.n_steps) {
            return Err(Error::Config(format!(
                "m={m} exceeds the {}-step schedule",
                self.n_steps
            )));
        }
        if self.variants.is_empty() {
            return Err(Error::Config("no variants requested".into()));
        }
        if self.variants.iter().any(Variant::is_variational) && self.p_set.is_empty() {
            return Err(Error::Config("p_set is empty but variational variants were requested".into()));
        }
        if self.p_set.iter().any(|&p| p == 0) {
            return Err(Error::Config("p values must be at least 1".into()));
        }
        if self.shots == 0 {
            return Err(Error::Config("shots must be positive".into()));
        }
        if !(self.eta > 0.0 && self.eta <= 1.0) {
            return Err(Error::Config(format!("eta must lie in (0, 1], got {}", self.eta)));
        }
        if !(self.lf > 0.0 && self.lf <= 1.0) {
            return Err(Error::Config(format!("lf must lie in (0, 1], got {}", self.lf)));
        }
        Ok(())
    }

    pub fn load_instance(&self) -> Result<Instance> {
        match &self.instance {
            Some(path) => Instance::load(path),
            None => Ok(default_instance()),
        }
    }
}

/// The built-in benchmark instance: a 4-node routing problem with two
/// vehicles (12 edge variables).
pub fn default_instance() -> Instance {
    Instance::Vrp(VrpInstance::random_grid(4, 2, 2026))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RowRecord {
    #[serde(flatten)]
    pub metrics: MetricsRow,
    pub seed: u64,
    pub wall_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FailedRow {
    pub variant: String,
    pub m: usize,
    pub p: usize,
    pub error: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepOutput {
    pub config: SweepConfig,
    pub num_vars: usize,
    pub rows: Vec<RowRecord>,
    pub failed: Vec<FailedRow>,
    pub diagnostics: Vec<DiagnosticsRow>,
    pub total_wall_ms: f64,
}

impl SweepOutput {
    pub fn to_csv(&self) -> String {
        let rows: Vec<MetricsRow> = self.rows.iter().map(|r| r.metrics.clone()).collect();
        metrics_csv(&rows)
    }

    pub fn diagnostics_csv(&self) -> String {
        crate::metrics::diagnostics_csv(&self.diagnostics)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

#[derive(Clone, Copy)]
struct Job {
    variant: Variant,
    m: usize,
    p: usize,
}

struct SweepContext {
    program: BinaryProgram,
    h_c: IsingHamiltonian,
    schedule: Schedule,
    cfg: SweepConfig,
    prefixes: BTreeMap<usize, Arc<crate::compress::CompressionResult>>,
}

fn row_seed(base: u64, job: &Job) -> u64 {
    derive_seed(base, &format!("row/{}/{}/{}", job.variant, job.m, job.p))
}

fn prefix_parts(
    ctx: &SweepContext,
    m: usize,
) -> Result<(Option<ParamCircuit>, f64)> {
    if m == 0 {
        return Ok((None, 1.0));
    }
    let c = ctx.prefixes.get(&m).ok_or_else(|| {
        Error::Config(format!("missing compression result for m={m}"))
    })?;
    Ok((Some(c.circuit.clone()), c.achieved_fidelity))
}

fn run_job(ctx: &SweepContext, job: &Job) -> Result<RowRecord> {
    let started = Instant::now();
    let seed = row_seed(ctx.cfg.seed, job);
    let shots = ctx.cfg.shots;

    let (metrics, _) = match job.variant {
        Variant::Anneal | Variant::AqcTrot => {
            let (prefix, prefix_fidelity) = prefix_parts(ctx, job.m)?;
            let tail = build_anneal(
                &ctx.h_c,
                &ctx.schedule,
                job.m,
                ctx.schedule.n_steps,
                Segment::Tail,
            )?;
            let circuit = assemble_hybrid(prefix.as_ref(), &tail)?;
            let depth = depth_report(&circuit, ctx.cfg.topology);
            let mut sv = Statevector::plus_state(ctx.h_c.n)?;
            circuit.apply(&mut sv, &[])?;
            let samples = sample(&sv, shots, derive_seed(seed, "samples"));
            let ids = RowIds {
                m: job.m,
                p: 0,
                variant: job.variant.as_str(),
                d2q: depth.two_qubit_depth,
                iterations: 0,
                prefix_fidelity,
            };
            (evaluate_samples(&samples, &ctx.program, &ctx.h_c, &ids)?, depth)
        }
        Variant::AqcQaoa | Variant::AqcLcqaoa => {
            let (prefix, prefix_fidelity) = prefix_parts(ctx, job.m)?;
            let tail = match job.variant {
                Variant::AqcQaoa => build_qaoa_tail(&ctx.h_c, job.p)?,
                _ => build_lc_qaoa_tail(&ctx.h_c, job.p)?,
            };
            let circuit = assemble_hybrid(prefix.as_ref(), &tail)?;
            let setup = VariationalSetup {
                circuit: &circuit,
                h_c: &ctx.h_c,
                shots,
                alpha: ctx.cfg.alpha,
                layer_fidelity: ctx.cfg.lf,
                topology: ctx.cfg.topology,
                opts: OptOptions { max_iters: ctx.cfg.max_opt_iters, ..Default::default() },
                seed,
                init: init_params(ctx.cfg.init, job.p),
            };
            let run = run_variational(&setup)?;
            let ids = RowIds {
                m: job.m,
                p: job.p,
                variant: job.variant.as_str(),
                d2q: run.depth.two_qubit_depth,
                iterations: run.opt.iterations,
                prefix_fidelity,
            };
            (evaluate_samples(&run.samples, &ctx.program, &ctx.h_c, &ids)?, run.depth)
        }
    };

    Ok(RowRecord { metrics, seed, wall_ms: started.elapsed().as_secs_f64() * 1e3 })
}

fn build_jobs(cfg: &SweepConfig) -> Vec<Job> {
    let mut jobs = Vec::new();
    for &variant in &cfg.variants {
        match variant {
            Variant::Anneal => {
                if cfg.m_set.contains(&0) {
                    jobs.push(Job { variant, m: 0, p: 0 });
                }
            }
            Variant::AqcTrot => {
                for &m in cfg.m_set.iter().filter(|&&m| m > 0) {
                    jobs.push(Job { variant, m, p: 0 });
                }
            }
            Variant::AqcQaoa | Variant::AqcLcqaoa => {
                for &m in &cfg.m_set {
                    for &p in &cfg.p_set {
                        jobs.push(Job { variant, m, p });
                    }
                }
            }
        }
    }
    jobs
}

fn worker_count(cfg: &SweepConfig) -> usize {
    if let Ok(v) = std::env::var(WORKERS_ENV) {
        if let Ok(n) = v.parse::<usize>() {
            if n > 0 {
                return n;
            }
        }
    }
    cfg.workers.unwrap_or(0)
}

/// Runs the configured sweep. Compression is performed once per m and the
/// identical bound prefix is shared by every variant at that m. Row
/// failures do not abort the sweep; they are reported in `failed`.
pub fn run_sweep(cfg: &SweepConfig) -> Result<SweepOutput> {
    let started = Instant::now();
    cfg.validate()?;
    let instance = cfg.load_instance()?;
    let program = encode(&instance)?;
    let h_c = qubo_to_ising(&to_qubo(&program)?);
    let schedule = linear_schedule_with_rule(cfg.n_steps, cfg.total_time, cfg.schedule_rule)?;

    let jobs = build_jobs(cfg);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(worker_count(cfg))
        .build()
        .map_err(|e| Error::Config(format!("worker pool: {e}")))?;

    // Phase 1: one compression per prefix length, shared across variants.
    let needed: Vec<usize> = {
        let mut ms: Vec<usize> =
            jobs.iter().filter(|j| j.m > 0).map(|j| j.m).collect();
        ms.sort_unstable();
        ms.dedup();
        ms
    };
    let compressed: Vec<(usize, Result<crate::compress::CompressionResult>)> =
        pool.install(|| {
            needed
                .par_iter()
                .map(|&m| {
                    let spec = CompressionSpec {
                        m,
                        eta: cfg.eta,
                        max_iters: cfg.compress_max_iters,
                        backend: CompressionBackend::Adjoint,
                    };
                    (m, compress(&h_c, &schedule, &spec))
                })
                .collect()
        });
    let mut prefixes = BTreeMap::new();
    let mut failed: Vec<FailedRow> = Vec::new();
    for (m, result) in compressed {
        match result {
            Ok(r) => {
                prefixes.insert(m, Arc::new(r));
            }
            Err(e) => failed.push(FailedRow {
                variant: "compression".into(),
                m,
                p: 0,
                error: e.to_string(),
            }),
        }
    }

    let ctx = SweepContext { program, h_c, schedule, cfg: cfg.clone(), prefixes };

    // Phase 2: independent row jobs.
    let results: Vec<(Job, Result<RowRecord>)> = pool.install(|| {
        jobs.par_iter().map(|job| (*job, run_job(&ctx, job))).collect()
    });
    let mut rows = Vec::new();
    for (job, result) in results {
        match result {
            Ok(r) => rows.push(r),
            Err(e) => failed.push(FailedRow {
                variant: job.variant.to_string(),
                m: job.m,
                p: job.p,
                error: e.to_string(),
            }),
        }
    }
    rows.sort_by(|a, b| {
        let ka = (variant_order(&a.metrics.variant), a.metrics.m, a.metrics.p);
        let kb = (variant_order(&b.metrics.variant), b.metrics.m, b.metrics.p);
        ka.cmp(&kb)
    });

    // Diagnostics per prefix length, on the uncompressed Trotter path.
    let probe_time = cfg.probe_time.unwrap_or(ctx.schedule.dt);
    let mut diagnostics = Vec::new();
    let mut m_sorted = cfg.m_set.clone();
    m_sorted.sort_unstable();
    m_sorted.dedup();
    for &m in m_sorted.iter().filter(|&&m| m < cfg.n_steps) {
        diagnostics.push(diagnostics_row(
            &ctx.h_c,
            &ctx.schedule,
            m,
            cfg.probe_strength,
            probe_time,
            cfg.shots,
            derive_seed(cfg.seed, &format!("diag/{m}")),
        )?);
    }

    Ok(SweepOutput {
        config: cfg.clone(),
        num_vars: ctx.program.num_vars,
        rows,
        failed,
        diagnostics,
        total_wall_ms: started.elapsed().as_secs_f64() * 1e3,
    })
}

fn variant_order(name: &str) -> usize {
    match name {
        "anneal" => 0,
        "aqc-trot" => 1,
        "aqc-qaoa" => 2,
        _ => 3,
    }
}
