//! transportq: command line front end for the hybrid annealing pipeline.
//!
//! Exit codes: 0 success, 1 usage error, 2 runtime failure. Failures print
//! one machine-readable JSON object to stderr.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use transportq::circuit::build_anneal_full;
use transportq::compress::{compress, CompressionBackend, CompressionSpec};
use transportq::decode::is_feasible;
use transportq::depth::depth_report;
use transportq::encode::encode;
use transportq::ising::{qubo_to_ising, IsingHamiltonian};
use transportq::metrics::{diagnostics_csv, diagnostics_row, evaluate_samples, metrics_csv,
    DiagnosticsRow, RowIds};
use transportq::program::BinaryProgram;
use transportq::oracle::brute_force;
use transportq::qubo::to_qubo;
use transportq::sample::{derive_seed, sample};
use transportq::schedule::{linear_schedule_with_rule, Schedule};
use transportq::statevector::Statevector;
use transportq::sweep::{run_sweep, SweepConfig, Variant};

#[derive(Parser)]
#[command(name = "transportq", version, about = "Hybrid annealing pipeline for transportation problems")]
struct Cli {
    /// Base RNG seed; overrides the config file value.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Sweep configuration JSON; defaults apply when omitted.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Output file; stdout when omitted.
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,

    /// Output format for tabular commands (anneal, sweep, diagnose).
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Encode an instance and dump its QUBO and Ising forms.
    Encode(InstanceOpt),
    /// Brute-force the encoded instance for the feasible optimum.
    SolveExact(InstanceOpt),
    /// Run the baseline digitized anneal and report sampling metrics.
    Anneal(InstanceOpt),
    /// Compress an m-step schedule prefix and report the fit.
    Compress(CompressOpt),
    /// Run the full (m, p) experiment grid.
    Sweep(SweepOpt),
    /// Tabulate variance, susceptibility, and driver energy per prefix length.
    Diagnose(InstanceOpt),
}

#[derive(Args)]
struct InstanceOpt {
    /// Instance JSON file; overrides the config instance.
    #[arg(long, value_name = "PATH")]
    instance: Option<PathBuf>,
}

#[derive(Args)]
struct CompressOpt {
    #[command(flatten)]
    instance: InstanceOpt,
    /// Number of coarse schedule steps to compress.
    #[arg(long)]
    m: usize,
}

#[derive(Args)]
struct SweepOpt {
    #[command(flatten)]
    instance: InstanceOpt,
    /// Comma-separated subset of variants to run.
    #[arg(long, value_delimiter = ',', value_parser = parse_variant)]
    variants: Option<Vec<Variant>>,
}

fn parse_variant(s: &str) -> Result<Variant, String> {
    serde_json::from_value(serde_json::Value::String(s.to_owned())).map_err(|_| {
        format!("unknown variant `{s}` (expected anneal, aqc-trot, aqc-qaoa or aqc-lcqaoa)")
    })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if e.use_stderr() => {
            eprintln!("{}", json!({ "error": "usage", "message": e.to_string() }));
            return ExitCode::from(1);
        }
        // --help and --version render to stdout and succeed.
        Err(e) => {
            print!("{e}");
            return ExitCode::SUCCESS;
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", json!({ "error": "runtime", "message": e.to_string() }));
            ExitCode::from(2)
        }
    }
}

fn load_config(cli: &Cli, instance: &InstanceOpt) -> transportq::Result<SweepConfig> {
    let mut cfg = match &cli.config {
        Some(path) => SweepConfig::from_json(&std::fs::read_to_string(path)?)?,
        None => SweepConfig::default(),
    };
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(path) = &instance.instance {
        cfg.instance = Some(path.to_string_lossy().into_owned());
    }
    cfg.validate()?;
    Ok(cfg)
}

/// Instance -> (program, cost Hamiltonian) for the one-shot commands.
fn encoded(cfg: &SweepConfig) -> transportq::Result<(BinaryProgram, IsingHamiltonian)> {
    let instance = cfg.load_instance()?;
    let program = encode(&instance)?;
    let h_c = qubo_to_ising(&to_qubo(&program)?);
    Ok((program, h_c))
}

fn schedule_of(cfg: &SweepConfig) -> transportq::Result<Schedule> {
    linear_schedule_with_rule(cfg.n_steps, cfg.total_time, cfg.schedule_rule)
}

fn write_or_print(out: &Option<PathBuf>, text: &str) -> transportq::Result<()> {
    let body = if text.ends_with('\n') { text.to_owned() } else { format!("{text}\n") };
    match out {
        Some(path) => Ok(std::fs::write(path, body)?),
        None => {
            print!("{body}");
            Ok(())
        }
    }
}

fn run(cli: &Cli) -> transportq::Result<()> {
    match &cli.command {
        Command::Encode(opt) => cmd_encode(cli, opt),
        Command::SolveExact(opt) => cmd_solve_exact(cli, opt),
        Command::Anneal(opt) => cmd_anneal(cli, opt),
        Command::Compress(opt) => cmd_compress(cli, opt),
        Command::Sweep(opt) => cmd_sweep(cli, opt),
        Command::Diagnose(opt) => cmd_diagnose(cli, opt),
    }
}

fn cmd_encode(cli: &Cli, opt: &InstanceOpt) -> transportq::Result<()> {
    let cfg = load_config(cli, opt)?;
    let (program, h_c) = encoded(&cfg)?;
    let qubo = to_qubo(&program)?;
    let coeffs: Vec<(usize, usize, f64)> =
        qubo.coeffs.iter().map(|(&(i, j), &c)| (i, j, c)).collect();
    let dump = json!({
        "num_vars": program.num_vars,
        "var_labels": program.var_labels,
        "qubo": {
            "num_vars": qubo.num_vars,
            "coeffs": coeffs,
            "offset": qubo.offset,
            "penalty_weight": qubo.penalty_weight,
            "norm_factor": qubo.norm_factor,
        },
        "ising": serde_json::from_str::<serde_json::Value>(&h_c.to_json()?)?,
    });
    write_or_print(&cli.out, &serde_json::to_string_pretty(&dump)?)?;
    if cli.out.is_some() {
        println!("variables: {}", program.num_vars);
    }
    Ok(())
}

fn cmd_solve_exact(cli: &Cli, opt: &InstanceOpt) -> transportq::Result<()> {
    let cfg = load_config(cli, opt)?;
    let (program, _) = encoded(&cfg)?;
    let oracle = brute_force(
        program.num_vars,
        |b| program.objective(b),
        |b| is_feasible(&program, b),
        false,
    )?;
    let dump = json!({
        "num_vars": program.num_vars,
        "feasible_count": oracle.feasible_count,
        "optimum": oracle
            .best
            .map(|(bits, cost)| json!({ "bits": bits.to_string(), "objective": cost })),
    });
    write_or_print(&cli.out, &serde_json::to_string_pretty(&dump)?)
}

fn cmd_anneal(cli: &Cli, opt: &InstanceOpt) -> transportq::Result<()> {
    let cfg = load_config(cli, opt)?;
    let (program, h_c) = encoded(&cfg)?;
    let schedule = schedule_of(&cfg)?;
    let circuit = build_anneal_full(&h_c, &schedule)?;
    let depth = depth_report(&circuit, cfg.topology);
    let mut sv = Statevector::plus_state(h_c.n)?;
    circuit.apply(&mut sv, &[])?;
    let samples = sample(&sv, cfg.shots, derive_seed(cfg.seed, "anneal"));
    let ids = RowIds {
        m: 0,
        p: 0,
        variant: "anneal",
        d2q: depth.two_qubit_depth,
        iterations: 0,
        prefix_fidelity: 1.0,
    };
    let row = evaluate_samples(&samples, &program, &h_c, &ids)?;
    match cli.format {
        Format::Csv => write_or_print(&cli.out, &metrics_csv(&[row])),
        Format::Json => write_or_print(&cli.out, &serde_json::to_string_pretty(&row)?),
    }
}

fn cmd_compress(cli: &Cli, opt: &CompressOpt) -> transportq::Result<()> {
    let cfg = load_config(cli, &opt.instance)?;
    let (_, h_c) = encoded(&cfg)?;
    let schedule = schedule_of(&cfg)?;
    let spec = CompressionSpec {
        m: opt.m,
        eta: cfg.eta,
        max_iters: cfg.compress_max_iters,
        backend: CompressionBackend::Adjoint,
    };
    let result = compress(&h_c, &schedule, &spec)?;
    write_or_print(&cli.out, &result.to_json()?)
}

fn cmd_sweep(cli: &Cli, opt: &SweepOpt) -> transportq::Result<()> {
    let mut cfg = load_config(cli, &opt.instance)?;
    if let Some(variants) = &opt.variants {
        cfg.variants = variants.clone();
        cfg.validate()?;
    }
    let output = run_sweep(&cfg)?;
    match cli.format {
        Format::Json => write_or_print(&cli.out, &output.to_json()?)?,
        Format::Csv => {
            write_or_print(&cli.out, &output.to_csv())?;
            // CSV to a file also gets the JSON mirror with the full record.
            if let Some(path) = &cli.out {
                let mirror = path.with_extension("json");
                if &mirror != path {
                    std::fs::write(&mirror, output.to_json()?)?;
                }
                println!(
                    "wrote {} rows ({} failed) to {}",
                    output.rows.len(),
                    output.failed.len(),
                    path.display()
                );
            }
        }
    }
    Ok(())
}

fn cmd_diagnose(cli: &Cli, opt: &InstanceOpt) -> transportq::Result<()> {
    let cfg = load_config(cli, opt)?;
    let (_, h_c) = encoded(&cfg)?;
    let schedule = schedule_of(&cfg)?;
    let probe_time = cfg.probe_time.unwrap_or(schedule.dt);
    let mut m_sorted = cfg.m_set.clone();
    m_sorted.sort_unstable();
    m_sorted.dedup();
    let mut rows: Vec<DiagnosticsRow> = Vec::new();
    for &m in m_sorted.iter().filter(|&&m| m < cfg.n_steps) {
        rows.push(diagnostics_row(
            &h_c,
            &schedule,
            m,
            cfg.probe_strength,
            probe_time,
            cfg.shots,
            derive_seed(cfg.seed, &format!("diag/{m}")),
        )?);
    }
    match cli.format {
        Format::Csv => write_or_print(&cli.out, &diagnostics_csv(&rows)),
        Format::Json => write_or_print(&cli.out, &serde_json::to_string_pretty(&rows)?),
    }
}
