//! `scpsim` command-line tool.
//!
//! Every command writes JSON-lines records to standard output, or appends them
//! to `--out`. Exit codes: 0 success, 1 invalid input, 2 capacity or sample
//! budget exceeded, 3 a `verify` suite or a `commuting` resource check failed.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use scpsim::backends::{backend_expectation, BackendTag};
use scpsim::boolfn::{
    km_significant_set, lift_to_signed, parse_function, wht_spectrum, BooleanFunction, FourierSpectrum,
    KmMode, KmParams,
};
use scpsim::circuit::{
    build_clifford_magic, build_random_constant_depth, build_simon_type, depth, parse_circuit, random_circuit,
    random_clifford_gates, random_diagonal_gates, render_circuit, QuantumCircuit,
};
use scpsim::commuting::resource_reports;
use scpsim::report::ReportWriter;
use scpsim::rng::{self, Op};
use scpsim::sim::{error_budget_audit, simulate, AccuracyBudget, Schedule};
use scpsim::verify::{run_all, VerifyConfig};
use scpsim::{defaults, oracle, Bits, Error, Result};

#[derive(Parser)]
#[command(name = "scpsim", version, about = "Simulate quantum circuits followed by sparse classical post-processing")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Master seed; every random choice derives from it.
    #[arg(long, default_value_t = rng::DEFAULT_SEED)]
    seed: u64,
    /// Append records to this file instead of printing them.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Estimate the acceptance probability p(C, f).
    Sim {
        #[arg(long)]
        circuit: PathBuf,
        #[arg(long = "fn")]
        function: PathBuf,
        #[arg(long, default_value = "exact")]
        backend: BackendTag,
        #[arg(long, default_value_t = defaults::P_TARGET)]
        p_target: u64,
        #[arg(long, default_value_t = defaults::DELTA)]
        delta: f64,
        /// Per-index accuracy schedule: adaptive or conservative.
        #[arg(long, default_value = "adaptive")]
        schedule: Schedule,
        /// Significant-set recovery: auto, exact or monte_carlo.
        #[arg(long, default_value = "auto")]
        km_mode: KmMode,
        #[arg(long, default_value_t = defaults::SAMPLE_CAP)]
        sample_cap: u64,
        /// Also emit the exact error decomposition (small instances only).
        #[arg(long)]
        audit: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Estimate one Pauli expectation <Z(s)>.
    Expect {
        #[arg(long)]
        circuit: PathBuf,
        /// Z-mask on the measured qubits, e.g. 101.
        #[arg(long)]
        s: String,
        #[arg(long, default_value = "exact")]
        backend: BackendTag,
        #[arg(long, default_value_t = defaults::EPSILON)]
        epsilon: f64,
        #[arg(long, default_value_t = defaults::DELTA)]
        delta: f64,
        #[command(flatten)]
        common: Common,
    },
    /// Recover the significant Fourier coefficients of g = (-1)^f.
    Km {
        #[arg(long = "fn")]
        function: PathBuf,
        #[arg(long)]
        theta: f64,
        #[arg(long, default_value_t = defaults::DELTA)]
        delta: f64,
        #[arg(long, default_value = "auto")]
        km_mode: KmMode,
        #[command(flatten)]
        common: Common,
    },
    /// Exact Fourier spectrum of f.
    Wht {
        #[arg(long = "fn")]
        function: PathBuf,
        /// Report the spectrum of g = (-1)^f instead of f.
        #[arg(long)]
        signed: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Generate a circuit file.
    Build {
        #[arg(long)]
        family: BuildFamily,
        #[arg(long)]
        n: usize,
        /// Measured qubits; defaults to n.
        #[arg(long)]
        m: Option<usize>,
        /// Gate count of the random part.
        #[arg(long, default_value_t = 20)]
        size: usize,
        /// Layer count for constant_depth.
        #[arg(long, default_value_t = 2)]
        depth: usize,
        /// Write the circuit here; a summary record goes to standard output.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = rng::DEFAULT_SEED)]
        seed: u64,
    },
    /// Resource report of the commuting-circuit construction for every queried s.
    Commuting {
        #[arg(long)]
        circuit: PathBuf,
        #[arg(long = "fn")]
        function: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Exact output distribution, and p(C, f) when a function is given.
    Oracle {
        #[arg(long)]
        circuit: PathBuf,
        #[arg(long = "fn")]
        function: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Run the invariant suites against the statevector oracle.
    Verify {
        /// Random instances per suite.
        #[arg(long, default_value_t = 20)]
        cases: usize,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Clone, Copy, ValueEnum)]
#[value(rename_all = "snake_case")]
enum BuildFamily {
    Generic,
    Iqp,
    SimonType,
    CliffordMagic,
    ConstantDepth,
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn load_circuit(path: &Path) -> Result<QuantumCircuit> {
    parse_circuit(&read(path)?)
}

fn load_function(path: &Path) -> Result<BooleanFunction> {
    parse_function(&read(path)?)
}

fn writer(out: &Option<PathBuf>) -> Result<ReportWriter> {
    match out {
        Some(p) => ReportWriter::append(p),
        None => Ok(ReportWriter::stdout()),
    }
}

#[derive(Serialize)]
struct ExpectRecord<'a> {
    s: Bits,
    value: f64,
    backend: BackendTag,
    method: &'a str,
    samples: u64,
    epsilon: f64,
    delta: f64,
    seed: u64,
}

#[derive(Serialize)]
struct KmRecord {
    m: usize,
    theta: f64,
    delta: f64,
    set: Vec<Bits>,
    exact: bool,
    weight_estimates: u64,
    samples: u64,
    max_frontier: usize,
    seed: u64,
}

#[derive(Serialize)]
struct WhtRecord {
    m: usize,
    signed: bool,
    sparsity: usize,
    degree: Option<usize>,
    spectrum: FourierSpectrum,
}

#[derive(Serialize)]
struct BuildRecord<'a> {
    family: &'a str,
    n: usize,
    m: usize,
    size: usize,
    depth: usize,
    path: Option<String>,
    seed: u64,
}

#[derive(Serialize)]
struct OracleRecord {
    n: usize,
    m: usize,
    probabilities: Vec<f64>,
    acceptance_probability: Option<f64>,
}

fn build(family: BuildFamily, n: usize, m: usize, size: usize, d: usize, seed: u64) -> Result<QuantumCircuit> {
    let mut r = rng::stream(seed, Op::Build, 0, 0);
    let all: Vec<usize> = (0..n).collect();
    match family {
        BuildFamily::Generic => random_circuit(n, m, size, seed),
        BuildFamily::Iqp => build_simon_type(n, m, &all, &all, &random_diagonal_gates(&mut r, n, size)),
        BuildFamily::SimonType => {
            use rand::Rng;
            let pick = |r: &mut rand_chacha::ChaCha8Rng| -> Vec<usize> {
                let v: Vec<usize> = all.iter().copied().filter(|_| r.random_bool(0.5)).collect();
                if v.is_empty() {
                    vec![0]
                } else {
                    v
                }
            };
            let q = pick(&mut r);
            let rr = pick(&mut r);
            build_simon_type(n, m, &q, &rr, &random_diagonal_gates(&mut r, n, size))
        }
        BuildFamily::CliffordMagic => build_clifford_magic(n, m, &random_clifford_gates(&mut r, n, size)),
        BuildFamily::ConstantDepth => build_random_constant_depth(n, m, d, seed),
    }
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Sim {
            circuit,
            function,
            backend,
            p_target,
            delta,
            schedule,
            km_mode,
            sample_cap,
            audit,
            common,
        } => {
            let c = load_circuit(&circuit)?;
            let f = load_function(&function)?;
            let budget = AccuracyBudget::for_function(p_target, &f, delta)?
                .with_schedule(schedule)
                .with_km_mode(km_mode)
                .with_sample_cap(sample_cap);
            let mut w = writer(&common.out)?;
            if audit {
                let (res, record) = error_budget_audit(&c, &f, backend, &budget, common.seed)?;
                w.emit("simulation", &res)?;
                w.emit("audit", &record)?;
            } else {
                w.emit("simulation", &simulate(&c, &f, backend, &budget, common.seed)?)?;
            }
        }
        Command::Expect {
            circuit,
            s,
            backend,
            epsilon,
            delta,
            common,
        } => {
            let c = load_circuit(&circuit)?;
            let s: Bits = s.parse()?;
            let est = backend_expectation(backend, &c, &s, epsilon, delta, common.seed)?;
            writer(&common.out)?.emit(
                "expectation",
                &ExpectRecord {
                    s,
                    value: est.value,
                    backend,
                    method: est.method,
                    samples: est.samples,
                    epsilon,
                    delta,
                    seed: common.seed,
                },
            )?;
        }
        Command::Km {
            function,
            theta,
            delta,
            km_mode,
            common,
        } => {
            let f = load_function(&function)?;
            let params = KmParams::new(theta, delta, f.m())?.with_mode(km_mode);
            let out = km_significant_set(&lift_to_signed(&f), &params, common.seed)?;
            writer(&common.out)?.emit(
                "km",
                &KmRecord {
                    m: f.m(),
                    theta,
                    delta,
                    set: out.set,
                    exact: out.exact,
                    weight_estimates: out.weight_estimates,
                    samples: out.samples,
                    max_frontier: out.max_frontier,
                    seed: common.seed,
                },
            )?;
        }
        Command::Wht {
            function,
            signed,
            common,
        } => {
            let f = load_function(&function)?;
            let spectrum = if signed {
                wht_spectrum(&lift_to_signed(&f))?
            } else {
                wht_spectrum(&f)?
            };
            writer(&common.out)?.emit(
                "wht",
                &WhtRecord {
                    m: f.m(),
                    signed,
                    sparsity: spectrum.len(),
                    degree: scpsim::boolfn::degree(&spectrum).ok(),
                    spectrum,
                },
            )?;
        }
        Command::Build {
            family,
            n,
            m,
            size,
            depth: d,
            out,
            seed,
        } => {
            let m = m.unwrap_or(n);
            let c = build(family, n, m, size, d, seed)?;
            let text = render_circuit(&c);
            let name = family.to_possible_value().expect("named").get_name().to_string();
            match &out {
                Some(p) => {
                    fs::write(p, &text)?;
                    ReportWriter::stdout().emit(
                        "build",
                        &BuildRecord {
                            family: &name,
                            n,
                            m,
                            size: c.size(),
                            depth: depth(&c),
                            path: Some(p.display().to_string()),
                            seed,
                        },
                    )?;
                }
                None => print!("{text}"),
            }
        }
        Command::Commuting {
            circuit,
            function,
            common,
        } => {
            let c = load_circuit(&circuit)?;
            let f = load_function(&function)?;
            let mut w = writer(&common.out)?;
            let reports = resource_reports(&c, &f)?;
            let all_pass = reports.iter().all(|r| r.pass);
            for r in &reports {
                w.emit("commuting", r)?;
            }
            return Ok(all_pass);
        }
        Command::Oracle {
            circuit,
            function,
            common,
        } => {
            let c = load_circuit(&circuit)?;
            let acceptance = match &function {
                Some(p) => Some(oracle::acceptance_probability_exact(&c, &load_function(p)?)?),
                None => None,
            };
            writer(&common.out)?.emit(
                "oracle",
                &OracleRecord {
                    n: c.n(),
                    m: c.m(),
                    probabilities: oracle::output_distribution(&c)?.probs().to_vec(),
                    acceptance_probability: acceptance,
                },
            )?;
        }
        Command::Verify { cases, common } => {
            let outcomes = run_all(&VerifyConfig {
                cases,
                seed: common.seed,
            })?;
            let mut w = writer(&common.out)?;
            for o in &outcomes {
                w.emit("verify", o)?;
            }
            return Ok(outcomes.iter().all(|o| o.pass));
        }
    }
    Ok(true)
}

fn configure_threads() -> Result<()> {
    if let Ok(v) = std::env::var(defaults::THREADS_ENV) {
        let n: usize = v
            .parse()
            .map_err(|_| Error::invalid(format!("{} must be a positive integer, got {v:?}", defaults::THREADS_ENV)))?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Error::invalid(e.to_string()))?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match configure_threads().and_then(|()| run(cli)) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(3),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_capacity() { 2 } else { 1 })
        }
    }
}
