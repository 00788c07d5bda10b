//! Command-line workflows over circuit scripts: sampling, gradients, VQE,
//! gate benchmarks and matrix dumps. Every command writes JSON lines to the
//! given output; diagnostics go through `log`.

pub mod observable;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::json;

use qbir::autodiff::{expect_circuit, expect_grad, faithful_grad, Shots};
use qbir::block::Block;
use qbir::{circuits, gates, krylov, register, script, BitStr, Error, MatrixRepr, Register};

pub use observable::parse_observable;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_RESOURCE: i32 = 3;
pub const EXIT_UNSUPPORTED: i32 = 4;

/// Settings shared by all commands.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub seed: u64,
    pub shots: usize,
    pub qubit_cap: Option<usize>,
    pub threads: usize,
    pub output: Option<PathBuf>,
}

impl RunConfig {
    /// Applies the qubit cap and the kernel thread count to this process.
    pub fn install(&self) {
        if let Some(cap) = self.qubit_cap {
            register::set_qubit_cap(cap);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(self.threads.max(1)).build_global() {
            log::debug!("thread pool already configured: {e}");
        }
    }
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            seed: 42,
            shots: 1024,
            qubit_cap: None,
            threads: 1,
            output: None,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "qbir", version, about = "Run, differentiate and benchmark quantum circuit scripts")]
pub struct Cli {
    /// Largest register size allowed.
    #[arg(long, global = true)]
    pub qubit_cap: Option<usize>,
    /// Worker threads for the simulation kernels.
    #[arg(long, global = true, default_value_t = 1)]
    pub threads: usize,
    /// Write data to this file instead of stdout.
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

impl Cli {
    pub fn config(&self) -> RunConfig {
        let mut c = RunConfig {
            qubit_cap: self.qubit_cap,
            threads: self.threads,
            output: self.output.clone(),
            ..RunConfig::default()
        };
        match &self.command {
            Command::Run { shots, seed, .. } => {
                c.shots = *shots;
                c.seed = *seed;
            }
            Command::Grad { seed, .. } | Command::Vqe { seed, .. } => c.seed = *seed,
            Command::Bench { .. } | Command::Mat { .. } => {}
        }
        c
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GradMode {
    Reverse,
    Shift,
    /// Both engines, with their largest disagreement.
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BenchGate {
    X,
    H,
    Cnot,
    Toffoli,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Apply a script to a basis state and sample the result.
    Run {
        script: PathBuf,
        #[arg(long, default_value_t = 1024)]
        shots: usize,
        /// Initial basis state, qubit 1 rightmost (default all zeros).
        #[arg(long)]
        state: Option<String>,
        #[arg(long, default_value_t = 42)]
        seed: u64,
    },
    /// Gradient of an observable's expectation with respect to the script's parameters.
    ///
    /// Observables are sums of Pauli strings such as `Z1*Z2 + 0.5*X1`
    /// (`coef*P q [* P q ...] [+ ...]`, Paulis X/Y/Z, qubits from 1), or
    /// `heisenberg` for the Heisenberg chain on all qubits.
    Grad {
        script: PathBuf,
        #[arg(long)]
        observable: String,
        #[arg(long, value_enum, default_value_t = GradMode::Reverse)]
        mode: GradMode,
        #[arg(long, default_value_t = 42)]
        seed: u64,
    },
    /// Variational ground-state search for the Heisenberg chain.
    Vqe {
        #[arg(long)]
        qubits: usize,
        #[arg(long)]
        depth: usize,
        #[arg(long)]
        iters: usize,
        #[arg(long, default_value_t = 0.01)]
        lr: f64,
        #[arg(long, default_value_t = 42)]
        seed: u64,
    },
    /// Time a gate application over a range of register sizes.
    Bench {
        #[arg(long, value_enum)]
        gate: BenchGate,
        /// Inclusive range `lo..hi`.
        #[arg(long)]
        qubits: String,
        #[arg(long, default_value_t = 5)]
        reps: usize,
    },
    /// Dump the matrix of a script, or of `heisenberg:N`.
    Mat {
        input: String,
        /// Matrix dump destination; skipped when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Process exit code for a library error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Parse { .. } | Error::ScriptRange { .. } | Error::ScriptValidation { .. } => EXIT_PARSE,
        Error::Resource(_) => EXIT_RESOURCE,
        Error::Unsupported(_) | Error::UnsupportedForShift(_) | Error::Serialization(_) => EXIT_UNSUPPORTED,
        _ => EXIT_FAILURE,
    }
}

/// JSON object describing an error, for stderr.
pub fn error_json(e: &Error) -> serde_json::Value {
    let mut v = json!({ "error": e.to_string(), "code": exit_code(e) });
    if let Some(span) = e.span() {
        v["line"] = json!(span.line);
        v["col"] = json!(span.col);
    }
    v
}

fn emit<T: Serialize>(out: &mut dyn Write, value: &T) -> qbir::Result<()> {
    serde_json::to_writer(&mut *out, value).map_err(|e| Error::Io(e.into()))?;
    out.write_all(b"\n")?;
    Ok(())
}

pub fn load_script(path: &Path) -> qbir::Result<Block> {
    let bytes = std::fs::read(path)?;
    script::parse_script_bytes(&bytes)
}

/// Samples `shots` outcomes of the script applied to `state`.
pub fn cmd_run(path: &Path, shots: usize, state: Option<&str>, seed: u64, out: &mut dyn Write) -> qbir::Result<()> {
    let circuit = load_script(path)?;
    let n = circuit.nqubits();
    let bits = match state {
        Some(s) => {
            let b = BitStr::parse(s)?;
            if b.nbits() != n {
                return Err(Error::Validation(format!("state has {} bits, script has {n} qubits", b.nbits())));
            }
            b
        }
        None => BitStr::new(0, n)?,
    };
    let mut reg = Register::product_state(bits, 1)?;
    circuit.apply(&mut reg)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let outcome = reg.measure(shots, &mut rng)?;
    for b in 0..outcome.nbatch {
        for s in outcome.batch(b) {
            emit(out, &json!({ "sample": s.to_binary_string(), "batch": b }))?;
        }
    }
    emit(out, &json!({ "norm": reg.norms()[0] }))
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct GradReport {
    pub params: Vec<f64>,
    pub grads: Vec<f64>,
    pub energy: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_abs_diff: Option<f64>,
}

/// Gradient of `⟨obs⟩` at the parameters written in the script.
pub fn grad_report(circuit: &Block, obs: &str, mode: GradMode, seed: u64) -> qbir::Result<GradReport> {
    let n = circuit.nqubits();
    let obs = parse_observable(obs, n)?;
    let input = Register::zero_state(n, 1)?;
    let energy = expect_circuit(&obs, &input, circuit)?[0];
    let reverse = || expect_grad(&obs, &input, circuit).map(|g| g.param_grads);
    let shift = || faithful_grad(&obs, &input, circuit, Shots::Exact, seed);
    let (grads, max_abs_diff) = match mode {
        GradMode::Reverse => (reverse()?, None),
        GradMode::Shift => (shift()?, None),
        GradMode::Both => {
            let (r, s) = (reverse()?, shift()?);
            let d = r.iter().zip(&s).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            (r, Some(d))
        }
    };
    Ok(GradReport {
        params: circuit.parameters(),
        grads,
        energy,
        max_abs_diff,
    })
}

pub fn cmd_grad(path: &Path, obs: &str, mode: GradMode, seed: u64, out: &mut dyn Write) -> qbir::Result<()> {
    let circuit = load_script(path)?;
    let report = grad_report(&circuit, obs, mode, seed)?;
    if let Some(d) = report.max_abs_diff {
        log::info!("reverse vs shift: max |diff| = {d:e}");
    }
    emit(out, &report)
}

/// Largest register for which `vqe` also reports the exact ground energy.
pub const VQE_EXACT_MAX_QUBITS: usize = 12;

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct VqeReport {
    pub trace: Vec<f64>,
    pub ground_energy: Option<f64>,
    pub relative_gap: Option<f64>,
}

pub fn vqe_report(n: usize, depth: usize, iters: usize, lr: f64, seed: u64) -> qbir::Result<VqeReport> {
    if n > register::qubit_cap() {
        return Err(Error::Resource(format!("{n} qubits exceed the cap of {}", register::qubit_cap())));
    }
    let trace = circuits::vqe_run(n, depth, iters, lr, seed)?;
    let (ground_energy, relative_gap) = if n <= VQE_EXACT_MAX_QUBITS {
        let h = circuits::heisenberg(n)?;
        let e0 = krylov::ground_energy(
            |src, dst| {
                dst.copy_from(src)?;
                h.apply(dst)
            },
            n,
            seed,
        )?;
        let last = *trace.last().expect("trace is never empty");
        (Some(e0), Some((last - e0) / e0.abs()))
    } else {
        (None, None)
    };
    Ok(VqeReport {
        trace,
        ground_energy,
        relative_gap,
    })
}

pub fn cmd_vqe(n: usize, depth: usize, iters: usize, lr: f64, seed: u64, out: &mut dyn Write) -> qbir::Result<()> {
    emit(out, &vqe_report(n, depth, iters, lr, seed)?)
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct BenchSample {
    pub gate: String,
    pub nqubits: usize,
    pub reps: usize,
    /// Fastest of the repetitions.
    pub ns: u128,
}

/// Parses `lo..hi` (inclusive).
pub fn parse_range(text: &str) -> qbir::Result<(usize, usize)> {
    let bad = || Error::Validation(format!("expected a range `lo..hi`, found `{text}`"));
    let (lo, hi) = text.split_once("..").ok_or_else(bad)?;
    let lo: usize = lo.trim().parse().map_err(|_| bad())?;
    let hi: usize = hi.trim().trim_start_matches('=').parse().map_err(|_| bad())?;
    if lo == 0 || lo > hi {
        return Err(bad());
    }
    Ok((lo, hi))
}

fn bench_target(gate: BenchGate) -> (&'static str, Vec<usize>, Vec<usize>) {
    match gate {
        BenchGate::X => ("X", vec![2], vec![]),
        BenchGate::H => ("H", vec![2], vec![]),
        BenchGate::Cnot => ("X", vec![2], vec![1]),
        BenchGate::Toffoli => ("X", vec![3], vec![1, 2]),
    }
}

/// Minimum wall time of `reps` applications of `gate` per register size.
pub fn bench_samples(gate: BenchGate, lo: usize, hi: usize, reps: usize) -> qbir::Result<Vec<BenchSample>> {
    if hi > register::qubit_cap() {
        return Err(Error::Resource(format!("{hi} qubits exceed the cap of {}", register::qubit_cap())));
    }
    let (name, locs, ctrls) = bench_target(gate);
    let needed = locs.iter().chain(&ctrls).copied().max().unwrap_or(1);
    if lo < needed {
        return Err(Error::Validation(format!("{gate:?} needs at least {needed} qubits")));
    }
    let m = gates::gate_matrix(name, &[])?;
    let cfg = vec![1; ctrls.len()];
    let reps = reps.max(1);
    (lo..=hi)
        .map(|n| {
            let mut reg = Register::rand_state(n, 1, n as u64)?;
            let mut best = u128::MAX;
            for _ in 0..reps {
                let t = Instant::now();
                reg.instruct(&m, &locs, &ctrls, &cfg)?;
                best = best.min(t.elapsed().as_nanos());
            }
            Ok(BenchSample {
                gate: format!("{gate:?}").to_uppercase(),
                nqubits: n,
                reps,
                ns: best,
            })
        })
        .collect()
}

pub fn cmd_bench(gate: BenchGate, range: &str, reps: usize, out: &mut dyn Write) -> qbir::Result<()> {
    let (lo, hi) = parse_range(range)?;
    for s in bench_samples(gate, lo, hi, reps)? {
        emit(out, &s)?;
    }
    Ok(())
}

/// Largest operator `mat` will build.
pub const MAT_MAX_QUBITS: usize = 20;

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct MatReport {
    pub dim: usize,
    pub nnz: usize,
    pub format: String,
    pub seconds: f64,
}

/// A script path, or `heisenberg:N`.
pub fn load_operator(input: &str) -> qbir::Result<Block> {
    match input.strip_prefix("heisenberg:") {
        Some(n) => {
            let n: usize = n
                .parse()
                .map_err(|_| Error::Validation(format!("expected `heisenberg:N`, found `{input}`")))?;
            if n > MAT_MAX_QUBITS {
                return Err(Error::Resource(format!("{n} qubits exceed the matrix limit of {MAT_MAX_QUBITS}")));
            }
            circuits::heisenberg(n)
        }
        None => load_script(Path::new(input)),
    }
}

pub fn mat_report(op: &Block, out: Option<&Path>) -> qbir::Result<(MatrixRepr, MatReport)> {
    if op.nqubits() > MAT_MAX_QUBITS {
        return Err(Error::Resource(format!(
            "{} qubits exceed the matrix limit of {MAT_MAX_QUBITS}",
            op.nqubits()
        )));
    }
    if op.contains_measure() {
        return Err(Error::Unsupported("measurement has no matrix".into()));
    }
    let t = Instant::now();
    let m = op.mat()?;
    let seconds = t.elapsed().as_secs_f64();
    if let Some(path) = out {
        let file = std::io::BufWriter::new(std::fs::File::create(path)?);
        qbir::matrix::io::write_dump(&m, file)?;
    }
    let report = MatReport {
        dim: m.dim(),
        nnz: m.nnz(),
        format: format!("{:?}", m.format()),
        seconds,
    };
    Ok((m, report))
}

pub fn cmd_mat(input: &str, out_path: Option<&Path>, out: &mut dyn Write) -> qbir::Result<()> {
    let op = load_operator(input)?;
    let (_, report) = mat_report(&op, out_path)?;
    emit(out, &report)
}

fn dispatch(cli: &Cli, out: &mut dyn Write) -> qbir::Result<()> {
    match &cli.command {
        Command::Run { script, shots, state, seed } => cmd_run(script, *shots, state.as_deref(), *seed, out),
        Command::Grad { script, observable, mode, seed } => cmd_grad(script, observable, *mode, *seed, out),
        Command::Vqe { qubits, depth, iters, lr, seed } => cmd_vqe(*qubits, *depth, *iters, *lr, *seed, out),
        Command::Bench { gate, qubits, reps } => cmd_bench(*gate, qubits, *reps, out),
        Command::Mat { input, out: path } => cmd_mat(input, path.as_deref(), out),
    }
}

/// Runs the command line `args` (program name first) and returns the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            if e.use_stderr() {
                let _ = write!(stderr, "{e}");
                return EXIT_PARSE;
            }
            let _ = write!(stdout, "{e}");
            return EXIT_OK;
        }
    };
    let config = cli.config();
    config.install();
    let result = match &config.output {
        Some(path) => std::fs::File::create(path)
            .map_err(Error::from)
            .and_then(|f| {
                let mut w = std::io::BufWriter::new(f);
                dispatch(&cli, &mut w)?;
                w.flush()?;
                Ok(())
            }),
        None => dispatch(&cli, stdout),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(stderr, "{}", error_json(&e));
            exit_code(&e)
        }
    }
}
