//! Command-line interface: `solve`, `gen` and `orderings` subcommands.
//!
//! Exit codes: 0 success, 1 usage error, 2 numerical failure, 3 io error.

use std::ffi::OsString;
use std::path::PathBuf;
use std::time::Instant;

use clap::error::ErrorKind as ClapErrorKind;
use clap::{Args, Parser, Subcommand};

use crate::blockmat::{BlockPartition, Complex64, ComplexDenseMatrix};
use crate::driver::{eberlein_solve, SolveOptions, SolveStatus};
use crate::error::{Error, Result};
use crate::io::{
    gen_test_matrix, read_matrix_market, write_matrix_market, write_outputs, RunConfig,
    TestMatrixKind, TestMatrixSpec,
};
use crate::pivot::{PivotOrdering, SerialDirection};

#[derive(Parser)]
#[command(name = "eberlein", version, about = "Block Eberlein eigensolver for general complex matrices")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the solver on a Matrix Market file or a generated test matrix.
    Solve(SolveArgs),
    /// Generate a test matrix and write it as Matrix Market (plus a
    /// spectrum sidecar for the normal families).
    Gen(GenArgs),
    /// Print the matrix representation of a pivot ordering.
    Orderings(OrderingsArgs),
}

#[derive(Args)]
struct SolveArgs {
    /// Matrix Market file, or gen:a0 | gen:a1 | gen:a2
    #[arg(long)]
    input: String,
    /// Dimension (required for generated inputs)
    #[arg(long)]
    n: Option<usize>,
    /// Uniform block size (last block may be smaller)
    #[arg(long = "block-size")]
    block_size: Option<usize>,
    /// Explicit partition, e.g. 4,4,2
    #[arg(long, value_delimiter = ',')]
    partition: Option<Vec<usize>>,
    /// row | col | serial-perm:SEED | file:PATH
    #[arg(long, default_value = "row")]
    ordering: String,
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    #[arg(long = "max-cycles", default_value_t = 100)]
    max_cycles: usize,
    /// Multiply by a random complex scalar with Im != 0 first
    #[arg(long)]
    precondition: bool,
    /// Seed for generators and preconditioning (falls back to
    /// EBERLEIN_SEED, then OS entropy)
    #[arg(long)]
    seed: Option<u64>,
    /// Multiplicities m1,m2,m3,m4,m5 for gen:a2
    #[arg(long, value_delimiter = ',')]
    mult: Option<Vec<usize>>,
    /// Result JSON path
    #[arg(long)]
    out: Option<PathBuf>,
    /// Trace CSV path
    #[arg(long)]
    trace: Option<PathBuf>,
    /// Interpret --tol absolutely instead of relative to the input norm
    #[arg(long = "absolute-tol")]
    absolute_tol: bool,
    /// Disable the UBC column permutation in the unitary stage
    #[arg(long = "no-ubc")]
    no_ubc: bool,
}

#[derive(Args)]
struct GenArgs {
    /// a0 | a1 | a2
    #[arg(long)]
    kind: String,
    #[arg(long)]
    n: usize,
    /// Multiplicities m1,m2,m3,m4,m5 for a2
    #[arg(long, value_delimiter = ',')]
    mult: Option<Vec<usize>>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct OrderingsArgs {
    #[arg(long)]
    m: usize,
    /// row | col | serial-perm
    #[arg(long)]
    kind: String,
    #[arg(long)]
    seed: Option<u64>,
}

/// Runs the CLI on the given argv; returns the process exit code.
pub fn cli_main<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(err) => {
            let code = match err.kind() {
                ClapErrorKind::DisplayHelp | ClapErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = err.print();
            return code;
        }
    };
    let outcome = match cli.command {
        Command::Solve(args) => run_solve(args),
        Command::Gen(args) => run_gen(args),
        Command::Orderings(args) => run_orderings(args),
    };
    match outcome {
        Ok(()) => 0,
        Err(err) => {
            eprintln!("error: {err}");
            match err {
                Error::InvalidArgument(_) => 1,
                Error::ConvergenceFailure { .. } | Error::NumericalFailure { .. } => 2,
                Error::Parse { .. } | Error::Io(_) => 3,
            }
        }
    }
}

fn resolve_seed(explicit: Option<u64>) -> u64 {
    if let Some(seed) = explicit {
        return seed;
    }
    if let Ok(text) = std::env::var("EBERLEIN_SEED") {
        if let Ok(seed) = text.trim().parse::<u64>() {
            return seed;
        }
    }
    // hasher keys come from OS entropy
    use std::hash::BuildHasher;
    std::collections::hash_map::RandomState::new().hash_one(0x45424552u64)
}

fn parse_kind(token: &str) -> Result<TestMatrixKind> {
    match token {
        "a0" => Ok(TestMatrixKind::A0Normal),
        "a1" => Ok(TestMatrixKind::A1Random),
        "a2" => Ok(TestMatrixKind::A2Repeated),
        other => Err(Error::invalid(format!("unknown matrix kind '{other}' (expected a0|a1|a2)"))),
    }
}

fn default_a2_multiplicities(n: usize) -> Result<Vec<usize>> {
    if n >= 10 && n % 10 == 0 {
        let k = n / 10;
        Ok(vec![n - 8 * k, k, k, k, k])
    } else {
        Err(Error::invalid(
            "a2 needs --mult m1,m2,m3,m4,m5 (default applies only when 10 divides n)",
        ))
    }
}

fn load_input(
    args: &SolveArgs,
    seed: u64,
) -> Result<(ComplexDenseMatrix, Option<Vec<usize>>)> {
    if let Some(kind) = args.input.strip_prefix("gen:") {
        let kind = parse_kind(kind)?;
        let n = args
            .n
            .ok_or_else(|| Error::invalid("generated inputs need --n"))?;
        let multiplicities = match kind {
            TestMatrixKind::A2Repeated => Some(match &args.mult {
                Some(mult) => mult.clone(),
                None => default_a2_multiplicities(n)?,
            }),
            _ => None,
        };
        let spec = TestMatrixSpec {
            kind,
            n,
            multiplicities: multiplicities.clone(),
            seed,
            file: None,
        };
        let (matrix, _) = gen_test_matrix(&spec)?;
        Ok((matrix, multiplicities))
    } else {
        let matrix = read_matrix_market(args.input.as_ref())?;
        if let Some(n) = args.n {
            if n != matrix.dim() {
                return Err(Error::invalid(format!(
                    "--n {} does not match the file dimension {}",
                    n,
                    matrix.dim()
                )));
            }
        }
        Ok((matrix, None))
    }
}

fn build_ordering(spec: &str, m: usize) -> Result<PivotOrdering> {
    if spec == "row" {
        return PivotOrdering::row_cyclic(m);
    }
    if spec == "col" {
        return PivotOrdering::col_cyclic(m);
    }
    if let Some(seed) = spec.strip_prefix("serial-perm:") {
        let seed: u64 = seed
            .parse()
            .map_err(|_| Error::invalid(format!("bad serial-perm seed '{seed}'")))?;
        return PivotOrdering::serial_with_permutations(m, seed, SerialDirection::Col);
    }
    if let Some(path) = spec.strip_prefix("file:") {
        let text = std::fs::read_to_string(path)?;
        return PivotOrdering::from_text(&text, m);
    }
    Err(Error::invalid(format!(
        "unknown ordering '{spec}' (expected row|col|serial-perm:SEED|file:PATH)"
    )))
}

fn run_solve(args: SolveArgs) -> Result<()> {
    let seed = resolve_seed(args.seed);
    let (matrix, multiplicities) = load_input(&args, seed)?;
    let n = matrix.dim();

    let partition = match (&args.partition, args.block_size) {
        (Some(sizes), _) => {
            let part = BlockPartition::new(sizes.clone())?;
            if part.n() != n {
                return Err(Error::invalid(format!(
                    "partition sums to {}, matrix dimension is {n}",
                    part.n()
                )));
            }
            part
        }
        (None, Some(block_size)) => BlockPartition::uniform(n, block_size)?,
        (None, None) => return Err(Error::invalid("need --block-size or --partition")),
    };

    let ordering = build_ordering(&args.ordering, partition.m())?;
    let mut opts = SolveOptions::new(ordering);
    opts.tolerance = args.tol;
    opts.max_cycles = args.max_cycles;
    opts.precondition = args.precondition;
    opts.absolute_tolerance = args.absolute_tol;
    opts.enforce_ubc = !args.no_ubc;
    opts.seed = seed;

    let started = Instant::now();
    let result = eberlein_solve(&matrix, &partition, &opts)?;
    let wall = started.elapsed().as_secs_f64();

    let config = RunConfig {
        input: args.input.clone(),
        n,
        partition: partition.sizes().to_vec(),
        ordering: args.ordering.clone(),
        tolerance: args.tol,
        max_cycles: args.max_cycles,
        precondition: args.precondition,
        seed: Some(seed),
        multiplicities,
        result_path: args.out.clone(),
        trace_path: args.trace.clone(),
    };
    write_outputs(&result, &config, wall)?;

    let status = match result.status {
        SolveStatus::Converged => "converged",
        SolveStatus::Stalled => "stalled (residual blocks)",
        SolveStatus::MaxCycles => "max cycles reached",
    };
    println!("status: {status} after {} cycles ({wall:.3} s)", result.cycles_run);
    if let Some(last) = result.log.cycles.last() {
        println!(
            "off(A) = {:.3e}  off(B) = {:.3e}  ||C(A)||_F = {:.3e}",
            last.off_a, last.off_b, last.norm_c
        );
    }
    println!(
        "eigenvalues: {} (failed components: {})",
        result.eigenpairs.len(),
        result.failed_components.len()
    );
    if let Some(d) = result.precondition_scalar {
        println!("preconditioned with d = {} + {}i", d.re, d.im);
    }
    if let Some(path) = &args.out {
        println!("result written to {}", path.display());
    }
    if let Some(path) = &args.trace {
        println!("trace written to {}", path.display());
    }
    Ok(())
}

fn run_gen(args: GenArgs) -> Result<()> {
    let seed = resolve_seed(args.seed);
    let kind = parse_kind(&args.kind)?;
    let multiplicities = match kind {
        TestMatrixKind::A2Repeated => Some(match &args.mult {
            Some(mult) => mult.clone(),
            None => default_a2_multiplicities(args.n)?,
        }),
        _ => None,
    };
    let spec = TestMatrixSpec {
        kind,
        n: args.n,
        multiplicities,
        seed,
        file: None,
    };
    let (matrix, spectrum) = gen_test_matrix(&spec)?;
    write_matrix_market(&args.out, &matrix)?;
    println!("matrix written to {}", args.out.display());

    if let Some(spectrum) = spectrum {
        let sidecar = args.out.with_extension("spectrum.json");
        let doc: Vec<serde_json::Value> = spectrum
            .iter()
            .map(|z: &Complex64| serde_json::json!({ "re": z.re, "im": z.im }))
            .collect();
        let text = serde_json::to_string_pretty(&doc).expect("serializable");
        crate::io::atomic_write(&sidecar, text.as_bytes())?;
        println!("spectrum written to {}", sidecar.display());
    }
    println!("seed: {seed}");
    Ok(())
}

fn run_orderings(args: OrderingsArgs) -> Result<()> {
    let ordering = match args.kind.as_str() {
        "row" => PivotOrdering::row_cyclic(args.m)?,
        "col" => PivotOrdering::col_cyclic(args.m)?,
        "serial-perm" => {
            let seed = resolve_seed(args.seed);
            PivotOrdering::serial_with_permutations(args.m, seed, SerialDirection::Col)?
        }
        other => {
            return Err(Error::invalid(format!(
                "unknown ordering kind '{other}' (expected row|col|serial-perm)"
            )))
        }
    };
    print!("{}", ordering.matrix_display());
    Ok(())
}
