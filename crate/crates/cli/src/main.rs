//! `tenscert` command-line front end. Every subcommand writes a RunReport
//! JSON document to `--out` or stdout.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use tenscert::charpoly::{certify_unique, certify_unique_float, CharPolyBackend};
use tenscert::io::load;
use tenscert::nnapprox::{self, kkt_verify, NNFactors};
use tenscert::rankone::{self, best_rank_one, kkt_check_rank_one, nonneg_best_rank_one, BestRankOne};
use tenscert::spectral::{enumerate_eigenpairs, enumerate_singular_pairs};
use tenscert::{BigRational, Error, NonnegTensor, PositiveTensor, SymTensor};

#[derive(Parser)]
#[command(name = "tenscert", version, about = "Rank-one and nonnegative approximation of small tensors")]
struct Cli {
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Backend {
    Rational,
    Float,
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum PairMode {
    Singular,
    Eigen,
}

#[derive(Subcommand)]
enum Command {
    /// Best rank-r approximation (rank one, or nonnegative rank r).
    Approx {
        input: PathBuf,
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
        rank: u64,
        /// Constrain all factors to be entrywise nonnegative.
        #[arg(long)]
        nonneg: bool,
        #[arg(long, default_value_t = 32, value_parser = clap::value_parser!(u64).range(1..))]
        restarts: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long, default_value_t = nnapprox::DEFAULT_MAX_ITERS)]
        max_iters: usize,
    },
    /// Certify uniqueness of the best symmetric rank-one approximation of a
    /// binary cubic.
    Certify {
        input: PathBuf,
        /// Require the input to be symmetric.
        #[arg(long)]
        symmetric: bool,
        #[arg(long, value_enum, default_value_t = Backend::Rational)]
        backend: Backend,
    },
    /// Enumerate singular pairs or eigenpairs from a seed grid.
    Pairs {
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = PairMode::Singular)]
        mode: PairMode,
        #[arg(long, default_value_t = 64, value_parser = clap::value_parser!(u64).range(1..))]
        grid: u64,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
    },
    /// Sequential deflation against a joint nonnegative rank-2 fit.
    Deflate {
        input: PathBuf,
        #[arg(long, default_value_t = 64, value_parser = clap::value_parser!(u64).range(1..))]
        restarts: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Characteristic polynomial of a binary cubic.
    Charpoly {
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = Backend::Rational)]
        backend: Backend,
    },
}

#[derive(Serialize)]
struct InputDigest {
    path: String,
    sha256: String,
}

#[derive(Serialize)]
struct RunReport {
    command: &'static str,
    inputs: Vec<InputDigest>,
    parameters: Value,
    results: Value,
    timing_ms: f64,
}

enum Failure {
    Usage(String),
    Core(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Self::Core(e)
    }
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Core(e) => match e {
                Error::Parse(_)
                | Error::Io(_)
                | Error::Json(_)
                | Error::InvalidShape(_)
                | Error::LengthMismatch { .. }
                | Error::NonFinite(_)
                | Error::NotSymmetric { .. }
                | Error::DimensionMismatch(_)
                | Error::ModeOutOfRange { .. }
                | Error::InvalidArgument(_) => 2,
                Error::NotConverged { .. }
                | Error::AllRestartsFailed(_)
                | Error::Degenerate(_)
                | Error::Continuum { .. }
                | Error::Indeterminate => 3,
                Error::Unsupported(_) | Error::NotCubical(_) => 4,
                Error::Precondition(_) | Error::Negative { .. } | Error::NotPositive { .. } | Error::ZeroTensor => 5,
            },
        }
    }

    fn message(&self) -> String {
        match self {
            Failure::Usage(m) => m.clone(),
            Failure::Core(e) => e.to_string(),
        }
    }
}

type Outcome = std::result::Result<(Vec<InputDigest>, Value, Value), Failure>;

fn digest(path: &Path) -> Result<InputDigest, Failure> {
    let bytes = std::fs::read(path).map_err(|e| Failure::Core(Error::Io(e)))?;
    Ok(InputDigest {
        path: path.display().to_string(),
        sha256: hex::encode(Sha256::digest(&bytes)),
    })
}

fn to_value<T: Serialize>(x: &T) -> Result<Value, Failure> {
    serde_json::to_value(x).map_err(|e| Failure::Core(Error::Json(e)))
}

fn rank_one_results(t: &tenscert::DenseTensor, out: &BestRankOne, nonneg: bool) -> Result<Value, Failure> {
    let best = &out.best;
    let kkt = if nonneg {
        let mut vectors = best.vectors.clone();
        vectors[0].iter_mut().for_each(|x| *x *= best.lambda);
        let factors = NNFactors::new(t.shape().to_vec(), vec![vectors])?;
        to_value(&kkt_verify(&NonnegTensor::new(t.clone())?, &factors, nnapprox::KKT_ACCEPT * t.hs_norm())?)?
    } else {
        let pair = rankone::SingularPair {
            lambda: best.lambda,
            vectors: best.vectors.clone(),
            residual: 0.0,
        };
        json!({ "max_violation": kkt_check_rank_one(t, &pair)? })
    };
    Ok(json!({
        "rank": 1,
        "nonneg": nonneg,
        "lambda": best.lambda,
        "vectors": best.vectors,
        "value": best.value,
        "residual": best.residual,
        "kkt": kkt,
        "tied_classes": out.tied.len(),
        "tied": to_value(&out.tied)?,
        "converged_restarts": out.converged_restarts,
    }))
}

fn cmd_approx(
    input: &Path,
    rank: usize,
    nonneg: bool,
    restarts: usize,
    seed: u64,
    tol: Option<f64>,
    max_iters: usize,
) -> Outcome {
    let inputs = vec![digest(input)?];
    let t = load(input)?.tensor.to_f64();
    let (results, tol) = match (rank, nonneg) {
        (1, false) => {
            let tol = tol.unwrap_or(rankone::DEFAULT_TOL);
            (rank_one_results(&t, &best_rank_one(&t, restarts, seed, tol)?, false)?, tol)
        }
        (1, true) => {
            let tol = tol.unwrap_or(rankone::DEFAULT_TOL);
            let nn = NonnegTensor::new(t.clone())?;
            (rank_one_results(&t, &nonneg_best_rank_one(&nn, restarts, seed, tol)?, true)?, tol)
        }
        (_, false) => {
            return Err(Failure::Core(Error::Unsupported(format!(
                "rank {rank} without --nonneg: only rank one is supported for unconstrained approximation"
            ))))
        }
        (_, true) => {
            let tol = tol.unwrap_or(nnapprox::DEFAULT_TOL);
            let nn = NonnegTensor::new(t.clone())?;
            let out = nnapprox::anls(&nn, rank, restarts, seed, tol, max_iters)?;
            let results = json!({
                "rank": out.factors.r(),
                "requested_rank": rank,
                "nonneg": true,
                "factors": out.factors.terms(),
                "residual": out.residual,
                "converged": out.converged,
                "kkt": to_value(&out.kkt)?,
                "restart": out.restart,
                "sweeps": out.sweeps,
                "converged_restarts": out.converged_restarts,
            });
            (results, tol)
        }
    };
    let params = json!({
        "rank": rank,
        "nonneg": nonneg,
        "restarts": restarts,
        "seed": seed,
        "tol": tol,
        "max_iters": max_iters,
    });
    Ok((inputs, params, results))
}

fn binary_cubic_check(shape: &[usize]) -> Result<(), Failure> {
    if shape != [2, 2, 2] {
        return Err(Failure::Core(Error::Unsupported(format!(
            "certificates cover symmetric 2×2×2 tensors (binary cubics) only, got shape {shape:?}"
        ))));
    }
    Ok(())
}

fn cmd_certify(input: &Path, symmetric: bool, backend: Backend) -> Outcome {
    let inputs = vec![digest(input)?];
    let file = load(input)?;
    binary_cubic_check(file.tensor.shape())?;
    let cert = match backend {
        Backend::Rational => certify_unique(&SymTensor::new(file.tensor.to_rational())?)?,
        Backend::Float => certify_unique_float(&SymTensor::new(file.tensor.to_f64())?)?,
    };
    let params = json!({ "symmetric": symmetric || file.symmetric, "backend": backend });
    Ok((inputs, params, cert.to_json()))
}

fn cmd_pairs(input: &Path, mode: PairMode, grid: usize, tol: f64) -> Outcome {
    let inputs = vec![digest(input)?];
    let t = load(input)?.tensor.to_f64();
    let results = match mode {
        PairMode::Singular => to_value(&enumerate_singular_pairs(&t, grid, tol)?)?,
        PairMode::Eigen => to_value(&enumerate_eigenpairs(&SymTensor::new(t)?, grid, tol)?)?,
    };
    let params = json!({ "mode": mode, "grid": grid, "tol": tol });
    Ok((inputs, params, results))
}

fn cmd_deflate(input: &Path, restarts: usize, seed: u64) -> Outcome {
    let inputs = vec![digest(input)?];
    let t = PositiveTensor::new(load(input)?.tensor.to_f64())?;
    let report = nnapprox::compare_deflation(&t, restarts, seed)?;
    let params = json!({ "restarts": restarts, "seed": seed });
    Ok((inputs, params, to_value(&report)?))
}

fn cmd_charpoly(input: &Path, backend: Backend) -> Outcome {
    let inputs = vec![digest(input)?];
    let file = load(input)?;
    binary_cubic_check(file.tensor.shape())?;
    let results = match backend {
        Backend::Rational => {
            let psi = BigRational::psi(&SymTensor::new(file.tensor.to_rational())?)?;
            json!({
                "coefficients": psi.coeff_strings(),
                "polynomial": psi.to_string(),
                "backend": "rational",
            })
        }
        Backend::Float => {
            let psi = f64::psi(&SymTensor::new(file.tensor.to_f64())?)?;
            json!({ "coefficients": psi.coeffs(), "backend": "float" })
        }
    };
    Ok((inputs, json!({ "backend": backend }), results))
}

fn configure_threads() -> Result<(), Failure> {
    let Ok(raw) = std::env::var("TENSCERT_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| Failure::Usage(format!("TENSCERT_THREADS must be a positive integer, got {raw:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Failure::Usage(e.to_string()))
}

fn run(cli: Cli) -> Result<(), Failure> {
    configure_threads()?;
    let start = Instant::now();
    let (name, outcome) = match cli.command {
        Command::Approx {
            input,
            rank,
            nonneg,
            restarts,
            seed,
            tol,
            max_iters,
        } => (
            "approx",
            cmd_approx(&input, rank as usize, nonneg, restarts as usize, seed, tol, max_iters),
        ),
        Command::Certify {
            input,
            symmetric,
            backend,
        } => ("certify", cmd_certify(&input, symmetric, backend)),
        Command::Pairs { input, mode, grid, tol } => ("pairs", cmd_pairs(&input, mode, grid as usize, tol)),
        Command::Deflate { input, restarts, seed } => ("deflate", cmd_deflate(&input, restarts as usize, seed)),
        Command::Charpoly { input, backend } => ("charpoly", cmd_charpoly(&input, backend)),
    };
    let (inputs, parameters, results) = outcome?;
    let report = RunReport {
        command: name,
        inputs,
        parameters,
        results,
        timing_ms: start.elapsed().as_secs_f64() * 1e3,
    };
    let mut text = serde_json::to_string_pretty(&report).map_err(|e| Failure::Core(Error::Json(e)))?;
    text.push('\n');
    match cli.out {
        Some(path) => std::fs::write(path, text).map_err(|e| Failure::Core(Error::Io(e)))?,
        None => print!("{text}"),
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.exit_code())
        }
    }
}
