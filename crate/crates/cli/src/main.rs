use std::fs::OpenOptions;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use funm_core::experiments::{sample_trials, CSV_HEADER, DEFAULT_ETA, DEFAULT_TRIALS};
use funm_core::impulse::numeric_response;
use funm_core::{
    format_response, funm, impulse_response, mat_inverse, mat_mul, AnalyticFunction, Complex,
    ComplexMatrix, Exp, ExperimentConfig, FunmError, FunmParams, ImpulseSystem, Polynomial,
    StatsRow, DEFAULT_DELTA, DEFAULT_GAMMA,
};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

#[derive(Parser)]
#[command(name = "funm", version, about = "Analytic functions of matrices with clustered spectra")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate f(A) through the Newton interpolating polynomial.
    Funm(FunmArgs),
    /// Run random trials and report one row of statistics as CSV.
    Experiment(ExperimentArgs),
    /// Closed-form impulse response t -> <d, e^{At} b>.
    Impulse(ImpulseArgs),
}

#[derive(Args)]
struct Clustering {
    /// Clustering distance: eigenvalues closer than this share a cluster.
    #[arg(long, default_value_t = DEFAULT_DELTA)]
    delta: f64,
    /// Taylor degree slack per cluster (degree k + gamma for a k-point cluster).
    #[arg(long, default_value_t = DEFAULT_GAMMA, allow_negative_numbers = true)]
    gamma: i32,
}

impl Clustering {
    fn params(&self) -> Result<FunmParams, CliError> {
        Ok(FunmParams::new(self.delta, self.gamma)?)
    }
}

#[derive(Args)]
struct FunmArgs {
    /// Matrix JSON {"rows","cols","data":[[re,im],...]}, as a path or inline.
    #[arg(long, requires = "spectrum", conflicts_with = "factored")]
    matrix: Option<String>,
    /// Eigenvalues of the matrix as [[re,im],...], as a path or inline.
    #[arg(long, requires = "matrix")]
    spectrum: Option<String>,
    /// {"T": matrix, "Lambda": [[re,im],...]}; A = T^-1 diag(Lambda) T.
    #[arg(long, required_unless_present = "matrix")]
    factored: Option<String>,
    /// `exp`, or `poly:<coefficients>` with ascending [[re,im],...] or real coefficients.
    #[arg(long, default_value = "exp")]
    function: String,
    #[command(flatten)]
    clustering: Clustering,
    /// Output file for the result matrix (stdout if omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ExperimentArgs {
    /// Matrix order.
    #[arg(long)]
    n: usize,
    /// Maximum cluster size.
    #[arg(long = "K")]
    max_cluster: usize,
    #[command(flatten)]
    clustering: Clustering,
    /// Half-width of the perturbation box around each cluster center.
    #[arg(long, default_value_t = DEFAULT_ETA)]
    eta: f64,
    #[arg(long, default_value_t = DEFAULT_TRIALS)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// CSV file to append to (created with a header if missing).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Args)]
struct ImpulseArgs {
    /// System JSON {"A": matrix, "b": vector, "d": vector, "spectrum": [[re,im],...]}, as a path or inline.
    #[arg(long)]
    system: String,
    #[command(flatten)]
    clustering: Clustering,
    /// Times at which to compare the closed form with the numeric pipeline.
    #[arg(long, value_delimiter = ',', num_args = 1.., allow_negative_numbers = true)]
    eval_at: Vec<f64>,
    #[arg(long, value_enum, default_value = "text")]
    out: Format,
    /// Significant digits in text output.
    #[arg(long, default_value_t = 6)]
    digits: usize,
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Funm(#[from] FunmError),
    #[error("{0}")]
    Io(#[from] io::Error),
    #[error("{0}")]
    Csv(#[from] csv::Error),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Funm(e) if e.is_numerical() => 1,
            CliError::Io(_) => 1,
            _ => 2,
        }
    }
}

/// Parses `value` as inline JSON if it looks like JSON, otherwise as a file path.
fn read_json<T: DeserializeOwned>(field: &str, value: &str) -> Result<T, CliError> {
    let trimmed = value.trim_start();
    let text = if trimmed.starts_with('{') || trimmed.starts_with('[') {
        value.to_string()
    } else {
        std::fs::read_to_string(value)
            .map_err(|e| CliError::Usage(format!("--{field}: cannot read {value}: {e}")))?
    };
    serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("--{field}: {e}")))
}

#[derive(Deserialize)]
#[serde(untagged)]
enum Coefficient {
    Real(f64),
    Pair([f64; 2]),
}

#[derive(Deserialize)]
struct Factored {
    #[serde(rename = "T")]
    t: ComplexMatrix,
    #[serde(rename = "Lambda")]
    lambda: Vec<Complex>,
}

enum Function {
    Exp(Exp),
    Poly(Polynomial),
}

impl Function {
    fn parse(arg: &str) -> Result<Self, CliError> {
        if arg == "exp" {
            return Ok(Function::Exp(Exp::new()));
        }
        let Some(coeffs) = arg.strip_prefix("poly:") else {
            return Err(CliError::Usage(format!(
                "--function: expected `exp` or `poly:<coefficients>`, got `{arg}`"
            )));
        };
        let coeffs: Vec<Coefficient> = read_json("function", coeffs)?;
        if coeffs.is_empty() {
            return Err(CliError::Usage("--function: empty coefficient list".into()));
        }
        Ok(Function::Poly(Polynomial::new(
            coeffs
                .into_iter()
                .map(|c| match c {
                    Coefficient::Real(x) => Complex::new(x, 0.0),
                    Coefficient::Pair([re, im]) => Complex::new(re, im),
                })
                .collect(),
        )))
    }

    fn as_analytic(&self) -> &dyn AnalyticFunction {
        match self {
            Function::Exp(f) => f,
            Function::Poly(p) => p,
        }
    }
}

fn write_output(out: Option<&Path>, text: &str) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, format!("{text}\n"))?,
        None => println!("{text}"),
    }
    Ok(())
}

fn cmd_funm(args: &FunmArgs) -> Result<(), CliError> {
    let (a, eig) = match (&args.matrix, &args.spectrum, &args.factored) {
        (Some(m), Some(s), None) => {
            let a: ComplexMatrix = read_json("matrix", m)?;
            let eig: Vec<Complex> = read_json("spectrum", s)?;
            (a, eig)
        }
        (None, None, Some(f)) => {
            let f: Factored = read_json("factored", f)?;
            if f.t.rows() != f.lambda.len() || !f.t.is_square() {
                return Err(CliError::Usage(format!(
                    "--factored: T is {}x{} but Lambda has {} entries",
                    f.t.rows(),
                    f.t.cols(),
                    f.lambda.len()
                )));
            }
            let t_inv = mat_inverse(&f.t)?;
            let a = mat_mul(&mat_mul(&t_inv, &ComplexMatrix::from_diag(&f.lambda))?, &f.t)?;
            (a, f.lambda)
        }
        _ => {
            return Err(CliError::Usage(
                "give either --matrix with --spectrum, or --factored".into(),
            ))
        }
    };
    if a.rows() != eig.len() {
        return Err(CliError::Usage(format!(
            "--spectrum: {} eigenvalues for a {}x{} matrix",
            eig.len(),
            a.rows(),
            a.cols()
        )));
    }
    let f = Function::parse(&args.function)?;
    let result = funm(&a, &eig, f.as_analytic(), args.clustering.params()?)?;
    let json = serde_json::to_string(&result).expect("matrix serializes");
    write_output(args.out.as_deref(), &json)
}

fn cmd_experiment(args: &ExperimentArgs) -> Result<(), CliError> {
    let config = ExperimentConfig {
        delta: args.clustering.delta,
        eta: args.eta,
        ..ExperimentConfig::new(args.n, args.max_cluster, args.clustering.gamma)
            .with_trials(args.trials)
            .with_seed(args.seed)
    };
    config.validate()?;
    let trials = sample_trials(&config)?;
    let row = StatsRow::from_trials(&config, &trials);

    match &args.out {
        Some(path) => {
            let fresh = std::fs::metadata(path).map(|m| m.len() == 0).unwrap_or(true);
            let file = OpenOptions::new().create(true).append(true).open(path)?;
            write_csv(file, &row, fresh)?;
        }
        None => write_csv(io::stdout().lock(), &row, true)?,
    }
    eprintln!(
        "n={} K={} gamma={}: max relerr {:.3e}, mean {:.3e}, median {:.3e}; M={}/{}; median kappa {:.3e}",
        row.n,
        row.max_cluster,
        row.gamma,
        row.max_rel_error,
        row.mean_rel_error,
        row.median_rel_error,
        row.exceeded,
        row.trials,
        row.median_kappa
    );
    Ok(())
}

fn write_csv<W: Write>(w: W, row: &StatsRow, header: bool) -> Result<(), CliError> {
    let mut wtr = csv::Writer::from_writer(w);
    if header {
        wtr.write_record(CSV_HEADER)?;
    }
    wtr.write_record(row.csv_record())?;
    wtr.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct EvalJson {
    t: f64,
    symbolic: Complex,
    numeric: Complex,
    rel_diff: f64,
}

#[derive(Serialize)]
struct ImpulseJson {
    #[serde(flatten)]
    response: funm_core::impulse::ResponseJson,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    eval: Vec<EvalJson>,
}

fn cmd_impulse(args: &ImpulseArgs) -> Result<(), CliError> {
    let system: ImpulseSystem = read_json("system", &args.system)?;
    system
        .validate()
        .map_err(|e| CliError::Usage(format!("--system: {e}")))?;
    let params = args.clustering.params()?;
    let response = impulse_response(&system, params)?;
    let eval = args
        .eval_at
        .iter()
        .map(|&t| {
            let symbolic = response.eval(t);
            let numeric = numeric_response(&system, params, t)?;
            let rel_diff = (symbolic - numeric).norm() / numeric.norm().max(f64::MIN_POSITIVE);
            Ok(EvalJson {
                t,
                symbolic,
                numeric,
                rel_diff,
            })
        })
        .collect::<Result<Vec<_>, CliError>>()?;

    match args.out {
        Format::Json => {
            let json = ImpulseJson {
                response: response.to_json(),
                eval,
            };
            println!("{}", serde_json::to_string_pretty(&json).expect("response serializes"));
        }
        Format::Text => {
            println!("y(t) = {}", format_response(&response, args.digits));
            if !eval.is_empty() {
                let z = |c: Complex| format!("{:.14e}{:+.14e}i", c.re, c.im);
                println!("{:>8}  {:>44}  {:>44}  {:>10}", "t", "symbolic", "numeric", "rel diff");
                for e in &eval {
                    println!(
                        "{:>8}  {:>44}  {:>44}  {:>10.3e}",
                        e.t,
                        z(e.symbolic),
                        z(e.numeric),
                        e.rel_diff
                    );
                }
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Funm(a) => cmd_funm(a),
        Command::Experiment(a) => cmd_experiment(a),
        Command::Impulse(a) => cmd_impulse(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
